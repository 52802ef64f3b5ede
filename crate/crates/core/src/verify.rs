//! Seeded property suites over random codes and subspaces.
//!
//! Trial `i` draws from its own ChaCha stream, so a single failing trial can
//! be replayed with `only_trial` and gives the same instance.

use crate::error::{Error, Result};
use crate::field_tower::FieldTower;
use crate::geometry::{
    avoid_complement, cover_complement, is_cutting, is_evasive, linearity_index, refutes_cutting, CuttingRoute,
};
use crate::linalg::{self, flatten_subspace, flatten_vec, unflatten_vec, Subspace, SubspaceEnumerator};
use crate::minimality::{
    all_verdicts, constant_weight_class, is_r_minimal, is_rank_minimal, refutation_holds, subcode_conditions, Method,
    SubcodeMethod,
};
use crate::rank_metric::{
    chi, full_support_codeword, grw_sequence, grw_with, max_subcode_weight, rank_support, subcode_weight,
    subcode_weight_direct, support_code, wt, GrwRoute, RankCode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

pub const SUITE_SCHEMA: &str = "rankmin-suite/v1";
const MAX_COUNTEREXAMPLES: usize = 5;

/// (p, e, m) of the towers used when none are given: GF(4)/GF(2), GF(8)/GF(2), GF(9)/GF(3).
pub const DEFAULT_TOWERS: [(u32, u32, u32); 3] = [(2, 1, 2), (2, 1, 3), (3, 1, 2)];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: u64,
    pub field: String,
    pub detail: Value,
    /// Command line that replays exactly this trial.
    pub rerun: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only_trial: Option<u64>,
    pub towers: Vec<String>,
    pub passed: bool,
    /// Total property evaluations.
    pub instances: u64,
    pub properties: Vec<PropertyReport>,
    /// Not serialized, so reports are byte-identical across runs.
    #[serde(skip)]
    pub wall_time_ms: u128,
}

/// Per-trial sampling context.
pub struct Trial {
    pub index: u64,
    pub rng: ChaCha8Rng,
    pub t: Arc<FieldTower>,
}

struct Check {
    name: &'static str,
    ok: bool,
    detail: Value,
}

type Checks = Vec<Check>;
type SuiteFn = fn(&mut Trial, &mut Checks) -> Result<()>;

fn check(out: &mut Checks, name: &'static str, ok: bool, detail: Value) {
    out.push(Check { name, ok, detail });
}

pub const SUITES: [(&str, &str); 21] = [
    ("support-duality", "rank supports against dual spaces, the column-support map and the subcode weight formula"),
    ("weight-ceiling", "wt(C) <= mk with equality exactly for full column support"),
    ("grw-monotone", "generalized rank weights strictly increase; geometric and brute routes agree"),
    ("singleton", "Singleton-type bound for rank-minimal subcodes and its equality case"),
    ("subcode-inheritance", "C is r-minimal iff every t-dimensional subcode is, for r < t <= k"),
    ("lower-r-inheritance", "r-minimal implies s-minimal for s <= r"),
    ("constant-weight-minimal", "constant r-dimensional subcode weight implies r-minimal"),
    ("evasive-properties", "h <= t, shifted evasiveness and quotient evasiveness"),
    ("linearity-lower-bound", "dim B >= k(m-1)+s implies linearity index >= s"),
    ("cutting-dimension", "cutting criteria at dimension (k-1)m and the dimension lower bound"),
    ("constant-weight-classes", "constant subcode weight, full column support and wt = mk coincide"),
    ("minimal-subcode-conditions", "the eight rank-minimal subcode characterisations agree"),
    ("full-support-codeword", "for n <= m some codeword has rank support chi(C)"),
    ("weight-linearity", "wt(C) >= (k-1)m+1 implies r-minimal for all r <= k-1"),
    ("max-subcode-weight", "largest s-dimensional subcode weight is min(ms, wt(C))"),
    ("criteria-agree", "all applicable r-minimality deciders agree; refutations re-verify"),
    ("cutting-routes", "definition, line-meeting and evasive cutting tests agree"),
    ("avoid", "complement avoidance and covering constructions meet their postconditions"),
    ("basis-invariance", "rank supports do not depend on the basis; expansion is linear"),
    ("field-axioms", "field axioms on random triples"),
    ("empty", "no properties"),
];

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "support-duality" => support_duality,
        "weight-ceiling" => weight_ceiling,
        "grw-monotone" => grw_monotone,
        "singleton" => singleton,
        "subcode-inheritance" => subcode_inheritance,
        "lower-r-inheritance" => lower_r_inheritance,
        "constant-weight-minimal" => constant_weight_minimal,
        "evasive-properties" => evasive_properties,
        "linearity-lower-bound" => linearity_lower_bound,
        "cutting-dimension" => cutting_dimension,
        "constant-weight-classes" => constant_weight_classes,
        "minimal-subcode-conditions" => minimal_subcode_conditions,
        "full-support-codeword" => full_support_codeword_suite,
        "weight-linearity" => weight_linearity,
        "max-subcode-weight" => max_subcode_weight_suite,
        "criteria-agree" => criteria_agree,
        "cutting-routes" => cutting_routes,
        "avoid" => avoid,
        "basis-invariance" => basis_invariance,
        "field-axioms" => field_axioms,
        "empty" => |_, _| Ok(()),
        _ => return None,
    })
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Runs `trials` seeded trials of a suite, cycling through `towers`.
pub fn run_suite(name: &str, trials: u64, seed: u64, towers: &[String], only_trial: Option<u64>) -> Result<SuiteReport> {
    let f = suite_fn(name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let towers: Vec<Arc<FieldTower>> = if towers.is_empty() {
        DEFAULT_TOWERS.iter().map(|&(p, e, m)| FieldTower::standard(p, e, m).map(Arc::new)).collect::<Result<_>>()?
    } else {
        towers.iter().map(|s| FieldTower::parse(s).map(Arc::new)).collect::<Result<_>>()?
    };
    let tower_specs: Vec<String> = towers.iter().map(|t| t.spec()).collect();
    let start = Instant::now();
    let indices: Vec<u64> = match only_trial {
        Some(i) if i >= trials => {
            return Err(Error::InvalidParameter(format!("trial {i} out of range for {trials} trials")));
        }
        Some(i) => vec![i],
        None => (0..trials).collect(),
    };
    let results: Vec<(u64, String, Checks)> = indices
        .par_iter()
        .map(|&i| {
            let t = towers[(i % towers.len() as u64) as usize].clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut trial = Trial { index: i, rng, t: t.clone() };
            let mut out = Vec::new();
            if let Err(e) = f(&mut trial, &mut out) {
                check(&mut out, "no-error", false, json!({ "error": e.to_string() }));
            }
            (i, t.spec(), out)
        })
        .collect();
    let mut props: BTreeMap<&'static str, PropertyReport> = BTreeMap::new();
    let mut instances = 0;
    for (i, field, checks) in results {
        for c in checks {
            instances += 1;
            let p = props.entry(c.name).or_insert_with(|| PropertyReport {
                name: c.name.to_string(),
                checked: 0,
                failed: 0,
                counterexamples: vec![],
            });
            p.checked += 1;
            if !c.ok {
                p.failed += 1;
                if p.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    let rerun = format!(
                        "rankmin verify --suite {name} --trials {trials} --seed {seed} --only-trial {i} --towers '{}'",
                        tower_specs.join(";")
                    );
                    p.counterexamples.push(Counterexample { trial: i, field: field.clone(), detail: c.detail, rerun });
                }
            }
        }
    }
    let properties: Vec<PropertyReport> = props.into_values().collect();
    Ok(SuiteReport {
        schema: SUITE_SCHEMA.into(),
        suite: name.to_string(),
        seed,
        trials,
        only_trial,
        towers: tower_specs,
        passed: properties.iter().all(|p| p.failed == 0),
        instances,
        properties,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

// sampling

fn rand_vec(rng: &mut ChaCha8Rng, order: u32, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..order)).collect()
}

/// A uniformly drawn spanning set reduced to a subspace of exactly dimension d.
fn rand_subspace(rng: &mut ChaCha8Rng, f: &crate::Gf, n: usize, d: usize) -> Subspace {
    loop {
        let rows: Vec<Vec<u32>> = (0..d).map(|_| rand_vec(rng, f.order(), n)).collect();
        let s = Subspace::span(f, n, &rows);
        if s.dim() == d {
            return s;
        }
    }
}

fn rand_e_subspace(tr: &mut Trial, n: usize, d: usize) -> Subspace {
    let t = tr.t.clone();
    rand_subspace(&mut tr.rng, t.e_field(), n, d)
}

fn rand_f_subspace(tr: &mut Trial, n: usize, d: usize) -> Subspace {
    let t = tr.t.clone();
    rand_subspace(&mut tr.rng, t.f(), n, d)
}

fn rand_code(tr: &mut Trial, n_max: usize, k_max: usize) -> Result<RankCode> {
    let n = tr.rng.gen_range(1..=n_max);
    let k = tr.rng.gen_range(1..=k_max.min(n));
    let s = rand_e_subspace(tr, n, k);
    Ok(RankCode::from_subspace(tr.t.clone(), &s))
}

/// A k-dimensional code whose columns contain an F-basis of E^k, so U = E^[k].
fn full_support_code(tr: &mut Trial, k: usize) -> Result<RankCode> {
    let t = tr.t.clone();
    let m = t.m();
    let mut cols: Vec<Vec<u32>> = Vec::new();
    for j in 0..k {
        for &tau in t.basis() {
            let mut c = vec![0u32; k];
            c[j] = tau;
            cols.push(c);
        }
    }
    if tr.rng.gen_bool(0.5) {
        cols.push(rand_vec(&mut tr.rng, t.qm(), k));
    }
    for i in (1..cols.len()).rev() {
        let j = tr.rng.gen_range(0..=i);
        cols.swap(i, j);
    }
    // a random change of basis of E^k keeps U = E^[k]
    let g = loop {
        let g: Vec<Vec<u32>> = (0..k).map(|_| rand_vec(&mut tr.rng, t.qm(), k)).collect();
        if linalg::rank(t.e_field(), &g) == k {
            break g;
        }
    };
    let e = t.e_field();
    let n = cols.len();
    let rows: Vec<Vec<u32>> =
        (0..k).map(|i| (0..n).map(|j| linalg::dot(e, &g[i], &cols[j])).collect()).collect();
    debug_assert!(n >= k * m);
    RankCode::new(t, n, &rows)
}

/// Mostly random codes, with full column support a third of the time.
fn mixed_code(tr: &mut Trial, n_max: usize, k_max: usize) -> Result<RankCode> {
    if tr.rng.gen_bool(1.0 / 3.0) {
        let k = tr.rng.gen_range(1..=k_max);
        full_support_code(tr, k)
    } else {
        rand_code(tr, n_max, k_max)
    }
}

fn code_json(c: &RankCode) -> Value {
    serde_json::to_value(c.to_repr()).unwrap_or(Value::Null)
}

fn sub_json(s: &Subspace) -> Value {
    serde_json::to_value(s).unwrap_or(Value::Null)
}

/// The F-subspace of F^n made of the F-rational vectors of an E-subspace.
fn base_part(t: &FieldTower, s: &Subspace) -> Subspace {
    let n = s.ambient();
    let f = t.f();
    let vecs: Vec<Vec<u32>> = Subspace::full(n).elements(f).into_iter().filter(|v| s.contains(t.e_field(), v)).collect();
    Subspace::span(f, n, &vecs)
}

/// Max over all s-dimensional message spaces of the subcode weight.
fn brute_max_weight(c: &RankCode, s: usize) -> Result<usize> {
    let en = SubspaceEnumerator::new(c.tower().qm(), c.k(), s)?;
    let mut best = 0;
    en.for_each_range(0, en.total(), |_, rows| {
        best = best.max(subcode_weight(c, &Subspace::from_rref(c.k(), rows.to_vec())));
        true
    });
    Ok(best)
}

// suites

fn support_duality(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let (f, e) = (t.f(), t.e_field());
    let n = tr.rng.gen_range(1..=4);
    let d = tr.rng.gen_range(0..=n);
    let a = rand_e_subspace(tr, n, d);
    let xa = chi(&t, &a);
    let lhs = base_part(&t, &a.dual(e));
    check(out, "dual-meets-base-field", lhs == xa.dual(f), json!({ "a": sub_json(&a) }));
    check(out, "weight-from-dual", wt(&t, &a) == n - lhs.dim(), json!({ "a": sub_json(&a) }));

    let c = rand_code(tr, 4, 3)?;
    let (k, n) = (c.k(), c.n());
    let u = c.column_support();
    let km = k * t.m();
    let images: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut th = vec![0u32; n];
            th[j] = 1;
            flatten_vec(&t, &c.gen().iter().map(|g| linalg::dot(e, g, &th)).collect::<Vec<_>>())
        })
        .collect();
    check(out, "image-is-column-support", Subspace::span(f, km, &images) == u, json!({ "code": code_json(&c) }));
    let kernel: Vec<Vec<u32>> = Subspace::full(n)
        .elements(f)
        .into_iter()
        .filter(|th| c.gen().iter().all(|g| linalg::dot(e, g, th) == 0))
        .collect();
    let kernel = Subspace::span(f, n, &kernel);
    check(
        out,
        "kernel-is-dual-base-part",
        kernel == base_part(&t, &c.dual_code().as_subspace()),
        json!({ "code": code_json(&c) }),
    );
    let db = tr.rng.gen_range(0..=k);
    let b = rand_e_subspace(tr, k, db);
    let dp = tr.rng.gen_range(0..=k);
    let p = rand_e_subspace(tr, k, dp);
    check(
        out,
        "weight-formula",
        subcode_weight(&c, &b) == subcode_weight_direct(&c, &b),
        json!({ "code": code_json(&c), "b": sub_json(&b) }),
    );
    let xd = chi(&t, &c.encode(&b));
    let xq = chi(&t, &c.encode(&p));
    let bu = flatten_subspace(&t, &b.dual(e)).intersect(f, &u)?;
    let pu = flatten_subspace(&t, &p.dual(e)).intersect(f, &u)?;
    check(
        out,
        "support-containment",
        xq.is_subspace_of(f, &xd) == bu.is_subspace_of(f, &pu),
        json!({ "code": code_json(&c), "b": sub_json(&b), "p": sub_json(&p) }),
    );
    Ok(())
}

fn weight_ceiling(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let c = mixed_code(tr, 4, 3)?;
    let k = c.k();
    let w = c.weight();
    let cj = code_json(&c);
    check(out, "weight-at-most-mk", w <= m * k, json!({ "code": cj }));
    check(out, "equality-iff-full-support", (w == m * k) == (c.column_support().dim() == m * k), json!({ "code": cj }));
    if w == m * k {
        let d = tr.rng.gen_range(0..=k);
        let b = rand_e_subspace(tr, k, d);
        check(
            out,
            "full-weight-subcodes",
            subcode_weight_direct(&c, &b) == m * d,
            json!({ "code": cj, "b": sub_json(&b) }),
        );
    }
    Ok(())
}

fn grw_monotone(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = mixed_code(tr, 4, 3)?;
    let seq = grw_sequence(&c)?;
    let cj = code_json(&c);
    check(out, "strictly-increasing", seq.windows(2).all(|w| w[0] < w[1]), json!({ "code": cj, "d": seq }));
    check(out, "top-weight-is-code-weight", seq[c.k()] == c.weight(), json!({ "code": cj, "d": seq }));
    for r in 0..=c.k() {
        let brute = grw_with(&c, r, GrwRoute::Brute)?.0;
        check(out, "routes-agree", brute == seq[r], json!({ "code": cj, "r": r, "brute": brute }));
    }
    Ok(())
}

fn singleton(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let e = t.e_field();
    let c = mixed_code(tr, 4, 3)?;
    let k = c.k();
    let cj = code_json(&c);
    let d = tr.rng.gen_range(0..=k);
    let mut b = rand_e_subspace(tr, k, d);
    // walk down to a rank-minimal subcode of the same dimension
    loop {
        let v = is_rank_minimal(&c, &b, SubcodeMethod::DualSupport)?;
        match v.witness {
            Some(w) if !v.verdict => b = w,
            _ => break,
        }
    }
    let dsub = c.encode(&b);
    let xd = chi(&t, &dsub);
    let lhs = k - d;
    let gap = c.weight() as i64 - xd.dim() as i64;
    check(out, "singleton-bound", lhs as i64 <= gap, json!({ "code": cj, "b": sub_json(&b) }));
    let sum = support_code(&xd).sum(e, &c.as_subspace())?;
    let full = support_code(&chi(&t, &c.as_subspace()));
    check(out, "equality-case", (lhs as i64 == gap) == (sum == full), json!({ "code": cj, "b": sub_json(&b) }));
    let r = tr.rng.gen_range(0..=k);
    if is_r_minimal(&c, r, Method::Grw)?.verdict {
        let p = rand_e_subspace(tr, k, r);
        let w = subcode_weight(&c, &p);
        check(
            out,
            "r-minimal-weight-bound",
            w + k <= c.weight() + r,
            json!({ "code": cj, "r": r, "b": sub_json(&p) }),
        );
    }
    Ok(())
}

fn subcode_inheritance(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = loop {
        let c = mixed_code(tr, 4, 3)?;
        if c.k() >= 2 {
            break c;
        }
    };
    let k = c.k();
    let r = tr.rng.gen_range(1..k);
    let tt = tr.rng.gen_range(r + 1..=k);
    let lhs = is_r_minimal(&c, r, Method::Grw)?.verdict;
    let en = SubspaceEnumerator::new(c.tower().qm(), k, tt)?;
    let mut rhs = true;
    for rows in en.iter() {
        let sub = c.subcode(&Subspace::from_rref(k, rows));
        if !is_r_minimal(&sub, r, Method::Grw)?.verdict {
            rhs = false;
            break;
        }
    }
    check(out, "equivalence", lhs == rhs, json!({ "code": code_json(&c), "r": r, "t": tt }));
    Ok(())
}

fn lower_r_inheritance(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = mixed_code(tr, 4, 3)?;
    let v: Vec<bool> = (0..=c.k()).map(|r| is_r_minimal(&c, r, Method::Grw).map(|x| x.verdict)).collect::<Result<_>>()?;
    for r in 0..c.k() {
        if v[r] {
            check(out, "downward-closed", v[..=r].iter().all(|&x| x), json!({ "code": code_json(&c), "r": r }));
        }
    }
    Ok(())
}

fn constant_weight_minimal(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = loop {
        let c = if tr.rng.gen_bool(0.5) {
            let k = tr.rng.gen_range(2..=3);
            full_support_code(tr, k)?
        } else {
            rand_code(tr, 4, 3)?
        };
        if c.k() >= 2 {
            break c;
        }
    };
    let r = tr.rng.gen_range(1..c.k());
    let rep = constant_weight_class(&c, r)?;
    if rep.constant_by_enumeration {
        let v = is_r_minimal(&c, r, Method::Definition)?.verdict;
        check(out, "implies-r-minimal", v, json!({ "code": code_json(&c), "r": r }));
    }
    Ok(())
}

/// Image of an F-subspace J of E^k under E^k → E^k / A, identified with E^(k-a)
/// through x ↦ (x·p_i) for a basis p_i of A^⊥.
fn quotient_image(t: &FieldTower, j: &Subspace, a: &Subspace) -> Subspace {
    let e = t.e_field();
    let p = a.dual(e);
    let rows: Vec<Vec<u32>> = j
        .basis()
        .iter()
        .map(|y| {
            let x = unflatten_vec(t, y);
            flatten_vec(t, &p.basis().iter().map(|pi| linalg::dot(e, &x, pi)).collect::<Vec<_>>())
        })
        .collect();
    Subspace::span(t.f(), p.dim() * t.m(), &rows)
}

fn evasive_properties(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let k = tr.rng.gen_range(1..=3);
    let d = tr.rng.gen_range(k..=k * m);
    let j = rand_f_subspace(tr, k * m, d);
    let h = tr.rng.gen_range(0..=k);
    let base = is_evasive(&t, &j, h, i64::MAX)?;
    if !base.spanning {
        return Ok(());
    }
    let tt = base.max_meet;
    let jj = json!({ "j": sub_json(&j), "h": h, "t": tt });
    check(out, "h-at-most-t", h <= tt, jj.clone());
    for s in 0..=h {
        let ok = is_evasive(&t, &j, h - s, tt as i64 - s as i64)?.evasive;
        check(out, "shifted", ok, json!({ "j": sub_json(&j), "h": h, "t": tt, "s": s }));
    }
    if k >= 2 {
        let a_dim = tr.rng.gen_range(0..=h.min(k - 1));
        let a = rand_e_subspace(tr, k, a_dim);
        let v = j.intersect_dim(t.f(), &flatten_subspace(&t, &a));
        let img = quotient_image(&t, &j, &a);
        let ok = is_evasive(&t, &img, h - a_dim, tt as i64 - v as i64)?.evasive;
        check(out, "quotient", ok, json!({ "j": sub_json(&j), "h": h, "t": tt, "a": sub_json(&a) }));
    }
    Ok(())
}

fn linearity_lower_bound(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let k = tr.rng.gen_range(1..=3);
    let s = tr.rng.gen_range(0..=k);
    let d = tr.rng.gen_range(k * (m - 1) + s..=k * m);
    let b = rand_f_subspace(tr, k * m, d);
    let (l, w) = linearity_index(&t, &b)?;
    let bj = json!({ "b": sub_json(&b), "s": s });
    check(out, "bound", l >= s, bj.clone());
    check(out, "witness-contained", w.dim() == l && flatten_subspace(&t, &w).is_subspace_of(t.f(), &b), bj);
    Ok(())
}

fn cutting_dimension(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let k = tr.rng.gen_range(2..=3);
    let r = tr.rng.gen_range(0..k);
    let a = rand_f_subspace(tr, k * m, (k - 1) * m);
    let (l, _) = linearity_index(&t, &a)?;
    let v = is_cutting(&t, &a, r, CuttingRoute::LineMeeting)?.verdict;
    check(
        out,
        "linearity-criterion",
        v == (l as i64 <= k as i64 - r as i64 - 2),
        json!({ "a": sub_json(&a), "r": r }),
    );
    let d = tr.rng.gen_range(m * r + 1..=k * m);
    let a = rand_f_subspace(tr, k * m, d);
    if is_cutting(&t, &a, r, CuttingRoute::LineMeeting)?.verdict {
        let (l, _) = linearity_index(&t, &a)?;
        let s = (k - r - 1).min(l);
        check(out, "dimension-bound", d >= (m - 1) * (r + s) + k, json!({ "a": sub_json(&a), "r": r }));
    }
    Ok(())
}

fn constant_weight_classes(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = loop {
        let c = if tr.rng.gen_bool(0.5) {
            let k = tr.rng.gen_range(2..=3);
            full_support_code(tr, k)?
        } else {
            rand_code(tr, 4, 3)?
        };
        if c.k() >= 2 {
            break c;
        }
    };
    let r = tr.rng.gen_range(1..c.k());
    let rep = constant_weight_class(&c, r)?;
    check(
        out,
        "three-way",
        rep.constant_by_enumeration == rep.full_column_support && rep.full_column_support == rep.full_weight,
        json!({ "code": code_json(&c), "r": r }),
    );
    Ok(())
}

fn minimal_subcode_conditions(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = rand_code(tr, 4, 3)?;
    let d = tr.rng.gen_range(0..=c.k());
    let b = rand_e_subspace(tr, c.k(), d);
    let conds = subcode_conditions(&c, &b)?;
    let bj = json!({ "code": code_json(&c), "b": sub_json(&b), "conditions": conds });
    check(out, "all-agree", conds.iter().all(|&x| x == conds[0]), bj.clone());
    for m in [SubcodeMethod::DualSupport, SubcodeMethod::Closure, SubcodeMethod::Definition] {
        let v = is_rank_minimal(&c, &b, m)?;
        check(out, "deciders-match-conditions", v.verdict == conds[0], bj.clone());
        if let Some(w) = v.witness {
            let ok = w.dim() == d && {
                let (xw, xd) = (chi(c.tower(), &c.encode(&w)), chi(c.tower(), &c.encode(&b)));
                xw.is_subspace_of(c.tower().f(), &xd) && xw != xd
            };
            check(out, "witness-has-smaller-support", ok, bj.clone());
        }
    }
    Ok(())
}

fn full_support_codeword_suite(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let c = rand_code(tr, t.m(), t.m())?;
    let x = full_support_codeword(&c)?.ok_or_else(|| Error::PreconditionViolated("n <= m expected".into()))?;
    let ok = c.as_subspace().contains(t.e_field(), &x) && rank_support(&t, &x) == chi(&t, &c.as_subspace());
    check(out, "rank-support-is-chi", ok, json!({ "code": code_json(&c), "codeword": x }));
    Ok(())
}

fn weight_linearity(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let c = mixed_code(tr, 5, 3)?;
    let k = c.k();
    if c.weight() + m > k * m {
        for r in 0..k {
            let v = is_r_minimal(&c, r, Method::Cutting)?.verdict;
            check(out, "all-r-minimal", v, json!({ "code": code_json(&c), "r": r }));
        }
    }
    Ok(())
}

fn max_subcode_weight_suite(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let c = rand_code(tr, 4, 4)?;
    let wt_c = c.weight();
    for s in 0..=c.k() {
        let (w, b) = max_subcode_weight(&c, s)?;
        let cj = json!({ "code": code_json(&c), "s": s });
        check(out, "value", w == (m * s).min(wt_c), cj.clone());
        check(out, "witness", b.dim() == s && subcode_weight_direct(&c, &b) == w, cj.clone());
        if SubspaceEnumerator::new(t.qm(), c.k(), s)?.total() <= 2000 {
            check(out, "is-maximum", brute_max_weight(&c, s)? == w, cj);
        }
    }
    Ok(())
}

fn criteria_agree(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let c = mixed_code(tr, 5, 3)?;
    let r = tr.rng.gen_range(0..=c.k());
    let vs = all_verdicts(&c, r)?;
    let cj = json!({ "code": code_json(&c), "r": r, "verdicts": vs.iter().map(|v| v.verdict).collect::<Vec<_>>() });
    check(out, "agree", vs.iter().all(|v| v.verdict == vs[0].verdict), cj.clone());
    for v in &vs {
        if let Some(w) = &v.witness {
            check(out, "refutation-valid", refutation_holds(&c, w), cj.clone());
        }
    }
    Ok(())
}

fn cutting_routes(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let m = t.m();
    let k = tr.rng.gen_range(1..=3);
    let r = tr.rng.gen_range(0..k);
    let d = tr.rng.gen_range(0..=k * m);
    let a = rand_f_subspace(tr, k * m, d);
    let vs: Vec<_> = CuttingRoute::ALL.iter().map(|&route| is_cutting(&t, &a, r, route)).collect::<Result<_>>()?;
    let aj = json!({ "a": sub_json(&a), "r": r });
    check(out, "agree", vs.iter().all(|v| v.verdict == vs[0].verdict), aj.clone());
    for v in &vs {
        if let Some(rf) = &v.refuting {
            check(out, "refutation-valid", refutes_cutting(&t, &a, r, &rf.v), aj.clone());
        }
    }
    Ok(())
}

fn avoid(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let (m, f) = (t.m(), t.f());
    let k = tr.rng.gen_range(1..=3);
    let tt = tr.rng.gen_range(0..=k);
    let hd = tr.rng.gen_range(0..=m * tt);
    let h = rand_f_subspace(tr, k * m, hd);
    let v = avoid_complement(&t, &h, tt)?;
    let hj = json!({ "h": sub_json(&h), "t": tt });
    check(out, "avoid-dimension", v.dim() == k - tt, hj.clone());
    check(out, "avoid-trivial-meet", h.intersect_dim(f, &flatten_subspace(&t, &v)) == 0, hj);
    let bd = tr.rng.gen_range(m * tt..=k * m);
    let b = rand_f_subspace(tr, k * m, bd);
    let w = cover_complement(&t, &b, tt)?;
    let bj = json!({ "b": sub_json(&b), "t": tt });
    check(out, "cover-dimension", w.dim() == k - tt, bj.clone());
    check(out, "cover-spans", b.sum_dim(f, &flatten_subspace(&t, &w)) == k * m, bj);
    Ok(())
}

fn basis_invariance(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    let (f, e) = (t.f(), t.e_field());
    let m = t.m();
    let t2 = loop {
        let basis = rand_vec(&mut tr.rng, t.qm(), m);
        if let Ok(t2) = t.with_basis(&basis) {
            break t2;
        }
    };
    let n = tr.rng.gen_range(1..=4);
    let alpha = rand_vec(&mut tr.rng, t.qm(), n);
    let beta = rand_vec(&mut tr.rng, t.qm(), n);
    let aj = json!({ "alpha": alpha, "basis": t2.basis() });
    check(out, "rank-support-basis-free", rank_support(&t, &alpha) == rank_support(&t2, &alpha), aj.clone());
    let c = tr.rng.gen_range(1..t.qm());
    let scaled = linalg::scale(e, c, &alpha);
    check(out, "rank-support-scaling", rank_support(&t, &scaled) == rank_support(&t, &alpha), aj.clone());
    let d = tr.rng.gen_range(0..=n);
    let s = rand_e_subspace(tr, n, d);
    check(out, "chi-basis-free", chi(&t, &s) == chi(&t2, &s), json!({ "s": sub_json(&s) }));
    let (a, b) = (tr.rng.gen_range(0..t.q()), tr.rng.gen_range(0..t.q()));
    for tw in [&*t, &t2] {
        let comb = linalg::add_vec(e, &linalg::scale(e, a, &alpha), &linalg::scale(e, b, &beta));
        let lhs = tw.expand(&comb);
        let (ma, mb) = (tw.expand(&alpha), tw.expand(&beta));
        let rhs: Vec<Vec<u32>> =
            ma.iter().zip(&mb).map(|(x, y)| linalg::add_vec(f, &linalg::scale(f, a, x), &linalg::scale(f, b, y))).collect();
        check(out, "expand-linear", lhs == rhs, aj.clone());
        check(out, "reconstruction", tw.collapse(&ma) == alpha, aj.clone());
    }
    Ok(())
}

fn field_axioms(tr: &mut Trial, out: &mut Checks) -> Result<()> {
    let t = tr.t.clone();
    for g in [t.e_field(), t.f()] {
        let o = g.order();
        let (a, b, c) = (tr.rng.gen_range(0..o), tr.rng.gen_range(0..o), tr.rng.gen_range(0..o));
        let j = json!({ "order": o, "a": a, "b": b, "c": c });
        check(out, "add-associative", g.add(g.add(a, b), c) == g.add(a, g.add(b, c)), j.clone());
        check(out, "mul-associative", g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)), j.clone());
        check(out, "commutative", g.add(a, b) == g.add(b, a) && g.mul(a, b) == g.mul(b, a), j.clone());
        check(out, "distributive", g.mul(a, g.add(b, c)) == g.add(g.mul(a, b), g.mul(a, c)), j.clone());
        check(out, "additive-inverse", g.add(a, g.neg(a)) == 0 && g.sub(a, b) == g.add(a, g.neg(b)), j.clone());
        check(out, "identities", g.add(a, 0) == a && g.mul(a, 1) == a, j.clone());
        if a != 0 {
            check(out, "multiplicative-inverse", g.mul(a, g.inv(a)) == 1, j);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_suite_runs() {
        for name in suite_names() {
            let r = run_suite(name, 12, 3, &[], None).unwrap();
            assert!(r.passed, "{name}: {:#?}", r.properties);
        }
    }

    #[test]
    fn unknown_suite_and_empty() {
        assert!(matches!(run_suite("nope", 1, 0, &[], None), Err(Error::UnknownSuite(_))));
        let r = run_suite("empty", 0, 0, &[], None).unwrap();
        assert!(r.passed);
        assert_eq!(r.instances, 0);
    }

    #[test]
    fn seeded_and_replayable() {
        let a = run_suite("support-duality", 20, 7, &[], None).unwrap();
        let b = run_suite("support-duality", 20, 7, &[], None).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let one = run_suite("support-duality", 20, 7, &[], Some(5)).unwrap();
        assert!(one.passed && one.instances > 0);
    }
}
