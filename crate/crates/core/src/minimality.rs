//! Deciders for rank-minimal subcodes, σ-maximal subcodes and r-minimal codes.

use crate::error::{Error, Result};
use crate::geometry::{is_cutting, CuttingRoute};
use crate::linalg::{Subspace, SubspaceEnumerator};
use crate::rank_metric::{
    chi, drop_weight_subspace, grw, grw_sequence, grw_with, max_subcode_weight, subcode_weight, support_code,
    GrwRoute, RankCode,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Hash)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Definition,
    Cutting,
    Grw,
    Dual,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Grw, Method::Cutting, Method::Definition, Method::Dual];

    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "definition" => Ok(Method::Definition),
            "cutting" => Ok(Method::Cutting),
            "grw" => Ok(Method::Grw),
            "dual" => Ok(Method::Dual),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// Two subcodes of equal dimension, given by message spaces, with χ(b) ⊊ χ(d).
/// This refutes rank minimality of d.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Refutation {
    pub d: Subspace,
    pub b: Subspace,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MinimalityVerdict {
    pub verdict: bool,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Refutation>,
    /// Names of the subcode characterisations that were evaluated.
    pub checked_conditions: Vec<String>,
    pub d_sequence: Vec<usize>,
}

/// Re-checks a refutation from scratch.
pub fn refutation_holds(c: &RankCode, w: &Refutation) -> bool {
    let t = c.tower();
    let k = c.k();
    if w.d.ambient() != k || w.b.ambient() != k || w.d.dim() != w.b.dim() {
        return false;
    }
    let xd = chi(t, &c.encode(&w.d));
    let xb = chi(t, &c.encode(&w.b));
    xb.is_subspace_of(t.f(), &xd) && xb != xd
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SubcodeMethod {
    /// <B^‡ ∩ U>_E = B^‡.
    DualSupport,
    /// Every equal-dimensional subcode with smaller support has equal support.
    Definition,
    /// C ∩ <χ(D)>_E = D.
    Closure,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RankMinimalVerdict {
    pub verdict: bool,
    pub method: SubcodeMethod,
    /// Message space of an equal-dimensional subcode with strictly smaller support.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Subspace>,
}

fn check_message_space(c: &RankCode, b: &Subspace) -> Result<()> {
    if b.ambient() != c.k() {
        return Err(Error::AmbientMismatch(format!("message space in E^{} for k = {}", b.ambient(), c.k())));
    }
    Ok(())
}

/// C ∩ <χ(D)>_E as a subspace of E^n.
fn support_closure(c: &RankCode, d: &Subspace) -> Result<Subspace> {
    let t = c.tower();
    c.as_subspace().intersect(t.e_field(), &support_code(&chi(t, d)))
}

/// An equal-dimensional subcode of smaller support, found from a codeword in
/// C ∩ <χ(D)>_E outside D.
fn smaller_support_subcode(c: &RankCode, b: &Subspace) -> Result<Option<Subspace>> {
    let t = c.tower();
    let e = t.e_field();
    let d = c.encode(b);
    let closure = support_closure(c, &d)?;
    let Some(x) = closure.basis().iter().find(|x| !d.contains(e, x)) else { return Ok(None) };
    let w = d.sum(e, &Subspace::span(e, c.n(), std::slice::from_ref(x)))?;
    let u = drop_weight_subspace(t, &w)?;
    Ok(Some(c.message_of(&u)?))
}

/// Whether D = {γG : γ ∈ B} is rank minimal in C. D = {0} is minimal.
pub fn is_rank_minimal(c: &RankCode, b: &Subspace, method: SubcodeMethod) -> Result<RankMinimalVerdict> {
    check_message_space(c, b)?;
    let t = c.tower();
    let verdict = match method {
        SubcodeMethod::DualSupport => {
            let bd = b.dual(t.e_field());
            let flat = crate::linalg::flatten_subspace(t, &bd);
            let meet = c.column_support().intersect(t.f(), &flat)?;
            crate::linalg::e_span(t, &meet) == bd
        }
        SubcodeMethod::Closure => {
            let d = c.encode(b);
            support_closure(c, &d)? == d
        }
        SubcodeMethod::Definition => {
            let xd = chi(t, &c.encode(b));
            let en = SubspaceEnumerator::new(t.qm(), c.k(), b.dim())?;
            let mut bad: Option<Subspace> = None;
            en.for_each_range(0, en.total(), |_, rows| {
                let p = Subspace::from_rref(c.k(), rows.to_vec());
                let xp = chi(t, &c.encode(&p));
                if xp != xd && xp.is_subspace_of(t.f(), &xd) {
                    bad = Some(p);
                    return false;
                }
                true
            });
            return Ok(RankMinimalVerdict { verdict: bad.is_none(), method, witness: bad });
        }
    };
    let witness = if verdict { None } else { smaller_support_subcode(c, b)? };
    Ok(RankMinimalVerdict { verdict, method, witness })
}

/// Whether every subcode of equal dimension whose support contains χ(D) is D.
/// Returns a differing such subcode when there is one.
pub fn is_sigma_maximal(c: &RankCode, b: &Subspace) -> Result<(bool, Option<Subspace>)> {
    check_message_space(c, b)?;
    let t = c.tower();
    let xd = chi(t, &c.encode(b));
    let en = SubspaceEnumerator::new(t.qm(), c.k(), b.dim())?;
    let mut bad = None;
    en.for_each_range(0, en.total(), |_, rows| {
        let p = Subspace::from_rref(c.k(), rows.to_vec());
        if p != *b && xd.is_subspace_of(t.f(), &chi(t, &c.encode(&p))) {
            bad = Some(p);
            return false;
        }
        true
    });
    Ok((bad.is_none(), bad))
}

/// A definition-level refutation of r-minimality, or None when C is r-minimal.
/// Built from an (r+1)-dimensional subcode W of weight at most mr: an
/// r-dimensional subcode of W with the same support, against a codimension-one
/// subcode of W with smaller support.
pub fn refute_r_minimal(c: &RankCode, r: usize) -> Result<Option<Refutation>> {
    let k = c.k();
    let t = c.tower();
    if r == 0 || r >= k {
        return Ok(None);
    }
    let (d, bw) = grw_with(c, r + 1, GrwRoute::Geometric)?;
    if d > t.m() * r {
        return Ok(None);
    }
    let w = c.encode(&bw);
    let wc = RankCode::from_subspace(c.tower_arc(), &w);
    let (_, q) = max_subcode_weight(&wc, r)?;
    let dmsg = c.message_of(&wc.encode(&q))?;
    let bmsg = c.message_of(&drop_weight_subspace(t, &w)?)?;
    let out = Refutation { d: dmsg, b: bmsg };
    debug_assert!(refutation_holds(c, &out));
    Ok(Some(out))
}

fn check_r(c: &RankCode, r: usize) -> Result<()> {
    if r > c.k() {
        return Err(Error::PreconditionViolated(format!("r = {r} exceeds k = {}", c.k())));
    }
    Ok(())
}

/// Whether C is r-minimal, decided by one method. False verdicts carry a
/// refutation checked by [`refutation_holds`].
pub fn is_r_minimal(c: &RankCode, r: usize, method: Method) -> Result<MinimalityVerdict> {
    check_r(c, r)?;
    let k = c.k();
    let t = c.tower();
    let m = t.m();
    let n = c.n();
    let d_sequence = grw_sequence(c)?;
    let mut checked = Vec::new();
    let verdict = if method == Method::Dual {
        if m < 2 || r < 1 || r + 1 > k || n < (m - 1) * r + k {
            return Err(Error::MethodInapplicable(format!(
                "dual criterion needs m >= 2, 1 <= r <= k-1 and n >= (m-1)r + k; got m={m}, r={r}, k={k}, n={n}"
            )));
        }
        let dual = c.dual_code();
        let idx = n - (m - 1) * r - k + 1;
        grw(&dual, idx)? + m * r > n
    } else if r == 0 || r >= k {
        true
    } else {
        match method {
            Method::Grw => grw(c, r + 1)? > m * r,
            Method::Cutting => is_cutting(t, &c.column_support(), r, CuttingRoute::LineMeeting)?.verdict,
            Method::Definition => {
                checked.push("equal-dim-support".to_string());
                definition_minimal(c, r)?
            }
            Method::Dual => unreachable!(),
        }
    };
    let witness = if verdict { None } else { refute_r_minimal(c, r)? };
    if !verdict && witness.is_none() {
        return Err(Error::PreconditionViolated("no refutation found for a false verdict".into()));
    }
    Ok(MinimalityVerdict { verdict, method, witness, checked_conditions: checked, d_sequence })
}

/// Bare r-minimality test by the weight criterion d_{r+1}(C) > mr, with no
/// witness or weight sequence.
pub fn r_minimal_quick(c: &RankCode, r: usize) -> Result<bool> {
    check_r(c, r)?;
    if r == 0 || r >= c.k() {
        return Ok(true);
    }
    Ok(grw_with(c, r + 1, GrwRoute::Geometric)?.0 > c.tower().m() * r)
}

/// Every r-dimensional subcode is rank minimal, checked over all pairs of
/// r-dimensional subcodes through their distinct supports.
fn definition_minimal(c: &RankCode, r: usize) -> Result<bool> {
    let t = c.tower();
    let en = SubspaceEnumerator::new(t.qm(), c.k(), r)?;
    let mut supports: BTreeMap<Subspace, ()> = BTreeMap::new();
    en.for_each_range(0, en.total(), |_, rows| {
        let p = Subspace::from_rref(c.k(), rows.to_vec());
        supports.insert(chi(t, &c.encode(&p)), ());
        true
    });
    let all: Vec<&Subspace> = supports.keys().collect();
    for a in &all {
        for b in &all {
            if a != b && a.is_subspace_of(t.f(), b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All methods applicable to (C, r) with their verdicts.
pub fn all_verdicts(c: &RankCode, r: usize) -> Result<Vec<MinimalityVerdict>> {
    let mut out = Vec::new();
    for m in Method::ALL {
        match is_r_minimal(c, r, m) {
            Ok(v) => out.push(v),
            Err(Error::MethodInapplicable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The eight equivalent characterisations of a rank-minimal subcode, each
/// evaluated independently, in order.
pub const SUBCODE_CONDITIONS: [&str; 8] = [
    "minimal",
    "minimal-in-extensions",
    "extensions-grow-support",
    "support-closure",
    "dimension-identity",
    "codeword-containment",
    "equal-dim-uniqueness",
    "subspace-rigidity",
];

/// Evaluates every characterisation in [`SUBCODE_CONDITIONS`] for D = {γG : γ ∈ B}.
pub fn subcode_conditions(c: &RankCode, b: &Subspace) -> Result<Vec<bool>> {
    check_message_space(c, b)?;
    let t = c.tower();
    let (f, e) = (t.f(), t.e_field());
    let k = c.k();
    let d = c.encode(b);
    let xd = chi(t, &d);
    let dd = b.dim();
    let subcodes = |dim: usize| -> Result<Vec<Subspace>> {
        let en = SubspaceEnumerator::new(t.qm(), k, dim)?;
        Ok(en.iter().map(|rows| Subspace::from_rref(k, rows)).collect())
    };
    let same = subcodes(dd)?;
    let with_chi: Vec<(Subspace, Subspace)> = same.iter().map(|p| (p.clone(), chi(t, &c.encode(p)))).collect();

    let c1 = with_chi.iter().all(|(_, xp)| !xp.is_subspace_of(f, &xd) || *xp == xd);
    let exts: Vec<Subspace> =
        if dd < k { subcodes(dd + 1)?.into_iter().filter(|w| b.is_subspace_of(e, w)).collect() } else { Vec::new() };
    let c2 = exts.iter().all(|w| {
        with_chi.iter().filter(|(p, _)| p.is_subspace_of(e, w)).all(|(_, xp)| !xp.is_subspace_of(f, &xd) || *xp == xd)
    });
    let c3 = exts.iter().all(|w| chi(t, &c.encode(w)) != xd);
    let closure = support_closure(c, &d)?;
    let c4 = closure == d;
    let mu = support_code(&xd);
    let c5 = k - dd + xd.dim() == mu.sum_dim(e, &c.as_subspace());
    let c6 = c.codewords().iter().all(|x| {
        let rs = crate::rank_metric::rank_support(t, x);
        !rs.is_subspace_of(f, &xd) || d.contains(e, x)
    });
    let c7 = with_chi.iter().all(|(p, xp)| !xp.is_subspace_of(f, &xd) || p == b);
    let csub = c.as_subspace();
    let mut c8 = true;
    for zd in 0..xd.dim() {
        let en = SubspaceEnumerator::new(t.q(), xd.dim(), zd)?;
        en.for_each_range(0, en.total(), |_, rows| {
            // coordinates relative to the echelon basis of χ(D)
            let vecs: Vec<Vec<u32>> = rows.iter().map(|row| crate::linalg::vec_mat(f, row, xd.basis())).collect();
            let z = Subspace::span(f, c.n(), &vecs);
            if csub.intersect_dim(e, &support_code(&z)) >= dd {
                c8 = false;
                return false;
            }
            true
        });
        if !c8 {
            break;
        }
    }
    Ok(vec![c1, c2, c3, c4, c5, c6, c7, c8])
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConstantWeightReport {
    pub is_constant: bool,
    /// Every r-dimensional subcode has the same weight (exhaustive).
    pub constant_by_enumeration: bool,
    /// The column support is all of E^[k].
    pub full_column_support: bool,
    /// wt(C) = mk.
    pub full_weight: bool,
    pub min_weight: usize,
    pub max_weight: usize,
    pub min_witness: Subspace,
    pub max_witness: Subspace,
}

/// Decides whether all r-dimensional subcodes share one weight, evaluating
/// the three equivalent conditions separately.
pub fn constant_weight_class(c: &RankCode, r: usize) -> Result<ConstantWeightReport> {
    let k = c.k();
    if k < 2 || r < 1 || r >= k {
        return Err(Error::PreconditionViolated(format!("need k >= 2 and 1 <= r <= k-1; got k={k}, r={r}")));
    }
    let t = c.tower();
    let u = c.column_support();
    let en = SubspaceEnumerator::new(t.qm(), k, r)?;
    let mut lo: Option<(usize, Subspace)> = None;
    let mut hi: Option<(usize, Subspace)> = None;
    en.for_each_range(0, en.total(), |_, rows| {
        let p = Subspace::from_rref(k, rows.to_vec());
        let w = subcode_weight(c, &p);
        if lo.as_ref().is_none_or(|(x, _)| w < *x) {
            lo = Some((w, p.clone()));
        }
        if hi.as_ref().is_none_or(|(x, _)| w > *x) {
            hi = Some((w, p));
        }
        true
    });
    let (min_weight, min_witness) = lo.expect("nonempty");
    let (max_weight, max_witness) = hi.expect("nonempty");
    let constant_by_enumeration = min_weight == max_weight;
    let full_column_support = u.dim() == k * t.m();
    let full_weight = c.weight() == k * t.m();
    Ok(ConstantWeightReport {
        is_constant: constant_by_enumeration && full_column_support && full_weight,
        constant_by_enumeration,
        full_column_support,
        full_weight,
        min_weight,
        max_weight,
        min_witness,
        max_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FieldTower;
    use std::sync::Arc;

    fn gf4() -> Arc<FieldTower> {
        Arc::new(FieldTower::parse("p=2,e=1,m=2,ext=1,1,1").unwrap())
    }
    fn good(t: &Arc<FieldTower>) -> RankCode {
        RankCode::new(t.clone(), 3, &[vec![1, 0, 2], vec![0, 1, 1]]).unwrap()
    }
    fn bad(t: &Arc<FieldTower>) -> RankCode {
        RankCode::new(t.clone(), 3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap()
    }
    fn line(t: &FieldTower, v: &[u32]) -> Subspace {
        Subspace::span(t.e_field(), v.len(), &[v.to_vec()])
    }

    #[test]
    fn rank_minimal_examples() {
        let t = gf4();
        for m in [SubcodeMethod::DualSupport, SubcodeMethod::Closure, SubcodeMethod::Definition] {
            assert!(is_rank_minimal(&good(&t), &Subspace::full(2), m).unwrap().verdict);
            assert!(is_rank_minimal(&good(&t), &line(&t, &[1, 0]), m).unwrap().verdict);
            assert!(is_rank_minimal(&good(&t), &Subspace::zero(2), m).unwrap().verdict);
            let v = is_rank_minimal(&bad(&t), &line(&t, &[1, 2]), m).unwrap();
            assert!(!v.verdict);
            let w = v.witness.unwrap();
            assert!(refutation_holds(&bad(&t), &Refutation { d: line(&t, &[1, 2]), b: w }));
        }
    }

    #[test]
    fn r_minimal_examples() {
        let t = gf4();
        for m in [Method::Grw, Method::Cutting, Method::Definition] {
            assert!(is_r_minimal(&good(&t), 0, m).unwrap().verdict);
            assert!(is_r_minimal(&good(&t), 1, m).unwrap().verdict);
            let v = is_r_minimal(&bad(&t), 1, m).unwrap();
            assert!(!v.verdict);
            assert!(refutation_holds(&bad(&t), v.witness.as_ref().unwrap()));
            assert_eq!(v.d_sequence, vec![0, 1, 2]);
        }
        assert!(is_r_minimal(&good(&t), 1, Method::Dual).unwrap().verdict);
        assert!(!is_r_minimal(&bad(&t), 1, Method::Dual).unwrap().verdict);
        let short = RankCode::new(t.clone(), 2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(is_r_minimal(&short, 1, Method::Dual), Err(Error::MethodInapplicable(_))));
        assert!(is_r_minimal(&good(&t), 2, Method::Grw).unwrap().verdict);
    }

    #[test]
    fn sigma_maximal_examples() {
        let t = gf4();
        assert!(is_sigma_maximal(&good(&t), &Subspace::zero(2)).unwrap().0);
        assert!(is_sigma_maximal(&good(&t), &line(&t, &[1, 0])).unwrap().0);
        let (ok, w) = is_sigma_maximal(&bad(&t), &line(&t, &[1, 2])).unwrap();
        assert!(!ok);
        assert_eq!(w.unwrap(), line(&t, &[1, 3]));
    }

    #[test]
    fn constant_weight_examples() {
        let t = gf4();
        let c = RankCode::new(t.clone(), 4, &[vec![1, 0, 2, 0], vec![0, 1, 0, 2]]).unwrap();
        assert!(constant_weight_class(&c, 1).unwrap().is_constant);
        let g = constant_weight_class(&good(&t), 1).unwrap();
        assert!(!g.is_constant && !g.full_weight && !g.full_column_support);
        let b = constant_weight_class(&bad(&t), 1).unwrap();
        assert!(!b.constant_by_enumeration);
        assert_eq!((b.min_weight, b.max_weight), (1, 2));
    }

    #[test]
    fn conditions_agree_on_examples() {
        let t = gf4();
        for c in [good(&t), bad(&t)] {
            for b in [Subspace::zero(2), line(&t, &[1, 0]), line(&t, &[1, 2]), line(&t, &[0, 1]), Subspace::full(2)] {
                let v = subcode_conditions(&c, &b).unwrap();
                assert!(v.iter().all(|&x| x == v[0]), "{v:?}");
            }
        }
    }
}
