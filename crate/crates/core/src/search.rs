//! Exhaustive, certificate-producing searches: ϖ(k, r), code censuses and
//! maximal evasive dimensions.
//!
//! Candidates are visited in the global order of [`SubspaceEnumerator`]. A
//! scan returns the smallest index that satisfies the predicate, so results
//! never depend on thread count or scheduling.

use crate::combinatorics::{evasive_dim_bound, omega_bounds, qbinom, scattered_bound, OmegaBounds};
use crate::error::{Error, Result};
use crate::field_tower::FieldTower;
use crate::geometry::{e_subspaces, is_cutting, is_evasive, CuttingRoute};
use crate::linalg::{self, flatten_subspace, unflatten_vec, Subspace, SubspaceEnumerator, ENUMERATION_ORDER};
use crate::minimality::{constant_weight_class, is_r_minimal, r_minimal_quick, Method};
use crate::rank_metric::{wt, CodeRepr, RankCode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub const CERTIFICATE_SCHEMA: &str = "rankmin-certificate/v1";
pub const OMEGA_SCHEMA: &str = "rankmin-omega/v1";
pub const SHARD_SCHEMA: &str = "rankmin-shard/v1";
pub const CENSUS_SCHEMA: &str = "rankmin-census/v1";
pub const EVASIVE_MAX_SCHEMA: &str = "rankmin-evasive-max/v1";

/// Runs `f` on a rayon pool with `threads` workers (0 = all cores).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// The cutting predicate on candidate F-subspaces A of E^[k] = F^(km):
/// A is cutting r-blocking iff dim(A + W) - dim W ≥ mr + 1 for every
/// (k-r-1)-dimensional E-subspace W.
struct CuttingTester {
    q: u32,
    km: usize,
    need: usize,
    /// F-bases of the W's (generic path).
    flats: Vec<Subspace>,
    /// Per W: bit masks of a basis of W^⊥ (GF(2) path).
    duals: Vec<Vec<u64>>,
    /// Per W: projection x ↦ (x·p_i)_i tabulated over all x (small km only).
    tables: Vec<Vec<u32>>,
}

const TABLE_BITS: usize = 14;

impl CuttingTester {
    fn new(t: &FieldTower, k: usize, r: usize) -> Result<CuttingTester> {
        let m = t.m();
        let km = k * m;
        let f = t.f();
        let ws = e_subspaces(t, k, k - r - 1)?;
        let flats: Vec<Subspace> = ws.into_iter().map(|w| w.flat).collect();
        let mut duals = Vec::new();
        let mut tables = Vec::new();
        if t.q() == 2 && km <= 64 {
            for w in &flats {
                let d: Vec<u64> = w.dual(f).basis().iter().map(|v| linalg::to_bits(v)).collect();
                if km <= TABLE_BITS {
                    let tab = (0..1u64 << km)
                        .map(|x| d.iter().enumerate().fold(0u32, |acc, (i, p)| acc | (((x & p).count_ones() & 1) << i)))
                        .collect();
                    tables.push(tab);
                }
                duals.push(d);
            }
        }
        Ok(CuttingTester { q: t.q(), km, need: m * r + 1, flats, duals, tables })
    }

    fn bits_ok(&self) -> bool {
        self.q == 2 && self.km <= 64
    }

    /// `hint` is the index of the last W that rejected a candidate; trying it
    /// first does not change the answer.
    fn test_bits(&self, rows: &[u64], hint: &mut usize, buf: &mut Vec<u64>) -> bool {
        if rows.len() < self.need {
            return false;
        }
        let nw = self.duals.len();
        for step in 0..nw {
            let w = (*hint + step) % nw;
            buf.clear();
            if self.tables.is_empty() {
                let d = &self.duals[w];
                buf.extend(rows.iter().map(|&a| {
                    d.iter().enumerate().fold(0u64, |acc, (i, p)| acc | ((((a & p).count_ones() & 1) as u64) << i))
                }));
            } else {
                let tab = &self.tables[w];
                buf.extend(rows.iter().map(|&a| tab[a as usize] as u64));
            }
            if linalg::bit_rank(buf) < self.need {
                *hint = w;
                return false;
            }
        }
        true
    }

    fn test_generic(&self, f: &crate::Gf, a: &Subspace, hint: &mut usize) -> bool {
        if a.dim() < self.need {
            return false;
        }
        let nw = self.flats.len();
        for step in 0..nw {
            let w = (*hint + step) % nw;
            let fw = &self.flats[w];
            if a.sum_dim(f, fw) - fw.dim() < self.need {
                *hint = w;
                return false;
            }
        }
        true
    }
}

/// Outcome of scanning a range of the d-dimensional candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOutcome {
    /// Candidates examined in order up to and including the first witness.
    pub visited: u128,
    pub witness: Option<(u128, Subspace)>,
}

fn chunk_bounds(start: u128, end: u128, threads: usize) -> Vec<(u128, u128)> {
    let len = end.saturating_sub(start);
    if len == 0 {
        return vec![];
    }
    let pieces = (rayon::current_num_threads().max(threads).max(1) as u128 * 16).min(len);
    let step = len.div_ceil(pieces).max(256);
    let mut out = Vec::new();
    let mut s = start;
    while s < end {
        let e = (s + step).min(end);
        out.push((s, e));
        s = e;
    }
    out
}

/// Smallest index in [start, end) whose d-dimensional subspace of F^(km) is a
/// cutting r-blocking set of E^[k]. Runs on the current rayon pool.
pub fn scan_cutting(t: &FieldTower, k: usize, r: usize, d: usize, start: u128, end: u128) -> Result<ScanOutcome> {
    let km = k * t.m();
    let en = SubspaceEnumerator::new(t.q(), km, d)?;
    let end = end.min(en.total());
    if start >= end {
        return Ok(ScanOutcome { visited: 0, witness: None });
    }
    if end > u64::MAX as u128 {
        return Err(Error::TooLarge("enumeration beyond 2^64 candidates".into()));
    }
    let tester = CuttingTester::new(t, k, r)?;
    let best = AtomicU64::new(u64::MAX);
    let f = t.f();
    chunk_bounds(start, end, 0).into_par_iter().for_each(|(s, e)| {
        if best.load(Ordering::Relaxed) as u128 <= s {
            return;
        }
        let mut hint = 0usize;
        let mut found: Option<u128> = None;
        if tester.bits_ok() {
            let mut buf = Vec::with_capacity(d);
            en.for_each_range_bits(s, e, |idx, rows| {
                if idx & 0xfff == 0 && best.load(Ordering::Relaxed) as u128 <= idx {
                    return false;
                }
                if tester.test_bits(rows, &mut hint, &mut buf) {
                    found = Some(idx);
                    return false;
                }
                true
            });
        } else {
            en.for_each_range(s, e, |idx, rows| {
                if idx & 0xff == 0 && best.load(Ordering::Relaxed) as u128 <= idx {
                    return false;
                }
                let a = Subspace::from_rref(km, rows.to_vec());
                if tester.test_generic(f, &a, &mut hint) {
                    found = Some(idx);
                    return false;
                }
                true
            });
        }
        if let Some(i) = found {
            best.fetch_min(i as u64, Ordering::Relaxed);
        }
    });
    let b = best.load(Ordering::Relaxed);
    if b == u64::MAX {
        Ok(ScanOutcome { visited: end - start, witness: None })
    } else {
        let idx = b as u128;
        Ok(ScanOutcome { visited: idx - start + 1, witness: Some((idx, Subspace::from_rref(km, en.unrank(idx)))) })
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Witness,
    Exhaustion,
}

/// A witness (a cutting r-blocking set of dimension d) or an exhaustion
/// record (every d-dimensional subspace visited, none cutting).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Certificate {
    pub schema: String,
    pub kind: CertificateKind,
    pub field: String,
    pub enumeration_order: String,
    pub k: usize,
    pub r: usize,
    pub dimension: usize,
    /// Number of candidates examined, in decimal.
    pub visited: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Subspace>,
    /// An r-minimal code whose column support is the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeRepr>,
    /// Symmetry reduction applied before enumeration; always "none".
    pub symmetry_reduction: String,
}

/// The code with generator columns a basis of U ⊆ E^[k].
pub fn code_from_support(t: &Arc<FieldTower>, k: usize, u: &Subspace) -> Result<RankCode> {
    let cols: Vec<Vec<u32>> = u.basis().iter().map(|y| unflatten_vec(t, y)).collect();
    let rows: Vec<Vec<u32>> = (0..k).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    RankCode::new(t.clone(), cols.len(), &rows)
}

fn witness_certificate(t: &Arc<FieldTower>, k: usize, r: usize, d: usize, visited: u128, idx: u128, u: Subspace) -> Result<Certificate> {
    let code = code_from_support(t, k, &u)?;
    Ok(Certificate {
        schema: CERTIFICATE_SCHEMA.into(),
        kind: CertificateKind::Witness,
        field: t.spec(),
        enumeration_order: ENUMERATION_ORDER.into(),
        k,
        r,
        dimension: d,
        visited: visited.to_string(),
        total: None,
        counterexample_free: None,
        witness_index: Some(idx.to_string()),
        witness: Some(u),
        code: Some(code.to_repr()),
        symmetry_reduction: "none".into(),
    })
}

fn exhaustion_certificate(t: &FieldTower, k: usize, r: usize, d: usize, total: u128) -> Certificate {
    Certificate {
        schema: CERTIFICATE_SCHEMA.into(),
        kind: CertificateKind::Exhaustion,
        field: t.spec(),
        enumeration_order: ENUMERATION_ORDER.into(),
        k,
        r,
        dimension: d,
        visited: total.to_string(),
        total: Some(total.to_string()),
        counterexample_free: Some(true),
        witness_index: None,
        witness: None,
        code: None,
        symmetry_reduction: "none".into(),
    }
}

/// Re-checks a certificate: a witness must be a cutting r-blocking set of the
/// stated dimension whose code is r-minimal; an exhaustion record must cover
/// bin_q(km, d) candidates. With `rescan`, exhaustion is re-run.
pub fn verify_certificate(c: &Certificate, rescan: bool) -> Result<bool> {
    let t = Arc::new(FieldTower::parse(&c.field)?);
    let km = c.k * t.m();
    match c.kind {
        CertificateKind::Witness => {
            let Some(u) = &c.witness else { return Ok(false) };
            if u.ambient() != km || u.dim() != c.dimension {
                return Ok(false);
            }
            let u = u.recanonicalize(t.f());
            if let Some(idx) = &c.witness_index {
                let en = SubspaceEnumerator::new(t.q(), km, c.dimension)?;
                if en.rank_of(u.basis()).map(|i| i.to_string()).as_deref() != Some(idx.as_str()) {
                    return Ok(false);
                }
            }
            if !is_cutting(&t, &u, c.r, CuttingRoute::LineMeeting)?.verdict {
                return Ok(false);
            }
            let code = code_from_support(&t, c.k, &u)?;
            if let Some(repr) = &c.code {
                if RankCode::from_repr(repr)? != code {
                    return Ok(false);
                }
            }
            Ok(is_r_minimal(&code, c.r, Method::Grw)?.verdict)
        }
        CertificateKind::Exhaustion => {
            let total = qbinom(t.q() as u64, km as u64, c.dimension as u64).to_string();
            if c.total.as_deref() != Some(total.as_str()) || c.visited != total || c.counterexample_free != Some(true) {
                return Ok(false);
            }
            if rescan {
                let out = scan_cutting(&t, c.k, c.r, c.dimension, 0, u128::MAX)?;
                return Ok(out.witness.is_none());
            }
            Ok(true)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Worker threads; 0 means all cores.
    pub threads: usize,
    /// Cap on candidates examined across all levels.
    pub budget: Option<u128>,
    /// Highest dimension to try.
    pub dim_cap: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OmegaResult {
    pub schema: String,
    pub field: String,
    pub k: usize,
    pub r: usize,
    pub value: usize,
    /// "closed-form" when closed-form bounds pin the value, else "computed".
    pub status: String,
    pub within_bounds: bool,
    pub bounds: OmegaBounds,
    pub witness: Certificate,
    pub exhaustion: Certificate,
    /// Candidates examined across all levels, in decimal.
    pub visited: String,
}

/// Verified partial result after the budget ran out.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OmegaBracket {
    pub schema: String,
    pub field: String,
    pub k: usize,
    pub r: usize,
    /// ϖ is at least this value (closed-form bound or exhaustion).
    pub lower: usize,
    /// ϖ is at most this value when a witness was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<usize>,
    pub bounds: OmegaBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Certificate>,
    pub visited: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum OmegaOutcome {
    Solved(OmegaResult),
    BudgetExceeded(OmegaBracket),
}

/// ϖ(k, r) by exhaustive search, starting one below the best closed-form lower
/// bound: that level is exhausted, then dimensions increase until a witness
/// appears. The answer comes with a witness at ϖ and an exhaustion record at ϖ-1.
pub fn omega_exhaustive(t: &Arc<FieldTower>, k: usize, r: usize, opts: &SearchOptions) -> Result<OmegaOutcome> {
    if k < r + 1 {
        return Err(Error::PreconditionViolated(format!("need k >= r+1; got k={k}, r={r}")));
    }
    let m = t.m();
    let km = k * m;
    let bounds = omega_bounds(m as u64, k as u64, r as u64)?;
    let cap = opts.dim_cap.unwrap_or(km).min(km);
    let q = t.q();
    with_threads(opts.threads, || {
        let mut used: u128 = 0;
        let mut exhausted: Option<(usize, u128)> = None;
        let mut witness: Option<(usize, u128, Subspace, u128)> = None;
        let mut d = (bounds.lower as usize).saturating_sub(1);
        let bracket = |exhausted: Option<(usize, u128)>, witness: Option<(usize, u128, Subspace, u128)>, used: u128| -> Result<OmegaOutcome> {
            let lower = exhausted.map_or(bounds.lower as usize, |(e, _)| (e + 1).max(bounds.lower as usize));
            Ok(OmegaOutcome::BudgetExceeded(OmegaBracket {
                schema: OMEGA_SCHEMA.into(),
                field: t.spec(),
                k,
                r,
                lower,
                upper: witness.as_ref().map(|w| w.0),
                bounds: bounds.clone(),
                exhaustion: exhausted.map(|(e, tot)| exhaustion_certificate(t, k, r, e, tot)),
                witness: match witness {
                    Some((wd, v, u, idx)) => Some(witness_certificate(t, k, r, wd, v, idx, u)?),
                    None => None,
                },
                visited: used.to_string(),
            }))
        };
        // first pass: the level just below the lower bound must be empty
        loop {
            if d > cap {
                return bracket(exhausted, witness, used);
            }
            let total = SubspaceEnumerator::new(q, km, d)?.total();
            let allowed = opts.budget.map_or(total, |b| b.saturating_sub(used).min(total));
            let out = scan_cutting(t, k, r, d, 0, allowed)?;
            used += out.visited;
            match out.witness {
                Some((idx, u)) => {
                    witness = Some((d, out.visited, u, idx));
                    if d == 0 || exhausted.is_some_and(|(e, _)| e + 1 == d) {
                        break;
                    }
                    // a witness below the expected answer: step down
                    d -= 1;
                }
                None if allowed < total => return bracket(exhausted, witness, used),
                None => {
                    exhausted = Some((d, total));
                    if witness.as_ref().is_some_and(|w| w.0 == d + 1) {
                        break;
                    }
                    d += 1;
                }
            }
        }
        let (wd, wv, wu, widx) = witness.expect("loop ends with a witness");
        let value = wd;
        let exhaustion = match exhausted {
            Some((e, tot)) if e + 1 == value => exhaustion_certificate(t, k, r, e, tot),
            _ => exhaustion_certificate(t, k, r, 0, 1),
        };
        let within = bounds.lower as usize <= value && value <= bounds.upper as usize;
        let status = if bounds.lower == bounds.upper { "closed-form" } else { "computed" };
        Ok(OmegaOutcome::Solved(OmegaResult {
            schema: OMEGA_SCHEMA.into(),
            field: t.spec(),
            k,
            r,
            value,
            status: status.into(),
            within_bounds: within,
            bounds: bounds.clone(),
            witness: witness_certificate(t, k, r, wd, wv, widx, wu)?,
            exhaustion,
            visited: used.to_string(),
        }))
    })?
}

/// One shard of a dimension-d scan: a contiguous range of global indices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShardReport {
    pub schema: String,
    pub field: String,
    pub enumeration_order: String,
    pub k: usize,
    pub r: usize,
    pub dimension: usize,
    pub shards: usize,
    pub shard_index: usize,
    pub start: String,
    pub end: String,
    pub total: String,
    pub visited: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Subspace>,
}

/// [start, end) of shard `index` out of `shards` over `total` candidates.
pub fn shard_range(total: u128, shards: usize, index: usize) -> (u128, u128) {
    let s = shards as u128;
    let i = index as u128;
    (total * i / s, total * (i + 1) / s)
}

pub fn scan_shard(t: &FieldTower, k: usize, r: usize, d: usize, shards: usize, index: usize, threads: usize) -> Result<ShardReport> {
    if shards == 0 || index >= shards {
        return Err(Error::InvalidParameter(format!("shard index {index} out of {shards}")));
    }
    let total = SubspaceEnumerator::new(t.q(), k * t.m(), d)?.total();
    let (start, end) = shard_range(total, shards, index);
    let out = with_threads(threads, || scan_cutting(t, k, r, d, start, end))??;
    Ok(ShardReport {
        schema: SHARD_SCHEMA.into(),
        field: t.spec(),
        enumeration_order: ENUMERATION_ORDER.into(),
        k,
        r,
        dimension: d,
        shards,
        shard_index: index,
        start: start.to_string(),
        end: end.to_string(),
        total: total.to_string(),
        visited: out.visited.to_string(),
        witness_index: out.witness.as_ref().map(|w| w.0.to_string()),
        witness: out.witness.map(|w| w.1),
    })
}

/// Merged result of a full set of shards for one dimension.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LevelReport {
    pub field: String,
    pub k: usize,
    pub r: usize,
    pub dimension: usize,
    pub total: String,
    /// No cutting set of this dimension exists.
    pub exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Subspace>,
}

fn parse_u128(s: &str) -> Result<u128> {
    s.parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

/// Merges shard reports; they must cover [0, total) exactly, in any order.
pub fn merge_shards(reports: &[ShardReport]) -> Result<LevelReport> {
    let first = reports.first().ok_or_else(|| Error::InvalidParameter("no shard reports".into()))?;
    let mut ranges = Vec::new();
    for s in reports {
        if (s.field.as_str(), s.k, s.r, s.dimension, s.total.as_str(), s.enumeration_order.as_str())
            != (first.field.as_str(), first.k, first.r, first.dimension, first.total.as_str(), first.enumeration_order.as_str())
        {
            return Err(Error::InvalidParameter("shard reports describe different scans".into()));
        }
        ranges.push((parse_u128(&s.start)?, parse_u128(&s.end)?, s));
    }
    ranges.sort_by_key(|x| x.0);
    let total = parse_u128(&first.total)?;
    let mut at = 0u128;
    for (s, e, _) in &ranges {
        if *s != at {
            return Err(Error::InvalidParameter(format!("shards leave a gap or overlap at index {at}")));
        }
        at = *e;
    }
    if at != total {
        return Err(Error::InvalidParameter(format!("shards cover {at} of {total} candidates")));
    }
    let best = ranges.iter().find(|(_, _, s)| s.witness_index.is_some()).map(|(_, _, s)| *s);
    Ok(LevelReport {
        field: first.field.clone(),
        k: first.k,
        r: first.r,
        dimension: first.dimension,
        total: first.total.clone(),
        exhausted: best.is_none(),
        witness_index: best.and_then(|s| s.witness_index.clone()),
        witness: best.and_then(|s| s.witness.clone()),
    })
}

#[derive(Clone, Debug, Default)]
pub struct CensusOptions {
    /// Values of r for the r-minimality and constant-weight counts.
    pub rs: Vec<usize>,
    /// Exemplar codes kept per weight value.
    pub exemplars: usize,
    /// Also count codes whose r-dimensional subcodes share one weight.
    pub constant_weight: bool,
    pub threads: usize,
    pub budget: Option<u128>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CensusReport {
    pub schema: String,
    pub field: String,
    pub n: usize,
    pub k: usize,
    pub total: String,
    /// r ↦ number of r-minimal codes.
    pub minimal: BTreeMap<usize, String>,
    /// r ↦ number of codes that are not r-minimal.
    pub non_minimal: BTreeMap<usize, String>,
    /// r ↦ number of codes whose r-dimensional subcodes all share one weight.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub constant_weight: BTreeMap<usize, String>,
    /// wt(C) ↦ number of codes.
    pub weights: BTreeMap<usize, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub exemplars: BTreeMap<usize, Vec<CodeRepr>>,
}

#[derive(Default, Clone)]
struct CensusAcc {
    total: u128,
    minimal: BTreeMap<usize, u128>,
    constant: BTreeMap<usize, u128>,
    weights: BTreeMap<usize, u128>,
    exemplars: BTreeMap<usize, Vec<(u128, CodeRepr)>>,
}

impl CensusAcc {
    fn merge(mut self, o: CensusAcc, keep: usize) -> CensusAcc {
        self.total += o.total;
        for (k, v) in o.minimal {
            *self.minimal.entry(k).or_default() += v;
        }
        for (k, v) in o.constant {
            *self.constant.entry(k).or_default() += v;
        }
        for (k, v) in o.weights {
            *self.weights.entry(k).or_default() += v;
        }
        for (k, v) in o.exemplars {
            let e = self.exemplars.entry(k).or_default();
            e.extend(v);
            e.sort_by_key(|x| x.0);
            e.truncate(keep);
        }
        self
    }
}

/// Enumerates every [n, k] code over the tower and counts predicates.
pub fn census_codes(t: &Arc<FieldTower>, n: usize, k: usize, opts: &CensusOptions) -> Result<CensusReport> {
    let en = SubspaceEnumerator::new(t.qm(), n, k)?;
    let total = en.total();
    if let Some(b) = opts.budget {
        if total > b {
            return Err(Error::BudgetExceeded { visited: 0 });
        }
    }
    for &r in &opts.rs {
        if r > k {
            return Err(Error::PreconditionViolated(format!("r = {r} exceeds k = {k}")));
        }
    }
    let keep = opts.exemplars;
    let acc = with_threads(opts.threads, || {
        chunk_bounds(0, total, 0)
            .into_par_iter()
            .map(|(s, e)| {
                let mut acc = CensusAcc::default();
                let mut err = None;
                en.for_each_range(s, e, |idx, rows| {
                    let mut step = || -> Result<()> {
                        let c = RankCode::new(t.clone(), n, rows)?;
                        acc.total += 1;
                        let w = c.weight();
                        *acc.weights.entry(w).or_default() += 1;
                        if keep > 0 {
                            let ex = acc.exemplars.entry(w).or_default();
                            if ex.len() < keep {
                                ex.push((idx, c.to_repr()));
                            }
                        }
                        for &r in &opts.rs {
                            if r_minimal_quick(&c, r)? {
                                *acc.minimal.entry(r).or_default() += 1;
                            }
                            if opts.constant_weight && r >= 1 && r < k && constant_weight_class(&c, r)?.constant_by_enumeration {
                                *acc.constant.entry(r).or_default() += 1;
                            }
                        }
                        Ok(())
                    };
                    match step() {
                        Ok(()) => true,
                        Err(e) => {
                            err = Some(e);
                            false
                        }
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => Ok(acc),
                }
            })
            .try_reduce(CensusAcc::default, |a, b| Ok(a.merge(b, keep)))
    })??;
    let s = |x: u128| x.to_string();
    Ok(CensusReport {
        schema: CENSUS_SCHEMA.into(),
        field: t.spec(),
        n,
        k,
        total: s(acc.total),
        minimal: opts.rs.iter().map(|&r| (r, s(acc.minimal.get(&r).copied().unwrap_or(0)))).collect(),
        non_minimal: opts.rs.iter().map(|&r| (r, s(acc.total - acc.minimal.get(&r).copied().unwrap_or(0)))).collect(),
        constant_weight: opts
            .rs
            .iter()
            .filter(|&&r| opts.constant_weight && r >= 1 && r < k)
            .map(|&r| (r, s(acc.constant.get(&r).copied().unwrap_or(0))))
            .collect(),
        weights: acc.weights.into_iter().map(|(k, v)| (k, s(v))).collect(),
        exemplars: acc.exemplars.into_iter().map(|(k, v)| (k, v.into_iter().map(|x| x.1).collect())).collect(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EvasiveMaxResult {
    pub schema: String,
    pub field: String,
    pub k: usize,
    pub h: usize,
    pub t: usize,
    /// Largest dimension of an (h, t)-evasive subspace; None when there is none.
    pub value: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Subspace>,
    /// Candidates examined, in decimal.
    pub visited: String,
    /// km/(h+1), applicable to (h, h)-evasive subspaces of dimension ≥ k+1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scattered_bound: Option<u64>,
    /// Small-degree closed-form bound, when m ∈ {2,3,4} and h ≤ t ≤ 2h-1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_degree_bound: Option<u64>,
}

/// Largest F-dimension of an (h, t)-evasive subspace of E^[k], searching
/// dimensions downward and stopping at the first evasive subspace.
pub fn max_evasive_dim(tw: &Arc<FieldTower>, k: usize, h: usize, tt: usize, opts: &SearchOptions) -> Result<EvasiveMaxResult> {
    if h > k {
        return Err(Error::PreconditionViolated(format!("need h <= k; got h={h}, k={k}")));
    }
    let m = tw.m();
    let km = k * m;
    let f = tw.f();
    let ms: Vec<Subspace> = e_subspaces(tw, k, h)?.into_iter().map(|x| x.flat).collect();
    let bits = tw.q() == 2 && km <= 64;
    let mbits: Vec<Vec<u64>> = ms.iter().map(|s| s.basis().iter().map(|v| linalg::to_bits(v)).collect()).collect();
    let mut used = 0u128;
    let top = opts.dim_cap.unwrap_or(km).min(km);
    let result = with_threads(opts.threads, || -> Result<Option<(usize, Subspace)>> {
        for d in (0..=top).rev() {
            let en = SubspaceEnumerator::new(tw.q(), km, d)?;
            let total = en.total();
            let allowed = opts.budget.map_or(total, |b| b.saturating_sub(used).min(total));
            let best = AtomicU64::new(u64::MAX);
            chunk_bounds(0, allowed, 0).into_par_iter().for_each(|(s, e)| {
                if best.load(Ordering::Relaxed) as u128 <= s {
                    return;
                }
                let mut found = None;
                let mut buf: Vec<u64> = Vec::new();
                en.for_each_range(s, e, |idx, rows| {
                    if idx & 0xff == 0 && best.load(Ordering::Relaxed) as u128 <= idx {
                        return false;
                    }
                    let a = Subspace::from_rref(km, rows.to_vec());
                    if linalg::e_span(tw, &a).dim() != k {
                        return true;
                    }
                    let ok = if bits {
                        let ab: Vec<u64> = rows.iter().map(|v| linalg::to_bits(v)).collect();
                        mbits.iter().all(|mb| {
                            buf.clear();
                            buf.extend_from_slice(&ab);
                            buf.extend_from_slice(mb);
                            d + mb.len() - linalg::bit_rank(&mut buf) <= tt
                        })
                    } else {
                        ms.iter().all(|mm| a.intersect_dim(f, mm) <= tt)
                    };
                    if ok {
                        found = Some(idx);
                        return false;
                    }
                    true
                });
                if let Some(i) = found {
                    best.fetch_min(i as u64, Ordering::Relaxed);
                }
            });
            let b = best.load(Ordering::Relaxed);
            if b != u64::MAX {
                used += b as u128 + 1;
                let w = Subspace::from_rref(km, en.unrank(b as u128));
                debug_assert!(is_evasive(tw, &w, h, tt as i64)?.evasive);
                return Ok(Some((d, w)));
            }
            used += allowed;
            if allowed < total {
                return Err(Error::BudgetExceeded { visited: used });
            }
        }
        Ok(None)
    })??;
    let (value, witness) = match result {
        Some((d, w)) => (Some(d), Some(w)),
        None => (None, None),
    };
    Ok(EvasiveMaxResult {
        schema: EVASIVE_MAX_SCHEMA.into(),
        field: tw.spec(),
        k,
        h,
        t: tt,
        value,
        witness,
        visited: used.to_string(),
        scattered_bound: (h == tt).then(|| scattered_bound(m as u64, k as u64, h as u64)),
        small_degree_bound: evasive_dim_bound(m as u64, k as u64, h as u64, tt as u64),
    })
}

/// r-dimensional E-subspaces of E^n grouped by weight, with one exemplar each.
pub fn subspace_weights(t: &FieldTower, n: usize, r: usize) -> Result<BTreeMap<usize, (u128, Subspace)>> {
    let en = SubspaceEnumerator::new(t.qm(), n, r)?;
    let mut out: BTreeMap<usize, (u128, Subspace)> = BTreeMap::new();
    en.for_each_range(0, en.total(), |_, rows| {
        let s = Subspace::from_rref(n, rows.to_vec());
        let w = wt(t, &s);
        out.entry(w).and_modify(|e| e.0 += 1).or_insert((1, s));
        true
    });
    Ok(out)
}

/// F-flattening of an E-subspace of E^k; re-exported for callers building candidates.
pub fn flat(t: &FieldTower, v: &Subspace) -> Subspace {
    flatten_subspace(t, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(m: u32) -> Arc<FieldTower> {
        Arc::new(FieldTower::standard(2, 1, m).unwrap())
    }

    fn solved(o: OmegaOutcome) -> OmegaResult {
        match o {
            OmegaOutcome::Solved(r) => r,
            OmegaOutcome::BudgetExceeded(b) => panic!("budget: {b:?}"),
        }
    }

    #[test]
    fn omega_small_cases() {
        let r = solved(omega_exhaustive(&tower(2), 2, 1, &SearchOptions::default()).unwrap());
        assert_eq!(r.value, 3);
        assert_eq!(r.status, "closed-form");
        assert!(verify_certificate(&r.witness, false).unwrap());
        assert!(verify_certificate(&r.exhaustion, true).unwrap());
        let r = solved(omega_exhaustive(&tower(3), 2, 1, &SearchOptions::default()).unwrap());
        assert_eq!(r.value, 4);
        let r = solved(omega_exhaustive(&tower(2), 3, 1, &SearchOptions::default()).unwrap());
        assert_eq!(r.value, 5);
        assert_eq!(r.exhaustion.visited, qbinom(2, 6, 4).to_string());
        let r = solved(omega_exhaustive(&tower(2), 3, 0, &SearchOptions::default()).unwrap());
        assert_eq!(r.value, 3);
    }

    #[test]
    fn omega_generic_path() {
        let t = Arc::new(FieldTower::standard(3, 1, 2).unwrap());
        let r = solved(omega_exhaustive(&t, 2, 1, &SearchOptions::default()).unwrap());
        assert_eq!(r.value, 3);
        assert!(verify_certificate(&r.witness, false).unwrap());
    }

    #[test]
    fn omega_budget_brackets() {
        let opts = SearchOptions { budget: Some(10), ..Default::default() };
        match omega_exhaustive(&tower(2), 3, 1, &opts).unwrap() {
            OmegaOutcome::BudgetExceeded(b) => {
                assert_eq!(b.lower, 5);
                assert_eq!(b.visited, "10");
            }
            OmegaOutcome::Solved(_) => panic!("expected bracket"),
        }
    }

    #[test]
    fn bits_and_generic_scans_agree() {
        let t = tower(2);
        for d in 0..=6 {
            let fast = scan_cutting(&t, 3, 1, d, 0, u128::MAX).unwrap();
            let tester = CuttingTester::new(&t, 3, 1).unwrap();
            let en = SubspaceEnumerator::new(2, 6, d).unwrap();
            let mut first = None;
            let mut hint = 0;
            en.for_each_range(0, en.total(), |i, rows| {
                if tester.test_generic(t.f(), &Subspace::from_rref(6, rows.to_vec()), &mut hint) {
                    first = Some(i);
                    return false;
                }
                true
            });
            assert_eq!(fast.witness.map(|w| w.0), first, "d = {d}");
        }
    }

    #[test]
    fn shards_merge_to_the_full_scan() {
        let t = tower(2);
        let full = scan_cutting(&t, 3, 1, 5, 0, u128::MAX).unwrap();
        for shards in [1, 3, 7] {
            let mut reps: Vec<ShardReport> = (0..shards).map(|i| scan_shard(&t, 3, 1, 5, shards, i, 1).unwrap()).collect();
            reps.reverse();
            let merged = merge_shards(&reps).unwrap();
            assert_eq!(merged.witness_index, full.witness.as_ref().map(|w| w.0.to_string()));
        }
        let reps: Vec<ShardReport> = (0..2).map(|i| scan_shard(&t, 3, 1, 5, 3, i, 1).unwrap()).collect();
        assert!(merge_shards(&reps).is_err());
    }

    #[test]
    fn census_examples() {
        let t = tower(2);
        let rep = census_codes(&t, 3, 2, &CensusOptions { rs: vec![0, 1], exemplars: 1, ..Default::default() }).unwrap();
        assert_eq!(rep.total, "21");
        assert_eq!(rep.minimal[&1], "14");
        assert_eq!(rep.non_minimal[&1], "7");
        assert_eq!(rep.non_minimal[&0], "0");
        assert_eq!(rep.weights[&2], "7");
        for c in &rep.exemplars[&2] {
            let code = RankCode::from_repr(c).unwrap();
            let sup = crate::rank_metric::chi(code.tower(), &code.as_subspace());
            assert_eq!(crate::rank_metric::support_code(&sup), code.as_subspace());
        }
    }

    #[test]
    fn evasive_max_examples() {
        let t = tower(2);
        let o = SearchOptions::default();
        assert_eq!(max_evasive_dim(&t, 2, 1, 1, &o).unwrap().value, Some(2));
        assert_eq!(max_evasive_dim(&t, 2, 1, 2, &o).unwrap().value, Some(4));
        assert_eq!(max_evasive_dim(&t, 2, 2, 4, &o).unwrap().value, Some(4));
    }
}
