//! Exact counting and closed-form bounds: q-binomials, rank-matrix counts,
//! r-minimal code counts, ψ bounds, bounds on ϖ(k, r), evasive dimension
//! certificates and two rational inequalities checked exactly.

use crate::error::{Error, Result};
use crate::field_tower::FieldTower;
use crate::linalg::{Subspace, SubspaceEnumerator};
use crate::rank_metric::{grw_with, wt, GrwRoute, RankCode};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Number of r-dimensional subspaces of an n-dimensional space over GF(q).
pub fn qbinom(q: u64, n: u64, r: u64) -> BigUint {
    qbinom_big(&big(q), n, r)
}

pub fn qbinom_big(q: &BigUint, n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 1..=r {
        num *= q.pow((i + n - r) as u32) - 1u32;
        den *= q.pow(i as u32) - 1u32;
    }
    let (quo, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quo
}

/// ∏_{i<r} (q^n - q^i).
pub fn qdelta(q: u64, n: u64, r: u64) -> BigUint {
    qdelta_big(&big(q), n, r)
}

pub fn qdelta_big(q: &BigUint, n: u64, r: u64) -> BigUint {
    let qn = q.pow(n as u32);
    (0..r).fold(BigUint::one(), |acc, i| {
        let qi = q.pow(i as u32);
        if qi > qn {
            BigUint::zero()
        } else {
            acc * (&qn - qi)
        }
    })
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn rpow(a: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::Pow::pow(a, e as u64)
    } else {
        num_traits::Pow::pow(a.recip(), (-e) as u64)
    }
}

/// The q-binomial product formula at a rational base.
pub fn qbinom_rat(a: &BigRational, n: u64, r: u64) -> BigRational {
    if r > n {
        return BigRational::zero();
    }
    (1..=r).fold(BigRational::one(), |acc, i| {
        acc * (rpow(a, (i + n - r) as i64) - rat(1)) / (rpow(a, i as i64) - rat(1))
    })
}

pub fn qdelta_rat(a: &BigRational, n: u64, r: u64) -> BigRational {
    (0..r).fold(BigRational::one(), |acc, i| acc * (rpow(a, n as i64) - rpow(a, i as i64)))
}

/// Number of [n, r+1] r-minimal codes over GF(q^m).
pub fn count_r_minimal(q: u64, m: u64, n: u64, r: u64) -> Result<BigUint> {
    if n < r + 1 {
        return Err(Error::PreconditionViolated(format!("need n >= r+1, got n={n}, r={r}")));
    }
    let qq = big(q);
    let mut sum = BigUint::zero();
    for i in m * r + 1..=m * (r + 1) {
        sum += qdelta_big(&qq, m * (r + 1), i) * qbinom_big(&qq, n, i);
    }
    let den = qdelta_big(&qq.pow(m as u32), r + 1, r + 1);
    let (quo, rem) = sum.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::NonIntegerResult(format!("{sum} / {den}")));
    }
    Ok(quo)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountReport {
    pub formula: String,
    pub inputs: BTreeMap<String, u64>,
    /// Exact value in decimal.
    pub value: String,
}

impl CountReport {
    pub fn new(formula: &str, inputs: &[(&str, u64)], value: &BigUint) -> CountReport {
        CountReport {
            formula: formula.into(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value: value.to_string(),
        }
    }
}

/// Number of k-dimensional codes in E^n that are not r-minimal, by enumeration.
pub fn count_non_minimal(t: &Arc<FieldTower>, n: usize, k: usize, r: usize) -> Result<BigUint> {
    let en = SubspaceEnumerator::new(t.qm(), n, k)?;
    let mut bad = 0u64;
    if r >= 1 && r < k {
        let m = t.m();
        en.for_each_range(0, en.total(), |_, rows| {
            let c = RankCode::new(t.clone(), n, rows).expect("valid rows");
            if grw_with(&c, r + 1, GrwRoute::Geometric).expect("r+1 <= k").0 <= m * r {
                bad += 1;
            }
            true
        });
    }
    Ok(big(bad))
}

/// Number of r-dimensional E-subspaces of E^n, grouped by rank support weight.
pub fn weight_census(t: &FieldTower, n: usize, r: usize) -> Result<BTreeMap<usize, BigUint>> {
    let en = SubspaceEnumerator::new(t.qm(), n, r)?;
    let mut out: BTreeMap<usize, u64> = BTreeMap::new();
    en.for_each_range(0, en.total(), |_, rows| {
        *out.entry(wt(t, &Subspace::from_rref(n, rows.to_vec()))).or_default() += 1;
        true
    });
    Ok(out.into_iter().map(|(k, v)| (k, big(v))).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PsiReport {
    pub q: u64,
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub t: u64,
    /// ψ(t, r), supplied or enumerated.
    pub psi_t: String,
    /// ψ(t, r) · bin_{q^m}(n-t, k-t), an upper bound on ψ(k, r).
    pub inheritance_bound: String,
    /// ∏_{i=k-t+1}^{k} (Q^{i+n-k} - 1)/(Q^i - 1) as a reduced fraction.
    pub existence_threshold: String,
    /// ψ(t, r) is below the threshold, so a k-dimensional r-minimal code exists.
    pub existence_certified: bool,
    /// (1/(Q-1)) Σ_s N_s (Q^{s-r} - 1) with N_s the number of r-dimensional
    /// subspaces of weight s; an upper bound on ψ(r+1, r).
    pub census_bound: String,
    pub census: BTreeMap<usize, String>,
    /// ∏_{i=k-r}^{k} (Q^{i+n-k} - 1)/(Q^i - 1).
    pub census_threshold: String,
    pub census_existence_certified: bool,
}

fn ratio_product(qq: &BigUint, n: u64, k: u64, from: u64) -> BigRational {
    let qq = BigInt::from(qq.clone());
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in from..=k {
        num *= qq.pow((i + n - k) as u32) - 1;
        den *= qq.pow(i as u32) - 1;
    }
    BigRational::new(num, den)
}

fn rat_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Evaluates the inheritance bound on ψ(k, r), its existence condition and the
/// census bound on ψ(r+1, r) for codes in E^n.
pub fn psi_bounds(t: &Arc<FieldTower>, n: usize, k: usize, r: usize, tt: usize, psi_t: Option<BigUint>) -> Result<PsiReport> {
    if !(r < tt && tt <= k && k <= n) {
        return Err(Error::PreconditionViolated(format!("need r+1 <= t <= k <= n; got r={r}, t={tt}, k={k}, n={n}")));
    }
    let qq = big(t.qm() as u64);
    let psi_t = match psi_t {
        Some(p) => p,
        None => count_non_minimal(t, n, tt, r)?,
    };
    let (n64, k64, r64, t64) = (n as u64, k as u64, r as u64, tt as u64);
    let inherit = &psi_t * qbinom_big(&qq, n64 - t64, k64 - t64);
    let thr = ratio_product(&qq, n64, k64, k64 - t64 + 1);
    let exists = BigRational::from_integer(BigInt::from(psi_t.clone())) < thr;
    let census = weight_census(t, n, r)?;
    let mut sum = BigUint::zero();
    for (&s, cnt) in &census {
        if s > r {
            sum += cnt * (qq.pow((s - r) as u32) - 1u32);
        }
    }
    let (cb, rem) = sum.div_rem(&(&qq - 1u32));
    debug_assert!(rem.is_zero());
    let cthr = ratio_product(&qq, n64, k64, k64 - r64);
    let cexists = BigRational::from_integer(BigInt::from(cb.clone())) < cthr;
    Ok(PsiReport {
        q: t.q() as u64,
        m: t.m() as u64,
        n: n64,
        k: k64,
        r: r64,
        t: t64,
        psi_t: psi_t.to_string(),
        inheritance_bound: inherit.to_string(),
        existence_threshold: rat_string(&thr),
        existence_certified: exists,
        census_bound: cb.to_string(),
        census: census.into_iter().map(|(k, v)| (k, v.to_string())).collect(),
        census_threshold: rat_string(&cthr),
        census_existence_certified: cexists,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Lower,
    Upper,
    Exact,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoundRule {
    pub tag: String,
    pub kind: RuleKind,
    pub value: u64,
    /// The rule is proved only when the base field is finite.
    pub finite_fields_only: bool,
}

/// A sequence (a_1, ..., a_w) certifying the sequence lower bound.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SequenceWitness {
    pub a: Vec<u64>,
    pub w: u64,
    pub bound: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OmegaBounds {
    pub m: u64,
    pub k: u64,
    pub r: u64,
    pub lower: u64,
    pub upper: u64,
    /// Set when an exact rule applies.
    pub exact: Option<u64>,
    pub rules: Vec<BoundRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceWitness>,
}

fn isqrt(x: u64) -> u64 {
    let mut s = (x as f64).sqrt() as u64;
    while s * s > x {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= x {
        s += 1;
    }
    s
}

fn ceil_sqrt(x: u64) -> u64 {
    let s = isqrt(x);
    if s * s == x {
        s
    } else {
        s + 1
    }
}

/// Longest admissible sequence for the sequence lower bound on ϖ(k, r):
/// entries in [0, m], partial sums S kept at most k-r-1, each step satisfying
/// a² + (m(r-1) + 2 + S + s)a ≥ (m-1)S + m - s, and a final quadratic test in k.
pub fn omega_sequence_bound(m: u64, k: u64, r: u64) -> Option<SequenceWitness> {
    if m < 2 || r < 1 || k < r + 1 {
        return None;
    }
    let (mi, ki, ri) = (m as i128, k as i128, r as i128);
    let smax = (k - r - 1) as usize;
    let wmax = ((m - 1) * (k - r)) as usize;
    // parent[s][S] = (previous S, a) for a reachable partial sum S after s terms
    let mut reach: Vec<Vec<Option<(usize, u64)>>> = vec![vec![None; smax + 1]; wmax + 1];
    reach[0][0] = Some((0, 0));
    let final_ok = |w: i128, s: i128| {
        ki >= ri + 1 + s
            && (mi - 1) * (ki - ri) >= w
            && ki * ki - (2 * ri - mi * (ri - 1) + s - w) * ki > (s + ri) * ((mi - 1) * ri + w)
    };
    let mut best: Option<(usize, usize)> = None;
    for w in 0..=wmax {
        if w > 0 {
            for s_prev in 0..=smax {
                if reach[w - 1][s_prev].is_none() {
                    continue;
                }
                let (sp, st) = (s_prev as i128, (w - 1) as i128);
                for a in 0..=m {
                    let nx = s_prev + a as usize;
                    if nx > smax {
                        break;
                    }
                    let ai = a as i128;
                    if ai * ai + (mi * (ri - 1) + 2 + sp + st) * ai >= (mi - 1) * sp + mi - st && reach[w][nx].is_none() {
                        reach[w][nx] = Some((s_prev, a));
                    }
                }
            }
        }
        if let Some(s) = (0..=smax).find(|&s| reach[w][s].is_some() && final_ok(w as i128, s as i128)) {
            best = Some((w, s));
        }
    }
    let (w, mut s) = best?;
    let mut a = vec![0u64; w];
    for i in (1..=w).rev() {
        let (p, ai) = reach[i][s].expect("reachable");
        a[i - 1] = ai;
        s = p;
    }
    Some(SequenceWitness { a, w: w as u64, bound: (m - 1) * r + k + w as u64 + 1 })
}

/// Every applicable bound on ϖ(k, r) for E/F of degree m.
pub fn omega_bounds(m: u64, k: u64, r: u64) -> Result<OmegaBounds> {
    if m < 1 || k < r + 1 {
        return Err(Error::PreconditionViolated(format!("need m >= 1 and k >= r+1; got m={m}, k={k}, r={r}")));
    }
    let mut rules = Vec::new();
    let mut add = |tag: &str, kind: RuleKind, value: u64, finite: bool| {
        rules.push(BoundRule { tag: tag.into(), kind, value, finite_fields_only: finite })
    };
    add("dimension-lower", RuleKind::Lower, (m - 1) * r + k, false);
    add("hyperplane-upper", RuleKind::Upper, (k - 1) * m + 1, false);
    if k > r && r + 1 >= m {
        add("small-degree-exact", RuleKind::Exact, (k - 1) * m + 1, false);
    }
    if r + 1 == k {
        add("corank-one-exact", RuleKind::Exact, (k - 1) * m + 1, false);
    }
    if r == 0 {
        add("zero-rank-exact", RuleKind::Exact, k, false);
    }
    let mut sequence = None;
    if m >= 2 {
        if r == 1 && k >= 2 {
            add("minimal-lower", RuleKind::Lower, m + k - 1, true);
        }
        if r == 1 && k >= isqrt(m) + 2 {
            add("sqrt-lower", RuleKind::Lower, m + k, false);
        }
        let c = ceil_sqrt(m + 1) as i128;
        let ki = k as i128;
        if r == 1 && ki * ki - c * ki > c * m as i128 {
            add("sqrt-quadratic-lower", RuleKind::Lower, m + k + 1, false);
        }
        if r >= 2 && k >= r + 2 {
            add("two-step-lower", RuleKind::Lower, (m - 1) * r + k + 1, false);
        }
        if r >= 3 && k >= r + 3 {
            add("three-step-lower", RuleKind::Lower, (m - 1) * r + k + 2, false);
        }
        if r == 2 && (k >= 6 || (k == 5 && m <= 7)) {
            add("rank-two-lower", RuleKind::Lower, 2 * m + k, false);
        }
        if m == 3 && r == 1 && k >= 2 {
            add("cubic-minimal-lower", RuleKind::Lower, 2 * k, false);
        }
        if m == 4 && r == 2 && k >= 3 {
            add("quartic-rank-two-lower", RuleKind::Lower, 2 * k + 3, false);
        }
        if let Some(sw) = omega_sequence_bound(m, k, r) {
            add("sequence-lower", RuleKind::Lower, sw.bound, false);
            sequence = Some(sw);
        }
    }
    add("counting-upper", RuleKind::Upper, m * r + k * (r + 1) - r * r - 2 * r, true);
    if r == 1 && k >= 2 {
        add("minimal-upper", RuleKind::Upper, m + 2 * k - 3, true);
    }
    if m >= 4 && k == 3 && r == 1 {
        add("plane-upper", RuleKind::Upper, m + 3, true);
    }
    if m == 3 && r == 1 && k >= 2 {
        add("cubic-minimal-exact", RuleKind::Exact, 2 * k, true);
    }
    let exact = rules.iter().find(|x| x.kind == RuleKind::Exact).map(|x| x.value);
    let lower = rules.iter().filter(|x| x.kind != RuleKind::Upper).map(|x| x.value).max().expect("one rule");
    let upper = rules.iter().filter(|x| x.kind != RuleKind::Lower).map(|x| x.value).min().expect("one rule");
    Ok(OmegaBounds { m, k, r, lower, upper, exact, rules, sequence })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EvasiveCertificate {
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    /// The sequence (g_1, ..., g_a) used by the sequence rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<u64>>,
}

/// Whether the arithmetic conditions certify that every (n-λ, n-λ+a)-evasive
/// subspace of E^n, n ≥ k, has dimension at most n + a + u.
pub fn evasive_bound_certifies(m: u64, lambda: u64, a: u64, u: u64, k: u64) -> EvasiveCertificate {
    let no = EvasiveCertificate { certified: false, rule: None, sequence: None };
    if k < lambda {
        return no;
    }
    let (mi, li, ui, ki, ai) = (m as i128, lambda as i128, u as i128, k as i128, a as i128);
    let gmax = (k - lambda) as usize;
    let mut reach: Vec<Vec<Option<(usize, u64)>>> = vec![vec![None; gmax + 1]; a as usize + 1];
    reach[0][0] = Some((0, 0));
    for s in 0..a as usize {
        for gp in 0..=gmax {
            if reach[s][gp].is_none() {
                continue;
            }
            let (gi, si) = (gp as i128, s as i128);
            for g in 0..=m {
                let nx = gp + g as usize;
                if nx > gmax {
                    break;
                }
                let gg = g as i128;
                if gg * gg + (li + ui + 2 - mi + gi + si) * gg >= (mi - 1) * li + (mi - 1) * gi - ui - si
                    && reach[s + 1][nx].is_none()
                {
                    reach[s + 1][nx] = Some((gp, g));
                }
            }
        }
    }
    let fin = |g: i128| {
        ki >= li + g && ki * ki - (mi + li - ui + g - ai - 2) * ki >= (li + g - 1) * (ui + ai) + li + g
    };
    let small = m == 2 || (m == 3 && 2 * u >= lambda) || (m == 4 && u > lambda);
    let Some(mut g) = (0..=gmax).find(|&g| reach[a as usize][g].is_some() && fin(g as i128)) else {
        if small && k > a + lambda {
            return EvasiveCertificate {
                certified: true,
                rule: Some("small-degree".into()),
                sequence: Some(vec![1; a as usize]),
            };
        }
        return no;
    };
    let mut seq = vec![0u64; a as usize];
    for i in (1..=a as usize).rev() {
        let (p, gi) = reach[i][g].expect("reachable");
        seq[i - 1] = gi;
        g = p;
    }
    let rule = if a == 0 { "quadratic" } else { "sequence" };
    EvasiveCertificate { certified: true, rule: Some(rule.into()), sequence: Some(seq) }
}

/// Dimension bound for a (k-λ, 2k-λ-s)-evasive subspace of E^k when m ∈ {2,3,4}
/// and k ≥ s ≥ λ+1.
pub fn small_degree_evasive_bound(m: u64, k: u64, lambda: u64, s: u64) -> Option<u64> {
    if !(k >= s && s > lambda) {
        return None;
    }
    match m {
        2 => Some(2 * k - s),
        3 => Some(2 * k - s + lambda.div_ceil(2)),
        4 => Some(2 * k - s + lambda + 1),
        _ => None,
    }
}

/// Upper bound on the dimension of an (h, t)-evasive subspace of E^k from
/// [`small_degree_evasive_bound`], valid when h ≤ t ≤ 2h-1.
pub fn evasive_dim_bound(m: u64, k: u64, h: u64, t: u64) -> Option<u64> {
    if h > k || t < h || t + 1 > 2 * h {
        return None;
    }
    small_degree_evasive_bound(m, k, k - h, k + h - t)
}

/// For (h, h)-evasive subspaces of dimension at least k+1: dim ≤ km/(h+1).
pub fn scattered_bound(m: u64, k: u64, h: u64) -> u64 {
    k * m / (h + 1)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InequalityCheck {
    pub a: String,
    pub params: Vec<u64>,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// ∏_{i=1}^{n}(1 - a^{-i}) > 1 - a^{-1} - a^{-2} + a^{-5} > 1 - a^{-1} - a^{-2}, exactly.
pub fn product_inequality(a: &BigRational, n: u64) -> Result<InequalityCheck> {
    if *a <= rat(1) {
        return Err(Error::PreconditionViolated("need a > 1".into()));
    }
    let lhs = (1..=n).fold(BigRational::one(), |acc, i| acc * (rat(1) - rpow(a, -(i as i64))));
    let base = rat(1) - rpow(a, -1) - rpow(a, -2);
    let mid = &base + rpow(a, -5);
    let holds = lhs > mid && mid > base;
    Ok(InequalityCheck { a: rat_string(a), params: vec![n], lhs: rat_string(&lhs), rhs: rat_string(&mid), holds })
}

/// a^{-h(m+n-h)} Σ_{i≤h} δ_a(m,i) bin_a(n,i) <
/// 1/((a-1)(a²-a-1)a^{m+n-2h-2}) + a²/(a²-a-1), exactly.
pub fn rank_sum_inequality(a: &BigRational, m: u64, n: u64, h: u64) -> Result<InequalityCheck> {
    if a * a <= a + rat(1) {
        return Err(Error::PreconditionViolated("need a² > a + 1".into()));
    }
    if h < 1 || h > m.min(n) {
        return Err(Error::PreconditionViolated("need 1 <= h <= min(m, n)".into()));
    }
    let sum = (0..=h).fold(BigRational::zero(), |acc, i| acc + qdelta_rat(a, m, i) * qbinom_rat(a, n, i));
    let lhs = rpow(a, -((h * (m + n - h)) as i64)) * sum;
    let g = a * a - a - rat(1);
    let rhs = (rpow(a, m as i64 + n as i64 - 2 * h as i64 - 2) * (a - rat(1)) * &g).recip() + a * a / &g;
    let holds = lhs < rhs;
    Ok(InequalityCheck { a: rat_string(a), params: vec![m, n, h], lhs: rat_string(&lhs), rhs: rat_string(&rhs), holds })
}

/// Parses "2", "5/3".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let mut it = s.splitn(2, '/');
    let n: BigInt = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let d: BigInt = match it.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}
