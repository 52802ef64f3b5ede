//! Evasive subspaces, cutting r-blocking sets, the linearity index and
//! constructive complement avoidance inside E^k viewed as F^(km).

use crate::error::{Error, Result};
use crate::field_tower::{FieldTower, Gf};
use crate::linalg::{self, e_span, flatten_subspace, flatten_vec, Subspace, SubspaceEnumerator};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// An E-subspace of E^k together with its flattened F-form.
#[derive(Clone, Debug)]
pub struct FlatSubspace {
    pub e: Subspace,
    pub flat: Subspace,
}

/// All h-dimensional E-subspaces of E^k, in enumeration order.
pub fn e_subspaces(t: &FieldTower, k: usize, h: usize) -> Result<Vec<FlatSubspace>> {
    let en = SubspaceEnumerator::new(t.qm(), k, h)?;
    let mut out = Vec::with_capacity(en.total() as usize);
    en.for_each_range(0, en.total(), |_, rows| {
        let e = Subspace::from_rref(k, rows.to_vec());
        let flat = flatten_subspace(t, &e);
        out.push(FlatSubspace { e, flat });
        true
    });
    Ok(out)
}

fn ambient_k(t: &FieldTower, a: &Subspace) -> Result<usize> {
    if !a.ambient().is_multiple_of(t.m()) {
        return Err(Error::AmbientMismatch(format!(
            "ambient {} is not a multiple of m = {}",
            a.ambient(),
            t.m()
        )));
    }
    Ok(a.ambient() / t.m())
}

/// Outcome of an evasiveness test.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EvasiveCheck {
    pub evasive: bool,
    pub spanning: bool,
    /// Largest F-dimension of J ∩ M over the h-dimensional E-subspaces M.
    pub max_meet: usize,
    /// An E-subspace M with dim(J ∩ M) > t, when one exists.
    pub refuting: Option<Subspace>,
}

/// Largest dim_F(J ∩ M) over h-dimensional E-subspaces M, with a maximiser.
pub fn max_meet(t: &FieldTower, j: &Subspace, h: usize) -> Result<(usize, Subspace)> {
    let k = ambient_k(t, j)?;
    let f = t.f();
    let mut best: Option<(usize, Subspace)> = None;
    for s in e_subspaces(t, k, h)? {
        let d = j.intersect_dim(f, &s.flat);
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, s.e));
        }
    }
    best.ok_or_else(|| Error::PreconditionViolated(format!("no {h}-dimensional subspace of E^{k}")))
}

/// J is (h, tt)-evasive: it spans E^k over E and meets every h-dimensional
/// E-subspace in F-dimension at most tt.
pub fn is_evasive(t: &FieldTower, j: &Subspace, h: usize, tt: i64) -> Result<EvasiveCheck> {
    let k = ambient_k(t, j)?;
    if h > k {
        return Err(Error::PreconditionViolated(format!("h = {h} exceeds k = {k}")));
    }
    let spanning = e_span(t, j).dim() == k;
    let f = t.f();
    let mut max_meet = 0;
    let mut refuting = None;
    for s in e_subspaces(t, k, h)? {
        let d = j.intersect_dim(f, &s.flat);
        max_meet = max_meet.max(d);
        if refuting.is_none() && d as i64 > tt {
            refuting = Some(s.e);
        }
    }
    Ok(EvasiveCheck { evasive: spanning && refuting.is_none(), spanning, max_meet, refuting })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Hash)]
#[serde(rename_all = "kebab-case")]
pub enum CuttingRoute {
    /// Every (k-r)-dimensional E-subspace V satisfies <S ∩ V>_E = V.
    Definition,
    /// (S + W) ∩ I is nonzero for every (k-r-1)-space W and every line I.
    LineMeeting,
    /// S is (k-r-1, dim S - mr - 1)-evasive.
    Evasive,
}

impl CuttingRoute {
    pub const ALL: [CuttingRoute; 3] = [CuttingRoute::Definition, CuttingRoute::LineMeeting, CuttingRoute::Evasive];
}

/// A (k-r)-dimensional E-subspace V with <S ∩ V>_E ≠ V, plus how it was built.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CuttingRefutation {
    pub v: Subspace,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Subspace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<Subspace>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CuttingVerdict {
    pub verdict: bool,
    pub route: CuttingRoute,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refuting: Option<CuttingRefutation>,
}

/// Checks a refutation against the definition directly.
pub fn refutes_cutting(t: &FieldTower, s: &Subspace, r: usize, v: &Subspace) -> bool {
    let Ok(k) = ambient_k(t, s) else { return false };
    if v.ambient() != k || v.dim() + r != k {
        return false;
    }
    let flat = flatten_subspace(t, v);
    let meet = s.intersect(t.f(), &flat).expect("same ambient");
    e_span(t, &meet) != *v
}

/// Decides whether S is a cutting r-blocking set of E^k by the chosen route.
/// False verdicts carry a refuting V that [`refutes_cutting`] accepts.
pub fn is_cutting(t: &FieldTower, s: &Subspace, r: usize, route: CuttingRoute) -> Result<CuttingVerdict> {
    let k = ambient_k(t, s)?;
    if r >= k {
        return Err(Error::PreconditionViolated(format!("r = {r} must be below k = {k}")));
    }
    let m = t.m();
    let f = t.f();
    let refuting = match route {
        CuttingRoute::Definition => {
            let mut bad = None;
            for v in e_subspaces(t, k, k - r)? {
                let meet = s.intersect(f, &v.flat)?;
                if e_span(t, &meet) != v.e {
                    bad = Some(CuttingRefutation { v: v.e, w: None, line: None });
                    break;
                }
            }
            bad
        }
        CuttingRoute::LineMeeting => {
            let lines = e_subspaces(t, k, 1)?;
            let mut bad = None;
            'outer: for w in e_subspaces(t, k, k - r - 1)? {
                let sw = s.sum(f, &w.flat)?;
                for i in &lines {
                    if sw.intersect_dim(f, &i.flat) == 0 {
                        let v = w.e.sum(t.e_field(), &i.e)?;
                        bad = Some(CuttingRefutation { v, w: Some(w.e), line: Some(i.e.clone()) });
                        break 'outer;
                    }
                }
            }
            bad
        }
        CuttingRoute::Evasive => {
            let threshold = s.dim() as i64 - (m * r) as i64 - 1;
            let check = is_evasive(t, s, k - r - 1, threshold)?;
            if check.evasive {
                None
            } else {
                let w = match check.refuting {
                    Some(w) if check.spanning => w,
                    _ => hyperplane_part(t, s, k, k - r - 1),
                };
                Some(refutation_from_w(t, s, w)?)
            }
        }
    };
    Ok(CuttingVerdict { verdict: refuting.is_none(), route, refuting })
}

/// A `dim`-dimensional E-subspace lying in an E-hyperplane that contains S.
fn hyperplane_part(t: &FieldTower, s: &Subspace, k: usize, dim: usize) -> Subspace {
    let e = t.e_field();
    let span = e_span(t, s);
    let mut rows = span.basis().to_vec();
    for i in 0..k {
        if rows.len() + 1 >= k {
            break;
        }
        let mut u = vec![0u32; k];
        u[i] = 1;
        if !Subspace::span(e, k, &rows).contains(e, &u) {
            rows.push(u);
        }
    }
    let hyper = Subspace::span(e, k, &rows);
    Subspace::span(e, k, &hyper.basis()[..dim])
}

/// Given W with dim_F(S + W) ≤ (k-1)m, builds V = W + I with I a line
/// avoiding S + W.
pub fn refutation_from_w(t: &FieldTower, s: &Subspace, w: Subspace) -> Result<CuttingRefutation> {
    let k = ambient_k(t, s)?;
    let sw = s.sum(t.f(), &flatten_subspace(t, &w))?;
    let line = avoid_complement(t, &sw, k - 1)?;
    let v = w.sum(t.e_field(), &line)?;
    Ok(CuttingRefutation { v, w: Some(w), line: Some(line) })
}

/// Smallest dim_F(A + W) over (k-r-1)-dimensional E-subspaces W, with a minimiser.
/// A is cutting r-blocking exactly when this is at least (k-1)m + 1.
pub fn min_join(t: &FieldTower, a: &Subspace, r: usize) -> Result<(usize, Subspace)> {
    let k = ambient_k(t, a)?;
    if r >= k {
        return Err(Error::PreconditionViolated(format!("r = {r} must be below k = {k}")));
    }
    let f = t.f();
    let mut best: Option<(usize, Subspace)> = None;
    for w in e_subspaces(t, k, k - r - 1)? {
        let d = a.sum_dim(f, &w.flat);
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, w.e));
        }
    }
    Ok(best.expect("at least one subspace"))
}

/// Largest E-dimension of an E-subspace inside A, by descending enumeration.
/// Returns the dimension and a witness subspace.
pub fn linearity_index(t: &FieldTower, a: &Subspace) -> Result<(usize, Subspace)> {
    let k = ambient_k(t, a)?;
    let f = t.f();
    let top = (a.dim() / t.m()).min(k);
    for h in (1..=top).rev() {
        for s in e_subspaces(t, k, h)? {
            if s.flat.is_subspace_of(f, a) {
                return Ok((h, s.e));
            }
        }
    }
    Ok((0, Subspace::zero(k)))
}

/// Normalised vectors of E^k (first nonzero entry 1) in increasing encoded order.
fn normalized_vectors(q: u32, k: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (q as u64).pow(k as u32);
    (1..total).filter_map(move |mut idx| {
        let mut v = vec![0u32; k];
        for i in (0..k).rev() {
            v[i] = (idx % q as u64) as u32;
            idx /= q as u64;
        }
        (v.iter().find(|&&x| x != 0) == Some(&1)).then_some(v)
    })
}

/// An E-subspace V of E^k with dim_E V = k - tt and H ∩ V = {0}, for an
/// F-subspace H of dimension at most m*tt. Lines Ez are added greedily with z
/// the smallest normalised vector whose line meets the running sum trivially.
pub fn avoid_complement(t: &FieldTower, h: &Subspace, tt: usize) -> Result<Subspace> {
    let k = ambient_k(t, h)?;
    let m = t.m();
    if tt > k || h.dim() > m * tt {
        return Err(Error::PreconditionViolated(format!(
            "need dim H = {} <= m*t = {} with t <= k",
            h.dim(),
            m * tt
        )));
    }
    let f = t.f();
    let e = t.e_field();
    let mut cur = h.clone();
    let mut picked: Vec<Vec<u32>> = Vec::new();
    let mut candidates = normalized_vectors(t.qm(), k);
    while picked.len() < k - tt {
        let z = candidates
            .by_ref()
            .find(|z| {
                let line = flatten_subspace(t, &Subspace::span(e, k, std::slice::from_ref(z)));
                cur.intersect_dim(f, &line) == 0
            })
            .expect("a trivially meeting line exists while dim <= (k-1)m");
        let line = flatten_subspace(t, &Subspace::span(e, k, std::slice::from_ref(&z)));
        cur = cur.sum(f, &line)?;
        picked.push(z);
    }
    let v = Subspace::span(e, k, &picked);
    debug_assert_eq!(h.intersect_dim(f, &flatten_subspace(t, &v)), 0);
    Ok(v)
}

/// An E-subspace W with dim_E W = k - tt and B + W = E^k, for dim_F B >= m*tt.
pub fn cover_complement(t: &FieldTower, b: &Subspace, tt: usize) -> Result<Subspace> {
    let k = ambient_k(t, b)?;
    let m = t.m();
    if tt > k || b.dim() < m * tt {
        return Err(Error::PreconditionViolated(format!("need dim B = {} >= m*t = {}", b.dim(), m * tt)));
    }
    let a = Subspace::from_rref(b.ambient(), b.basis()[..m * tt].to_vec());
    avoid_complement(t, &a, tt)
}

/// Subset form: for H ⊆ P^k over a field P of order q and
/// w = |{a ≠ 0 : aH = H}|, returns a tt-dimensional L with H ∩ L = {0}
/// whenever |H| <= w(q^(k+1-tt) - 1)/(q - 1).
pub fn avoid_subset(p: &Gf, k: usize, h: &[Vec<u32>], tt: usize) -> Result<Subspace> {
    if tt > k {
        return Err(Error::PreconditionViolated(format!("t = {tt} exceeds k = {k}")));
    }
    let mut set: HashSet<Vec<u32>> = h.iter().cloned().collect();
    set.insert(vec![0u32; k]);
    let q = p.order();
    let w = (1..q)
        .filter(|&a| set.iter().all(|x| set.contains(&linalg::scale(p, a, x))))
        .count() as u128;
    let lhs = set.len() as u128 * (q as u128 - 1);
    let rhs = w * ((q as u128).pow((k + 1 - tt) as u32) - 1);
    if lhs > rhs {
        return Err(Error::PreconditionViolated(format!(
            "|H| = {} exceeds {}(q^{} - 1)/(q - 1)",
            set.len(),
            w,
            k + 1 - tt
        )));
    }
    let original = set.clone();
    let mut picked = Vec::new();
    let total = (q as u64).pow(k as u32);
    for _ in 0..tt {
        let z = (1..total)
            .map(|mut idx| {
                let mut v = vec![0u32; k];
                for i in (0..k).rev() {
                    v[i] = (idx % q as u64) as u32;
                    idx /= q as u64;
                }
                v
            })
            .find(|z| (1..q).all(|a| !set.contains(&linalg::scale(p, a, z))))
            .expect("counting bound guarantees a free vector");
        let mut next = HashSet::with_capacity(set.len() * q as usize);
        for x in &set {
            for b in 0..q {
                next.insert(linalg::add_vec(p, x, &linalg::scale(p, b, &z)));
            }
        }
        set = next;
        picked.push(z);
    }
    let l = Subspace::span(p, k, &picked);
    debug_assert!(l.elements(p).iter().all(|x| x.iter().all(|&c| c == 0) || !original.contains(x)));
    Ok(l)
}

/// Flattened column vectors: helper for building F-subspaces of E^k.
pub fn span_of_columns(t: &FieldTower, cols: &[Vec<u32>]) -> Subspace {
    let k = cols.first().map_or(0, |c| c.len());
    let rows: Vec<Vec<u32>> = cols.iter().map(|c| flatten_vec(t, c)).collect();
    Subspace::span(t.f(), k * t.m(), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldTower {
        FieldTower::parse("p=2,e=1,m=2,ext=1,1,1").unwrap()
    }

    #[test]
    fn evasive_examples() {
        let t = gf4();
        let full = Subspace::full(4);
        assert!(is_evasive(&t, &full, 1, 2).unwrap().evasive);
        let j = span_of_columns(&t, &[vec![1, 0], vec![0, 1]]);
        assert!(is_evasive(&t, &j, 1, 1).unwrap().evasive);
        let j3 = span_of_columns(&t, &[vec![1, 0], vec![0, 1], vec![2, 0]]);
        let c = is_evasive(&t, &j3, 1, 1).unwrap();
        assert!(!c.evasive);
        assert_eq!(c.refuting.unwrap(), Subspace::span(t.e_field(), 2, &[vec![1, 0]]));
    }

    #[test]
    fn cutting_examples_all_routes() {
        let t = gf4();
        let s3 = span_of_columns(&t, &[vec![1, 0], vec![0, 1], vec![2, 0]]);
        let s2 = span_of_columns(&t, &[vec![1, 0], vec![0, 1]]);
        for route in CuttingRoute::ALL {
            assert!(is_cutting(&t, &Subspace::full(4), 1, route).unwrap().verdict);
            assert!(is_cutting(&t, &s3, 1, route).unwrap().verdict);
            let v = is_cutting(&t, &s2, 1, route).unwrap();
            assert!(!v.verdict);
            assert!(refutes_cutting(&t, &s2, 1, &v.refuting.unwrap().v));
        }
    }

    #[test]
    fn linearity_examples() {
        let t = gf4();
        assert_eq!(linearity_index(&t, &Subspace::full(4)).unwrap().0, 2);
        let s3 = span_of_columns(&t, &[vec![1, 0], vec![0, 1], vec![2, 0]]);
        assert_eq!(linearity_index(&t, &s3).unwrap().0, 1);
        let s2 = span_of_columns(&t, &[vec![1, 0], vec![0, 1]]);
        assert_eq!(linearity_index(&t, &s2).unwrap().0, 0);
    }

    #[test]
    fn avoid_examples() {
        let t = gf4();
        let e = t.e_field();
        assert_eq!(avoid_complement(&t, &Subspace::zero(4), 0).unwrap(), Subspace::full(2));
        let h = span_of_columns(&t, &[vec![1, 0]]);
        let v = avoid_complement(&t, &h, 1).unwrap();
        assert_eq!(v, Subspace::span(e, 2, &[vec![0, 1]]));
        let h2 = flatten_subspace(&t, &Subspace::span(e, 2, &[vec![1, 0]]));
        let v2 = avoid_complement(&t, &h2, 1).unwrap();
        assert_eq!(v2.dim(), 1);
        assert_eq!(h2.intersect_dim(t.f(), &flatten_subspace(&t, &v2)), 0);
        assert!(avoid_complement(&t, &Subspace::full(4), 1).is_err());
    }

    #[test]
    fn avoid_subset_respects_bound() {
        let f3 = Gf::prime(3).unwrap();
        let h = vec![vec![1, 0, 0], vec![2, 0, 0], vec![0, 1, 0]];
        let l = avoid_subset(&f3, 3, &h, 2).unwrap();
        assert_eq!(l.dim(), 2);
        for x in l.elements(&f3) {
            assert!(x.iter().all(|&c| c == 0) || !h.contains(&x));
        }
    }
}
