//! Rank supports, rank support weights, generalized rank weights and the
//! extremal subcode constructions.
//!
//! Subcodes of a code C with generator G are addressed by their message space:
//! an E-subspace B of E^k names D = {γG : γ ∈ B}. G is always the canonical
//! (reduced row echelon) generator.

use crate::error::{Error, Result};
use crate::field_tower::FieldTower;
use crate::geometry::{avoid_complement, cover_complement, e_subspaces};
use crate::linalg::{self, flatten_vec, Subspace, SubspaceEnumerator};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// An [n, k] E-linear code with canonical generator matrix.
#[derive(Clone, Debug)]
pub struct RankCode {
    tower: Arc<FieldTower>,
    n: usize,
    gen: Vec<Vec<u32>>,
}

impl PartialEq for RankCode {
    fn eq(&self, other: &Self) -> bool {
        self.tower.spec() == other.tower.spec() && self.n == other.n && self.gen == other.gen
    }
}

/// JSON form of a code.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CodeRepr {
    pub field: String,
    pub n: usize,
    #[serde(default)]
    pub k: Option<usize>,
    pub gen: Vec<Vec<u32>>,
}

impl RankCode {
    /// The E-span of `rows` in E^n. Dependent rows are allowed and dropped.
    pub fn new(tower: Arc<FieldTower>, n: usize, rows: &[Vec<u32>]) -> Result<RankCode> {
        let qm = tower.qm();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!("row of length {} in a code of length {n}", r.len())));
            }
            if r.iter().any(|&x| x >= qm) {
                return Err(Error::InvalidParameter(format!("entry out of range for GF({qm})")));
            }
        }
        let s = Subspace::span(tower.e_field(), n, rows);
        Ok(RankCode { tower, n, gen: s.basis().to_vec() })
    }

    pub fn from_subspace(tower: Arc<FieldTower>, s: &Subspace) -> RankCode {
        RankCode { tower, n: s.ambient(), gen: s.basis().to_vec() }
    }

    pub fn from_repr(repr: &CodeRepr) -> Result<RankCode> {
        let tower = Arc::new(FieldTower::parse(&repr.field)?);
        let c = RankCode::new(tower, repr.n, &repr.gen)?;
        if let Some(k) = repr.k {
            if k != c.k() {
                return Err(Error::DimensionMismatch(format!("stated k = {k}, generator rank {}", c.k())));
            }
        }
        Ok(c)
    }

    pub fn to_repr(&self) -> CodeRepr {
        CodeRepr { field: self.tower.spec(), n: self.n, k: Some(self.k()), gen: self.gen.clone() }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }
    pub fn tower_arc(&self) -> Arc<FieldTower> {
        self.tower.clone()
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.gen.len()
    }
    pub fn gen(&self) -> &[Vec<u32>] {
        &self.gen
    }

    /// C as an E-subspace of E^n.
    pub fn as_subspace(&self) -> Subspace {
        Subspace::from_rref(self.n, self.gen.clone())
    }

    /// D = {γG : γ ∈ B} as an E-subspace of E^n.
    pub fn encode(&self, b: &Subspace) -> Subspace {
        let e = self.tower.e_field();
        let rows: Vec<Vec<u32>> = b.basis().iter().map(|g| linalg::vec_mat(e, g, &self.gen)).collect();
        Subspace::span(e, self.n, &rows)
    }

    /// Message space of a subspace of C. Fails if D is not inside C.
    pub fn message_of(&self, d: &Subspace) -> Result<Subspace> {
        let e = self.tower.e_field();
        let piv = linalg::pivots_of(&self.gen);
        let c = self.as_subspace();
        let mut rows = Vec::with_capacity(d.dim());
        for v in d.basis() {
            if !c.contains(e, v) {
                return Err(Error::PreconditionViolated("vector is not a codeword".into()));
            }
            rows.push(piv.iter().map(|&p| v[p]).collect::<Vec<u32>>());
        }
        Ok(Subspace::span(e, self.k(), &rows))
    }

    /// U: the F-span of the columns of G inside E^k, flattened to F^(km).
    pub fn column_support(&self) -> Subspace {
        let k = self.k();
        let cols: Vec<Vec<u32>> =
            (0..self.n).map(|j| flatten_vec(&self.tower, &self.gen.iter().map(|r| r[j]).collect::<Vec<_>>())).collect();
        Subspace::span(self.tower.f(), k * self.tower.m(), &cols)
    }

    /// wt(C) = dim_F U.
    pub fn weight(&self) -> usize {
        self.column_support().dim()
    }

    /// C^⊥ under the standard form.
    pub fn dual_code(&self) -> RankCode {
        let d = self.as_subspace().dual(self.tower.e_field());
        RankCode::from_subspace(self.tower.clone(), &d)
    }

    /// The subcode {γG : γ ∈ B} as a code of its own.
    pub fn subcode(&self, b: &Subspace) -> RankCode {
        RankCode::from_subspace(self.tower.clone(), &self.encode(b))
    }

    /// Every codeword; for small codes only.
    pub fn codewords(&self) -> Vec<Vec<u32>> {
        self.as_subspace().elements(self.tower.e_field())
    }
}

/// rsupp(α): the F-row space of the expansion matrix of α.
pub fn rank_support(t: &FieldTower, alpha: &[u32]) -> Subspace {
    Subspace::span(t.f(), alpha.len(), &t.expand(alpha))
}

/// χ of a family of vectors: the F-span of their rank supports.
pub fn chi_of_vectors(t: &FieldTower, n: usize, vectors: &[Vec<u32>]) -> Subspace {
    let mut rows = Vec::with_capacity(vectors.len() * t.m());
    for v in vectors {
        rows.extend(t.expand(v));
    }
    Subspace::span(t.f(), n, &rows)
}

/// χ of an E-subspace of E^n from the F-generating family {τ_i g_j}.
pub fn chi(t: &FieldTower, d: &Subspace) -> Subspace {
    let e = t.e_field();
    let mut gens = Vec::with_capacity(d.dim() * t.m());
    for g in d.basis() {
        for &tau in t.basis() {
            gens.push(linalg::scale(e, tau, g));
        }
    }
    chi_of_vectors(t, d.ambient(), &gens)
}

pub fn wt(t: &FieldTower, d: &Subspace) -> usize {
    chi(t, d).dim()
}

/// wt(D) = dim U - dim(B^‡ ∩ U) for D = {γG : γ ∈ B}.
pub fn subcode_weight(c: &RankCode, b: &Subspace) -> usize {
    subcode_weight_with(c, &c.column_support(), b)
}

pub fn subcode_weight_with(c: &RankCode, u: &Subspace, b: &Subspace) -> usize {
    let t = c.tower();
    let bdd = linalg::flatten_subspace(t, &b.dual(t.e_field()));
    u.dim() - u.intersect_dim(t.f(), &bdd)
}

/// wt(D) from the rank supports of D's generators.
pub fn subcode_weight_direct(c: &RankCode, b: &Subspace) -> usize {
    wt(c.tower(), &c.encode(b))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum GrwRoute {
    /// Minimum of dim U - dim(M ∩ U) over (k-r)-dimensional E-subspaces M.
    Geometric,
    /// Minimum weight over all r-dimensional subcodes.
    Brute,
}

/// d_r(C) with a minimising r-dimensional message space.
pub fn grw_with(c: &RankCode, r: usize, route: GrwRoute) -> Result<(usize, Subspace)> {
    let k = c.k();
    if r > k {
        return Err(Error::PreconditionViolated(format!("r = {r} exceeds k = {k}")));
    }
    let t = c.tower();
    let u = c.column_support();
    match route {
        GrwRoute::Geometric => {
            let f = t.f();
            let mut best: Option<(usize, Subspace)> = None;
            for msub in e_subspaces(t, k, k - r)? {
                let w = u.dim() - u.intersect_dim(f, &msub.flat);
                if best.as_ref().is_none_or(|(b, _)| w < *b) {
                    best = Some((w, msub.e));
                }
            }
            let (w, m) = best.expect("nonempty enumeration");
            Ok((w, m.dual(t.e_field())))
        }
        GrwRoute::Brute => {
            let en = SubspaceEnumerator::new(t.qm(), k, r)?;
            let mut best: Option<(usize, Subspace)> = None;
            en.for_each_range(0, en.total(), |_, rows| {
                let b = Subspace::from_rref(k, rows.to_vec());
                let w = subcode_weight_direct(c, &b);
                if best.as_ref().is_none_or(|(x, _)| w < *x) {
                    best = Some((w, b));
                }
                true
            });
            Ok(best.expect("nonempty enumeration"))
        }
    }
}

/// d_r(C), geometric route; debug builds cross-check the brute route.
pub fn grw(c: &RankCode, r: usize) -> Result<usize> {
    let (w, _) = grw_with(c, r, GrwRoute::Geometric)?;
    #[cfg(debug_assertions)]
    if SubspaceEnumerator::new(c.tower().qm(), c.k(), r).is_ok_and(|e| e.total() <= 512) {
        debug_assert_eq!(w, grw_with(c, r, GrwRoute::Brute)?.0);
    }
    Ok(w)
}

/// d_0(C), ..., d_k(C).
pub fn grw_sequence(c: &RankCode) -> Result<Vec<usize>> {
    (0..=c.k()).map(|r| grw(c, r)).collect()
}

/// The largest weight of an s-dimensional subcode, min(ms, wt(C)), with a
/// message space attaining it. The witness weight is recomputed directly.
pub fn max_subcode_weight(c: &RankCode, s: usize) -> Result<(usize, Subspace)> {
    let k = c.k();
    if s > k {
        return Err(Error::PreconditionViolated(format!("s = {s} exceeds k = {k}")));
    }
    let t = c.tower();
    let m = t.m();
    let u = c.column_support();
    let v = if m * s <= u.dim() { cover_complement(t, &u, s)? } else { avoid_complement(t, &u, s)? };
    let b = v.dual(t.e_field());
    let want = (m * s).min(u.dim());
    let got = subcode_weight_direct(c, &b);
    if got != want || b.dim() != s {
        return Err(Error::PreconditionViolated(format!(
            "constructed subcode has dimension {} and weight {got}, expected {s} and {want}",
            b.dim()
        )));
    }
    Ok((want, b))
}

/// The E-span of an F-subspace w of F^n, equal to {α : rsupp(α) ⊆ w}.
pub fn support_code(w: &Subspace) -> Subspace {
    // F-entries are E-entries with the same code, and reduced echelon form is field independent.
    w.clone()
}

/// A codimension-one subspace of V with strictly smaller rank support:
/// V ∩ <h>_E for h spanned by all but the last echelon row of χ(V).
pub fn drop_weight_subspace(t: &FieldTower, v: &Subspace) -> Result<Subspace> {
    if v.is_zero() {
        return Err(Error::PreconditionViolated("subspace must be nonzero".into()));
    }
    let sup = chi(t, v);
    let w = sup.dim();
    let h = Subspace::from_rref(v.ambient(), sup.basis()[..w - 1].to_vec());
    let out = v.intersect(t.e_field(), &support_code(&h))?;
    debug_assert_eq!(out.dim() + 1, v.dim());
    Ok(out)
}

/// Message-space form of [`drop_weight_subspace`].
pub fn drop_weight_subcode(c: &RankCode, b: &Subspace) -> Result<Subspace> {
    let d = drop_weight_subspace(c.tower(), &c.encode(b))?;
    c.message_of(&d)
}

/// For n ≤ m, a codeword whose rank support is χ(C).
pub fn full_support_codeword(c: &RankCode) -> Result<Option<Vec<u32>>> {
    if c.n() > c.tower().m() || c.k() == 0 {
        return Ok(None);
    }
    let (_, b) = max_subcode_weight(c, 1)?;
    let d = c.encode(&b);
    Ok(Some(d.basis()[0].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Arc<FieldTower> {
        Arc::new(FieldTower::parse("p=2,e=1,m=2,ext=1,1,1").unwrap())
    }

    // omega = 2
    fn example(t: &Arc<FieldTower>) -> RankCode {
        RankCode::new(t.clone(), 3, &[vec![1, 0, 2], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn rank_support_examples() {
        let t = gf4();
        assert_eq!(rank_support(&t, &[1, 2]).dim(), 2);
        assert!(rank_support(&t, &[0, 0]).is_zero());
        assert_eq!(rank_support(&t, &[1, 1]), Subspace::span(t.f(), 2, &[vec![1, 1]]));
    }

    #[test]
    fn weights_of_example_code() {
        let t = gf4();
        let c = example(&t);
        assert_eq!(c.weight(), 3);
        assert_eq!(wt(&t, &c.as_subspace()), 3);
        let b = Subspace::span(t.e_field(), 2, &[vec![1, 0]]);
        assert_eq!(subcode_weight(&c, &b), 2);
        assert_eq!(subcode_weight_direct(&c, &b), 2);
        assert_eq!(subcode_weight(&c, &Subspace::full(2)), 3);
        assert_eq!(subcode_weight(&c, &Subspace::zero(2)), 0);
        assert_eq!(grw_sequence(&c).unwrap(), vec![0, 1, 3]);
        let line = RankCode::new(t.clone(), 2, &[vec![1, 2]]).unwrap();
        assert_eq!(grw(&line, 1).unwrap(), 2);
    }

    #[test]
    fn column_support_examples() {
        let t = gf4();
        let id = RankCode::new(t.clone(), 2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.column_support().dim(), 2);
        let c = RankCode::new(t.clone(), 4, &[vec![1, 0, 2, 0], vec![0, 1, 0, 2]]).unwrap();
        assert_eq!(c.column_support(), Subspace::full(4));
    }

    #[test]
    fn max_subcode_weight_examples() {
        let t = gf4();
        let c = example(&t);
        assert_eq!(max_subcode_weight(&c, 0).unwrap().0, 0);
        assert_eq!(max_subcode_weight(&c, 1).unwrap().0, 2);
        assert_eq!(max_subcode_weight(&c, 2).unwrap().0, 3);
    }

    #[test]
    fn drop_weight_examples() {
        let t = gf4();
        let line = Subspace::span(t.e_field(), 2, &[vec![1, 2]]);
        assert!(drop_weight_subspace(&t, &line).unwrap().is_zero());
        let v = Subspace::span(t.e_field(), 3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let d = drop_weight_subspace(&t, &v).unwrap();
        assert_eq!(d.dim(), 1);
        assert!(wt(&t, &d) <= 1);
        let c = example(&t);
        let d2 = drop_weight_subspace(&t, &c.as_subspace()).unwrap();
        assert_eq!(d2.dim(), 1);
        assert!(chi(&t, &d2).is_subspace_of(t.f(), &chi(&t, &c.as_subspace())));
        assert!(wt(&t, &d2) < 3);
    }

    #[test]
    fn support_code_examples() {
        let t = gf4();
        let w = Subspace::span(t.f(), 3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let s = support_code(&w);
        assert_eq!(s.basis(), &[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(support_code(&Subspace::full(3)), Subspace::full(3));
    }
}
