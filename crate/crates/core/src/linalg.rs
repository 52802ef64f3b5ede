//! Matrices and canonical subspaces over any level of a tower, the flattening
//! of E^k into F^(km), and ordered subspace enumeration.

use crate::error::{Error, Result};
use crate::field_tower::{FieldTower, Gf};
use serde::{Deserialize, Serialize};

/// Tag written into certificates so that global indices stay meaningful.
pub const ENUMERATION_ORDER: &str = "rref-lex-v1";

/// Reduces `rows` in place to reduced row echelon form, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(f: &Gf, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][col]);
        if inv != 1 {
            for x in rows[r][col..].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (prow, rest) = tail.split_first_mut().unwrap();
        for other in head.iter_mut().chain(rest.iter_mut()) {
            let c = other[col];
            if c != 0 {
                for j in col..ncols {
                    if prow[j] != 0 {
                        other[j] = f.sub(other[j], f.mul(c, prow[j]));
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(f: &Gf, rows: &[Vec<u32>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Pivot columns of a matrix already in reduced row echelon form.
pub fn pivots_of(rows: &[Vec<u32>]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().position(|&x| x != 0).expect("zero row in echelon basis")).collect()
}

pub fn dot(f: &Gf, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| if x == 0 || y == 0 { acc } else { f.add(acc, f.mul(x, y)) })
}

pub fn scale(f: &Gf, c: u32, v: &[u32]) -> Vec<u32> {
    v.iter().map(|&x| f.mul(c, x)).collect()
}

pub fn add_vec(f: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

/// Row vector times matrix.
pub fn vec_mat(f: &Gf, v: &[u32], m: &[Vec<u32>]) -> Vec<u32> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u32; cols];
    for (&c, row) in v.iter().zip(m) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            if x != 0 {
                *o = f.add(*o, f.mul(c, x));
            }
        }
    }
    out
}

/// A subspace of K^N stored by its reduced row echelon basis.
///
/// Equality and hashing use the basis directly, which is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient: usize,
    #[serde(default)]
    dim: Option<usize>,
    rref_basis: Vec<Vec<u32>>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr { ambient: self.ambient, dim: Some(self.dim()), rref_basis: self.basis.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    /// Trusts the stored basis; call [`Subspace::recanonicalize`] on untrusted input.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SubspaceRepr::deserialize(d)?;
        if r.rref_basis.iter().any(|row| row.len() != r.ambient) {
            return Err(serde::de::Error::custom("basis row length differs from ambient"));
        }
        Ok(Subspace { ambient: r.ambient, basis: r.rref_basis })
    }
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { ambient: n, basis: vec![] }
    }

    pub fn full(n: usize) -> Subspace {
        let basis = (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect();
        Subspace { ambient: n, basis }
    }

    pub fn span(f: &Gf, n: usize, vectors: &[Vec<u32>]) -> Subspace {
        let mut rows: Vec<Vec<u32>> = vectors.to_vec();
        debug_assert!(rows.iter().all(|r| r.len() == n));
        rref(f, &mut rows);
        Subspace { ambient: n, basis: rows }
    }

    /// Wraps rows that are already in reduced row echelon form.
    pub fn from_rref(n: usize, basis: Vec<Vec<u32>>) -> Subspace {
        Subspace { ambient: n, basis }
    }

    pub fn recanonicalize(&self, f: &Gf) -> Subspace {
        Subspace::span(f, self.ambient, &self.basis)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }
    pub fn pivots(&self) -> Vec<usize> {
        pivots_of(&self.basis)
    }
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch(format!("{} vs {}", self.ambient, other.ambient)));
        }
        Ok(())
    }

    /// Residue of `v` after elimination against the basis.
    pub fn reduce(&self, f: &Gf, v: &[u32]) -> Vec<u32> {
        let mut r = v.to_vec();
        for row in &self.basis {
            let p = row.iter().position(|&x| x != 0).unwrap();
            let c = r[p];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        r
    }

    pub fn contains(&self, f: &Gf, v: &[u32]) -> bool {
        self.reduce(f, v).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, f: &Gf, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(f, b))
    }

    pub fn sum(&self, f: &Gf, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Subspace::span(f, self.ambient, &rows))
    }

    pub fn intersect(&self, f: &Gf, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Ok(self.dual(f).sum(f, &other.dual(f))?.dual(f))
    }

    pub fn sum_dim(&self, f: &Gf, other: &Subspace) -> usize {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        rank(f, &rows)
    }

    pub fn intersect_dim(&self, f: &Gf, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum_dim(f, other)
    }

    /// dim((self + other) / other).
    pub fn quotient_dim(&self, f: &Gf, other: &Subspace) -> Result<usize> {
        self.check(other)?;
        Ok(self.sum_dim(f, other) - other.dim())
    }

    /// Orthogonal complement under the standard form a.b^T.
    pub fn dual(&self, f: &Gf) -> Subspace {
        let n = self.ambient;
        let piv = self.pivots();
        let mut is_piv = vec![false; n];
        for &p in &piv {
            is_piv[p] = true;
        }
        let mut rows = Vec::with_capacity(n - piv.len());
        for j in (0..n).filter(|&j| !is_piv[j]) {
            let mut x = vec![0u32; n];
            x[j] = 1;
            for (row, &p) in self.basis.iter().zip(&piv) {
                x[p] = f.neg(row[j]);
            }
            rows.push(x);
        }
        Subspace::span(f, n, &rows)
    }

    /// Every element of the subspace; only sensible at desk scale.
    pub fn elements(&self, f: &Gf) -> Vec<Vec<u32>> {
        let q = f.order() as u64;
        let d = self.dim();
        let total = q.pow(d as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0u32; self.ambient];
                for row in &self.basis {
                    let c = (idx % q) as u32;
                    idx /= q;
                    if c != 0 {
                        for (x, &y) in v.iter_mut().zip(row) {
                            *x = f.add(*x, f.mul(c, y));
                        }
                    }
                }
                v
            })
            .collect()
    }
}

/// The vector x in E^k written in F^(km): entry j*m + i is coordinate i of x_j.
pub fn flatten_vec(t: &FieldTower, x: &[u32]) -> Vec<u32> {
    let m = t.m();
    let mut out = vec![0u32; x.len() * m];
    for (j, &a) in x.iter().enumerate() {
        t.coords_into(a, &mut out[j * m..(j + 1) * m]);
    }
    out
}

pub fn unflatten_vec(t: &FieldTower, y: &[u32]) -> Vec<u32> {
    y.chunks(t.m()).map(|c| t.from_coords(c)).collect()
}

/// An E-subspace of E^k viewed as an F-subspace of F^(km).
pub fn flatten_subspace(t: &FieldTower, v: &Subspace) -> Subspace {
    let e = t.e_field();
    let mut rows = Vec::with_capacity(v.dim() * t.m());
    for b in v.basis() {
        for i in 0..t.m() {
            let c = t.q().pow(i as u32);
            rows.push(flatten_vec(t, &scale(e, c, b)));
        }
    }
    Subspace::span(t.f(), v.ambient() * t.m(), &rows)
}

/// The E-span of an F-subspace of F^(km), as an E-subspace of E^k.
pub fn e_span(t: &FieldTower, a: &Subspace) -> Subspace {
    let k = a.ambient() / t.m();
    let rows: Vec<Vec<u32>> = a.basis().iter().map(|y| unflatten_vec(t, y)).collect();
    Subspace::span(t.e_field(), k, &rows)
}

/// The largest E-subspace contained in the F-subspace A of F^(km), as an
/// F-subspace: the intersection of the sets g^(-i) A over i < m.
pub fn largest_e_subspace(t: &FieldTower, a: &Subspace) -> Subspace {
    let e = t.e_field();
    let f = t.f();
    let g = e.generator();
    let mut acc = a.clone();
    for i in 1..t.m() {
        let c = e.inv(e.pow(g, i as u64));
        let rows: Vec<Vec<u32>> =
            a.basis().iter().map(|y| flatten_vec(t, &scale(e, c, &unflatten_vec(t, y)))).collect();
        let moved = Subspace::span(f, a.ambient(), &rows);
        acc = acc.intersect(f, &moved).expect("same ambient");
    }
    acc
}

/// F^n sitting inside E^n, flattened to F^(nm).
pub fn base_field_part(t: &FieldTower, n: usize) -> Subspace {
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut x = vec![0u32; n];
            x[j] = 1;
            flatten_vec(t, &x)
        })
        .collect();
    Subspace::span(t.f(), n * t.m(), &rows)
}

pub fn to_bits(v: &[u32]) -> u64 {
    v.iter().enumerate().fold(0u64, |acc, (i, &x)| acc | (u64::from(x & 1) << i))
}

pub fn from_bits(b: u64, n: usize) -> Vec<u32> {
    (0..n).map(|i| ((b >> i) & 1) as u32).collect()
}

/// Rank of GF(2) vectors packed as bit masks; destroys the input order.
pub fn bit_rank(v: &mut [u64]) -> usize {
    let mut r = 0;
    for i in 0..v.len() {
        let x = v[i];
        if x == 0 {
            continue;
        }
        let low = x & x.wrapping_neg();
        v.swap(r, i);
        for j in r + 1..v.len() {
            if v[j] & low != 0 {
                v[j] ^= x;
            }
        }
        r += 1;
    }
    r
}

/// One pivot pattern: its pivot columns and free cells (row, column) in row-major order.
#[derive(Clone, Debug)]
pub struct PivotSet {
    pub pivots: Vec<usize>,
    pub cells: Vec<(usize, usize)>,
    pub count: u128,
}

/// Deterministic enumeration of the d-dimensional subspaces of GF(q)^n.
///
/// Order: pivot sets lexicographically, then the free cells counted in base q
/// with the first cell most significant. Each subspace has a global index.
#[derive(Clone, Debug)]
pub struct SubspaceEnumerator {
    q: u32,
    n: usize,
    d: usize,
    sets: Vec<PivotSet>,
    offsets: Vec<u128>,
    total: u128,
}

const MAX_PIVOT_SETS: u128 = 4_000_000;

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl SubspaceEnumerator {
    pub fn new(q: u32, n: usize, d: usize) -> Result<SubspaceEnumerator> {
        if d > n {
            return Ok(SubspaceEnumerator { q, n, d, sets: vec![], offsets: vec![0], total: 0 });
        }
        if binom(n, d) > MAX_PIVOT_SETS {
            return Err(Error::TooLarge(format!("too many pivot sets for n={n}, d={d}")));
        }
        let mut sets = Vec::new();
        let mut offsets = vec![0u128];
        let mut total = 0u128;
        let mut comb: Vec<usize> = (0..d).collect();
        loop {
            let mut is_piv = vec![false; n];
            for &p in &comb {
                is_piv[p] = true;
            }
            let mut cells = Vec::new();
            for (i, &p) in comb.iter().enumerate() {
                for j in p + 1..n {
                    if !is_piv[j] {
                        cells.push((i, j));
                    }
                }
            }
            let count = (q as u128)
                .checked_pow(cells.len() as u32)
                .ok_or_else(|| Error::TooLarge(format!("GF({q})^{n}, d={d}")))?;
            total = total.checked_add(count).ok_or_else(|| Error::TooLarge(format!("GF({q})^{n}, d={d}")))?;
            sets.push(PivotSet { pivots: comb.clone(), cells, count });
            offsets.push(total);
            // next combination in lexicographic order
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(SubspaceEnumerator { q, n, d, sets, offsets, total });
                }
                i -= 1;
                if comb[i] < n - d + i {
                    comb[i] += 1;
                    for j in i + 1..d {
                        comb[j] = comb[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    pub fn total(&self) -> u128 {
        self.total
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn pivot_sets(&self) -> &[PivotSet] {
        &self.sets
    }
    /// Global index of the first subspace of each pivot set, plus the total.
    pub fn offsets(&self) -> &[u128] {
        &self.offsets
    }

    fn locate(&self, idx: u128) -> (usize, u128) {
        let s = self.offsets.partition_point(|&o| o <= idx) - 1;
        (s, idx - self.offsets[s])
    }

    fn digits(&self, set: &PivotSet, mut local: u128) -> Vec<u32> {
        let q = self.q as u128;
        let mut dg = vec![0u32; set.cells.len()];
        for c in (0..dg.len()).rev() {
            dg[c] = (local % q) as u32;
            local /= q;
        }
        dg
    }

    fn fill(&self, set: &PivotSet, dg: &[u32]) -> Vec<Vec<u32>> {
        let mut rows = vec![vec![0u32; self.n]; self.d];
        for (i, &p) in set.pivots.iter().enumerate() {
            rows[i][p] = 1;
        }
        for (&(r, c), &x) in set.cells.iter().zip(dg) {
            rows[r][c] = x;
        }
        rows
    }

    /// The RREF basis of the subspace with global index `idx`.
    pub fn unrank(&self, idx: u128) -> Vec<Vec<u32>> {
        assert!(idx < self.total, "index out of range");
        let (s, local) = self.locate(idx);
        let set = &self.sets[s];
        self.fill(set, &self.digits(set, local))
    }

    /// Global index of a subspace given by its RREF basis.
    pub fn rank_of(&self, basis: &[Vec<u32>]) -> Option<u128> {
        if basis.len() != self.d {
            return None;
        }
        let piv = pivots_of(basis);
        let s = self.sets.iter().position(|p| p.pivots == piv)?;
        let set = &self.sets[s];
        let local = set.cells.iter().fold(0u128, |acc, &(r, c)| acc * self.q as u128 + basis[r][c] as u128);
        Some(self.offsets[s] + local)
    }

    /// Calls `f(index, rows)` for indices in `[start, end)` until it returns false.
    pub fn for_each_range<F: FnMut(u128, &[Vec<u32>]) -> bool>(&self, start: u128, end: u128, mut f: F) {
        let end = end.min(self.total);
        if start >= end {
            return;
        }
        let (mut s, local) = self.locate(start);
        let mut dg = self.digits(&self.sets[s], local);
        let mut rows = self.fill(&self.sets[s], &dg);
        let mut idx = start;
        loop {
            if !f(idx, &rows) {
                return;
            }
            idx += 1;
            if idx >= end {
                return;
            }
            let set = &self.sets[s];
            let mut c = dg.len();
            let mut carried = true;
            while c > 0 {
                c -= 1;
                dg[c] += 1;
                if dg[c] < self.q {
                    let (r, col) = set.cells[c];
                    rows[r][col] = dg[c];
                    carried = false;
                    break;
                }
                dg[c] = 0;
                let (r, col) = set.cells[c];
                rows[r][col] = 0;
            }
            if carried {
                s += 1;
                dg = vec![0; self.sets[s].cells.len()];
                rows = self.fill(&self.sets[s], &dg);
            }
        }
    }

    /// GF(2) variant of [`SubspaceEnumerator::for_each_range`] with rows as bit masks.
    pub fn for_each_range_bits<F: FnMut(u128, &[u64]) -> bool>(&self, start: u128, end: u128, mut f: F) {
        assert!(self.q == 2 && self.n <= 64, "bit enumeration needs q = 2 and n <= 64");
        let end = end.min(self.total);
        if start >= end {
            return;
        }
        let (mut s, mut local) = self.locate(start);
        let mut rows = vec![0u64; self.d];
        let mut idx = start;
        loop {
            let set = &self.sets[s];
            let nc = set.cells.len();
            let base: Vec<u64> = set.pivots.iter().map(|&p| 1u64 << p).collect();
            let masks: Vec<(usize, u64)> = set.cells.iter().map(|&(r, c)| (r, 1u64 << c)).collect();
            let mut l = local;
            while l < set.count {
                rows.copy_from_slice(&base);
                let mut bits = l as u64;
                for c in (0..nc).rev() {
                    if bits & 1 == 1 {
                        let (r, m) = masks[c];
                        rows[r] |= m;
                    }
                    bits >>= 1;
                }
                if !f(idx, &rows) {
                    return;
                }
                idx += 1;
                if idx >= end {
                    return;
                }
                l += 1;
            }
            s += 1;
            local = 0;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<Vec<u32>>> + '_ {
        (0..self.total).map(move |i| self.unrank(i))
    }

    /// Every subspace, collected; only for small enumerations.
    pub fn collect_all(&self) -> Vec<Vec<Vec<u32>>> {
        let mut out = Vec::with_capacity(self.total as usize);
        self.for_each_range(0, self.total, |_, rows| {
            out.push(rows.to_vec());
            true
        });
        out
    }
}

/// All d-dimensional subspaces of K^n, for a field K of small order.
pub fn all_subspaces(f: &Gf, n: usize, d: usize) -> Result<Vec<Subspace>> {
    let en = SubspaceEnumerator::new(f.order(), n, d)?;
    Ok(en.collect_all().into_iter().map(|b| Subspace::from_rref(n, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldTower {
        FieldTower::parse("p=2,e=1,m=2,ext=1,1,1").unwrap()
    }

    #[test]
    fn rref_examples() {
        let f2 = Gf::prime(2).unwrap();
        let mut a = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(rref(&f2, &mut a), vec![0, 1]);
        assert_eq!(a, vec![vec![1, 0], vec![0, 1]]);
        let t = gf4();
        let e = t.e_field();
        // omega = 2, omega^2 = 3
        let mut b = vec![vec![1, 2], vec![2, 3]];
        assert_eq!(rref(e, &mut b).len(), 1);
        assert_eq!(b, vec![vec![1, 2]]);
    }

    #[test]
    fn dual_of_line_in_gf4_squared() {
        let t = gf4();
        let e = t.e_field();
        let a = Subspace::span(e, 2, &[vec![1, 2]]);
        let d = a.dual(e);
        assert_eq!(d, Subspace::span(e, 2, &[vec![2, 1]]));
        assert_eq!(d.dual(e), a);
        assert_eq!(Subspace::zero(2).dual(e), Subspace::full(2));
    }

    #[test]
    fn mixed_intersection_in_gf4_squared() {
        let t = gf4();
        let f = t.f();
        let s = Subspace::span(
            f,
            4,
            &[flatten_vec(&t, &[1, 0]), flatten_vec(&t, &[0, 1]), flatten_vec(&t, &[2, 0])],
        );
        let line = flatten_subspace(&t, &Subspace::span(t.e_field(), 2, &[vec![0, 1]]));
        assert_eq!(s.intersect(f, &line).unwrap().dim(), 1);
    }

    #[test]
    fn enumeration_counts_and_ranks() {
        assert_eq!(SubspaceEnumerator::new(2, 3, 1).unwrap().total(), 7);
        assert_eq!(SubspaceEnumerator::new(2, 4, 2).unwrap().total(), 35);
        assert_eq!(SubspaceEnumerator::new(3, 4, 0).unwrap().total(), 1);
        let en = SubspaceEnumerator::new(3, 4, 2).unwrap();
        let all = en.collect_all();
        for (i, b) in all.iter().enumerate() {
            assert_eq!(en.rank_of(b), Some(i as u128));
            assert_eq!(&en.unrank(i as u128), b);
        }
    }

    #[test]
    fn bit_enumeration_matches_generic() {
        let en = SubspaceEnumerator::new(2, 6, 3).unwrap();
        let generic = en.collect_all();
        let mut i = 0usize;
        en.for_each_range_bits(0, en.total(), |idx, rows| {
            assert_eq!(idx as usize, i);
            let want: Vec<u64> = generic[i].iter().map(|r| to_bits(r)).collect();
            assert_eq!(rows, want.as_slice());
            i += 1;
            true
        });
        assert_eq!(i, generic.len());
    }

    #[test]
    fn largest_e_subspace_of_mixed_space() {
        let t = gf4();
        let f = t.f();
        let s = Subspace::span(
            f,
            4,
            &[flatten_vec(&t, &[1, 0]), flatten_vec(&t, &[0, 1]), flatten_vec(&t, &[2, 0])],
        );
        let l = largest_e_subspace(&t, &s);
        assert_eq!(l.dim(), 2);
        assert_eq!(e_span(&t, &l), Subspace::span(t.e_field(), 2, &[vec![1, 0]]));
    }
}
