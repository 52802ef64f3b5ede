//! Finite fields GF(p^e) and extension towers GF(q^m)/GF(q).
//!
//! Elements are integer codes. A code's base-p digits are the coefficients of
//! the element written over the prime field, so addition is digitwise mod p.
//! For a field built over a subfield of order s, the base-s digits of a code
//! are its polynomial coefficients over that subfield.

use crate::error::{Error, Result};
use std::fmt;

/// Above this order multiplication falls back to schoolbook polynomial arithmetic.
pub const TABLE_LIMIT: u64 = 1 << 16;

/// A finite field, either prime or a simple extension of another finite field.
#[derive(Clone)]
pub struct Gf {
    p: u32,
    order: u32,
    sub_order: u32,
    degree: u32,
    modulus: Vec<u32>,
    sub: Option<Box<Gf>>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_tab: Vec<u32>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({}; over {} mod {:?})", self.order, self.sub_order, self.modulus)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Gf {
    pub fn prime(p: u32) -> Result<Gf> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        let mut f = Gf {
            p,
            order: p,
            sub_order: p,
            degree: 1,
            modulus: vec![],
            sub: None,
            exp: vec![],
            log: vec![],
            add_tab: vec![],
        };
        f.build_tables();
        Ok(f)
    }

    /// The field sub[x]/(modulus). `modulus` is monic, ascending coefficients.
    pub fn extension(sub: &Gf, modulus: &[u32]) -> Result<Gf> {
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidParameter(format!(
                "modulus {modulus:?} must be monic of degree >= 1"
            )));
        }
        if modulus.iter().any(|&c| c >= sub.order) {
            return Err(Error::InvalidParameter(format!(
                "coefficient out of range in {modulus:?}"
            )));
        }
        let degree = (modulus.len() - 1) as u32;
        let order = (sub.order as u64)
            .checked_pow(degree)
            .filter(|&o| o <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidParameter("field order exceeds 2^32".into()))?;
        if !poly_is_irreducible(sub, modulus) {
            return Err(Error::NonIrreducible(format!("{modulus:?} over GF({})", sub.order)));
        }
        let mut f = Gf {
            p: sub.p,
            order: order as u32,
            sub_order: sub.order,
            degree,
            modulus: modulus.to_vec(),
            sub: Some(Box::new(sub.clone())),
            exp: vec![],
            log: vec![],
            add_tab: vec![],
        };
        f.build_tables();
        Ok(f)
    }

    fn build_tables(&mut self) {
        let order = self.order as usize;
        if self.p != 2 && order <= 256 {
            let mut t = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    t[a * order + b] = self.add_digits(a as u32, b as u32);
                }
            }
            self.add_tab = t;
        }
        if (self.order as u64) > TABLE_LIMIT || self.order == 2 {
            return;
        }
        let n = order - 1;
        for g in 2..self.order {
            let mut x = 1u32;
            let mut exp = Vec::with_capacity(2 * n);
            let mut ok = true;
            for i in 0..n {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                x = self.mul_slow(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; order];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                let copy = exp.clone();
                exp.extend_from_slice(&copy);
                self.exp = exp;
                self.log = log;
                return;
            }
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn characteristic(&self) -> u32 {
        self.p
    }
    pub fn sub_order(&self) -> u32 {
        self.sub_order
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn subfield(&self) -> Option<&Gf> {
        self.sub.as_deref()
    }
    pub fn has_tables(&self) -> bool {
        !self.log.is_empty() || self.order == 2
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        let (mut r, mut pw) = (0u32, 1u32);
        while a > 0 || b > 0 {
            r += ((a % p + b % p) % p) * pw;
            a /= p;
            b /= p;
            pw = pw.wrapping_mul(p);
        }
        r
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if !self.add_tab.is_empty() {
            self.add_tab[a as usize * self.order as usize + b as usize]
        } else if self.sub.is_none() {
            (a + b) % self.p
        } else {
            self.add_digits(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let (mut x, mut r, mut pw) = (a, 0u32, 1u32);
        while x > 0 {
            r += ((p - x % p) % p) * pw;
            x /= p;
            pw = pw.wrapping_mul(p);
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.log.is_empty() {
            return self.exp[(self.log[a as usize] + self.log[b as usize]) as usize];
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        match &self.sub {
            None => ((a as u64 * b as u64) % self.p as u64) as u32,
            Some(sub) => {
                let pa = self.to_poly(a);
                let pb = self.to_poly(b);
                let mut prod = vec![0u32; pa.len() + pb.len() - 1];
                for (i, &x) in pa.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in pb.iter().enumerate() {
                        prod[i + j] = sub.add(prod[i + j], sub.mul(x, y));
                    }
                }
                let r = poly_rem(sub, &prod, &self.modulus);
                self.from_poly(&r)
            }
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        if !self.log.is_empty() {
            let n = self.order - 1;
            return self.exp[((n - self.log[a as usize]) % n) as usize];
        }
        // a^(order-2)
        self.pow(a, self.order as u64 - 2)
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Coefficients over the subfield, ascending, exactly `degree` entries.
    pub fn to_poly(&self, a: u32) -> Vec<u32> {
        let s = self.sub_order;
        let mut x = a;
        (0..self.degree)
            .map(|_| {
                let d = x % s;
                x /= s;
                d
            })
            .collect()
    }

    pub fn from_poly(&self, c: &[u32]) -> u32 {
        let s = self.sub_order;
        c.iter().rev().fold(0u32, |acc, &d| acc * s + d)
    }

    /// The class of x in sub[x]/(modulus); for a prime field, 1.
    pub fn generator(&self) -> u32 {
        match &self.sub {
            None => 1,
            // degree one quotient: x = -c0
            Some(sub) if self.degree == 1 => sub.neg(self.modulus[0]),
            Some(_) => self.sub_order,
        }
    }
}

/// Remainder of `a` modulo monic `m` over `f`; result has length deg(m).
pub fn poly_rem(f: &Gf, a: &[u32], m: &[u32]) -> Vec<u32> {
    let d = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(lead, c));
            }
        }
        r.pop();
    }
    r.resize(d, 0);
    r
}

/// Exhaustive trial division by every monic polynomial of degree <= deg/2.
pub fn poly_is_irreducible(f: &Gf, poly: &[u32]) -> bool {
    let deg = poly.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    let q = f.order() as u64;
    for dd in 1..=deg / 2 {
        let count = q.pow(dd as u32);
        let mut g = vec![0u32; dd + 1];
        g[dd] = 1;
        for idx in 0..count {
            let mut x = idx;
            for c in g.iter_mut().take(dd) {
                *c = (x % q) as u32;
                x /= q;
            }
            if poly_rem(f, poly, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `deg`,
/// coefficients compared from the constant term upward.
pub fn default_irreducible(f: &Gf, deg: usize) -> Vec<u32> {
    let q = f.order() as u64;
    let total = q.pow(deg as u32);
    let mut poly = vec![0u32; deg + 1];
    poly[deg] = 1;
    for idx in 0..total {
        // constant term is the most significant digit
        let mut x = idx;
        for i in (0..deg).rev() {
            poly[i] = (x % q) as u32;
            x /= q;
        }
        if poly_is_irreducible(f, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The tower F = GF(q) ⊂ E = GF(q^m) with an ordered F-basis of E.
///
/// E-element codes are always in the polynomial basis 1, x, ..., x^(m-1);
/// the chosen basis only affects [`FieldTower::coords`] and everything built on it.
#[derive(Clone, Debug)]
pub struct FieldTower {
    p: u32,
    e: u32,
    m: u32,
    base: Gf,
    ext: Gf,
    basis: Vec<u32>,
    default_basis: bool,
    // m x m over F: polynomial coordinates -> basis coordinates
    to_basis: Vec<Vec<u32>>,
    coord_tab: Vec<u32>,
}

impl FieldTower {
    pub fn new(
        p: u32,
        e: u32,
        base_poly: Option<&[u32]>,
        m: u32,
        ext_poly: Option<&[u32]>,
        basis: Option<&[u32]>,
    ) -> Result<FieldTower> {
        if e == 0 || m == 0 {
            return Err(Error::InvalidParameter("degrees must be at least 1".into()));
        }
        let prime = Gf::prime(p)?;
        let base = if e == 1 {
            if let Some(bp) = base_poly {
                if bp.len() != 2 {
                    return Err(Error::InvalidParameter("base polynomial must have degree e".into()));
                }
            }
            prime
        } else {
            let bp = match base_poly {
                Some(bp) => bp.to_vec(),
                None => default_irreducible(&prime, e as usize),
            };
            if bp.len() != e as usize + 1 {
                return Err(Error::InvalidParameter("base polynomial must have degree e".into()));
            }
            Gf::extension(&prime, &bp)?
        };
        let ep = match ext_poly {
            Some(ep) => ep.to_vec(),
            None => default_irreducible(&base, m as usize),
        };
        if ep.len() != m as usize + 1 {
            return Err(Error::InvalidParameter("extension polynomial must have degree m".into()));
        }
        let ext = Gf::extension(&base, &ep)?;
        let q = base.order();
        let (basis, default_basis) = match basis {
            None => ((0..m).map(|i| q.pow(i)).collect::<Vec<u32>>(), true),
            Some(b) => {
                if b.len() != m as usize || b.iter().any(|&x| x >= ext.order()) {
                    return Err(Error::BadBasis);
                }
                let def: Vec<u32> = (0..m).map(|i| q.pow(i)).collect();
                (b.to_vec(), b == def.as_slice())
            }
        };
        // columns = polynomial coordinates of the basis elements
        let mm = m as usize;
        let mut t = vec![vec![0u32; mm]; mm];
        for (j, &b) in basis.iter().enumerate() {
            for (i, c) in ext.to_poly(b).into_iter().enumerate() {
                t[i][j] = c;
            }
        }
        let to_basis = invert(&base, &t).ok_or(Error::BadBasis)?;
        let mut tower = FieldTower {
            p,
            e,
            m,
            base,
            ext,
            basis,
            default_basis,
            to_basis,
            coord_tab: vec![],
        };
        if (tower.ext.order() as u64) * (m as u64) <= 1 << 22 {
            let mut tab = Vec::with_capacity(tower.ext.order() as usize * mm);
            for a in 0..tower.ext.order() {
                tab.extend(tower.coords_slow(a));
            }
            tower.coord_tab = tab;
        }
        Ok(tower)
    }

    /// The tower with default polynomials and the polynomial basis.
    pub fn standard(p: u32, e: u32, m: u32) -> Result<FieldTower> {
        FieldTower::new(p, e, None, m, None, None)
    }

    /// Parses `p=2,e=1,m=3,ext=1,1,0,1` (plus optional `base=` and `basis=`).
    pub fn parse(spec: &str) -> Result<FieldTower> {
        let mut p = None;
        let mut e = 1u32;
        let mut m = None;
        let mut base: Option<Vec<u32>> = None;
        let mut ext: Option<Vec<u32>> = None;
        let mut basis: Option<Vec<u32>> = None;
        let mut current: Option<String> = None;
        let num = |s: &str| -> Result<u32> {
            s.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad number '{s}' in field spec")))
        };
        for tok in spec.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            if let Some((key, val)) = tok.split_once('=') {
                let key = key.trim().to_ascii_lowercase();
                match key.as_str() {
                    "p" => p = Some(num(val)?),
                    "e" => e = num(val)?,
                    "m" => m = Some(num(val)?),
                    "base" => base = Some(vec![num(val)?]),
                    "ext" => ext = Some(vec![num(val)?]),
                    "basis" => basis = Some(vec![num(val)?]),
                    _ => return Err(Error::Parse(format!("unknown key '{key}' in field spec"))),
                }
                current = Some(key);
            } else {
                let v = num(tok)?;
                match current.as_deref() {
                    Some("base") => base.as_mut().unwrap().push(v),
                    Some("ext") => ext.as_mut().unwrap().push(v),
                    Some("basis") => basis.as_mut().unwrap().push(v),
                    _ => return Err(Error::Parse(format!("stray value '{tok}' in field spec"))),
                }
            }
        }
        let p = p.ok_or_else(|| Error::Parse("field spec needs p".into()))?;
        let m = m.ok_or_else(|| Error::Parse("field spec needs m".into()))?;
        FieldTower::new(p, e, base.as_deref(), m, ext.as_deref(), basis.as_deref())
    }

    /// Canonical spec string; parses back to an identical tower.
    pub fn spec(&self) -> String {
        let join = |v: &[u32]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let mut s = format!("p={},e={},m={}", self.p, self.e, self.m);
        if self.e > 1 {
            s.push_str(&format!(",base={}", join(self.base.modulus())));
        }
        s.push_str(&format!(",ext={}", join(self.ext.modulus())));
        if !self.default_basis {
            s.push_str(&format!(",basis={}", join(&self.basis)));
        }
        s
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    /// Order of the base field F.
    pub fn q(&self) -> u32 {
        self.base.order()
    }
    /// Extension degree of E over F.
    pub fn m(&self) -> usize {
        self.m as usize
    }
    /// Order of the top field E.
    pub fn qm(&self) -> u32 {
        self.ext.order()
    }
    /// The base field F.
    pub fn f(&self) -> &Gf {
        &self.base
    }
    /// The top field E.
    pub fn e_field(&self) -> &Gf {
        &self.ext
    }
    pub fn basis(&self) -> &[u32] {
        &self.basis
    }
    pub fn has_default_basis(&self) -> bool {
        self.default_basis
    }

    /// The same tower with a different ordered basis.
    pub fn with_basis(&self, basis: &[u32]) -> Result<FieldTower> {
        let bp = if self.e > 1 { Some(self.base.modulus()) } else { None };
        FieldTower::new(self.p, self.e, bp, self.m, Some(self.ext.modulus()), Some(basis))
    }

    fn coords_slow(&self, a: u32) -> Vec<u32> {
        let poly = self.ext.to_poly(a);
        if self.default_basis {
            return poly;
        }
        let f = &self.base;
        self.to_basis
            .iter()
            .map(|row| row.iter().zip(&poly).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y))))
            .collect()
    }

    /// Coordinates of an E-element in the ordered basis.
    pub fn coords(&self, a: u32) -> Vec<u32> {
        let m = self.m as usize;
        if !self.coord_tab.is_empty() {
            let i = a as usize * m;
            return self.coord_tab[i..i + m].to_vec();
        }
        self.coords_slow(a)
    }

    #[inline]
    pub fn coords_into(&self, a: u32, out: &mut [u32]) {
        let m = self.m as usize;
        if !self.coord_tab.is_empty() {
            let i = a as usize * m;
            out.copy_from_slice(&self.coord_tab[i..i + m]);
        } else {
            out.copy_from_slice(&self.coords_slow(a));
        }
    }

    /// Inverse of [`FieldTower::coords`]: sum of c_i * tau_i.
    pub fn from_coords(&self, c: &[u32]) -> u32 {
        let e = &self.ext;
        c.iter().zip(&self.basis).fold(0, |acc, (&ci, &t)| e.add(acc, e.mul(ci, t)))
    }

    /// M(alpha): an m x n matrix over F whose column j is the coordinate vector of alpha_j.
    pub fn expand(&self, alpha: &[u32]) -> Vec<Vec<u32>> {
        let m = self.m as usize;
        let mut rows = vec![vec![0u32; alpha.len()]; m];
        let mut buf = vec![0u32; m];
        for (j, &a) in alpha.iter().enumerate() {
            self.coords_into(a, &mut buf);
            for i in 0..m {
                rows[i][j] = buf[i];
            }
        }
        rows
    }

    /// Reassembles a vector over E from its expansion matrix.
    pub fn collapse(&self, rows: &[Vec<u32>]) -> Vec<u32> {
        let n = rows.first().map_or(0, |r| r.len());
        (0..n)
            .map(|j| {
                let col: Vec<u32> = rows.iter().map(|r| r[j]).collect();
                self.from_coords(&col)
            })
            .collect()
    }
}

/// Inverse of a square matrix over `f`, if it exists.
pub fn invert(f: &Gf, a: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let n = a.len();
    let mut aug: Vec<Vec<u32>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| aug[r][col] != 0)?;
        aug.swap(col, piv);
        let inv = f.inv(aug[col][col]);
        for x in aug[col].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..n {
            if r != col && aug[r][col] != 0 {
                let c = aug[r][col];
                for j in 0..2 * n {
                    let v = f.mul(c, aug[col][j]);
                    aug[r][j] = f.sub(aug[r][j], v);
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_construction_and_basis_expansion() {
        let t = FieldTower::parse("p=2,e=1,m=2,ext=1,1,1").unwrap();
        assert_eq!(t.qm(), 4);
        // omega = code 2, omega + 1 = code 3
        assert_eq!(t.expand(&[1, 2]), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(t.expand(&[3, 1]), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(t.expand(&[0, 0, 0]), vec![vec![0; 3]; 2]);
        let e = t.e_field();
        assert_eq!(e.mul(2, 2), 3);
        assert_eq!(e.mul(2, 3), 1);
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        let err = FieldTower::parse("p=2,e=1,m=2,ext=1,0,1").unwrap_err();
        assert!(matches!(err, Error::NonIrreducible(_)));
    }

    #[test]
    fn default_polynomials_are_lexicographically_smallest() {
        let f2 = Gf::prime(2).unwrap();
        assert_eq!(default_irreducible(&f2, 2), vec![1, 1, 1]);
        assert_eq!(default_irreducible(&f2, 3), vec![1, 0, 1, 1]);
        let f3 = Gf::prime(3).unwrap();
        assert_eq!(default_irreducible(&f3, 2), vec![1, 0, 1]);
    }

    #[test]
    fn spec_string_round_trip() {
        for s in ["p=2,e=1,m=3,ext=1,1,0,1", "p=3,e=1,m=2,ext=1,0,1", "p=2,e=2,m=2,base=1,1,1,ext=2,1,1"] {
            let t = FieldTower::parse(s).unwrap();
            assert_eq!(t.spec(), s);
        }
    }

    #[test]
    fn slow_and_table_multiplication_agree() {
        let t = FieldTower::standard(3, 1, 3).unwrap();
        let e = t.e_field();
        for a in 0..e.order() {
            for b in 0..e.order() {
                assert_eq!(e.mul(a, b), e.mul_slow(a, b));
            }
        }
    }

    #[test]
    fn non_default_basis_reconstructs() {
        let t = FieldTower::standard(2, 1, 3).unwrap().with_basis(&[3, 6, 7]).unwrap();
        for a in 0..8 {
            assert_eq!(t.from_coords(&t.coords(a)), a);
        }
        assert!(matches!(
            FieldTower::standard(2, 1, 2).unwrap().with_basis(&[1, 1]),
            Err(Error::BadBasis)
        ));
    }
}
