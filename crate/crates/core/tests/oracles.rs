//! Counting and census values checked against independent brute-force oracles.

use num_bigint::BigUint;
use rankmin::combinatorics::{count_r_minimal, qbinom, qdelta};
use rankmin::linalg::{rank, SubspaceEnumerator};
use rankmin::rank_metric::{grw, RankCode};
use rankmin::search::{census_codes, CensusOptions};
use rankmin::{FieldTower, Gf};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Distinct row spaces of all d-tuples of vectors, counted by brute force.
fn brute_subspace_count(q: u32, n: usize, d: usize) -> u64 {
    let f = Gf::prime(q).unwrap();
    let size = (q as u64).pow(n as u32);
    let vec_of = |mut x: u64| -> Vec<u32> {
        (0..n)
            .map(|_| {
                let c = (x % q as u64) as u32;
                x /= q as u64;
                c
            })
            .collect()
    };
    let mut seen = BTreeSet::new();
    let tuples = size.pow(d as u32);
    for mut t in 0..tuples {
        let rows: Vec<Vec<u32>> = (0..d)
            .map(|_| {
                let v = vec_of(t % size);
                t /= size;
                v
            })
            .collect();
        if rank(&f, &rows) == d {
            let mut r = rows.clone();
            rankmin::linalg::rref(&f, &mut r);
            seen.insert(r);
        }
    }
    seen.len() as u64
}

#[test]
fn qbinom_matches_enumeration() {
    for (q, nmax) in [(2u32, 9usize), (3, 5)] {
        for n in 0..=nmax {
            for d in 0..=n {
                let en = SubspaceEnumerator::new(q, n, d).unwrap();
                let streamed = en.iter().count() as u64;
                assert_eq!(BigUint::from(streamed), qbinom(q as u64, n as u64, d as u64), "q={q} n={n} d={d}");
                assert_eq!(en.total(), streamed as u128);
            }
        }
    }
}

#[test]
fn qbinom_matches_independent_span_count() {
    for (q, n, d) in [(2u32, 4usize, 2usize), (2, 5, 2), (3, 3, 1), (3, 3, 2), (2, 3, 3)] {
        assert_eq!(BigUint::from(brute_subspace_count(q, n, d)), qbinom(q as u64, n as u64, d as u64));
    }
    assert_eq!(qbinom(2, 4, 2), BigUint::from(35u32));
    assert_eq!(qbinom(2, 9, 5), BigUint::from(3_309_747u32));
    assert_eq!(qbinom(8, 4, 2), BigUint::from(4745u32));
}

fn rank_mod(q: u8, m: usize, n: usize, mut a: [[u8; 4]; 4]) -> usize {
    let inv = |x: u8| -> u8 { (1..q).find(|y| (x as u32 * *y as u32) % q as u32 == 1).unwrap() };
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        let iv = inv(a[r][c]);
        for j in 0..n {
            a[r][j] = ((a[r][j] as u32 * iv as u32) % q as u32) as u8;
        }
        for i in 0..m {
            if i != r && a[i][c] != 0 {
                let fct = a[i][c] as u32;
                for j in 0..n {
                    a[i][j] = ((a[i][j] as u32 + (q as u32 - fct) * a[r][j] as u32) % q as u32) as u8;
                }
            }
        }
        r += 1;
    }
    r
}

#[test]
fn rank_distribution_matches_brute_force() {
    for q in [2u8, 3] {
        for m in 1..=4usize {
            for n in 1..=4usize {
                let cells = m * n;
                let total = (q as u64).pow(cells as u32);
                let mut counts = [0u64; 5];
                for mut x in 0..total {
                    let mut a = [[0u8; 4]; 4];
                    for c in 0..cells {
                        a[c / n][c % n] = (x % q as u64) as u8;
                        x /= q as u64;
                    }
                    counts[rank_mod(q, m, n, a)] += 1;
                }
                for (r, &cnt) in counts.iter().enumerate().take(m.min(n) + 1) {
                    let formula = qdelta(q as u64, m as u64, r as u64) * qbinom(q as u64, n as u64, r as u64);
                    assert_eq!(formula, BigUint::from(cnt), "q={q} m={m} n={n} r={r}");
                }
            }
        }
    }
}

#[test]
fn pascal_consistency() {
    for q in [2u64, 3, 4, 5] {
        for n in 1..=10u64 {
            for r in 1..=n {
                let lhs = qbinom(q, n, r) * (BigUint::from(q).pow(r as u32) - 1u32);
                let rhs = qbinom(q, n - 1, r - 1) * (BigUint::from(q).pow(n as u32) - 1u32);
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn small_census_values() {
    let t = Arc::new(FieldTower::standard(2, 1, 2).unwrap());
    let rep = census_codes(&t, 3, 2, &CensusOptions { rs: vec![1], ..Default::default() }).unwrap();
    assert_eq!((rep.total.as_str(), rep.minimal[&1].as_str(), rep.non_minimal[&1].as_str()), ("21", "14", "7"));
    assert_eq!(rep.weights[&2], "7");
    // non-minimal codes by direct weight inspection: d_2 <= m
    let en = SubspaceEnumerator::new(4, 3, 2).unwrap();
    let bad = en.iter().filter(|rows| grw(&RankCode::new(t.clone(), 3, rows).unwrap(), 2).unwrap() <= 2).count();
    assert_eq!(bad, 7);
}

/// The closed-form count of r-minimal [n, r+1] codes against census on every
/// case with at most 10^6 codes.
#[test]
fn count_formula_matches_census() {
    let mut cases = 0;
    for (p, m) in [(2u32, 2u32), (2, 3), (3, 2), (2, 4)] {
        let t = Arc::new(FieldTower::standard(p, 1, m).unwrap());
        let qm = t.qm() as u64;
        for r in 1..=2usize {
            for n in r + 1..=8 {
                if qbinom(qm, n as u64, r as u64 + 1) > BigUint::from(1_000_000u32) {
                    break;
                }
                let rep = census_codes(&t, n, r + 1, &CensusOptions { rs: vec![r], ..Default::default() }).unwrap();
                let formula = count_r_minimal(p as u64, m as u64, n as u64, r as u64).unwrap();
                assert_eq!(rep.minimal[&r], formula.to_string(), "GF({qm}) n={n} r={r}");
                cases += 1;
            }
        }
    }
    assert!(cases >= 10);
}
