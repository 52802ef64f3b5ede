use proptest::prelude::*;
use rankmin::combinatorics::{omega_bounds, qbinom};
use rankmin::linalg::{flatten_subspace, Subspace, SubspaceEnumerator};
use rankmin::rank_metric::{grw_sequence, rank_support, RankCode};
use rankmin::search::{merge_shards, scan_cutting, scan_shard, verify_certificate, Certificate, CertificateKind};
use rankmin::{FieldTower, Gf};
use std::sync::Arc;

fn tower(m: u32) -> Arc<FieldTower> {
    Arc::new(FieldTower::standard(2, 1, m).unwrap())
}

fn gf(q: u32) -> Gf {
    if q == 4 {
        FieldTower::standard(2, 1, 2).unwrap().e_field().clone()
    } else {
        Gf::prime(q).unwrap()
    }
}

fn rows_strategy(q: u32, n: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    prop::collection::vec(prop::collection::vec(0..q, n), 0..=max_rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn span_is_canonical(rows in rows_strategy(4, 4, 4), perm in Just(()).prop_perturb(|_, mut r| r.next_u64()), c in 1u32..4) {
        let f = gf(4);
        let a = Subspace::span(&f, 4, &rows);
        let mut shuffled = rows.clone();
        let k = shuffled.len();
        if k > 1 {
            shuffled.rotate_left((perm % k as u64) as usize);
        }
        let scaled: Vec<Vec<u32>> = shuffled.iter().map(|v| v.iter().map(|&x| f.mul(c, x)).collect()).collect();
        prop_assert_eq!(Subspace::span(&f, 4, &scaled), a);
    }

    #[test]
    fn dual_reverses_inclusion_and_is_involutive(rows in rows_strategy(3, 4, 3), extra in rows_strategy(3, 4, 2)) {
        let f = gf(3);
        let a = Subspace::span(&f, 4, &rows);
        let mut all = rows.clone();
        all.extend(extra);
        let b = Subspace::span(&f, 4, &all);
        prop_assert!(a.is_subspace_of(&f, &b));
        prop_assert!(b.dual(&f).is_subspace_of(&f, &a.dual(&f)));
        prop_assert_eq!(a.dual(&f).dual(&f), a.clone());
        prop_assert_eq!(a.dim() + a.dual(&f).dim(), 4);
    }

    #[test]
    fn dimension_formula(x in rows_strategy(2, 6, 4), y in rows_strategy(2, 6, 4)) {
        let f = gf(2);
        let a = Subspace::span(&f, 6, &x);
        let b = Subspace::span(&f, 6, &y);
        let s = a.sum(&f, &b).unwrap();
        let i = a.intersect(&f, &b).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
        prop_assert!(i.is_subspace_of(&f, &a) && i.is_subspace_of(&f, &b));
    }

    #[test]
    fn enumeration_rank_roundtrip(n in 0usize..7, d in 0usize..7, seed in any::<u64>()) {
        let d = d.min(n);
        let en = SubspaceEnumerator::new(2, n, d).unwrap();
        let idx = (seed as u128) % en.total();
        let basis = en.unrank(idx);
        prop_assert_eq!(en.rank_of(&basis), Some(idx));
        prop_assert_eq!(basis.len(), d);
    }

    #[test]
    fn rank_support_is_scale_invariant(alpha in prop::collection::vec(0u32..8, 1..5), c in 1u32..8) {
        let t = tower(3);
        let scaled: Vec<u32> = alpha.iter().map(|&x| t.e_field().mul(c, x)).collect();
        prop_assert_eq!(rank_support(&t, &scaled), rank_support(&t, &alpha));
    }

    #[test]
    fn grw_strictly_increasing(rows in rows_strategy(8, 4, 3)) {
        let t = tower(3);
        let c = RankCode::new(t, 4, &rows).unwrap();
        let d = grw_sequence(&c).unwrap();
        prop_assert!(d.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(d[c.k()], c.weight());
    }

    #[test]
    fn flattening_multiplies_dimension(rows in rows_strategy(4, 3, 3)) {
        let t = tower(2);
        let v = Subspace::span(t.e_field(), 3, &rows);
        prop_assert_eq!(flatten_subspace(&t, &v).dim(), 2 * v.dim());
    }

    #[test]
    fn omega_bounds_are_consistent(m in 1u64..8, k in 1u64..8, r in 0u64..7) {
        prop_assume!(r < k);
        let b = omega_bounds(m, k, r).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.upper <= m * r + k * (r + 1) - r * r - 2 * r);
        if let Some(e) = b.exact {
            prop_assert!(b.lower == e && b.upper == e);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shard_merge_is_order_and_count_independent(shards in 1usize..9, rot in 0usize..9, d in 3usize..6) {
        let t = tower(2);
        let full = scan_cutting(&t, 3, 1, d, 0, u128::MAX).unwrap();
        let mut reps: Vec<_> = (0..shards).map(|i| scan_shard(&t, 3, 1, d, shards, i, 1).unwrap()).collect();
        reps.rotate_left(rot % shards);
        let merged = merge_shards(&reps).unwrap();
        prop_assert_eq!(merged.witness_index, full.witness.as_ref().map(|w| w.0.to_string()));
        prop_assert_eq!(merged.exhausted, full.witness.is_none());
        prop_assert_eq!(merged.total, qbinom(2, 6, d as u64).to_string());
    }

    #[test]
    fn witnesses_reverify(d in 4usize..7, start_frac in 0u32..4) {
        let t = tower(2);
        let total = SubspaceEnumerator::new(2, 6, d).unwrap().total();
        let start = total * start_frac as u128 / 4;
        let out = scan_cutting(&t, 3, 1, d, start, total).unwrap();
        if let Some((idx, u)) = out.witness {
            let cert = Certificate {
                schema: rankmin::search::CERTIFICATE_SCHEMA.into(),
                kind: CertificateKind::Witness,
                field: t.spec(),
                enumeration_order: rankmin::linalg::ENUMERATION_ORDER.into(),
                k: 3,
                r: 1,
                dimension: d,
                visited: out.visited.to_string(),
                total: None,
                counterexample_free: None,
                witness_index: Some(idx.to_string()),
                witness: Some(u),
                code: None,
                symmetry_reduction: "none".into(),
            };
            prop_assert!(verify_certificate(&cert, false).unwrap());
        }
    }
}
