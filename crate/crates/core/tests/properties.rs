use num_bigint::BigInt;
use proptest::prelude::*;
use reidemeister_core::oracle::{brute_fixed_points, oracle_spectrum};
use reidemeister_core::spectra::{
    product_number, reidemeister_witness, spec_p, spec_r_abelian, spec_r_pgroup, witness,
    witness_abelian,
};
use reidemeister_core::{
    abc_decompose, AbelianGroupType, EndoMatrix, EnumBudget, Factored, IntMatrix, PGroupType,
};

/// Integer matrix valid for type `e`: entries below the diagonal are
/// multiplied up to the required power of `p`.
fn valid_matrix(p: u64, e: &[u32], raw: &[i64]) -> IntMatrix {
    let n = e.len();
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let shift = e[i].saturating_sub(e[j]);
            m[(i, j)] = BigInt::from(raw[i * n + j]) * BigInt::from(p.pow(shift));
        }
    }
    m
}

fn block_diag(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.rows() + b.rows();
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m[(i, j)] = a[(i, j)].clone();
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m[(a.rows() + i, a.rows() + j)] = b[(i, j)].clone();
        }
    }
    m
}

fn split_case() -> impl Strategy<Value = (u64, Vec<u32>, Vec<u32>, Vec<i64>, Vec<i64>)> {
    (
        prop_oneof![Just(2u64), Just(3), Just(5)],
        prop::collection::vec(1u32..=2, 1..=2),
        prop::collection::vec(2u32..=3, 1..=2),
    )
        .prop_flat_map(|(p, mut lo, mut hi)| {
            lo.sort_unstable();
            hi.sort_unstable();
            let (a, b) = (lo.len() * lo.len(), hi.len() * hi.len());
            (
                Just(p),
                Just(lo),
                Just(hi),
                prop::collection::vec(-30i64..30, a),
                prop::collection::vec(-30i64..30, b),
            )
        })
}

proptest! {
    #[test]
    fn product_number_multiplies_over_blocks((p, lo, hi, ra, rb) in split_case()) {
        let ga = PGroupType::new(p, lo.clone()).unwrap();
        let gb = PGroupType::new(p, hi.clone()).unwrap();
        let a = EndoMatrix::new(&ga, valid_matrix(p, &lo, &ra)).unwrap();
        let b = EndoMatrix::new(&gb, valid_matrix(p, &hi, &rb)).unwrap();
        let whole_type = PGroupType::new(p, lo.iter().chain(&hi).copied().collect()).unwrap();
        let whole = EndoMatrix::new(&whole_type, block_diag(a.matrix(), b.matrix())).unwrap();
        prop_assert_eq!(
            whole.fixed_point_count(),
            &a.fixed_point_count() * &b.fixed_point_count()
        );
        prop_assume!(a.is_automorphism() && b.is_automorphism());
        prop_assert_eq!(
            product_number(&whole).unwrap(),
            &product_number(&a).unwrap() * &product_number(&b).unwrap()
        );
    }

    #[test]
    fn abelian_spectrum_is_filtered_divisor_set(orders in prop::collection::vec(2u64..=40, 0..=3)) {
        let a = AbelianGroupType::new(orders).unwrap();
        let n = a.order().to_u64().unwrap();
        let floor = abc_decompose(&a.sylow2()).lower_exponent();
        let expected: Vec<u64> = (1..=n)
            .filter(|d| n.is_multiple_of(*d) && u64::from(d.trailing_zeros()) >= floor)
            .collect();
        let got: Vec<u64> = spec_r_abelian(&a).values().map(|v| v.to_u64().unwrap()).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn abelian_witnesses_realise_targets(orders in prop::collection::vec(2u64..=30, 1..=3)) {
        let a = AbelianGroupType::new(orders).unwrap();
        let budget = EnumBudget::default();
        for target in spec_r_abelian(&a).values() {
            let ws = witness_abelian(&a, target).unwrap();
            let mut product = 1u64;
            for w in ws.values() {
                prop_assert!(w.is_automorphism());
                product *= brute_fixed_points(w, &budget).unwrap();
            }
            prop_assert_eq!(Factored::of_u64(product), target.clone());
        }
    }

    #[test]
    fn witnesses_cover_closed_forms(
        p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)],
        e in prop::collection::vec(1u32..=4, 0..=5),
    ) {
        let g = PGroupType::new(p, e).unwrap();
        for v in spec_p(&g).values() {
            let w = witness(&g, v.valuation(p)).unwrap();
            prop_assert!(w.is_automorphism());
            prop_assert_eq!(&product_number(&w).unwrap(), v);
        }
        for v in spec_r_pgroup(&g).values() {
            let w = reidemeister_witness(&g, v.valuation(p)).unwrap();
            prop_assert!(w.is_automorphism());
            prop_assert_eq!(&w.reidemeister_number(), v);
        }
    }
}

#[test]
fn coprime_product_law_on_sylow_oracles() {
    let budget = EnumBudget::default();
    for spec in ["4,3", "2,2,3", "8,5", "2,6,9", "4,25"] {
        let a: AbelianGroupType = spec.parse().unwrap();
        let product = a
            .sylow_components()
            .values()
            .map(|g| oracle_spectrum(g, false, &budget).unwrap())
            .fold(
                reidemeister_core::Spectrum::new([Factored::one()]),
                |acc, s| acc.product(&s),
            );
        assert_eq!(product, spec_r_abelian(&a), "{spec}");
    }
}
