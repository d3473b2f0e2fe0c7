mod common;

use common::*;
use mincodes::catalog;
use mincodes::codes::{apply_signed_perm, find_code_isomorphism, generate_cyclic_candidates, predicted_invariants, Code};
use mincodes::{Rational, SymMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rational::new(p, q))
}

fn sym_matrix() -> impl Strategy<Value = SymMatrix> {
    (1usize..=5).prop_flat_map(|n| proptest::collection::vec(rational(), n * (n + 1) / 2).prop_map(move |v| SymMatrix::from_packed(n, v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn watson_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(check_watson_identity(&mut rng), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ldlt_reconstructs(g in sym_matrix()) {
        prop_assert_eq!(check_ldlt(&g), Ok(()));
    }

    #[test]
    fn smith_chain(rows in (1usize..=5).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-9i64..=9, n), n))) {
        prop_assert_eq!(check_snf(&rows), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn lp_optimum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(check_lp(&mut rng), Ok(()));
    }

    // relabelling coordinates and flipping signs gives an equivalent code, and the search finds it
    #[test]
    fn equivalence_under_signed_perms(idx in 0usize..64, perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(), signs in proptest::collection::vec(any::<bool>(), 7)) {
        let types = generate_cyclic_candidates(7, 6);
        let t = &types[idx % types.len()];
        let c = Code::from_type(t, 7).unwrap();
        let signs: Vec<i64> = signs.iter().map(|&b| if b { -1 } else { 1 }).collect();
        let words = apply_signed_perm(c.generators(), &(perm, signs), 6);
        let d = Code::new(7, vec![6], words).unwrap();
        prop_assert!(find_code_isomorphism(&c, &d).is_some());
    }
}

#[test]
fn eutaxy_certificates() {
    for name in ["E8", "Lambda9", "L81", "L87", "L99", "T15", "D5", "A4"] {
        let g = catalog::by_name(name).unwrap();
        assert_eq!(check_eutaxy(&g), Ok(()), "{name}");
    }
}

#[test]
fn symmetrized_feasibility_agrees() {
    let n = check_symmetrize_agreement(7, 12).unwrap();
    assert!(n > 0);
}

#[test]
fn binary_formula_small() {
    for row in klein_four() {
        assert_eq!(predicted_invariants(&row.code()).unwrap(), (row.srs.0, row.srs.1));
    }
}
