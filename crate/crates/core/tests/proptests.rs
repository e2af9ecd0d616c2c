mod common;

use common::{cocycle_i, random_walk, rng};
use linkforge::catalog::random_instance;
use linkforge::coloring::enumerate_colorings;
use linkforge::group::builtin_sigma3;
use linkforge::moves::{parse_log, serialize_log};
use linkforge::reduce::{classify, parse_trace, serialize_trace};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn i_agrees_with_cocycle(n in 1usize..=12, seed in any::<u64>()) {
        let (d, psi) = random_instance(n, seed).unwrap();
        prop_assert_eq!(classify(&d, &psi).unwrap().i, cocycle_i(&d, &psi));
    }

    #[test]
    fn a_single_walk_conserves_i(n in 1usize..=8, seed in any::<u64>(), steps in 1usize..=8) {
        let (d, psi) = random_instance(n, seed).unwrap();
        let (d2, p2, _) = random_walk(&d, &psi, steps, n + 4, &mut rng(seed));
        prop_assert_eq!(classify(&d, &psi).unwrap().i, classify(&d2, &p2).unwrap().i);
    }

    #[test]
    fn logs_roundtrip(n in 1usize..=8, seed in any::<u64>()) {
        let (d, psi) = random_instance(n, seed).unwrap();
        let (_, _, moves) = random_walk(&d, &psi, 10, n + 4, &mut rng(seed ^ 1));
        prop_assert_eq!(parse_log(&serialize_log(&moves)).unwrap(), moves);
        let r = classify(&d, &psi).unwrap();
        prop_assert_eq!(parse_trace(&serialize_trace(&r.trace)).unwrap(), r.trace);
    }

    #[test]
    fn rounds_strictly_decrease(n in 1usize..=16, seed in any::<u64>()) {
        let (d, psi) = random_instance(n, seed).unwrap();
        let r = classify(&d, &psi).unwrap();
        prop_assert!(r.rounds.iter().all(|&(b, a)| a < b));
        prop_assert_eq!(r.terminal.0.num_crossings(), 0);
    }

    #[test]
    fn tricoloring_counts_are_powers_of_3(n in 1usize..=8, seed in any::<u64>()) {
        let (g, s) = builtin_sigma3();
        let (d, _) = random_instance(n, seed).unwrap();
        let mut k = enumerate_colorings(&d, &g, &s).unwrap().len();
        while k > 1 && k.is_multiple_of(3) { k /= 3; }
        prop_assert_eq!(k, 1);
    }
}
