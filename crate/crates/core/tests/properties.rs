use proptest::prelude::*;

use xorlab::encodings::random::{random_encoding, random_xor_hiding_encoding};
use xorlab::encodings::{
    hides_xor, learn_value_prob, theorem1_check, weighted_decoding_bound, Target,
};
use xorlab::games::bounds::TSIRELSON;
use xorlab::protocols::{secure_ot_ceiling, tensor_power_value, CeilingMode};
use xorlab::quantum::random::{derived_rng, haar_projector, haar_state, haar_unitary};
use xorlab::sequential::{sandwich_check, Sequential};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn learning_is_unitarily_invariant(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = derived_rng(seed, 0);
        let enc = random_encoding(1, dim, &mut rng).unwrap();
        let u = haar_unitary(dim, &mut rng);
        let rotated = enc.conjugate(&u);
        for target in [Target::First, Target::Second, Target::Xor] {
            let a = learn_value_prob(&enc, target, 1e-8).unwrap().value;
            let b = learn_value_prob(&rotated, target, 1e-8).unwrap().value;
            prop_assert!((a - b).abs() < 1e-6, "{target:?}: {a} vs {b}");
        }
    }

    #[test]
    fn sandwich_bounds_are_symmetric(seed in any::<u64>(), dim in 2usize..7) {
        let mut rng = derived_rng(seed, 1);
        let psi = haar_state(dim, &mut rng);
        let rc = 1 + (seed as usize) % dim;
        let rd = 1 + (seed as usize / 7) % dim;
        let c = haar_projector(dim, rc, &mut rng).unwrap();
        let d = haar_projector(dim, rd, &mut rng).unwrap();
        let cd = Sequential::measure(&psi, &c, &d).unwrap();
        prop_assume!(cd.in_regime());
        let a = sandwich_check(&psi, &c, &d).unwrap();
        let b = sandwich_check(&psi, &d, &c).unwrap();
        prop_assert!((a.lower - b.lower).abs() < 1e-12);
        prop_assert!((a.upper - b.upper).abs() < 1e-12);
        prop_assert!(a.pass && b.pass);
    }

    #[test]
    fn tensor_ceiling_is_a_power(n in 1usize..12) {
        let one = secure_ot_ceiling(1, CeilingMode::Tensor).unwrap();
        let v = secure_ot_ceiling(n, CeilingMode::Tensor).unwrap();
        prop_assert_eq!(v, tensor_power_value(one, n));
        prop_assert!((v - TSIRELSON.powi(n as i32)).abs() < 1e-15);
        if n > 1 {
            prop_assert!(v < secure_ot_ceiling(n - 1, CeilingMode::Tensor).unwrap());
        }
    }

    #[test]
    fn hiding_encodings_respect_weighted_bound(seed in any::<u64>(), local_dim in 2usize..4, q in 0.0f64..=1.0) {
        let mut rng = derived_rng(seed, 2);
        let enc = random_xor_hiding_encoding(1, local_dim, &mut rng).unwrap();
        let p0 = learn_value_prob(&enc, Target::First, 1e-8).unwrap().value;
        let p1 = learn_value_prob(&enc, Target::Second, 1e-8).unwrap().value;
        prop_assert!(q * p0 + (1.0 - q) * p1 <= weighted_decoding_bound(q).unwrap() + 1e-6);
    }

    #[test]
    fn hiding_caps_average_decoding(seed in any::<u64>(), local_dim in 2usize..4) {
        let mut rng = derived_rng(seed, 3);
        let enc = random_xor_hiding_encoding(1, local_dim, &mut rng).unwrap();
        prop_assert!(hides_xor(&enc, 1e-8).unwrap());
        let report = theorem1_check(&enc, 1e-8).unwrap();
        prop_assert!(report.c <= TSIRELSON + 1e-6, "c = {}", report.c);
    }

    #[test]
    fn optimal_xor_beats_sequential(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = derived_rng(seed, 4);
        let enc = random_encoding(1, dim, &mut rng).unwrap();
        let report = theorem1_check(&enc, 1e-8).unwrap();
        let seq = report.p_xor_sequential.unwrap();
        prop_assert!(report.p_xor_optimal >= seq - 1e-9, "{} < {seq}", report.p_xor_optimal);
        prop_assert!(report.theorem1_ok, "{:?}", report.checks);
    }
}
