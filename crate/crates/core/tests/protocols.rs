use xorlab::encodings::canonical_bbbw_encoding;
use xorlab::encodings::random::random_xor_hiding_encoding;
use xorlab::games::bounds::TSIRELSON;
use xorlab::protocols::{
    bc_from_ot, coinflip_from_ot, ot_cheat_probs, ot_from_encoding, ot_suite, BoundMode, OtMode,
};
use xorlab::quantum::random::derived_rng;
use xorlab::Error;

#[test]
fn bbbw_transfer_has_tsirelson_correctness() {
    let ot = ot_from_encoding(&canonical_bbbw_encoding(), OtMode::Bit, 1e-8).unwrap();
    assert!((ot.honest_p - TSIRELSON).abs() < 1e-9);
    assert!(ot.output_bias < 1e-12);
    let cheats = ot_cheat_probs(&ot, 1e-8).unwrap();
    assert!((cheats.a_ot - 0.5).abs() < 1e-12);
    assert_eq!(cheats.theorem2_ok, Some(true));
}

#[test]
fn string_transfers_skip_the_bit_theorem() {
    let mut rng = derived_rng(5, 0);
    let enc = random_xor_hiding_encoding(2, 2, &mut rng).unwrap();
    let ot = ot_from_encoding(&enc, OtMode::String, 1e-8).unwrap();
    let cheats = ot_cheat_probs(&ot, 1e-8).unwrap();
    assert_eq!(cheats.theorem2_ok, None);
    assert!(matches!(
        coinflip_from_ot(&ot, 1e-8),
        Err(Error::Unsupported(_))
    ));
    let bc = bc_from_ot(&ot, BoundMode::String, 1e-8).unwrap();
    assert!(bc.b_bc_bound >= 0.5 && bc.b_bc_bound <= 1.0);
}

#[test]
fn bit_mode_rejects_strings() {
    let mut rng = derived_rng(5, 1);
    let enc = random_xor_hiding_encoding(2, 2, &mut rng).unwrap();
    assert!(ot_from_encoding(&enc, OtMode::Bit, 1e-8).is_err());
}

#[test]
fn suite_is_deterministic() {
    let a = ot_suite(3, 3, 1e-7).unwrap();
    let b = ot_suite(3, 3, 1e-7).unwrap();
    assert!(a.pass);
    assert_eq!(a.checks, b.checks);
}
