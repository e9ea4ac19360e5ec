use xorlab::games::bounds::{conjectured_value_chsh_n, upper_bound_chsh_n, TSIRELSON};
use xorlab::games::strategy::correlations;
use xorlab::games::{
    canonical_chsh_strategy, evaluate, make_chsh, make_chsh_n, make_chsh_tensor, seesaw,
    tensor_power,
};
use xorlab::sdp::npa1_value;

#[test]
fn canonical_strategy_is_non_signalling() {
    let s = canonical_chsh_strategy();
    let p = correlations(&s);
    // p[x][y][a][b]: Bob's marginal must not depend on x.
    for y in 0..2 {
        for b in 0..2 {
            let m0: f64 = (0..2).map(|a| p[0][y][a][b]).sum();
            let m1: f64 = (0..2).map(|a| p[1][y][a][b]).sum();
            assert!((m0 - m1).abs() < 1e-12);
        }
    }
}

#[test]
fn tensor_powers_multiply() {
    for n in 1..=3 {
        let v = evaluate(
            &make_chsh_tensor(n),
            &tensor_power(&canonical_chsh_strategy(), n).unwrap(),
        )
        .unwrap();
        assert!((v - TSIRELSON.powi(n as i32)).abs() < 1e-12, "n = {n}: {v}");
    }
}

#[test]
fn seesaw_history_never_decreases() {
    let r = seesaw(&make_chsh(), 2, 5, 100, 3).unwrap();
    for w in r.history.windows(2) {
        assert!(w[1] >= w[0] - 1e-12, "{:?}", r.history);
    }
    assert!(r.value >= 0.8535);
}

#[test]
fn seesaw_stays_below_relaxation() {
    for n in 1..=2 {
        let game = make_chsh_n(n);
        let lower = seesaw(&game, 4, 4, 100, 0).unwrap().value;
        let upper = npa1_value(&game, 1e-7).unwrap();
        assert!(lower <= upper + 1e-6, "n = {n}: {lower} > {upper}");
        assert!(upper <= upper_bound_chsh_n(n) + 1e-6);
        assert!(upper >= conjectured_value_chsh_n(n) - 1e-3);
    }
}

#[test]
fn seesaw_is_reproducible() {
    let a = seesaw(&make_chsh_n(2), 4, 3, 50, 42).unwrap();
    let b = seesaw(&make_chsh_n(2), 4, 3, 50, 42).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.restart, b.restart);
}
