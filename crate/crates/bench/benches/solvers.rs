use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use xorlab::encodings::random::random_encoding;
use xorlab::encodings::{learn_value_prob, Target};
use xorlab::games::{make_chsh, make_chsh_n, seesaw};
use xorlab::quantum::random::derived_rng;
use xorlab::sdp::{npa1, npa1_full};
use xorlab::sequential::{run_sweep, SweepConfig};

fn npa(c: &mut Criterion) {
    let chsh2 = make_chsh_n(2);
    c.bench_function("npa1 chsh_2", |b| {
        b.iter(|| npa1(black_box(&chsh2), 1e-7).unwrap())
    });
    let chsh = make_chsh();
    c.bench_function("npa1 full chsh", |b| {
        b.iter(|| npa1_full(black_box(&chsh), 1e-7).unwrap())
    });
}

fn discrimination(c: &mut Criterion) {
    let mut rng = derived_rng(1, 0);
    let enc = random_encoding(2, 4, &mut rng).unwrap();
    c.bench_function("learn pair, n=2 d=4", |b| {
        b.iter(|| learn_value_prob(black_box(&enc), Target::Pair, 1e-7).unwrap())
    });
}

fn seesaw_chsh(c: &mut Criterion) {
    let mut g = c.benchmark_group("seesaw");
    g.sample_size(10);
    let chsh = make_chsh();
    g.bench_function("chsh d=2", |b| {
        b.iter(|| seesaw(black_box(&chsh), 2, 4, 100, 0).unwrap())
    });
    let chsh2 = make_chsh_n(2);
    g.bench_function("chsh_2 d=4", |b| {
        b.iter(|| seesaw(black_box(&chsh2), 4, 2, 100, 0).unwrap())
    });
    g.finish();
}

fn sandwich(c: &mut Criterion) {
    let config = SweepConfig {
        seed: 0,
        dims: vec![4],
        samples: 1000,
        shards: 4,
    };
    let mut g = c.benchmark_group("sandwich");
    g.sample_size(10);
    g.bench_function("1000 samples d=4", |b| {
        b.iter(|| run_sweep(black_box(&config), |_| {}).unwrap())
    });
    g.finish();
}

criterion_group!(benches, npa, discrimination, seesaw_chsh, sandwich);
criterion_main!(benches);
