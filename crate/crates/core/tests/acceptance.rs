//! Acceptance run. Prints one line per criterion and exits non-zero if any
//! gate fails. Soft targets are printed but never change the exit status.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use xorlab::encodings::random::random_xor_hiding_encoding;
use xorlab::encodings::weighted_decoding_bound;
use xorlab::encodings::{hides_xor, learn_value_prob, learning_sweep, LearningSweepConfig, Target};
use xorlab::games::{
    canonical_chsh_strategy, encoding_from_strategy, evaluate, make_chsh, make_chsh_n,
    make_chsh_tensor, make_weighted_chsh, seesaw, strategy_from_encoding, tensor_power,
};
use xorlab::protocols::{
    encoding_from_ot, ot_from_encoding, ot_suite, ot_tradeoff_bound, secure_ot_ceiling, BoundMode,
    CeilingMode, OtMode,
};
use xorlab::quantum::random::{derived_rng, random_density};
use xorlab::sdp::{discrimination, helstrom_value, npa1_value};
use xorlab::sequential::{run_sweep, SweepConfig};
use xorlab::table::{chsh_table, round3, Table, TableConfig};
use xorlab::XorEncoding;

use rand::Rng;

const TOL: f64 = 1e-7;

fn tsirelson() -> f64 {
    (PI / 8.0).cos().powi(2)
}

struct Line {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed.as_secs() < limit_secs
}

fn c_of(enc: &XorEncoding) -> f64 {
    let p0 = learn_value_prob(enc, Target::First, TOL).unwrap().value;
    let p1 = learn_value_prob(enc, Target::Second, TOL).unwrap().value;
    0.5 * (p0 + p1)
}

fn tsirelson_reproduction() -> Line {
    let start = Instant::now();
    let ss = seesaw(&make_chsh(), 2, 20, 300, 0).unwrap().value;
    let npa = npa1_value(&make_chsh(), TOL).unwrap();
    let canon = evaluate(&make_chsh(), &canonical_chsh_strategy()).unwrap();
    let t = start.elapsed();
    Line {
        pass: ss >= 0.8535
            && (0.8535..=0.8537).contains(&npa)
            && (canon - tsirelson()).abs() <= 1e-12
            && within(t, 60),
        detail: format!(
            "seesaw {ss:.6}, npa1 {npa:.6}, canonical error {:.1e}, {:.1}s",
            (canon - tsirelson()).abs(),
            t.as_secs_f64()
        ),
    }
}

fn sandwich_sweep() -> Line {
    let start = Instant::now();
    let summary = run_sweep(&SweepConfig::default(), |_| {}).unwrap();
    let t = start.elapsed();
    let dims: Vec<String> = summary
        .dims
        .iter()
        .map(|d| {
            format!(
                "d={} accepted {} ({:.0}%) sandwich {} gamma {} saturation {}",
                d.dim,
                d.accepted,
                100.0 * d.acceptance_rate,
                d.sandwich_violations,
                d.gamma_violations,
                d.saturation_failures
            )
        })
        .collect();
    let full = summary.dims.iter().all(|d| d.accepted == 10_000);
    Line {
        pass: summary.pass && full && within(t, 300),
        detail: format!("{}; {:.1}s", dims.join("; "), t.as_secs_f64()),
    }
}

fn learning_relations() -> Line {
    let start = Instant::now();
    let s = learning_sweep(&LearningSweepConfig::default()).unwrap();
    let t = start.elapsed();
    let strings_ok = s
        .records
        .iter()
        .filter(|r| r.n > 1)
        .all(|r| r.report.c >= 0.5);
    let bits = s.records.iter().filter(|r| r.n == 1).count();
    let strings = s.records.len() - bits;
    Line {
        pass: s.pass && strings_ok && bits == 200 && strings == 50 && within(t, 600),
        detail: format!(
            "{bits} bit encodings ({} violations), {strings} string encodings ({} violations), {:.1}s",
            s.bit_violations,
            s.string_violations,
            t.as_secs_f64()
        ),
    }
}

fn analytic_rows(table: &Table) -> Line {
    let ours = [1.000, 0.854, 0.750, 0.677, 0.625];
    let lower = [0.750, 0.625, 0.563, 0.531, 0.516];
    let got_ours: Vec<f64> = table.columns.iter().map(|c| round3(c.our_bound)).collect();
    let got_lower: Vec<f64> = table.columns.iter().map(|c| round3(c.lower)).collect();
    let same = |a: &[f64], b: &[f64]| {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    };
    Line {
        pass: same(&got_ours, &ours) && same(&got_lower, &lower),
        detail: format!(
            "our bound {got_ours:?}, lower bound {got_lower:?} (published table truncates to 0.562, 0.531, 0.515, 0.676)"
        ),
    }
}

fn solver_rows(table: &Table) -> Line {
    let published = [0.853, 0.780, 0.743, 0.725, 0.716];
    let mut pass = true;
    let mut cells = Vec::new();
    let mut stretch = true;
    let mut soft = Vec::new();
    for (c, want) in table.columns.iter().zip(published) {
        let (Some(ss), Some(npa)) = (c.seesaw.value(), c.npa1.value()) else {
            pass = false;
            cells.push(format!("n={} solver failure", c.n));
            continue;
        };
        if c.n == 1 {
            pass &= (0.8535..=0.8537).contains(&npa) && ss >= 0.8535;
        }
        pass &= ss <= npa + 1e-6 && npa <= 1.0 + 1e-9 && npa >= c.conjectured - 1e-3;
        stretch &= (npa - want).abs() <= 5e-3;
        if c.n == 2 || c.n == 3 {
            let hit = (ss - c.conjectured).abs() <= 1e-3;
            soft.push(format!(
                "n={} {}",
                c.n,
                if hit { "reached" } else { "missed" }
            ));
        }
        cells.push(format!("n={} seesaw {ss:.4} npa1 {npa:.4}", c.n));
    }
    Line {
        pass,
        detail: format!(
            "{}; published SDP row within 5e-3: {}; see-saw conjectured target (soft): {}",
            cells.join(", "),
            if stretch { "yes" } else { "no" },
            soft.join(", ")
        ),
    }
}

fn weighted_chsh() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, q) in [0.25, 0.5, 0.75].into_iter().enumerate() {
        let v = seesaw(&make_weighted_chsh(q).unwrap(), 2, 20, 300, i as u64)
            .unwrap()
            .value;
        let bound = weighted_decoding_bound(q).unwrap();
        pass &= bound - v <= 1e-3 && v <= bound + 1e-6;
        parts.push(format!("q={q}: {v:.6} vs {bound:.6}"));
    }
    Line {
        pass,
        detail: parts.join(", "),
    }
}

fn round_trips() -> Line {
    let mut worst_ot: f64 = 0.0;
    let mut worst_strategy: f64 = 0.0;
    let mut all_hide = true;
    for i in 0..20u64 {
        let mut rng = derived_rng(7, i);
        let n = 1 + (i % 2) as usize;
        let local_dim = 2 + ((i / 2) % 2) as usize;
        let enc = random_xor_hiding_encoding(n, local_dim, &mut rng).unwrap();
        all_hide &= hides_xor(&enc, 1e-8).unwrap();
        let c = c_of(&enc);

        let mode = if n == 1 { OtMode::Bit } else { OtMode::String };
        let ot = ot_from_encoding(&enc, mode, TOL).unwrap();
        worst_ot = worst_ot.max((ot.honest_p - c).abs());
        if n == 1 {
            let masked = encoding_from_ot(&ot).unwrap();
            all_hide &= hides_xor(&masked, 1e-8).unwrap();
            worst_ot = worst_ot.max((c_of(&masked) - c).abs());
        }

        let strat = strategy_from_encoding(&enc, 1e-8).unwrap();
        let game = make_chsh_n(n);
        worst_strategy = worst_strategy.max((evaluate(&game, &strat).unwrap() - c).abs());
        let back = encoding_from_strategy(&strat, &game).unwrap();
        all_hide &= hides_xor(&back, 1e-8).unwrap();
        worst_strategy = worst_strategy.max((c_of(&back) - c).abs());
    }
    Line {
        pass: worst_ot <= 1e-6 && worst_strategy <= 1e-6 && all_hide,
        detail: format!(
            "20 encodings: OT error {worst_ot:.1e}, strategy error {worst_strategy:.1e}, all outputs hide the XOR: {all_hide}"
        ),
    }
}

fn ot_bounds() -> Line {
    let bit = ot_tradeoff_bound(BoundMode::Bit).bound;
    let string = ot_tradeoff_bound(BoundMode::String).bound;
    let suite = ot_suite(0, 20, TOL).unwrap();
    let ceiling1 = secure_ot_ceiling(1, CeilingMode::String).unwrap();
    let powers = (1..=6).all(|n| {
        secure_ot_ceiling(n, CeilingMode::Tensor).unwrap() == (0..n).fold(1.0, |p, _| p * ceiling1)
    });
    let failed = suite.checks.iter().filter(|c| !c.ok).count();
    Line {
        pass: (bit - 0.599).abs() <= 5e-4
            && (string - 0.5852).abs() <= 5e-4
            && suite.pass
            && (ceiling1 - tsirelson()).abs() <= 1e-12
            && powers,
        detail: format!(
            "bit {bit:.5}, string {string:.5}, {} instance checks with {failed} failures, ceiling(1) {ceiling1:.12}, tensor powers exact: {powers}",
            suite.checks.len()
        ),
    }
}

fn oracle_equivalences() -> Line {
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = derived_rng(9, i);
        let dim = rng.random_range(2..=4);
        let ra = rng.random_range(1..=dim);
        let rb = rng.random_range(1..=dim);
        let a = random_density(dim, ra, &mut rng).unwrap();
        let b = random_density(dim, rb, &mut rng).unwrap();
        let p: f64 = rng.random_range(0.05..0.95);
        let sdp = discrimination(&[a.clone(), b.clone()], &[p, 1.0 - p], TOL)
            .unwrap()
            .value;
        let exact = helstrom_value(&a.matrix().scale_real(p), &b.matrix().scale_real(1.0 - p));
        worst = worst.max((sdp - exact).abs());
    }
    let tensor = evaluate(
        &make_chsh_tensor(2),
        &tensor_power(&canonical_chsh_strategy(), 2).unwrap(),
    )
    .unwrap();
    let tensor_err = (tensor - tsirelson().powi(2)).abs();
    Line {
        pass: worst <= 1e-6 && tensor_err <= 1e-12,
        detail: format!("discrimination vs Helstrom max error {worst:.1e}, CHSH^2 tensor error {tensor_err:.1e}"),
    }
}

fn main() -> ExitCode {
    let table_start = Instant::now();
    let table = chsh_table(&TableConfig::default()).unwrap();
    let table_secs = table_start.elapsed().as_secs_f64();

    let lines: Vec<(&str, Line)> = vec![
        ("tsirelson reproduction", tsirelson_reproduction()),
        ("sequential measurement sweep", sandwich_sweep()),
        ("learning relations sweep", learning_relations()),
        ("table analytic rows", analytic_rows(&table)),
        ("table solver rows", solver_rows(&table)),
        ("weighted CHSH", weighted_chsh()),
        ("reduction round trips", round_trips()),
        ("OT bounds", ot_bounds()),
        ("oracle equivalences", oracle_equivalences()),
    ];
    let mut ok = true;
    for (i, (name, line)) in lines.iter().enumerate() {
        ok &= line.pass;
        println!(
            "criterion {} [{}]: {}: {}",
            i + 1,
            name,
            if line.pass { "PASS" } else { "FAIL" },
            line.detail
        );
    }
    println!("table computed in {table_secs:.1}s");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
