use std::fs;
use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use xorlab::encodings::{
    canonical_bbbw_encoding, learning_sweep, LearningSweepConfig, XorEncoding,
};
use xorlab::protocols::{
    bc_from_ot, coinflip_from_ot, ot_cheat_probs, ot_from_encoding, ot_suite, ot_tradeoff_bound,
    secure_ot_ceiling, BoundMode, CeilingMode, OtMode,
};
use xorlab::sequential::{run_sweep, SweepConfig};
use xorlab::table::{chsh_table, TableConfig};
use xorlab::SCHEMA;

use crate::args::{
    BoundArg, CeilingArg, CfCommand, Cli, Command, EncodingArgs, Format, Mode, OtCommand,
};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] xorlab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialise report: {0}")]
    Json(#[from] serde_json::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(xorlab::Error::Solver { .. }) => 3,
            Failure::Core(xorlab::Error::Schema(_)) => 2,
            _ => 1,
        }
    }
}

/// How a finished command should end the process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NoConvergence,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::NoConvergence => 3,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn worst(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

impl PartialOrd for Verdict {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Verdict {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exit_code().cmp(&other.exit_code())
    }
}

struct Report {
    command: &'static str,
    result: Value,
    pretty: Option<String>,
    csv: Option<String>,
    verdict: Verdict,
}

impl Report {
    fn new(
        command: &'static str,
        result: impl Serialize,
        verdict: Verdict,
    ) -> Result<Self, Failure> {
        Ok(Report {
            command,
            result: serde_json::to_value(result)?,
            pretty: None,
            csv: None,
            verdict,
        })
    }

    fn envelope(&self, cli: &Cli) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "seed": cli.seed,
            "tol": cli.tol,
            "pass": self.verdict == Verdict::Pass,
            "result": self.result,
        })
    }

    fn write(&self, cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
        match cli.format {
            Format::Json => writeln!(out, "{}", serde_json::to_string(&self.envelope(cli))?)?,
            Format::Pretty => match &self.pretty {
                Some(text) => write!(out, "{text}")?,
                None => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&self.envelope(cli))?
                )?,
            },
            Format::Csv => match &self.csv {
                Some(text) => write!(out, "{text}")?,
                None => {
                    return Err(Failure::Usage(format!(
                        "{} has no CSV output",
                        self.command
                    )))
                }
            },
        }
        Ok(())
    }
}

fn load_encoding(source: &str) -> Result<XorEncoding, Failure> {
    if source == "bbbw" {
        return Ok(canonical_bbbw_encoding());
    }
    let text = fs::read_to_string(source)?;
    serde_json::from_str(&text).map_err(|e| Failure::Core(xorlab::Error::Schema(e.to_string())))
}

fn ot_mode(args: &EncodingArgs, enc: &XorEncoding) -> OtMode {
    match args.mode {
        Some(Mode::Bit) => OtMode::Bit,
        Some(Mode::String) => OtMode::String,
        Some(Mode::Tensor) => OtMode::Tensor,
        None if enc.n() == 1 => OtMode::Bit,
        None => OtMode::String,
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Verdict, Failure> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Table(_)) {
        return Err(Failure::Usage(
            "--format csv is only available for `table`".into(),
        ));
    }
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(Failure::Usage(format!(
            "--tol must lie in (0, 1), got {}",
            cli.tol
        )));
    }
    if let Command::VerifySandwich(a) = &cli.command {
        return verify_sandwich(cli, a, out);
    }
    let report = match &cli.command {
        Command::VerifySandwich(_) => unreachable!("handled above"),
        Command::VerifyLearning(a) => {
            let s = learning_sweep(&LearningSweepConfig {
                seed: cli.seed,
                bit_samples: a.bits,
                string_samples: a.strings,
                string_lengths: a.lengths.clone(),
                tol: cli.tol,
                ..LearningSweepConfig::default()
            })?;
            let verdict = Verdict::from_pass(s.pass);
            Report::new("verify-learning", s, verdict)?
        }
        Command::Table(a) => {
            let t = chsh_table(&TableConfig {
                n_max: a.n_max,
                restarts: a.restarts,
                iters: a.iters,
                seed: cli.seed,
                tol: cli.tol,
                max_local_dim: a.max_local_dim,
            })?;
            if a.n_max > 5 {
                eprintln!("warning: n_max > 5 can take a long time");
            }
            let verdict = if t.has_failures() {
                Verdict::NoConvergence
            } else {
                Verdict::Pass
            };
            let mut r = Report::new("table", &t, verdict)?;
            r.pretty = Some(t.to_pretty());
            r.csv = Some(t.to_csv());
            r
        }
        Command::Ot(sub) => ot(cli, sub)?,
        Command::Cf(CfCommand::Demo(a)) => {
            let enc = load_encoding(&a.encoding)?;
            let ot = ot_from_encoding(&enc, ot_mode(a, &enc), cli.tol)?;
            let cf = coinflip_from_ot(&ot, cli.tol)?;
            let verdict = Verdict::from_pass(cf.kitaev_ok);
            Report::new(
                "cf demo",
                json!({ "honest_p": ot.honest_p, "coinflip": cf }),
                verdict,
            )?
        }
        Command::All => all(cli)?,
    };
    report.write(cli, out)?;
    Ok(report.verdict)
}

fn verify_sandwich(
    cli: &Cli,
    a: &crate::args::SandwichArgs,
    out: &mut dyn Write,
) -> Result<Verdict, Failure> {
    let config = SweepConfig {
        seed: cli.seed,
        dims: a.dims.clone(),
        samples: a.samples,
        shards: a.shards,
    };
    let mut io_error = None;
    let summary = run_sweep(&config, |r| {
        if cli.format == Format::Json && io_error.is_none() {
            let line = serde_json::to_string(r).expect("records serialise");
            if let Err(e) = writeln!(out, "{line}") {
                io_error = Some(e);
            }
        }
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let verdict = Verdict::from_pass(summary.pass);
    let mut report = Report::new("verify-sandwich", &summary, verdict)?;
    let mut text = String::new();
    for d in &summary.dims {
        text.push_str(&format!(
            "dim {}: {} accepted ({:.1}%), {} sandwich / {} gamma / {} saturation violations, {} outside-regime failures\n",
            d.dim,
            d.accepted,
            100.0 * d.acceptance_rate,
            d.sandwich_violations,
            d.gamma_violations,
            d.saturation_failures,
            d.outside_regime_failures
        ));
    }
    report.pretty = Some(text);
    report.write(cli, out)?;
    Ok(verdict)
}

fn ot(cli: &Cli, sub: &OtCommand) -> Result<Report, Failure> {
    Ok(match sub {
        OtCommand::Demo(a) => {
            let enc = load_encoding(&a.encoding)?;
            let ot = ot_from_encoding(&enc, ot_mode(a, &enc), cli.tol)?;
            let equal = ot
                .per_choice
                .iter()
                .all(|p| (p - ot.honest_p).abs() <= 1e-9);
            Report::new("ot demo", &ot, Verdict::from_pass(equal))?
        }
        OtCommand::Cheats(a) => {
            let enc = load_encoding(&a.encoding)?;
            let ot = ot_from_encoding(&enc, ot_mode(a, &enc), cli.tol)?;
            let cheats = ot_cheat_probs(&ot, cli.tol)?;
            let bc_mode = if ot.mode == OtMode::Bit {
                BoundMode::Bit
            } else {
                BoundMode::String
            };
            let bc = bc_from_ot(&ot, bc_mode, cli.tol)?;
            let verdict = Verdict::from_pass(cheats.theorem2_ok != Some(false));
            Report::new(
                "ot cheats",
                json!({ "honest_p": ot.honest_p, "mode": ot.mode, "cheats": cheats, "commitment": bc }),
                verdict,
            )?
        }
        OtCommand::Bound { mode } => {
            let m = match mode {
                BoundArg::Bit => BoundMode::Bit,
                BoundArg::String => BoundMode::String,
            };
            Report::new("ot bound", ot_tradeoff_bound(m), Verdict::Pass)?
        }
        OtCommand::Ceiling { n, mode } => {
            let m = match mode {
                CeilingArg::String => CeilingMode::String,
                CeilingArg::Tensor => CeilingMode::Tensor,
            };
            let v = secure_ot_ceiling(*n, m)?;
            Report::new(
                "ot ceiling",
                json!({ "n": n, "mode": m, "ceiling": v }),
                Verdict::Pass,
            )?
        }
        OtCommand::Suite { instances } => {
            let s = ot_suite(cli.seed, *instances, cli.tol)?;
            for c in s.checks.iter().filter(|c| !c.ok) {
                eprintln!("failed: {} ({} vs {})", c.name, c.lhs, c.rhs);
            }
            let verdict = Verdict::from_pass(s.pass);
            Report::new("ot suite", s, verdict)?
        }
    })
}

fn all(cli: &Cli) -> Result<Report, Failure> {
    let sandwich = run_sweep(
        &SweepConfig {
            seed: cli.seed,
            ..SweepConfig::default()
        },
        |_| {},
    )?;
    let learning = learning_sweep(&LearningSweepConfig {
        seed: cli.seed,
        tol: cli.tol,
        ..LearningSweepConfig::default()
    })?;
    let table = chsh_table(&TableConfig {
        seed: cli.seed,
        tol: cli.tol,
        ..TableConfig::default()
    })?;
    let suite = ot_suite(cli.seed, 20, cli.tol)?;
    let cf = coinflip_from_ot(
        &ot_from_encoding(&canonical_bbbw_encoding(), OtMode::Bit, cli.tol)?,
        cli.tol,
    )?;
    let table_verdict = if table.has_failures() {
        Verdict::NoConvergence
    } else {
        Verdict::Pass
    };
    let verdict = Verdict::from_pass(sandwich.pass)
        .worst(Verdict::from_pass(learning.pass))
        .worst(table_verdict)
        .worst(Verdict::from_pass(suite.pass))
        .worst(Verdict::from_pass(cf.kitaev_ok));
    let learning_summary = json!({
        "bit_violations": learning.bit_violations,
        "string_violations": learning.string_violations,
        "samples": learning.records.len(),
        "pass": learning.pass,
    });
    let mut r = Report::new(
        "all",
        json!({
            "sandwich": sandwich,
            "learning": learning_summary,
            "table": table,
            "ot_suite": suite,
            "coinflip": cf,
        }),
        verdict,
    )?;
    r.pretty = Some(format!(
        "sandwich: {}\nlearning: {}\ntable:\n{}ot suite: {}\ncoin flip: {}\n",
        pass_word(sandwich.pass),
        pass_word(learning.pass),
        table.to_pretty(),
        pass_word(suite.pass),
        pass_word(cf.kitaev_ok)
    ));
    Ok(r)
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}
