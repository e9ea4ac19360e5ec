//! Bounds on the CHSH_n value side by side.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::games::bounds::{conjectured_value_chsh_n, upper_bound_chsh_n};
use crate::games::game::make_chsh_n;
use crate::games::seesaw::seesaw;
use crate::games::strategy::{deterministic_strategy, evaluate};
use crate::sdp::npa::npa1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub n_max: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub tol: f64,
    /// Largest local dimension tried by the see-saw.
    pub max_local_dim: usize,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            n_max: 5,
            restarts: 20,
            iters: 300,
            seed: 0,
            tol: 1e-7,
            max_local_dim: 8,
        }
    }
}

/// A solver-backed cell: the value, or the reason it is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Value(f64),
    Fail(String),
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            Cell::Fail(_) => None,
        }
    }
}

impl<E: std::fmt::Display> From<std::result::Result<f64, E>> for Cell {
    fn from(r: std::result::Result<f64, E>) -> Self {
        match r {
            Ok(v) => Cell::Value(v),
            Err(e) => Cell::Fail(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableColumn {
    pub n: usize,
    pub lower: f64,
    pub seesaw: Cell,
    pub seesaw_dim: usize,
    pub npa1: Cell,
    pub our_bound: f64,
    pub conjectured: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub config: TableConfig,
    pub columns: Vec<TableColumn>,
}

/// Value of the shared-randomness guessing strategy for CHSH_n, obtained
/// by evaluating each deterministic branch: Alice answers `r`, Bob answers
/// `r` on `y = 0` and `g` on `y = 1`, with `(r, g)` uniform.
pub fn guessing_strategy_value(n: usize) -> Result<f64> {
    let game = make_chsh_n(n);
    let k = 1usize << n;
    let mut total = 0.0;
    for r in 0..k {
        for g in 0..k {
            let s = deterministic_strategy(&game, &vec![r; k], &[r, g])?;
            total += evaluate(&game, &s)?;
        }
    }
    Ok(total / (k * k) as f64)
}

/// See-saw dimension used for CHSH_n: a qubit for `n = 1`, otherwise the
/// cap.
pub fn table_local_dim(n: usize, cap: usize) -> usize {
    if n == 1 {
        2
    } else {
        cap.max(2)
    }
}

pub fn column(n: usize, config: &TableConfig) -> Result<TableColumn> {
    let game = make_chsh_n(n);
    let dim = table_local_dim(n, config.max_local_dim);
    Ok(TableColumn {
        n,
        lower: guessing_strategy_value(n)?,
        seesaw: seesaw(
            &game,
            dim,
            config.restarts,
            config.iters,
            config.seed.wrapping_add(n as u64),
        )
        .map(|r| r.value)
        .into(),
        seesaw_dim: dim,
        npa1: npa1(&game, config.tol).map(|r| r.value).into(),
        our_bound: upper_bound_chsh_n(n),
        conjectured: conjectured_value_chsh_n(n),
    })
}

pub fn chsh_table(config: &TableConfig) -> Result<Table> {
    let columns = (1..=config.n_max)
        .map(|n| column(n, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        config: config.clone(),
        columns,
    })
}

/// Rounds half away from zero at three decimals.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

impl Table {
    pub fn has_failures(&self) -> bool {
        self.columns
            .iter()
            .any(|c| matches!(c.seesaw, Cell::Fail(_)) || matches!(c.npa1, Cell::Fail(_)))
    }

    /// Rows in display order, each with one formatted cell per `n`.
    pub fn rows(&self) -> Vec<(&'static str, Vec<String>)> {
        let cell = |c: &Cell| c.value().map_or_else(|| "fail".to_string(), fmt3);
        vec![
            (
                "Lower Bound",
                self.columns.iter().map(|c| fmt3(c.lower)).collect(),
            ),
            (
                "See-saw",
                self.columns.iter().map(|c| cell(&c.seesaw)).collect(),
            ),
            (
                "SDP Relaxation",
                self.columns.iter().map(|c| cell(&c.npa1)).collect(),
            ),
            (
                "Our Bound",
                self.columns.iter().map(|c| fmt3(c.our_bound)).collect(),
            ),
            (
                "Conjectured Value",
                self.columns.iter().map(|c| fmt3(c.conjectured)).collect(),
            ),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("Value");
        for c in &self.columns {
            let _ = write!(out, ",n={}", c.n);
        }
        out.push('\n');
        for (name, cells) in self.rows() {
            out.push_str(name);
            for c in cells {
                out.push(',');
                out.push_str(&c);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let mut out = format!("{:width$}", "Value");
        for c in &self.columns {
            let _ = write!(out, "  {:>6}", format!("n={}", c.n));
        }
        out.push('\n');
        for (name, cells) in rows {
            let _ = write!(out, "{name:width$}");
            for c in cells {
                let _ = write!(out, "  {c:>6}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(fmt3(0.5625), "0.563");
        assert_eq!(fmt3(0.515625), "0.516");
        assert_eq!(fmt3(0.853553), "0.854");
        assert_eq!(fmt3(1.0), "1.000");
    }

    #[test]
    fn guessing_strategy_matches_formula() {
        for n in 1..=3 {
            let v = guessing_strategy_value(n).unwrap();
            assert!(
                (v - (0.5 + 0.5f64.powi(n as i32 + 1))).abs() < 1e-12,
                "{n}: {v}"
            );
        }
    }

    #[test]
    fn single_column_csv() {
        let config = TableConfig {
            n_max: 1,
            restarts: 4,
            ..TableConfig::default()
        };
        let t = chsh_table(&config).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("Value,n=1\nLower Bound,0.750\n"), "{csv}");
        assert!(csv.contains("Our Bound,1.000\n"));
        assert!(csv.contains("SDP Relaxation,0.854\n"));
        assert_eq!(csv, chsh_table(&config).unwrap().to_csv());
    }
}
