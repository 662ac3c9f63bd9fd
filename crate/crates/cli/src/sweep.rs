//! Grid runs over `(I1, c)` for tables of verdicts, bounds and truncated
//! expectations.
//!
//! Config (JSON):
//!
//! ```json
//! {
//!   "i1": {"from": 3, "to": 8},
//!   "m": {"from": 1, "per_i1": 2},
//!   "n": 4,
//!   "wall_offset": 10,
//!   "mc_paths": 2000,
//!   "seed": 7
//! }
//! ```
//!
//! `m` gives `c = m / I1`; `c` lists scale factors directly instead. Either
//! grid may be a plain list.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trapwalk_core::criticality::{
    classify_with_budget, series_bound_lower_diverges, series_bound_upper_within, Verdict, DEFAULT_MAX_SHIFT,
};
use trapwalk_core::exact_engine::expected_survival;
use trapwalk_core::landscape::{generate_recursive, RecursionParams};
use trapwalk_core::mc_sim::{simulate, Mode, SimConfig};
use trapwalk_core::{rational, Error, Rational};

use crate::error::CliError;
use crate::input::read_file;
use crate::output::{opt, CsvRow};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<u64>),
    Range {
        from: u64,
        #[serde(default)]
        to: Option<u64>,
        /// Upper end `per_i1 * I1`; only meaningful for `m`.
        #[serde(default)]
        per_i1: Option<u64>,
    },
}

impl Grid {
    fn values(&self, i1: Option<u64>) -> Result<Vec<u64>, CliError> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range { from, to, per_i1 } => {
                let hi = match (to, per_i1, i1) {
                    (Some(t), None, _) => *t,
                    (None, Some(f), Some(i1)) => f.saturating_mul(i1),
                    (None, Some(_), None) => return Err(CliError::invalid("per_i1 is only allowed in the m grid")),
                    _ => return Err(CliError::invalid("a range needs exactly one of to, per_i1")),
                };
                Ok((*from..=hi).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub i1: Grid,
    #[serde(default)]
    pub m: Option<Grid>,
    #[serde(default)]
    pub c: Option<Vec<String>>,
    /// Intervals in the truncated landscape.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Wall distance beyond the last trap; no exact column without it.
    #[serde(default)]
    pub wall_offset: Option<u64>,
    /// Trap-level Monte Carlo paths per row; 0 disables the cross-check.
    #[serde(default)]
    pub mc_paths: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Terms in the partial sum of the upper series.
    #[serde(default = "default_imax")]
    pub imax: usize,
    #[serde(default = "default_max_shift")]
    pub max_shift: usize,
}

fn default_n() -> usize {
    4
}
fn default_workers() -> usize {
    1
}
fn default_imax() -> usize {
    10
}
fn default_max_shift() -> usize {
    DEFAULT_MAX_SHIFT
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub i1: u64,
    pub m: Option<u64>,
    pub c: String,
    pub verdict: Option<Verdict>,
    pub witness_shift: Option<usize>,
    pub upper_bound: Option<String>,
    pub upper_bound_shift: Option<usize>,
    pub lower_series_diverges: Option<bool>,
    pub wall: Option<String>,
    pub e_tau: Option<String>,
    pub e_tau_approx: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    /// `(mc_mean - e_tau) / mc_stderr`.
    pub mc_z: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(i1: u64, m: Option<u64>, c: String) -> Self {
        Self {
            i1,
            m,
            c,
            verdict: None,
            witness_shift: None,
            upper_bound: None,
            upper_bound_shift: None,
            lower_series_diverges: None,
            wall: None,
            e_tau: None,
            e_tau_approx: None,
            mc_mean: None,
            mc_stderr: None,
            mc_z: None,
            error: None,
        }
    }
}

impl CsvRow for SweepRow {
    const HEADERS: &'static [&'static str] = &[
        "i1",
        "m",
        "c",
        "verdict",
        "witness_shift",
        "upper_bound",
        "upper_bound_shift",
        "lower_series_diverges",
        "wall",
        "e_tau",
        "e_tau_approx",
        "mc_mean",
        "mc_stderr",
        "mc_z",
        "error",
    ];

    fn record(&self) -> Vec<String> {
        let verdict = self.verdict.map(|v| match v {
            Verdict::Finite => "finite",
            Verdict::Infinite => "infinite",
            Verdict::Indeterminate => "indeterminate",
        });
        vec![
            self.i1.to_string(),
            opt(&self.m),
            self.c.clone(),
            opt(&verdict),
            opt(&self.witness_shift),
            opt(&self.upper_bound),
            opt(&self.upper_bound_shift),
            opt(&self.lower_series_diverges),
            opt(&self.wall),
            opt(&self.e_tau),
            opt(&self.e_tau_approx),
            opt(&self.mc_mean),
            opt(&self.mc_stderr),
            opt(&self.mc_z),
            opt(&self.error),
        ]
    }
}

#[derive(Serialize)]
pub struct SweepOutput<'a> {
    pub rows: &'a [SweepRow],
}

struct Point {
    i1: u64,
    m: Option<u64>,
    c: Result<Rational, String>,
    c_text: String,
}

fn grid(cfg: &SweepConfig) -> Result<Vec<Point>, CliError> {
    if cfg.m.is_some() == cfg.c.is_some() {
        return Err(CliError::invalid("sweep config needs exactly one of m, c"));
    }
    let mut points = Vec::new();
    for i1 in cfg.i1.values(None)? {
        if let Some(m_grid) = &cfg.m {
            for m in m_grid.values(Some(i1))? {
                let c = if i1 == 0 {
                    Err("|I_1| must be at least 1".to_string())
                } else {
                    Ok(rational::rat(m as i64, i1 as i64))
                };
                let c_text = c.as_ref().map(rational::format).unwrap_or_else(|_| format!("{m}/{i1}"));
                points.push(Point {
                    i1,
                    m: Some(m),
                    c,
                    c_text,
                });
            }
        }
        for text in cfg.c.iter().flatten() {
            points.push(Point {
                i1,
                m: None,
                c: rational::parse(text).map_err(|e| e.to_string()),
                c_text: text.clone(),
            });
        }
    }
    Ok(points)
}

fn evaluate(cfg: &SweepConfig, p: &Point, index: usize, budget: u64) -> SweepRow {
    let mut row = SweepRow::empty(p.i1, p.m, p.c_text.clone());
    if let Err(e) = fill(cfg, p, index, budget, &mut row) {
        row.error = Some(e.to_string());
    }
    row
}

fn fill(cfg: &SweepConfig, p: &Point, index: usize, budget: u64, row: &mut SweepRow) -> Result<(), Error> {
    let c = p.c.clone().map_err(Error::Parse)?;
    let params = RecursionParams::new(p.i1, c, cfg.n);
    let report = classify_with_budget(&params, cfg.max_shift, budget)?;
    row.verdict = Some(report.verdict);
    row.witness_shift = report.witness_shift;
    row.lower_series_diverges = Some(series_bound_lower_diverges(&params)?);
    match series_bound_upper_within(&params, cfg.imax, cfg.max_shift, budget) {
        Ok(b) => {
            row.upper_bound = Some(rational::format(&b.bound));
            row.upper_bound_shift = Some(b.shift);
        }
        Err(Error::Divergent { .. }) => {}
        Err(e) => return Err(e),
    }
    let Some(offset) = cfg.wall_offset else {
        return Ok(());
    };
    if offset == 0 {
        return Err(Error::InvalidLandscape("wall_offset must be at least 1".into()));
    }
    let ls = generate_recursive(&params, budget)?.landscape;
    let ls = ls.with_wall(Some(ls.last_trap() + offset))?;
    let exact = expected_survival(&ls)?.expected_tau;
    let approx = rational::to_f64(&exact);
    row.wall = ls.wall().map(ToString::to_string);
    row.e_tau = Some(rational::format(&exact));
    row.e_tau_approx = Some(approx);
    if cfg.mc_paths > 0 {
        let seed = cfg.seed.wrapping_add(index as u64);
        let est = simulate(&ls, &SimConfig::new(seed, cfg.mc_paths, cfg.workers, Mode::TrapLevel))?;
        row.mc_mean = Some(est.mean);
        row.mc_stderr = Some(est.stderr);
        row.mc_z = (est.stderr > 0.0).then(|| (est.mean - approx) / est.stderr);
    }
    Ok(())
}

/// Rows in grid order; per-point failures become error rows.
pub fn run(cfg: &SweepConfig, budget: u64) -> Result<Vec<SweepRow>, CliError> {
    if cfg.workers == 0 {
        return Err(CliError::invalid("workers must be at least 1"));
    }
    let points = grid(cfg)?;
    Ok(points
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate(cfg, p, i, budget))
        .collect())
}

pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::invalid(format!("malformed sweep config: {e}")))
}

pub fn run_file(path: &Path, budget: u64) -> Result<Vec<SweepRow>, CliError> {
    run(&parse_config(&read_file(path)?)?, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> SweepConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn m_range_scales_with_i1() {
        let c = cfg(r#"{"i1": [2, 3], "m": {"from": 1, "per_i1": 2}}"#);
        let pts = grid(&c).unwrap();
        assert_eq!(pts.len(), 4 + 6);
        assert_eq!(pts[0].c_text, "1/2");
        assert_eq!(pts[9].c_text, "2/1");
    }

    #[test]
    fn exactly_one_of_m_c() {
        assert!(grid(&cfg(r#"{"i1": [2]}"#)).is_err());
        assert!(grid(&cfg(r#"{"i1": [2], "m": [1], "c": ["1"]}"#)).is_err());
        assert!(parse_config(r#"{"i1": [2], "m": [1], "bogus": 1}"#).is_err());
    }

    #[test]
    fn range_validation() {
        assert!(Grid::Range {
            from: 1,
            to: None,
            per_i1: None
        }
        .values(Some(2))
        .is_err());
        assert!(Grid::Range {
            from: 1,
            to: None,
            per_i1: Some(2)
        }
        .values(None)
        .is_err());
        assert_eq!(
            Grid::Range {
                from: 3,
                to: Some(5),
                per_i1: None
            }
            .values(None)
            .unwrap(),
            vec![3, 4, 5]
        );
    }

    #[test]
    fn bad_points_become_rows() {
        let c = cfg(r#"{"i1": [0, 2], "m": [0, 1, 3]}"#);
        let rows = run(&c, 1000).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows[..3].iter().all(|r| r.error.is_some()));
        assert!(rows[3].error.is_some(), "c = 0");
        assert_eq!(rows[5].verdict, Some(Verdict::Infinite));
    }
}
