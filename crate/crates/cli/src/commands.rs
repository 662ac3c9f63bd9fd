use std::path::Path;

use serde::{Deserialize, Serialize};
use trapwalk_core::criticality::{
    classify_with_budget, series_bound_lower_diverges, series_bound_upper_within, CriticalityReport, SeriesBound,
};
use trapwalk_core::exact_engine::{expected_survival, SurvivalResult};
use trapwalk_core::landscape::{LandscapeFile, RecursionParams};
use trapwalk_core::mc_sim::{simulate as run_sim, Mode, SimConfig, SurvivalEstimate};
use trapwalk_core::monotonicity::{
    compare_recursive_pair, compute_split_stats, decompose_trajectory, example_trajectory, find_counterexample,
    nonmono_condition_rhs, survival_via_split, verify_lemma52, Counterexample, InsertionReport,
    RecursivePairComparison, SearchSpace, SplitStats, TrajectoryDecomposition,
};
use trapwalk_core::path_enumerator::{enumerate_k, prob_a_kappa, verify_lemma41_bounds, BoundReport, KappaSequence};
use trapwalk_core::trajectory::{replay as replay_path, End, Trajectory};
use trapwalk_core::{rational, Error};

use crate::error::CliError;
use crate::input::{self, read_file};
use crate::output::{opt, CsvRow};
use crate::{ModeArg, Source};

/// Histories grow roughly like `3^i`; beyond this the listing is not useful.
pub const ENUMERATE_MAX: usize = 16;

#[derive(Serialize)]
pub struct GenOutput {
    pub intervals: Vec<String>,
    pub wall: Option<String>,
    pub last_trap: String,
    pub i1: Option<String>,
    pub c: Option<String>,
    pub m: Option<String>,
    /// Each interval equals its closed form.
    pub closed_form_agrees: Option<bool>,
}

pub fn gen(source: &Source, budget: u64) -> Result<GenOutput, CliError> {
    if let (None, Some(i1), Some(c)) = (&source.landscape, source.i1, &source.c) {
        let n = source
            .n
            .ok_or_else(|| CliError::invalid("--n is required with --i1/--c"))?;
        let (params, generated) = input::recursion(i1, c, n, budget)?;
        let ls = source.load(budget)?;
        let file = ls.to_file();
        return Ok(GenOutput {
            intervals: file.intervals,
            wall: file.wall,
            last_trap: ls.last_trap().to_string(),
            i1: Some(params.i1.to_string()),
            c: Some(rational::format(&params.c)),
            m: Some(generated.m.to_string()),
            closed_form_agrees: Some(generated.closed_form.as_slice() == generated.landscape.intervals()),
        });
    }
    let ls = source.load(budget)?;
    let file = ls.to_file();
    Ok(GenOutput {
        intervals: file.intervals,
        wall: file.wall,
        last_trap: ls.last_trap().to_string(),
        i1: None,
        c: None,
        m: None,
        closed_form_agrees: None,
    })
}

#[derive(Serialize)]
pub struct ClassifyOutput {
    #[serde(flatten)]
    pub report: CriticalityReport,
    pub series_upper: Option<SeriesBound>,
    pub lower_series_diverges: bool,
}

pub fn classify(i1: u64, c: &str, imax: usize, max_shift: usize, budget: u64) -> Result<ClassifyOutput, CliError> {
    let params = RecursionParams::new(i1, input::parse_c(c)?, 1);
    let report = classify_with_budget(&params, max_shift, budget)?;
    let series_upper = match series_bound_upper_within(&params, imax, max_shift, budget) {
        Ok(b) => Some(b),
        Err(Error::Divergent { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(ClassifyOutput {
        report,
        series_upper,
        lower_series_diverges: series_bound_lower_diverges(&params)?,
    })
}

#[derive(Serialize)]
pub struct ExpectOutput {
    pub landscape: LandscapeFile,
    #[serde(flatten)]
    pub result: SurvivalResult,
    pub expected_tau_approx: f64,
}

pub fn expect(source: &Source, budget: u64) -> Result<ExpectOutput, CliError> {
    let ls = source.load_walled(budget)?;
    let result = expected_survival(&ls)?;
    Ok(ExpectOutput {
        landscape: ls.to_file(),
        expected_tau_approx: rational::to_f64(&result.expected_tau),
        result,
    })
}

pub struct SimRequest {
    pub seed: u64,
    pub paths: u64,
    pub workers: usize,
    pub mode: ModeArg,
    pub step_cap: Option<u64>,
}

#[derive(Serialize)]
pub struct SimulateOutput {
    pub landscape: LandscapeFile,
    #[serde(flatten)]
    pub estimate: SurvivalEstimate,
}

pub fn simulate(source: &Source, req: &SimRequest, budget: u64) -> Result<SimulateOutput, CliError> {
    let ls = source.load_walled(budget)?;
    let mode = match req.mode {
        ModeArg::Site => Mode::SiteLevel,
        ModeArg::Trap => Mode::TrapLevel,
    };
    let mut cfg = SimConfig::new(req.seed, req.paths, req.workers, mode);
    if let Some(cap) = req.step_cap {
        cfg.step_cap = cap;
    }
    Ok(SimulateOutput {
        landscape: ls.to_file(),
        estimate: run_sim(&ls, &cfg)?,
    })
}

#[derive(Serialize)]
pub struct EnumerateRow {
    pub i: usize,
    pub kappa: KappaSequence,
    pub prob: Option<String>,
}

impl CsvRow for EnumerateRow {
    const HEADERS: &'static [&'static str] = &["i", "kappa", "prob"];

    fn record(&self) -> Vec<String> {
        let kappa: Vec<String> = self.kappa.entries().iter().map(i8::to_string).collect();
        vec![self.i.to_string(), kappa.join(" "), opt(&self.prob)]
    }
}

#[derive(Serialize)]
pub struct EnumerateOutput<'a> {
    pub imax: usize,
    pub rows: &'a [EnumerateRow],
}

pub fn enumerate(imax: usize, source: &Source, budget: u64) -> Result<Vec<EnumerateRow>, CliError> {
    if imax == 0 {
        return Err(CliError::invalid("--imax must be at least 1"));
    }
    if imax > ENUMERATE_MAX {
        return Err(CliError::Budget(format!("--imax limited to {ENUMERATE_MAX}")));
    }
    let ls = if source.is_given() {
        Some(source.load(budget)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for i in 1..=imax {
        for kappa in enumerate_k(i)? {
            let prob = match &ls {
                Some(ls) => Some(rational::format(&prob_a_kappa(ls, &kappa)?)),
                None => None,
            };
            rows.push(EnumerateRow { i, kappa, prob });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
pub struct VerifyBoundsOutput {
    pub i1: String,
    pub c: String,
    pub imax: usize,
    pub sequences_checked: usize,
    pub violations: usize,
    pub all_hold: bool,
    pub checks: BoundReport,
}

pub fn verify_bounds(
    i1: u64,
    c: &str,
    imax: usize,
    n: Option<usize>,
    budget: u64,
) -> Result<VerifyBoundsOutput, CliError> {
    if imax == 0 {
        return Err(CliError::invalid("--imax must be at least 1"));
    }
    let (params, generated) = input::recursion(i1, c, n.unwrap_or(imax + 1), budget)?;
    let report = verify_lemma41_bounds(&generated.landscape, &params.c, imax)?;
    let violations = report.violations().len();
    Ok(VerifyBoundsOutput {
        i1: params.i1.to_string(),
        c: rational::format(&params.c),
        imax,
        sequences_checked: report.sequences_checked(),
        violations,
        all_hold: violations == 0,
        checks: report,
    })
}

#[derive(Serialize)]
pub struct SplitOutput {
    pub landscape: LandscapeFile,
    pub split: SplitStats,
    pub expected_tau: String,
    pub survival_via_split: String,
    pub identity_holds: bool,
    /// Right-hand side of the condition under which one more site in
    /// `I_k` shortens survival.
    pub nonmono_rhs: String,
    /// Present when `I_k` exists, i.e. the split is not at the last trap.
    pub insertion: Option<InsertionReport>,
}

#[derive(Serialize)]
pub struct SearchOutput {
    pub witness: Counterexample,
    pub recursive_pair: RecursivePairComparison,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum MonotonicityOutput {
    Split(Box<SplitOutput>),
    Search(Box<SearchOutput>),
}

pub fn monotonicity(
    source: &Source,
    k: Option<usize>,
    search_i1: u64,
    search_i3: u64,
    budget: u64,
) -> Result<MonotonicityOutput, CliError> {
    match (source.is_given(), k) {
        (true, Some(k)) => {
            let ls = source.load_walled(budget)?;
            let split = compute_split_stats(&ls, k)?;
            let direct = expected_survival(&ls)?.expected_tau;
            let via = survival_via_split(&split)?;
            let insertion = if k <= ls.interval_count() {
                Some(verify_lemma52(&ls, k)?)
            } else {
                None
            };
            Ok(MonotonicityOutput::Split(Box::new(SplitOutput {
                landscape: ls.to_file(),
                nonmono_rhs: rational::format(&nonmono_condition_rhs(&split)),
                split,
                expected_tau: rational::format(&direct),
                survival_via_split: rational::format(&via),
                identity_holds: via == direct,
                insertion,
            })))
        }
        (false, None) => {
            let space = SearchSpace {
                b1: search_i1,
                b3: search_i3,
                ..SearchSpace::default()
            };
            let witness = find_counterexample(&space)?;
            let sparse = RecursionParams::new(4, rational::rat(1, 2), 6);
            let dense = RecursionParams::new(1, rational::int(2), 6);
            Ok(MonotonicityOutput::Search(Box::new(SearchOutput {
                witness,
                recursive_pair: compare_recursive_pair(&sparse, &dense)?,
            })))
        }
        (true, None) => Err(CliError::invalid("--k is required with a landscape")),
        (false, Some(_)) => Err(CliError::invalid("--k requires a landscape")),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TrajectoryFile {
    Sites { sites: Vec<u64>, end: End },
    TurningPoints { turning_points: Vec<u64>, end: End },
}

#[derive(Serialize)]
pub struct ReplayOutput {
    pub landscape: LandscapeFile,
    pub tau: u64,
    pub steps: usize,
    pub end: End,
    pub decomposition: Option<TrajectoryDecomposition>,
}

pub fn replay(
    source: &Source,
    trajectory: Option<&Path>,
    example: bool,
    k: Option<usize>,
    budget: u64,
) -> Result<ReplayOutput, CliError> {
    let (ls, traj, k) = if example {
        let (ls, traj) = example_trajectory();
        let ls = match &source.wall {
            Some(w) => ls.with_wall(Some(input::parse_nat(w, "--wall")?))?,
            None => ls,
        };
        (ls, traj, Some(k.unwrap_or(3)))
    } else {
        let path = trajectory.ok_or_else(|| CliError::invalid("--trajectory is required"))?;
        let file: TrajectoryFile = serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError::invalid(format!("bad trajectory file: {e}")))?;
        let traj = match file {
            TrajectoryFile::Sites { sites, end } => Trajectory::new(sites, end),
            TrajectoryFile::TurningPoints { turning_points, end } => {
                Trajectory::from_turning_points(&turning_points, end)
            }
        };
        (source.load(budget)?, traj, k)
    };
    let tau = replay_path(&ls, &traj)?;
    let decomposition = match k {
        Some(k) => Some(decompose_trajectory(&traj, &ls, k)?),
        None => None,
    };
    Ok(ReplayOutput {
        landscape: ls.to_file(),
        tau,
        steps: traj.sites.len().saturating_sub(1),
        end: traj.end.expect("constructed with an end"),
        decomposition,
    })
}
