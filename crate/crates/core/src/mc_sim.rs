//! Monte Carlo estimates of `E(tau)`.
//!
//! Site mode steps the walk literally. Trap mode samples only the
//! trap-to-trap chain and adds the exact conditional mean duration of each
//! sampled transition, which keeps the mean and lowers the variance.
//!
//! Every path draws from its own ChaCha stream keyed by
//! `(seed, worker, path)`, and per-worker sums are merged in worker order, so
//! a fixed `(seed, worker_count)` reproduces results bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_engine::{sojourn_table, Destination};
use crate::landscape::Landscape;
use crate::rational;

pub use crate::trajectory::{replay, End, Trajectory};

pub const DEFAULT_STEP_CAP: u64 = 100_000_000;
/// Largest span stepped site by site.
pub const SITE_SPAN_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SiteLevel,
    TrapLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: u64,
    pub worker_count: usize,
    pub mode: Mode,
    pub step_cap: u64,
}

impl SimConfig {
    pub fn new(seed: u64, n_paths: u64, worker_count: usize, mode: Mode) -> Self {
        Self {
            seed,
            n_paths,
            worker_count,
            mode,
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidLandscape("n_paths must be at least 1".into()));
        }
        if self.worker_count == 0 {
            return Err(Error::InvalidLandscape("worker_count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
    pub n: u64,
    pub mode: Mode,
    pub seed: u64,
    pub workers: usize,
    /// Fraction of deaths at each trap index (site mode only).
    pub death_histogram: Option<Vec<f64>>,
    pub wall_fraction: f64,
    /// Visits to traps and deaths there (site mode only).
    pub trap_visits: u64,
    pub trap_deaths: u64,
    /// Paths stopped at the step cap; when nonzero the mean is biased low.
    pub censored: u64,
    pub biased_low: bool,
}

#[derive(Debug, Clone, Default)]
struct Partial {
    n: u64,
    mean: f64,
    m2: f64,
    walls: u64,
    censored: u64,
    trap_visits: u64,
    trap_deaths: u64,
    deaths_at: Vec<u64>,
}

impl Partial {
    fn with_traps(n_traps: usize) -> Self {
        Self {
            deaths_at: vec![0; n_traps],
            ..Self::default()
        }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(mut self, other: &Partial) -> Partial {
        if other.n > 0 {
            let n = self.n + other.n;
            let d = other.mean - self.mean;
            self.mean += d * other.n as f64 / n as f64;
            self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
            self.n = n;
        }
        self.walls += other.walls;
        self.censored += other.censored;
        self.trap_visits += other.trap_visits;
        self.trap_deaths += other.trap_deaths;
        for (a, b) in self.deaths_at.iter_mut().zip(&other.deaths_at) {
            *a += b;
        }
        self
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn path_rng(seed: u64, worker: usize, path: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = splitmix64(seed ^ splitmix64(worker as u64));
    for chunk in key.chunks_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path);
    rng
}

fn run_workers<F>(cfg: &SimConfig, n_traps: usize, path_fn: F) -> Partial
where
    F: Fn(&mut ChaCha8Rng, &mut Partial) + Sync,
{
    let w = cfg.worker_count as u64;
    let partials: Vec<Partial> = (0..cfg.worker_count)
        .into_par_iter()
        .map(|worker| {
            let lo = cfg.n_paths * worker as u64 / w;
            let hi = cfg.n_paths * (worker as u64 + 1) / w;
            let mut acc = Partial::with_traps(n_traps);
            for path in lo..hi {
                let mut rng = path_rng(cfg.seed, worker, path);
                path_fn(&mut rng, &mut acc);
            }
            acc
        })
        .collect();
    partials
        .iter()
        .fold(Partial::with_traps(n_traps), |acc, p| acc.merge(p))
}

fn finish(cfg: &SimConfig, p: Partial, histogram: bool) -> SurvivalEstimate {
    let variance = if p.n > 1 { p.m2 / (p.n - 1) as f64 } else { 0.0 };
    let deaths: u64 = p.deaths_at.iter().sum();
    SurvivalEstimate {
        mean: p.mean,
        stderr: (variance / p.n as f64).sqrt(),
        variance,
        n: p.n,
        mode: cfg.mode,
        seed: cfg.seed,
        workers: cfg.worker_count,
        death_histogram: histogram.then(|| {
            p.deaths_at
                .iter()
                .map(|&d| if deaths > 0 { d as f64 / deaths as f64 } else { 0.0 })
                .collect()
        }),
        wall_fraction: p.walls as f64 / p.n as f64,
        trap_visits: p.trap_visits,
        trap_deaths: p.trap_deaths,
        censored: p.censored,
        biased_low: p.censored > 0,
    }
}

/// Steps the walk site by site until death, the wall, or the step cap.
pub fn simulate_site(ls: &Landscape, cfg: &SimConfig) -> Result<SurvivalEstimate> {
    cfg.validate()?;
    if !ls.is_walled() {
        return Err(Error::WallRequired);
    }
    let traps = ls.small_trap_positions(SITE_SPAN_LIMIT)?;
    let wall = ls.small_span(SITE_SPAN_LIMIT)?;
    let cap = cfg.step_cap;
    let p = run_workers(cfg, traps.len(), |rng, acc| {
        let mut x = 0u64;
        let mut t = 0u64;
        loop {
            if t >= cap {
                acc.censored += 1;
                break;
            }
            t += 1;
            match traps.binary_search(&x) {
                Ok(idx) => {
                    acc.trap_visits += 1;
                    let u: u8 = rng.random_range(0..3);
                    if u == 0 {
                        acc.trap_deaths += 1;
                        acc.deaths_at[idx] += 1;
                        break;
                    }
                    x = if x == 0 || u == 2 { x + 1 } else { x - 1 };
                }
                Err(_) => {
                    x = if rng.random::<bool>() { x + 1 } else { x - 1 };
                }
            }
            if x == wall {
                acc.walls += 1;
                break;
            }
        }
        acc.push(t as f64);
    });
    Ok(finish(cfg, p, true))
}

struct BranchF {
    dest: Destination,
    cum: f64,
    duration: f64,
}

/// Samples the trap-to-trap chain and adds exact conditional durations.
pub fn simulate_traplevel(ls: &Landscape, cfg: &SimConfig) -> Result<SurvivalEstimate> {
    cfg.validate()?;
    let table = sojourn_table(ls)?;
    let rows: Vec<Vec<BranchF>> = table
        .rows
        .iter()
        .map(|row| {
            let mut cum = 0.0;
            row.branches
                .iter()
                .map(|b| {
                    cum += rational::to_f64(&b.prob);
                    BranchF {
                        dest: b.dest,
                        cum,
                        duration: rational::to_f64(&b.duration),
                    }
                })
                .collect()
        })
        .collect();
    let n_traps = rows.len();
    let p = run_workers(cfg, n_traps, |rng, acc| {
        let mut i = 0usize;
        let mut total = 0.0f64;
        let mut hops = 0u64;
        loop {
            if hops >= cfg.step_cap {
                acc.censored += 1;
                break;
            }
            hops += 1;
            let row = &rows[i];
            let u: f64 = rng.random::<f64>() * row.last().map_or(1.0, |b| b.cum);
            let b = row
                .iter()
                .find(|b| u < b.cum)
                .unwrap_or_else(|| row.last().expect("nonempty row"));
            total += b.duration;
            match b.dest {
                Destination::Death => break,
                Destination::Wall => {
                    acc.walls += 1;
                    break;
                }
                Destination::Left => i -= 1,
                Destination::Right => i += 1,
                Destination::StayViaLeft | Destination::StayViaRight => {}
            }
        }
        acc.push(total);
    });
    Ok(finish(cfg, p, false))
}

pub fn simulate(ls: &Landscape, cfg: &SimConfig) -> Result<SurvivalEstimate> {
    match cfg.mode {
        Mode::SiteLevel => simulate_site(ls, cfg),
        Mode::TrapLevel => simulate_traplevel(ls, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::expected_survival;

    fn exact(ls: &Landscape) -> f64 {
        rational::to_f64(&expected_survival(ls).unwrap().expected_tau)
    }

    #[test]
    fn all_trap_segment_site() {
        let ls = Landscape::from_lengths(&[1; 40], Some(41)).unwrap();
        let est = simulate_site(&ls, &SimConfig::new(1, 100_000, 4, Mode::SiteLevel)).unwrap();
        assert!((est.mean - 3.0).abs() < 3.0 * est.stderr, "{est:?}");
        let h = est.death_histogram.unwrap();
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_exact_small() {
        for (lens, wall) in [(vec![2u64], 4u64), (vec![3, 4, 5], 13)] {
            let ls = Landscape::from_lengths(&lens, Some(wall)).unwrap();
            let e = exact(&ls);
            for mode in [Mode::SiteLevel, Mode::TrapLevel] {
                let est = simulate(&ls, &SimConfig::new(11, 40_000, 3, mode)).unwrap();
                assert!((est.mean - e).abs() < 3.0 * est.stderr, "{mode:?} {est:?} vs {e}");
            }
        }
    }

    #[test]
    fn bitwise_reproducible() {
        let ls = Landscape::from_lengths(&[3, 4, 5], Some(13)).unwrap();
        for mode in [Mode::SiteLevel, Mode::TrapLevel] {
            let cfg = SimConfig::new(99, 5_000, 4, mode);
            let a = simulate(&ls, &cfg).unwrap();
            let b = simulate(&ls, &cfg).unwrap();
            assert_eq!(a.mean.to_bits(), b.mean.to_bits());
            assert_eq!(a.variance.to_bits(), b.variance.to_bits());
            let c = simulate(&ls, &SimConfig::new(99, 5_000, 7, mode)).unwrap();
            assert!((a.mean - c.mean).abs() < 4.0 * (a.stderr.powi(2) + c.stderr.powi(2)).sqrt());
        }
    }

    #[test]
    fn huge_interval_trap_level() {
        let ls = Landscape::from_lengths(&[3, 1_000_000], Some(1_000_010)).unwrap();
        let est = simulate_traplevel(&ls, &SimConfig::new(5, 20_000, 2, Mode::TrapLevel)).unwrap();
        assert!(est.mean.is_finite() && est.mean > 0.0);
        assert_eq!(est.censored, 0);
        let moderate = Landscape::from_lengths(&[3, 1_000], Some(1_010)).unwrap();
        let est = simulate_traplevel(&moderate, &SimConfig::new(5, 400_000, 4, Mode::TrapLevel)).unwrap();
        let e = exact(&moderate);
        assert!((est.mean - e).abs() < 4.0 * est.stderr, "{} vs {e}", est.mean);
    }

    #[test]
    fn death_rate_per_visit() {
        let ls = Landscape::from_lengths(&[2, 3, 4], Some(12)).unwrap();
        let est = simulate_site(&ls, &SimConfig::new(3, 50_000, 4, Mode::SiteLevel)).unwrap();
        let n = est.trap_visits as f64;
        let rate = est.trap_deaths as f64 / n;
        let sd = (1.0 / 3.0 * 2.0 / 3.0 / n).sqrt();
        assert!((rate - 1.0 / 3.0).abs() < 4.0 * sd, "rate {rate}");
    }

    #[test]
    fn censoring_is_reported() {
        let ls = Landscape::from_lengths(&[50], Some(100)).unwrap();
        let mut cfg = SimConfig::new(2, 200, 1, Mode::SiteLevel);
        cfg.step_cap = 5;
        let est = simulate_site(&ls, &cfg).unwrap();
        assert!(est.censored > 0 && est.biased_low);
    }

    #[test]
    fn config_errors() {
        let ls = Landscape::from_lengths(&[2], Some(4)).unwrap();
        assert!(simulate_site(&ls, &SimConfig::new(1, 0, 1, Mode::SiteLevel)).is_err());
        assert!(simulate_site(&ls, &SimConfig::new(1, 10, 0, Mode::SiteLevel)).is_err());
        let open = Landscape::from_lengths(&[2], None).unwrap();
        assert_eq!(
            simulate_traplevel(&open, &SimConfig::new(1, 10, 1, Mode::TrapLevel)).unwrap_err(),
            Error::WallRequired
        );
    }
}
