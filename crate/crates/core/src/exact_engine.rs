//! Exact expected survival times via the trap-to-trap (embedded) chain.
//!
//! Between two traps the walk is a plain symmetric walk, so every excursion
//! away from a trap is described by gambler's-ruin quantities. Collapsing
//! each excursion into one semi-Markov transition leaves a chain on the
//! traps whose size is the trap count, independent of how long the
//! intervals are.
//!
//! Time conventions: every site-level step counts, including the final
//! step into the death state. Stepping onto the wall ends the walk (and
//! also counts as a step). All arithmetic is exact.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::linalg;
use crate::rational::{self, int, third, two_thirds, Rational};

fn check_order(alpha: &BigInt, beta: &BigInt, gamma: &BigInt) -> Result<()> {
    if alpha < beta && beta < gamma {
        Ok(())
    } else {
        Err(Error::BadOrdering {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            gamma: gamma.to_string(),
        })
    }
}

/// Probability that a symmetric walk started at `beta` hits `alpha` before `gamma`.
pub fn ruin_prob_left(alpha: &BigInt, beta: &BigInt, gamma: &BigInt) -> Result<Rational> {
    check_order(alpha, beta, gamma)?;
    Ok(Rational::new(gamma - beta, gamma - alpha))
}

/// Expected time for a symmetric walk started at `beta` to hit `alpha` or `gamma`.
pub fn exit_time(alpha: &BigInt, beta: &BigInt, gamma: &BigInt) -> Result<Rational> {
    check_order(alpha, beta, gamma)?;
    Ok(Rational::from_integer((beta - alpha) * (gamma - beta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Expected exit time conditioned on leaving through `side`.
///
/// With `N = gamma - alpha` and `k = beta - alpha` the conditional means are
/// `k(2N - k)/3` on the left and `(N^2 - k^2)/3` on the right.
pub fn cond_exit_time(alpha: &BigInt, beta: &BigInt, gamma: &BigInt, side: Side) -> Result<Rational> {
    check_order(alpha, beta, gamma)?;
    let n = gamma - alpha;
    let k = beta - alpha;
    let v = match side {
        Side::Left => &k * (BigInt::from(2) * &n - &k),
        Side::Right => &n * &n - &k * &k,
    };
    Ok(Rational::new(v, BigInt::from(3)))
}

/// One row of the embedded chain, conditioned on nothing: the masses sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRow {
    #[serde(with = "rational::serde_rational")]
    pub left: Rational,
    #[serde(with = "rational::serde_rational")]
    pub stay: Rational,
    #[serde(with = "rational::serde_rational")]
    pub right: Rational,
    #[serde(with = "rational::serde_rational")]
    pub wall: Rational,
    #[serde(with = "rational::serde_rational")]
    pub die: Rational,
}

impl KernelRow {
    pub fn total(&self) -> Rational {
        &self.left + &self.stay + &self.right + &self.wall + &self.die
    }

    pub fn survive(&self) -> Rational {
        &self.left + &self.stay + &self.right + &self.wall
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddedKernel {
    rows: Vec<KernelRow>,
    walled: bool,
}

impl EmbeddedKernel {
    /// Row for trap `i`. Without a wall the last trap has no row.
    pub fn row(&self, i: usize) -> Result<&KernelRow> {
        match self.rows.get(i) {
            Some(r) => Ok(r),
            None if !self.walled && i == self.rows.len() => Err(Error::WallRequired),
            None => Err(Error::IndexOutOfRange {
                what: "trap index",
                index: i,
                lo: 0,
                hi: self.rows.len().saturating_sub(1),
            }),
        }
    }

    pub fn rows(&self) -> &[KernelRow] {
        &self.rows
    }

    pub fn is_walled(&self) -> bool {
        self.walled
    }
}

/// Length of the stretch right of trap `i`, and whether it ends at the wall.
fn right_gap(ls: &Landscape, i: usize) -> Option<(BigUint, bool)> {
    if i < ls.interval_count() {
        Some((ls.interval(i + 1).clone(), false))
    } else {
        ls.wall().map(|w| (w - ls.last_trap(), true))
    }
}

fn first_step_right(i: usize) -> Rational {
    if i == 0 {
        two_thirds()
    } else {
        third()
    }
}

/// Kernel of the embedded chain from the closed-form hitting probabilities.
pub fn build_kernel(ls: &Landscape) -> EmbeddedKernel {
    let n_rows = if ls.is_walled() {
        ls.trap_count()
    } else {
        ls.interval_count()
    };
    let rows = (0..n_rows)
        .map(|i| {
            let left = if i == 0 {
                Rational::zero()
            } else {
                third() / rational::from_uint(ls.interval(i))
            };
            let (gap, to_wall) = right_gap(ls, i).expect("row exists only with a right gap");
            let out_right = first_step_right(i) / rational::from_uint(&gap);
            let (right, wall) = if to_wall {
                (Rational::zero(), out_right)
            } else {
                (out_right, Rational::zero())
            };
            let stay = two_thirds() - &left - &right - &wall;
            KernelRow {
                left,
                stay,
                right,
                wall,
                die: third(),
            }
        })
        .collect();
    EmbeddedKernel {
        rows,
        walled: ls.is_walled(),
    }
}

/// Where one visit to a trap leads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Destination {
    Death,
    Left,
    StayViaLeft,
    StayViaRight,
    Right,
    Wall,
}

/// A destination with its probability and the expected number of steps
/// spent getting there, conditioned on that destination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub dest: Destination,
    #[serde(with = "rational::serde_rational")]
    pub prob: Rational,
    #[serde(with = "rational::serde_rational")]
    pub duration: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SojournRow {
    pub branches: Vec<Branch>,
    /// Unconditional expected time of one visit, `sum prob * duration`.
    #[serde(with = "rational::serde_rational")]
    pub mean: Rational,
}

impl SojournRow {
    pub fn prob(&self, dest: Destination) -> Rational {
        self.branches
            .iter()
            .filter(|b| b.dest == dest)
            .map(|b| b.prob.clone())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SojournTable {
    pub rows: Vec<SojournRow>,
}

/// Splits an excursion into a gap of length `gap` entered one step away from
/// the trap at the gap's `from` end into (reach other end, return) branches.
fn excursion(step_prob: &Rational, gap: &BigUint, reach: Destination, back: Destination, leaving: Side) -> Vec<Branch> {
    if step_prob.is_zero() {
        return Vec::new();
    }
    if gap.is_one() {
        return vec![Branch {
            dest: reach,
            prob: step_prob.clone(),
            duration: Rational::one(),
        }];
    }
    let g = BigInt::from(gap.clone());
    let zero = BigInt::zero();
    // Coordinates inside the gap: the departing trap sits at `0` when leaving
    // right and at `g` when leaving left.
    let (beta, reach_side, back_side) = match leaving {
        Side::Right => (BigInt::one(), Side::Right, Side::Left),
        Side::Left => (&g - 1, Side::Left, Side::Right),
    };
    let p_left = ruin_prob_left(&zero, &beta, &g).expect("0 < beta < g");
    let p_reach = match reach_side {
        Side::Left => p_left.clone(),
        Side::Right => Rational::one() - &p_left,
    };
    let p_back = Rational::one() - &p_reach;
    let d_reach = cond_exit_time(&zero, &beta, &g, reach_side).expect("ordered");
    let d_back = cond_exit_time(&zero, &beta, &g, back_side).expect("ordered");
    vec![
        Branch {
            dest: reach,
            prob: step_prob * p_reach,
            duration: d_reach + Rational::one(),
        },
        Branch {
            dest: back,
            prob: step_prob * p_back,
            duration: d_back + Rational::one(),
        },
    ]
}

/// Per-trap visit decomposition. Needs a row for every trap, hence a wall.
pub fn sojourn_table(ls: &Landscape) -> Result<SojournTable> {
    if !ls.is_walled() {
        return Err(Error::WallRequired);
    }
    let rows = (0..ls.trap_count())
        .map(|i| {
            let mut branches = vec![Branch {
                dest: Destination::Death,
                prob: third(),
                duration: Rational::one(),
            }];
            if i > 0 {
                branches.extend(excursion(
                    &third(),
                    ls.interval(i),
                    Destination::Left,
                    Destination::StayViaLeft,
                    Side::Left,
                ));
            }
            let (gap, to_wall) = right_gap(ls, i).expect("walled");
            let reach = if to_wall { Destination::Wall } else { Destination::Right };
            branches.extend(excursion(
                &first_step_right(i),
                &gap,
                reach,
                Destination::StayViaRight,
                Side::Right,
            ));
            let mean = branches.iter().map(|b| &b.prob * &b.duration).sum();
            SojournRow { branches, mean }
        })
        .collect();
    Ok(SojournTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalResult {
    #[serde(with = "rational::serde_rational")]
    pub expected_tau: Rational,
    /// Expected number of visits to each trap.
    #[serde(with = "rational::serde_rational_vec")]
    pub visit_counts: Vec<Rational>,
    /// Expected duration of a single visit to each trap.
    #[serde(with = "rational::serde_rational_vec")]
    pub sojourn: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub death_probability: Rational,
    #[serde(with = "rational::serde_rational")]
    pub wall_probability: Rational,
    pub wall: String,
    pub trap_count: usize,
}

impl SurvivalResult {
    /// Expected number of trap visits.
    pub fn expected_visits(&self) -> Rational {
        self.visit_counts.iter().sum()
    }
}

/// Exact `E(tau)` for the walk started at the origin of a walled landscape.
pub fn expected_survival(ls: &Landscape) -> Result<SurvivalResult> {
    let wall = ls.wall().ok_or(Error::WallRequired)?.clone();
    let kernel = build_kernel(ls);
    let table = sojourn_table(ls)?;
    let n = ls.trap_count();

    // (I - K^T) V = e_0
    let mut a = vec![vec![Rational::zero(); n]; n];
    for (j, row) in a.iter_mut().enumerate() {
        row[j] = Rational::one();
    }
    for (i, r) in kernel.rows().iter().enumerate() {
        a[i][i] -= &r.stay;
        if i > 0 {
            a[i - 1][i] -= &r.left;
        }
        if i + 1 < n {
            a[i + 1][i] -= &r.right;
        }
    }
    let mut b = vec![Rational::zero(); n];
    b[0] = Rational::one();
    let visits = linalg::solve_fraction_free(&a, &b)?;

    let sojourn: Vec<Rational> = table.rows.iter().map(|r| r.mean.clone()).collect();
    let expected_tau = visits.iter().zip(&sojourn).map(|(v, w)| v * w).sum();
    let death_probability = visits.iter().sum::<Rational>() * third();
    let wall_probability = &visits[n - 1] * &kernel.rows()[n - 1].wall;
    Ok(SurvivalResult {
        expected_tau,
        visit_counts: visits,
        sojourn,
        death_probability,
        wall_probability,
        wall: wall.to_string(),
        trap_count: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstPassage {
    #[serde(with = "rational::serde_rational")]
    pub exit_prob: Rational,
    #[serde(with = "rational::serde_rational")]
    pub expected_time: Rational,
}

/// Probability of reaching `exits` before dying (or hitting the wall), and
/// the expected time until the first of exit, death or wall.
///
/// The walk is reduced onto the "special" sites (traps, exits, start, right
/// boundary); between neighbouring special sites it moves freely, so each
/// hop is one gambler's-ruin excursion. Interval lengths can be arbitrarily
/// large.
pub fn first_passage_stats(ls: &Landscape, start: &BigUint, exits: &[BigUint]) -> Result<FirstPassage> {
    if exits.contains(start) {
        return Ok(FirstPassage {
            exit_prob: Rational::one(),
            expected_time: Rational::zero(),
        });
    }
    let right_end = match (ls.wall(), exits.iter().max()) {
        (Some(w), _) => w.clone(),
        (None, Some(e)) if e > start => e.clone(),
        _ => {
            return Err(Error::ExitGeometry(
                "region right of start is unbounded (no wall and no exit to the right)".into(),
            ))
        }
    };
    if let Some(e) = exits.iter().find(|e| **e > right_end) {
        return Err(Error::ExitGeometry(format!(
            "exit {e} lies beyond the wall {right_end}"
        )));
    }
    if *start >= right_end {
        return Err(Error::ExitGeometry(format!(
            "start {start} is not left of the right boundary {right_end}"
        )));
    }

    let traps = ls.trap_positions();
    let mut sites: Vec<BigUint> = traps.iter().filter(|x| **x <= right_end).cloned().collect();
    sites.extend(exits.iter().cloned());
    sites.push(start.clone());
    sites.push(right_end.clone());
    sites.sort();
    sites.dedup();

    let n = sites.len();
    let mut lower = vec![Rational::zero(); n];
    let mut diag = vec![Rational::one(); n];
    let mut upper = vec![Rational::zero(); n];
    let mut rhs_p = vec![Rational::zero(); n];
    let mut rhs_t = vec![Rational::zero(); n];
    let half = rational::rat(1, 2);

    for (j, s) in sites.iter().enumerate() {
        if exits.contains(s) {
            rhs_p[j] = Rational::one();
            continue;
        }
        if *s == right_end {
            // wall: absorbed, contributes nothing further
            continue;
        }
        let is_trap = traps.binary_search(s).is_ok();
        let (die, step_l, step_r) = if is_trap {
            let r = if s.is_zero() { two_thirds() } else { third() };
            let l = if s.is_zero() { Rational::zero() } else { third() };
            (third(), l, r)
        } else {
            (Rational::zero(), half.clone(), half.clone())
        };
        let mut stay = Rational::zero();
        let mut mean_time = die;
        if !step_l.is_zero() {
            let g = rational::from_uint(&(s - &sites[j - 1]));
            let p_hop = g.recip();
            lower[j] = -(&step_l * &p_hop);
            stay += &step_l * (Rational::one() - &p_hop);
            mean_time += &step_l * &g;
        }
        let g = rational::from_uint(&(&sites[j + 1] - s));
        let p_hop = g.recip();
        upper[j] = -(&step_r * &p_hop);
        stay += &step_r * (Rational::one() - &p_hop);
        mean_time += &step_r * &g;
        diag[j] = Rational::one() - stay;
        rhs_t[j] = mean_time;
    }

    let p = linalg::solve_tridiagonal(&lower, &diag, &upper, &rhs_p)?;
    let t = linalg::solve_tridiagonal(&lower, &diag, &upper, &rhs_t)?;
    let idx = sites.binary_search(start).expect("start is a special site");
    if p[idx].is_zero() {
        return Err(Error::ExitGeometry(format!("no exit reachable from {start}")));
    }
    Ok(FirstPassage {
        exit_prob: p[idx].clone(),
        expected_time: t[idx].clone(),
    })
}

/// `E(tau)` when every site of `[0, last]` is a trap: each step dies with
/// probability 1/3, so `E(tau) = 3 (1 - P(wall))`.
pub fn all_trap_identity(res: &SurvivalResult) -> Rational {
    int(3) * (Rational::one() - &res.wall_probability)
}
