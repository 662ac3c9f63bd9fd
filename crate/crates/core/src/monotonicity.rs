//! Splitting the walk at `x_{k-1}` and what happens when one site is added.
//!
//! `S- = {0, ..., x_{k-1}}` and `S+ = {x_{k-1} + 1, ...}`. The walk
//! alternates between the two sets; each visit is summarised by an exit
//! probability and an expected duration, and `E(tau)` is a geometric sum
//! over the alternations.

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::criticality::{classify, Verdict, DEFAULT_MAX_SHIFT};
use crate::error::{Error, Result};
use crate::exact_engine::{expected_survival, first_passage_stats, FirstPassage};
use crate::landscape::{generate_recursive, Landscape, LandscapeFile, RecursionParams, DEFAULT_DIGIT_BUDGET};
use crate::rational::{self, int, rat, Rational};
use crate::trajectory::{self, End, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitStats {
    pub k: usize,
    pub split_site: String,
    #[serde(with = "rational::serde_rational")]
    pub e0: Rational,
    #[serde(with = "rational::serde_rational")]
    pub p0: Rational,
    #[serde(with = "rational::serde_rational")]
    pub e_minus: Rational,
    #[serde(with = "rational::serde_rational")]
    pub p_minus: Rational,
    #[serde(with = "rational::serde_rational")]
    pub e_plus: Rational,
    #[serde(with = "rational::serde_rational")]
    pub p_plus: Rational,
}

impl SplitStats {
    /// `Pr(l_i < inf)`: the walk reaches the split and then crosses it `i` times.
    pub fn prob_l_finite(&self, i: usize) -> Rational {
        let pair = &self.p_minus * &self.p_plus;
        let m = (i / 2) as u32;
        let base = &self.p0 * Pow::pow(&pair, m);
        if i % 2 == 1 {
            base * &self.p_minus
        } else {
            base
        }
    }
}

/// Exact split statistics at `x_{k-1}` for a walled landscape.
pub fn compute_split_stats(ls: &Landscape, k: usize) -> Result<SplitStats> {
    let wall = ls.wall().ok_or(Error::WallRequired)?;
    if k == 0 || k > ls.trap_count() {
        return Err(Error::IndexOutOfRange {
            what: "split index",
            index: k,
            lo: 1,
            hi: ls.trap_count(),
        });
    }
    let x = ls.trap_position(k - 1);
    let x1 = &x + 1u32;
    let start = if x.is_zero() {
        FirstPassage {
            exit_prob: Rational::one(),
            expected_time: Rational::zero(),
        }
    } else {
        first_passage_stats(ls, &BigUint::zero(), std::slice::from_ref(&x))?
    };
    let minus = first_passage_stats(ls, &x, std::slice::from_ref(&x1))?;
    // with the wall right next to the split, S+ is just the wall
    let plus = if &x1 == wall {
        FirstPassage {
            exit_prob: Rational::zero(),
            expected_time: Rational::zero(),
        }
    } else {
        first_passage_stats(ls, &x1, std::slice::from_ref(&x))?
    };
    Ok(SplitStats {
        k,
        split_site: x.to_string(),
        e0: start.expected_time,
        p0: start.exit_prob,
        e_minus: minus.expected_time,
        p_minus: minus.exit_prob,
        e_plus: plus.expected_time,
        p_plus: plus.exit_prob,
    })
}

/// `E0 + P0 (E- + E+ P-) / (1 - P+ P-)`.
pub fn survival_via_split(s: &SplitStats) -> Result<Rational> {
    let denom = Rational::one() - &s.p_plus * &s.p_minus;
    if denom.is_zero() {
        return Err(Error::Singular);
    }
    Ok(&s.e0 + &s.p0 * (&s.e_minus + &s.e_plus * &s.p_minus) / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsertionReport {
    pub before: SplitStats,
    pub after: SplitStats,
    #[serde(with = "rational::serde_rational")]
    pub p_plus_predicted: Rational,
    #[serde(with = "rational::serde_rational")]
    pub e_plus_predicted: Rational,
    pub p_plus_holds: bool,
    pub e_plus_holds: bool,
    pub unchanged_hold: bool,
}

impl InsertionReport {
    pub fn all_hold(&self) -> bool {
        self.p_plus_holds && self.e_plus_holds && self.unchanged_hold
    }
}

/// Compares split statistics before and after lengthening `I_k` by one site.
pub fn verify_lemma52(ls: &Landscape, k: usize) -> Result<InsertionReport> {
    let before = compute_split_stats(ls, k)?;
    let after = compute_split_stats(&ls.insert_site(k)?, k)?;
    let d = int(2) - &before.p_plus;
    let p_plus_predicted = d.recip();
    let e_plus_predicted = (&before.e_plus + int(2)) / &d;
    Ok(InsertionReport {
        p_plus_holds: after.p_plus == p_plus_predicted,
        e_plus_holds: after.e_plus == e_plus_predicted,
        unchanged_hold: after.e0 == before.e0
            && after.p0 == before.p0
            && after.e_minus == before.e_minus
            && after.p_minus == before.p_minus,
        p_plus_predicted,
        e_plus_predicted,
        before,
        after,
    })
}

/// `(E[tau2] - E[tau1]) / P0` written through the split statistics of the
/// original landscape; nonnegative exactly when adding the site helps.
pub fn nonmono_condition_rhs(s: &SplitStats) -> Rational {
    let (pp, pm) = (&s.p_plus, &s.p_minus);
    let two = int(2);
    let a = &two - pp - pm;
    let b = Rational::one() - pp * pm;
    let t1 = &s.e_minus * ((&two - pp) / &a - b.recip());
    let t2 = &s.e_plus * pm * (a.recip() - b.recip());
    let t3 = two * pm / &a;
    t1 + t2 + t3
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSpace {
    /// `|I_1|` ranges over `1..=b1`.
    pub b1: u64,
    /// `|I_3|` ranges over `1..=b3`.
    pub b3: u64,
    /// Wall distances beyond `x_3`.
    pub wall_offsets: Vec<u64>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            b1: 8,
            b3: 200,
            wall_offsets: vec![1, 2, 5, 20],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyBounds {
    pub p_plus_in_range: bool,
    pub p_minus_in_range: bool,
    pub e_minus_bounded: bool,
    pub e_plus_bounded: bool,
}

impl FamilyBounds {
    pub fn all(&self) -> bool {
        self.p_plus_in_range && self.p_minus_in_range && self.e_minus_bounded && self.e_plus_bounded
    }
}

/// Checks `1/3 <= P+-  <= 2/3`, `E- <= 2|I_1| + 1` and `E+ >= (|I_3| - 1)/3`.
pub fn family_bounds(ls: &Landscape, s: &SplitStats) -> FamilyBounds {
    let in_range = |p: &Rational| *p >= rat(1, 3) && *p <= rat(2, 3);
    let i1 = rational::from_uint(ls.interval(1));
    let i3 = rational::from_uint(ls.interval(3));
    FamilyBounds {
        p_plus_in_range: in_range(&s.p_plus),
        p_minus_in_range: in_range(&s.p_minus),
        e_minus_bounded: s.e_minus <= int(2) * i1 + Rational::one(),
        e_plus_bounded: s.e_plus >= (i3 - Rational::one()) / int(3),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub before: LandscapeFile,
    pub after: LandscapeFile,
    #[serde(with = "rational::serde_rational")]
    pub e_tau_before: Rational,
    #[serde(with = "rational::serde_rational")]
    pub e_tau_after: Rational,
    #[serde(with = "rational::serde_rational")]
    pub rhs: Rational,
    pub stats: SplitStats,
    pub bounds: FamilyBounds,
}

fn family_member(a: u64, b: u64, d: u64) -> Landscape {
    Landscape::from_lengths(&[a, 1, b], Some(a + 1 + b + d)).expect("valid family member")
}

fn check_cell(a: u64, b: u64, d: u64) -> Result<Option<Counterexample>> {
    let before = family_member(a, b, d);
    let after = before.insert_site(2)?;
    let e1 = expected_survival(&before)?.expected_tau;
    let e2 = expected_survival(&after)?.expected_tau;
    if e2 >= e1 {
        return Ok(None);
    }
    let stats = compute_split_stats(&before, 2)?;
    let bounds = family_bounds(&before, &stats);
    Ok(Some(Counterexample {
        before: before.to_file(),
        after: after.to_file(),
        e_tau_before: e1,
        e_tau_after: e2,
        rhs: nonmono_condition_rhs(&stats),
        stats,
        bounds,
    }))
}

/// First pair `([a, 1, b], [a, 2, b])` in grid order (a, then b, then
/// wall offset) where the extra site shortens the expected survival.
pub fn find_counterexample(space: &SearchSpace) -> Result<Counterexample> {
    let cells: Vec<(u64, u64, u64)> = (1..=space.b1)
        .flat_map(|a| (1..=space.b3).flat_map(move |b| space.wall_offsets.iter().map(move |&d| (a, b, d))))
        .collect();
    let found = cells
        .par_iter()
        .map(|&(a, b, d)| check_cell(a, b, d))
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        Some(r) => r.map(|w| w.expect("filtered")),
        None => Err(Error::Exhausted(format!(
            "no witness with |I_1| <= {}, |I_3| <= {}, wall offsets {:?}",
            space.b1, space.b3, space.wall_offsets
        ))),
    }
}

/// Two recursion landscapes where one has pointwise longer intervals yet
/// the shorter-interval one has infinite expected survival.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursivePairComparison {
    pub sparse: LandscapeFile,
    pub dense: LandscapeFile,
    pub sparse_dominates: bool,
    pub sparse_verdict: Verdict,
    pub dense_verdict: Verdict,
    pub non_monotone: bool,
}

pub fn compare_recursive_pair(sparse: &RecursionParams, dense: &RecursionParams) -> Result<RecursivePairComparison> {
    let a = generate_recursive(sparse, DEFAULT_DIGIT_BUDGET)?.landscape;
    let b = generate_recursive(dense, DEFAULT_DIGIT_BUDGET)?.landscape;
    let va = classify(sparse, DEFAULT_MAX_SHIFT)?.verdict;
    let vb = classify(dense, DEFAULT_MAX_SHIFT)?.verdict;
    let dominates = a.dominates(&b);
    Ok(RecursivePairComparison {
        sparse: a.to_file(),
        dense: b.to_file(),
        sparse_dominates: dominates,
        non_monotone: dominates && va == Verdict::Finite && vb == Verdict::Infinite,
        sparse_verdict: va,
        dense_verdict: vb,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryDecomposition {
    /// Finite crossing times `l_0 < l_1 < ...`; all later ones are infinite.
    pub l_times: Vec<u64>,
    /// `T_0, T_1, ...` up to the first infinite `l`; later segments are 0.
    pub t_segments: Vec<u64>,
    pub tau: u64,
}

/// Crossing times of the split at `x_{k-1}` along an explicit path.
pub fn decompose_trajectory(traj: &Trajectory, ls: &Landscape, k: usize) -> Result<TrajectoryDecomposition> {
    if k == 0 || k > ls.trap_count() {
        return Err(Error::IndexOutOfRange {
            what: "split index",
            index: k,
            lo: 1,
            hi: ls.trap_count(),
        });
    }
    let tau = trajectory::replay(ls, traj)?;
    let split = ls.trap_position(k - 1);
    let mut l_times = Vec::new();
    if let Ok(x) = u64::try_from(&split) {
        let mut target = x;
        for (t, &s) in traj.sites.iter().enumerate() {
            if s == target {
                l_times.push(t as u64);
                target = if target == x { x + 1 } else { x };
            }
        }
    }
    let mut t_segments = Vec::with_capacity(l_times.len() + 1);
    let mut prev = 0u64;
    for &l in &l_times {
        let cur = tau.min(l);
        t_segments.push(cur - prev);
        prev = cur;
    }
    t_segments.push(tau - prev);
    debug_assert_eq!(t_segments.iter().sum::<u64>(), tau);
    Ok(TrajectoryDecomposition {
        l_times,
        t_segments,
        tau,
    })
}

/// The path used as a worked example: landscape `[3, 4, 5]`, turning points
/// `0, 2, 1, 8, 4, 10, 3`, then death.
pub fn example_trajectory() -> (Landscape, Trajectory) {
    (
        Landscape::from_lengths(&[3, 4, 5], None).expect("valid"),
        Trajectory::from_turning_points(&[0, 2, 1, 8, 4, 10, 3], End::Death),
    )
}
