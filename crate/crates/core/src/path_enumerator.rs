//! Embedded-walk histories and a dense site-level oracle.
//!
//! A history is a word over {-1, 0, +1} whose partial sums stay
//! nonnegative: entry `j` says whether the `j`-th trap hit is one trap to
//! the left, the same trap, or one trap to the right of the previous one.

use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_engine::{build_kernel, EmbeddedKernel};
use crate::landscape::{follows_recursion, Landscape};
use crate::linalg;
use crate::rational::{self, int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct KappaSequence(Vec<i8>);

impl KappaSequence {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        let mut sum = 0i64;
        for (j, &e) in entries.iter().enumerate() {
            if !(-1..=1).contains(&e) {
                return Err(Error::Parse(format!("kappa entry {j} is {e}, expected -1, 0 or 1")));
            }
            sum += i64::from(e);
            if sum < 0 {
                return Err(Error::Parse(format!("kappa prefix sum negative at entry {j}")));
            }
        }
        Ok(Self(entries))
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1; len])
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Trap-hit index this history precedes.
    pub fn target_index(&self) -> usize {
        self.0.len() + 1
    }

    /// Trap index the embedded walk ends on.
    pub fn endpoint(&self) -> usize {
        self.0.iter().map(|&e| i64::from(e)).sum::<i64>() as usize
    }

    /// Highest trap index visited.
    pub fn max_position(&self) -> usize {
        let mut pos = 0i64;
        let mut hi = 0i64;
        for &e in &self.0 {
            pos += i64::from(e);
            hi = hi.max(pos);
        }
        hi as usize
    }

    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&e| e == 0).count()
    }

    pub fn minus_ones(&self) -> usize {
        self.0.iter().filter(|&&e| e == -1).count()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }
}

/// Depth-first walk over all admissible histories of one length.
pub struct KappaIter {
    len: usize,
    stack: Vec<(Vec<i8>, i64)>,
}

impl Iterator for KappaIter {
    type Item = KappaSequence;

    fn next(&mut self) -> Option<KappaSequence> {
        while let Some((prefix, sum)) = self.stack.pop() {
            if prefix.len() == self.len {
                return Some(KappaSequence(prefix));
            }
            // pushed in reverse so output is lexicographic in (-1, 0, 1)
            for e in [1i8, 0, -1] {
                let s = sum + i64::from(e);
                if s >= 0 {
                    let mut p = prefix.clone();
                    p.push(e);
                    self.stack.push((p, s));
                }
            }
        }
        None
    }
}

/// Histories of length `i - 1`; for `i = 1` only the empty one.
pub fn enumerate_k(i: usize) -> Result<KappaIter> {
    if i == 0 {
        return Err(Error::IndexOutOfRange {
            what: "trap-hit index",
            index: 0,
            lo: 1,
            hi: usize::MAX,
        });
    }
    Ok(KappaIter {
        len: i - 1,
        stack: vec![(Vec::new(), 0)],
    })
}

fn open_kernel(ls: &Landscape) -> EmbeddedKernel {
    build_kernel(&ls.with_wall(None).expect("removing the wall is always valid"))
}

fn require_intervals(ls: &Landscape, kappa: &KappaSequence) -> Result<usize> {
    let needed = kappa.max_position().max(kappa.endpoint()) + 1;
    if ls.interval_count() < needed {
        return Err(Error::InsufficientTraps(format!(
            "history {:?} needs {needed} intervals, landscape has {}",
            kappa.entries(),
            ls.interval_count()
        )));
    }
    Ok(needed)
}

fn prob_with_kernel(kernel: &EmbeddedKernel, kappa: &KappaSequence) -> Rational {
    let mut pos = 0usize;
    let mut p = Rational::one();
    for &e in kappa.entries() {
        let row = kernel.row(pos).expect("checked interval count");
        p *= match e {
            -1 => &row.left,
            0 => &row.stay,
            _ => &row.right,
        };
        pos = (pos as i64 + i64::from(e)) as usize;
    }
    p
}

/// Probability that the embedded walk follows `kappa`, surviving each visit.
/// Only the intervals matter; any wall is ignored.
pub fn prob_a_kappa(ls: &Landscape, kappa: &KappaSequence) -> Result<Rational> {
    require_intervals(ls, kappa)?;
    Ok(prob_with_kernel(&open_kernel(ls), kappa))
}

/// `|I_f| - 1`, where `x_{f-1}` is the trap `kappa` ends on.
pub fn expected_y_given_aplus(ls: &Landscape, kappa: &KappaSequence) -> Result<Rational> {
    require_intervals(ls, kappa)?;
    let f = kappa.endpoint() + 1;
    Ok(rational::from_uint(ls.interval(f)) - Rational::one())
}

/// Closed form for the all-ones history on a recursion landscape.
pub fn formula_kappa_one(ls: &Landscape, c: &Rational, i: usize) -> Result<Rational> {
    if i == 0 || i > ls.interval_count() {
        return Err(Error::IndexOutOfRange {
            what: "trap-hit index",
            index: i,
            lo: 1,
            hi: ls.interval_count(),
        });
    }
    follows_recursion(ls, c)?;
    let i1 = rational::from_uint(ls.interval(1));
    if i == 1 {
        return Ok(i1 - Rational::one());
    }
    let ii = rational::from_uint(ls.interval(i));
    Ok(int(2) * &i1 * Pow::pow(c / int(3), (i - 1) as u32) * (Rational::one() - ii.recip()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub kappa: KappaSequence,
    #[serde(with = "rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_rational")]
    pub rhs: Rational,
    pub bound_kind: BoundKind,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn violations(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    pub fn sequences_checked(&self) -> usize {
        self.checks.iter().filter(|c| c.bound_kind == BoundKind::Upper).count()
    }
}

/// Checks both inter-arrival bounds for every history with target index
/// `1..=i_max`. The lower bound is only checked for histories without `-1`.
pub fn verify_lemma41_bounds(ls: &Landscape, c: &Rational, i_max: usize) -> Result<BoundReport> {
    follows_recursion(ls, c)?;
    if ls.interval_count() < i_max {
        return Err(Error::InsufficientTraps(format!(
            "bounds up to index {i_max} need {i_max} intervals, landscape has {}",
            ls.interval_count()
        )));
    }
    let kernel = open_kernel(ls);
    let i1 = rational::from_uint(ls.interval(1));
    let up_l = int(2) / c;
    let up_j = int(2) / (&i1 * &i1 * c * c);
    let one_minus = Rational::one() - i1.recip();
    let low_l = int(2) / c * &one_minus * &one_minus;

    let contribution = |kappa: &KappaSequence| {
        let f = kappa.endpoint() + 1;
        prob_with_kernel(&kernel, kappa) * (rational::from_uint(ls.interval(f)) - Rational::one())
    };

    let mut checks = Vec::new();
    for i in 1..=i_max {
        let reference = contribution(&KappaSequence::ones(i - 1));
        let kappas: Vec<KappaSequence> = enumerate_k(i)?.collect();
        let rows: Vec<Vec<BoundCheck>> = kappas
            .into_par_iter()
            .map(|kappa| {
                let lhs = contribution(&kappa);
                let l = kappa.zeros() as u32;
                let j = kappa.minus_ones() as u32;
                let upper = Pow::pow(&up_l, l) * Pow::pow(&up_j, j) * &reference;
                let mut out = vec![BoundCheck {
                    kappa: kappa.clone(),
                    holds: lhs <= upper,
                    lhs: lhs.clone(),
                    rhs: upper,
                    bound_kind: BoundKind::Upper,
                }];
                if kappa.is_nonnegative() {
                    let lower = rat(1, 2) * Pow::pow(&low_l, l) * &reference;
                    out.push(BoundCheck {
                        kappa,
                        holds: lhs >= lower,
                        lhs,
                        rhs: lower,
                        bound_kind: BoundKind::Lower,
                    });
                }
                out
            })
            .collect();
        checks.extend(rows.into_iter().flatten());
    }
    Ok(BoundReport { checks })
}

/// Largest state space the dense oracle accepts.
pub const ORACLE_MAX_SITES: usize = 160;
/// Largest horizon for the truncated-time iteration.
pub const ORACLE_MAX_HORIZON: u64 = 10_000_000;

/// Where the walk goes next after one visit to a trap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NextHitRow {
    /// Probability that the next trap hit is trap `t`.
    #[serde(with = "rational::serde_rational_vec")]
    pub to_trap: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub wall: Rational,
    #[serde(with = "rational::serde_rational")]
    pub die: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    #[serde(with = "rational::serde_rational")]
    pub expected_tau: Rational,
    /// `E(min(tau, horizon))` by forward iteration of the site distribution.
    pub truncated_tau: f64,
    pub horizon: u64,
    pub next_hit: Vec<NextHitRow>,
}

impl OracleSummary {
    /// `Pr(A_kappa)` from the site-level next-hit probabilities.
    pub fn prob_kappa(&self, kappa: &KappaSequence) -> Option<Rational> {
        let mut pos = 0usize;
        let mut p = Rational::one();
        for &e in kappa.entries() {
            let next = (pos as i64 + i64::from(e)) as usize;
            p *= self.next_hit.get(pos)?.to_trap.get(next)?;
            pos = next;
        }
        Some(p)
    }
}

/// Site-level transition list for a walled landscape over sites `0..=wall`.
/// Entries are `(target, prob)`; a target of `None` is the death state.
fn site_moves(is_trap: &[bool], x: usize) -> Vec<(Option<usize>, Rational)> {
    if is_trap[x] {
        if x == 0 {
            vec![(None, rat(1, 3)), (Some(1), rat(2, 3))]
        } else {
            vec![(None, rat(1, 3)), (Some(x - 1), rat(1, 3)), (Some(x + 1), rat(1, 3))]
        }
    } else {
        vec![(Some(x - 1), rat(1, 2)), (Some(x + 1), rat(1, 2))]
    }
}

/// Brute-force summaries from the full site-level chain on `0..=wall`.
pub fn site_level_oracle(ls: &Landscape, horizon: u64) -> Result<OracleSummary> {
    let wall = ls.wall().ok_or(Error::WallRequired)?;
    let sites = usize::try_from(wall)
        .ok()
        .filter(|&w| w < ORACLE_MAX_SITES)
        .ok_or_else(|| Error::Budget(format!("oracle limited to {ORACLE_MAX_SITES} sites, wall is {wall}")))?;
    if horizon > ORACLE_MAX_HORIZON {
        return Err(Error::Budget(format!("oracle horizon limited to {ORACLE_MAX_HORIZON}")));
    }
    let traps: Vec<usize> = ls
        .trap_positions()
        .iter()
        .map(|x| usize::try_from(x).expect("below wall"))
        .collect();
    let mut is_trap = vec![false; sites + 1];
    for &t in &traps {
        is_trap[t] = true;
    }

    // expected absorption time over live sites 0..wall
    let mut a = vec![vec![Rational::zero(); sites]; sites];
    for (x, row) in a.iter_mut().enumerate() {
        row[x] += Rational::one();
        for (y, p) in site_moves(&is_trap, x) {
            if let Some(y) = y.filter(|&y| y < sites) {
                row[y] -= p;
            }
        }
    }
    let t = linalg::solve_gauss_jordan(&a, &vec![Rational::one(); sites])?;

    // hitting probabilities of each trap / the wall from the free sites
    let free: Vec<usize> = (0..sites).filter(|&x| !is_trap[x]).collect();
    let free_index = |x: usize| free.iter().position(|&f| f == x);
    let mut fa = vec![vec![Rational::zero(); free.len()]; free.len()];
    for (r, &x) in free.iter().enumerate() {
        fa[r][r] = Rational::one();
        for (y, p) in site_moves(&is_trap, x) {
            if let Some(c) = y.and_then(free_index) {
                fa[r][c] -= p;
            }
        }
    }
    let mut targets = traps.clone();
    targets.push(sites);
    let hits: Vec<Vec<Rational>> = targets
        .iter()
        .map(|&target| {
            let b: Vec<Rational> = free
                .iter()
                .map(|&x| {
                    site_moves(&is_trap, x)
                        .into_iter()
                        .filter(|(y, _)| *y == Some(target))
                        .map(|(_, p)| p)
                        .sum()
                })
                .collect();
            linalg::solve_gauss_jordan(&fa, &b)
        })
        .collect::<Result<_>>()?;
    let hit_from = |y: usize, k: usize| -> Rational {
        if y == targets[k] {
            Rational::one()
        } else if is_trap[y] || y == sites {
            Rational::zero()
        } else {
            hits[k][free_index(y).expect("free site")].clone()
        }
    };
    let next_hit = traps
        .iter()
        .map(|&x| {
            let moves = site_moves(&is_trap, x);
            let mut to_trap = vec![Rational::zero(); traps.len()];
            let mut wall_p = Rational::zero();
            let mut die = Rational::zero();
            for (y, p) in moves {
                match y {
                    None => die += p,
                    Some(y) => {
                        for (k, slot) in to_trap.iter_mut().enumerate() {
                            *slot += &p * hit_from(y, k);
                        }
                        wall_p += &p * hit_from(y, traps.len());
                    }
                }
            }
            NextHitRow {
                to_trap,
                wall: wall_p,
                die,
            }
        })
        .collect();

    // forward iteration for E(min(tau, h)) = sum_{s < h} P(tau > s)
    let moves: Vec<Vec<(Option<usize>, f64)>> = (0..sites)
        .map(|x| {
            site_moves(&is_trap, x)
                .into_iter()
                .map(|(y, p)| (y.filter(|&y| y < sites), rational::to_f64(&p)))
                .collect()
        })
        .collect();
    let mut dist = vec![0.0f64; sites];
    dist[0] = 1.0;
    let mut truncated = 0.0;
    for _ in 0..horizon {
        let alive: f64 = dist.iter().sum();
        if alive < 1e-300 {
            break;
        }
        truncated += alive;
        let mut next = vec![0.0f64; sites];
        for (x, &m) in dist.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for &(y, p) in &moves[x] {
                if let Some(y) = y {
                    next[y] += m * p;
                }
            }
        }
        dist = next;
    }

    Ok(OracleSummary {
        expected_tau: t[0].clone(),
        truncated_tau: truncated,
        horizon,
        next_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::expected_survival;
    use crate::landscape::{generate_recursive, RecursionParams, DEFAULT_DIGIT_BUDGET};
    use proptest::prelude::*;

    fn k(v: &[i8]) -> KappaSequence {
        KappaSequence::new(v.to_vec()).unwrap()
    }

    fn recursive(i1: u64, c: Rational, n: usize) -> Landscape {
        generate_recursive(&RecursionParams::new(i1, c, n), DEFAULT_DIGIT_BUDGET)
            .unwrap()
            .landscape
    }

    /// Admissible words by filtering the full cube.
    fn brute_k(len: usize) -> Vec<Vec<i8>> {
        let mut out = Vec::new();
        for code in 0..3usize.pow(len as u32) {
            let mut c = code;
            let w: Vec<i8> = (0..len)
                .map(|_| {
                    let d = (c % 3) as i8 - 1;
                    c /= 3;
                    d
                })
                .collect();
            let ok = w
                .iter()
                .scan(0i64, |s, &e| {
                    *s += i64::from(e);
                    Some(*s)
                })
                .all(|s| s >= 0);
            if ok {
                out.push(w);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_k(1).unwrap().collect::<Vec<_>>(), vec![k(&[])]);
        assert_eq!(enumerate_k(2).unwrap().collect::<Vec<_>>(), vec![k(&[0]), k(&[1])]);
        let three: Vec<_> = enumerate_k(3).unwrap().map(|x| x.entries().to_vec()).collect();
        assert_eq!(three, brute_k(2));
        assert_eq!(three.len(), 5);
        assert!(enumerate_k(0).is_err());
    }

    #[test]
    fn enumerate_matches_filter() {
        let counts: Vec<usize> = (1..=8).map(|i| enumerate_k(i).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 2, 5, 13, 35, 96, 267, 750]);
        for len in 0..7 {
            let got: Vec<_> = enumerate_k(len + 1).unwrap().map(|x| x.entries().to_vec()).collect();
            assert_eq!(got, brute_k(len));
        }
    }

    #[test]
    fn kappa_validation() {
        assert!(KappaSequence::new(vec![-1]).is_err());
        assert!(KappaSequence::new(vec![1, -1, -1]).is_err());
        assert!(KappaSequence::new(vec![2]).is_err());
        let x = k(&[1, 0, -1]);
        assert_eq!(
            (x.endpoint(), x.max_position(), x.zeros(), x.minus_ones()),
            (0, 1, 1, 1)
        );
    }

    #[test]
    fn prob_examples() {
        let ls = Landscape::from_lengths(&[1, 2, 8], None).unwrap();
        assert_eq!(prob_a_kappa(&ls, &k(&[])).unwrap(), Rational::one());
        assert_eq!(prob_a_kappa(&ls, &k(&[1])).unwrap(), rat(2, 3));
        let ls = Landscape::from_lengths(&[3, 4], None).unwrap();
        assert_eq!(prob_a_kappa(&ls, &k(&[0])).unwrap(), rat(4, 9));
        assert!(matches!(
            prob_a_kappa(&ls, &k(&[1, 1])),
            Err(Error::InsufficientTraps(_))
        ));
    }

    #[test]
    fn expected_y_examples() {
        let ls = Landscape::from_lengths(&[4, 5, 9, 20], None).unwrap();
        assert_eq!(expected_y_given_aplus(&ls, &k(&[])).unwrap(), int(3));
        assert_eq!(expected_y_given_aplus(&ls, &k(&[1, 0, -1])).unwrap(), int(3));
        let ls = Landscape::from_lengths(&[1, 2, 8], None).unwrap();
        assert_eq!(expected_y_given_aplus(&ls, &k(&[1])).unwrap(), int(1));
    }

    #[test]
    fn formula_examples() {
        let a = Landscape::from_lengths(&[1, 2, 8], None).unwrap();
        assert_eq!(formula_kappa_one(&a, &int(2), 2).unwrap(), rat(2, 3));
        let b = Landscape::from_lengths(&[4, 8, 32], None).unwrap();
        assert_eq!(formula_kappa_one(&b, &rat(1, 2), 2).unwrap(), rat(7, 6));
        assert_eq!(formula_kappa_one(&b, &rat(1, 2), 1).unwrap(), int(3));
        assert!(matches!(
            formula_kappa_one(&b, &int(2), 2),
            Err(Error::NotRecursive { .. })
        ));
    }

    #[test]
    fn formula_matches_product() {
        for (i1, c) in [(1, int(2)), (4, rat(1, 2)), (2, int(1)), (3, rat(2, 3))] {
            let ls = recursive(i1, c.clone(), 7);
            for i in 1..=7 {
                let one = KappaSequence::ones(i - 1);
                let prod = prob_a_kappa(&ls, &one).unwrap() * expected_y_given_aplus(&ls, &one).unwrap();
                assert_eq!(formula_kappa_one(&ls, &c, i).unwrap(), prod, "i1={i1} i={i}");
            }
        }
    }

    #[test]
    fn bounds_hold_on_examples() {
        let a = recursive(1, int(2), 5);
        let rep = verify_lemma41_bounds(&a, &int(2), 5).unwrap();
        assert!(rep.violations().is_empty(), "{:?}", rep.violations());
        let b = recursive(4, rat(1, 2), 4);
        let rep = verify_lemma41_bounds(&b, &rat(1, 2), 4).unwrap();
        assert!(rep.violations().is_empty(), "{:?}", rep.violations());
        let all_ones = rep
            .checks
            .iter()
            .find(|c| c.kappa == KappaSequence::ones(3) && c.bound_kind == BoundKind::Upper)
            .unwrap();
        assert_eq!(all_ones.lhs, all_ones.rhs);
    }

    #[test]
    fn survival_mass_of_histories() {
        let ls = recursive(2, int(2), 8);
        for i in 1..=8 {
            let total: Rational = enumerate_k(i).unwrap().map(|kp| prob_a_kappa(&ls, &kp).unwrap()).sum();
            assert_eq!(total, Pow::pow(rat(2, 3), (i - 1) as u32));
        }
    }

    #[test]
    fn oracle_all_trap_segment() {
        let ls = Landscape::from_lengths(&[1; 30], Some(31)).unwrap();
        let o = site_level_oracle(&ls, 1000).unwrap();
        assert!((rational::to_f64(&o.expected_tau) - 3.0).abs() < 1e-12);
        assert!((o.truncated_tau - 3.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_engine_on_examples() {
        for (lens, wall) in [(vec![2], 4), (vec![1, 2], 6), (vec![3, 4, 5], 13)] {
            let ls = Landscape::from_lengths(&lens, Some(wall)).unwrap();
            let o = site_level_oracle(&ls, 20_000).unwrap();
            let exact = expected_survival(&ls).unwrap().expected_tau;
            assert_eq!(o.expected_tau, exact);
            assert!((o.truncated_tau - rational::to_f64(&exact)).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_kappa_probabilities() {
        let ls = Landscape::from_lengths(&[1, 2, 3], Some(9)).unwrap();
        let o = site_level_oracle(&ls, 0).unwrap();
        for i in 1..=3 {
            for kp in enumerate_k(i).unwrap() {
                assert_eq!(o.prob_kappa(&kp).unwrap(), prob_a_kappa(&ls, &kp).unwrap());
            }
        }
    }

    #[test]
    fn oracle_rejects_large() {
        let ls = Landscape::from_lengths(&[500], Some(501)).unwrap();
        assert!(site_level_oracle(&ls, 10).unwrap_err().is_budget());
        let ls = Landscape::from_lengths(&[5], None).unwrap();
        assert_eq!(site_level_oracle(&ls, 10).unwrap_err(), Error::WallRequired);
    }

    proptest! {
        #[test]
        fn oracle_next_hits_match_kernel(lens in prop::collection::vec(1u64..6, 1..5), gap in 1u64..5) {
            let last: u64 = lens.iter().sum();
            let ls = Landscape::from_lengths(&lens, Some(last + gap)).unwrap();
            let o = site_level_oracle(&ls, 0).unwrap();
            let kern = build_kernel(&ls);
            for (i, (row, hit)) in kern.rows().iter().zip(&o.next_hit).enumerate() {
                prop_assert_eq!(&hit.die, &row.die);
                prop_assert_eq!(&hit.wall, &row.wall);
                prop_assert_eq!(&hit.to_trap[i], &row.stay);
                if i > 0 { prop_assert_eq!(&hit.to_trap[i - 1], &row.left); }
                if i + 1 < hit.to_trap.len() { prop_assert_eq!(&hit.to_trap[i + 1], &row.right); }
            }
        }

        #[test]
        fn positive_probabilities(lens in prop::collection::vec(2u64..9, 5..6), i in 1usize..6) {
            let ls = Landscape::from_lengths(&lens, None).unwrap();
            for kp in enumerate_k(i).unwrap() {
                prop_assert!(prob_a_kappa(&ls, &kp).unwrap() > Rational::zero());
            }
        }
    }
}
