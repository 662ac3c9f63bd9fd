//! Trap landscapes encoded by the lengths of the intervals between
//! consecutive traps, plus the recursive super-exponential family.
//!
//! A landscape always has a trap at the origin. Interval `I_i` spans
//! `[x_{i-1}, x_i)`, so the trap positions are the prefix sums of the
//! interval lengths. An optional absorbing wall truncates the half-line
//! strictly to the right of the last trap; exact computations that need a
//! finite state space require it.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default guard on the decimal size of generated interval lengths.
pub const DEFAULT_DIGIT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Landscape {
    intervals: Vec<BigUint>,
    wall: Option<BigUint>,
}

impl Landscape {
    pub fn new(intervals: Vec<BigUint>, wall: Option<BigUint>) -> Result<Self> {
        if let Some(pos) = intervals.iter().position(|l| l.is_zero()) {
            return Err(Error::InvalidLandscape(format!("interval {} has length 0", pos + 1)));
        }
        let last: BigUint = intervals.iter().sum();
        if let Some(w) = &wall {
            if *w <= last {
                return Err(Error::InvalidLandscape(format!(
                    "wall {w} must lie strictly right of the last trap {last}"
                )));
            }
        }
        Ok(Self { intervals, wall })
    }

    /// Convenience constructor from machine integers.
    pub fn from_lengths(lengths: &[u64], wall: Option<u64>) -> Result<Self> {
        Self::new(
            lengths.iter().map(|&l| BigUint::from(l)).collect(),
            wall.map(BigUint::from),
        )
    }

    pub fn intervals(&self) -> &[BigUint] {
        &self.intervals
    }

    /// `|I_i|` for `1 <= i <= interval_count()`.
    pub fn interval(&self, i: usize) -> &BigUint {
        &self.intervals[i - 1]
    }

    pub fn interval_count(&self) -> usize {
        self.intervals.len()
    }

    /// Traps `x_0 = 0, x_1, ..., x_n`.
    pub fn trap_count(&self) -> usize {
        self.intervals.len() + 1
    }

    pub fn wall(&self) -> Option<&BigUint> {
        self.wall.as_ref()
    }

    pub fn is_walled(&self) -> bool {
        self.wall.is_some()
    }

    pub fn with_wall(&self, wall: Option<BigUint>) -> Result<Self> {
        Self::new(self.intervals.clone(), wall)
    }

    pub fn trap_positions(&self) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(self.trap_count());
        let mut x = BigUint::zero();
        out.push(x.clone());
        for l in &self.intervals {
            x += l;
            out.push(x.clone());
        }
        out
    }

    pub fn trap_position(&self, i: usize) -> BigUint {
        self.intervals[..i].iter().sum()
    }

    pub fn last_trap(&self) -> BigUint {
        self.intervals.iter().sum()
    }

    /// Rightmost site of the state space: the wall if present, else the last trap.
    pub fn span(&self) -> BigUint {
        self.wall.clone().unwrap_or_else(|| self.last_trap())
    }

    /// Span as a machine integer when it fits under `limit`.
    pub fn small_span(&self, limit: u64) -> Result<u64> {
        let span = self.span();
        match span.to_u64() {
            Some(s) if s <= limit => Ok(s),
            _ => Err(Error::Budget(format!(
                "span {span} exceeds the site-level limit {limit}"
            ))),
        }
    }

    /// Trap positions as machine integers, for site-level work.
    pub fn small_trap_positions(&self, limit: u64) -> Result<Vec<u64>> {
        self.small_span(limit)?;
        Ok(self
            .trap_positions()
            .iter()
            .map(|x| x.to_u64().expect("bounded by span"))
            .collect())
    }

    /// Drops the first `k - 1` intervals, re-rooting the landscape at `x_{k-1}`.
    pub fn shift_tail(&self, k: usize) -> Result<Self> {
        check_interval_index(k, self.interval_count())?;
        let offset = self.trap_position(k - 1);
        let wall = self.wall.as_ref().map(|w| w - &offset);
        Self::new(self.intervals[k - 1..].to_vec(), wall)
    }

    /// Lengthens interval `I_k` by one site; everything right of `x_{k-1}`
    /// (including the wall) moves one site to the right.
    pub fn insert_site(&self, k: usize) -> Result<Self> {
        check_interval_index(k, self.interval_count())?;
        let mut intervals = self.intervals.clone();
        intervals[k - 1] += 1u32;
        let wall = self.wall.as_ref().map(|w| w + 1u32);
        Self::new(intervals, wall)
    }

    /// Whether every interval of `self` is at least as long as the matching
    /// interval of `other` (same interval count required).
    pub fn dominates(&self, other: &Landscape) -> bool {
        self.interval_count() == other.interval_count()
            && self.intervals.iter().zip(&other.intervals).all(|(a, b)| a >= b)
    }

    pub fn to_file(&self) -> LandscapeFile {
        LandscapeFile {
            intervals: self.intervals.iter().map(|l| l.to_string()).collect(),
            wall: self.wall.as_ref().map(|w| w.to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("landscape serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: LandscapeFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }
}

fn check_interval_index(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "interval index",
            index: k,
            lo: 1,
            hi: n,
        });
    }
    Ok(())
}

/// On-disk form. Lengths are decimal strings because they outgrow 2^53.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandscapeFile {
    pub intervals: Vec<String>,
    pub wall: Option<String>,
}

impl TryFrom<LandscapeFile> for Landscape {
    type Error = Error;

    fn try_from(file: LandscapeFile) -> Result<Self> {
        let parse = |s: &str| {
            s.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::Parse(format!("not a decimal natural: {s:?}")))
        };
        let intervals = file.intervals.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        let wall = file.wall.as_deref().map(parse).transpose()?;
        Landscape::new(intervals, wall)
    }
}

/// Parameters of the recursion `|I_{j+1}| = c |I_j|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionParams {
    pub i1: BigUint,
    pub c: Rational,
    pub n_intervals: usize,
}

impl RecursionParams {
    pub fn new(i1: u64, c: Rational, n_intervals: usize) -> Self {
        Self {
            i1: BigUint::from(i1),
            c,
            n_intervals,
        }
    }

    /// `c > 1/|I_1|`, the regime where interval lengths strictly increase.
    pub fn is_growing(&self) -> bool {
        &self.c * rational::from_uint(&self.i1) > Rational::one()
    }
}

/// Accepts iff `c · I1` is a natural number and returns that natural.
///
/// Integer interval lengths for every index force this; the rejection carries
/// the reduced fraction `c · I1`.
pub fn validate_c(i1: &BigUint, c: &Rational) -> Result<BigUint> {
    if i1.is_zero() {
        return Err(Error::InvalidLandscape("|I_1| must be at least 1".into()));
    }
    if !c.is_positive() {
        return Err(Error::InvalidLandscape(format!("c = {c} must be positive")));
    }
    let product = c * rational::from_uint(i1);
    if product.is_integer() {
        Ok(product.to_integer().to_biguint().expect("positive integer"))
    } else {
        Err(Error::NonIntegralScale { product })
    }
}

/// A recursive landscape together with the closed-form cross-check.
#[derive(Debug, Clone)]
pub struct RecursiveLandscape {
    pub landscape: Landscape,
    pub m: BigUint,
    /// `c^{2^{n-1}-1} |I_1|^{2^{n-1}}` evaluated independently for each `n`.
    pub closed_form: Vec<BigUint>,
}

/// Estimated decimal digits of a natural with the given bit length.
fn decimal_digits(bits: u64) -> u64 {
    ((bits as f64) * std::f64::consts::LOG10_2).ceil() as u64 + 1
}

pub fn generate_recursive(params: &RecursionParams, digit_budget: u64) -> Result<RecursiveLandscape> {
    let m = validate_c(&params.i1, &params.c)?;
    if params.n_intervals == 0 {
        return Err(Error::InvalidLandscape("n_intervals must be at least 1".into()));
    }
    let i1 = params.i1.clone();
    if decimal_digits(i1.bits()) > digit_budget {
        return Err(Error::DigitBudget {
            index: 1,
            estimated_digits: decimal_digits(i1.bits()),
            budget: digit_budget,
        });
    }
    let mut lengths = vec![i1.clone()];
    for j in 1..params.n_intervals {
        let prev = &lengths[j - 1];
        let est_bits = 2 * prev.bits() + m.bits();
        let est = decimal_digits(est_bits);
        if est > digit_budget {
            return Err(Error::DigitBudget {
                index: j + 1,
                estimated_digits: est,
                budget: digit_budget,
            });
        }
        let (next, rem) = (&m * prev * prev).div_rem(&i1);
        debug_assert!(rem.is_zero(), "c·|I_1| integral implies integral lengths");
        lengths.push(next);
    }
    let closed_form = (1..=params.n_intervals)
        .map(|n| closed_form_length(&params.c, &i1, n))
        .collect::<Vec<_>>();
    for (j, (a, b)) in lengths.iter().zip(&closed_form).enumerate() {
        if a != b {
            return Err(Error::NotRecursive {
                c: params.c.clone(),
                index: j + 1,
            });
        }
    }
    Ok(RecursiveLandscape {
        landscape: Landscape::new(lengths, None)?,
        m,
        closed_form,
    })
}

/// `|I_n| = c^{2^{n-1}-1} |I_1|^{2^{n-1}}`, evaluated as a rational power.
fn closed_form_length(c: &Rational, i1: &BigUint, n: usize) -> BigUint {
    let e = 1u64 << (n - 1);
    let numer = num_traits::pow(c.numer().clone(), (e - 1) as usize) * BigInt::from(i1.clone()).pow(e as u32);
    let denom = num_traits::pow(c.denom().clone(), (e - 1) as usize);
    let v = BigRational::new(numer, denom);
    v.to_integer().to_biguint().unwrap_or_default()
}

/// Checks `|I_{j+1}| = c |I_j|^2` for every consecutive pair.
pub fn follows_recursion(ls: &Landscape, c: &Rational) -> Result<()> {
    for j in 1..ls.interval_count() {
        let prev = rational::from_uint(ls.interval(j));
        let next = rational::from_uint(ls.interval(j + 1));
        if next != c * &prev * &prev {
            return Err(Error::NotRecursive {
                c: c.clone(),
                index: j + 1,
            });
        }
    }
    Ok(())
}

/// Offsets `(p_a, p_b)` beyond which the two landscapes' trap indicators agree.
///
/// Finite encodings are similar when they share a non-empty common suffix
/// of interval lengths (or are both trap-only-at-origin); the returned
/// offsets are the positions where the longest common suffix starts.
pub fn tail_similar(a: &Landscape, b: &Landscape) -> Option<(BigUint, BigUint)> {
    let common = a
        .intervals
        .iter()
        .rev()
        .zip(b.intervals.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let both_empty = a.intervals.is_empty() && b.intervals.is_empty();
    if common == 0 && !both_empty {
        return None;
    }
    let pa = a.trap_position(a.interval_count() - common);
    let pb = b.trap_position(b.interval_count() - common);
    Some((pa, pb))
}
