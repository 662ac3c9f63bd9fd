//! Finite / infinite expected survival for recursion landscapes.
//!
//! Two quadratic conditions on `(|I_k|, c)` decide the question for the
//! landscape re-rooted at trap `k - 1`, and finiteness of `E(tau)` only
//! depends on the tail. Iterating `k` until one of them fires gives a
//! certified verdict whenever `c != 1`.

use num_bigint::BigUint;
use num_traits::{One, Pow, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landscape::{validate_c, RecursionParams, DEFAULT_DIGIT_BUDGET};
use crate::rational::{self, int, Rational};

pub const DEFAULT_MAX_SHIFT: usize = 64;

/// `c^2 I^2 - c I^2 + 2 < 0`.
pub fn upper_condition(i: &BigUint, c: &Rational) -> bool {
    let i2 = rational::from_uint(i).pow(2u32);
    (c * c * &i2 - c * &i2 + int(2)).is_negative()
}

/// `c >= 3 - 2 (1 - 1/I)^2`.
pub fn lower_condition(i: &BigUint, c: &Rational) -> bool {
    c >= &lower_threshold(i)
}

fn lower_threshold(i: &BigUint) -> Rational {
    let t = Rational::one() - rational::from_uint(i).recip();
    int(3) - int(2) * &t * &t
}

/// Ratio of the geometric series bounding `E(tau)` from above.
pub fn upper_ratio(i: &BigUint, c: &Rational) -> Rational {
    let ii = rational::from_uint(i);
    (Rational::one() + int(2) / c + int(2) / (c * c * &ii * &ii)) * (c / int(3))
}

/// Ratio of the series bounding `E(tau)` from below.
pub fn lower_ratio(i: &BigUint, c: &Rational) -> Rational {
    let t = Rational::one() - rational::from_uint(i).recip();
    (int(2) / c * &t * &t + Rational::one()) * (c / int(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Finite,
    Infinite,
    Indeterminate,
}

/// Interval length at one shift: exact while it fits the digit budget,
/// otherwise a lower bound on its natural log.
#[derive(Debug, Clone, PartialEq)]
enum Length {
    Exact(BigUint),
    LnLowerBound(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEval {
    pub shift: usize,
    /// Decimal length when exact, absent once tracked in log space.
    pub interval: Option<String>,
    pub ln_interval: f64,
    pub upper: bool,
    pub lower: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioValue {
    pub exact: Option<String>,
    pub approx: f64,
}

impl RatioValue {
    fn exact(r: Rational) -> Self {
        Self {
            approx: rational::to_f64(&r),
            exact: Some(rational::format(&r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalityReport {
    pub verdict: Verdict,
    pub witness_shift: Option<usize>,
    pub ratio_upper: Option<RatioValue>,
    pub ratio_lower: Option<RatioValue>,
    pub conditions_evaluated: Vec<ConditionEval>,
    pub reason: Option<String>,
    pub i1: String,
    pub c: String,
}

pub fn classify(params: &RecursionParams, max_shift: usize) -> Result<CriticalityReport> {
    classify_with_budget(params, max_shift, DEFAULT_DIGIT_BUDGET)
}

/// Relative slack applied when rounding logs down.
const LN_SLACK: f64 = 1e-9;

fn decimal_digits(n: &BigUint) -> u64 {
    (n.bits() as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

pub fn classify_with_budget(
    params: &RecursionParams,
    max_shift: usize,
    digit_budget: u64,
) -> Result<CriticalityReport> {
    let c = &params.c;
    validate_c(&params.i1, c)?;
    let mut report = CriticalityReport {
        verdict: Verdict::Indeterminate,
        witness_shift: None,
        ratio_upper: None,
        ratio_lower: None,
        conditions_evaluated: Vec::new(),
        reason: None,
        i1: params.i1.to_string(),
        c: rational::format(c),
    };
    if !params.is_growing() {
        report.reason = Some("non-growing recursion: c·|I_1| = 1 keeps every interval equal".into());
        return Ok(report);
    }
    if c.is_one() {
        report.reason = Some("c = 1 lies between the two certified regimes (c < 1 finite, c > 1 infinite)".into());
        return Ok(report);
    }

    let ln_c = rational::ln_abs(c);
    // Log-space sufficient thresholds; both conditions are monotone in |I_k|.
    let (upper_ln, lower_ln) = if c < &Rational::one() {
        let t = int(2) / (c * (Rational::one() - c));
        (Some(0.5 * rational::ln_abs(&t)), None)
    } else {
        let t = int(4) / (c - Rational::one());
        (None, Some(rational::ln_abs(&t)))
    };

    let mut len = Length::Exact(params.i1.clone());
    for shift in 1..=max_shift {
        let (upper, lower, eval) = match &len {
            Length::Exact(i) => (
                upper_condition(i, c),
                lower_condition(i, c),
                ConditionEval {
                    shift,
                    interval: Some(i.to_string()),
                    ln_interval: rational::ln_bigint(&i.clone().into()),
                    upper: upper_condition(i, c),
                    lower: lower_condition(i, c),
                },
            ),
            Length::LnLowerBound(ln) => {
                let margin = LN_SLACK * (1.0 + ln.abs());
                let up = upper_ln.is_some_and(|t| *ln > t + margin);
                let lo = lower_ln.is_some_and(|t| *ln > t + margin);
                (
                    up,
                    lo,
                    ConditionEval {
                        shift,
                        interval: None,
                        ln_interval: *ln,
                        upper: up,
                        lower: lo,
                    },
                )
            }
        };
        report.conditions_evaluated.push(eval);
        if upper || lower {
            report.verdict = if upper { Verdict::Finite } else { Verdict::Infinite };
            report.witness_shift = Some(shift);
            if let Length::Exact(i) = &len {
                report.ratio_upper = Some(RatioValue::exact(upper_ratio(i, c)));
                report.ratio_lower = Some(RatioValue::exact(lower_ratio(i, c)));
            } else {
                // ratios tend to their I -> infinity limits
                report.ratio_upper = Some(RatioValue {
                    exact: None,
                    approx: rational::to_f64(&((Rational::one() + int(2) / c) * (c / int(3)))),
                });
                report.ratio_lower = Some(RatioValue {
                    exact: None,
                    approx: rational::to_f64(&((int(2) / c + Rational::one()) * (c / int(3)))),
                });
            }
            return Ok(report);
        }
        len = match len {
            Length::Exact(i) => {
                let est = 2 * decimal_digits(&i) + decimal_digits(&c.numer().magnitude().clone());
                if est <= digit_budget {
                    let next = c * rational::from_uint(&i) * rational::from_uint(&i);
                    Length::Exact(next.to_integer().magnitude().clone())
                } else {
                    let ln = ln_c + 2.0 * rational::ln_bigint(&i.into());
                    Length::LnLowerBound(ln - LN_SLACK * (1.0 + ln.abs()))
                }
            }
            Length::LnLowerBound(ln) => {
                let next = ln_c + 2.0 * ln;
                Length::LnLowerBound(next - LN_SLACK * (1.0 + next.abs()))
            }
        };
    }
    report.reason = Some(format!("no condition fired within {max_shift} shifts"));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesBound {
    /// Shift `k` at which the geometric ratio first drops below 1; the
    /// bound applies to the landscape re-rooted at trap `k - 1`.
    pub shift: usize,
    pub interval_at_shift: String,
    #[serde(with = "rational::serde_rational")]
    pub ratio: Rational,
    #[serde(with = "rational::serde_rational")]
    pub bound: Rational,
    #[serde(with = "rational::serde_rational")]
    pub partial_sum: Rational,
    pub terms: usize,
}

/// Geometric upper bound `2|I|/(1 - r)` for first interval `i`, with the
/// partial sum over `i_max` terms.
pub fn upper_series_at(i: &BigUint, c: &Rational, i_max: usize) -> Result<(Rational, Rational, Rational)> {
    let r = upper_ratio(i, c);
    if r >= Rational::one() {
        return Err(Error::Divergent { ratio: r });
    }
    let lead = int(2) * rational::from_uint(i);
    let bound = &lead / (Rational::one() - &r);
    let partial = (0..i_max).map(|j| &lead * Pow::pow(&r, j as u32)).sum();
    Ok((r, bound, partial))
}

/// Upper bound on `E(tau)` at the first shift where the series converges.
pub fn series_bound_upper(params: &RecursionParams, i_max: usize) -> Result<SeriesBound> {
    series_bound_upper_within(params, i_max, DEFAULT_MAX_SHIFT, DEFAULT_DIGIT_BUDGET)
}

pub fn series_bound_upper_within(
    params: &RecursionParams,
    i_max: usize,
    max_shift: usize,
    digit_budget: u64,
) -> Result<SeriesBound> {
    let c = &params.c;
    validate_c(&params.i1, c)?;
    let mut i = params.i1.clone();
    let first_ratio = upper_ratio(&i, c);
    for shift in 1..=max_shift {
        if let Ok((ratio, bound, partial_sum)) = upper_series_at(&i, c, i_max) {
            return Ok(SeriesBound {
                shift,
                interval_at_shift: i.to_string(),
                ratio,
                bound,
                partial_sum,
                terms: i_max,
            });
        }
        if c >= &Rational::one() || !params.is_growing() {
            break;
        }
        if 2 * decimal_digits(&i) > digit_budget {
            return Err(Error::DigitBudget {
                index: shift + 1,
                estimated_digits: 2 * decimal_digits(&i),
                budget: digit_budget,
            });
        }
        let next = c * rational::from_uint(&i) * rational::from_uint(&i);
        i = next.to_integer().magnitude().clone();
    }
    Err(Error::Divergent { ratio: first_ratio })
}

/// Whether the lower series diverges at the first interval.
pub fn series_bound_lower_diverges(params: &RecursionParams) -> Result<bool> {
    validate_c(&params.i1, &params.c)?;
    Ok(lower_ratio(&params.i1, &params.c) >= Rational::one())
}

/// Witness interval of a report as a machine integer, when exact and small.
pub fn witness_interval(report: &CriticalityReport) -> Option<u64> {
    let k = report.witness_shift?;
    report.conditions_evaluated.get(k - 1)?.interval.as_ref()?.parse().ok()
}
