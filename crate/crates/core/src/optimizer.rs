//! The consumer's optimal price under the extended utility.
//!
//! On `[0, p_r]` the utility is piecewise linear with kinks at the cost `c`
//! and the fair price `p_f = (p_r + c) / 2`. The maximum is therefore
//! attained on a subset of `{0, c, p_f, p_r}`, and a whole segment is optimal
//! exactly when both of its end knots are. [`optimal_price_closed_form`]
//! uses this directly. [`optimal_price_oracle`] searches a dense grid
//! instead and shares nothing with it except the utility itself.

use std::fmt;

use serde::Serialize;

use crate::error::{require, require_money, Result};
use crate::preferences::{evaluate, midpoint, InequityParams, UtilityVariant};

/// Absolute tolerance for utility comparisons, scaled by `max(1, p_r)`.
pub const UTILITY_TOLERANCE: f64 = 1e-9;

/// Default oracle grid step, scaled by `max(1, p_r)`.
pub const ORACLE_STEP: f64 = 1e-3;

pub fn utility_tolerance(p_r: f64) -> f64 {
    UTILITY_TOLERANCE * p_r.max(1.0)
}

pub fn default_oracle_step(p_r: f64) -> f64 {
    ORACLE_STEP * p_r.max(1.0)
}

/// Closed price interval; a single price has `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PriceInterval {
    pub fn point(p: f64) -> Self {
        Self { lo: p, hi: p }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn distance(&self, p: f64) -> f64 {
        if p < self.lo {
            self.lo - p
        } else if p > self.hi {
            p - self.hi
        } else {
            0.0
        }
    }
}

impl fmt::Display for PriceInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{{{}}}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// How to pick one price out of an argmax set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representative {
    /// Highest optimal price.
    #[default]
    Upper,
    /// Lowest optimal price.
    Lower,
    /// Midpoint of the highest optimal piece.
    Midpoint,
}

/// Every price in `[0, p_r]` that maximizes the consumer's utility.
///
/// Pieces are sorted, disjoint and non-empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgmaxSet {
    pieces: Vec<PriceInterval>,
    max_utility: f64,
}

impl ArgmaxSet {
    fn from_flags(points: &[f64], optimal: &[bool], max_utility: f64) -> Self {
        let mut pieces: Vec<PriceInterval> = Vec::new();
        let mut prev_optimal = false;
        for (&p, &ok) in points.iter().zip(optimal) {
            if ok {
                match pieces.last_mut() {
                    Some(last) if prev_optimal => last.hi = p,
                    _ => pieces.push(PriceInterval::point(p)),
                }
            }
            prev_optimal = ok;
        }
        debug_assert!(!pieces.is_empty());
        Self { pieces, max_utility }
    }

    pub fn pieces(&self) -> &[PriceInterval] {
        &self.pieces
    }

    pub fn max_utility(&self) -> f64 {
        self.max_utility
    }

    /// The single optimal price, if the set is one point.
    pub fn as_point(&self) -> Option<f64> {
        match self.pieces.as_slice() {
            [only] if only.is_point() => Some(only.lo),
            _ => None,
        }
    }

    pub fn lowest(&self) -> f64 {
        self.pieces[0].lo
    }

    pub fn highest(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi
    }

    pub fn contains(&self, p: f64) -> bool {
        self.distance(p) == 0.0
    }

    /// Distance from `p` to the nearest optimal price.
    pub fn distance(&self, p: f64) -> f64 {
        self.pieces
            .iter()
            .map(|piece| piece.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from any price in `interval` to this set.
    pub fn max_distance_from(&self, interval: &PriceInterval) -> f64 {
        let mut probes = vec![interval.lo, interval.hi];
        for gap in self.pieces.windows(2) {
            let mid = midpoint(gap[0].hi, gap[1].lo);
            if mid > interval.lo && mid < interval.hi {
                probes.push(mid);
            }
        }
        probes.into_iter().map(|p| self.distance(p)).fold(0.0, f64::max)
    }

    pub fn representative(&self, rule: Representative) -> f64 {
        let top = self.pieces[self.pieces.len() - 1];
        match rule {
            Representative::Upper => top.hi,
            Representative::Lower => self.lowest(),
            Representative::Midpoint => midpoint(top.lo, top.hi),
        }
    }
}

impl fmt::Display for ArgmaxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{piece}")?;
        }
        Ok(())
    }
}

fn check_domain(p_r: f64, c: f64) -> Result<()> {
    require_money("p_r", p_r)?;
    require_money("c", c)?;
    require(c <= p_r, "c", c, "c <= p_r")
}

/// Exact argmax of the floored utility over `[0, p_r]`.
pub fn optimal_price_closed_form(p_r: f64, c: f64, params: &InequityParams) -> Result<ArgmaxSet> {
    optimal_price_closed_form_variant(p_r, c, params, UtilityVariant::Floored)
}

pub fn optimal_price_closed_form_variant(
    p_r: f64,
    c: f64,
    params: &InequityParams,
    variant: UtilityVariant,
) -> Result<ArgmaxSet> {
    check_domain(p_r, c)?;
    let mut knots = vec![0.0, c, midpoint(p_r, c), p_r];
    knots.dedup();
    let values: Vec<f64> = knots
        .iter()
        .map(|&p| evaluate(p_r, p, c, params, variant).total)
        .collect();
    Ok(select_near_max(&knots, &values, utility_tolerance(p_r)))
}

/// Grid-search argmax over `{0, step, 2 step, ..} ∪ {c, p_f, p_r}`.
pub fn optimal_price_oracle(p_r: f64, c: f64, params: &InequityParams, step: f64) -> Result<ArgmaxSet> {
    optimal_price_oracle_variant(p_r, c, params, step, UtilityVariant::Floored)
}

pub fn optimal_price_oracle_variant(
    p_r: f64,
    c: f64,
    params: &InequityParams,
    step: f64,
    variant: UtilityVariant,
) -> Result<ArgmaxSet> {
    require(step.is_finite() && step > 0.0, "step", step, "step > 0")?;
    check_domain(p_r, c)?;
    let n = (p_r / step).floor() as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| i as f64 * step)
        .filter(|&p| p <= p_r)
        .chain([c, midpoint(p_r, c), p_r])
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let values: Vec<f64> = grid
        .iter()
        .map(|&p| evaluate(p_r, p, c, params, variant).total)
        .collect();
    Ok(select_near_max(&grid, &values, utility_tolerance(p_r)))
}

fn select_near_max(points: &[f64], values: &[f64], tol: f64) -> ArgmaxSet {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let optimal: Vec<bool> = values.iter().map(|&u| u >= best - tol).collect();
    ArgmaxSet::from_flags(points, &optimal, best)
}

/// Tolerances for [`check_consistency`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckTolerance {
    /// Slack on top of the grid step when matching optimal prices.
    pub distance: f64,
    /// Relative to `max(1, p_r)` when comparing maximum utilities.
    pub utility_scale: f64,
}

impl Default for CheckTolerance {
    fn default() -> Self {
        Self {
            distance: 1e-6,
            utility_scale: UTILITY_TOLERANCE,
        }
    }
}

/// Outcome of comparing the closed form with the grid oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub passed: bool,
    pub closed_form: ArgmaxSet,
    pub oracle: ArgmaxSet,
    /// Largest distance from an oracle optimum to the closed-form set.
    pub max_distance: f64,
    pub utility_gap: f64,
    pub distance_bound: f64,
    pub utility_bound: f64,
}

/// Runs both solvers and reports whether they agree.
///
/// Only precondition violations are errors; disagreement is reported.
pub fn check_consistency(
    p_r: f64,
    c: f64,
    params: &InequityParams,
    step: f64,
    tol: CheckTolerance,
) -> Result<ConsistencyReport> {
    check_consistency_variant(p_r, c, params, step, tol, UtilityVariant::Floored)
}

pub fn check_consistency_variant(
    p_r: f64,
    c: f64,
    params: &InequityParams,
    step: f64,
    tol: CheckTolerance,
    variant: UtilityVariant,
) -> Result<ConsistencyReport> {
    let closed_form = optimal_price_closed_form_variant(p_r, c, params, variant)?;
    let oracle = optimal_price_oracle_variant(p_r, c, params, step, variant)?;
    let max_distance = oracle
        .pieces()
        .iter()
        .map(|piece| closed_form.max_distance_from(piece))
        .fold(0.0, f64::max);
    let utility_gap = (closed_form.max_utility() - oracle.max_utility()).abs();
    let distance_bound = step + tol.distance;
    let utility_bound = tol.utility_scale * p_r.max(1.0);
    Ok(ConsistencyReport {
        passed: max_distance <= distance_bound && utility_gap <= utility_bound,
        closed_form,
        oracle,
        max_distance,
        utility_gap,
        distance_bound,
        utility_bound,
    })
}

/// Parameter region, as named by the textbook rule for the optimal price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `beta < 0.5` and `beta + gamma < 1`: pay nothing.
    ZeroPrice,
    /// `beta < 0.5` and `beta + gamma > 1`: pay the cost.
    CostPrice,
    /// `beta > 0.5`: pay the fair price.
    FairPrice,
    /// `beta < 0.5` and `beta + gamma = 1`.
    LossBoundary,
    /// `beta = 0.5`.
    AltruismBoundary,
}

impl Regime {
    pub fn of(params: &InequityParams) -> Self {
        let beta = params.beta();
        let total = beta + params.gamma();
        if beta > 0.5 {
            Regime::FairPrice
        } else if beta == 0.5 {
            Regime::AltruismBoundary
        } else if total < 1.0 {
            Regime::ZeroPrice
        } else if total > 1.0 {
            Regime::CostPrice
        } else {
            Regime::LossBoundary
        }
    }

    /// The single price the rule names, when it names one.
    pub fn rule_price(self, p_r: f64, c: f64) -> Option<f64> {
        match self {
            Regime::ZeroPrice => Some(0.0),
            Regime::CostPrice => Some(c),
            Regime::FairPrice => Some(midpoint(p_r, c)),
            Regime::LossBoundary | Regime::AltruismBoundary => None,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Regime::ZeroPrice => "beta < 0.5 and beta + gamma < 1",
            Regime::CostPrice => "beta < 0.5 and beta + gamma > 1",
            Regime::FairPrice => "beta > 0.5",
            Regime::LossBoundary => "beta < 0.5 and beta + gamma = 1",
            Regime::AltruismBoundary => "beta = 0.5",
        }
    }
}
