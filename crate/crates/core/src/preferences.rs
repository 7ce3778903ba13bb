//! Consumer and supplier payoffs under pay-what-you-want pricing.
//!
//! Everything here is a pure function of its arguments. Prices, values and
//! costs are plain `f64` amounts of money.
//!
//! The extended inequity-aversion utility compares the consumer's surplus
//! `p_r - p` with the supplier's surplus `p - c`. By default the supplier's
//! surplus is floored at zero inside that comparison, so a price below cost
//! costs the consumer `beta + gamma` per dollar and not `2 beta + gamma`.
//! [`UtilityVariant::Literal`] keeps the unfloored comparison.

use serde::{Deserialize, Serialize};

use crate::error::{require, require_money, Result};

/// Whether the supplier gets its unit cost back when an item goes unsold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostType {
    /// Type R: an unsold unit costs the supplier nothing.
    Recoverable,
    /// Type S: the unit cost is lost whether or not the item sells.
    Sunk,
}

impl CostType {
    pub fn as_str(self) -> &'static str {
        match self {
            CostType::Recoverable => "recoverable",
            CostType::Sunk => "sunk",
        }
    }
}

/// Inequity-aversion weights: envy `alpha`, altruism `beta` and
/// sensitivity to supplier losses `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequityParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl InequityParams {
    /// Requires `0 <= beta < 1`, `alpha >= beta` and `gamma >= 0`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        require(
            beta.is_finite() && (0.0..1.0).contains(&beta),
            "beta",
            beta,
            "0 <= beta < 1",
        )?;
        require(alpha.is_finite() && alpha >= beta, "alpha", alpha, "alpha >= beta")?;
        require(gamma.is_finite() && gamma >= 0.0, "gamma", gamma, "gamma >= 0")?;
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same weights with a different loss sensitivity.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, gamma)
    }
}

/// One consumer's private parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsumerProfile {
    v: f64,
    inequity: InequityParams,
    lambda: f64,
    is_free_rider: bool,
}

impl ConsumerProfile {
    pub fn new(v: f64, alpha: f64, beta: f64, gamma: f64, lambda: f64, is_free_rider: bool) -> Result<Self> {
        require_money("v", v)?;
        let inequity = InequityParams::new(alpha, beta, gamma)?;
        require(
            lambda.is_finite() && lambda > 0.0 && lambda <= 1.0,
            "lambda",
            lambda,
            "0 < lambda <= 1",
        )?;
        Ok(Self {
            v,
            inequity,
            lambda,
            is_free_rider,
        })
    }

    /// Internal reference price.
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn alpha(&self) -> f64 {
        self.inequity.alpha
    }

    pub fn beta(&self) -> f64 {
        self.inequity.beta
    }

    pub fn gamma(&self) -> f64 {
        self.inequity.gamma
    }

    /// Share of the surplus `v - c` passed on when the cost is revealed.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_free_rider(&self) -> bool {
        self.is_free_rider
    }

    pub fn inequity(&self) -> InequityParams {
        self.inequity
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Ok(Self {
            inequity: self.inequity.with_gamma(gamma)?,
            ..*self
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.v,
            self.alpha(),
            self.beta(),
            self.gamma(),
            lambda,
            self.is_free_rider,
        )
    }
}

/// The supplier side of one interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupplierProfile {
    cost: f64,
    cost_type: CostType,
    erp: Option<f64>,
    reveals_cost: bool,
}

impl SupplierProfile {
    pub fn new(cost: f64, cost_type: CostType, erp: Option<f64>, reveals_cost: bool) -> Result<Self> {
        require_money("cost", cost)?;
        if let Some(erp) = erp {
            require_money("erp", erp)?;
        }
        Ok(Self {
            cost,
            cost_type,
            erp,
            reveals_cost,
        })
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn cost_type(&self) -> CostType {
        self.cost_type
    }

    /// External reference price, if one is shown to the consumer.
    pub fn erp(&self) -> Option<f64> {
        self.erp
    }

    pub fn reveals_cost(&self) -> bool {
        self.reveals_cost
    }
}

/// How the supplier's surplus enters the inequity comparison.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityVariant {
    /// Supplier surplus is `max(p - c, 0)`; losses are priced by `gamma` only.
    #[default]
    Floored,
    /// Supplier surplus is `p - c` even when negative.
    Literal,
}

/// The extended utility split into its surplus and penalty terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityBreakdown {
    pub surplus_term: f64,
    pub envy_penalty: f64,
    pub altruism_penalty: f64,
    pub loss_penalty: f64,
    pub total: f64,
}

/// Utility of buying at `p` for a consumer valuing the item at `v`.
pub fn buyer_utility(v: f64, p: f64) -> f64 {
    v - p
}

/// Payoff of not buying: the price the consumer would have paid.
pub fn no_buy_utility(p_foregone: f64) -> f64 {
    p_foregone
}

/// Supplier margin on a sale; negative when the price is below cost.
pub fn supplier_margin(p: f64, c: f64) -> f64 {
    p - c
}

/// Supplier payoff when the consumer walks away.
pub fn no_buy_supplier_payoff(supplier: &SupplierProfile) -> f64 {
    match supplier.cost_type {
        CostType::Recoverable => 0.0,
        CostType::Sunk => -supplier.cost,
    }
}

/// Price of a consumer who knows the cost and hands the supplier a share
/// `lambda` of the surplus: `c + lambda (v - c)`.
pub fn fair_split_price(v: f64, c: f64, lambda: f64) -> Result<f64> {
    check_fair_split(v, c, lambda)?;
    Ok(c + lambda * (v - c))
}

/// Buyer utility at [`fair_split_price`], `(1 - lambda)(v - c)`.
pub fn fair_split_utility(v: f64, c: f64, lambda: f64) -> Result<f64> {
    check_fair_split(v, c, lambda)?;
    Ok((1.0 - lambda) * (v - c))
}

fn check_fair_split(v: f64, c: f64, lambda: f64) -> Result<()> {
    require_money("c", c)?;
    require_money("v", v)?;
    require(v >= c, "v", v, "v >= c")?;
    require(
        lambda.is_finite() && lambda > 0.0 && lambda <= 1.0,
        "lambda",
        lambda,
        "0 < lambda <= 1",
    )
}

/// The price that splits the surplus `p_r - c` evenly.
pub fn midpoint_fair_price(p_r: f64, c: f64) -> Result<f64> {
    require_money("c", c)?;
    require_money("p_r", p_r)?;
    require(p_r >= c, "c", c, "c <= p_r")?;
    Ok(midpoint(p_r, c))
}

#[inline]
pub(crate) fn midpoint(p_r: f64, c: f64) -> f64 {
    0.5 * (p_r + c)
}

/// Extended inequity-aversion utility of paying `p` against reference price
/// `p_r` when the unit cost is `c`, with the default floored variant.
pub fn fs_extended_utility(p_r: f64, p: f64, c: f64, params: &InequityParams) -> Result<UtilityBreakdown> {
    fs_extended_utility_variant(p_r, p, c, params, UtilityVariant::Floored)
}

pub fn fs_extended_utility_variant(
    p_r: f64,
    p: f64,
    c: f64,
    params: &InequityParams,
    variant: UtilityVariant,
) -> Result<UtilityBreakdown> {
    require_money("p_r", p_r)?;
    require_money("p", p)?;
    require_money("c", c)?;
    Ok(evaluate(p_r, p, c, params, variant))
}

/// Unchecked evaluation. Inputs must already satisfy the preconditions.
pub(crate) fn evaluate(p_r: f64, p: f64, c: f64, params: &InequityParams, variant: UtilityVariant) -> UtilityBreakdown {
    let surplus_term = p_r - p;
    // Consumer surplus minus supplier surplus. Written as 2 (p_f - p) when the
    // supplier surplus is p - c so that it is exactly zero at the midpoint.
    let advantage = match variant {
        UtilityVariant::Floored if p < c => surplus_term,
        _ => 2.0 * (midpoint(p_r, c) - p),
    };
    let envy_penalty = params.alpha * (-advantage).max(0.0);
    let altruism_penalty = params.beta * advantage.max(0.0);
    let loss_penalty = params.gamma * (c - p).max(0.0);
    UtilityBreakdown {
        surplus_term,
        envy_penalty,
        altruism_penalty,
        loss_penalty,
        total: surplus_term - envy_penalty - altruism_penalty - loss_penalty,
    }
}
