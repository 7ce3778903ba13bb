//! One consumer meets one supplier.
//!
//! The supplier's disclosure choices (reference price, cost revelation) and
//! the consumer's belief about cost recoverability select a [`Scenario`].
//! [`decide`] then applies the purchase gates and a price rule, and scores the
//! result for both sides.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::optimizer::{optimal_price_closed_form_variant, ArgmaxSet, Representative};
use crate::preferences::{
    buyer_utility, fair_split_price, no_buy_supplier_payoff, no_buy_utility, supplier_margin, ConsumerProfile,
    CostType, SupplierProfile, UtilityVariant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// No reference price, cost believed recoverable.
    GainSeeking,
    /// Reference price shown, cost believed recoverable.
    Herding,
    /// No reference price, cost believed sunk.
    InequityAversion,
    /// Reference price shown, cost believed sunk.
    SelfImage,
    /// The supplier disclosed its cost.
    CostRevealed,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::GainSeeking,
        Scenario::Herding,
        Scenario::InequityAversion,
        Scenario::SelfImage,
        Scenario::CostRevealed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::GainSeeking => "gain_seeking",
            Scenario::Herding => "herding",
            Scenario::InequityAversion => "inequity_aversion",
            Scenario::SelfImage => "self_image",
            Scenario::CostRevealed => "cost_revealed",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the consumer takes the unit cost to be when it is hidden and they
/// believe it is sunk. Under a recoverable belief it is taken to be zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BelievedCost {
    Zero,
    #[default]
    TrueCost,
    Fixed(f64),
}

impl BelievedCost {
    pub fn validate(&self) -> Result<()> {
        if let BelievedCost::Fixed(c) = *self {
            crate::error::require_money("believed_cost", c)?;
        }
        Ok(())
    }
}

/// Settings for prices derived from the extended utility.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsSettings {
    /// Filled from the population's belief rule, not read from the mode.
    #[serde(skip)]
    pub believed_cost: BelievedCost,
    pub representative: Representative,
    pub variant: UtilityVariant,
}

/// How a consumer turns a scenario into a price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BehaviorMode {
    /// Anchor-based rules: a fraction of `v` when gain seeking, the reference
    /// price when herding or protecting self-image, `v` under inequity
    /// aversion.
    Literal {
        #[serde(default = "default_gain_fraction")]
        literal_gain_fraction: f64,
    },
    /// Maximize the extended utility against the effective reference price.
    FsModel(#[serde(default)] FsSettings),
}

pub const DEFAULT_GAIN_FRACTION: f64 = 0.4;

fn default_gain_fraction() -> f64 {
    DEFAULT_GAIN_FRACTION
}

impl Default for BehaviorMode {
    fn default() -> Self {
        BehaviorMode::Literal {
            literal_gain_fraction: DEFAULT_GAIN_FRACTION,
        }
    }
}

impl BehaviorMode {
    pub fn literal(gain_fraction: f64) -> Result<Self> {
        let mode = BehaviorMode::Literal {
            literal_gain_fraction: gain_fraction,
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn fs_model(settings: FsSettings) -> Result<Self> {
        let mode = BehaviorMode::FsModel(settings);
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BehaviorMode::Literal {
                literal_gain_fraction: f,
            } => require(
                f.is_finite() && *f > 0.0 && *f < 1.0,
                "literal_gain_fraction",
                *f,
                "0 < literal_gain_fraction < 1",
            ),
            BehaviorMode::FsModel(settings) => settings.believed_cost.validate(),
        }
    }
}

/// Result of one interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionOutcome {
    pub bought: bool,
    /// Price paid; `None` when the consumer walked away.
    pub price: Option<f64>,
    /// Price the consumer would have paid, used for the no-buy payoff.
    pub counterfactual_price: f64,
    pub consumer_payoff: f64,
    pub supplier_payoff: f64,
    pub scenario: Scenario,
}

/// Scenario implied by the disclosure choices and the believed cost type.
pub fn classify(erp_shown: bool, believed: CostType, reveals_cost: bool) -> Scenario {
    if reveals_cost {
        return Scenario::CostRevealed;
    }
    match (erp_shown, believed) {
        (false, CostType::Recoverable) => Scenario::GainSeeking,
        (true, CostType::Recoverable) => Scenario::Herding,
        (false, CostType::Sunk) => Scenario::InequityAversion,
        (true, CostType::Sunk) => Scenario::SelfImage,
    }
}

/// Scenario for a consumer whose belief matches the supplier's true type.
pub fn classify_scenario(supplier: &SupplierProfile) -> Scenario {
    classify(supplier.erp().is_some(), supplier.cost_type(), supplier.reveals_cost())
}

/// The reference price the consumer anchors on: the external one, capped by
/// their own valuation.
pub fn effective_reference_price(consumer: &ConsumerProfile, supplier: &SupplierProfile) -> f64 {
    match supplier.erp() {
        Some(erp) => erp.min(consumer.v()),
        None => consumer.v(),
    }
}

pub fn decide(consumer: &ConsumerProfile, supplier: &SupplierProfile, mode: &BehaviorMode) -> InteractionOutcome {
    decide_with_belief(consumer, supplier, supplier.cost_type(), mode)
}

/// As [`decide`], but the consumer believes the cost type is `believed`.
/// Payoffs always use the supplier's true type.
pub fn decide_with_belief(
    consumer: &ConsumerProfile,
    supplier: &SupplierProfile,
    believed: CostType,
    mode: &BehaviorMode,
) -> InteractionOutcome {
    let scenario = classify(supplier.erp().is_some(), believed, supplier.reveals_cost());
    let v = consumer.v();
    let c = supplier.cost();

    if consumer.is_free_rider() {
        return bought(v, c, 0.0, scenario);
    }

    match scenario {
        Scenario::SelfImage => {
            let erp = supplier.erp().unwrap_or(v);
            if erp > v {
                return walked_away(supplier, erp, scenario);
            }
        }
        Scenario::CostRevealed if v < c => {
            return walked_away(supplier, c, scenario);
        }
        _ => {}
    }

    let price = match (scenario, mode) {
        (Scenario::CostRevealed, _) => fair_split_price(v, c, consumer.lambda()).expect("cost gate guarantees v >= c"),
        (_, BehaviorMode::Literal { literal_gain_fraction }) => {
            literal_price(scenario, consumer, supplier, *literal_gain_fraction)
        }
        (_, BehaviorMode::FsModel(settings)) => {
            fs_model_argmax(consumer, supplier, believed, settings).representative(settings.representative)
        }
    };
    bought(v, c, price, scenario)
}

fn literal_price(
    scenario: Scenario,
    consumer: &ConsumerProfile,
    supplier: &SupplierProfile,
    gain_fraction: f64,
) -> f64 {
    match scenario {
        Scenario::GainSeeking => gain_fraction * consumer.v(),
        Scenario::InequityAversion => consumer.v(),
        Scenario::Herding | Scenario::SelfImage => effective_reference_price(consumer, supplier),
        Scenario::CostRevealed => unreachable!("handled by the fair split"),
    }
}

/// The full argmax set a consumer faces in the utility-based mode when the
/// cost is hidden.
///
/// The reference price is [`effective_reference_price`]. Under a recoverable
/// belief the consumer ignores losses (`gamma = 0`) and takes the cost to be
/// zero; under a sunk belief they use their own `gamma` and the cost given by
/// `settings.believed_cost`, capped at the reference price.
pub fn fs_model_argmax(
    consumer: &ConsumerProfile,
    supplier: &SupplierProfile,
    believed: CostType,
    settings: &FsSettings,
) -> ArgmaxSet {
    let (p_r, c, params) = fs_model_inputs(consumer, supplier, believed, settings);
    optimal_price_closed_form_variant(p_r, c, &params, settings.variant).expect("inputs are validated and c <= p_r")
}

/// Reference price, believed cost and weights fed to the optimizer.
pub fn fs_model_inputs(
    consumer: &ConsumerProfile,
    supplier: &SupplierProfile,
    believed: CostType,
    settings: &FsSettings,
) -> (f64, f64, crate::preferences::InequityParams) {
    let p_r = effective_reference_price(consumer, supplier);
    let (c, params) = match believed {
        CostType::Recoverable => (
            0.0,
            consumer.inequity().with_gamma(0.0).expect("gamma = 0 is always valid"),
        ),
        CostType::Sunk => {
            let c = match settings.believed_cost {
                BelievedCost::Zero => 0.0,
                BelievedCost::TrueCost => supplier.cost(),
                BelievedCost::Fixed(c) => c,
            };
            (c.min(p_r), consumer.inequity())
        }
    };
    (p_r, c, params)
}

fn bought(v: f64, c: f64, price: f64, scenario: Scenario) -> InteractionOutcome {
    InteractionOutcome {
        bought: true,
        price: Some(price),
        counterfactual_price: price,
        consumer_payoff: buyer_utility(v, price),
        supplier_payoff: supplier_margin(price, c),
        scenario,
    }
}

fn walked_away(supplier: &SupplierProfile, foregone: f64, scenario: Scenario) -> InteractionOutcome {
    InteractionOutcome {
        bought: false,
        price: None,
        counterfactual_price: foregone,
        consumer_payoff: no_buy_utility(foregone),
        supplier_payoff: no_buy_supplier_payoff(supplier),
        scenario,
    }
}
