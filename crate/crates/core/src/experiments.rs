//! Running populations through supplier strategies.
//!
//! Consumers are decided in parallel, but outcomes are collected in index
//! order and summed sequentially, so every metric is bit-identical for any
//! thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require, require_money, ModelError, Result};
use crate::game::{decide, BehaviorMode, InteractionOutcome};
use crate::population::{sample_population, Distribution, PopulationSpec};
use crate::preferences::{ConsumerProfile, CostType, SupplierProfile};

/// One supplier strategy: what it discloses and what it pays per unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyCell {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub provide_erp: bool,
    #[serde(default)]
    pub erp_level: Option<f64>,
    #[serde(default)]
    pub reveal_cost: bool,
    pub cost_type: CostType,
    pub cost: f64,
}

impl StrategyCell {
    pub fn new(cost: f64, cost_type: CostType) -> Self {
        Self {
            name: None,
            provide_erp: false,
            erp_level: None,
            reveal_cost: false,
            cost_type,
            cost,
        }
    }

    pub fn with_erp(mut self, erp: f64) -> Self {
        self.provide_erp = true;
        self.erp_level = Some(erp);
        self
    }

    pub fn revealing_cost(mut self) -> Self {
        self.reveal_cost = true;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_money("cost", self.cost)?;
        match (self.provide_erp, self.erp_level) {
            (true, Some(erp)) => require_money("erp_level", erp),
            (false, None) => Ok(()),
            (true, None) => require(false, "erp_level", f64::NAN, "a value when provide_erp is true"),
            (false, Some(erp)) => require(false, "erp_level", erp, "null when provide_erp is false"),
        }
    }

    pub fn supplier(&self) -> Result<SupplierProfile> {
        self.validate()?;
        SupplierProfile::new(self.cost, self.cost_type, self.erp_level, self.reveal_cost)
    }

    /// Display name; falls back to a description of the disclosure choices.
    pub fn label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let mut label = format!("{}_c{}", self.cost_type.as_str(), self.cost);
        if let Some(erp) = self.erp_level {
            label.push_str(&format!("_erp{erp}"));
        }
        if self.reveal_cost {
            label.push_str("_revealed");
        }
        label
    }
}

/// Population-level results of one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub buyers: usize,
    pub demand_rate: f64,
    /// Mean over buyers; `None` when nobody bought.
    pub mean_price_paid: Option<f64>,
    pub revenue: f64,
    pub total_cost_incurred: f64,
    pub profit: f64,
    pub mean_consumer_surplus: Option<f64>,
    /// Share of buyers who paid exactly zero.
    pub free_rider_rate: Option<f64>,
}

impl AggregateMetrics {
    pub const COLUMNS: [&'static str; 8] = [
        "buyers",
        "demand_rate",
        "mean_price_paid",
        "revenue",
        "total_cost_incurred",
        "profit",
        "mean_consumer_surplus",
        "free_rider_rate",
    ];

    /// Metric values in [`Self::COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            Some(self.buyers as f64),
            Some(self.demand_rate),
            self.mean_price_paid,
            Some(self.revenue),
            Some(self.total_cost_incurred),
            Some(self.profit),
            self.mean_consumer_surplus,
            self.free_rider_rate,
        ]
    }
}

/// Summarizes outcomes of a population facing `cell`.
pub fn aggregate(
    consumers: &[ConsumerProfile],
    outcomes: &[InteractionOutcome],
    cell: &StrategyCell,
) -> AggregateMetrics {
    let population = outcomes.len();
    let mut buyers = 0usize;
    let mut zero_payers = 0usize;
    let mut revenue = 0.0;
    let mut surplus = 0.0;
    for (consumer, outcome) in consumers.iter().zip(outcomes) {
        if let Some(price) = outcome.price {
            buyers += 1;
            revenue += price;
            surplus += consumer.v() - price;
            if price == 0.0 {
                zero_payers += 1;
            }
        }
    }
    let units_charged = match cell.cost_type {
        CostType::Recoverable => buyers,
        CostType::Sunk => population,
    };
    let total_cost_incurred = cell.cost * units_charged as f64;
    let per_buyer = |x: f64| (buyers > 0).then(|| x / buyers as f64);
    AggregateMetrics {
        buyers,
        demand_rate: if population == 0 {
            0.0
        } else {
            buyers as f64 / population as f64
        },
        mean_price_paid: per_buyer(revenue),
        revenue,
        total_cost_incurred,
        profit: revenue - total_cost_incurred,
        mean_consumer_surplus: per_buyer(surplus),
        free_rider_rate: per_buyer(zero_payers as f64),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRun {
    pub metrics: AggregateMetrics,
    pub outcomes: Vec<InteractionOutcome>,
}

pub fn run_cell(population: &[ConsumerProfile], strategy: &StrategyCell, mode: &BehaviorMode) -> Result<CellRun> {
    mode.validate()?;
    let supplier = strategy.supplier()?;
    let outcomes: Vec<InteractionOutcome> = population
        .par_iter()
        .map(|consumer| decide(consumer, &supplier, mode))
        .collect();
    Ok(CellRun {
        metrics: aggregate(population, &outcomes, strategy),
        outcomes,
    })
}

/// Runs every cell against the same population.
pub fn compare_strategies(
    population: &[ConsumerProfile],
    cells: &[StrategyCell],
    mode: &BehaviorMode,
) -> Result<Vec<AggregateMetrics>> {
    cells
        .iter()
        .map(|cell| run_cell(population, cell, mode).map(|run| run.metrics))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Lambda,
    Gamma,
    ErpLevel,
    FreeRiderShare,
    Cost,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::Gamma => "gamma",
            SweepParameter::ErpLevel => "erp_level",
            SweepParameter::FreeRiderShare => "free_rider_share",
            SweepParameter::Cost => "cost",
        }
    }

    /// Whether changing this parameter requires drawing a new population.
    pub fn resamples(self) -> bool {
        matches!(self, SweepParameter::Lambda | SweepParameter::FreeRiderShare)
    }

    pub fn validate_value(self, x: f64) -> Result<()> {
        let field = self.as_str();
        let (ok, requirement) = match self {
            SweepParameter::Lambda => (x > 0.0 && x <= 1.0, "0 < lambda <= 1"),
            SweepParameter::FreeRiderShare => ((0.0..=1.0).contains(&x), "0 <= free_rider_share <= 1"),
            SweepParameter::Gamma | SweepParameter::ErpLevel | SweepParameter::Cost => (x >= 0.0, "a value >= 0"),
        };
        require(x.is_finite() && ok, field, x, requirement)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: AggregateMetrics,
}

/// One row per grid value. The population is redrawn only for parameters
/// that enter sampling; otherwise the same consumers face every row.
pub fn sweep(
    spec: &PopulationSpec,
    template: &StrategyCell,
    parameter: SweepParameter,
    grid: &[f64],
    mode: &BehaviorMode,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    for &x in grid {
        parameter.validate_value(x)?;
    }
    template.validate()?;
    mode.validate()?;

    let shared = if parameter.resamples() {
        None
    } else {
        Some(sample_population(spec)?)
    };

    grid.iter()
        .map(|&x| {
            let mut cell = template.clone();
            let population = match parameter {
                SweepParameter::Lambda => sample_population(&PopulationSpec {
                    lambda: Distribution::Constant { value: x },
                    ..spec.clone()
                })?,
                SweepParameter::FreeRiderShare => sample_population(&PopulationSpec {
                    free_rider_share: x,
                    ..spec.clone()
                })?,
                SweepParameter::Gamma => shared
                    .as_deref()
                    .unwrap_or_default()
                    .iter()
                    .map(|c| c.with_gamma(x))
                    .collect::<Result<Vec<_>>>()?,
                SweepParameter::ErpLevel => {
                    cell = cell.with_erp(x);
                    shared.clone().unwrap_or_default()
                }
                SweepParameter::Cost => {
                    cell.cost = x;
                    shared.clone().unwrap_or_default()
                }
            };
            let run = run_cell(&population, &cell, mode)?;
            Ok(SweepRow {
                value: x,
                metrics: run.metrics,
            })
        })
        .collect()
}
