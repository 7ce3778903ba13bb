//! Pay-what-you-want pricing: consumer payment decisions and supplier
//! disclosure strategies.
//!
//! - [`preferences`]: payoff and utility formulas.
//! - [`optimizer`]: exact argmax of the extended utility, plus a grid oracle.
//! - [`game`]: scenario classification and single-interaction decisions.
//! - [`population`]: seeded heterogeneous consumer populations.
//! - [`experiments`]: strategy cells, aggregation and sweeps.
//! - [`config`], [`report`], [`cli`]: the `pwyw` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod game;
pub mod optimizer;
pub mod population;
pub mod preferences;
pub mod report;

pub use error::{ModelError, Result};
pub use experiments::{AggregateMetrics, StrategyCell, SweepParameter};
pub use game::{BehaviorMode, InteractionOutcome, Scenario};
pub use optimizer::ArgmaxSet;
pub use population::PopulationSpec;
pub use preferences::{ConsumerProfile, CostType, InequityParams, SupplierProfile};
