//! Meta-analytic aggregation of binary referendum results.
//!
//! A referendum split reported as a single nationwide average ignores both
//! within-region sampling variability and between-region heterogeneity.
//! This crate treats each region as one study in a meta-analysis: region
//! results become log-odds with binomial standard errors, which are pooled
//! by fixed-effects inverse-variance, IVhet, or DerSimonian-Laird
//! random-effects estimators, with Cochran's Q / I^2 / tau^2 quantifying the
//! heterogeneity. Pooled log-odds convert to Cohen-scale effect sizes so
//! the practical size of a majority claim can be judged.
//!
//! Modules:
//!
//! - [`effect`]: proportion / odds / log-odds / effect-size transforms and
//!   the turnout-threshold arithmetic;
//! - [`meta`]: pooling estimators, heterogeneity statistics, leave-one-out
//!   sensitivity, grouped (hierarchical) pooling;
//! - [`data`]: area-level CSV ingestion, validation, aggregation and
//!   reconciliation against declared totals;
//! - [`synthetic`]: beta-binomial generator used for estimator-recovery
//!   and calibration checks;
//! - [`report`]: forest plots (SVG), results tables (markdown/CSV/JSON);
//! - [`fixtures`]: the bundled referendum dataset and reference totals.

pub mod data;
pub mod effect;
pub mod error;
pub mod fixtures;
pub mod meta;
pub mod report;
pub mod synthetic;

pub use data::{
    aggregate, expand_check, ingest, ingest_reader, reconcile, to_canonical_csv, AggregationLevel,
    AreaRecord, Country, ReconciliationReport, ReferenceTotals, Region, RegionAggregate,
};
pub use effect::{
    chin_effect_size, effect_size_thresholds, effect_size_to_proportion, eligible_share,
    log_odds_from_counts, log_odds_to_proportion, proportion_to_log_odds,
    required_split_for_eligible_majority, CohenBand, EffectSize, LogOdds, Proportion,
};
pub use error::{Error, Result};
pub use meta::{
    cochran_q, dl_tau2, loo_q_sensitivity, pool_fixed_iv, pool_grouped, pool_ivhet,
    pool_random_effects, pool_with, GroupedResult, GroupingSpec, HeterogeneityStats, LooEntry,
    PoolMethod, PooledResult, RegionEstimate,
};
pub use report::{render_forest, render_results_table, render_threshold_table, ForestPlotSpec};
pub use synthetic::{simulate, solve_beta_params, GenerativeConfig};
