//! Shared setup for the criterion benchmarks.

use refmeta::data::{aggregate, AggregationLevel};
use refmeta::meta::RegionEstimate;

/// The 13 region estimates from the bundled dataset.
pub fn region_estimates() -> Vec<RegionEstimate> {
    let records = refmeta::fixtures::brexit_areas().expect("bundled dataset parses");
    aggregate(&records, &AggregationLevel::Region13)
        .expect("aggregation succeeds")
        .into_iter()
        .map(|a| a.estimate)
        .collect()
}
