//! Bundled datasets: the 382-area referendum file, the declared country
//! totals used for reconciliation, and the three-group England partition.
//!
//! The area file carries the official region, country and UK totals exactly
//! (including the rejected-ballot reason breakdown); the split of each
//! region's totals across its counting areas is a deterministic
//! reconstruction, so only region-level figures and above should be quoted
//! from it.

use crate::data::{ingest_reader, AreaRecord, ReferenceTotals};
use crate::error::Result;
use crate::meta::GroupingSpec;

pub const BREXIT_AREAS_CSV: &str = include_str!("../data/brexit_areas.csv");
pub const REFERENCE_TOTALS_CSV: &str = include_str!("../data/reference_totals.csv");
pub const ENGLAND_GROUPS_JSON: &str = include_str!("../data/england_groups.json");

/// Parse the bundled area-level dataset.
pub fn brexit_areas() -> Result<Vec<AreaRecord>> {
    ingest_reader(BREXIT_AREAS_CSV.as_bytes())
}

/// Parse the bundled declared totals (one row per country plus UK).
pub fn reference_totals() -> Result<ReferenceTotals> {
    ReferenceTotals::from_csv(REFERENCE_TOTALS_CSV)
}

/// The bundled three-group partition of the nine England regions.
pub fn england_grouping() -> Result<GroupingSpec> {
    GroupingSpec::from_json(ENGLAND_GROUPS_JSON)
}
