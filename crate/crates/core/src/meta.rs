//! Pooling estimators over per-region log-odds and the heterogeneity
//! statistics that go with them.
//!
//! Three estimators are provided:
//!
//! - fixed-effects inverse-variance ([`pool_fixed_iv`]): weights 1/se^2;
//! - inverse-variance heterogeneity ([`pool_ivhet`]): fixed-effects point
//!   estimate, variance inflated by the between-region component;
//! - DerSimonian-Laird random effects ([`pool_random_effects`]): weights
//!   1/(se^2 + tau^2).
//!
//! Heterogeneity is quantified by Cochran's Q (chi-square with k-1 d.f.
//! under homogeneity), I^2, and the DerSimonian-Laird moment estimate of
//! tau^2. All functions are pure; inputs are immutable slices.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::effect::{log_odds_from_counts, LogOdds};
use crate::error::{Error, Result};

/// Normal multiplier for 95% confidence intervals.
pub const CI95_Z: f64 = 1.96;

/// Chi-square tail probabilities below this are reported as the floor
/// itself; at referendum scale Q underflows any double-precision tail.
pub const P_VALUE_FLOOR: f64 = 1e-300;

/// One pooling input: a labelled log-odds with its standard error, and the
/// underlying counts when the estimate came from raw data.
#[derive(Debug, Clone, Serialize)]
pub struct RegionEstimate {
    pub label: String,
    pub log_odds: LogOdds,
    pub se: f64,
    /// (leave, remain) counts when known; `from_counts` keeps these in
    /// exact agreement with `log_odds` and `se`.
    pub counts: Option<(u64, u64)>,
}

impl RegionEstimate {
    pub fn new(label: impl Into<String>, log_odds: LogOdds, se: f64) -> Result<Self> {
        if !se.is_finite() || se <= 0.0 {
            return Err(Error::InvalidStandardError(se));
        }
        Ok(Self {
            label: label.into(),
            log_odds,
            se,
            counts: None,
        })
    }

    pub fn from_counts(label: impl Into<String>, n_leave: u64, n_remain: u64) -> Result<Self> {
        let (log_odds, se) = log_odds_from_counts(n_leave, n_remain)?;
        Ok(Self {
            label: label.into(),
            log_odds,
            se,
            counts: Some((n_leave, n_remain)),
        })
    }

    pub fn variance(&self) -> f64 {
        self.se * self.se
    }
}

/// Which pooling estimator produced a [`PooledResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PoolMethod {
    #[serde(rename = "FixedIV")]
    FixedIv,
    #[serde(rename = "IVhet")]
    IvHet,
    #[serde(rename = "RandomEffectsDL")]
    RandomEffectsDl,
}

impl PoolMethod {
    pub fn label(self) -> &'static str {
        match self {
            PoolMethod::FixedIv => "IV-FE",
            PoolMethod::IvHet => "IV-Het",
            PoolMethod::RandomEffectsDl => "RE-DL",
        }
    }

    /// Parse the short CLI spelling: `fe`, `ivhet` or `re`.
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fe" | "iv-fe" | "fixed" => Some(PoolMethod::FixedIv),
            "ivhet" | "iv-het" => Some(PoolMethod::IvHet),
            "re" | "re-dl" | "random" => Some(PoolMethod::RandomEffectsDl),
            _ => None,
        }
    }
}

/// Cochran's Q and derived heterogeneity summaries.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HeterogeneityStats {
    pub q: f64,
    /// Degrees of freedom, k - 1.
    pub df: usize,
    /// max(0, (Q - df) / Q): share of total variation beyond sampling error.
    pub i_squared: f64,
    /// DerSimonian-Laird between-region variance, truncated at zero.
    pub tau2: f64,
    /// Upper chi-square tail at `df`, floored at [`P_VALUE_FLOOR`].
    pub p_value: f64,
}

impl HeterogeneityStats {
    fn degenerate() -> Self {
        Self {
            q: 0.0,
            df: 0,
            i_squared: 0.0,
            tau2: 0.0,
            p_value: 1.0,
        }
    }
}

/// A normalized per-region weight as reported alongside a pooled estimate.
#[derive(Debug, Clone, Serialize)]
pub struct Weight {
    pub label: String,
    pub weight: f64,
}

/// Output of a pooling estimator.
#[derive(Debug, Clone, Serialize)]
pub struct PooledResult {
    pub method: PoolMethod,
    pub estimate: LogOdds,
    pub se: f64,
    /// estimate +/- 1.96 se.
    pub ci95: (f64, f64),
    /// Normalized weights (sum to 1), in input order.
    pub weights: Vec<Weight>,
    pub het: HeterogeneityStats,
}

impl PooledResult {
    /// True when the 95% CI contains zero (a CI touching zero counts as
    /// containing it).
    pub fn ci_contains_zero(&self) -> bool {
        self.ci95.0 <= 0.0 && self.ci95.1 >= 0.0
    }
}

fn check_inputs(regions: &[RegionEstimate], needed: usize) -> Result<()> {
    if regions.is_empty() {
        return Err(Error::EmptyInput("no regions to pool"));
    }
    if regions.len() < needed {
        return Err(Error::TooFewRegions {
            needed,
            got: regions.len(),
        });
    }
    Ok(())
}

/// Fixed-effects estimate and raw weight sum. Weights are 1/se^2.
fn fe_parts(regions: &[RegionEstimate]) -> (f64, f64, Vec<f64>) {
    let weights: Vec<f64> = regions.iter().map(|r| 1.0 / r.variance()).collect();
    let sum_w: f64 = weights.iter().sum();
    let est = regions
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * r.log_odds.value())
        .sum::<f64>()
        / sum_w;
    (est, sum_w, weights)
}

fn q_statistic(regions: &[RegionEstimate]) -> f64 {
    let (est, _, weights) = fe_parts(regions);
    regions
        .iter()
        .zip(&weights)
        .map(|(r, w)| {
            let dev = r.log_odds.value() - est;
            w * dev * dev
        })
        .sum()
}

/// Keep the pooled point estimate inside the input range; a weighted mean
/// can drift out by a rounding ulp when the inputs coincide.
fn clamp_to_input_range(est: f64, regions: &[RegionEstimate]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in regions {
        lo = lo.min(r.log_odds.value());
        hi = hi.max(r.log_odds.value());
    }
    est.clamp(lo, hi)
}

fn normalized(regions: &[RegionEstimate], weights: &[f64]) -> Vec<Weight> {
    let sum: f64 = weights.iter().sum();
    regions
        .iter()
        .zip(weights)
        .map(|(r, w)| Weight {
            label: r.label.clone(),
            weight: w / sum,
        })
        .collect()
}

/// Cochran's Q with df = k - 1, plus I^2, the DerSimonian-Laird tau^2 and
/// the chi-square upper-tail p-value. Requires k >= 2.
pub fn cochran_q(regions: &[RegionEstimate]) -> Result<HeterogeneityStats> {
    check_inputs(regions, 2)?;
    let q = q_statistic(regions);
    let df = regions.len() - 1;
    let i_squared = if q > 0.0 {
        ((q - df as f64) / q).max(0.0)
    } else {
        0.0
    };
    let tau2 = dl_tau2(regions)?;
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    let p_value = dist.sf(q).clamp(P_VALUE_FLOOR, 1.0);
    Ok(HeterogeneityStats {
        q,
        df,
        i_squared,
        tau2,
        p_value,
    })
}

/// DerSimonian-Laird moment estimate of the between-region variance:
/// max(0, (Q - (k-1)) / (sum w - sum w^2 / sum w)) with w = 1/se^2.
pub fn dl_tau2(regions: &[RegionEstimate]) -> Result<f64> {
    check_inputs(regions, 2)?;
    let q = q_statistic(regions);
    let weights: Vec<f64> = regions.iter().map(|r| 1.0 / r.variance()).collect();
    let sum_w: f64 = weights.iter().sum();
    let sum_w2: f64 = weights.iter().map(|w| w * w).sum();
    let c = sum_w - sum_w2 / sum_w;
    let df = (regions.len() - 1) as f64;
    Ok(((q - df) / c).max(0.0))
}

/// Inverse-variance fixed-effects pooling. Requires k >= 1; heterogeneity
/// statistics are filled in as a by-product when k >= 2.
pub fn pool_fixed_iv(regions: &[RegionEstimate]) -> Result<PooledResult> {
    check_inputs(regions, 1)?;
    let (est, sum_w, weights) = fe_parts(regions);
    let het = if regions.len() >= 2 {
        cochran_q(regions)?
    } else {
        HeterogeneityStats::degenerate()
    };
    let se = (1.0 / sum_w).sqrt();
    let est = clamp_to_input_range(est, regions);
    Ok(PooledResult {
        method: PoolMethod::FixedIv,
        estimate: LogOdds::new(est)?,
        se,
        ci95: (est - CI95_Z * se, est + CI95_Z * se),
        weights: normalized(regions, &weights),
        het,
    })
}

/// DerSimonian-Laird random-effects pooling: weights 1/(se^2 + tau^2).
/// Requires k >= 2. With tau^2 = 0 this coincides with [`pool_fixed_iv`].
pub fn pool_random_effects(regions: &[RegionEstimate]) -> Result<PooledResult> {
    check_inputs(regions, 2)?;
    let het = cochran_q(regions)?;
    let weights: Vec<f64> = regions
        .iter()
        .map(|r| 1.0 / (r.variance() + het.tau2))
        .collect();
    let sum_w: f64 = weights.iter().sum();
    let est = regions
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * r.log_odds.value())
        .sum::<f64>()
        / sum_w;
    let se = (1.0 / sum_w).sqrt();
    let est = clamp_to_input_range(est, regions);
    Ok(PooledResult {
        method: PoolMethod::RandomEffectsDl,
        estimate: LogOdds::new(est)?,
        se,
        ci95: (est - CI95_Z * se, est + CI95_Z * se),
        weights: normalized(regions, &weights),
        het,
    })
}

/// Inverse-variance heterogeneity pooling: the point estimate is exactly the
/// fixed-effects one, but the variance is sum over regions of
/// wh_i^2 (se_i^2 + tau^2) with wh the normalized fixed-effects weights.
/// Requires k >= 2.
pub fn pool_ivhet(regions: &[RegionEstimate]) -> Result<PooledResult> {
    check_inputs(regions, 2)?;
    let (est, sum_w, weights) = fe_parts(regions);
    let het = cochran_q(regions)?;
    let variance: f64 = regions
        .iter()
        .zip(&weights)
        .map(|(r, w)| {
            let wh = w / sum_w;
            wh * wh * (r.variance() + het.tau2)
        })
        .sum();
    let se = variance.sqrt();
    let est = clamp_to_input_range(est, regions);
    Ok(PooledResult {
        method: PoolMethod::IvHet,
        estimate: LogOdds::new(est)?,
        se,
        ci95: (est - CI95_Z * se, est + CI95_Z * se),
        weights: normalized(regions, &weights),
        het,
    })
}

/// Dispatch helper used by grouped pooling and the CLI.
pub fn pool_with(method: PoolMethod, regions: &[RegionEstimate]) -> Result<PooledResult> {
    match method {
        PoolMethod::FixedIv => pool_fixed_iv(regions),
        PoolMethod::IvHet => pool_ivhet(regions),
        PoolMethod::RandomEffectsDl => pool_random_effects(regions),
    }
}

/// One row of the leave-one-out sensitivity scan.
#[derive(Debug, Clone, Serialize)]
pub struct LooEntry {
    pub label: String,
    /// Q over the remaining k-1 regions.
    pub q_without: f64,
    /// Q(all) - Q(without this region).
    pub q_drop: f64,
}

/// Recompute Q with each region excluded in turn; sorted by descending
/// drop, ties kept in input order. Requires k >= 3.
pub fn loo_q_sensitivity(regions: &[RegionEstimate]) -> Result<Vec<LooEntry>> {
    check_inputs(regions, 3)?;
    let q_full = q_statistic(regions);
    let mut entries: Vec<LooEntry> = (0..regions.len())
        .map(|i| {
            let rest: Vec<RegionEstimate> = regions
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| r.clone())
                .collect();
            let q_without = q_statistic(&rest);
            LooEntry {
                label: regions[i].label.clone(),
                q_without,
                q_drop: q_full - q_without,
            }
        })
        .collect();
    entries.sort_by(|a, b| b.q_drop.partial_cmp(&a.q_drop).expect("finite Q"));
    Ok(entries)
}

/// A named, disjoint, exhaustive partition of region labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupingSpec {
    pub groups: Vec<Group>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    pub members: Vec<String>,
}

impl GroupingSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(json)?;
        spec.basic_checks()?;
        Ok(spec)
    }

    fn basic_checks(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::Grouping("no groups defined".into()));
        }
        let mut seen_groups = std::collections::HashSet::new();
        let mut seen_members = std::collections::HashSet::new();
        for g in &self.groups {
            if g.members.is_empty() {
                return Err(Error::Grouping(format!("group {:?} is empty", g.name)));
            }
            if !seen_groups.insert(g.name.as_str()) {
                return Err(Error::Grouping(format!(
                    "duplicate group name {:?}",
                    g.name
                )));
            }
            for m in &g.members {
                if !seen_members.insert(m.as_str()) {
                    return Err(Error::Grouping(format!(
                        "label {:?} appears in more than one group",
                        m
                    )));
                }
            }
        }
        Ok(())
    }

    /// Check that the spec is a partition of exactly `labels`.
    pub fn validate_partition<S: AsRef<str>>(&self, labels: &[S]) -> Result<()> {
        self.basic_checks()?;
        let members: std::collections::HashSet<&str> = self
            .groups
            .iter()
            .flat_map(|g| g.members.iter().map(|m| m.as_str()))
            .collect();
        let labels: std::collections::HashSet<&str> = labels.iter().map(|l| l.as_ref()).collect();
        for m in &members {
            if !labels.contains(m) {
                return Err(Error::Grouping(format!(
                    "group member {:?} is not a region in the input",
                    m
                )));
            }
        }
        for l in &labels {
            if !members.contains(l) {
                return Err(Error::Grouping(format!(
                    "region {:?} is missing from the grouping",
                    l
                )));
            }
        }
        Ok(())
    }
}

/// Output of hierarchical pooling: per-group summaries plus the pooled
/// summary across groups.
#[derive(Debug, Clone, Serialize)]
pub struct GroupedResult {
    pub groups: Vec<GroupSummary>,
    pub overall: PooledResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub name: String,
    pub size: usize,
    pub result: PooledResult,
}

fn passthrough(method: PoolMethod, region: &RegionEstimate) -> PooledResult {
    let est = region.log_odds.value();
    PooledResult {
        method,
        estimate: region.log_odds,
        se: region.se,
        ci95: (est - CI95_Z * region.se, est + CI95_Z * region.se),
        weights: vec![Weight {
            label: region.label.clone(),
            weight: 1.0,
        }],
        het: HeterogeneityStats::degenerate(),
    }
}

/// Pool each group with `within` (singleton groups pass through), then pool
/// the group-level summaries with `across`. The spec must partition the
/// input labels exactly.
pub fn pool_grouped(
    regions: &[RegionEstimate],
    spec: &GroupingSpec,
    within: PoolMethod,
    across: PoolMethod,
) -> Result<GroupedResult> {
    check_inputs(regions, 1)?;
    let labels: Vec<&str> = regions.iter().map(|r| r.label.as_str()).collect();
    spec.validate_partition(&labels)?;

    let mut summaries = Vec::with_capacity(spec.groups.len());
    for g in &spec.groups {
        let members: Vec<RegionEstimate> = regions
            .iter()
            .filter(|r| g.members.iter().any(|m| m == &r.label))
            .cloned()
            .collect();
        let result = if members.len() == 1 {
            passthrough(within, &members[0])
        } else {
            pool_with(within, &members)?
        };
        summaries.push(GroupSummary {
            name: g.name.clone(),
            size: members.len(),
            result,
        });
    }

    let group_estimates: Vec<RegionEstimate> = summaries
        .iter()
        .map(|s| RegionEstimate::new(s.name.clone(), s.result.estimate, s.result.se))
        .collect::<Result<_>>()?;
    let overall = if group_estimates.len() == 1 {
        passthrough(across, &group_estimates[0])
    } else {
        pool_with(across, &group_estimates)?
    };

    Ok(GroupedResult {
        groups: summaries,
        overall,
    })
}
