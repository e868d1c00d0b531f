//! Scalar transforms between proportions, odds, log-odds and Cohen-scale
//! effect sizes, plus the turnout/majority-threshold arithmetic.
//!
//! All logarithms are natural. A vote split is summarized as the proportion
//! of the winning option; the log-odds `ln(p/(1-p))` is approximately normal
//! for large counts, which is what makes the pooling machinery in
//! [`crate::meta`] valid.

use serde::Serialize;

use crate::error::{Error, Result};

/// Divisor converting a log-odds into a Cohen's d effect size (Chinn's
/// approximation: d = log-odds / 1.81).
pub const CHIN_DIVISOR: f64 = 1.81;

/// A proportion strictly inside (0, 1).
///
/// Exact 0 and 1 are rejected because their log-odds are not finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Proportion(f64);

impl Proportion {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidProportion(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A log-odds value in natural-log units. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct LogOdds(f64);

impl LogOdds {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonFinite {
                what: "log-odds",
                value,
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Conventional magnitude bands for |d| on Cohen's scale.
///
/// Classification is half-open on the left: |d| < 0.05 is negligible,
/// [0.05, 0.10) very small, [0.10, 0.20) small, [0.20, 0.50) medium,
/// [0.50, 1.30) large, and 1.30 or above very large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CohenBand {
    Negligible,
    VerySmall,
    Small,
    Medium,
    Large,
    VeryLarge,
}

impl CohenBand {
    /// Band boundaries on |d|, strictly increasing.
    pub const BOUNDARIES: [f64; 5] = [0.05, 0.10, 0.20, 0.50, 1.30];

    /// Classify a finite effect size by |d|. Total: every finite d maps to
    /// exactly one band.
    pub fn classify(d: f64) -> Self {
        let a = d.abs();
        if a < 0.05 {
            CohenBand::Negligible
        } else if a < 0.10 {
            CohenBand::VerySmall
        } else if a < 0.20 {
            CohenBand::Small
        } else if a < 0.50 {
            CohenBand::Medium
        } else if a < 1.30 {
            CohenBand::Large
        } else {
            CohenBand::VeryLarge
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CohenBand::Negligible => "Negligible",
            CohenBand::VerySmall => "Very small",
            CohenBand::Small => "Small",
            CohenBand::Medium => "Medium",
            CohenBand::Large => "Large",
            CohenBand::VeryLarge => "Very large",
        }
    }

    /// The [low, high) range of |d| covered by this band; `None` high bound
    /// for the unbounded top band.
    fn range(self) -> (f64, Option<f64>) {
        match self {
            CohenBand::Negligible => (0.0, Some(0.05)),
            CohenBand::VerySmall => (0.05, Some(0.10)),
            CohenBand::Small => (0.10, Some(0.20)),
            CohenBand::Medium => (0.20, Some(0.50)),
            CohenBand::Large => (0.50, Some(1.30)),
            CohenBand::VeryLarge => (1.30, None),
        }
    }
}

/// A standardized effect size on Cohen's scale with its band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectSize {
    pub d: f64,
    pub band: CohenBand,
}

impl EffectSize {
    pub fn from_d(d: f64) -> Result<Self> {
        if !d.is_finite() {
            return Err(Error::NonFinite {
                what: "effect size",
                value: d,
            });
        }
        Ok(Self {
            d,
            band: CohenBand::classify(d),
        })
    }

    /// Narrative quartile-within-band descriptor, e.g.
    /// "upper quarter of the small range". `None` for the unbounded top band.
    pub fn sub_band(&self) -> Option<String> {
        let (lo, hi) = self.band.range();
        let hi = hi?;
        let frac = (self.d.abs() - lo) / (hi - lo);
        let quarter = if frac < 0.25 {
            "lowest quarter"
        } else if frac < 0.50 {
            "second quarter"
        } else if frac < 0.75 {
            "third quarter"
        } else {
            "upper quarter"
        };
        Some(format!(
            "{} of the {} range",
            quarter,
            self.band.label().to_lowercase()
        ))
    }
}

/// ln(p / (1 - p)). Inverse of [`log_odds_to_proportion`].
pub fn proportion_to_log_odds(p: Proportion) -> LogOdds {
    let v = p.value();
    LogOdds((v / (1.0 - v)).ln())
}

/// exp(L) / (1 + exp(L)), computed in the numerically stable sigmoid form.
///
/// The result is nudged into the open interval when the sigmoid saturates in
/// floating point, so the round trip with [`proportion_to_log_odds`] stays
/// well defined for any finite input.
pub fn log_odds_to_proportion(l: LogOdds) -> Proportion {
    let x = l.value();
    let p = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    let p = p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    Proportion(p)
}

/// Log-odds and its binomial standard error from raw counts:
/// L = ln(a/b), se = sqrt(1/a + 1/b).
///
/// Zero counts are rejected rather than continuity-corrected; a zero here is
/// almost certainly a data error at the scales this crate targets.
pub fn log_odds_from_counts(n_leave: u64, n_remain: u64) -> Result<(LogOdds, f64)> {
    if n_leave == 0 || n_remain == 0 {
        return Err(Error::ZeroCount { n_leave, n_remain });
    }
    let a = n_leave as f64;
    let b = n_remain as f64;
    let se = (1.0 / a + 1.0 / b).sqrt();
    Ok((LogOdds((a / b).ln()), se))
}

/// Convert a log-odds to a Cohen-scale effect size via Chinn's
/// divide-by-1.81 approximation.
pub fn chin_effect_size(l: LogOdds) -> EffectSize {
    let d = l.value() / CHIN_DIVISOR;
    EffectSize {
        d,
        band: CohenBand::classify(d),
    }
}

/// The proportion a binary split must reach for a given Cohen-scale effect
/// size: p = exp(1.81 d) / (1 + exp(1.81 d)). Strictly increasing in d.
pub fn effect_size_to_proportion(d: f64) -> Result<Proportion> {
    if !d.is_finite() {
        return Err(Error::NonFinite {
            what: "effect size",
            value: d,
        });
    }
    Ok(log_odds_to_proportion(LogOdds(d * CHIN_DIVISOR)))
}

/// One row of the effect-size threshold table: the winning-side proportion
/// required to reach a given Cohen-scale magnitude.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdRow {
    pub level: &'static str,
    pub d_label: &'static str,
    pub d: f64,
    pub log_or: f64,
    pub odds_ratio: f64,
    pub proportion: f64,
}

const THRESHOLD_LEVELS: [(&str, &str, f64); 11] = [
    ("Negligible to Very small", "<0.05", 0.05),
    ("Small-low", "0.10", 0.10),
    ("Small", "0.15", 0.15),
    ("Small-Medium", "0.20", 0.20),
    ("Medium-low", "0.21", 0.21),
    ("Medium", "0.30", 0.30),
    ("Medium", "0.35", 0.35),
    ("Medium-large", "0.50", 0.50),
    ("Large", "0.80", 0.80),
    ("Large", "1.00", 1.00),
    ("Very large", ">1.30", 1.30),
];

/// The full effect-size threshold table: for each benchmark d, the log
/// odds ratio, odds ratio, and winning-side proportion it corresponds to.
pub fn effect_size_thresholds() -> Vec<ThresholdRow> {
    THRESHOLD_LEVELS
        .iter()
        .map(|&(level, d_label, d)| {
            let log_or = d * CHIN_DIVISOR;
            let odds_ratio = log_or.exp();
            ThresholdRow {
                level,
                d_label,
                d,
                log_or,
                odds_ratio,
                proportion: odds_ratio / (1.0 + odds_ratio),
            }
        })
        .collect()
}

/// The winning-side vote share at which the winners exceed half of the
/// *eligible* electorate: 0.5 / turnout. Defined for turnout in (0.5, 1].
pub fn required_split_for_eligible_majority(turnout: f64) -> Result<f64> {
    if !turnout.is_finite() || turnout <= 0.5 || turnout > 1.0 {
        return Err(Error::MajorityUnattainable(turnout));
    }
    Ok(0.5 / turnout)
}

/// Share of the eligible electorate carried by the winning side:
/// split x turnout. Both arguments must lie in (0, 1].
pub fn eligible_share(split: f64, turnout: f64) -> Result<f64> {
    for (what, value) in [("split", split), ("turnout", turnout)] {
        if !value.is_finite() || value <= 0.0 || value > 1.0 {
            return Err(Error::OutOfUnitRange { what, value });
        }
    }
    Ok(split * turnout)
}
