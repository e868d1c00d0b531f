//! Rendering of pooled results: forest plots (SVG 1.1), results tables
//! (markdown + CSV), the effect-size threshold table, and JSON dumps.
//!
//! SVG output is byte-deterministic: identical specs render to identical
//! documents. Forest-plot conventions: per-region CI whiskers with a square
//! whose AREA is proportional to the normalized weight, a dashed vertical
//! zero-reference line, and a pooled-estimate rhombus whose horizontal
//! diagonal spans the pooled 95% CI.

use std::fmt::Write as _;

use crate::effect::chin_effect_size;
use crate::error::{Error, Result};
use crate::meta::{PooledResult, RegionEstimate, CI95_Z};

/// One labelled row of a forest plot.
#[derive(Debug, Clone)]
pub struct ForestRow {
    pub label: String,
    pub estimate: f64,
    pub ci95: (f64, f64),
    /// Normalized weight in [0, 1]; all rows together must sum to 1.
    pub weight: f64,
}

/// Full specification of a forest plot.
#[derive(Debug, Clone)]
pub struct ForestPlotSpec {
    pub title: String,
    pub rows: Vec<ForestRow>,
    pub pooled_label: String,
    pub pooled_estimate: f64,
    pub pooled_ci95: (f64, f64),
    /// Log-odds range of the horizontal axis.
    pub axis: (f64, f64),
}

impl ForestPlotSpec {
    /// Build a plot spec from a pooled result and the inputs it was computed
    /// from. The axis spans every CI plus zero, with 5% padding.
    pub fn from_result(
        title: impl Into<String>,
        regions: &[RegionEstimate],
        pooled: &PooledResult,
    ) -> Result<Self> {
        if regions.len() != pooled.weights.len() {
            return Err(Error::Plot(format!(
                "{} regions but {} weights",
                regions.len(),
                pooled.weights.len()
            )));
        }
        let rows: Vec<ForestRow> = regions
            .iter()
            .zip(&pooled.weights)
            .map(|(r, w)| {
                let est = r.log_odds.value();
                ForestRow {
                    label: r.label.clone(),
                    estimate: est,
                    ci95: (est - CI95_Z * r.se, est + CI95_Z * r.se),
                    weight: w.weight,
                }
            })
            .collect();
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for r in &rows {
            lo = lo.min(r.ci95.0);
            hi = hi.max(r.ci95.1);
        }
        lo = lo.min(pooled.ci95.0);
        hi = hi.max(pooled.ci95.1);
        let pad = 0.05 * (hi - lo).max(1e-6);
        Ok(Self {
            title: title.into(),
            rows,
            pooled_label: format!("Pooled ({})", pooled.method.label()),
            pooled_estimate: pooled.estimate.value(),
            pooled_ci95: pooled.ci95,
            axis: (lo - pad, hi + pad),
        })
    }
}

const PLOT_WIDTH: f64 = 800.0;
const ROW_HEIGHT: f64 = 28.0;
const PLOT_LEFT: f64 = 170.0;
const PLOT_RIGHT: f64 = 620.0;
const ROWS_TOP: f64 = 30.0;
/// Side of a weight-1 square; area scales linearly with weight.
const MAX_SQUARE_SIDE: f64 = 18.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Render the plot to an SVG 1.1 document. Output bytes are a pure function
/// of the spec. Height is 60 + 28 per row.
pub fn render_forest(spec: &ForestPlotSpec) -> Result<String> {
    if spec.rows.is_empty() {
        return Err(Error::Plot("no rows".into()));
    }
    let mut coords: Vec<f64> = vec![
        spec.pooled_estimate,
        spec.pooled_ci95.0,
        spec.pooled_ci95.1,
        spec.axis.0,
        spec.axis.1,
    ];
    for r in &spec.rows {
        coords.extend([r.estimate, r.ci95.0, r.ci95.1, r.weight]);
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(Error::Plot("non-finite coordinate".into()));
    }
    if spec.axis.1 <= spec.axis.0 {
        return Err(Error::Plot(format!(
            "axis range ({}, {}) is empty",
            spec.axis.0, spec.axis.1
        )));
    }
    let weight_sum: f64 = spec.rows.iter().map(|r| r.weight).sum();
    if (weight_sum - 1.0).abs() > 1e-6 {
        return Err(Error::Plot(format!(
            "weights sum to {weight_sum}, expected 1"
        )));
    }

    let n = spec.rows.len();
    let height = 60.0 + ROW_HEIGHT * n as f64;
    let x = |v: f64| -> f64 {
        let t = (v - spec.axis.0) / (spec.axis.1 - spec.axis.0);
        (PLOT_LEFT + t * (PLOT_RIGHT - PLOT_LEFT)).clamp(PLOT_LEFT, PLOT_RIGHT)
    };
    let pooled_y = ROWS_TOP + ROW_HEIGHT * n as f64 + 10.0;
    let axis_y = pooled_y + 14.0;

    let mut svg = String::with_capacity(4096 + n * 512);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = fmt(PLOT_WIDTH),
        h = fmt(height),
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#,
        w = fmt(PLOT_WIDTH),
        h = fmt(height),
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="18" font-family="sans-serif" font-size="13" text-anchor="middle" font-weight="bold">{t}</text>"#,
        x = fmt((PLOT_LEFT + PLOT_RIGHT) / 2.0),
        t = esc(&spec.title),
    );

    // zero-reference line (dashed) across the row area
    if spec.axis.0 <= 0.0 && 0.0 <= spec.axis.1 {
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="grey" stroke-width="1" stroke-dasharray="4,3"/>"#,
            x0 = fmt(x(0.0)),
            y0 = fmt(ROWS_TOP - 4.0),
            y1 = fmt(axis_y),
        );
    }

    for (i, row) in spec.rows.iter().enumerate() {
        let cy = ROWS_TOP + ROW_HEIGHT * i as f64 + ROW_HEIGHT / 2.0;
        let _ = writeln!(
            svg,
            r#"<text x="8" y="{y}" font-family="sans-serif" font-size="12" dominant-baseline="middle">{label}</text>"#,
            y = fmt(cy),
            label = esc(&row.label),
        );
        // CI whisker with end caps
        let (x1, x2) = (x(row.ci95.0), x(row.ci95.1));
        let _ = writeln!(
            svg,
            r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="black" stroke-width="1"/>"#,
            x1 = fmt(x1),
            x2 = fmt(x2),
            y = fmt(cy),
        );
        for xe in [x1, x2] {
            let _ = writeln!(
                svg,
                r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="black" stroke-width="1"/>"#,
                x = fmt(xe),
                y0 = fmt(cy - 4.0),
                y1 = fmt(cy + 4.0),
            );
        }
        // weight square: area proportional to normalized weight
        let side = MAX_SQUARE_SIDE * row.weight.max(0.0).sqrt();
        let cx = x(row.estimate);
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{y}" width="{s}" height="{s}" fill="black"/>"#,
            x = fmt(cx - side / 2.0),
            y = fmt(cy - side / 2.0),
            s = fmt(side),
        );
        let annotation = format!(
            "{:.3} ({:.3}, {:.3})  {:.1}%",
            row.estimate,
            row.ci95.0,
            row.ci95.1,
            row.weight * 100.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" dominant-baseline="middle">{annotation}</text>"#,
            x = fmt(PLOT_RIGHT + 12.0),
            y = fmt(cy),
        );
    }

    // pooled rhombus: center at the estimate, horizontal diagonal = 95% CI
    let (plo, pest, phi) = (
        x(spec.pooled_ci95.0),
        x(spec.pooled_estimate),
        x(spec.pooled_ci95.1),
    );
    let _ = writeln!(
        svg,
        r#"<polygon points="{x1},{yc} {xc},{yt} {x2},{yc} {xc},{yb}" fill="grey" stroke="black" stroke-width="1"/>"#,
        x1 = fmt(plo),
        x2 = fmt(phi),
        xc = fmt(pest),
        yc = fmt(pooled_y),
        yt = fmt(pooled_y - 8.0),
        yb = fmt(pooled_y + 8.0),
    );
    let _ = writeln!(
        svg,
        r#"<text x="8" y="{y}" font-family="sans-serif" font-size="12" font-weight="bold" dominant-baseline="middle">{label}</text>"#,
        y = fmt(pooled_y),
        label = esc(&spec.pooled_label),
    );
    let pooled_annotation = format!(
        "{:.3} ({:.3}, {:.3})",
        spec.pooled_estimate, spec.pooled_ci95.0, spec.pooled_ci95.1
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" font-weight="bold" dominant-baseline="middle">{pooled_annotation}</text>"#,
        x = fmt(PLOT_RIGHT + 12.0),
        y = fmt(pooled_y),
    );

    // axis line with min / zero / max ticks
    let _ = writeln!(
        svg,
        r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="black" stroke-width="1"/>"#,
        x1 = fmt(PLOT_LEFT),
        x2 = fmt(PLOT_RIGHT),
        y = fmt(axis_y),
    );
    let mut ticks = vec![spec.axis.0, spec.axis.1];
    if spec.axis.0 < 0.0 && 0.0 < spec.axis.1 {
        ticks.insert(1, 0.0);
    }
    for t in ticks {
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="black" stroke-width="1"/>"#,
            x = fmt(x(t)),
            y0 = fmt(axis_y),
            y1 = fmt(axis_y + 4.0),
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="middle">{v:.3}</text>"#,
            x = fmt(x(t)),
            y = fmt(axis_y + 14.0),
            v = t,
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Direction label under the sign convention: positive log-odds favour
/// LEAVE, negative favour REMAIN.
pub fn direction_label(estimate: f64) -> &'static str {
    if estimate >= 0.0 {
        "LEAVE"
    } else {
        "REMAIN"
    }
}

/// `(*)` when the CI excludes zero, `(NS)` otherwise. A CI touching zero
/// counts as containing it.
pub fn significance_marker(ci95: (f64, f64)) -> &'static str {
    if ci95.0 <= 0.0 && ci95.1 >= 0.0 {
        "(NS)"
    } else {
        "(*)"
    }
}

/// The magnitude cell: band, direction, and significance marker.
pub fn magnitude_cell(result: &PooledResult) -> String {
    let effect = chin_effect_size(result.estimate);
    format!(
        "{} for {} {}",
        effect.band.label(),
        direction_label(result.estimate.value()),
        significance_marker(result.ci95)
    )
}

fn result_cells(r: &PooledResult) -> [String; 6] {
    let est = r.estimate.value();
    let odds = est.exp();
    let proportion = odds / (1.0 + odds);
    let effect = chin_effect_size(r.estimate);
    [
        r.method.label().to_string(),
        format!("{:.3} ({:.3}, {:.3})", est, r.ci95.0, r.ci95.1),
        format!("{odds:.2}"),
        format!("{proportion:.3}"),
        format!("{:.2}", effect.d),
        magnitude_cell(r),
    ]
}

const RESULT_HEADERS: [&str; 6] = [
    "Method",
    "Log-odds (95% c.i.)",
    "Odds of Leave",
    "Proportion of Leavers",
    "Effect size",
    "Magnitude (in favour of)",
];

/// Render pooled results as a markdown table and a CSV mirror, one row per
/// result.
pub fn render_results_table(results: &[PooledResult]) -> Result<(String, String)> {
    if results.is_empty() {
        return Err(Error::EmptyInput("no results to tabulate"));
    }
    let mut md = String::new();
    let mut csv = String::new();
    let _ = writeln!(md, "| {} |", RESULT_HEADERS.join(" | "));
    let _ = writeln!(md, "|{}", "---|".repeat(RESULT_HEADERS.len()));
    let _ = writeln!(csv, "{}", RESULT_HEADERS.join(","));
    for r in results {
        let cells = result_cells(r);
        let _ = writeln!(md, "| {} |", cells.join(" | "));
        let quoted: Vec<String> = cells
            .iter()
            .map(|c| {
                if c.contains(',') {
                    format!("\"{c}\"")
                } else {
                    c.clone()
                }
            })
            .collect();
        let _ = writeln!(csv, "{}", quoted.join(","));
    }
    Ok((md, csv))
}

/// The effect-size threshold table in markdown.
pub fn render_threshold_table() -> String {
    let mut md = String::new();
    let _ = writeln!(
        md,
        "| Level of effect | Effect size (d) | log-OR | Odds Ratio | Proportion of leavers |"
    );
    let _ = writeln!(md, "|---|---|---|---|---|");
    for row in crate::effect::effect_size_thresholds() {
        let _ = writeln!(
            md,
            "| {} | {} | {:.4} | {:.4} | {:.3} |",
            row.level, row.d_label, row.log_or, row.odds_ratio, row.proportion
        );
    }
    md
}

/// CSV mirror of [`render_threshold_table`].
pub fn threshold_table_csv() -> String {
    let mut out = String::from("level,d,log_or,odds_ratio,proportion\n");
    for row in crate::effect::effect_size_thresholds() {
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.4},{:.3}",
            row.level, row.d, row.log_or, row.odds_ratio, row.proportion
        );
    }
    out
}

/// Pretty JSON dump of a pooled result, fields exactly as typed.
pub fn pooled_result_json(result: &PooledResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::LogOdds;
    use crate::meta::{pool_fixed_iv, pool_random_effects};

    fn est(label: &str, l: f64, se: f64) -> RegionEstimate {
        RegionEstimate::new(label, LogOdds::new(l).unwrap(), se).unwrap()
    }

    fn sample_spec() -> ForestPlotSpec {
        ForestPlotSpec {
            title: "two regions".into(),
            rows: vec![
                ForestRow {
                    label: "a".into(),
                    estimate: 0.2,
                    ci95: (0.1, 0.3),
                    weight: 0.5,
                },
                ForestRow {
                    label: "b".into(),
                    estimate: -0.1,
                    ci95: (-0.3, 0.1),
                    weight: 0.5,
                },
            ],
            pooled_label: "Pooled".into(),
            pooled_estimate: 0.05,
            pooled_ci95: (-0.05, 0.15),
            axis: (-0.4, 0.4),
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let spec = sample_spec();
        let a = render_forest(&spec).unwrap();
        let b = render_forest(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("stroke-dasharray"), "zero line missing");
        assert!(a.contains("<polygon"), "rhombus missing");
    }

    #[test]
    fn svg_dimensions_follow_row_count() {
        let spec = sample_spec();
        let svg = render_forest(&spec).unwrap();
        assert!(svg.contains(r#"width="800.00" height="116.00""#), "{svg}");
    }

    #[test]
    fn equal_weights_equal_square_areas() {
        let svg = render_forest(&sample_spec()).unwrap();
        let sides: Vec<f64> = svg
            .lines()
            .filter(|l| l.starts_with("<rect") && l.contains("fill=\"black\""))
            .map(|l| {
                let w = l.split("width=\"").nth(1).unwrap();
                w.split('"').next().unwrap().parse::<f64>().unwrap()
            })
            .collect();
        assert_eq!(sides.len(), 2);
        let (a0, a1) = (sides[0] * sides[0], sides[1] * sides[1]);
        assert!((a0 - a1).abs() < 1.0, "areas {a0} vs {a1}");
    }

    #[test]
    fn single_row_rhombus_matches_row_ci() {
        let regions = [est("only", 0.3, 0.05)];
        let pooled = pool_fixed_iv(&regions).unwrap();
        let spec = ForestPlotSpec::from_result("one", &regions, &pooled).unwrap();
        assert_eq!(spec.rows.len(), 1);
        assert!((spec.rows[0].ci95.0 - pooled.ci95.0).abs() < 1e-12);
        assert!((spec.rows[0].ci95.1 - pooled.ci95.1).abs() < 1e-12);
        render_forest(&spec).unwrap();
    }

    #[test]
    fn negative_pooled_estimate_sits_left_of_zero() {
        let regions = [
            est("a", -1.0, 0.05),
            est("b", -0.6, 0.05),
            est("c", -0.3, 0.2),
        ];
        let pooled = pool_random_effects(&regions).unwrap();
        assert!(pooled.estimate.value() < 0.0);
        let spec = ForestPlotSpec::from_result("negative", &regions, &pooled).unwrap();
        let svg = render_forest(&spec).unwrap();
        // rhombus x-center must be smaller than the zero-line x
        let zero_x = {
            let t = (0.0 - spec.axis.0) / (spec.axis.1 - spec.axis.0);
            170.0 + t * (620.0 - 170.0)
        };
        let poly = svg.lines().find(|l| l.starts_with("<polygon")).unwrap();
        let first_pt = poly.split("points=\"").nth(1).unwrap();
        let x1: f64 = first_pt.split(',').next().unwrap().parse().unwrap();
        assert!(x1 < zero_x, "rhombus left point {x1} vs zero {zero_x}");
    }

    #[test]
    fn render_rejects_bad_specs() {
        let mut spec = sample_spec();
        spec.rows.clear();
        assert!(render_forest(&spec).is_err());

        let mut spec = sample_spec();
        spec.rows[0].estimate = f64::NAN;
        assert!(render_forest(&spec).is_err());

        let mut spec = sample_spec();
        spec.rows[0].weight = 0.9; // sums to 1.4
        assert!(render_forest(&spec).is_err());
    }

    #[test]
    fn results_table_cells() {
        let regions = [est("a", 0.05, 0.1), est("b", 0.11, 0.1)];
        let pooled = pool_fixed_iv(&regions).unwrap();
        let (md, csv) = render_results_table(std::slice::from_ref(&pooled)).unwrap();
        assert!(md.contains("| IV-FE |"));
        assert!(md.contains("for LEAVE"));
        assert!(csv.starts_with("Method,"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn zero_estimate_row() {
        let regions = [est("a", 0.0, 0.1), est("b", 0.0, 0.1)];
        let pooled = pool_fixed_iv(&regions).unwrap();
        let cells = result_cells(&pooled);
        assert_eq!(cells[2], "1.00");
        assert_eq!(cells[3], "0.500");
    }

    #[test]
    fn significance_markers() {
        assert_eq!(significance_marker((-1.0, -0.42)), "(*)");
        assert_eq!(significance_marker((-0.1, 0.26)), "(NS)");
        assert_eq!(significance_marker((0.0, 0.3)), "(NS)"); // touching counts
        assert_eq!(significance_marker((0.01, 0.3)), "(*)");
    }

    #[test]
    fn threshold_table_shape() {
        let md = render_threshold_table();
        // header + separator + 11 rows
        assert_eq!(md.lines().count(), 13);
        assert!(md.contains("| Small-Medium | 0.20 | 0.3620 | 1.4362 | 0.590 |"));
        let csv = threshold_table_csv();
        assert_eq!(csv.lines().count(), 12);
    }

    #[test]
    fn json_dump_has_typed_fields() {
        let regions = [est("a", 0.1, 0.1), est("b", 0.3, 0.2)];
        let pooled = pool_random_effects(&regions).unwrap();
        let json = pooled_result_json(&pooled).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["method"], "RandomEffectsDL");
        assert!(v["estimate"].is_number());
        assert!(v["ci95"].is_array());
        assert!(v["weights"][0]["label"].is_string());
        assert!(v["het"]["q"].is_number());
    }
}
