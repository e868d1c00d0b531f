//! `refmeta validate`: row invariants plus reconciliation against declared
//! totals. Exit 0 only when everything passes exactly.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;

use refmeta::data::{aggregate, AggregationLevel, ReferenceTotals};

use crate::util::{load_records, out_dir, thousands, write_output};

#[derive(Parser)]
pub struct Args {
    /// Area-level CSV; defaults to the bundled dataset
    #[arg(long, short = 'i')]
    pub input: Option<PathBuf>,

    /// Reference totals CSV; defaults to the bundled declared totals
    #[arg(long)]
    pub reference: Option<PathBuf>,

    /// Re-derive one region's standard error by literal respondent-level
    /// expansion and compare it against the counts formula
    #[arg(long, value_name = "REGION", num_args = 0..=1, default_missing_value = "Gibraltar")]
    pub expand_check: Option<String>,

    /// Directory for the JSON reconciliation report
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<i32> {
    let records = match load_records(args.input.as_deref()) {
        Ok(records) => records,
        Err(err) => {
            // row-level problems come back as structured JSON detail
            if let Some(core) = err.downcast_ref::<refmeta::Error>() {
                if !matches!(core, refmeta::Error::Io(_)) {
                    println!(
                        "{}",
                        serde_json::json!({ "error": core.to_string(), "pass": false })
                    );
                }
            }
            return Err(err);
        }
    };

    let reference = match &args.reference {
        Some(path) => {
            ReferenceTotals::load(path).with_context(|| format!("reading {}", path.display()))?
        }
        None => refmeta::fixtures::reference_totals().expect("bundled totals are well-formed"),
    };

    let report = refmeta::reconcile(&records, &reference);
    println!("areas: {}", report.area_count);
    for label in &report.labels {
        if !label.found {
            println!("{}: MISSING", label.label);
            continue;
        }
        let cells: Vec<String> = label
            .fields
            .iter()
            .map(|f| {
                format!(
                    "{}={} {}",
                    f.field,
                    thousands(f.observed),
                    if f.pass { "PASS" } else { "FAIL" }
                )
            })
            .collect();
        println!("{}: {}", label.label, cells.join(", "));
    }
    if let Some(reasons) = &report.reject_reasons {
        println!(
            "reject reasons: {} vs declared rejected {} {}",
            thousands(reasons.observed),
            thousands(reasons.expected),
            if reasons.pass { "PASS" } else { "FAIL" }
        );
    }

    let dir = out_dir(args.out.as_deref());
    let path = write_output(
        &dir,
        "reconciliation.json",
        &serde_json::to_string_pretty(&report)?,
    )?;
    println!("report: {}", path.display());

    let mut ok = report.pass;
    if let Some(region) = &args.expand_check {
        let aggregates = aggregate(&records, &AggregationLevel::Region13)?;
        let agg = aggregates
            .iter()
            .find(|a| &a.label == region)
            .ok_or_else(|| anyhow::anyhow!("no region {region:?} in this input"))?;
        let chk = refmeta::expand_check(agg);
        let tight = chk.abs_diff <= 1e-9 * chk.se_formula;
        println!(
            "expand-check {}: {} respondents, se formula {:.6e}, se expanded {:.6e}, |diff| {:.3e} {}",
            chk.label,
            thousands(chk.respondents),
            chk.se_formula,
            chk.se_expanded,
            chk.abs_diff,
            if tight { "PASS" } else { "FAIL" }
        );
        ok &= tight;
    }

    if ok {
        println!("validation: PASS");
        Ok(0)
    } else {
        println!("validation: FAIL");
        Ok(2)
    }
}
