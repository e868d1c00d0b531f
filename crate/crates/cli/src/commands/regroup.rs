//! `refmeta regroup`: rank regions by their contribution to Cochran's Q
//! (leave-one-out), then pool a named partition hierarchically.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;

use refmeta::data::{aggregate, AggregationLevel};
use refmeta::meta::{loo_q_sensitivity, pool_grouped, GroupingSpec, PoolMethod};

use crate::util::{estimates, filter_labels, load_records, out_dir, summary_line, write_output};

#[derive(Parser)]
pub struct Args {
    /// Area-level CSV; defaults to the bundled dataset
    #[arg(long, short = 'i')]
    pub input: Option<PathBuf>,

    /// Keep only regions of this country (England, Scotland, ...)
    #[arg(long)]
    pub country: Option<String>,

    /// Grouping JSON; defaults to the bundled three-group England partition
    #[arg(long)]
    pub groups: Option<PathBuf>,

    /// Drop these labels before the scan ("none" is a no-op)
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,

    /// Estimator inside each group (fe, ivhet, re)
    #[arg(long, default_value = "re")]
    pub within: String,

    /// Estimator across the group summaries (fe, ivhet, re)
    #[arg(long, default_value = "re")]
    pub across: String,

    /// Output directory (default $REFMETA_OUT_DIR or ./refmeta-out)
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<i32> {
    let within = PoolMethod::parse(&args.within)
        .ok_or_else(|| anyhow::anyhow!("unknown --within {:?}", args.within))?;
    let across = PoolMethod::parse(&args.across)
        .ok_or_else(|| anyhow::anyhow!("unknown --across {:?}", args.across))?;

    let records = load_records(args.input.as_deref())?;
    let mut aggregates = aggregate(&records, &AggregationLevel::Region13)?;
    if let Some(country) = &args.country {
        aggregates.retain(|a| {
            refmeta::Region::from_code(&a.label)
                .map(|r| r.country().label().eq_ignore_ascii_case(country))
                .unwrap_or(false)
        });
        if aggregates.is_empty() {
            anyhow::bail!("no regions for country {country:?}");
        }
    }
    let aggregates = filter_labels(aggregates, &[], &args.exclude)?;
    let units = estimates(&aggregates);

    let loo = loo_q_sensitivity(&units)?;
    println!("leave-one-out Q sensitivity ({} regions):", units.len());
    println!(
        "{:<4} {:<12} {:>16} {:>16}",
        "rank", "region", "Q without", "Q drop"
    );
    for (i, entry) in loo.iter().enumerate() {
        println!(
            "{:<4} {:<12} {:>16.1} {:>16.1}",
            i + 1,
            entry.label,
            entry.q_without,
            entry.q_drop
        );
    }

    let spec = match &args.groups {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            GroupingSpec::from_json(&text)?
        }
        None => refmeta::fixtures::england_grouping().expect("bundled grouping is well-formed"),
    };
    let grouped = pool_grouped(&units, &spec, within, across)?;
    println!();
    for g in &grouped.groups {
        println!(
            "{}",
            summary_line(&format!("group {} (n={})", g.name, g.size), &g.result)
        );
    }
    println!("{}", summary_line("across groups", &grouped.overall));

    let dir = out_dir(args.out.as_deref());
    let bundle = serde_json::json!({
        "loo": loo,
        "grouped": grouped,
    });
    let path = write_output(
        &dir,
        "regroup.json",
        &serde_json::to_string_pretty(&bundle)?,
    )?;
    println!("report: {}", path.display());
    Ok(0)
}
