//! `refmeta analyze`: pool the chosen level with one or more estimators and
//! write tables, JSON dumps and forest plots. Output is a pure function of
//! the input bytes and flags.

use std::path::PathBuf;

use anyhow::Result;
use clap::Parser;

use refmeta::data::aggregate;
use refmeta::report::{self, ForestPlotSpec};

use crate::util::{
    estimates, exclusion_suffix, filter_labels, load_records, method_slug, out_dir, parse_methods,
    resolve_level, summary_line, write_output,
};

#[derive(Parser)]
pub struct Args {
    /// Area-level CSV; defaults to the bundled dataset
    #[arg(long, short = 'i')]
    pub input: Option<PathBuf>,

    /// Aggregation level: region13, country5 or custom
    #[arg(long, default_value = "region13")]
    pub level: String,

    /// Grouping JSON (required with --level custom)
    #[arg(long)]
    pub groups: Option<PathBuf>,

    /// Comma-separated estimators: fe, ivhet, re
    #[arg(long, default_value = "fe,ivhet,re")]
    pub methods: String,

    /// Keep only these labels ("none" is a no-op)
    #[arg(long, value_delimiter = ',')]
    pub include: Vec<String>,

    /// Drop these labels ("none" is a no-op)
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,

    /// Output formats, any of: json, md, csv, svg
    #[arg(long, default_value = "json,md,csv,svg")]
    pub formats: String,

    /// Output directory (default $REFMETA_OUT_DIR or ./refmeta-out)
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<i32> {
    let methods = parse_methods(&args.methods)?;
    let formats: Vec<&str> = args.formats.split(',').map(str::trim).collect();
    for f in &formats {
        if !matches!(*f, "json" | "md" | "csv" | "svg") {
            anyhow::bail!("unknown format {f:?} (expected json, md, csv or svg)");
        }
    }

    let records = load_records(args.input.as_deref())?;
    let (level, level_tag) = resolve_level(&args.level, args.groups.as_deref())?;
    let aggregates = filter_labels(aggregate(&records, &level)?, &args.include, &args.exclude)?;
    let units = estimates(&aggregates);
    let suffix = exclusion_suffix(&args.exclude);
    let dir = out_dir(args.out.as_deref());

    let mut results = Vec::with_capacity(methods.len());
    for method in &methods {
        let pooled = refmeta::pool_with(*method, &units)?;
        println!(
            "{}",
            summary_line(
                &format!("{level_tag}{suffix} {}", method_slug(*method)),
                &pooled
            )
        );

        if formats.contains(&"json") {
            write_output(
                &dir,
                &format!("analysis_{level_tag}{suffix}_{}.json", method_slug(*method)),
                &report::pooled_result_json(&pooled)?,
            )?;
        }
        if formats.contains(&"svg") {
            let title = format!(
                "{} over {} units ({})",
                method.label(),
                units.len(),
                level_tag
            );
            let spec = ForestPlotSpec::from_result(title, &units, &pooled)?;
            write_output(
                &dir,
                &format!("forest_{level_tag}{suffix}_{}.svg", method_slug(*method)),
                &report::render_forest(&spec)?,
            )?;
        }
        results.push(pooled);
    }

    let (md, csv) = report::render_results_table(&results)?;
    if formats.contains(&"md") {
        write_output(&dir, &format!("analysis_{level_tag}{suffix}.md"), &md)?;
    }
    if formats.contains(&"csv") {
        write_output(&dir, &format!("analysis_{level_tag}{suffix}.csv"), &csv)?;
    }
    Ok(0)
}
