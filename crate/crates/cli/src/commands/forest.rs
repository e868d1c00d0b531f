//! `refmeta forest`: render one forest plot to SVG.

use std::path::PathBuf;

use anyhow::Result;
use clap::Parser;

use refmeta::data::aggregate;
use refmeta::meta::PoolMethod;
use refmeta::report::{render_forest, ForestPlotSpec};

use crate::util::{estimates, filter_labels, load_records, resolve_level};

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

    /// Estimator: fe, ivhet or re
    #[arg(long, default_value = "re")]
    pub method: String,

    /// Keep only these labels ("none" is a no-op)
    #[arg(long, value_delimiter = ',')]
    pub include: Vec<String>,

    /// Drop these labels ("none" is a no-op)
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,

    /// Plot title (defaults to a description of the run)
    #[arg(long)]
    pub title: Option<String>,

    /// Output SVG path
    #[arg(long, short = 'o', default_value = "forest.svg")]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<i32> {
    let method = PoolMethod::parse(&args.method)
        .ok_or_else(|| anyhow::anyhow!("unknown --method {:?}", args.method))?;
    let records = load_records(args.input.as_deref())?;
    let (level, level_tag) = resolve_level(&args.level, args.groups.as_deref())?;
    let aggregates = filter_labels(aggregate(&records, &level)?, &args.include, &args.exclude)?;
    let units = estimates(&aggregates);

    let pooled = refmeta::pool_with(method, &units)?;
    let title = args.title.clone().unwrap_or_else(|| {
        format!(
            "{} over {} units ({})",
            method.label(),
            units.len(),
            level_tag
        )
    });
    let spec = ForestPlotSpec::from_result(title, &units, &pooled)?;
    let svg = render_forest(&spec)?;

    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&args.out, &svg)?;
    println!("wrote {}", args.out.display());
    Ok(0)
}
