//! Shared helpers: input loading, label filtering, output paths, number
//! formatting.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use refmeta::data::{AggregationLevel, AreaRecord, RegionAggregate};
use refmeta::meta::{GroupingSpec, PoolMethod, RegionEstimate};

/// Load area records from `--input`, or the bundled dataset when omitted.
pub fn load_records(input: Option<&Path>) -> Result<Vec<AreaRecord>> {
    match input {
        Some(path) => refmeta::ingest(path).with_context(|| format!("reading {}", path.display())),
        None => Ok(refmeta::fixtures::brexit_areas().expect("bundled dataset is well-formed")),
    }
}

/// Resolve the aggregation level. `custom` requires a grouping file.
pub fn resolve_level(level: &str, groups: Option<&Path>) -> Result<(AggregationLevel, String)> {
    match level {
        "region13" => Ok((AggregationLevel::Region13, "region13".into())),
        "country5" => Ok((AggregationLevel::Country5, "country5".into())),
        "custom" => {
            let path = groups.ok_or_else(|| {
                anyhow::anyhow!("--level custom requires --groups <FILE> with the partition")
            })?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let spec = GroupingSpec::from_json(&text)?;
            Ok((AggregationLevel::Custom(spec), "custom".into()))
        }
        other => bail!("unknown level {other:?} (expected region13, country5 or custom)"),
    }
}

/// Apply `--include` / `--exclude` label filters. The literal `none` is an
/// accepted no-op value for either flag.
pub fn filter_labels(
    aggregates: Vec<RegionAggregate>,
    include: &[String],
    exclude: &[String],
) -> Result<Vec<RegionAggregate>> {
    let keep: Vec<&String> = include.iter().filter(|l| !is_none_sentinel(l)).collect();
    let drop: Vec<&String> = exclude.iter().filter(|l| !is_none_sentinel(l)).collect();
    for wanted in keep.iter().chain(drop.iter()) {
        if !aggregates.iter().any(|a| &&a.label == wanted) {
            bail!("label {wanted:?} does not name an aggregate in this input");
        }
    }
    Ok(aggregates
        .into_iter()
        .filter(|a| keep.is_empty() || keep.iter().any(|l| **l == a.label))
        .filter(|a| !drop.iter().any(|l| **l == a.label))
        .collect())
}

fn is_none_sentinel(s: &str) -> bool {
    s.eq_ignore_ascii_case("none")
}

pub fn estimates(aggregates: &[RegionAggregate]) -> Vec<RegionEstimate> {
    aggregates.iter().map(|a| a.estimate.clone()).collect()
}

/// Parse a comma-separated `--methods` list.
pub fn parse_methods(spec: &str) -> Result<Vec<PoolMethod>> {
    let methods: Vec<PoolMethod> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            PoolMethod::parse(s)
                .ok_or_else(|| anyhow::anyhow!("unknown method {s:?} (expected fe, ivhet or re)"))
        })
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        bail!("at least one method is required");
    }
    Ok(methods)
}

/// Output directory: flag, else $REFMETA_OUT_DIR, else ./refmeta-out.
pub fn out_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("REFMETA_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("refmeta-out"))
}

pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Group digits in threes: 33551983 -> "33,551,983".
pub fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// One-line human summary of a pooled result.
pub fn summary_line(tag: &str, result: &refmeta::PooledResult) -> String {
    let effect = refmeta::chin_effect_size(result.estimate);
    format!(
        "{tag}: {est:.3} ({lo:.3}, {hi:.3}) | d={d:.3} {band} for {dir} {sig}",
        est = result.estimate.value(),
        lo = result.ci95.0,
        hi = result.ci95.1,
        d = effect.d,
        band = effect.band.label(),
        dir = refmeta::report::direction_label(result.estimate.value()),
        sig = refmeta::report::significance_marker(result.ci95),
    )
}

/// Sanitized suffix describing exclusions, used in output filenames.
pub fn exclusion_suffix(exclude: &[String]) -> String {
    let real: Vec<String> = exclude
        .iter()
        .filter(|l| !is_none_sentinel(l))
        .map(|l| l.replace([' ', '/'], "-"))
        .collect();
    if real.is_empty() {
        String::new()
    } else {
        format!("_excl-{}", real.join("-"))
    }
}

pub fn method_slug(method: PoolMethod) -> &'static str {
    match method {
        PoolMethod::FixedIv => "fe",
        PoolMethod::IvHet => "ivhet",
        PoolMethod::RandomEffectsDl => "re",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousands_grouping() {
        assert_eq!(thousands(0), "0");
        assert_eq!(thousands(999), "999");
        assert_eq!(thousands(1000), "1,000");
        assert_eq!(thousands(33551983), "33,551,983");
    }

    #[test]
    fn methods_parsing() {
        let ms = parse_methods("fe,ivhet,re").unwrap();
        assert_eq!(ms.len(), 3);
        assert!(parse_methods("").is_err());
        assert!(parse_methods("bogus").is_err());
    }
}
