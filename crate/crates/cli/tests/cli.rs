//! End-to-end tests of the `refmeta` binary: exit codes, headline
//! outputs, file round trips, determinism.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn refmeta(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refmeta"))
        .args(args)
        .env("REFMETA_OUT_DIR", dir.join("out"))
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_bundled_dataset_passes() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(tmp.path(), &["validate"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("valid=33,551,983 PASS"), "{text}");
    assert!(text.contains("leave=17,410,742 PASS"), "{text}");
    assert!(text.contains("validation: PASS"), "{text}");
    assert!(tmp.path().join("out/reconciliation.json").is_file());
}

#[test]
fn validate_missing_file_is_io_failure() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(tmp.path(), &["validate", "--input", "no-such-file.csv"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn validate_corrupt_row_is_validation_failure() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.csv");
    std::fs::write(
        &path,
        "area,region,electorate,votes_cast,rejected,valid,leave,remain\n\
         Alpha,NE,1000,800,10,790,400,391\n",
    )
    .unwrap();
    let out = refmeta(tmp.path(), &["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("row 2"), "diagnostic names the row: {text}");
    assert!(
        text.contains("\"pass\":false") || text.contains("\"pass\": false"),
        "{text}"
    );
}

#[test]
fn validate_expand_check_runs() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(tmp.path(), &["validate", "--expand-check"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("expand-check Gibraltar"), "{text}");
    assert!(text.contains("PASS"), "{text}");
}

#[test]
fn analyze_country_level_random_effects() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(
        tmp.path(),
        &[
            "analyze",
            "--level",
            "country5",
            "--methods",
            "re",
            "--exclude",
            "none",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("-0.72"), "{text}");
    assert!(text.contains("Medium for REMAIN (*)"), "{text}");

    let out = refmeta(
        tmp.path(),
        &[
            "analyze",
            "--level",
            "country5",
            "--methods",
            "re",
            "--exclude",
            "Gibraltar",
        ],
    );
    let text = stdout(&out);
    assert!(text.contains("-0.12"), "{text}");
    assert!(text.contains("(NS)"), "{text}");
}

#[test]
fn analyze_writes_requested_formats() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(
        tmp.path(),
        &["analyze", "--level", "region13", "--methods", "fe,ivhet"],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let dir = tmp.path().join("out");
    for name in [
        "analysis_region13.md",
        "analysis_region13.csv",
        "analysis_region13_fe.json",
        "analysis_region13_ivhet.json",
        "forest_region13_fe.svg",
        "forest_region13_ivhet.svg",
    ] {
        assert!(dir.join(name).is_file(), "missing {name}");
    }
    let svg = std::fs::read_to_string(dir.join("forest_region13_fe.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let json = std::fs::read_to_string(dir.join("analysis_region13_ivhet.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["method"], "IVhet");
}

#[test]
fn analyze_too_few_units_is_precondition_failure() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(
        tmp.path(),
        &[
            "analyze",
            "--level",
            "country5",
            "--methods",
            "re",
            "--include",
            "England,Wales",
            "--exclude",
            "Wales",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn analyze_unknown_label_fails() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(
        tmp.path(),
        &["analyze", "--level", "country5", "--exclude", "Narnia"],
    );
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Narnia"));
}

#[test]
fn regroup_england_reports_groups_and_loo() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(tmp.path(), &["regroup", "--country", "England"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let london_rank = text
        .lines()
        .find(|l| l.trim_start().starts_with('1'))
        .unwrap();
    assert!(
        london_rank.contains("London"),
        "London tops the scan: {text}"
    );
    assert!(text.contains("0.32"), "{text}");
    assert!(text.contains("0.11"), "{text}");
    assert!(text.contains("-0.403"), "{text}");
    assert!(tmp.path().join("out/regroup.json").is_file());
}

#[test]
fn regroup_with_gap_in_grouping_names_the_region() {
    let tmp = TempDir::new().unwrap();
    // bundled England grouping does not cover Scotland et al.
    let out = refmeta(tmp.path(), &["regroup"]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing from the grouping"));
}

#[test]
fn threshold_table_and_turnout_lines() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(tmp.path(), &["threshold", "--turnout", "0.72"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1.4362"), "{text}");
    assert!(text.contains("10.5171"), "{text}");
    assert!(text.contains("required split 69.4%-30.6%"), "{text}");

    let out = refmeta(tmp.path(), &["threshold", "--turnout", "0.4"]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn simulate_is_seed_deterministic_and_pipes_into_analyze() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "simulate", "--k", "6", "--mu", "0.5", "--tau2", "0", "--sizes", "200000", "--seed", "99",
    ];
    let a = refmeta(tmp.path(), &{
        let mut v = args.to_vec();
        v.extend(["-o", "a.csv"]);
        v
    });
    let b = refmeta(tmp.path(), &{
        let mut v = args.to_vec();
        v.extend(["-o", "b.csv"]);
        v
    });
    assert_eq!(a.status.code(), Some(0), "{a:?}");
    assert_eq!(b.status.code(), Some(0));
    let bytes_a = std::fs::read(tmp.path().join("a.csv")).unwrap();
    let bytes_b = std::fs::read(tmp.path().join("b.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed, same bytes");

    // homogeneous data: fixed-effects and random-effects summaries coincide
    let out = refmeta(
        tmp.path(),
        &[
            "analyze",
            "--input",
            "a.csv",
            "--level",
            "region13",
            "--methods",
            "fe,re",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let mut estimates = text
        .lines()
        .filter_map(|l| l.split(": ").nth(1).and_then(|rest| rest.split(' ').next()));
    let fe = estimates.next().unwrap();
    let re = estimates.next().unwrap();
    assert_eq!(fe, re, "FE and RE agree on homogeneous data: {text}");
}

#[test]
fn simulate_config_file_with_flag_overrides() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("gen.toml");
    std::fs::write(
        &cfg,
        "k = 4\nmu = 0.5\ntau2 = 0.0\nregion_sizes = [50000]\nseed = 3\n",
    )
    .unwrap();
    let out = refmeta(
        tmp.path(),
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "4",
            "-o",
            "c.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = std::fs::read_to_string(tmp.path().join("c.csv")).unwrap();
    assert_eq!(text.lines().count(), 5, "header plus four regions");

    let bad = refmeta(
        tmp.path(),
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--tau2",
            "0.9",
        ],
    );
    assert_eq!(bad.status.code(), Some(3), "infeasible beta: {bad:?}");
}

#[test]
fn simulate_recovery_check_passes_at_scale() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(
        tmp.path(),
        &[
            "simulate",
            "--k",
            "50",
            "--mu",
            "0.5",
            "--tau2",
            "0.01",
            "--sizes",
            "100000",
            "--seed",
            "20160623",
            "--recovery-check",
            "--replicates",
            "200",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
    assert!(text.contains("ratio"), "{text}");
}

#[test]
fn forest_renders_svg() {
    let tmp = TempDir::new().unwrap();
    let out = refmeta(
        tmp.path(),
        &[
            "forest", "--level", "country5", "--method", "re", "-o", "plot.svg",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let svg = std::fs::read_to_string(tmp.path().join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polygon"), "pooled rhombus present");
    assert!(svg.contains("Gibraltar"), "row labels present");
}

#[test]
fn outputs_are_rereadable_and_deterministic() {
    let tmp = TempDir::new().unwrap();
    let run = || {
        refmeta(
            tmp.path(),
            &["analyze", "--level", "country5", "--methods", "ivhet"],
        )
    };
    assert_eq!(run().status.code(), Some(0));
    let dir = tmp.path().join("out");
    let first = std::fs::read(dir.join("forest_country5_ivhet.svg")).unwrap();
    let first_json = std::fs::read(dir.join("analysis_country5_ivhet.json")).unwrap();
    assert_eq!(run().status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.join("forest_country5_ivhet.svg")).unwrap(),
        first
    );
    assert_eq!(
        std::fs::read(dir.join("analysis_country5_ivhet.json")).unwrap(),
        first_json
    );
    // the CSV mirror has a header plus one method row
    let csv = std::fs::read_to_string(dir.join("analysis_country5.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("Method,"));
}
