//! Area-level referendum data: ingestion, validation against declared
//! totals, and aggregation to regions, countries, or custom groupings.
//!
//! The canonical input is an area-level CSV (one row per counting area).
//! Region codes are closed-world: anything outside the 13 known codes is a
//! hard error, because downstream grouping depends on the code set.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::effect::Proportion;
use crate::error::{Error, Result};
use crate::meta::{GroupingSpec, RegionEstimate};

/// The 13 reporting regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Region {
    NorthEast,
    NorthWest,
    YorkshireHumber,
    EastMidlands,
    WestMidlands,
    East,
    London,
    SouthEast,
    SouthWest,
    Gibraltar,
    NorthernIreland,
    Scotland,
    Wales,
}

impl Region {
    pub const ALL: [Region; 13] = [
        Region::NorthEast,
        Region::NorthWest,
        Region::YorkshireHumber,
        Region::EastMidlands,
        Region::WestMidlands,
        Region::East,
        Region::London,
        Region::SouthEast,
        Region::SouthWest,
        Region::Gibraltar,
        Region::NorthernIreland,
        Region::Scotland,
        Region::Wales,
    ];

    /// Short code used in the CSV schema and as the pooling label.
    pub fn code(self) -> &'static str {
        match self {
            Region::NorthEast => "NE",
            Region::NorthWest => "NW",
            Region::YorkshireHumber => "Yorksh",
            Region::EastMidlands => "EMid",
            Region::WestMidlands => "WMid",
            Region::East => "East",
            Region::London => "London",
            Region::SouthEast => "SE",
            Region::SouthWest => "SW",
            Region::Gibraltar => "Gibraltar",
            Region::NorthernIreland => "NIreland",
            Region::Scotland => "Scotland",
            Region::Wales => "Wales",
        }
    }

    pub fn from_code(code: &str) -> Option<Region> {
        Region::ALL.iter().copied().find(|r| r.code() == code)
    }

    pub fn country(self) -> Country {
        match self {
            Region::Gibraltar => Country::Gibraltar,
            Region::NorthernIreland => Country::NorthernIreland,
            Region::Scotland => Country::Scotland,
            Region::Wales => Country::Wales,
            _ => Country::England,
        }
    }
}

/// The four countries plus Gibraltar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Country {
    England,
    Gibraltar,
    NorthernIreland,
    Scotland,
    Wales,
}

impl Country {
    pub const ALL: [Country; 5] = [
        Country::England,
        Country::Gibraltar,
        Country::NorthernIreland,
        Country::Scotland,
        Country::Wales,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Country::England => "England",
            Country::Gibraltar => "Gibraltar",
            Country::NorthernIreland => "NIreland",
            Country::Scotland => "Scotland",
            Country::Wales => "Wales",
        }
    }
}

/// Breakdown of rejected ballots by reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RejectReasons {
    pub no_official: u64,
    pub dual_answer: u64,
    pub scribbled: u64,
    pub unmarked: u64,
}

impl RejectReasons {
    pub fn total(&self) -> u64 {
        self.no_official + self.dual_answer + self.scribbled + self.unmarked
    }
}

/// One counting area's raw results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AreaRecord {
    pub area: String,
    pub region: Region,
    pub electorate: u64,
    pub votes_cast: u64,
    pub rejected: u64,
    pub valid: u64,
    pub leave: u64,
    pub remain: u64,
    pub reject_reasons: Option<RejectReasons>,
}

impl AreaRecord {
    /// Check the row identities; `row` and `area` only feed the error.
    fn check_invariants(&self, row: usize) -> Result<()> {
        let fail = |message: String| Error::RowInvariant {
            row,
            area: self.area.clone(),
            message,
        };
        if self.valid != self.leave + self.remain {
            return Err(fail(format!(
                "valid ({}) != leave ({}) + remain ({})",
                self.valid, self.leave, self.remain
            )));
        }
        if self.votes_cast != self.valid + self.rejected {
            return Err(fail(format!(
                "votes_cast ({}) != valid ({}) + rejected ({})",
                self.votes_cast, self.valid, self.rejected
            )));
        }
        if self.votes_cast > self.electorate {
            return Err(fail(format!(
                "votes_cast ({}) > electorate ({})",
                self.votes_cast, self.electorate
            )));
        }
        if let Some(r) = &self.reject_reasons {
            if r.total() != self.rejected {
                return Err(fail(format!(
                    "reject reasons sum ({}) != rejected ({})",
                    r.total(),
                    self.rejected
                )));
            }
        }
        Ok(())
    }
}

const BASE_COLUMNS: [&str; 8] = [
    "area",
    "region",
    "electorate",
    "votes_cast",
    "rejected",
    "valid",
    "leave",
    "remain",
];
const REASON_COLUMNS: [&str; 4] = ["no_official", "dual_answer", "scribbled", "unmarked"];

/// Read and validate an area-level CSV file.
pub fn ingest(path: &Path) -> Result<Vec<AreaRecord>> {
    let file = std::fs::File::open(path)?;
    ingest_reader(file)
}

/// Same as [`ingest`] but over any reader (used for the embedded fixture).
pub fn ingest_reader<R: Read>(reader: R) -> Result<Vec<AreaRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = rdr.headers().map_err(|e| Error::Parse {
        row: 1,
        message: format!("cannot read header: {e}"),
    })?;
    let have_reasons = match headers.len() {
        8 => false,
        12 => true,
        n => {
            return Err(Error::Parse {
                row: 1,
                message: format!("expected 8 or 12 columns, found {n}"),
            })
        }
    };
    let expected: Vec<&str> = if have_reasons {
        BASE_COLUMNS
            .iter()
            .chain(REASON_COLUMNS.iter())
            .copied()
            .collect()
    } else {
        BASE_COLUMNS.to_vec()
    };
    for (i, want) in expected.iter().enumerate() {
        if &headers[i] != *want {
            return Err(Error::Parse {
                row: 1,
                message: format!(
                    "column {} must be {:?}, found {:?}",
                    i + 1,
                    want,
                    &headers[i]
                ),
            });
        }
    }

    let mut records = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 2; // 1-based line number including the header
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != expected.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", expected.len(), record.len()),
            });
        }
        let count = |i: usize| -> Result<u64> {
            record[i].trim().parse::<u64>().map_err(|_| Error::Parse {
                row,
                message: format!(
                    "column {:?} must be a non-negative integer, found {:?}",
                    expected[i], &record[i]
                ),
            })
        };
        let region_code = record[1].trim();
        let region = Region::from_code(region_code).ok_or_else(|| Error::UnknownRegion {
            row,
            code: region_code.to_string(),
        })?;
        let reject_reasons = if have_reasons {
            let raw: Vec<&str> = (8..12).map(|i| record[i].trim()).collect();
            if raw.iter().all(|s| s.is_empty()) {
                None
            } else if raw.iter().any(|s| s.is_empty()) {
                return Err(Error::Parse {
                    row,
                    message: "reject-reason columns must be all present or all empty".into(),
                });
            } else {
                Some(RejectReasons {
                    no_official: count(8)?,
                    dual_answer: count(9)?,
                    scribbled: count(10)?,
                    unmarked: count(11)?,
                })
            }
        } else {
            None
        };
        let rec = AreaRecord {
            area: record[0].to_string(),
            region,
            electorate: count(2)?,
            votes_cast: count(3)?,
            rejected: count(4)?,
            valid: count(5)?,
            leave: count(6)?,
            remain: count(7)?,
            reject_reasons,
        };
        rec.check_invariants(row)?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("no data rows in area file"));
    }
    Ok(records)
}

/// Serialize records to the canonical CSV form: 12 columns when any record
/// carries reject reasons, 8 otherwise; LF line endings; input order kept.
/// Ingesting the output reproduces the records exactly.
pub fn to_canonical_csv(records: &[AreaRecord]) -> String {
    let have_reasons = records.iter().any(|r| r.reject_reasons.is_some());
    let mut out = String::new();
    out.push_str(&BASE_COLUMNS.join(","));
    if have_reasons {
        out.push(',');
        out.push_str(&REASON_COLUMNS.join(","));
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}",
            r.area,
            r.region.code(),
            r.electorate,
            r.votes_cast,
            r.rejected,
            r.valid,
            r.leave,
            r.remain
        ));
        if have_reasons {
            match &r.reject_reasons {
                Some(x) => out.push_str(&format!(
                    ",{},{},{},{}",
                    x.no_official, x.dual_answer, x.scribbled, x.unmarked
                )),
                None => out.push_str(",,,,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Aggregation target for [`aggregate`].
#[derive(Debug, Clone)]
pub enum AggregationLevel {
    /// The 13 reporting regions.
    Region13,
    /// England plus the other three countries and Gibraltar.
    Country5,
    /// User-defined partition of the region codes present in the input.
    Custom(GroupingSpec),
}

/// Count sums plus derived rates and the pooling estimate for one group of
/// areas.
#[derive(Debug, Clone, Serialize)]
pub struct RegionAggregate {
    pub label: String,
    pub areas: usize,
    pub electorate: u64,
    pub votes_cast: u64,
    pub rejected: u64,
    pub valid: u64,
    pub leave: u64,
    pub remain: u64,
    pub turnout_rate: f64,
    pub p_leave: Proportion,
    pub estimate: RegionEstimate,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    areas: usize,
    electorate: u64,
    votes_cast: u64,
    rejected: u64,
    valid: u64,
    leave: u64,
    remain: u64,
}

impl Sums {
    fn add(&mut self, r: &AreaRecord) {
        self.areas += 1;
        self.electorate += r.electorate;
        self.votes_cast += r.votes_cast;
        self.rejected += r.rejected;
        self.valid += r.valid;
        self.leave += r.leave;
        self.remain += r.remain;
    }
}

fn finish(label: &str, s: Sums) -> Result<RegionAggregate> {
    let estimate = RegionEstimate::from_counts(label, s.leave, s.remain)?;
    let p_leave = Proportion::new(s.leave as f64 / s.valid as f64)?;
    Ok(RegionAggregate {
        label: label.to_string(),
        areas: s.areas,
        electorate: s.electorate,
        votes_cast: s.votes_cast,
        rejected: s.rejected,
        valid: s.valid,
        leave: s.leave,
        remain: s.remain,
        turnout_rate: s.votes_cast as f64 / s.electorate as f64,
        p_leave,
        estimate,
    })
}

/// Sum areas up to the requested level. Output order is the canonical
/// region/country order, or spec order for custom groupings.
pub fn aggregate(records: &[AreaRecord], level: &AggregationLevel) -> Result<Vec<RegionAggregate>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records to aggregate"));
    }
    match level {
        AggregationLevel::Region13 => {
            let mut by_region: BTreeMap<Region, Sums> = BTreeMap::new();
            for r in records {
                by_region.entry(r.region).or_default().add(r);
            }
            Region::ALL
                .iter()
                .filter_map(|reg| by_region.get(reg).map(|s| finish(reg.code(), *s)))
                .collect()
        }
        AggregationLevel::Country5 => {
            let mut by_country: BTreeMap<Country, Sums> = BTreeMap::new();
            for r in records {
                by_country.entry(r.region.country()).or_default().add(r);
            }
            Country::ALL
                .iter()
                .filter_map(|c| by_country.get(c).map(|s| finish(c.label(), *s)))
                .collect()
        }
        AggregationLevel::Custom(spec) => {
            let mut by_region: BTreeMap<&'static str, Sums> = BTreeMap::new();
            for r in records {
                by_region.entry(r.region.code()).or_default().add(r);
            }
            let labels: Vec<&str> = by_region.keys().copied().collect();
            spec.validate_partition(&labels)?;
            spec.groups
                .iter()
                .map(|g| {
                    let mut s = Sums::default();
                    for m in &g.members {
                        let member = by_region.get(m.as_str()).expect("validated partition");
                        s.areas += member.areas;
                        s.electorate += member.electorate;
                        s.votes_cast += member.votes_cast;
                        s.rejected += member.rejected;
                        s.valid += member.valid;
                        s.leave += member.leave;
                        s.remain += member.remain;
                    }
                    finish(&g.name, s)
                })
                .collect()
        }
    }
}

/// Declared totals to reconcile against: one row per label.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceTotals {
    pub rows: Vec<ReferenceRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceRow {
    pub label: String,
    pub electorate: u64,
    pub votes_cast: u64,
    pub rejected: u64,
    pub valid: u64,
    pub leave: u64,
    pub remain: u64,
}

impl ReferenceTotals {
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let want = [
            "label",
            "electorate",
            "votes_cast",
            "rejected",
            "valid",
            "leave",
            "remain",
        ];
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != want {
            return Err(Error::Parse {
                row: 1,
                message: format!("reference header must be {:?}", want.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let row = idx + 2;
            let record = record?;
            let count = |i: usize| -> Result<u64> {
                record[i].trim().parse().map_err(|_| Error::Parse {
                    row,
                    message: format!("bad count in column {:?}: {:?}", want[i], &record[i]),
                })
            };
            rows.push(ReferenceRow {
                label: record[0].to_string(),
                electorate: count(1)?,
                votes_cast: count(2)?,
                rejected: count(3)?,
                valid: count(4)?,
                leave: count(5)?,
                remain: count(6)?,
            });
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("no rows in reference totals"));
        }
        Ok(Self { rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// One compared field in a reconciliation report.
#[derive(Debug, Clone, Serialize)]
pub struct FieldCheck {
    pub field: &'static str,
    pub expected: u64,
    pub observed: u64,
    pub pass: bool,
}

fn check(field: &'static str, expected: u64, observed: u64) -> FieldCheck {
    FieldCheck {
        field,
        expected,
        observed,
        pass: expected == observed,
    }
}

/// Per-label comparison of observed sums against declared totals.
#[derive(Debug, Clone, Serialize)]
pub struct LabelChecks {
    pub label: String,
    pub found: bool,
    pub fields: Vec<FieldCheck>,
    pub pass: bool,
}

/// Full reconciliation report; serializes to the JSON interchange form.
#[derive(Debug, Clone, Serialize)]
pub struct ReconciliationReport {
    pub area_count: usize,
    pub labels: Vec<LabelChecks>,
    /// Present when the records carry reject-reason breakdowns: the sum of
    /// all reason counts against the declared UK rejected total.
    pub reject_reasons: Option<FieldCheck>,
    pub pass: bool,
}

/// Compare the file's country-level and overall sums against declared
/// totals. Mismatches are report content, not errors.
///
/// Labels in `declared` are matched against the five country labels; the
/// label `UK` (or `Total`) is matched against the sum over all records.
pub fn reconcile(records: &[AreaRecord], declared: &ReferenceTotals) -> ReconciliationReport {
    let mut by_country: BTreeMap<&'static str, Sums> = BTreeMap::new();
    let mut total = Sums::default();
    for r in records {
        by_country
            .entry(r.region.country().label())
            .or_default()
            .add(r);
        total.add(r);
    }

    let mut labels = Vec::new();
    for row in &declared.rows {
        let observed = if row.label == "UK" || row.label == "Total" {
            Some(total)
        } else {
            by_country.get(row.label.as_str()).copied()
        };
        let (found, fields) = match observed {
            Some(s) => {
                let fields = vec![
                    check("electorate", row.electorate, s.electorate),
                    check("votes_cast", row.votes_cast, s.votes_cast),
                    check("rejected", row.rejected, s.rejected),
                    check("valid", row.valid, s.valid),
                    check("leave", row.leave, s.leave),
                    check("remain", row.remain, s.remain),
                ];
                (true, fields)
            }
            None => (false, Vec::new()),
        };
        let pass = found && fields.iter().all(|f| f.pass);
        labels.push(LabelChecks {
            label: row.label.clone(),
            found,
            fields,
            pass,
        });
    }

    let reject_reasons = if records.iter().any(|r| r.reject_reasons.is_some()) {
        let observed: u64 = records
            .iter()
            .filter_map(|r| r.reject_reasons.as_ref())
            .map(RejectReasons::total)
            .sum();
        let expected = declared
            .rows
            .iter()
            .find(|r| r.label == "UK" || r.label == "Total")
            .map(|r| r.rejected)
            .unwrap_or(total.rejected);
        Some(check("reject_reasons_total", expected, observed))
    } else {
        None
    };

    let pass = labels.iter().all(|l| l.pass) && reject_reasons.as_ref().is_none_or(|c| c.pass);
    ReconciliationReport {
        area_count: records.len(),
        labels,
        reject_reasons,
        pass,
    }
}

/// Result of re-deriving one aggregate's standard error by literal
/// respondent-level expansion instead of the closed-form counts formula.
#[derive(Debug, Clone, Serialize)]
pub struct ExpandCheck {
    pub label: String,
    pub respondents: u64,
    pub se_formula: f64,
    pub se_expanded: f64,
    pub abs_diff: f64,
}

/// Walk every individual ballot in the aggregate, accumulating the Fisher
/// information of the ungrouped binary outcomes, and compare the resulting
/// log-odds standard error with the counts formula. The two agree to
/// rounding error, which is why the toolkit never materializes
/// respondent-level data.
pub fn expand_check(agg: &RegionAggregate) -> ExpandCheck {
    let n = agg.valid;
    let p = agg.leave as f64 / n as f64;
    let per_respondent = p * (1.0 - p);
    let mut information = 0.0;
    for _ in 0..n {
        information += per_respondent;
    }
    let se_expanded = (1.0 / information).sqrt();
    ExpandCheck {
        label: agg.label.clone(),
        respondents: n,
        se_formula: agg.estimate.se,
        se_expanded,
        abs_diff: (se_expanded - agg.estimate.se).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta::Group;
    use approx::assert_abs_diff_eq;

    const SMALL: &str = "\
area,region,electorate,votes_cast,rejected,valid,leave,remain
Alpha,NE,1000,800,10,790,400,390
Beta,NE,2000,1500,20,1480,700,780
Gamma,Scotland,3000,2000,15,1985,900,1085
";

    #[test]
    fn ingest_small_file() {
        let records = ingest_reader(SMALL.as_bytes()).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].region, Region::NorthEast);
        assert_eq!(records[2].region, Region::Scotland);
        assert!(records[0].reject_reasons.is_none());
    }

    #[test]
    fn ingest_rejects_unknown_region() {
        let text = SMALL.replace("Scotland", "Atlantis");
        let err = ingest_reader(text.as_bytes()).unwrap_err();
        match err {
            Error::UnknownRegion { row, code } => {
                assert_eq!(row, 4);
                assert_eq!(code, "Atlantis");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn ingest_rejects_broken_identity() {
        let text = SMALL.replace("790,400,390", "790,400,391");
        let err = ingest_reader(text.as_bytes()).unwrap_err();
        match err {
            Error::RowInvariant { row, area, message } => {
                assert_eq!(row, 2);
                assert_eq!(area, "Alpha");
                assert!(message.contains("valid"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn ingest_rejects_turnout_above_electorate() {
        let text = SMALL.replace("Alpha,NE,1000", "Alpha,NE,700");
        assert!(matches!(
            ingest_reader(text.as_bytes()),
            Err(Error::RowInvariant { .. })
        ));
    }

    #[test]
    fn ingest_rejects_empty_file() {
        assert!(ingest_reader("".as_bytes()).is_err());
        let header_only = "area,region,electorate,votes_cast,rejected,valid,leave,remain\n";
        assert!(matches!(
            ingest_reader(header_only.as_bytes()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn ingest_checks_reason_sum() {
        let text = "\
area,region,electorate,votes_cast,rejected,valid,leave,remain,no_official,dual_answer,scribbled,unmarked
Alpha,NE,1000,800,10,790,400,390,1,2,3,5
";
        assert!(matches!(
            ingest_reader(text.as_bytes()),
            Err(Error::RowInvariant { .. })
        ));
        let ok = text.replace("1,2,3,5", "1,2,3,4");
        let records = ingest_reader(ok.as_bytes()).unwrap();
        assert_eq!(records[0].reject_reasons.unwrap().total(), 10);
    }

    #[test]
    fn canonical_round_trip() {
        let records = ingest_reader(SMALL.as_bytes()).unwrap();
        let text = to_canonical_csv(&records);
        assert_eq!(text, SMALL);
        let again = ingest_reader(text.as_bytes()).unwrap();
        assert_eq!(again, records);
    }

    #[test]
    fn aggregate_region13_sums() {
        let records = ingest_reader(SMALL.as_bytes()).unwrap();
        let aggs = aggregate(&records, &AggregationLevel::Region13).unwrap();
        assert_eq!(aggs.len(), 2);
        let ne = &aggs[0];
        assert_eq!(ne.label, "NE");
        assert_eq!(ne.areas, 2);
        assert_eq!(ne.valid, 2270);
        assert_eq!(ne.leave, 1100);
        assert_abs_diff_eq!(ne.p_leave.value(), 1100.0 / 2270.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ne.estimate.se,
            (1.0 / 1100.0 + 1.0 / 1170.0f64).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn aggregate_single_area_passthrough() {
        let records = vec![AreaRecord {
            area: "Solo".into(),
            region: Region::Wales,
            electorate: 100,
            votes_cast: 90,
            rejected: 2,
            valid: 88,
            leave: 40,
            remain: 48,
            reject_reasons: None,
        }];
        let aggs = aggregate(&records, &AggregationLevel::Region13).unwrap();
        assert_eq!(aggs.len(), 1);
        assert_eq!(aggs[0].leave, 40);
        assert_eq!(aggs[0].areas, 1);
    }

    #[test]
    fn aggregate_custom_requires_full_partition() {
        let records = ingest_reader(SMALL.as_bytes()).unwrap();
        let spec = GroupingSpec {
            groups: vec![Group {
                name: "north".into(),
                members: vec!["NE".into()],
            }],
        };
        let err = aggregate(&records, &AggregationLevel::Custom(spec)).unwrap_err();
        assert!(err.to_string().contains("Scotland"));
    }

    #[test]
    fn country_map_is_total() {
        for r in Region::ALL {
            let c = r.country();
            match r {
                Region::Gibraltar => assert_eq!(c, Country::Gibraltar),
                Region::NorthernIreland => assert_eq!(c, Country::NorthernIreland),
                Region::Scotland => assert_eq!(c, Country::Scotland),
                Region::Wales => assert_eq!(c, Country::Wales),
                _ => assert_eq!(c, Country::England),
            }
        }
    }

    #[test]
    fn reconcile_reports_mismatch_without_error() {
        let records = ingest_reader(SMALL.as_bytes()).unwrap();
        let reference = ReferenceTotals::from_csv(
            "label,electorate,votes_cast,rejected,valid,leave,remain\n\
             Scotland,3000,2000,15,1985,900,1085\n\
             UK,6000,4300,45,4255,2000,2256\n",
        )
        .unwrap();
        let report = reconcile(&records, &reference);
        assert!(report.labels[0].pass, "Scotland row should match");
        assert!(!report.labels[1].pass, "UK leave total is off by one");
        assert!(!report.pass);
        let leave = report.labels[1]
            .fields
            .iter()
            .find(|f| f.field == "leave")
            .unwrap();
        assert_eq!(leave.expected, 2000);
        assert_eq!(leave.observed, 2000);
        let remain = report.labels[1]
            .fields
            .iter()
            .find(|f| f.field == "remain")
            .unwrap();
        assert!(!remain.pass);
    }

    #[test]
    fn expand_check_matches_formula() {
        let records = ingest_reader(SMALL.as_bytes()).unwrap();
        let aggs = aggregate(&records, &AggregationLevel::Region13).unwrap();
        let chk = expand_check(&aggs[0]);
        assert!(chk.abs_diff < 1e-12 * chk.se_formula.max(1.0), "{chk:?}");
    }
}
