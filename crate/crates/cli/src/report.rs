//! Report rows and their table, CSV and JSON renderings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use spectral_envelope::{Method, Side};

use crate::config::ConfigEcho;

pub const SCHEMA_VERSION: u32 = 1;
/// Significant digits in CSV and JSON.
pub const MACHINE_DIGITS: usize = 12;
/// Significant digits in human tables.
pub const TABLE_DIGITS: usize = 6;

pub const SWEEP_HEADER: [&str; 6] = [
    "v",
    "lower",
    "upper",
    "oracle",
    "coincidence_delta",
    "error",
];
pub const BOUND_HEADER: [&str; 9] = [
    "v",
    "base",
    "method",
    "side",
    "value",
    "optimizer",
    "iterations",
    "converged",
    "error",
];
pub const ORACLE_HEADER: [&str; 7] = [
    "v",
    "energy",
    "nodes_found",
    "residual",
    "bracket_width",
    "r_max",
    "error",
];

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(String),
    #[error("unexpected header {found:?}")]
    Header { found: Vec<String> },
    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// `%.{digits}g`-style formatting: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to the machine-output precision.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x, MACHINE_DIGITS)
            .parse()
            .expect("formatted float parses")
    } else {
        x
    }
}

fn opt_round(x: Option<f64>) -> Option<f64> {
    x.filter(|x| x.is_finite()).map(round_sig)
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(String::new, |x| fmt_sig(x, MACHINE_DIGITS))
}

fn table_cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |x| fmt_sig(x, TABLE_DIGITS))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub v: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub oracle: Option<f64>,
    pub coincidence_delta: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn new(
        v: f64,
        lower: Option<f64>,
        upper: Option<f64>,
        oracle: Option<f64>,
        coincidence_delta: Option<f64>,
        error: Option<String>,
    ) -> Self {
        Self {
            v: round_sig(v),
            lower: opt_round(lower),
            upper: opt_round(upper),
            oracle: opt_round(oracle),
            coincidence_delta: opt_round(coincidence_delta),
            error: error.filter(|e| !e.is_empty()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub v: f64,
    pub base: String,
    pub method: Method,
    pub side: Option<Side>,
    pub value: Option<f64>,
    pub optimizer: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: bool,
    pub error: Option<String>,
}

impl BoundRow {
    pub fn from_result(
        v: f64,
        base: &str,
        method: Method,
        result: &spectral_envelope::Result<spectral_envelope::BoundResult>,
    ) -> Self {
        match result {
            Ok(b) => Self {
                v: round_sig(v),
                base: base.to_string(),
                method,
                side: Some(b.side),
                value: opt_round(Some(b.value)),
                optimizer: opt_round(Some(b.optimizer)),
                iterations: Some(b.iterations),
                converged: b.converged,
                error: None,
            },
            Err(e) => Self {
                v: round_sig(v),
                base: base.to_string(),
                method,
                side: None,
                value: None,
                optimizer: None,
                iterations: None,
                converged: false,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub v: f64,
    pub energy: Option<f64>,
    pub nodes_found: Option<u32>,
    pub residual: Option<f64>,
    pub bracket_width: Option<f64>,
    pub r_max: Option<f64>,
    pub error: Option<String>,
}

impl OracleRow {
    pub fn from_result(
        v: f64,
        result: &spectral_envelope::Result<spectral_envelope::oracle::OracleResult>,
    ) -> Self {
        match result {
            Ok(r) => Self {
                v: round_sig(v),
                energy: opt_round(Some(r.energy)),
                nodes_found: Some(r.nodes_found),
                residual: Some(round_sig(r.residual)),
                bracket_width: opt_round(Some(r.bracket_width)),
                r_max: opt_round(Some(r.r_max)),
                error: None,
            },
            Err(e) => Self {
                v: round_sig(v),
                energy: None,
                nodes_found: None,
                residual: None,
                bracket_width: None,
                r_max: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "results", rename_all = "snake_case")]
pub enum Payload {
    Bound(Vec<BoundRow>),
    Sweep(Vec<SweepRow>),
    Oracle(Vec<OracleRow>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ConfigEcho,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn parse_json_report(text: &str) -> Result<Report, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))
}

pub fn parse_json_verify(text: &str) -> Result<VerifyReport, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))
}

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    write_csv(
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_sig(r.v, MACHINE_DIGITS),
                cell(r.lower),
                cell(r.upper),
                cell(r.oracle),
                cell(r.coincidence_delta),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn bound_csv(rows: &[BoundRow]) -> String {
    write_csv(
        &BOUND_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_sig(r.v, MACHINE_DIGITS),
                r.base.clone(),
                r.method.name().to_string(),
                r.side.map_or_else(String::new, side_name),
                cell(r.value),
                cell(r.optimizer),
                r.iterations.map_or_else(String::new, |i| i.to_string()),
                r.converged.to_string(),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn oracle_csv(rows: &[OracleRow]) -> String {
    write_csv(
        &ORACLE_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_sig(r.v, MACHINE_DIGITS),
                cell(r.energy),
                r.nodes_found.map_or_else(String::new, |n| n.to_string()),
                cell(r.residual),
                cell(r.bracket_width),
                cell(r.r_max),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

fn side_name(s: Side) -> String {
    match s {
        Side::Lower => "lower".into(),
        Side::Upper => "upper".into(),
    }
}

fn parse_opt(row: usize, column: &'static str, s: &str) -> Result<Option<f64>, ReportError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|_| ReportError::Field {
        row,
        column,
        value: s.to_string(),
    })
}

/// Parses a sweep CSV as written by [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| ReportError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != SWEEP_HEADER {
        return Err(ReportError::Header { found: header });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ReportError::Csv(e.to_string()))?;
        let row = i + 1;
        let v = parse_opt(row, "v", &record[0])?.ok_or(ReportError::Field {
            row,
            column: "v",
            value: String::new(),
        })?;
        rows.push(SweepRow {
            v,
            lower: parse_opt(row, "lower", &record[1])?,
            upper: parse_opt(row, "upper", &record[2])?,
            oracle: parse_opt(row, "oracle", &record[3])?,
            coincidence_delta: parse_opt(row, "coincidence_delta", &record[4])?,
            error: Some(record[5].to_string()).filter(|e| !e.is_empty()),
        });
    }
    Ok(rows)
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_sig(r.v, TABLE_DIGITS),
                table_cell(r.lower),
                table_cell(r.upper),
                table_cell(r.oracle),
                r.coincidence_delta
                    .map_or_else(|| "-".into(), |d| format!("{d:.1e}")),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    render_table(&["v", "lower", "upper", "oracle", "delta", "error"], &body)
}

pub fn bound_table(rows: &[BoundRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_sig(r.v, TABLE_DIGITS),
                r.base.clone(),
                r.method.name().to_string(),
                r.side.map_or_else(|| "-".into(), side_name),
                table_cell(r.value),
                table_cell(r.optimizer),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    render_table(
        &["v", "base", "method", "side", "value", "optimizer", "error"],
        &body,
    )
}

pub fn oracle_table(rows: &[OracleRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_sig(r.v, TABLE_DIGITS),
                table_cell(r.energy),
                r.nodes_found.map_or_else(|| "-".into(), |n| n.to_string()),
                table_cell(r.r_max),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    render_table(&["v", "energy", "nodes", "r_max", "error"], &body)
}

pub fn verify_table(report: &VerifyReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "{} {}/{}: observed {} expected {} (tol {:.0e}){}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            fmt_sig(c.observed, 10),
            fmt_sig(c.expected, 10),
            c.tolerance,
            c.note
                .as_ref()
                .map_or_else(String::new, |n| format!(" [{n}]")),
        ));
    }
    out.push_str(&format!(
        "{} passed, {} failed\n",
        report.passed, report.failed
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(5.41553413779419, 6), "5.41553");
        assert_eq!(fmt_sig(5.41553413779419, 12), "5.41553413779");
        assert_eq!(fmt_sig(0.75, 12), "0.75");
        assert_eq!(fmt_sig(1.5, 6), "1.5");
        assert_eq!(fmt_sig(-0.25, 12), "-0.25");
        assert_eq!(fmt_sig(1e-9, 12), "1e-9");
        assert_eq!(fmt_sig(1.234e-7, 6), "1.234e-7");
        assert_eq!(fmt_sig(123456789.0, 6), "1.23457e8");
        assert_eq!(fmt_sig(999999.5, 6), "1e6");
        assert_eq!(fmt_sig(0.0001, 6), "0.0001");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(f64::NAN, 12), "nan");
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = vec![
            SweepRow::new(
                1.0,
                Some(5.41553413779419),
                Some(6.460276190999986),
                Some(6.390397858423),
                Some(1e-12),
                None,
            ),
            SweepRow::new(
                8.0,
                None,
                Some(2.0),
                None,
                None,
                Some("no bracket, found".into()),
            ),
        ];
        let text = sweep_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("v,lower,upper,oracle,coincidence_delta,error")
        );
        assert_eq!(
            lines.next(),
            Some("1,5.41553413779,6.460276191,6.39039785842,1e-12,")
        );
        assert_eq!(lines.next(), Some("8,,2,,,\"no bracket, found\""));
        assert!(!text.contains('\r'));
        assert_eq!(parse_sweep_csv(&text).unwrap(), rows);
    }

    #[test]
    fn csv_parse_errors() {
        assert!(matches!(
            parse_sweep_csv("a,b\n1,2\n"),
            Err(ReportError::Header { .. })
        ));
        let bad = "v,lower,upper,oracle,coincidence_delta,error\nx,,,,,\n";
        assert!(matches!(
            parse_sweep_csv(bad),
            Err(ReportError::Field { column: "v", .. })
        ));
        let short = "v,lower,upper,oracle,coincidence_delta,error\n1,2\n";
        assert!(parse_sweep_csv(short).is_err());
    }

    fn opt_float() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![
            Just(None),
            (-1e6f64..1e6).prop_map(Some),
            (1e-14f64..1e-3).prop_map(Some),
        ]
    }

    proptest! {
        #[test]
        fn sweep_csv_round_trips(
            data in proptest::collection::vec(
                (1e-3f64..1e3, opt_float(), opt_float(), opt_float(), opt_float(), proptest::option::of("[a-z ,\"]{0,12}")),
                0..8,
            )
        ) {
            let rows: Vec<SweepRow> = data
                .into_iter()
                .map(|(v, a, b, c, d, e)| SweepRow::new(v, a, b, c, d, e))
                .collect();
            let text = sweep_csv(&rows);
            let parsed = parse_sweep_csv(&text).unwrap();
            prop_assert_eq!(&parsed, &rows);
            prop_assert_eq!(sweep_csv(&parsed), text);
        }

        #[test]
        fn rounding_is_idempotent(x in -1e12f64..1e12) {
            let r = round_sig(x);
            prop_assert_eq!(round_sig(r), r);
            prop_assert_eq!(fmt_sig(r, MACHINE_DIGITS), fmt_sig(x, MACHINE_DIGITS));
        }
    }
}
