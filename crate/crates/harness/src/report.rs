//! Experiment reports: one row per (parameter tuple, statistic), written as
//! CSV or as a JSON array of flat objects with the same columns.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::{HarnessError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `Pass`/`Fail` rows are checked against a tolerance declared in the core
/// library; `Record` rows are measurements only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Record,
}

impl Status {
    pub fn check(holds: bool) -> Self {
        if holds {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Record => "record",
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pass" => Ok(Status::Pass),
            "fail" => Ok(Status::Fail),
            "record" => Ok(Status::Record),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub params: Vec<(String, String)>,
    pub statistic: String,
    pub value: f64,
    pub status: Status,
}

impl Row {
    pub fn record(statistic: impl Into<String>, value: f64) -> Self {
        Row { params: Vec::new(), statistic: statistic.into(), value, status: Status::Record }
    }

    pub fn check(statistic: impl Into<String>, value: f64, holds: bool) -> Self {
        Row { params: Vec::new(), statistic: statistic.into(), value, status: Status::check(holds) }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    /// Prepends a shared parameter tuple.
    pub fn with_all(mut self, shared: &[(String, String)]) -> Self {
        let mut p = shared.to_vec();
        p.append(&mut self.params);
        self.params = p;
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub version: String,
    pub rows: Vec<Row>,
}

const FIXED_HEAD: [&str; 3] = ["experiment", "seed", "version"];
const FIXED_TAIL: [&str; 3] = ["statistic", "value", "status"];

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64, rows: Vec<Row>) -> Self {
        ExperimentReport { experiment: experiment.to_string(), seed, version: VERSION.to_string(), rows }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn rows_named<'a>(&'a self, statistic: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.statistic == statistic)
    }

    /// Parameter columns in order of first appearance.
    pub fn param_columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for row in &self.rows {
            for (k, _) in &row.params {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    fn header(&self) -> Vec<String> {
        FIXED_HEAD
            .iter()
            .map(|s| s.to_string())
            .chain(self.param_columns())
            .chain(FIXED_TAIL.iter().map(|s| s.to_string()))
            .collect()
    }

    fn cells(&self, row: &Row, cols: &[String]) -> Vec<String> {
        let mut out = vec![self.experiment.clone(), self.seed.to_string(), self.version.clone()];
        out.extend(cols.iter().map(|c| row.param(c).unwrap_or("").to_string()));
        out.push(row.statistic.clone());
        out.push(format_value(row.value));
        out.push(row.status.to_string());
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let cols = self.param_columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for row in &self.rows {
            w.write_record(self.cells(row, &cols))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        let cols = self.param_columns();
        let header = self.header();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (key, cell) in header.iter().zip(self.cells(row, &cols)) {
                    let v = match key.as_str() {
                        "seed" => Value::from(self.seed),
                        "value" if row.value.is_finite() => Value::from(row.value),
                        _ => Value::from(cell),
                    };
                    obj.insert(key.clone(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes through a temporary file in the target directory, then renames
    /// it into place.
    pub fn write_atomic(&self, path: &Path, format: Format) -> Result<()> {
        let body = self.render(format)?;
        let err = |source: std::io::Error| HarnessError::Write { path: path.to_path_buf(), source };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
        tmp.write_all(body.as_bytes()).map_err(err)?;
        tmp.as_file().sync_all().map_err(err)?;
        tmp.persist(path).map_err(|e| err(e.error))?;
        Ok(())
    }

    /// Reads a report written by [`ExperimentReport::write_atomic`]; the
    /// format follows the file extension.
    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.to_path_buf(), source })?;
        let bad = |reason: String| HarnessError::Report { path: path.to_path_buf(), reason };
        let records: Vec<Vec<(String, String)>> = if path.extension().is_some_and(|e| e == "json") {
            let v: Value = serde_json::from_str(&text)?;
            let arr = v.as_array().ok_or_else(|| bad("expected a JSON array".into()))?;
            arr.iter()
                .map(|o| {
                    let o = o.as_object().ok_or_else(|| bad("expected flat objects".into()))?;
                    Ok(o.iter()
                        .map(|(k, v)| (k.clone(), v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())))
                        .collect())
                })
                .collect::<Result<_>>()?
        } else {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
            r.records()
                .map(|rec| Ok(header.iter().cloned().zip(rec?.iter().map(str::to_string)).collect()))
                .collect::<Result<_>>()?
        };
        let mut report = ExperimentReport::new("", 0, Vec::new());
        for fields in records {
            let get = |k: &str| fields.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
            let need = |k: &str| get(k).ok_or_else(|| bad(format!("missing column `{k}`")));
            report.experiment = need("experiment")?;
            report.seed = need("seed")?.parse().map_err(|_| bad("bad seed".into()))?;
            report.version = need("version")?;
            let value = need("value")?;
            report.rows.push(Row {
                params: fields
                    .iter()
                    .filter(|(k, v)| !FIXED_HEAD.contains(&k.as_str()) && !FIXED_TAIL.contains(&k.as_str()) && !v.is_empty())
                    .cloned()
                    .collect(),
                statistic: need("statistic")?,
                value: value.parse().map_err(|_| bad(format!("bad value `{value}`")))?,
                status: need("status")?.parse().map_err(bad)?,
            });
        }
        Ok(report)
    }
}

/// Shortest decimal that round-trips, so reports are byte-stable.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        ExperimentReport::new(
            "demo",
            5,
            vec![
                Row::check("residual", 0.0, true).with("q", 4).with("shape", "ball"),
                Row::record("ratio", 1.25).with("q", 4).with("J", 6),
                Row::check("limit", f64::INFINITY, false).with("q", 2),
            ],
        )
    }

    #[test]
    fn csv_has_every_parameter_column() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "experiment,seed,version,q,shape,J,statistic,value,status");
        assert_eq!(lines.next().unwrap(), format!("demo,5,{VERSION},4,ball,,residual,0.0,pass"));
        assert!(csv.contains("limit,inf,fail"));
    }

    #[test]
    fn status_summary() {
        let r = sample();
        assert!(!r.all_pass());
        assert_eq!(r.count(Status::Pass), 1);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn roundtrip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        for format in [Format::Csv, Format::Json] {
            let path = dir.path().join(format!("r.{format}"));
            sample().write_atomic(&path, format).unwrap();
            let back = ExperimentReport::read(&path).unwrap();
            assert_eq!(back.rows.len(), 3);
            assert_eq!(back.rows[1].param("J"), Some("6"));
            assert_eq!(back.rows[1].param("shape"), None);
            assert_eq!(back.rows[2].value, f64::INFINITY);
            assert_eq!(back.rows[0].status, Status::Pass);
        }
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let r = sample().write_atomic(Path::new("/nonexistent-dir/x/r.csv"), Format::Csv);
        assert!(matches!(r, Err(HarnessError::Write { .. })));
    }
}
