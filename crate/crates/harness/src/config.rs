//! Experiment configuration: a `key = value` text file plus command-line
//! overrides of the same form.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::CorpusKind;
use crate::error::{config_err, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(config_err(format!("unknown format `{other}` (csv | json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Corpus size and generator. `None` means the experiment's default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CorpusSpec {
    pub count: Option<usize>,
    pub kind: Option<CorpusKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub corpus: CorpusSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Parameter grid, kept as text until the experiment reads it.
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentConfig {
            experiment: experiment.into(),
            seed: DEFAULT_SEED,
            corpus: CorpusSpec::default(),
            out: None,
            format: Format::Csv,
            params: BTreeMap::new(),
        }
    }

    /// Parses `key = value` lines. `#` starts a comment; blank lines are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::new("");
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.set_pair(line).map_err(|e| config_err(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    /// Applies one `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| config_err(format!("expected key=value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.to_string(),
            "seed" => self.seed = value.parse().map_err(|_| config_err(format!("bad seed `{value}`")))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "count" | "corpus.count" => {
                self.corpus.count = Some(value.parse().map_err(|_| config_err(format!("bad count `{value}`")))?)
            }
            "corpus" | "corpus.kind" => self.corpus.kind = Some(value.parse()?),
            "" => return Err(config_err("empty key")),
            _ => {
                self.params.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, &value.to_string()).expect("valid override");
        self
    }

    /// Checks the ranges that apply to every experiment: corpus count ≥ 1,
    /// `p > 1`, `q0 ≥ 2`, and `q > q0` whenever both are given.
    pub fn validate(&self) -> Result<()> {
        if self.experiment.is_empty() {
            return Err(config_err("no experiment given"));
        }
        if self.corpus.count == Some(0) {
            return Err(config_err("corpus count must be >= 1"));
        }
        let p = Params::new(self);
        for v in p.f64_list("p", &[])? {
            if !(v > 1.0) {
                return Err(config_err(format!("p must exceed 1, got {v}")));
            }
        }
        let q0s = p.f64_list("q0", &[])?;
        for &v in &q0s {
            if !(v >= 2.0) {
                return Err(config_err(format!("q0 must be >= 2, got {v}")));
            }
        }
        if let Some(max_q0) = q0s.iter().copied().reduce(f64::max) {
            for v in p.f64_list("q", &[])? {
                if !(v > max_q0) {
                    return Err(config_err(format!("q must exceed q0 = {max_q0}, got {v}")));
                }
            }
        }
        Ok(())
    }
}

/// Typed, usage-tracked view of the parameter grid.
pub struct Params<'a> {
    map: &'a BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Params<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        Params { map: &cfg.params, used: RefCell::new(BTreeSet::new()) }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert(key.to_string());
        self.map.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_usize(key, v),
        }
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    /// Comma-separated reals; `inf` is accepted.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => split(v).map(|s| parse_f64(key, s)).collect(),
        }
    }

    /// Comma-separated integers; an item `a..=b` expands to the inclusive
    /// range.
    pub fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => {
                let mut out = Vec::new();
                for item in split(v) {
                    if let Some((a, b)) = item.split_once("..=") {
                        let (a, b) = (parse_usize(key, a)?, parse_usize(key, b)?);
                        if a > b {
                            return Err(config_err(format!("{key}: empty range {item}")));
                        }
                        out.extend(a..=b);
                    } else {
                        out.push(parse_usize(key, item)?);
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn list<T>(&self, key: &str, default: &str) -> Result<Vec<T>>
    where
        T: FromStr,
        T::Err: Into<HarnessError>,
    {
        split(self.raw(key).unwrap_or(default)).map(|s| s.parse().map_err(Into::into)).collect()
    }

    /// Fails on any parameter that was never read.
    pub fn finish(self, experiment: &str) -> Result<()> {
        let used = self.used.into_inner();
        let unknown: Vec<&str> = self.map.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::UnknownParameters { experiment: experiment.to_string(), keys: unknown.join(", ") })
        }
    }
}

fn split(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    match v.trim() {
        "inf" | "∞" => Ok(f64::INFINITY),
        s => s.parse().map_err(|_| config_err(format!("{key}: bad number `{s}`"))),
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim().parse().map_err(|_| config_err(format!("{key}: bad integer `{v}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_overrides() {
        let text = "experiment = lacunary  # comment\nseed=7\n\ni = 1..=3, 10\nformat=json\ncount = 4\n";
        let mut cfg = ExperimentConfig::parse(text).unwrap();
        cfg.set_pair("q=3").unwrap();
        assert_eq!(cfg.experiment, "lacunary");
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.corpus.count, Some(4));
        let p = Params::new(&cfg);
        assert_eq!(p.usize_list("i", &[]).unwrap(), vec![1, 2, 3, 10]);
        assert_eq!(p.f64("q", 0.0).unwrap(), 3.0);
        p.finish("lacunary").unwrap();
    }

    #[test]
    fn unknown_keys_are_reported() {
        let cfg = ExperimentConfig::new("x").with("qq", 3);
        let p = Params::new(&cfg);
        p.f64("q", 1.0).unwrap();
        assert!(matches!(p.finish("x"), Err(HarnessError::UnknownParameters { .. })));
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::new("x").with("p", 1).validate().is_err());
        assert!(ExperimentConfig::new("x").with("q0", 1.5).validate().is_err());
        assert!(ExperimentConfig::new("x").with("q0", 2).with("q", 2).validate().is_err());
        assert!(ExperimentConfig::new("x").with("count", 0).validate().is_err());
        assert!(ExperimentConfig::new("x").with("q0", 2).with("q", "3,4").with("p", "1.5,inf").validate().is_ok());
        assert!(ExperimentConfig::new("").validate().is_err());
        assert!(ExperimentConfig::parse("nonsense").is_err());
    }
}
