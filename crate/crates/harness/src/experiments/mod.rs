//! Experiment registry and dispatch.

mod diffavg;
mod ergodic;
mod martingale;
mod semigroup;
mod variation;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Params};
use crate::corpus::{rng_for, CorpusKind};
use crate::error::{config_err, HarnessError, Result};
use crate::report::{ExperimentReport, Row};

/// Read-only context shared by the workers of one experiment.
#[derive(Debug, Clone, Copy)]
pub struct Ctx<'a> {
    pub name: &'a str,
    pub seed: u64,
    pub count: usize,
    pub kind: CorpusKind,
}

impl Ctx<'_> {
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        rng_for(self.seed, self.name, index as u64)
    }

    /// Corpus elements `0..count` built and evaluated in parallel; the output
    /// keeps corpus order.
    pub fn map_corpus<T: Send>(&self, f: impl Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync) -> Result<Vec<T>> {
        (0..self.count).into_par_iter().map(|i| f(i, &mut self.rng(i))).collect()
    }
}

type Runner = fn(&Ctx, &Params) -> Result<Vec<Row>>;

pub struct ExperimentSpec {
    pub name: &'static str,
    pub family: &'static str,
    /// `None` for experiments without a random corpus.
    pub default_corpus: Option<(usize, CorpusKind)>,
    run: Runner,
}

use CorpusKind::*;

pub const EXPERIMENTS: &[ExperimentSpec] = &[
    ExperimentSpec { name: "variation-oracle", family: "variation", default_corpus: Some((200, RandomGaussian)), run: variation::variation_oracle },
    ExperimentSpec { name: "jump-oracle", family: "variation", default_corpus: Some((200, RandomGaussian)), run: variation::jump_oracle },
    ExperimentSpec { name: "martingale-cotype", family: "martingale", default_corpus: Some((50, RandomGaussian)), run: martingale::martingale_cotype },
    ExperimentSpec { name: "cz-properties", family: "cz", default_corpus: Some((100, RandomInteger)), run: martingale::cz_properties },
    ExperimentSpec { name: "master-decomposition", family: "diffavg", default_corpus: Some((50, RandomGaussian)), run: diffavg::master_decomposition },
    ExperimentSpec { name: "lv-probe", family: "diffavg", default_corpus: Some((8, RandomGaussian)), run: diffavg::lv_probe },
    ExperimentSpec { name: "weak11", family: "diffavg", default_corpus: Some((16, RandomGaussian)), run: diffavg::weak11 },
    ExperimentSpec { name: "bmo", family: "diffavg", default_corpus: Some((16, RandomGaussian)), run: diffavg::bmo },
    ExperimentSpec { name: "averages-variation", family: "diffavg", default_corpus: Some((8, RandomGaussian)), run: diffavg::averages_variation },
    ExperimentSpec { name: "ergodic-identity", family: "ergodic", default_corpus: Some((100, RandomGaussian)), run: ergodic::ergodic_identity },
    ExperimentSpec { name: "fractional-averages", family: "ergodic", default_corpus: Some((20, RandomGaussian)), run: ergodic::fractional_averages },
    ExperimentSpec { name: "lambda-j", family: "ergodic", default_corpus: Some((1000, RandomGaussian)), run: ergodic::lambda_j_bounds },
    ExperimentSpec { name: "elementary-constants", family: "ergodic", default_corpus: Some((500, RandomGaussian)), run: ergodic::elementary_constants },
    ExperimentSpec { name: "littlewood-paley", family: "ergodic", default_corpus: Some((8, RandomGaussian)), run: ergodic::littlewood_paley },
    ExperimentSpec { name: "ergodic-variation", family: "ergodic", default_corpus: Some((8, RandomGaussian)), run: ergodic::ergodic_variation },
    ExperimentSpec { name: "semigroup-axioms", family: "semigroup", default_corpus: Some((20, RandomGaussian)), run: semigroup::semigroup_axioms },
    ExperimentSpec { name: "semigroup-variation", family: "semigroup", default_corpus: Some((8, RandomGaussian)), run: semigroup::semigroup_variation_sweep },
    ExperimentSpec { name: "jump-estimate", family: "semigroup", default_corpus: Some((8, RandomGaussian)), run: semigroup::jump_estimate },
    ExperimentSpec { name: "poisson-summation", family: "semigroup", default_corpus: None, run: semigroup::poisson_summation },
    ExperimentSpec { name: "lacunary", family: "semigroup", default_corpus: None, run: semigroup::lacunary },
    ExperimentSpec { name: "cotype-necessity", family: "cotype", default_corpus: Some((4, RandomGaussian)), run: semigroup::cotype_necessity },
];

pub const FAMILIES: &[&str] = &["variation", "martingale", "diffavg", "cz", "ergodic", "semigroup", "cotype"];

pub fn find(name: &str) -> Option<&'static ExperimentSpec> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

pub fn family(name: &str) -> impl Iterator<Item = &'static ExperimentSpec> + '_ {
    EXPERIMENTS.iter().filter(move |e| e.family == name)
}

/// Runs the configured experiment, writes the report atomically when an
/// output path is set, and returns it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let spec = find(&cfg.experiment).ok_or_else(|| HarnessError::UnknownExperiment(cfg.experiment.clone()))?;
    let (count, kind) = match spec.default_corpus {
        Some((n, k)) => (cfg.corpus.count.unwrap_or(n), cfg.corpus.kind.unwrap_or(k)),
        None => {
            if cfg.corpus != Default::default() {
                return Err(config_err(format!("{} takes no corpus", spec.name)));
            }
            (1, RandomGaussian)
        }
    };
    let ctx = Ctx { name: spec.name, seed: cfg.seed, count, kind };
    let params = Params::new(cfg);
    let rows = (spec.run)(&ctx, &params)?;
    params.finish(spec.name)?;
    let shared: Vec<(String, String)> = match spec.default_corpus {
        Some(_) => vec![("corpus".into(), kind.to_string()), ("count".into(), count.to_string())],
        None => Vec::new(),
    };
    let rows = rows.into_iter().map(|r| r.with_all(&shared)).collect();
    let report = ExperimentReport::new(spec.name, cfg.seed, rows);
    if let Some(path) = &cfg.out {
        report.write_atomic(path, cfg.format)?;
    }
    Ok(report)
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(config_err(msg()))
    }
}

fn fmax(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn fmin(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
