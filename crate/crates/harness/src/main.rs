use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use varlab_harness::experiments::{family, find};
use varlab_harness::{run_experiment, ExperimentConfig, ExperimentReport, Format, HarnessError, Status};

#[derive(Parser)]
#[command(name = "varlab", version, about = "Variational-inequality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Variation oracle and jump oracle.
    Variation(RunArgs),
    /// Martingale cotype functional.
    Martingale(RunArgs),
    /// Averaging operators: master decomposition, LV probe, weak type, BMO, J sweep.
    Diffavg(RunArgs),
    /// Calderón–Zygmund decomposition properties.
    Cz(RunArgs),
    /// Markov-operator identities, Λ_j, elementary sums, Littlewood–Paley, n_max sweep.
    Ergodic(RunArgs),
    /// Semigroup axioms and variation, jump estimates, Poisson summation, lacunary gap.
    Semigroup(RunArgs),
    /// Cotype-necessity ratios.
    Cotype(RunArgs),
    /// Summarize report files; exits nonzero if any contract row failed.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// List experiments by family.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment to run; all experiments of the family when omitted.
    #[arg(long)]
    experiment: Option<String>,
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report file, or a directory when several experiments run.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Parameter overrides, `key=value`.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Variation(a) => run_family("variation", a),
        Command::Martingale(a) => run_family("martingale", a),
        Command::Diffavg(a) => run_family("diffavg", a),
        Command::Cz(a) => run_family("cz", a),
        Command::Ergodic(a) => run_family("ergodic", a),
        Command::Semigroup(a) => run_family("semigroup", a),
        Command::Cotype(a) => run_family("cotype", a),
        Command::Report { files } => summarize_files(&files),
        Command::List => {
            for fam in varlab_harness::FAMILIES {
                let names: Vec<&str> = family(fam).map(|e| e.name).collect();
                println!("{fam}: {}", names.join(", "));
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn base_config(fam: &str, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::new(""),
    };
    for pair in &args.overrides {
        cfg.set_pair(pair)?;
    }
    if let Some(name) = &args.experiment {
        cfg.experiment = name.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    if !cfg.experiment.is_empty() {
        let spec = find(&cfg.experiment).ok_or_else(|| HarnessError::UnknownExperiment(cfg.experiment.clone()))?;
        if spec.family != fam {
            return Err(HarnessError::Config(format!("{} belongs to `{}`, not `{fam}`", spec.name, spec.family)));
        }
    }
    Ok(cfg)
}

fn run_family(fam: &str, args: RunArgs) -> Result<bool, HarnessError> {
    let base = base_config(fam, &args)?;
    let names: Vec<&str> = if base.experiment.is_empty() {
        family(fam).map(|e| e.name).collect()
    } else {
        vec![find(&base.experiment).expect("checked").name]
    };
    let several = names.len() > 1;
    if let (true, Some(dir)) = (several, &args.out) {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write { path: dir.clone(), source })?;
    }
    let mut all_pass = true;
    for name in names {
        let mut cfg = base.clone();
        cfg.experiment = name.to_string();
        cfg.out = match (&args.out, several) {
            (Some(dir), true) => Some(dir.join(format!("{name}.{}", cfg.format))),
            (out, _) => out.clone(),
        };
        let start = Instant::now();
        let report = run_experiment(&cfg)?;
        eprintln!("{name}: {:.2}s", start.elapsed().as_secs_f64());
        all_pass &= print_summary(&report);
    }
    Ok(all_pass)
}

fn print_summary(report: &ExperimentReport) -> bool {
    println!(
        "{}: {} pass, {} fail, {} record",
        report.experiment,
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Record)
    );
    for row in report.failures() {
        let params: Vec<String> = row.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("  FAIL {} = {:e} [{}]", row.statistic, row.value, params.join(" "));
    }
    report.all_pass()
}

fn summarize_files(files: &[PathBuf]) -> Result<bool, HarnessError> {
    let mut all_pass = true;
    for path in files {
        all_pass &= print_summary(&ExperimentReport::read(path)?);
    }
    Ok(all_pass)
}
