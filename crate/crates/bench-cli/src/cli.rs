use std::io::Write;
use std::path::{Path, PathBuf};

use banditconf::thresholds::{
    bounded_combes, bounded_garivier, c_g, h_inverse, one_arm_threshold, tuning_cross_check,
    universal_threshold, GFunction, Sides,
};
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::experiments::run_experiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdKind {
    UniversalTwo,
    UniversalOne,
    OneArm,
    CgGaussian,
    CgGamma,
    CgIdeal,
    Garivier,
    Combes,
    HInverse,
    TuningCrossCheck,
}

#[derive(Debug, Parser)]
#[command(name = "banditconf", version, about = "Confidence sequences and identification experiments")]
pub struct Cli {
    /// Output format for results and errors.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file; overrides the config. Defaults to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one threshold function.
    Threshold {
        #[arg(value_enum)]
        kind: ThresholdKind,
        #[arg(long)]
        x: f64,
        /// Horizon for the bounded thresholds.
        #[arg(long, default_value_t = 1e6)]
        n: f64,
        /// Subset size for the subset baseline.
        #[arg(long, default_value_t = 1)]
        set_size: usize,
    },
    /// Run an experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available experiments.
    ListExperiments,
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn evaluate(kind: ThresholdKind, x: f64, n: f64, set_size: usize) -> Result<f64, CliError> {
    let v = match kind {
        ThresholdKind::UniversalTwo => universal_threshold(x, Sides::Two),
        ThresholdKind::UniversalOne => universal_threshold(x, Sides::One),
        ThresholdKind::OneArm => one_arm_threshold(x),
        ThresholdKind::CgGaussian => c_g(GFunction::Gaussian, x),
        ThresholdKind::CgGamma => c_g(GFunction::Gamma, x),
        ThresholdKind::CgIdeal => c_g(GFunction::IdealChiSq, x),
        ThresholdKind::Garivier => bounded_garivier(x, n),
        ThresholdKind::Combes => bounded_combes(x, n, set_size),
        ThresholdKind::HInverse => h_inverse(x),
        ThresholdKind::TuningCrossCheck => tuning_cross_check(x),
    };
    v.map_err(|e| CliError::config("x", e.to_string()))
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::runtime(format!("writing output: {e}"));
    match &cli.command {
        Command::Threshold {
            kind,
            x,
            n,
            set_size,
        } => {
            let v = evaluate(*kind, *x, *n, *set_size)?;
            match cli.format {
                Format::Csv => writeln!(stdout, "{v}").map_err(io)?,
                Format::Json => writeln!(
                    stdout,
                    "{}",
                    serde_json::json!({
                        "kind": kind.to_possible_value().map(|p| p.get_name().to_string()),
                        "x": x,
                        "value": v,
                    })
                )
                .map_err(io)?,
            }
        }
        Command::Validate { config } => {
            let cfg = load_config(config, cli.seed)?;
            match cli.format {
                Format::Csv => writeln!(stdout, "ok: {}", cfg.experiment).map_err(io)?,
                Format::Json => writeln!(
                    stdout,
                    "{}",
                    serde_json::json!({"valid": true, "experiment": cfg.experiment.name()})
                )
                .map_err(io)?,
            }
        }
        Command::ListExperiments => {
            for k in ExperimentKind::ALL {
                match cli.format {
                    Format::Csv => writeln!(stdout, "{}\t{}", k.name(), k.description()).map_err(io)?,
                    Format::Json => writeln!(
                        stdout,
                        "{}",
                        serde_json::json!({
                            "name": k.name(),
                            "description": k.description(),
                            "columns": k.columns(),
                        })
                    )
                    .map_err(io)?,
                }
            }
        }
        Command::Run { config } => {
            let cfg = load_config(config, cli.seed)?;
            let jobs = cli.jobs.unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            });
            let table = run_experiment(&cfg, jobs)?;
            let rendered = match cli.format {
                Format::Csv => table.to_csv_string(),
                Format::Json => format!("{}\n", table.to_json()),
            };
            match cli.out.as_ref().or(cfg.output.as_ref()) {
                Some(path) => std::fs::write(path, rendered).map_err(|e| {
                    CliError::runtime(format!("cannot write {}: {e}", path.display()))
                })?,
                None => stdout.write_all(rendered.as_bytes()).map_err(io)?,
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code:
/// 0 on success, 1 for invalid input, 2 for runtime failures.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = match cli.format {
                Format::Json => writeln!(stderr, "{}", e.to_json()),
                Format::Csv => writeln!(stderr, "error: {e}"),
            };
            e.exit_code()
        }
    }
}
