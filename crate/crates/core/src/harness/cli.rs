use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::config::{HarnessConfig, REFERENCE_PRESET};
use super::estimate::run_estimate;
use super::output::{write_json, write_sweep, Format, Meta};
use super::selftest::run_selftest;
use super::sweep::{run_crb_sweep, run_mse_sweep, run_tradeoff};
use crate::error::{IsacError, Result};

/// Desk-scale array size and block length used by `mse-sweep` unless `--heavy`.
pub const DESK_ELEMENTS: usize = 8;
pub const DESK_SYMBOLS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "isac", version, about = "Bounds, estimators and beamforming sweeps for bistatic ISAC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds of each scheme along a power, SNR or distance axis.
    CrbSweep,
    /// Bounds and Monte Carlo estimator MSE.
    MseSweep,
    /// Bounds of each design along a rate or SINR axis.
    Tradeoff,
    /// One synthesize-receive-estimate run.
    Estimate,
    /// Fast internal consistency checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config, or the name of the built-in preset.
    #[arg(long, global = true, default_value = REFERENCE_PRESET)]
    pub config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the per-point trial count of the config.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Run estimator sweeps at the configured array size and block length.
    #[arg(long, global = true)]
    pub heavy: bool,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: String,
    kind: &'a str,
    exit_code: i32,
}

fn error_kind(e: &IsacError) -> &'static str {
    match e {
        IsacError::InvalidConfig(_) => "invalid_config",
        IsacError::Parse(_) => "parse",
        IsacError::Io(_) => "io",
        IsacError::Infeasible { .. } => "infeasible",
        IsacError::SolverFailure { .. } => "solver_failure",
        _ => "numerical",
    }
}

fn apply_overrides(cfg: &mut HarnessConfig, common: &CommonArgs) -> Result<()> {
    if let Some(s) = cfg.sweep.as_mut() {
        if let Some(seed) = common.seed {
            s.seed = seed;
        }
        if let Some(t) = common.trials {
            s.trials = t;
        }
        s.validate()?;
    }
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn execute(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    let format = match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let mut cfg = HarnessConfig::load(&common.config)?;
    apply_overrides(&mut cfg, common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.workers)
        .build()
        .map_err(|e| IsacError::InvalidConfig(format!("worker pool: {e}")))?;
    match cli.command {
        Command::CrbSweep | Command::Tradeoff | Command::MseSweep => {
            let name = match cli.command {
                Command::CrbSweep => "crb-sweep",
                Command::Tradeoff => "tradeoff",
                _ => "mse-sweep",
            };
            if matches!(cli.command, Command::MseSweep) && !common.heavy {
                cfg.scenario.m_tx = DESK_ELEMENTS;
                cfg.scenario.m_rx = DESK_ELEMENTS;
                cfg.scenario.t_symbols = DESK_SYMBOLS;
            }
            let res = pool.install(|| match cli.command {
                Command::CrbSweep => run_crb_sweep(&cfg),
                Command::Tradeoff => run_tradeoff(&cfg),
                _ => run_mse_sweep(&cfg),
            })?;
            let meta = Meta::new(name, &cfg, common.heavy);
            let mut w = sink(&common.out)?;
            write_sweep(&mut w, &res, &meta, format)?;
            w.flush()?;
        }
        Command::Estimate => {
            let seed = common.seed.or(cfg.sweep.as_ref().map(|s| s.seed)).unwrap_or(1);
            let report = pool.install(|| run_estimate(&cfg, seed))?;
            let mut meta = Meta::new("estimate", &cfg, common.heavy);
            meta.seed = seed;
            let mut w = sink(&common.out)?;
            match format {
                Format::Json => write_json(&mut w, &meta, std::slice::from_ref(&report))?,
                Format::Csv => {
                    let r = &report.result;
                    writeln!(w, "scheme,trial,theta_true,theta_hat,alpha_mag_hat,alpha_phase_hat,crb_rad2")?;
                    writeln!(
                        w,
                        "{},{},{:e},{:e},{:e},{},{:e}",
                        report.scheme,
                        report.trial,
                        report.theta_true,
                        r.theta_hat,
                        r.alpha_mag_hat,
                        r.alpha_phase_hat.map(|p| format!("{p:e}")).unwrap_or_default(),
                        report.crb_rad2
                    )?;
                }
            }
            w.flush()?;
        }
        Command::Selftest => {
            let checks = run_selftest();
            let mut w = sink(&common.out)?;
            match format {
                Format::Json => write_json(&mut w, &Meta::new("selftest", &cfg, false), &checks)?,
                Format::Csv => {
                    writeln!(w, "check,passed,detail")?;
                    for c in &checks {
                        writeln!(w, "{},{},{}", c.name, c.passed, c.detail)?;
                    }
                }
            }
            w.flush()?;
            if let Some(c) = checks.iter().find(|c| !c.passed) {
                return Err(IsacError::CheckFailed(format!("{}: {}", c.name, c.detail)));
            }
        }
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code. Errors go to standard error
/// as a one-line JSON object.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let report = ErrorReport { error: e.to_string(), kind: error_kind(&e), exit_code: code };
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| e.to_string()));
            code
        }
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
