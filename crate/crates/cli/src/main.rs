//! `stozeta`: sample point processes, evaluate the random functions built on
//! them, and run the convergence diagnostics from the command line.

mod commands;
mod complex;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, EnsembleOverrides, ExperimentConfig, Format, PrefactorName, ScalingName};

#[derive(Debug)]
pub struct CliError {
    category: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self {
            category: "config",
            message: msg.into(),
            code: 1,
        }
    }

    pub fn runtime(category: &'static str, msg: impl Into<String>) -> Self {
        Self {
            category,
            message: msg.into(),
            code: 2,
        }
    }
}

impl From<stozeta_core::Error> for CliError {
    fn from(e: stozeta_core::Error) -> Self {
        use stozeta_core::Error as E;
        let message = e.to_string();
        let (category, code) = match e {
            E::Argument(_) | E::Configuration(_) => ("config", 1),
            E::Parse { .. } => ("parse", 1),
            E::Range(_) => ("range", 1),
            E::Sampler { .. } => ("sampler", 2),
            E::Domain(_) => ("domain", 2),
            E::Discretization(_) => ("discretization", 2),
            E::Contour(_) => ("contour", 2),
            E::Estimation(_) => ("estimation", 2),
            E::Io(_) => ("io", 2),
        };
        Self { category, message, code }
    }
}

#[derive(Parser, Debug)]
#[command(name = "stozeta", version, about = "Random holomorphic functions with real zeros from sampled point processes")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Sample configurations from an ensemble
    Sample(SampleArgs),
    /// Evaluate the compensated product at points s
    Evaluate(EvaluateArgs),
    /// Compare the laws of f_n(s) across sizes n
    Converge(ConvergeArgs),
    /// Fit the counting-function growth exponents
    Propcrit(PropcritArgs),
    /// Estimate one- or two-point correlation functions
    Kernels(KernelsArgs),
    /// Compare windows of zeta zeros with the sine-kernel process
    ZetaCompare(ZetaArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON experiment config; flags override its fields
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, written atomically; standard output when absent
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "STOZETA_THREADS", hide_env_values = true)]
    threads: Option<usize>,
    /// Exit with status 3 when the command's verdict fails
    #[arg(long = "assert")]
    assert_verdict: bool,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// Ensemble kind: iid-uniform, cue, cbe, son, gue, gbe, sine-beta-approx, sine-dpp
    #[arg(long)]
    ensemble: Option<String>,
    /// Ensemble size
    #[arg(long)]
    n: Option<usize>,
    /// Inverse temperature
    #[arg(long)]
    beta: Option<f64>,
    /// Rotation angle for so-n-times-u
    #[arg(long, allow_hyphen_values = true)]
    psi: Option<f64>,
    /// Scaling to the line
    #[arg(long, value_enum)]
    scaling: Option<ScalingName>,
    /// Bulk energy E in (-2, 2)
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// Observation window A for sine ensembles
    #[arg(long = "window-a")]
    window_a: Option<f64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of configurations
    #[arg(long)]
    replicas: Option<usize>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of configurations
    #[arg(long)]
    replicas: Option<usize>,
    /// Comma-separated complex points, e.g. 0+1i,1-0.5i
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Option<Vec<String>>,
    /// Comma-separated increasing truncation levels A
    #[arg(long, value_delimiter = ',')]
    schedule: Option<Vec<f64>>,
    /// Relative tolerance for convergence along the schedule
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Prefactor multiplying the product
    #[arg(long, value_enum)]
    prefactor: Option<PrefactorName>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Replicas per size
    #[arg(long)]
    replicas: Option<usize>,
    /// Comma-separated increasing sizes
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Comma-separated complex points, e.g. 0+1i,1+1i
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct PropcritArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of configurations
    #[arg(long)]
    replicas: Option<usize>,
    /// Counting grid covers [-max, max]
    #[arg(long = "grid-max")]
    grid_max: Option<f64>,
    /// Counting grid spacing
    #[arg(long = "grid-step")]
    grid_step: Option<f64>,
}

#[derive(Args, Debug)]
struct KernelsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of configurations
    #[arg(long)]
    replicas: Option<usize>,
    /// Correlation order, 1 or 2
    #[arg(long)]
    r: Option<usize>,
    /// Observation window [-L, L]
    #[arg(long)]
    window: Option<f64>,
    /// Bin width
    #[arg(long)]
    width: Option<f64>,
    /// Largest separation for the two-point function
    #[arg(long = "max-separation")]
    max_separation: Option<f64>,
}

#[derive(Args, Debug)]
struct ZetaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Zero ordinates, one per line, ascending
    #[arg(long, value_name = "PATH")]
    zeros: Option<PathBuf>,
    /// Scale T; heights are drawn from [T/log T, T]
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Number of random windows
    #[arg(long)]
    windows: Option<usize>,
    /// Window cap (default log^2 T)
    #[arg(long)]
    cap: Option<f64>,
    /// Sine-kernel replicas (default: number of windows)
    #[arg(long = "dpp-replicas")]
    dpp_replicas: Option<usize>,
    /// Discretization grid of the sine-kernel sampler
    #[arg(long = "dpp-grid")]
    dpp_grid: Option<usize>,
    /// Comma-separated complex points
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Option<Vec<String>>,
}

impl EnsembleArgs {
    fn overrides(&self) -> EnsembleOverrides {
        EnsembleOverrides {
            kind: self.ensemble.clone(),
            n: self.n,
            beta: self.beta,
            psi: self.psi,
            scaling: self.scaling,
            energy: self.energy,
            window_a: self.window_a,
        }
    }
}

impl CommonArgs {
    fn flags(&self) -> ExperimentConfig {
        ExperimentConfig {
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
            threads: self.threads,
            ..Default::default()
        }
    }
}

struct Invocation<'a> {
    command: Command,
    common: &'a CommonArgs,
    ensemble: Option<&'a EnsembleArgs>,
    flags: ExperimentConfig,
}

fn invocation(sub: &Sub) -> Invocation<'_> {
    match sub {
        Sub::Sample(a) => Invocation {
            command: Command::Sample,
            common: &a.common,
            ensemble: Some(&a.ensemble),
            flags: ExperimentConfig {
                replicas: a.replicas,
                ..a.common.flags()
            },
        },
        Sub::Evaluate(a) => Invocation {
            command: Command::Evaluate,
            common: &a.common,
            ensemble: Some(&a.ensemble),
            flags: ExperimentConfig {
                replicas: a.replicas,
                s: a.s.clone(),
                schedule: a.schedule.clone(),
                rel_tol: a.rel_tol,
                prefactor: a.prefactor,
                ..a.common.flags()
            },
        },
        Sub::Converge(a) => Invocation {
            command: Command::Converge,
            common: &a.common,
            ensemble: Some(&a.ensemble),
            flags: ExperimentConfig {
                replicas: a.replicas,
                n_list: a.n_list.clone(),
                s: a.s.clone(),
                ..a.common.flags()
            },
        },
        Sub::Propcrit(a) => {
            let mut flags = ExperimentConfig {
                replicas: a.replicas,
                ..a.common.flags()
            };
            flags.grid.max = a.grid_max;
            flags.grid.step = a.grid_step;
            Invocation {
                command: Command::Propcrit,
                common: &a.common,
                ensemble: Some(&a.ensemble),
                flags,
            }
        }
        Sub::Kernels(a) => {
            let mut flags = ExperimentConfig {
                replicas: a.replicas,
                ..a.common.flags()
            };
            flags.correlation.r = a.r;
            flags.correlation.window = a.window;
            flags.correlation.width = a.width;
            flags.correlation.max_separation = a.max_separation;
            Invocation {
                command: Command::Kernels,
                common: &a.common,
                ensemble: Some(&a.ensemble),
                flags,
            }
        }
        Sub::ZetaCompare(a) => {
            let mut flags = ExperimentConfig {
                s: a.s.clone(),
                ..a.common.flags()
            };
            flags.zeta.zeros = a.zeros.clone();
            flags.zeta.t_max = a.t_max;
            flags.zeta.windows = a.windows;
            flags.zeta.cap = a.cap;
            flags.zeta.dpp_replicas = a.dpp_replicas;
            flags.zeta.dpp_grid = a.dpp_grid;
            Invocation {
                command: Command::ZetaCompare,
                common: &a.common,
                ensemble: None,
                flags,
            }
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::runtime("io", format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn execute(sub: &Sub) -> Result<bool, CliError> {
    let inv = invocation(sub);
    let file = match &inv.common.config {
        Some(p) => config::load(p)?,
        None => ExperimentConfig::default(),
    };
    let mut cfg = file.overlay(&inv.flags);
    if let Some(e) = inv.ensemble {
        cfg.apply_ensemble(&e.overrides())?;
    }
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(CliError::config("threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::runtime("io", e.to_string()))?;
    }
    let outcome = commands::run(inv.command, &cfg)?;
    match &cfg.out {
        Some(p) => write_atomic(p, &outcome.bytes)?,
        None => std::io::stdout()
            .write_all(&outcome.bytes)
            .map_err(|e| CliError::runtime("io", e.to_string()))?,
    }
    match outcome.verdict {
        Some((false, why)) if inv.common.assert_verdict => {
            eprintln!("ERROR:assert: verdict failed: {why}");
            Ok(false)
        }
        _ => Ok(true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            eprintln!("ERROR:config: {}", msg.trim_end());
            return ExitCode::from(1);
        }
    };
    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("ERROR:{}: {}", e.category, e.message);
            ExitCode::from(e.code)
        }
    }
}
