//! `colltherm`: heatmap and scaling sweeps plus the validation suite.
//!
//! Exit codes: 0 success, 1 failed validation or runtime failure, 2 usage
//! or configuration error.

mod axis;
mod config;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use colltherm::validation::{coherence_sign_flip_kernel, run_validation, ValidationOptions};
use colltherm::{AncillaPrep, DEFAULT_MAX_ANCILLAS};

use axis::AxisSpec;
use config::{axis_from_value, parse_prep, parse_prep_list, FileConfig};
use sweep::{Base, HeatmapSpec, ScalingSpec};

#[derive(Parser)]
#[command(
    name = "colltherm",
    version,
    about = "Collisional thermometry sweeps and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-ancilla QFI over a (gamma_tau_se, g_tau_sa) grid.
    Heatmap(HeatmapArgs),
    /// Block QFI F_N for N = 1..n_max and each preparation.
    Scaling(ScalingArgs),
    /// Analytic-versus-numeric checks, reported as JSON.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Bath temperature, in units of the qubit gap.
    #[arg(long)]
    temperature: Option<f64>,
    /// Qubit gap (default 1).
    #[arg(long)]
    omega: Option<f64>,
    /// TOML file with defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Raise the ancilla cap above 12 (memory grows as 4^N).
    #[arg(long)]
    max_ancillas: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[command(flatten)]
    common: Common,
    /// Axis `min:max:count[:lin|log]`.
    #[arg(long)]
    gamma_tau_se: Option<AxisSpec>,
    /// Axis `min:max:count[:lin|log]`; accepts `pi/2` style bounds.
    #[arg(long)]
    g_tau_sa: Option<AxisSpec>,
    /// g, e, plus or custom:<file.json>.
    #[arg(long)]
    prep: Option<String>,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    gamma_tau_se: Option<AxisSpec>,
    #[arg(long)]
    g_tau_sa: Option<AxisSpec>,
    /// Comma-separated preparations (default g,e,plus).
    #[arg(long)]
    prep: Option<String>,
    /// Largest block length.
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Trimmed grids for a fast smoke run.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Swap in a thermal map with a flipped coherence exponent.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Validation,
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    match path {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage),
        None => Ok(FileConfig::default()),
    }
}

fn resolve_base(common: &Common, file: &FileConfig) -> Result<Base, Failure> {
    let temperature = common
        .temperature
        .or(file.temperature)
        .ok_or_else(|| Failure::Usage("--temperature is required".into()))?;
    let max_ancillas = common
        .max_ancillas
        .or(file.max_ancillas)
        .unwrap_or(DEFAULT_MAX_ANCILLAS);
    if max_ancillas > DEFAULT_MAX_ANCILLAS {
        eprintln!(
            "warning: ancilla cap raised to {max_ancillas}; a block of N ancillas needs a 2^(N+1)-dimensional register"
        );
    }
    Ok(Base {
        temperature,
        omega: common.omega.or(file.omega).unwrap_or(1.0),
        max_ancillas,
    })
}

fn resolve_axis(
    flag: Option<&AxisSpec>,
    file: Option<&toml::Value>,
    key: &str,
) -> Result<AxisSpec, Failure> {
    match (flag, file) {
        (Some(a), _) => Ok(a.clone()),
        (None, Some(v)) => axis_from_value(key, v).map_err(Failure::Usage),
        (None, None) => Err(Failure::Usage(format!(
            "--{} is required",
            key.replace('_', "-")
        ))),
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure::Runtime(e.to_string()))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Runtime(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn heatmap(args: HeatmapArgs) -> Result<(), Failure> {
    let file = load_config(args.common.config.as_deref())?;
    let base = resolve_base(&args.common, &file)?;
    let gamma_tau_se = resolve_axis(
        args.gamma_tau_se.as_ref(),
        file.gamma_tau_se.as_ref(),
        "gamma_tau_se",
    )?;
    let g_tau_sa = resolve_axis(args.g_tau_sa.as_ref(), file.g_tau_sa.as_ref(), "g_tau_sa")?;
    if gamma_tau_se.fixed().is_some() || g_tau_sa.fixed().is_some() {
        return Err(Failure::Usage(
            "heatmap sweeps both gamma_tau_se and g_tau_sa as axes".into(),
        ));
    }
    let prep = match args.prep.or(file.prep) {
        Some(s) => parse_prep(&s).map_err(Failure::Usage)?,
        None => AncillaPrep::Ground,
    };
    let spec = HeatmapSpec {
        base,
        gamma_tau_se,
        g_tau_sa,
        prep,
    };
    let pool = thread_pool(args.common.threads.or(file.threads))?;
    let rows = pool.install(|| sweep::run_heatmap(&spec));
    let mut out = open_output(args.common.out.as_deref())?;
    sweep::write_heatmap(&mut out, &spec, &rows)?;
    out.flush()?;
    report_row_errors(rows.iter().filter_map(|r| r.result.as_ref().err()));
    Ok(())
}

fn scaling(args: ScalingArgs) -> Result<(), Failure> {
    let file = load_config(args.common.config.as_deref())?;
    let base = resolve_base(&args.common, &file)?;
    let fixed = |flag, value, key: &str| -> Result<f64, Failure> {
        resolve_axis(flag, value, key)?
            .fixed()
            .ok_or_else(|| Failure::Usage(format!("scaling takes a single value for {key}")))
    };
    let gamma_tau_se = fixed(
        args.gamma_tau_se.as_ref(),
        file.gamma_tau_se.as_ref(),
        "gamma_tau_se",
    )?;
    let g_tau_sa = fixed(args.g_tau_sa.as_ref(), file.g_tau_sa.as_ref(), "g_tau_sa")?;
    let preps = parse_prep_list(args.prep.or(file.prep).as_deref().unwrap_or("g,e,plus"))
        .map_err(Failure::Usage)?;
    if preps.is_empty() {
        return Err(Failure::Usage("--prep lists no preparations".into()));
    }
    let n_max = args.n_max.or(file.n_max).unwrap_or(10);
    if n_max == 0 || n_max > base.max_ancillas {
        return Err(Failure::Usage(format!(
            "--n-max must lie in 1..={} (raise it with --max-ancillas)",
            base.max_ancillas
        )));
    }
    let spec = ScalingSpec {
        base,
        gamma_tau_se,
        g_tau_sa,
        preps,
        n_max,
    };
    let pool = thread_pool(args.common.threads.or(file.threads))?;
    let rows = pool.install(|| sweep::run_scaling(&spec));
    let mut out = open_output(args.common.out.as_deref())?;
    sweep::write_scaling(&mut out, &spec, &rows)?;
    out.flush()?;
    report_row_errors(rows.iter().filter_map(|r| r.result.as_ref().err()));
    Ok(())
}

fn report_row_errors<'a>(errors: impl Iterator<Item = &'a String>) {
    let errors: Vec<&String> = errors.collect();
    if let Some(first) = errors.first() {
        eprintln!("warning: {} point(s) failed; first: {first}", errors.len());
    }
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let mut options = ValidationOptions {
        quick: args.quick,
        ..Default::default()
    };
    if args.inject_fault {
        options.kernel = coherence_sign_flip_kernel;
    }
    let pool = thread_pool(args.threads)?;
    let report = pool.install(|| run_validation(&options));
    let mut out = open_output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    if report.all_pass {
        return Ok(());
    }
    for check in report.checks.iter().filter(|c| !c.pass) {
        match (&check.error, check.deviation) {
            (Some(e), _) => eprintln!("FAIL {}: {e}", check.name),
            (None, Some(d)) => eprintln!(
                "FAIL {}: deviation {d:e} > {:e}",
                check.name, check.tolerance
            ),
            (None, None) => eprintln!("FAIL {}", check.name),
        }
    }
    Err(Failure::Validation)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Heatmap(a) => heatmap(a),
        Command::Scaling(a) => scaling(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
