//! `nilquant` command-line driver.
//!
//! Exit status: 0 when everything passes, 1 when a check fails or a
//! computation errors, 2 for configuration and usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use nilquant::config::{parse_config_with, parse_group, ConfigError};
use nilquant::experiment::{run_experiment_in, symbol_export_grid, window_of};
use nilquant::numerics::export::{read_matrix_binary, write_field_csv, write_matrix_csv};
use nilquant::suite::{run_suite, SuiteContext, DEFAULT_SEED};
use nilquant::validate_algebra;

#[derive(Parser)]
#[command(name = "nilquant", version, about = "Quantization on nilpotent Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on Lie algebras.
    Algebra {
        #[command(subcommand)]
        action: AlgebraCmd,
    },
    /// Assemble an operator and write matrix, fields and summary.
    Quantize(QuantizeArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Convert a binary matrix to CSV, or write the window and symbol of a config.
    Export(ExportArgs),
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check antisymmetry, Jacobi and the nilpotency step.
    Validate {
        /// Config file whose `group` is checked.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Preset such as `heisenberg:1`; overrides the config.
        #[arg(long)]
        group: Option<String>,
    },
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// berezin | op | tau | magnetic
    #[arg(long)]
    scheme: Option<String>,
    /// τ map for the tau scheme: e, id, symmetric, scaled:t
    #[arg(long)]
    tau: Option<String>,
    /// Potential preset (zero, landau:b, linear3:b) or a JSON file.
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even when a cost guard would reject the grids.
    #[arg(long)]
    override_cost_guard: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, repeatable; `all` runs every suite.
    #[arg(long = "suite", default_value = "all")]
    suites: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies every non-exact tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// Config supplying `seed` and per-check `tolerances`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for `report.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
    /// List the suites and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct ExportArgs {
    /// Binary matrix (with its `.json` sidecar) to convert to CSV.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Config whose window and symbol are written as CSV.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn run_err(e: impl std::fmt::Display) -> Failure {
    Failure::Run(e.to_string())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn config_text(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => read_text(p),
        None => Ok("{}".into()),
    }
}

/// Replaces top-level keys of a JSON config.
fn with_overrides(text: &str, overrides: &[(&str, Option<Value>)]) -> Result<String, Failure> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Failure::Config(format!("not valid JSON: {e}")))?;
    let Value::Object(map) = &mut v else {
        return Err(Failure::Config("config must be a JSON object".into()));
    };
    for (k, val) in overrides {
        if let Some(val) = val {
            map.insert(k.to_string(), val.clone());
        }
    }
    Ok(v.to_string())
}

fn algebra_validate(config: &Option<PathBuf>, group: &Option<String>) -> Result<bool, Failure> {
    let text = with_overrides(&config_text(config)?, &[("group", group.clone().map(Value::from))])?;
    let alg = parse_group(&text)?;
    let report = validate_algebra(&alg);
    println!("{report}");
    Ok(report.passed())
}

fn quantize(a: &QuantizeArgs) -> Result<bool, Failure> {
    let text = with_overrides(
        &config_text(&a.config)?,
        &[
            ("group", a.group.clone().map(Value::from)),
            ("scheme", a.scheme.clone().map(Value::from)),
            ("tau", a.tau.clone().map(Value::from)),
            ("potential", a.potential.clone().map(Value::from)),
            ("seed", a.seed.map(Value::from)),
        ],
    )?;
    let cfg = parse_config_with(&text, a.override_cost_guard)?;
    let dir = a.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let summary = run_experiment_in(&cfg, &dir).map_err(run_err)?;
    println!("{}", serde_json::to_string_pretty(&summary).map_err(run_err)?);
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Result<bool, Failure> {
    if a.list {
        for (name, about, _) in nilquant::suite::SUITES {
            println!("{name:<14} {about}");
        }
        return Ok(true);
    }
    let mut ctx = SuiteContext::new(DEFAULT_SEED).with_tol_scale(a.tol_scale);
    if !(a.tol_scale.is_finite() && a.tol_scale > 0.0) {
        return Err(Failure::Config(format!("--tol-scale must be positive, got {}", a.tol_scale)));
    }
    if let Some(path) = &a.config {
        let cfg = parse_config_with(&read_text(path)?, false)?;
        ctx.seed = cfg.seed;
        ctx.overrides = cfg.tolerances;
    }
    if let Some(s) = a.seed {
        ctx.seed = s;
    }
    let report = run_suite(&a.suites, &ctx).map_err(|e| Failure::Config(e.to_string()))?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| run_err(format!("{}: {e}", dir.display())))?;
        let path = dir.join("report.json");
        std::fs::write(&path, report.to_json()).map_err(|e| run_err(format!("{}: {e}", path.display())))?;
    }
    Ok(report.pass)
}

fn export(a: &ExportArgs) -> Result<bool, Failure> {
    if a.matrix.is_none() && a.config.is_none() {
        return Err(Failure::Config("export needs --matrix and/or --config".into()));
    }
    if let Some(m) = &a.matrix {
        let (op, side) = read_matrix_binary(m).map_err(run_err)?;
        let out = match &a.out {
            Some(d) => d.join(m.with_extension("csv").file_name().expect("file name")),
            None => m.with_extension("csv"),
        };
        if let Some(parent) = out.parent() {
            std::fs::create_dir_all(parent).map_err(run_err)?;
        }
        write_matrix_csv(&out, &op).map_err(run_err)?;
        println!("{} ({} scheme, {} nodes) -> {}", m.display(), side.scheme, op.len(), out.display());
    }
    if let Some(c) = &a.config {
        let cfg = parse_config_with(&read_text(c)?, false)?;
        let dir = a.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        std::fs::create_dir_all(&dir).map_err(run_err)?;
        let w = window_of(&cfg).map_err(run_err)?;
        write_field_csv(&dir.join("window.csv"), &cfg.grid, &w.field().sample(&cfg.grid).map_err(run_err)?)
            .map_err(run_err)?;
        let (sg, _) = symbol_export_grid(&cfg.xi).map_err(run_err)?;
        write_field_csv(&dir.join("symbol.csv"), &sg.as_box(), &cfg.symbol.sample(&sg)).map_err(run_err)?;
        println!("window.csv, symbol.csv -> {}", dir.display());
    }
    Ok(true)
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("NILQUANT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("NILQUANT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(run_err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| match &cli.command {
        Command::Algebra {
            action: AlgebraCmd::Validate { config, group },
        } => algebra_validate(config, group),
        Command::Quantize(a) => quantize(a),
        Command::Verify(a) => verify(a),
        Command::Export(a) => export(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
