//! Command-line surface: kernel tables, path ensembles and the verification
//! report.
//!
//! CSV output starts with `#` lines echoing the resolved configuration,
//! then a header row. JSON output carries a versioned `schema` tag.

use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::battery::{run_suite, BatteryConfig, CheckSummary, Suite};
use crate::error::Error;
use crate::kernels::{free_atoms, free_density, kernel_measure, qbrownian_marginal_density, DEFAULT_PRODUCT_TERMS};
use crate::markov::{sample_paths, TimeGrid};
use crate::qcalc::{KernelCoordinates, ProcessParams};
use crate::quadrature::DEFAULT_NODES;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "QHARNESS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qharness", version, about = "Transition kernels, sampling and checks for q-Meixner processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quadrature nodes and weights of the law of X_t.
    Marginal(MarginalArgs),
    /// Quadrature nodes and weights of the transition law from x at s to time t.
    Kernel(KernelArgs),
    /// Sample paths started at X_0 = 0 on a time grid.
    Sample(SampleArgs),
    /// Run the verification battery and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub q: f64,
}

impl ParamArgs {
    fn resolve(&self) -> crate::Result<ProcessParams> {
        ProcessParams::new(self.theta, self.tau, self.q)
    }
}

#[derive(Debug, Clone, Args)]
pub struct MarginalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    /// Add the closed-form free density and the atom rows (q = 0 only).
    #[arg(long)]
    pub free_density: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Comma-separated increasing times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Number of random parameter cases.
    #[arg(long, default_value_t = 50)]
    pub sweep: usize,
    #[arg(long, default_value_t = BatteryConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("output failed: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 for rejected input, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Invalid(_) | Self::Library(Error::Domain(_) | Error::Unsupported(_)) => 2,
            Self::Library(_) | Self::Io(_) => 3,
        }
    }
}

/// Reads [`THREADS_ENV`]; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Invalid(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs a command, writing its output to `out`. Returns whether every
/// verification check passed (always true for the other commands).
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Marginal(a) => marginal(a, out).map(|_| true),
        Command::Kernel(a) => kernel_table(a, out).map(|_| true),
        Command::Sample(a) => sample(a, out).map(|_| true),
        Command::Verify(a) => verify(a, out),
    }
}

fn metadata(out: &mut dyn Write, command: &str, fields: &[(&str, String)]) -> io::Result<()> {
    writeln!(out, "# qharness {VERSION}")?;
    writeln!(out, "# command: {command}")?;
    for (k, v) in fields {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

fn param_fields(p: &ParamArgs) -> Vec<(&'static str, String)> {
    vec![("theta", p.theta.to_string()), ("tau", p.tau.to_string()), ("q", p.q.to_string())]
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct MarginalRow {
    y: f64,
    weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<f64>,
}

fn marginal(a: &MarginalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = a.params.resolve()?;
    let measure = kernel_measure(&params, &KernelCoordinates::marginal(a.t)?, a.nodes)?;
    let with_density = params.theta() == 0.0 && params.tau() == 0.0 && params.q().abs() < 1.0;
    let rows = measure
        .nodes()
        .iter()
        .zip(measure.weights())
        .map(|(&y, &weight)| {
            let density = if with_density {
                Some(qbrownian_marginal_density(params.q(), a.t, y, DEFAULT_PRODUCT_TERMS)?)
            } else {
                None
            };
            Ok(MarginalRow { y, weight, density })
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let mut fields = param_fields(&a.params);
    fields.extend([("t", a.t.to_string()), ("nodes", a.nodes.to_string())]);
    match a.format {
        OutputFormat::Csv => {
            metadata(out, "marginal", &fields)?;
            writeln!(out, "{}", if with_density { "y,weight,density" } else { "y,weight" })?;
            for r in &rows {
                match r.density {
                    Some(d) => writeln!(out, "{},{},{}", r.y, r.weight, d)?,
                    None => writeln!(out, "{},{}", r.y, r.weight)?,
                }
            }
        }
        OutputFormat::Json => write_json(
            out,
            &json!({
                "schema": "qharness/marginal/v1",
                "version": VERSION,
                "config": config_object(&fields),
                "rows": rows,
            }),
        )?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct KernelRow {
    y: f64,
    weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    free_density: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    atom: Option<bool>,
}

fn kernel_table(a: &KernelArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = a.params.resolve()?;
    if a.free_density && params.q() != 0.0 {
        return Err(CliError::Invalid("--free-density needs --q 0".into()));
    }
    let measure = kernel_measure(&params, &KernelCoordinates::new(a.x, a.s, a.t)?, a.nodes)?;
    let (theta, tau) = (params.theta(), params.tau());
    let mut rows = Vec::with_capacity(measure.len() + 1);
    for (&y, &weight) in measure.nodes().iter().zip(measure.weights()) {
        let (free_density, atom) = if a.free_density {
            (Some(free_density(theta, tau, a.x, a.s, a.t, y)?), Some(false))
        } else {
            (None, None)
        };
        rows.push(KernelRow { y, weight, free_density, atom });
    }
    if a.free_density {
        for atom in free_atoms(theta, tau, a.x, a.s, a.t) {
            rows.push(KernelRow { y: atom.location, weight: atom.mass, free_density: None, atom: Some(true) });
        }
    }

    let mut fields = param_fields(&a.params);
    fields.extend([
        ("x", a.x.to_string()),
        ("s", a.s.to_string()),
        ("t", a.t.to_string()),
        ("nodes", a.nodes.to_string()),
    ]);
    match a.format {
        OutputFormat::Csv => {
            metadata(out, "kernel", &fields)?;
            if a.free_density {
                // atom rows carry the atom mass in `weight` and leave the density empty
                writeln!(out, "y,weight,free_density,atom")?;
                for r in &rows {
                    let density = r.free_density.map(|d| d.to_string()).unwrap_or_default();
                    writeln!(out, "{},{},{},{}", r.y, r.weight, density, r.atom == Some(true))?;
                }
            } else {
                writeln!(out, "y,weight")?;
                for r in &rows {
                    writeln!(out, "{},{}", r.y, r.weight)?;
                }
            }
        }
        OutputFormat::Json => write_json(
            out,
            &json!({
                "schema": "qharness/kernel/v1",
                "version": VERSION,
                "config": config_object(&fields),
                "rows": rows,
            }),
        )?,
    }
    Ok(())
}

fn sample(a: &SampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = a.params.resolve()?;
    let grid = TimeGrid::new(a.grid.clone())?;
    let ensemble = sample_paths(&params, &grid, a.seed, a.paths, a.nodes, None)?;
    let times: Vec<String> = grid.times().iter().map(f64::to_string).collect();
    let mut fields = param_fields(&a.params);
    fields.extend([
        ("grid", times.join(",")),
        ("paths", a.paths.to_string()),
        ("seed", a.seed.to_string()),
        ("nodes", a.nodes.to_string()),
    ]);
    match a.format {
        OutputFormat::Csv => {
            metadata(out, "sample", &fields)?;
            writeln!(out, "path,{}", times.join(","))?;
            for (i, row) in ensemble.values.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(out, "{i},{}", cells.join(","))?;
            }
        }
        OutputFormat::Json => write_json(
            out,
            &json!({
                "schema": "qharness/sample/v1",
                "version": VERSION,
                "config": config_object(&fields),
                "times": grid.times(),
                "paths": ensemble.values,
            }),
        )?,
    }
    Ok(())
}

/// Report written by `verify`.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub checks: Vec<CheckSummary>,
    pub pass: bool,
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    if a.sweep == 0 {
        return Err(CliError::Invalid("--sweep must be at least 1".into()));
    }
    let config = BatteryConfig { seed: a.seed, sweep: a.sweep, nodes: a.nodes };
    let checks = run_suite(a.suite, &config)?;
    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        schema: "qharness/verify/v1",
        version: VERSION,
        config: json!({
            "suite": a.suite,
            "sweep": a.sweep,
            "seed": a.seed,
            "nodes": a.nodes,
        }),
        checks,
        pass,
    };
    write_json(out, &report)?;
    Ok(pass)
}

fn config_object(fields: &[(&str, String)]) -> serde_json::Value {
    fields.iter().map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone()))).collect()
}
