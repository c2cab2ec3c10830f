//! `renergy`: energies of point files, expectation limits, Monte Carlo runs and
//! curve tables.
//!
//! Exit codes: 0 success, 1 divergent expectation, 2 usage, 3 numerical
//! non-convergence, 4 input parse failure.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use renergy::eisenstein::EisensteinConfig;
use renergy::energy::{energy_1d, energy_2d};
use renergy::expectations::{
    discrete_sine_expectation_with_error, expectation_limit_1d, expectation_limit_2d, ClusterFunction, ExpectationLimit,
    LimitStatus,
};
use renergy::minimizer::{minimality_scan, Sweep};
use renergy::montecarlo::{run_mc, selberg_mean, selberg_variance, u_beta};
use renergy::pointfile::{parse_points, PointSet};
use renergy::samplers::{McmcConfig, Process as SamplerProcess, SamplerSpec};
use renergy::Error;

use output::{emit, encode, sig12, sig12_opt, Format};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self { code: 4, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Io(_) => 4,
            Error::InvalidConfig(_) | Error::Domain { .. } | Error::DimensionMismatch { .. } => 2,
            _ => 3,
        };
        Self { code, msg: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Process {
    Lattice,
    Poisson,
    Sine,
    Ginibre,
    Gaf,
    Circular,
    DiscreteSine,
}

impl Process {
    fn name(self) -> &'static str {
        match self {
            Process::Lattice => "lattice",
            Process::Poisson => "poisson",
            Process::Sine => "sine",
            Process::Ginibre => "ginibre",
            Process::Gaf => "gaf",
            Process::Circular => "circular",
            Process::DiscreteSine => "discrete-sine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Curve {
    DiscreteSine,
    MinimalitySweep,
    VarianceDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFamily {
    TwoInterval,
    Rectangle,
    Annulus,
}

#[derive(Parser, Debug)]
#[command(name = "renergy", version, about = "Renormalized energy of point configurations")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<u32>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; a manifest is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 𝒲_N of a point file ("N=<window>" header, one "x" or "x y" per line).
    Energy {
        input: PathBuf,
        /// Expected dimension; the file's own dimension is used when omitted.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Large-window limit of E𝒲_N for a named process.
    Expect {
        #[arg(long, value_enum)]
        process: Process,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        /// Dimension of the Poisson process.
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Monte Carlo mean and variance of 𝒲_N.
    Mc {
        #[arg(long, value_enum)]
        process: Process,
        /// Particles (circular), window (lattice, poisson), matrix size (ginibre) or degree (gaf).
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 1000)]
        replicas: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Curve tables for figures.
    Curve {
        #[arg(value_enum)]
        name: Curve,
        /// Number of grid points (defaults: 33, 6, 6).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, value_enum, default_value = "two-interval")]
        family: SweepFamily,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Energy { input, dim } => cmd_energy(input, *dim, cli.format, out),
        Command::Expect { process, beta, rho, dim } => cmd_expect(*process, *beta, *rho, *dim, cli.format, out),
        Command::Mc {
            process,
            n,
            beta,
            replicas,
            seed,
            dim,
        } => cmd_mc(*process, *n, *beta, *replicas, *seed, *dim, cli.format, out),
        Command::Curve { name, grid, beta, family } => cmd_curve(*name, *grid, *beta, *family, cli.format, out),
    }
}

#[derive(Serialize)]
struct EnergyRow {
    dimension: usize,
    window: f64,
    point_count: usize,
    pair_count: usize,
    value: f64,
    min_gap: Option<f64>,
}

fn cmd_energy(input: &Path, dim: Option<usize>, format: Format, out: Option<&Path>) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(format!("{}: {e}", input.display())))?;
    let set = parse_points(&text)?;
    let (dimension, window, report) = match &set {
        PointSet::Line(c) => (1, c.window, energy_1d(c)?),
        PointSet::Plane(c) => (2, c.window, energy_2d(c, &EisensteinConfig::default())?),
    };
    if let Some(d) = dim {
        if d != dimension {
            return Err(Error::DimensionMismatch { expected: d, found: dimension }.into());
        }
    }
    let row = EnergyRow {
        dimension,
        window,
        point_count: report.point_count,
        pair_count: report.pair_count,
        value: sig12(report.value),
        min_gap: report.min_gap.is_finite().then(|| sig12(report.min_gap)),
    };
    let p = params(&[("input", input.display().to_string()), ("dimension", dimension.to_string())]);
    emit(&encode(&[row], format)?, out, "energy", p, 0)?;
    Ok(0)
}

#[derive(Serialize)]
struct ExpectRow {
    process: &'static str,
    beta: Option<f64>,
    rho: Option<f64>,
    status: &'static str,
    limit: Option<f64>,
    mass: Option<f64>,
    mass_error: Option<f64>,
    quadrature_error: Option<f64>,
}

fn sine_beta(beta: Option<f64>) -> Result<u32, CliError> {
    match beta {
        Some(b) if b == 1.0 || b == 2.0 || b == 4.0 => Ok(b as u32),
        Some(b) => Err(CliError::usage(format!("sine process needs --beta 1, 2 or 4, got {b}"))),
        None => Err(CliError::usage("sine process needs --beta")),
    }
}

fn cmd_expect(
    process: Process,
    beta: Option<f64>,
    rho: Option<f64>,
    dim: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let from_limit = |l: ExpectationLimit| {
        let (status, limit) = match l.status {
            LimitStatus::Finite(v) => ("finite", Some(sig12(v))),
            LimitStatus::Divergent => ("divergent", None),
        };
        (status, limit, Some(sig12(l.mass)), Some(sig12(l.mass_error)), Some(sig12(l.quadrature_error)))
    };
    let (status, limit, mass, mass_error, quadrature_error) = match process {
        Process::Sine => from_limit(expectation_limit_1d(&ClusterFunction::sine_beta(sine_beta(beta)?)?)?),
        Process::Ginibre => from_limit(expectation_limit_2d(&ClusterFunction::ginibre())?),
        Process::Gaf => from_limit(expectation_limit_2d(&ClusterFunction::gaf())?),
        Process::Poisson => {
            let cf = ClusterFunction::poisson(dim)?;
            from_limit(if dim == 1 { expectation_limit_1d(&cf)? } else { expectation_limit_2d(&cf)? })
        }
        Process::DiscreteSine => {
            let r = rho.ok_or_else(|| CliError::usage("discrete-sine needs --rho"))?;
            let e = discrete_sine_expectation_with_error(r)?;
            ("finite", Some(sig12(e.value)), None, None, Some(sig12(e.error)))
        }
        Process::Circular => {
            let b = beta.ok_or_else(|| CliError::usage("circular needs --beta"))?;
            ("finite", Some(sig12(u_beta(b)?)), None, None, Some(0.0))
        }
        Process::Lattice => ("finite", Some(0.0), None, None, Some(0.0)),
    };
    let row = ExpectRow {
        process: process.name(),
        beta,
        rho,
        status,
        limit,
        mass,
        mass_error,
        quadrature_error,
    };
    let mut p = params(&[("process", process.name().to_string())]);
    if let Some(b) = beta {
        p.insert("beta".into(), b.to_string());
    }
    if let Some(r) = rho {
        p.insert("rho".into(), r.to_string());
    }
    if process == Process::Poisson {
        p.insert("dim".into(), dim.to_string());
    }
    emit(&encode(&[row], format)?, out, "expect", p, 0)?;
    Ok(if status == "divergent" { 1 } else { 0 })
}

#[derive(Serialize)]
struct McRow {
    process: &'static str,
    beta: Option<f64>,
    n: u32,
    replicas: usize,
    effective_samples: f64,
    mean: f64,
    std_error: f64,
    variance: f64,
    selberg_mean: Option<f64>,
    selberg_variance: Option<f64>,
    seed: u64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    process: Process,
    n: u32,
    beta: f64,
    replicas: u32,
    seed: u64,
    dim: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    if replicas < 100 {
        return Err(CliError::usage(format!("--replicas must be >= 100, got {replicas}")));
    }
    let (sp, window) = match process {
        Process::Lattice => (SamplerProcess::Lattice, n as f64),
        Process::Poisson => (SamplerProcess::Poisson { dimension: dim }, n as f64),
        Process::Circular => (SamplerProcess::CircularBeta { beta }, n as f64),
        Process::Ginibre => (SamplerProcess::Ginibre { matrix_dim: n as usize }, 1.0),
        Process::Gaf => (SamplerProcess::GafZeros { degree: n as usize }, 1.0),
        Process::Sine | Process::DiscreteSine => {
            return Err(CliError::usage(format!("no sampler for process {}", process.name())))
        }
    };
    let spec = SamplerSpec { process: sp, window, seed };
    let r = run_mc(&spec, &McmcConfig::default(), replicas as usize, seed)?;
    let circular = process == Process::Circular;
    let (sm, sv) = if circular {
        (Some(selberg_mean(n as usize, beta)?), Some(selberg_variance(n as usize, beta)?))
    } else {
        (None, None)
    };
    let row = McRow {
        process: process.name(),
        beta: circular.then_some(beta),
        n,
        replicas: r.replicas,
        effective_samples: sig12(r.effective_samples),
        mean: sig12(r.mean),
        std_error: sig12(r.std_error),
        variance: sig12(r.variance),
        selberg_mean: sig12_opt(sm),
        selberg_variance: sig12_opt(sv),
        seed,
    };
    let mut p = params(&[
        ("process", process.name().to_string()),
        ("n", n.to_string()),
        ("replicas", replicas.to_string()),
    ]);
    if circular {
        p.insert("beta".into(), beta.to_string());
    }
    if process == Process::Poisson {
        p.insert("dim".into(), dim.to_string());
    }
    emit(&encode(&[row], format)?, out, "mc", p, seed)?;
    if !r.converged {
        eprintln!(
            "warning: chain diagnostics failed (acceptance {:.3}, effective samples {:.0})",
            r.acceptance, r.effective_samples
        );
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct CurveRow {
    parameter: f64,
    value: f64,
}

#[derive(Serialize)]
struct SweepOut {
    family: &'static str,
    parameter: f64,
    #[serde(rename = "F_value")]
    f_value: f64,
    error_bound: f64,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

fn cmd_curve(
    name: Curve,
    grid: Option<usize>,
    beta: f64,
    family: SweepFamily,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let grid = grid.unwrap_or(match name {
        Curve::DiscreteSine => 33,
        _ => 6,
    });
    if grid < 2 {
        return Err(CliError::usage(format!("--grid must be >= 2, got {grid}")));
    }
    let mut p = params(&[("grid", grid.to_string())]);
    let (label, bytes) = match name {
        Curve::DiscreteSine => {
            // ρ = 0 is excluded; the left end is taken at ρ = 10⁻³.
            let mut rows = Vec::with_capacity(grid);
            for i in 0..grid {
                let rho = if i == 0 { 1e-3 } else { i as f64 / (grid - 1) as f64 };
                rows.push(CurveRow {
                    parameter: rho,
                    value: sig12(discrete_sine_expectation_with_error(rho)?.value),
                });
            }
            ("discrete-sine", encode(&rows, format)?)
        }
        Curve::VarianceDecay => {
            p.insert("beta".into(), beta.to_string());
            let mut rows = Vec::with_capacity(grid);
            for i in 0..grid {
                let n = 8usize << i;
                rows.push(CurveRow {
                    parameter: n as f64,
                    value: sig12(selberg_variance(n, beta)?),
                });
            }
            ("variance-decay", encode(&rows, format)?)
        }
        Curve::MinimalitySweep => {
            let sweep = match family {
                SweepFamily::TwoInterval => Sweep::TwoIntervalGap(linspace(0.0, 1.0, grid)),
                SweepFamily::Rectangle => Sweep::RectangleAspect(linspace(1.0, 3.0, grid)),
                SweepFamily::Annulus => Sweep::AnnulusInnerRadius(linspace(0.0, 0.5, grid)),
            };
            p.insert("family".into(), format!("{family:?}"));
            let rows: Vec<SweepOut> = minimality_scan(&sweep)?
                .into_iter()
                .map(|r| SweepOut {
                    family: r.family,
                    parameter: sig12(r.parameter),
                    f_value: sig12(r.f_value),
                    error_bound: sig12(r.error_bound),
                })
                .collect();
            ("minimality-sweep", encode(&rows, format)?)
        }
    };
    p.insert("curve".into(), label.to_string());
    emit(&bytes, out, "curve", p, 0)?;
    Ok(0)
}
