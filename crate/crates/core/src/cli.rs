//! Command-line surface.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input,
//! 3 numerical failure.

use std::ffi::OsString;
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::closure::{enumerate_targets, solve_level, ClosureTarget};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::format::{parse_curve, to_json, write_curve, write_sweep_csv, SweepRow};
use crate::params::{Family, ModelParams};
use crate::polyq::QAnalysis;
use crate::quad::{closure_integral, period};
use crate::trace::{assemble_closed, trace_level};
use crate::verify::verify_trace;

#[derive(Debug, Parser)]
#[command(name = "biconserve", version, about = "Closed p-elastic profile curves of biconservative hypersurfaces in spheres")]
pub struct Cli {
    /// Sectional curvature of the ambient sphere [default: 1.0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rho: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Dimension {
    /// Dimension of the ambient sphere
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List admissible closure targets (l, r)
    Enumerate {
        /// Largest lobe count
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_r: u32,
    },
    /// Tabulate the closure integral over a range of levels as CSV
    Sweep {
        #[command(flatten)]
        dim: Dimension,
        #[arg(long)]
        d_min: f64,
        #[arg(long)]
        d_max: f64,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
        /// Space the levels geometrically
        #[arg(long)]
        log: bool,
    },
    /// Solve I(d) = 2πl/r for the level d
    Solve {
        #[command(flatten)]
        dim: Dimension,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        r: u32,
    },
    /// Trace a closed curve (--l/--r) or the curve at a level (--d) as Curve JSON
    Trace {
        #[command(flatten)]
        dim: Dimension,
        #[arg(long, requires = "r", conflicts_with = "d")]
        l: Option<u32>,
        #[arg(long, requires = "l")]
        r: Option<u32>,
        #[arg(long, required_unless_present = "l")]
        d: Option<f64>,
        /// Curvature periods to trace with --d
        #[arg(long, default_value_t = 1, conflicts_with = "l", value_parser = clap::value_parser!(u32).range(1..))]
        periods: u32,
        /// Number of uniform arc-length samples
        #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(16..))]
        points: u64,
        /// Output file [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a Curve JSON file and write a report
    Verify {
        /// Curve JSON to check
        #[arg(long = "in")]
        input: PathBuf,
        /// Expected dimension
        #[arg(long)]
        n: Option<u32>,
        /// Report file [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, config: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn tolerances(config: Option<&Path>) -> Result<Tolerances> {
    match config {
        Some(path) => Tolerances::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Config {
                line: 0,
                message: format!("cannot read {}: {io}", path.display()),
            },
            other => other,
        }),
        None => Ok(Tolerances::default()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sphere_family(n: u32, rho: f64) -> Result<Family> {
    let family = Family::new(n, rho)?;
    family.critical_level()?;
    Ok(family)
}

fn execute(cli: &Cli, config: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let tol = tolerances(config)?;
    let rho = cli.rho.unwrap_or(1.0);
    match &cli.command {
        Command::Enumerate { max_r } => {
            writeln!(stdout, "l r angle")?;
            for t in enumerate_targets(*max_r) {
                writeln!(stdout, "{} {} {:.16e}", t.l(), t.r(), t.angle())?;
            }
        }
        Command::Sweep {
            dim,
            d_min,
            d_max,
            steps,
            log,
        } => {
            let family = sphere_family(dim.n, rho)?;
            let d_star = family.critical_level()?;
            if !(*d_min > d_star && d_min.is_finite()) {
                return Err(Error::Domain(format!(
                    "--d-min {d_min} must exceed the critical level d_* = {d_star:.16e}"
                )));
            }
            if !(*d_max >= *d_min && d_max.is_finite()) {
                return Err(Error::Domain(format!("--d-max {d_max} must be at least --d-min {d_min}")));
            }
            let count = *steps as usize;
            let levels: Vec<f64> = (0..count)
                .map(|i| {
                    if count == 1 {
                        return *d_min;
                    }
                    let t = i as f64 / (count - 1) as f64;
                    if *log {
                        d_min * (d_max / d_min).powf(t)
                    } else {
                        d_min + (d_max - d_min) * t
                    }
                })
                .collect();
            let rows = levels
                .par_iter()
                .map(|&d| {
                    let analysis = QAnalysis::new(family.at_level(d)?)?;
                    let limit_regime = analysis.is_degenerate();
                    Ok(SweepRow {
                        d,
                        closure_integral: closure_integral(&analysis, &tol.quad)?,
                        period: period(&analysis, &tol.quad)?,
                        alpha: analysis.alpha,
                        beta: analysis.beta,
                        limit_regime,
                        limit_value: limit_regime.then_some(SQRT_2 * PI),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_sweep_csv(stdout, &rows)?;
        }
        Command::Solve { dim, l, r } => {
            let target = ClosureTarget::new(*l, *r)?;
            let family = sphere_family(dim.n, rho)?;
            let sol = solve_level(target, &family, &tol)?;
            writeln!(stdout, "n = {}", dim.n)?;
            writeln!(stdout, "rho = {rho}")?;
            writeln!(stdout, "l = {l}")?;
            writeln!(stdout, "r = {r}")?;
            writeln!(stdout, "d_star = {:.16e}", family.critical_level()?)?;
            writeln!(stdout, "d = {:.16e}", sol.d_solved)?;
            writeln!(stdout, "closure_integral = {:.16e}", sol.i_value)?;
            writeln!(stdout, "angle = {:.16e}", target.angle())?;
            writeln!(stdout, "period = {:.16e}", sol.period)?;
        }
        Command::Trace {
            dim,
            l,
            r,
            d,
            periods,
            points,
            out,
        } => {
            let points = *points as usize;
            let family = sphere_family(dim.n, rho)?;
            let trace = match (l, r, d) {
                (Some(l), Some(r), None) => {
                    let sol = solve_level(ClosureTarget::new(*l, *r)?, &family, &tol)?;
                    assemble_closed(&sol, points, &tol)?
                }
                (None, None, Some(d)) => trace_level(ModelParams::new(dim.n, rho, *d)?, *periods, points, &tol)?,
                _ => return Err(Error::Domain("give either --l and --r, or --d".into())),
            };
            emit(out, &write_curve(&trace)?, stdout)?;
            writeln!(
                stderr,
                "traced {} samples at d = {:.16e}, closure gap {:.3e}",
                trace.samples.len(),
                trace.params.d(),
                trace.closure_gap
            )?;
        }
        Command::Verify { input, n, out } => {
            let bytes = std::fs::read(input).map_err(|e| Error::Schema(format!("cannot read {}: {e}", input.display())))?;
            let trace = parse_curve(&bytes)?;
            if let Some(n) = n {
                if *n != trace.params.n() {
                    return Err(Error::Schema(format!(
                        "--n {n} does not match meta.n = {} of {}",
                        trace.params.n(),
                        input.display()
                    )));
                }
            }
            if let Some(rho) = cli.rho {
                if rho != trace.params.rho() {
                    return Err(Error::Schema(format!(
                        "--rho {rho} does not match meta.rho = {}",
                        trace.params.rho()
                    )));
                }
            }
            let report = verify_trace(&trace, &tol)?;
            emit(out, &to_json(&report)?, stdout)?;
            for (name, ok) in &report.passed {
                if !ok {
                    writeln!(stderr, "check failed: {name}")?;
                }
            }
            return Ok(if report.all_passed { 0 } else { 1 });
        }
    }
    Ok(0)
}
