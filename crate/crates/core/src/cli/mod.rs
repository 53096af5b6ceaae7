//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 non-dominance failure,
//! 3 degenerate parameters, 4 integration failure.

mod portrait;
mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::basins::{estimate_basins, DEFAULT_MATCH_TOL};
use crate::classify::classify_global;
use crate::dynamics::{integrate, IntegratorConfig};
use crate::error::{Error, Result};
use crate::model::{
    dominance_relations, nash_vertices, validate, NashVertex, Params, SimplexState, Strategy,
    ValidatedParams, ValidationReport, DEFAULT_TOL,
};

pub use sweep::{parse_axis, run_sweep, SweepAxis, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NONDOMINANCE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_INTEGRATION: i32 = 4;

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) => EXIT_NONDOMINANCE,
        Error::Degenerate(_) => EXIT_DEGENERATE,
        Error::StepFailure { .. } | Error::LvStepFailure(_) => EXIT_INTEGRATION,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "socdyn", version, about = "Regimes, trajectories and basins of the O/H/P/N replicator game")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// key=value parameter file with alpha, beta, gamma, delta, epsilon, eta.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Override one parameter; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VAL")]
    pub set: Vec<String>,
    /// Tolerance for strict inequalities.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweep and basins; defaults to all cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rk45,
    Rk4,
}

#[derive(Debug, Args)]
pub struct IntegratorArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Rk45)]
    pub method: MethodArg,
    /// Fixed step for rk4.
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    #[arg(long, default_value_t = 1e4)]
    pub max_time: f64,
}

impl IntegratorArgs {
    fn config(&self) -> IntegratorConfig {
        let base = match self.method {
            MethodArg::Rk45 => IntegratorConfig::default(),
            MethodArg::Rk4 => IntegratorConfig::rk4(self.step),
        };
        base.with_max_time(self.max_time)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate parameters and list Nash vertices and dominance relations.
    Check,
    /// Classify every face and the global attractor set.
    Equilibria,
    /// Integrate one trajectory and name the attractor it reaches.
    Simulate {
        /// Start state as four comma-separated shares.
        #[arg(long, value_name = "X1,X2,X3,X4")]
        x0: String,
        #[command(flatten)]
        integrator: IntegratorArgs,
    },
    /// Classify a grid over one or two parameters.
    Sweep {
        /// NAME=MIN:MAX:STEPS; give once or twice.
        #[arg(long = "axis", required = true, value_name = "NAME=MIN:MAX:STEPS")]
        axes: Vec<String>,
    },
    /// Estimate basin volumes from uniform random starts.
    Basins {
        #[arg(short = 'n', long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_MATCH_TOL)]
        match_tol: f64,
        #[command(flatten)]
        integrator: IntegratorArgs,
    },
    /// Draw the four faces as a planar net with stationary states and
    /// sample trajectories.
    Portrait {
        /// Lattice trajectories per face.
        #[arg(long, default_value_t = 6)]
        trajectories: usize,
        #[arg(long, default_value_t = 200.0)]
        max_time: f64,
    },
}

/// Reads a `key=value` parameter file. Blank lines and `#` comments are
/// ignored.
pub fn parse_params_text(text: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_assignment(line).map_err(|e| match e {
            Error::UnknownParameter(_) => e,
            e => Error::InvalidConfig(format!("line {}: {e}", n + 1)),
        })?);
    }
    Ok(out)
}

fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidConfig(format!("expected KEY=VALUE, got `{s}`")))?;
    let k = k.trim();
    if !Params::NAMES.contains(&k) {
        return Err(Error::UnknownParameter(k.to_string()));
    }
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("`{}` is not a number", v.trim())))?;
    Ok((k.to_string(), v))
}

/// File values first, then `--set` overrides; all six names must end up set.
pub fn load_params(file: Option<&Path>, overrides: &[String]) -> Result<Params> {
    let mut values: Vec<(String, f64)> = Vec::new();
    if let Some(path) = file {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        values.extend(parse_params_text(&text)?);
    }
    for o in overrides {
        values.push(parse_assignment(o)?);
    }
    let mut p = Params::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    for (k, v) in &values {
        p.set(k, *v)?;
    }
    let missing: Vec<&str> = Params::NAMES
        .iter()
        .copied()
        .filter(|n| p.get(n).map(f64::is_nan).unwrap_or(true))
        .collect();
    if !missing.is_empty() {
        return Err(Error::InvalidConfig(format!("missing parameters: {}", missing.join(", "))));
    }
    Ok(p)
}

fn parse_state(s: &str) -> Result<SimplexState> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidState(format!("cannot parse `{s}`")))?;
    let x: [f64; 4] = parts
        .try_into()
        .map_err(|_| Error::InvalidState(format!("expected four shares, got `{s}`")))?;
    SimplexState::new(x)
}

struct Ctx<'a> {
    common: &'a CommonArgs,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn params(&self) -> Result<Params> {
        load_params(self.common.params.as_deref(), &self.common.set)
    }

    fn validated(&self) -> Result<ValidatedParams> {
        ValidatedParams::new(self.params()?, self.common.tol)
    }

    fn out_dir(&self) -> Result<Option<PathBuf>> {
        match &self.common.out {
            Some(d) => {
                fs::create_dir_all(d).map_err(|e| {
                    Error::Io(format!("cannot create {}: {e}", d.display()))
                })?;
                Ok(Some(d.clone()))
            }
            None => Ok(None),
        }
    }

    /// Output directory, defaulting to the working directory.
    fn out_dir_or_cwd(&self) -> Result<PathBuf> {
        Ok(self.out_dir()?.unwrap_or_else(|| PathBuf::from(".")))
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.common.jobs {
            if j == 0 {
                return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
    }

    fn line(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", s.as_ref()).map_err(io_err)
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(format!("write failed: {e}"))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct CheckDocument {
    params: Params,
    validation: ValidationReport,
    nash_vertices: Option<Vec<NashVertex>>,
    dominance: Vec<[Strategy; 2]>,
}

#[derive(Serialize)]
struct DegenerateDocument {
    params: Params,
    validation: ValidationReport,
    degenerate: bool,
}

fn cmd_check(ctx: &mut Ctx) -> Result<i32> {
    let p = ctx.params()?;
    let tol = ctx.common.tol;
    let validation = validate(&p, tol);
    let doc = CheckDocument {
        params: p,
        nash_vertices: nash_vertices(&p, tol).ok(),
        dominance: dominance_relations(&p).into_iter().map(|(a, b)| [a, b]).collect(),
        validation: validation.clone(),
    };
    let json = serde_json::to_string_pretty(&doc).expect("serializable");
    ctx.line(&json)?;
    Ok(if !validation.degenerate_quantities.is_empty() {
        EXIT_DEGENERATE
    } else if !validation.is_valid() {
        EXIT_NONDOMINANCE
    } else {
        EXIT_OK
    })
}

fn cmd_equilibria(ctx: &mut Ctx) -> Result<i32> {
    let p = ctx.params()?;
    let vp = match ValidatedParams::new(p, ctx.common.tol) {
        Ok(vp) => vp,
        Err(Error::Degenerate(_)) => {
            let doc = DegenerateDocument {
                params: p,
                validation: validate(&p, ctx.common.tol),
                degenerate: true,
            };
            ctx.line(serde_json::to_string_pretty(&doc).expect("serializable"))?;
            return Ok(EXIT_DEGENERATE);
        }
        Err(e) => return Err(e),
    };
    let report = classify_global(&vp)?;
    let json = report.to_json();
    if let Some(dir) = ctx.out_dir()? {
        write_file(&dir.join("regimes.json"), json.as_bytes())?;
    }
    ctx.line(&json)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(ctx: &mut Ctx, x0: &str, integrator: &IntegratorArgs) -> Result<i32> {
    let vp = ctx.validated()?;
    let x0 = parse_state(x0)?;
    let cfg = integrator.config();
    let attractors = classify_global(&vp)?.global.attractors;
    let dir = ctx.out_dir_or_cwd()?;
    let path = dir.join("trajectory.csv");

    let traj = match integrate(&x0, vp.params(), &cfg) {
        Ok(t) => t,
        Err(Error::StepFailure { t, trajectory }) => {
            let mut buf = Vec::new();
            trajectory.write_csv(&mut buf).map_err(io_err)?;
            write_file(&path, &buf)?;
            return Err(Error::StepFailure { t, trajectory });
        }
        Err(e) => return Err(e),
    };
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).map_err(io_err)?;
    write_file(&path, &buf)?;

    let end = *traj.final_state();
    let hit = attractors
        .iter()
        .map(|a| (a, a.location.max_norm_distance(&end)))
        .filter(|(_, d)| *d <= DEFAULT_MATCH_TOL)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(a, _)| a.label.clone());

    ctx.line(format!("trajectory: {}", path.display()))?;
    ctx.line(format!("samples: {}", traj.times.len()))?;
    ctx.line(format!("final time: {}", traj.final_time()))?;
    let x = end.as_array();
    ctx.line(format!("final state: {},{},{},{}", x[0], x[1], x[2], x[3]))?;
    ctx.line(format!("verdict: {:?}", traj.verdict).to_lowercase())?;
    ctx.line(format!("attractor: {}", hit.as_deref().unwrap_or("unresolved")))?;
    Ok(EXIT_OK)
}

fn cmd_sweep(ctx: &mut Ctx, axes: &[String]) -> Result<i32> {
    let base = ctx.params()?;
    let axes = axes
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<Vec<_>>>()?;
    if axes.len() > 2 {
        return Err(Error::InvalidConfig("at most two sweep axes".into()));
    }
    let tol = ctx.common.tol;
    let rows = ctx.pool()?.install(|| run_sweep(&base, &axes, tol))?;
    let mut buf = Vec::new();
    sweep::write_csv(&axes, &rows, &mut buf).map_err(io_err)?;
    if let Some(dir) = ctx.out_dir()? {
        write_file(&dir.join("sweep.csv"), &buf)?;
    }
    ctx.out.write_all(&buf).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_basins(ctx: &mut Ctx, samples: usize, match_tol: f64, integrator: &IntegratorArgs) -> Result<i32> {
    let vp = ctx.validated()?;
    let cfg = integrator.config();
    let seed = ctx.common.seed;
    let report = ctx
        .pool()?
        .install(|| estimate_basins(&vp, samples, seed, &cfg, match_tol))?;
    let json = report.to_json();
    if let Some(dir) = ctx.out_dir()? {
        write_file(&dir.join("basins.json"), json.as_bytes())?;
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(io_err)?;
        write_file(&dir.join("basins.csv"), &buf)?;
    }
    ctx.line(&json)?;
    Ok(EXIT_OK)
}

fn cmd_portrait(ctx: &mut Ctx, trajectories: usize, max_time: f64) -> Result<i32> {
    let vp = ctx.validated()?;
    let net = portrait::render(&vp, trajectories, max_time)?;
    let dir = ctx.out_dir_or_cwd()?;
    let svg = dir.join("portrait.svg");
    let csv = dir.join("portrait_trajectories.csv");
    write_file(&svg, net.svg.as_bytes())?;
    write_file(&csv, &net.csv)?;
    ctx.line(format!("drawing: {}", svg.display()))?;
    ctx.line(format!("trajectories: {}", csv.display()))?;
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let mut ctx = Ctx {
        common: &cli.common,
        out,
    };
    if !(ctx.common.tol >= 0.0) {
        return Err(Error::InvalidConfig("--tol must be nonnegative".into()));
    }
    match &cli.command {
        Command::Check => cmd_check(&mut ctx),
        Command::Equilibria => cmd_equilibria(&mut ctx),
        Command::Simulate { x0, integrator } => cmd_simulate(&mut ctx, x0, integrator),
        Command::Sweep { axes } => cmd_sweep(&mut ctx, axes),
        Command::Basins {
            samples,
            match_tol,
            integrator,
        } => cmd_basins(&mut ctx, *samples, *match_tol, integrator),
        Command::Portrait {
            trajectories,
            max_time,
        } => cmd_portrait(&mut ctx, *trajectories, *max_time),
    }
}

/// Parses `args` (program name first) and runs the subcommand, writing
/// results to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
