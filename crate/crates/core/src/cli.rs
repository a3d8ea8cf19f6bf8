//! Command line front end.
//!
//! Exit codes: `0` success, `1` failed check or internal error, `2` invalid
//! input, `3` no convergence, `4` trajectory escape.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::actions::{admissible_k, degree_of_k_map, make_action, ActionDescriptor, Space};
use crate::classify::{classify_range, examples_table, render_text, HarmonicityVerdict};
use crate::error::{Error, Result};
use crate::identities::{check_suite, SuiteReport, DEFAULT_SEED};
use crate::io::{
    read_metadata_file, read_profile_file, write_json, write_json_file, write_profile, write_profile_file,
    RunManifest, SolveMetadata, MANIFEST_FILE, METADATA_FILE, PROFILE_FILE,
};
use crate::ode::{residual_norm, BvpSpec};
use crate::solver::{brackets, solve, solve_all, sweep, ShootingConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_ESCAPE: i32 = 4;

#[derive(Debug, Parser, Serialize)]
#[command(name = "cohom1", version, about = "Equivariant harmonic self-maps of cohomogeneity one spheres and orthogonal groups")]
pub struct Cli {
    /// Worker threads for sweeps (default: available processors).
    #[arg(long, global = true, env = "COHOM1_THREADS")]
    pub threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceArg {
    Sphere,
    So,
    Sp2,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Sphere => Space::Sphere,
            SpaceArg::So => Space::OrthogonalGroup,
            SpaceArg::Sp2 => Space::Sp2Lift,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Harmonicity verdicts for a classified action over a range of j.
    Classify(ClassifyArgs),
    /// Solve one boundary value problem and write profile.csv, solve.json
    /// and manifest.json.
    Solve(SolveArgs),
    /// Scan initial slopes and report sign changes of the terminal mismatch.
    Sweep(SweepArgs),
    /// Tension residual of a stored profile.
    Residual(ResidualArgs),
    /// Random check of the trigonometric identity suite.
    IdentityCheck(IdentityArgs),
    /// Degree of the k-map with k = jg + 1.
    Degree(DegreeArgs),
    /// Table of the known harmonic non-identity self-maps of SO(n) and Sp(2).
    Table,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ActionArgs {
    #[arg(long, value_enum)]
    pub space: SpaceArg,
    #[arg(long)]
    pub g: u32,
    #[arg(long)]
    pub m0: u32,
    #[arg(long)]
    pub m1: u32,
}

impl ActionArgs {
    fn action(&self, strict: bool) -> Result<ActionDescriptor> {
        make_action(self.space.into(), self.g, self.m0, self.m1, strict)
    }

    fn spec(&self, k: i64) -> Result<BvpSpec> {
        let action = self.action(false)?;
        BvpSpec::new(action.bvp_curvatures(), self.m0, self.m1, k)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub action: ActionArgs,
    #[arg(long, default_value_t = -4, allow_negative_numbers = true)]
    pub jmin: i64,
    #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
    pub jmax: i64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-5)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub eps1: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Matching abscissa (default π/(2G)).
    #[arg(long)]
    pub match_point: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub max_newton: usize,
    #[arg(long, default_value_t = 1e6)]
    pub blowup_cap: f64,
    #[arg(long, default_value_t = 257)]
    pub output_points: usize,
    #[arg(long, default_value_t = 65_537)]
    pub max_output_points: usize,
}

impl SolverArgs {
    fn config(&self, threads: Option<usize>) -> ShootingConfig {
        ShootingConfig {
            eps0: self.eps0,
            eps1: self.eps1,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            match_point: self.match_point,
            max_newton: self.max_newton,
            blowup_cap: self.blowup_cap,
            output_points: self.output_points,
            max_output_points: self.max_output_points,
            threads,
            ..ShootingConfig::default()
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub action: ActionArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
    /// Initial slopes `a,b` (default `k,k`).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub init: Option<(f64, f64)>,
    /// Directory receiving profile.csv, solve.json and manifest.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub action: ActionArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
    /// Lower end of the slope range (default −4|k|−4).
    #[arg(long, allow_negative_numbers = true)]
    pub amin: Option<f64>,
    /// Upper end of the slope range (default 4|k|+4).
    #[arg(long, allow_negative_numbers = true)]
    pub amax: Option<f64>,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    /// Refine every bracket into a solution where possible.
    #[arg(long)]
    pub refine: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ResidualArgs {
    /// Profile CSV with header `t,r,rdot`.
    #[arg(long)]
    pub profile: PathBuf,
    /// solve.json supplying the problem; otherwise give the action and k.
    #[arg(long, conflicts_with_all = ["space", "g", "m0", "m1", "k"])]
    pub meta: Option<PathBuf>,
    #[arg(long, value_enum, requires_all = ["g", "m0", "m1", "k"])]
    pub space: Option<SpaceArg>,
    #[arg(long)]
    pub g: Option<u32>,
    #[arg(long)]
    pub m0: Option<u32>,
    #[arg(long)]
    pub m1: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 12)]
    pub g_max: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Minimum distance of every `t − iπ/g` from the poles.
    #[arg(long, default_value_t = 1e-3)]
    pub margin: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DegreeArgs {
    #[command(flatten)]
    pub action: ActionArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub j: i64,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::ResidualTooLarge { .. } => EXIT_NO_CONVERGENCE,
        Error::TrajectoryEscaped { .. } | Error::IntegratorStall { .. } => EXIT_ESCAPE,
        Error::InconsistentVerdict(_) => EXIT_FAILED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command line, returning the exit code on success paths
/// that still signal a failure (non-converged solves, failed checks).
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Classify(args) => cmd_classify(cli, args),
        Command::Solve(args) => cmd_solve(cli, args),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::Residual(args) => cmd_residual(cli, args),
        Command::IdentityCheck(args) => cmd_identity_check(cli, args),
        Command::Degree(args) => cmd_degree(cli, args),
        Command::Table => cmd_table(cli),
    }
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify(_) => "classify",
        Command::Solve(_) => "solve",
        Command::Sweep(_) => "sweep",
        Command::Residual(_) => "residual",
        Command::IdentityCheck(_) => "identity-check",
        Command::Degree(_) => "degree",
        Command::Table => "table",
    }
}

/// Writes `body` to `--out` (plus a manifest next to it) or to stdout.
fn emit(cli: &Cli, body: &str) -> Result<()> {
    match &cli.out {
        Some(path) => {
            fs::write(path, body)?;
            let manifest_path = sibling_manifest(path);
            let manifest = RunManifest::new(
                subcommand_name(&cli.command),
                serde_json::to_value(cli)?,
                vec![path.display().to_string()],
            );
            write_json_file(&manifest_path, &manifest)
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn sibling_manifest(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(OsString::from).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// JSON number, or a string for non-finite values.
fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn verdict_csv(rows: &[HarmonicityVerdict]) -> String {
    let mut out = String::from("ambient,space,g,m0,m1,j,k,linear,tangential,harmonic,degree,reason\n");
    for v in rows {
        let _ = writeln!(
            out,
            "{},{:?},{},{},{},{},{},{},{:?},{},{},\"{}\"",
            v.action.ambient_label(),
            v.action.space,
            v.action.g,
            v.action.m0,
            v.action.m1,
            v.j,
            v.k,
            v.is_linear_solution,
            v.tangential,
            v.harmonic,
            v.degree,
            v.reason
        );
    }
    out
}

fn render_verdicts(format: Format, rows: &[HarmonicityVerdict]) -> Result<String> {
    Ok(match format {
        Format::Json => json_text(&rows)?,
        Format::Csv => verdict_csv(rows),
        Format::Text => render_text(rows),
    })
}

fn cmd_classify(cli: &Cli, args: &ClassifyArgs) -> Result<i32> {
    let action = args.action.action(true)?;
    if args.jmin > args.jmax {
        return Err(Error::Parse(format!("empty j range {}..={}", args.jmin, args.jmax)));
    }
    let rows = classify_range(&action, args.jmin, args.jmax)?;
    emit(cli, &render_verdicts(cli.format, &rows)?)?;
    Ok(EXIT_OK)
}

fn cmd_table(cli: &Cli) -> Result<i32> {
    emit(cli, &render_verdicts(cli.format, &examples_table())?)?;
    Ok(EXIT_OK)
}

fn cmd_degree(cli: &Cli, args: &DegreeArgs) -> Result<i32> {
    let action = args.action.action(true)?;
    let k = admissible_k(&action, args.j)?;
    let degree = degree_of_k_map(&action, args.j)?;
    let body = match cli.format {
        Format::Json => json_text(&json!({
            "ambient": action.ambient_label(),
            "action": action,
            "j": args.j,
            "k": k,
            "degree": degree,
        }))?,
        Format::Csv => format!("ambient,j,k,degree\n{},{},{k},{degree}\n", action.ambient_label(), args.j),
        Format::Text => format!("{degree}\n"),
    };
    emit(cli, &body)?;
    Ok(EXIT_OK)
}

fn cmd_identity_check(cli: &Cli, args: &IdentityArgs) -> Result<i32> {
    if args.g_max == 0 || args.samples == 0 {
        return Err(Error::Parse("--g-max and --samples must be positive".into()));
    }
    let report = check_suite(args.g_max, args.samples, args.seed, args.margin)?;
    let rows = identity_rows(&report);
    let body = match cli.format {
        Format::Json => json_text(&report)?,
        Format::Csv => {
            let mut out = String::from("identity,max_deviation,passed\n");
            for (name, dev) in &rows {
                let _ = writeln!(out, "{name},{dev:e},{}", *dev <= report.tolerance);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (name, dev) in &rows {
                let mark = if *dev <= report.tolerance { "ok" } else { "FAIL" };
                let _ = writeln!(out, "{name:<20} {dev:.3e}  {mark}");
            }
            out
        }
    };
    emit(cli, &body)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}

fn identity_rows(r: &SuiteReport) -> [(&'static str, f64); 4] {
    [
        ("lemma_sin_sq", r.lemma_sin_sq),
        ("lemma_sin_2r", r.lemma_sin_2r),
        ("cotangent_identity", r.cotangent_identity),
        ("half_sum_split", r.half_sum_split),
    ]
}

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> Result<i32> {
    let spec = args.action.spec(args.k)?;
    let config = args.solver.config(cli.threads);
    config.validate(&spec)?;
    fs::create_dir_all(&args.out_dir)?;

    let outcome = solve(&spec, &config, args.init);
    let mut outputs = Vec::new();
    let (meta, code) = match &outcome {
        Ok(profile) => {
            write_profile_file(&args.out_dir.join(PROFILE_FILE), &profile.samples)?;
            outputs.push(PROFILE_FILE.to_string());
            let mut meta = SolveMetadata::converged(profile, &config, args.init);
            meta.profile = Some(PROFILE_FILE.to_string());
            (meta, EXIT_OK)
        }
        Err(e) => {
            let code = exit_code(e);
            if code == EXIT_INPUT {
                return Err(outcome.unwrap_err());
            }
            (SolveMetadata::failed(&spec, &config, args.init, e), code)
        }
    };
    write_json_file(&args.out_dir.join(METADATA_FILE), &meta)?;
    outputs.push(METADATA_FILE.to_string());
    let manifest = RunManifest::new("solve", serde_json::to_value(cli)?, outputs);
    write_json_file(&args.out_dir.join(MANIFEST_FILE), &manifest)?;

    let body = match (cli.format, &outcome) {
        (Format::Csv, Ok(profile)) => {
            let mut buf = Vec::new();
            write_profile(&mut buf, &profile.samples)?;
            String::from_utf8(buf).expect("profile is ASCII")
        }
        (Format::Text, _) => solve_summary(&meta),
        _ => json_text(&meta)?,
    };
    emit(cli, &body)?;
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    Ok(code)
}

fn solve_summary(meta: &SolveMetadata) -> String {
    let s = &meta.spec;
    let mut out = format!("problem (G={}, M0={}, M1={}, k={}): {:?}\n", s.g, s.m0, s.m1, s.k, meta.status);
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.12}"));
    let _ = writeln!(out, "slopes a={} b={}", opt(meta.slope0), opt(meta.slope1));
    if let Some(res) = meta.residual {
        let _ = writeln!(out, "residual {res:.3e}");
    }
    if let Some(dev) = meta.max_linear_deviation {
        let _ = writeln!(out, "max |r - kt| {dev:.3e}");
    }
    out
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<i32> {
    let spec = args.action.spec(args.k)?;
    let mut config = args.solver.config(cli.threads);
    config.sweep_points = args.points;
    let (lo, hi) = config.bracket_for(&spec);
    config.bracket = Some((args.amin.unwrap_or(lo), args.amax.unwrap_or(hi)));
    config.validate(&spec)?;

    let records = sweep(&spec, &config)?;
    let found = brackets(&records);
    let solutions = if args.refine { solve_all(&spec, &config)? } else { Vec::new() };

    let body = match cli.format {
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|r| json!({"a": r.a, "gap": real(r.gap), "sign_change": r.sign_change, "escaped": r.escaped}))
                .collect();
            let sols: Vec<Value> = solutions
                .iter()
                .map(|p| {
                    json!({
                        "slope0": p.slope0,
                        "slope1": p.slope1,
                        "residual": p.residual,
                        "max_linear_deviation": p.max_linear_deviation(),
                    })
                })
                .collect();
            json_text(&json!({
                "spec": spec,
                "bracket": config.bracket,
                "points": config.sweep_points,
                "brackets": found,
                "records": rows,
                "solutions": sols,
            }))?
        }
        Format::Csv => {
            let mut out = String::from("a,gap,sign_change,escaped\n");
            for r in &records {
                let _ = writeln!(out, "{:.16e},{:.16e},{},{}", r.a, r.gap, r.sign_change, r.escaped);
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "problem (G={}, M0={}, M1={}, k={}): {} sign changes over {} points\n",
                spec.g,
                spec.m0,
                spec.m1,
                spec.k,
                found.len(),
                records.len()
            );
            for (lo, hi) in &found {
                let _ = writeln!(out, "  bracket [{lo:.6}, {hi:.6}]");
            }
            for p in &solutions {
                let _ = writeln!(
                    out,
                    "  solution a={:.10} b={:.10} residual {:.2e}",
                    p.slope0, p.slope1, p.residual
                );
            }
            out
        }
    };
    emit(cli, &body)?;
    Ok(EXIT_OK)
}

fn cmd_residual(cli: &Cli, args: &ResidualArgs) -> Result<i32> {
    let (spec, reported) = match &args.meta {
        Some(path) => {
            let meta = read_metadata_file(path)?;
            (BvpSpec::new(meta.spec.g, meta.spec.m0, meta.spec.m1, meta.spec.k)?, meta.residual)
        }
        None => {
            let missing = || Error::Parse("give --meta or all of --space, --g, --m0, --m1, --k".into());
            let action = ActionArgs {
                space: args.space.ok_or_else(missing)?,
                g: args.g.ok_or_else(missing)?,
                m0: args.m0.ok_or_else(missing)?,
                m1: args.m1.ok_or_else(missing)?,
            };
            (action.spec(args.k.ok_or_else(missing)?)?, None)
        }
    };
    let samples = read_profile_file(&args.profile)?;
    let report = residual_norm(&spec, &samples)?;
    let body = match cli.format {
        Format::Json => json_text(&json!({
            "spec": spec,
            "samples": samples.len(),
            "max_abs": report.max_abs,
            "boundary_err": report.boundary_err,
            "reported_residual": reported,
        }))?,
        Format::Csv => format!(
            "max_abs,boundary_err_left,boundary_err_right\n{:e},{:e},{:e}\n",
            report.max_abs, report.boundary_err.0, report.boundary_err.1
        ),
        Format::Text => format!(
            "residual {:.6e}\nboundary error ({:.3e}, {:.3e})\n",
            report.max_abs, report.boundary_err.0, report.boundary_err.1
        ),
    };
    emit(cli, &body)?;
    Ok(EXIT_OK)
}
