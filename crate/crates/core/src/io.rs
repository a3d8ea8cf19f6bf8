//! Profile CSV files, solver metadata and run manifests.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{BvpSpec, ProfileSample};
use crate::solver::{ShootingConfig, SolutionProfile};

/// Header line of profile files.
pub const PROFILE_HEADER: &str = "t,r,rdot";

/// Writes samples as `t,r,rdot` rows with 17 significant digits.
pub fn write_profile<W: Write>(out: W, samples: &[ProfileSample]) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{PROFILE_HEADER}")?;
    for s in samples {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.r, s.rdot)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_profile_file(path: &Path, samples: &[ProfileSample]) -> Result<()> {
    write_profile(File::create(path)?, samples)
}

/// Reads a profile written by [`write_profile`].
pub fn read_profile<R: Read>(input: R) -> Result<Vec<ProfileSample>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != ["t", "r", "rdot"] {
        return Err(Error::Parse(format!(
            "expected header `{PROFILE_HEADER}`, found `{}`",
            header.join(",")
        )));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn read_profile_file(path: &Path) -> Result<Vec<ProfileSample>> {
    read_profile(File::open(path)?)
}

/// Outcome recorded in [`SolveMetadata::status`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    NoConvergence,
    ResidualTooLarge,
    Escaped,
    Stalled,
}

/// Everything about a solve run except the samples themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveMetadata {
    pub status: SolveStatus,
    pub spec: BvpSpec,
    pub config: ShootingConfig,
    pub init: Option<(f64, f64)>,
    pub slope0: Option<f64>,
    pub slope1: Option<f64>,
    pub match_gap: Option<(f64, f64)>,
    pub residual: Option<f64>,
    pub boundary_err: Option<(f64, f64)>,
    pub iterations: Option<usize>,
    pub max_linear_deviation: Option<f64>,
    pub samples: Option<usize>,
    /// File name of the profile, relative to this file.
    pub profile: Option<String>,
    /// File name of the run manifest, relative to this file.
    pub manifest: String,
    pub error: Option<String>,
}

impl SolveMetadata {
    pub fn converged(profile: &SolutionProfile, config: &ShootingConfig, init: Option<(f64, f64)>) -> Self {
        Self {
            status: SolveStatus::Converged,
            spec: profile.spec,
            config: config.clone(),
            init,
            slope0: Some(profile.slope0),
            slope1: Some(profile.slope1),
            match_gap: Some(profile.match_gap),
            residual: Some(profile.residual),
            boundary_err: Some(profile.boundary_err),
            iterations: Some(profile.iterations),
            max_linear_deviation: Some(profile.max_linear_deviation()),
            samples: Some(profile.samples.len()),
            profile: None,
            manifest: MANIFEST_FILE.to_string(),
            error: None,
        }
    }

    pub fn failed(spec: &BvpSpec, config: &ShootingConfig, init: Option<(f64, f64)>, err: &Error) -> Self {
        let (status, slopes, gap) = match *err {
            Error::NoConvergence { a, b, value_gap, deriv_gap, .. } => {
                (SolveStatus::NoConvergence, Some((a, b)), Some((value_gap, deriv_gap)))
            }
            Error::ResidualTooLarge { a, b, .. } => (SolveStatus::ResidualTooLarge, Some((a, b)), None),
            Error::TrajectoryEscaped { .. } => (SolveStatus::Escaped, None, None),
            _ => (SolveStatus::Stalled, None, None),
        };
        Self {
            status,
            spec: *spec,
            config: config.clone(),
            init,
            slope0: slopes.map(|s| s.0),
            slope1: slopes.map(|s| s.1),
            match_gap: gap,
            residual: None,
            boundary_err: None,
            iterations: None,
            max_linear_deviation: None,
            samples: None,
            profile: None,
            manifest: MANIFEST_FILE.to_string(),
            error: Some(err.to_string()),
        }
    }
}

pub const PROFILE_FILE: &str = "profile.csv";
pub const METADATA_FILE: &str = "solve.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record written next to the outputs of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: serde_json::Value,
    /// RFC 3339 UTC time of the run; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, params: serde_json::Value, outputs: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            params,
            timestamp: run_timestamp(),
            outputs,
        }
    }
}

fn run_timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map(|secs| UNIX_EPOCH + Duration::from_secs(secs))
        .unwrap_or_else(SystemTime::now);
    humantime::format_rfc3339_seconds(now).to_string()
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_json(&mut out, value)?;
    out.flush()?;
    Ok(())
}

pub fn read_metadata_file(path: &Path) -> Result<SolveMetadata> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}
