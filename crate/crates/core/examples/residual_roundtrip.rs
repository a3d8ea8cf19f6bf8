//! Writes a solved profile to CSV, reads it back and recomputes its residual.

use cohom1::io::{read_profile, write_profile};
use cohom1::ode::residual_norm;
use cohom1::{BvpSpec, ShootingConfig};

fn main() -> cohom1::Result<()> {
    let spec = BvpSpec::new(3, 2, 2, -2)?;
    let profile = cohom1::solver::solve(&spec, &ShootingConfig::default(), None)?;
    let mut csv = Vec::new();
    write_profile(&mut csv, &profile.samples)?;
    let samples = read_profile(csv.as_slice())?;
    let report = residual_norm(&spec, &samples)?;
    println!("{} samples, {} bytes", samples.len(), csv.len());
    println!("reported {:.3e}, recomputed {:.3e}", profile.residual, report.max_abs);
    println!("boundary errors {:.1e} {:.1e}", report.boundary_err.0, report.boundary_err.1);
    Ok(())
}
