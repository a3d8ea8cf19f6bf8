//! Recovers the linear solution r = -5t on SO(8) by double shooting.

use cohom1::actions::{make_action, Space};
use cohom1::{BvpSpec, ShootingConfig};

fn main() -> cohom1::Result<()> {
    let action = make_action(Space::OrthogonalGroup, 3, 2, 2, true)?;
    let spec = BvpSpec::from_action(&action, -2)?;
    let profile = cohom1::solver::solve(&spec, &ShootingConfig::default(), None)?;
    println!("G = {}, k = {}", spec.g, spec.k);
    println!("slopes ({:.12}, {:.12})", profile.slope0, profile.slope1);
    println!("residual {:.2e}", profile.residual);
    println!("max |r - kt| {:.2e}", profile.max_linear_deviation());
    Ok(())
}
