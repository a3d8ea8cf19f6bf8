//! Scans left slopes for the identity class on S^6 and refines every
//! bracket into a solution, linear or not.

use cohom1::solver::{brackets, solve_all, sweep};
use cohom1::{BvpSpec, ShootingConfig};

fn main() -> cohom1::Result<()> {
    let spec = BvpSpec::new(1, 2, 2, 1)?;
    let config = ShootingConfig {
        bracket: Some((0.0, 20.0)),
        ..ShootingConfig::default()
    };
    println!("brackets {:?}", brackets(&sweep(&spec, &config)?));
    for p in solve_all(&spec, &config)? {
        println!(
            "a = {:.6}, b = {:.6}, max |r - t| = {:.4}, residual {:.1e}",
            p.slope0,
            p.slope1,
            p.max_linear_deviation(),
            p.residual
        );
    }
    Ok(())
}
