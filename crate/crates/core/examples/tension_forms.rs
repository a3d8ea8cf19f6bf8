//! Evaluates the raw focal sums and the closed form of the tension at one
//! point and checks that they agree.

use cohom1::ode::{closed_tension, closed_tension_equal_m, raw_tension_sphere, raw_tension_so};
use cohom1::{BvpSpec, TensionSample};

fn main() -> cohom1::Result<()> {
    let s = TensionSample::new(0.3, 0.7, -1.2, 2.5);

    let sphere = BvpSpec::new(4, 2, 5, 5)?;
    let sin = (4.0 * s.t).sin();
    println!("sphere g=4: raw x 4 sin^2 = {:.15}", 4.0 * sin * sin * raw_tension_sphere(4, 2, 5, &s)?);
    println!("            closed       = {:.15}", closed_tension(&sphere, &s)?);

    let lifted = BvpSpec::new(6, 2, 2, -5)?;
    let sin = (6.0 * s.t).sin();
    println!("SO lift g=3: raw x 4 sin^2 = {:.15}", 4.0 * sin * sin * raw_tension_so(3, 2, 2, &s)?);
    println!("             closed       = {:.15}", closed_tension(&lifted, &s)?);
    println!("             2 x equal-m  = {:.15}", 2.0 * closed_tension_equal_m(&lifted, &s)?);
    Ok(())
}
