//! Degrees of the harmonic k-maps with j = -2 on the orthogonal groups.

use cohom1::actions::{admissible_k, degree_of_k_map, make_action, Space};

fn main() -> cohom1::Result<()> {
    println!("{:>8} {:>4} {:>6}", "group", "k", "degree");
    for (g, m) in [(2, 1), (2, 2), (3, 2), (4, 2), (6, 2)] {
        let action = make_action(Space::OrthogonalGroup, g, m, m, true)?;
        let k = admissible_k(&action, -2)?;
        println!("{:>8} {k:>4} {:>6}", action.ambient_label(), degree_of_k_map(&action, -2)?);
    }
    Ok(())
}
