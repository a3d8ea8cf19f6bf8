//! Harmonicity table of the linear k-maps for a few actions.

use cohom1::actions::{make_action, Space};
use cohom1::classify::{classify_range, render_text};

fn main() -> cohom1::Result<()> {
    for (space, g, m0, m1) in [
        (Space::Sphere, 1, 3, 3),
        (Space::Sphere, 4, 2, 5),
        (Space::OrthogonalGroup, 3, 2, 2),
        (Space::Sp2Lift, 6, 1, 1),
    ] {
        let action = make_action(space, g, m0, m1, true)?;
        println!("{} ({g},{m0},{m1})", action.ambient_label());
        print!("{}", render_text(&classify_range(&action, -4, 4)?));
        println!();
    }
    Ok(())
}
