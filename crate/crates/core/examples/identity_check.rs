//! Random-sample check of the trigonometric identities.

use cohom1::identities::{check_suite, DEFAULT_SEED};

fn main() -> cohom1::Result<()> {
    let report = check_suite(12, 10_000, DEFAULT_SEED, 1e-3)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    Ok(())
}
