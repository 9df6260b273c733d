// Largest bilateral trade gains and losses between 2019 and 2023.

use gravity_shock::estimator::trade_deltas;
use gravity_shock::{load_fixture_panel, Result};

pub fn run_example() -> Result<()> {
    let panel = load_fixture_panel(&[2019, 2023])?;
    let report = trade_deltas(&panel, 2019, 2023, 5)?;
    println!("{} pairs compared, {} excluded", report.compared, report.excluded);
    for (label, list) in [("gains", &report.gains), ("losses", &report.losses)] {
        println!("{label}:");
        for d in list {
            println!("  {}->{} {:+.3e}", d.iso3_o, d.iso3_d, d.delta);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
