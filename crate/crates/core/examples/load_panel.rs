// Loads the fixture tables, joins them into a panel and shows how a bad row
// is reported.

use gravity_shock::ingest::{build_panel, load_countries, load_pair_table, parse_pairs};
use gravity_shock::{fixture_dir, Result};

pub fn run_example() -> Result<()> {
    let dir = fixture_dir();
    let countries = load_countries(dir.join("countries.csv"))?;
    let pairs = load_pair_table(dir.join("pairs.csv"))?;
    println!("{} countries, {} pair rows", countries.len(), pairs.len());

    let panel = build_panel(countries, pairs, &[2019, 2023])?;
    let observed = panel.pairs().iter().filter(|p| p.trade(2023).is_some()).count();
    println!(
        "panel: {} pairs, {} dropped, {observed} with 2023 trade",
        panel.pairs().len(),
        panel.dropped()
    );

    let bad = "iso3_o,iso3_d,dist_km,trade_2019\nDEU,FRA,-3,10\n";
    match parse_pairs(bad.as_bytes(), "bad.csv") {
        Err(e) => println!("rejected: {e} (exit code {})", e.kind().exit_code()),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
