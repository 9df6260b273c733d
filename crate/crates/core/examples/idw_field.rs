// Interpolates per-origin force changes onto a European grid and exports
// it as CSV and GeoJSON.

use gravity_shock::field::{aggregate_by_origin, idw_field, partition_and_export, IdwOptions};
use gravity_shock::shock::{significance_filter, simulate_routes, ClampMode};
use gravity_shock::{load_fixture_panel, Error, GridSpec, Result, ShockParams};

pub fn run_example() -> Result<()> {
    let panel = load_fixture_panel(&[2019])?;
    let mut params = ShockParams::new("UKR");
    params.clamp_mode = ClampMode::ClampAtZero;
    let routes = significance_filter(&simulate_routes(&panel, 2019, &params)?, &params)?;
    let values = aggregate_by_origin(&routes);

    let spec = GridSpec::bbox(1.0, (30.0, 72.0), (-25.0, 60.0));
    let grid = idw_field(&values, panel.countries(), &spec, IdwOptions::default())?;

    let dir = tempfile::tempdir().map_err(|e| Error::Io { path: "<tempdir>".into(), source: e })?;
    let counts = partition_and_export(
        &grid,
        &dir.path().join("field.csv"),
        &dir.path().join("field.geojson"),
    )?;
    println!(
        "{} cells: {} redirection, {} repulsion, {} empty",
        grid.cells.len(),
        counts.redirection,
        counts.repulsion,
        counts.empty
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
