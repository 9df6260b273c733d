// Haversine distances and the cell-center grid.

use gravity_shock::geo::{make_grid, EARTH_RADIUS_KM};
use gravity_shock::{haversine_km, GeoPoint, GridSpec, Result};

pub fn run_example() -> Result<()> {
    let kyiv = GeoPoint::new(50.4501, 30.5234)?;
    let berlin = GeoPoint::new(52.5200, 13.4050)?;
    let d = haversine_km(kyiv, berlin);
    println!("Kyiv-Berlin: {d:.1} km");

    let antipode = haversine_km(GeoPoint::new(0.0, 0.0)?, GeoPoint::new(0.0, 180.0)?);
    println!("antipodal: {antipode:.3} km (pi * {EARTH_RADIUS_KM})");

    let global = GridSpec::global(1.0);
    let (rows, cols) = global.dimensions()?;
    println!("1 degree global grid: {rows} x {cols} = {} cells", global.cell_count()?);

    let europe = GridSpec::bbox(5.0, (35.0, 70.0), (-10.0, 40.0));
    let cells = make_grid(&europe)?;
    let first = cells[0];
    println!(
        "Europe at 5 degrees: {} cells, first center ({}, {})",
        cells.len(),
        first.lat(),
        first.lng()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
