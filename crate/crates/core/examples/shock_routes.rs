// Shocks the 2019 fixture around Ukraine and reports the strongest routes
// and the share-weighted aggregate on masked flows.

use gravity_shock::shock::{
    anti_gravity_aggregate, route_report, shock_factor, significance_filter, simulate_routes,
    ClampMode, RouteScope,
};
use gravity_shock::{load_fixture_panel, Result, ShockParams};

pub fn run_example() -> Result<()> {
    let mut params = ShockParams::new("UKR");
    println!("shock factor at 100 km: {}", shock_factor(100.0, &params));

    // Floor shocked forces so the epicenter's own routes stay usable as weights.
    params.clamp_mode = ClampMode::ClampAtZero;
    let panel = load_fixture_panel(&[2019])?;

    let top = route_report(&panel, 2019, &params, RouteScope::TopOutliers(10))?;
    println!("top routes by baseline force, closest to the epicenter first:");
    for r in &top {
        println!(
            "  {}->{} {:>7.0} km {:>6.1}% {}",
            r.iso3_o,
            r.iso3_d,
            r.dist_epicenter_km,
            r.pct_change,
            r.class.as_str()
        );
    }

    let all = simulate_routes(&panel, 2019, &params)?;
    let significant = significance_filter(&all, &params)?;
    let agg = anti_gravity_aggregate(&significant, "UKR")?;
    println!(
        "{} significant routes, {} masked; F_target = {:.4e}, local force = {:.4e}",
        significant.len(),
        agg.masked_flow_count,
        agg.f_target,
        agg.local_conflict_force
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
