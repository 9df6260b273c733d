//! Gravity-model toolkit for conflict shocks on bilateral trade.
//!
//! The crate covers the whole chain from data tables to results:
//!
//! - [`geo`]: haversine distances and regular lat/lng grids
//! - [`ingest`]: country and pair CSV tables joined into a [`GravityPanel`]
//! - [`shock`]: baseline forces, the distance-decaying shock, route reports
//!   and the share-weighted anti-gravity aggregate
//! - [`field`]: inverse-distance-weighted force field with CSV/GeoJSON export
//! - [`sensitivity`]: one-at-a-time parameter sweeps and curve shapes
//! - [`estimator`]: log-linear gravity OLS, nested models, effect sizes and
//!   two-year trade deltas
//! - [`pipeline`]: config-driven staged runs with a digest manifest
//!
//! Runnable examples live in `examples/`; `cargo run --example <name>`.

pub mod error;
pub mod estimator;
pub mod field;
pub mod geo;
pub mod ingest;
pub mod output;
pub mod pipeline;
pub mod sensitivity;
pub mod shock;
pub mod synthetic;

pub use error::{Error, ErrorKind, Result};
pub use geo::{haversine_km, GeoPoint, GridSpec};
pub use ingest::{GravityPanel, Year};
pub use output::fmt_f64;
pub use shock::ShockParams;

use std::path::{Path, PathBuf};

/// Directory of the bundled synthetic fixture.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Loads the bundled 60-country fixture as a panel for `years`.
pub fn load_fixture_panel(years: &[Year]) -> Result<GravityPanel> {
    let dir = fixture_dir();
    let countries = ingest::load_countries(dir.join("countries.csv"))?;
    let pairs = ingest::load_pair_table(dir.join("pairs.csv"))?;
    ingest::build_panel(countries, pairs, years)
}
