//! Staged orchestration: simulate, field, sweep, fit, deltas.
//!
//! Every output is written atomically into the run's output directory and
//! recorded in `manifest.txt` with its SHA-256 digest.

mod config;

pub use config::{linspace_step, FitConfig, RunConfig, SweepConfig};

use std::fmt::Write as _;
use std::fs::{self, File};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{
    nested_comparison, render_fit_report, trade_deltas, write_deltas, write_fit_table,
};
use crate::field::{aggregate_by_origin, idw_field, write_field_csv, write_field_geojson, ClassCounts, IdwOptions};
use crate::ingest::{build_panel, load_countries, load_pair_table, CountryTable, GravityPanel, PairObservation, Year};
use crate::output::Manifest;
use crate::sensitivity::{classify_response, sweep, write_curve, ResponseShape, DEFAULT_SHAPE_TOLERANCE};
use crate::shock::{
    anti_gravity_aggregate, read_routes, route_report, significance_filter, simulate_routes,
    write_routes, AggregateResult,
};

/// File holding every significance-filtered route; the field stage reads it.
pub const SIGNIFICANT_ROUTES: &str = "routes_significant.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Simulate,
    Field,
    Sweep,
    Fit,
    Deltas,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Simulate,
        Stage::Field,
        Stage::Sweep,
        Stage::Fit,
        Stage::Deltas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::Field => "field",
            Stage::Sweep => "sweep",
            Stage::Fit => "fit",
            Stage::Deltas => "deltas",
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::config("stage", format!("unknown stage `{s}`")))
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub stages: Vec<Stage>,
    /// `(file name, sha256)` for every file written, sorted by name.
    pub files: Vec<(String, String)>,
    pub aggregate: Option<AggregateResult>,
    pub field_counts: Option<ClassCounts>,
    pub sweep_shapes: Vec<(String, ResponseShape)>,
}

struct Inputs {
    countries: CountryTable,
    pairs: Vec<PairObservation>,
}

impl Inputs {
    fn panel(&self, years: &[Year], key: &str) -> Result<GravityPanel> {
        let available = self.countries.years();
        if let Some(y) = years.iter().find(|y| !available.contains(y)) {
            return Err(Error::config(key, format!("year {y} has no GDP data in the inputs")));
        }
        build_panel(self.countries.clone(), self.pairs.clone(), years)
    }
}

/// Runs `stages` in dependency order.
pub fn run_pipeline(config: &RunConfig, stages: &[Stage]) -> Result<PipelineReport> {
    let mut stages = stages.to_vec();
    stages.sort();
    stages.dedup();
    if stages.is_empty() {
        return Err(Error::config("stage", "no stages requested"));
    }
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let prerequisite = config.out_dir.join(SIGNIFICANT_ROUTES);
    if stages.contains(&Stage::Field) && !stages.contains(&Stage::Simulate) && !prerequisite.exists() {
        return Err(Error::MissingPrerequisite(SIGNIFICANT_ROUTES.into()));
    }

    let inputs = Inputs {
        countries: load_countries(&config.countries_path)?,
        pairs: load_pair_table(&config.pairs_path)?,
    };
    let mut manifest = Manifest::new(&config.out_dir);
    let mut report = PipelineReport {
        stages: stages.clone(),
        files: Vec::new(),
        aggregate: None,
        field_counts: None,
        sweep_shapes: Vec::new(),
    };

    for stage in &stages {
        match stage {
            Stage::Simulate => {
                report.aggregate = Some(run_simulate(config, &inputs, &mut manifest)?);
            }
            Stage::Field => {
                report.field_counts = Some(run_field(config, &inputs.countries, &mut manifest)?);
            }
            Stage::Sweep => report.sweep_shapes = run_sweep(config, &inputs, &mut manifest)?,
            Stage::Fit => run_fit(config, &inputs, &mut manifest)?,
            Stage::Deltas => run_deltas(config, &inputs, &mut manifest)?,
        }
    }
    report.files = manifest.entries();
    manifest.finish()?;
    Ok(report)
}

fn run_simulate(config: &RunConfig, inputs: &Inputs, manifest: &mut Manifest) -> Result<AggregateResult> {
    let year = config.simulation_year;
    let panel = inputs.panel(&[year], "year")?;
    let params = &config.shock;
    let all = simulate_routes(&panel, year, params)?;
    let significant = significance_filter(&all, params)?;
    let aggregate = anti_gravity_aggregate(&significant, &params.epicenter_iso3)?;

    manifest.write(SIGNIFICANT_ROUTES, |w| write_routes(&significant, w))?;
    for scope in &config.scopes {
        let routes = route_report(&panel, year, params, *scope)?;
        manifest.write(&format!("routes_{}.csv", scope.name()), |w| write_routes(&routes, w))?;
    }

    let mut text = String::new();
    let _ = writeln!(text, "epicenter={}", params.epicenter_iso3);
    let _ = writeln!(text, "year={year}");
    let _ = writeln!(text, "panel_pairs={}", panel.pairs().len());
    let _ = writeln!(text, "dropped_pairs={}", panel.dropped());
    let _ = writeln!(text, "significant_routes={}", significant.len());
    let _ = writeln!(text, "masked_flows={}", aggregate.masked_flow_count);
    let _ = writeln!(text, "f_target={}", crate::fmt_f64(aggregate.f_target));
    let _ = writeln!(
        text,
        "local_conflict_force={}",
        crate::fmt_f64(aggregate.local_conflict_force)
    );
    manifest.write("aggregate.txt", |w| {
        w.write_all(text.as_bytes()).map_err(|e| Error::io("aggregate.txt", e))
    })?;
    Ok(aggregate)
}

fn run_field(config: &RunConfig, countries: &CountryTable, manifest: &mut Manifest) -> Result<ClassCounts> {
    let path = config.out_dir.join(SIGNIFICANT_ROUTES);
    let file = File::open(&path).map_err(|_| Error::MissingPrerequisite(SIGNIFICANT_ROUTES.into()))?;
    let routes = read_routes(file, &path.display().to_string())?;
    let values = aggregate_by_origin(&routes);
    let opts = IdwOptions {
        max_km: config.idw_max_km,
        epsilon: config.shock.epsilon,
    };
    let grid = idw_field(&values, countries, &config.grid, opts)?;
    manifest.write("field.csv", |w| write_field_csv(&grid, w))?;
    manifest.write("field.geojson", |w| write_field_geojson(&grid, w))?;
    Ok(grid.counts())
}

fn run_sweep(
    config: &RunConfig,
    inputs: &Inputs,
    manifest: &mut Manifest,
) -> Result<Vec<(String, ResponseShape)>> {
    let year = config.simulation_year;
    let panel = inputs.panel(&[year], "year")?;
    let mut base = config.shock.clone();
    base.clamp_mode = config.sweep.clamp_mode;
    let mut shapes = Vec::new();
    for (parameter, values) in &config.sweep.grids {
        let curve = sweep(&panel, year, &base, *parameter, values, config.sweep.scope)?;
        let class = classify_response(&curve, DEFAULT_SHAPE_TOLERANCE)?;
        manifest.write(&format!("sweep_{}.csv", parameter.key()), |w| {
            write_curve(&curve, &class, w)
        })?;
        shapes.push((parameter.key().to_string(), class.shape));
    }
    Ok(shapes)
}

fn run_fit(config: &RunConfig, inputs: &Inputs, manifest: &mut Manifest) -> Result<()> {
    let fit = &config.fit;
    let panel = inputs.panel(&[fit.year], "year")?;
    let chain = nested_comparison(&panel, fit.year, &fit.chain, &fit.design)?;
    let last = &chain.last().expect("nonempty chain").fit;
    manifest.write("fit_table.csv", |w| write_fit_table(last, w))?;
    let text = render_fit_report(fit.year, &chain);
    manifest.write("fit_report.txt", |w| {
        w.write_all(text.as_bytes()).map_err(|e| Error::io("fit_report.txt", e))
    })?;
    Ok(())
}

fn run_deltas(config: &RunConfig, inputs: &Inputs, manifest: &mut Manifest) -> Result<()> {
    let fit = &config.fit;
    let panel = inputs.panel(&[fit.delta_t0], "delta_t0")?;
    let report = trade_deltas(&panel, fit.delta_t0, fit.delta_t1, fit.top_n)?;
    manifest.write("deltas.csv", |w| write_deltas(&report, w))?;
    Ok(())
}
