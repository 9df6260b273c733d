//! Run configuration, read from a TOML file with `[io]`, `[shock]`,
//! `[grid]`, `[sweep]` and `[fit]` sections. Relative paths resolve against
//! the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::estimator::{DesignOptions, ModelSpec, Term};
use crate::geo::GridSpec;
use crate::ingest::Year;
use crate::sensitivity::{SweepParameter, SweepScope};
use crate::shock::{ClampMode, RouteScope, ShockParams};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    io: RawIo,
    #[serde(default)]
    shock: RawShock,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    fit: RawFit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIo {
    countries: PathBuf,
    pairs: PathBuf,
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShock {
    year: Option<Year>,
    epicenter_iso3: Option<String>,
    #[serde(rename = "R_km")]
    radius_km: Option<f64>,
    s_p: Option<f64>,
    mask_reduction: Option<f64>,
    epsilon: Option<f64>,
    min_share: Option<f64>,
    route_max_km: Option<f64>,
    clamp_mode: Option<String>,
    classification_threshold: Option<f64>,
    scopes: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    resolution: Option<f64>,
    lat_min: Option<f64>,
    lat_max: Option<f64>,
    lng_min: Option<f64>,
    lng_max: Option<f64>,
    max_km: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    clamp_mode: Option<String>,
    scope: Option<String>,
    s_p: Option<Vec<f64>>,
    #[serde(rename = "R_km")]
    radius_km: Option<Vec<f64>>,
    mask_reduction: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    year: Option<Year>,
    sanctions_destination: Option<String>,
    models: Option<Vec<Vec<String>>>,
    delta_t0: Option<Year>,
    delta_t1: Option<Year>,
    top_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub clamp_mode: ClampMode,
    pub scope: SweepScope,
    pub grids: Vec<(SweepParameter, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub year: Year,
    pub chain: Vec<ModelSpec>,
    pub design: DesignOptions,
    pub delta_t0: Year,
    pub delta_t1: Year,
    pub top_n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub countries_path: PathBuf,
    pub pairs_path: PathBuf,
    pub out_dir: PathBuf,
    pub simulation_year: Year,
    pub shock: ShockParams,
    pub scopes: Vec<RouteScope>,
    pub grid: GridSpec,
    pub idw_max_km: f64,
    pub sweep: SweepConfig,
    pub fit: FitConfig,
}

/// `n` equally spaced values `start, start + step, ...`.
pub fn linspace_step(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + i as f64 * step).collect()
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base, &path.display().to_string())
    }

    pub fn from_toml_str(text: &str, base_dir: &Path, file: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() as u64 + 1);
            Error::Malformed {
                file: file.to_string(),
                line,
                column: "<config>".into(),
                message: e.message().to_string(),
            }
        })?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };

        let s = raw.shock;
        let defaults = ShockParams::new(s.epicenter_iso3.clone().unwrap_or_else(|| "UKR".into()));
        let shock = ShockParams {
            radius_km: s.radius_km.unwrap_or(defaults.radius_km),
            intensity: s.s_p.unwrap_or(defaults.intensity),
            mask_reduction: s.mask_reduction.unwrap_or(defaults.mask_reduction),
            epsilon: s.epsilon.unwrap_or(defaults.epsilon),
            min_share: s.min_share.unwrap_or(defaults.min_share),
            route_max_km: s.route_max_km.unwrap_or(defaults.route_max_km),
            clamp_mode: match s.clamp_mode.as_deref() {
                Some(m) => m.parse()?,
                None => defaults.clamp_mode,
            },
            classification_threshold: s
                .classification_threshold
                .unwrap_or(defaults.classification_threshold),
            ..defaults
        };
        shock.validate()?;
        let scopes = s
            .scopes
            .unwrap_or_else(|| {
                ["top_outliers:10", "eu_any", "eu_only", "epicenter_only"]
                    .map(String::from)
                    .to_vec()
            })
            .iter()
            .map(|x| x.parse())
            .collect::<Result<Vec<RouteScope>>>()?;

        let g = raw.grid;
        let grid = GridSpec {
            resolution: g.resolution.unwrap_or(1.0),
            lat_min: g.lat_min.unwrap_or(-90.0),
            lat_max: g.lat_max.unwrap_or(90.0),
            lng_min: g.lng_min.unwrap_or(-180.0),
            lng_max: g.lng_max.unwrap_or(180.0),
        };
        grid.dimensions()
            .map_err(|e| Error::config("resolution", e.to_string()))?;
        let idw_max_km = g.max_km.unwrap_or(2000.0);
        if !(idw_max_km > 0.0 && idw_max_km.is_finite()) {
            return Err(Error::config("max_km", format!("{idw_max_km} violates max_km > 0")));
        }

        let sw = raw.sweep;
        let sweep = SweepConfig {
            clamp_mode: match sw.clamp_mode.as_deref() {
                Some(m) => m.parse()?,
                None => ClampMode::Literal,
            },
            scope: match sw.scope.as_deref() {
                None | Some("all_pairs") => SweepScope::AllPairs,
                Some("significant") => SweepScope::Significant,
                Some(other) => {
                    return Err(Error::config(
                        "scope",
                        format!("expected `all_pairs` or `significant`, got `{other}`"),
                    ))
                }
            },
            grids: vec![
                (
                    SweepParameter::Intensity,
                    sw.s_p.unwrap_or_else(|| linspace_step(1.0, 0.5, 9)),
                ),
                (
                    SweepParameter::Radius,
                    sw.radius_km.unwrap_or_else(|| linspace_step(100.0, 100.0, 15)),
                ),
                (
                    SweepParameter::MaskReduction,
                    sw.mask_reduction.unwrap_or_else(|| linspace_step(0.0, 0.11, 10)),
                ),
            ],
        };

        let f = raw.fit;
        let chain = match f.models {
            None => ModelSpec::standard_chain(),
            Some(models) => models
                .iter()
                .map(|terms| {
                    let terms = terms
                        .iter()
                        .map(|t| t.parse::<Term>())
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| Error::config("models", e.to_string()))?;
                    ModelSpec::new(terms).map_err(|e| Error::config("models", e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let simulation_year = s.year.unwrap_or(2019);
        let fit = FitConfig {
            year: f.year.unwrap_or(2023),
            chain,
            design: DesignOptions {
                sanctions_destination: f.sanctions_destination.unwrap_or_else(|| "RUS".into()),
            },
            delta_t0: f.delta_t0.unwrap_or(2019),
            delta_t1: f.delta_t1.unwrap_or(2023),
            top_n: f.top_n.unwrap_or(10),
        };
        if fit.top_n == 0 {
            return Err(Error::config("top_n", "must be at least 1"));
        }

        let countries_path = resolve(raw.io.countries);
        let pairs_path = resolve(raw.io.pairs);
        let out_dir = resolve(raw.io.out_dir.unwrap_or_else(|| PathBuf::from("out")));
        if out_dir == countries_path || out_dir == pairs_path {
            return Err(Error::config("out_dir", "output directory collides with an input path"));
        }
        Ok(Self {
            countries_path,
            pairs_path,
            out_dir,
            simulation_year,
            shock,
            scopes,
            grid,
            idw_max_km,
            sweep,
            fit,
        })
    }
}
