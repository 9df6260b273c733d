//! Baseline gravity forces and the distance-decaying conflict shock.
//!
//! A route's baseline force is `gdp_o * gdp_d / dist^2`. The shock factor at
//! distance `d` from the epicenter is `R^2 / (d^2 + eps)`; the shocked force
//! is `F_norm * (1 - s_p * s)`, with an extra multiplicative reduction for
//! routes that touch the epicenter country.

mod potential;
mod routes;

pub use potential::{income_potential, total_potential, Conflict, PotentialParams};
pub use routes::{
    anti_gravity_aggregate, classify_routes, read_routes, route_report, significance_filter,
    simulate_routes, write_routes, AggregateResult, RouteClass, RouteResult, RouteScope,
};

use crate::error::{Error, Result};

/// How negative shocked forces are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampMode {
    /// `F_norm * (1 - s_p * s)` as is; may go negative near the epicenter.
    #[default]
    Literal,
    /// Floors the unmasked shocked force at zero.
    ClampAtZero,
}

impl ClampMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClampMode::Literal => "literal",
            ClampMode::ClampAtZero => "clamp_at_zero",
        }
    }
}

impl std::str::FromStr for ClampMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ClampMode::Literal),
            "clamp_at_zero" => Ok(ClampMode::ClampAtZero),
            other => Err(Error::config(
                "clamp_mode",
                format!("expected `literal` or `clamp_at_zero`, got `{other}`"),
            )),
        }
    }
}

/// A complete shock scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockParams {
    pub epicenter_iso3: String,
    /// Shock radius `R` in km; the factor equals 1 at this distance.
    pub radius_km: f64,
    /// Conflict intensity `s_p`.
    pub intensity: f64,
    /// Extra reduction applied to routes touching the epicenter, in `[0, 1]`.
    pub mask_reduction: f64,
    pub epsilon: f64,
    /// Minimum share of total shocked force for a route to be kept.
    pub min_share: f64,
    /// Routes whose origin lies farther than this from the epicenter are not reported.
    pub route_max_km: f64,
    pub clamp_mode: ClampMode,
    /// Normalized `F_diff` at or above which a route counts as redirection.
    pub classification_threshold: f64,
}

impl ShockParams {
    pub fn new(epicenter_iso3: impl Into<String>) -> Self {
        Self {
            epicenter_iso3: epicenter_iso3.into(),
            radius_km: 550.0,
            intensity: 3.0,
            mask_reduction: 0.9,
            epsilon: 1e-10,
            min_share: 5e-5,
            route_max_km: 6000.0,
            clamp_mode: ClampMode::Literal,
            classification_threshold: 0.05,
        }
    }

    /// Checks every bound; errors name the offending config key.
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, key: &str, value: f64, rule: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(key, format!("{value} violates {rule}")))
            }
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        check(positive(self.radius_km), "R_km", self.radius_km, "R_km > 0")?;
        check(nonneg(self.intensity), "s_p", self.intensity, "s_p >= 0")?;
        check(
            (0.0..=1.0).contains(&self.mask_reduction),
            "mask_reduction",
            self.mask_reduction,
            "0 <= mask_reduction <= 1",
        )?;
        check(positive(self.epsilon), "epsilon", self.epsilon, "epsilon > 0")?;
        check(nonneg(self.min_share), "min_share", self.min_share, "min_share >= 0")?;
        check(
            positive(self.route_max_km),
            "route_max_km",
            self.route_max_km,
            "route_max_km > 0",
        )?;
        check(
            self.classification_threshold > 0.0 && self.classification_threshold < 1.0,
            "classification_threshold",
            self.classification_threshold,
            "0 < classification_threshold < 1",
        )?;
        if self.epicenter_iso3.is_empty() {
            return Err(Error::config("epicenter_iso3", "must not be empty"));
        }
        Ok(())
    }
}

/// `gdp_o * gdp_d / dist_km^2`.
pub fn baseline_force(gdp_o: f64, gdp_d: f64, dist_km: f64) -> Result<f64> {
    if !(dist_km > 0.0) {
        return Err(Error::InvalidInput(format!(
            "baseline force needs a positive distance, got {dist_km}"
        )));
    }
    if !(gdp_o > 0.0 && gdp_d > 0.0) {
        return Err(Error::InvalidInput(format!(
            "baseline force needs positive GDPs, got {gdp_o} and {gdp_d}"
        )));
    }
    Ok(gdp_o * gdp_d / (dist_km * dist_km))
}

/// `R^2 / (d^2 + eps)`.
pub fn shock_factor(dist_epicenter_km: f64, params: &ShockParams) -> f64 {
    let r = params.radius_km;
    r * r / (dist_epicenter_km * dist_epicenter_km + params.epsilon)
}

/// Returns `(F_shock, F_diff)`.
pub fn shocked_force(
    f_norm: f64,
    s: f64,
    params: &ShockParams,
    involves_epicenter: bool,
) -> (f64, f64) {
    let mut shocked = f_norm * (1.0 - params.intensity * s);
    if params.clamp_mode == ClampMode::ClampAtZero {
        shocked = shocked.max(0.0);
    }
    if involves_epicenter {
        shocked *= 1.0 - params.mask_reduction;
    }
    (shocked, f_norm - shocked)
}

/// Min-max scaling of `ln(1 + v)` onto `[0, 1]`. A constant list maps to zeros.
pub fn normalize_forces(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot normalize an empty list".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "normalization needs finite nonnegative forces, got {v}"
        )));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln_1p()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(logs.iter().map(|l| (l - lo) / (hi - lo)).collect())
}
