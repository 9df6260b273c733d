use crate::error::{Error, Result};
use crate::ingest::{GravityPanel, Year};

/// Constant `k` and distance exponent `a` of the income potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    pub k: f64,
    pub a: f64,
}

impl PotentialParams {
    pub fn new(k: f64, a: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "potential parameters must be positive, got k = {k}, a = {a}"
            )));
        }
        Ok(Self { k, a })
    }
}

/// A conflict source: its size and its distance from the country evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conflict {
    pub size: f64,
    pub dist_km: f64,
}

/// `sum_j k * Y_j / d_ij^a` over every panel partner `j` of `iso3`, with
/// `Y_j` the partner's GDP in `year` and `d_ij` the pair distance.
pub fn income_potential(
    iso3: &str,
    panel: &GravityPanel,
    year: Year,
    pp: PotentialParams,
) -> Result<f64> {
    if panel.countries().get(iso3).is_none() {
        return Err(Error::UnknownCountry(iso3.to_string()));
    }
    panel.require_year(year)?;
    Ok(panel
        .pairs()
        .iter()
        .filter(|p| p.iso3_o == iso3)
        .map(|p| {
            let y = panel.dest(p).gdp(year).unwrap_or(0.0);
            pp.k * y / p.dist_km.powf(pp.a)
        })
        .sum())
}

/// Income potential minus `sum_h size_h / dist_h` over conflicts.
pub fn total_potential(
    iso3: &str,
    panel: &GravityPanel,
    year: Year,
    conflicts: &[Conflict],
    pp: PotentialParams,
) -> Result<f64> {
    let mut drag = 0.0;
    for c in conflicts {
        if !(c.dist_km > 0.0) {
            return Err(Error::InvalidInput(format!(
                "conflict distance must be positive, got {}",
                c.dist_km
            )));
        }
        drag += c.size / c.dist_km;
    }
    Ok(income_potential(iso3, panel, year, pp)? - drag)
}
