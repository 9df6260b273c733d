//! Deterministic synthetic gravity data.
//!
//! Sixty countries with approximate centroids, 2019 GDPs in USD and policy
//! flags (EU27 as of 2023; EU members plus USA, GBR, CAN, JPN, KOR, NOR, CHE,
//! AUS and NZL sanctioning; ten energy exporters). Trade is drawn from a
//! log-linear gravity process with known coefficients, so regressions on it
//! have a ground truth.
//!
//! Ukraine's GDP is scaled down to 25 bn so that flows touching it stay
//! under 0.1% of the global force total.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geo::{haversine_km, GeoPoint};
use crate::ingest::{CountryRecord, CountryTable, PairObservation, Year};

/// Seed of the bundled fixture files.
pub const FIXTURE_SEED: u64 = 20_220_224;
pub const FIXTURE_YEARS: [Year; 2] = [2019, 2023];

// iso3, name, lat, lng, GDP 2019 (USD bn), eu, sanctioning, energy exporter
#[rustfmt::skip]
const COUNTRIES: [(&str, &str, f64, f64, f64, bool, bool, bool); 60] = [
    ("ARE", "United Arab Emirates", 23.42, 53.85, 417.0, false, false, true),
    ("ARG", "Argentina", -38.42, -63.62, 452.0, false, false, false),
    ("AUS", "Australia", -25.27, 133.78, 1397.0, false, true, false),
    ("AUT", "Austria", 47.52, 14.55, 445.0, true, true, false),
    ("BEL", "Belgium", 50.50, 4.47, 535.0, true, true, false),
    ("BGR", "Bulgaria", 42.73, 25.49, 68.0, true, true, false),
    ("BLR", "Belarus", 53.71, 27.95, 64.0, false, false, false),
    ("BRA", "Brazil", -14.24, -51.93, 1877.0, false, false, false),
    ("CAN", "Canada", 56.13, -106.35, 1742.0, false, true, true),
    ("CHE", "Switzerland", 46.82, 8.23, 721.0, false, true, false),
    ("CHN", "China", 35.86, 104.20, 14280.0, false, false, false),
    ("CYP", "Cyprus", 35.13, 33.43, 25.0, true, true, false),
    ("CZE", "Czechia", 49.82, 15.47, 252.0, true, true, false),
    ("DEU", "Germany", 51.17, 10.45, 3889.0, true, true, false),
    ("DNK", "Denmark", 56.26, 9.50, 350.0, true, true, false),
    ("DZA", "Algeria", 28.03, 1.66, 171.0, false, false, true),
    ("EGY", "Egypt", 26.82, 30.80, 303.0, false, false, false),
    ("ESP", "Spain", 40.46, -3.75, 1394.0, true, true, false),
    ("EST", "Estonia", 58.60, 25.01, 31.0, true, true, false),
    ("FIN", "Finland", 61.92, 25.75, 269.0, true, true, false),
    ("FRA", "France", 46.23, 2.21, 2729.0, true, true, false),
    ("GBR", "United Kingdom", 55.38, -3.44, 2851.0, false, true, false),
    ("GEO", "Georgia", 42.32, 43.36, 17.0, false, false, false),
    ("GRC", "Greece", 39.07, 21.82, 205.0, true, true, false),
    ("HRV", "Croatia", 45.10, 15.20, 61.0, true, true, false),
    ("HUN", "Hungary", 47.16, 19.50, 164.0, true, true, false),
    ("IDN", "Indonesia", -0.79, 113.92, 1119.0, false, false, false),
    ("IND", "India", 20.59, 78.96, 2835.0, false, false, false),
    ("IRL", "Ireland", 53.41, -8.24, 399.0, true, true, false),
    ("IRN", "Iran", 32.43, 53.69, 260.0, false, false, true),
    ("ISR", "Israel", 31.05, 34.85, 402.0, false, false, false),
    ("ITA", "Italy", 41.87, 12.57, 2004.0, true, true, false),
    ("JPN", "Japan", 36.20, 138.25, 5118.0, false, true, false),
    ("KAZ", "Kazakhstan", 48.02, 66.92, 181.0, false, false, true),
    ("KOR", "South Korea", 35.91, 127.77, 1651.0, false, true, false),
    ("LTU", "Lithuania", 55.17, 23.88, 55.0, true, true, false),
    ("LUX", "Luxembourg", 49.82, 6.13, 71.0, true, true, false),
    ("LVA", "Latvia", 56.88, 24.60, 34.0, true, true, false),
    ("MDA", "Moldova", 47.41, 28.37, 12.0, false, false, false),
    ("MEX", "Mexico", 23.63, -102.55, 1269.0, false, false, false),
    ("MLT", "Malta", 35.94, 14.38, 15.0, true, true, false),
    ("NGA", "Nigeria", 9.08, 8.68, 448.0, false, false, true),
    ("NLD", "Netherlands", 52.13, 5.29, 910.0, true, true, false),
    ("NOR", "Norway", 60.47, 8.47, 405.0, false, true, true),
    ("NZL", "New Zealand", -40.90, 174.89, 211.0, false, true, false),
    ("POL", "Poland", 51.92, 19.15, 597.0, true, true, false),
    ("PRT", "Portugal", 39.40, -8.22, 240.0, true, true, false),
    ("QAT", "Qatar", 25.35, 51.18, 176.0, false, false, true),
    ("ROU", "Romania", 45.94, 24.97, 250.0, true, true, false),
    ("RUS", "Russia", 61.52, 105.32, 1693.0, false, false, true),
    ("SAU", "Saudi Arabia", 23.89, 45.08, 793.0, false, false, true),
    ("SGP", "Singapore", 1.35, 103.82, 375.0, false, false, false),
    ("SRB", "Serbia", 44.02, 21.01, 52.0, false, false, false),
    ("SVK", "Slovakia", 48.67, 19.70, 105.0, true, true, false),
    ("SVN", "Slovenia", 46.15, 14.99, 54.0, true, true, false),
    ("SWE", "Sweden", 60.13, 18.64, 531.0, true, true, false),
    ("TUR", "Turkey", 38.96, 35.24, 761.0, false, false, false),
    ("UKR", "Ukraine", 48.38, 31.17, 25.0, false, false, false),
    ("USA", "United States", 37.09, -95.71, 21381.0, false, true, false),
    ("ZAF", "South Africa", -30.56, 22.94, 388.0, false, false, false),
];

/// Coefficients of the log-linear trade process for one year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dgp {
    pub intercept: f64,
    pub ln_gdp_o: f64,
    pub ln_gdp_d: f64,
    pub ln_dist: f64,
    pub intra_eu: f64,
    pub sanctions: f64,
    pub energy_exporter_o: f64,
    pub noise_sd: f64,
    /// Probability a trade cell is left unobserved.
    pub missing_rate: f64,
    /// Probability an observed trade value is exactly zero.
    pub zero_rate: f64,
}

impl Dgp {
    /// Pre-conflict year: no sanctions effect.
    pub fn pre_conflict() -> Self {
        Self {
            intercept: -21.0,
            ln_gdp_o: 1.0,
            ln_gdp_d: 0.9,
            ln_dist: -1.4,
            intra_eu: 0.5,
            sanctions: 0.0,
            energy_exporter_o: 0.3,
            noise_sd: 1.0,
            missing_rate: 0.02,
            zero_rate: 0.01,
        }
    }

    pub fn post_conflict() -> Self {
        Self {
            sanctions: -1.5,
            intra_eu: 0.4,
            ..Self::pre_conflict()
        }
    }
}

/// The sixty-country table with GDPs for 2019 and 2023.
pub fn standard_countries(seed: u64) -> CountryTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0067_6470);
    let growth = Normal::new(0.12, 0.08).expect("valid normal");
    let records = COUNTRIES
        .iter()
        .map(|&(iso3, name, lat, lng, gdp_bn, eu, sanc, energy)| {
            let gdp19 = gdp_bn * 1e9;
            let g: f64 = growth.sample(&mut rng);
            let gdp23 = gdp19 * (1.0 + g).max(0.5);
            CountryRecord {
                iso3: iso3.to_string(),
                name: name.to_string(),
                location: GeoPoint::new(lat, lng).expect("table coordinates are valid"),
                gdp_by_year: BTreeMap::from([(2019, gdp19), (2023, gdp23)]),
                eu_member: eu,
                sanctioning: sanc,
                energy_exporter: energy,
            }
        })
        .collect();
    CountryTable::new(records).expect("table codes are unique")
}

/// Draws every directed pair's distance and trade for the given years.
///
/// Distances are centroid great-circle distances inflated by up to 15%
/// (a stand-in for population weighting), floored at 50 km.
pub fn simulate_pairs(
    countries: &CountryTable,
    years: &[(Year, Dgp)],
    sanctions_destination: &str,
    seed: u64,
) -> Vec<PairObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
    let mut out = Vec::with_capacity(countries.len() * countries.len());
    for o in countries.iter() {
        for d in countries.iter() {
            if o.iso3 == d.iso3 {
                continue;
            }
            let inflate = 1.0 + 0.15 * rng.random::<f64>();
            let dist = (haversine_km(o.location, d.location) * inflate).max(50.0);
            let mut trade_by_year = BTreeMap::new();
            for &(year, dgp) in years {
                let noise: f64 = std_normal.sample(&mut rng);
                let missing = rng.random::<f64>() < dgp.missing_rate;
                let zero = rng.random::<f64>() < dgp.zero_rate;
                let (Some(go), Some(gd)) = (o.gdp(year), d.gdp(year)) else {
                    continue;
                };
                if missing {
                    continue;
                }
                let flag = |b: bool| if b { 1.0 } else { 0.0 };
                let ln_trade = dgp.intercept
                    + dgp.ln_gdp_o * go.ln()
                    + dgp.ln_gdp_d * gd.ln()
                    + dgp.ln_dist * dist.ln()
                    + dgp.intra_eu * flag(o.eu_member && d.eu_member)
                    + dgp.sanctions * flag(o.sanctioning && d.iso3 == sanctions_destination)
                    + dgp.energy_exporter_o * flag(o.energy_exporter)
                    + dgp.noise_sd * noise;
                let value = if zero { 0.0 } else { ln_trade.exp() };
                trade_by_year.insert(year, value);
            }
            out.push(PairObservation {
                iso3_o: o.iso3.clone(),
                iso3_d: d.iso3.clone(),
                dist_km: Some(dist),
                trade_by_year,
            });
        }
    }
    out
}

/// The bundled fixture: countries plus pairs for 2019 (pre) and 2023 (post).
pub fn generate_fixture(seed: u64) -> (CountryTable, Vec<PairObservation>) {
    let countries = standard_countries(seed);
    let pairs = simulate_pairs(
        &countries,
        &[(2019, Dgp::pre_conflict()), (2023, Dgp::post_conflict())],
        "RUS",
        seed,
    );
    (countries, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(generate_fixture(7), generate_fixture(7));
        assert_ne!(generate_fixture(7).1, generate_fixture(8).1);
    }

    #[test]
    fn shape() {
        let (c, p) = generate_fixture(FIXTURE_SEED);
        assert_eq!(c.len(), 60);
        assert_eq!(p.len(), 60 * 59);
        assert_eq!(c.iter().filter(|r| r.eu_member).count(), 27);
        assert!(p.iter().all(|x| x.dist_km.unwrap() >= 50.0));
    }
}
