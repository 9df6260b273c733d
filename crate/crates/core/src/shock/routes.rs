use std::cmp::Ordering;
use std::io::{Read, Write};
use std::str::FromStr;

use super::{baseline_force, normalize_forces, shock_factor, shocked_force, ShockParams};
use crate::error::{Error, Result};
use crate::geo::haversine_km;
use crate::ingest::{csv_write_error, GravityPanel, Year};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RouteClass {
    Redirection,
    Repulsion,
}

impl RouteClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RouteClass::Redirection => "Redirection",
            RouteClass::Repulsion => "Repulsion",
        }
    }
}

impl FromStr for RouteClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Redirection" => Ok(RouteClass::Redirection),
            "Repulsion" => Ok(RouteClass::Repulsion),
            other => Err(Error::InvalidInput(format!("unknown route class `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub iso3_o: String,
    pub iso3_d: String,
    pub f_norm: f64,
    pub f_shock: f64,
    pub f_diff: f64,
    pub pct_change: f64,
    /// Distance from the origin country to the epicenter.
    pub dist_epicenter_km: f64,
    pub class: RouteClass,
}

impl RouteResult {
    pub fn involves(&self, iso3: &str) -> bool {
        self.iso3_o == iso3 || self.iso3_d == iso3
    }
}

/// Which subset of routes a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteScope {
    /// The `n` routes with the largest baseline force.
    TopOutliers(usize),
    /// Origin or destination is an EU member.
    EuAny,
    /// Both endpoints are EU members.
    EuOnly,
    /// Origin or destination is the epicenter.
    EpicenterOnly,
    All,
}

impl RouteScope {
    /// Short name used in output file names.
    pub fn name(&self) -> &'static str {
        match self {
            RouteScope::TopOutliers(_) => "top_outliers",
            RouteScope::EuAny => "eu_any",
            RouteScope::EuOnly => "eu_only",
            RouteScope::EpicenterOnly => "epicenter_only",
            RouteScope::All => "all",
        }
    }
}

impl FromStr for RouteScope {
    type Err = Error;

    /// Accepts `top_outliers:<n>`, `eu_any`, `eu_only`, `epicenter_only`, `all`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config("scopes", format!("unknown route scope `{s}`"));
        match s {
            "eu_any" => Ok(RouteScope::EuAny),
            "eu_only" => Ok(RouteScope::EuOnly),
            "epicenter_only" => Ok(RouteScope::EpicenterOnly),
            "all" => Ok(RouteScope::All),
            _ => {
                let n = s.strip_prefix("top_outliers:").ok_or_else(bad)?;
                let n: usize = n.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(RouteScope::TopOutliers(n))
            }
        }
    }
}

/// Forces for every panel pair in the given year, in `(iso3_o, iso3_d)` order.
///
/// Routes are classified against the whole simulated set;
/// [`route_report`] reclassifies within its own selection.
pub fn simulate_routes(
    panel: &GravityPanel,
    year: Year,
    params: &ShockParams,
) -> Result<Vec<RouteResult>> {
    params.validate()?;
    panel.require_year(year)?;
    let epicenter = panel
        .countries()
        .get(&params.epicenter_iso3)
        .ok_or_else(|| Error::UnknownCountry(params.epicenter_iso3.clone()))?;

    let mut routes = Vec::with_capacity(panel.pairs().len());
    for pair in panel.pairs() {
        let origin = panel.origin(pair);
        let (gdp_o, gdp_d) = panel
            .gdps(pair, year)
            .ok_or_else(|| Error::InvalidInput(format!("missing GDP for {year}")))?;
        let f_norm = baseline_force(gdp_o, gdp_d, pair.dist_km)?;
        let dist_epicenter_km = haversine_km(origin.location, epicenter.location);
        let s = shock_factor(dist_epicenter_km, params);
        let masked = pair.iso3_o == epicenter.iso3 || pair.iso3_d == epicenter.iso3;
        let (f_shock, f_diff) = shocked_force(f_norm, s, params, masked);
        routes.push(RouteResult {
            iso3_o: pair.iso3_o.clone(),
            iso3_d: pair.iso3_d.clone(),
            f_norm,
            f_shock,
            f_diff,
            pct_change: 100.0 * ((f_shock - f_norm) / f_norm),
            dist_epicenter_km,
            class: RouteClass::Repulsion,
        });
    }
    classify_routes(&mut routes, params.classification_threshold)?;
    Ok(routes)
}

/// Redirection when the log-min-max normalized `F_diff` reaches `threshold`.
pub fn classify_routes(routes: &mut [RouteResult], threshold: f64) -> Result<()> {
    if routes.is_empty() {
        return Ok(());
    }
    // F_diff is nonnegative whenever s_p * s >= 0; guard against rounding.
    let diffs: Vec<f64> = routes.iter().map(|r| r.f_diff.max(0.0)).collect();
    let scaled = normalize_forces(&diffs)?;
    for (route, v) in routes.iter_mut().zip(scaled) {
        route.class = if v >= threshold {
            RouteClass::Redirection
        } else {
            RouteClass::Repulsion
        };
    }
    Ok(())
}

fn total_shocked(routes: &[RouteResult]) -> Result<f64> {
    let total: f64 = routes.iter().map(|r| r.f_shock).sum();
    if total > 0.0 && total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Numerical(format!(
            "total shocked force must be positive, got {total}"
        )))
    }
}

/// Keeps routes whose share of total shocked force exceeds `min_share`, plus
/// every route touching the epicenter. Input order is preserved.
pub fn significance_filter(
    routes: &[RouteResult],
    params: &ShockParams,
) -> Result<Vec<RouteResult>> {
    let total = total_shocked(routes)?;
    Ok(routes
        .iter()
        .filter(|r| r.f_shock / total > params.min_share || r.involves(&params.epicenter_iso3))
        .cloned()
        .collect())
}

fn by_epicenter_distance(a: &RouteResult, b: &RouteResult) -> Ordering {
    a.dist_epicenter_km
        .total_cmp(&b.dist_epicenter_km)
        .then_with(|| a.iso3_o.cmp(&b.iso3_o))
        .then_with(|| a.iso3_d.cmp(&b.iso3_d))
}

/// Simulates, filters by significance, selects `scope`, drops routes whose
/// origin is beyond `route_max_km` of the epicenter and sorts from closest to
/// farthest (ties by `(iso3_o, iso3_d)`).
pub fn route_report(
    panel: &GravityPanel,
    year: Year,
    params: &ShockParams,
    scope: RouteScope,
) -> Result<Vec<RouteResult>> {
    let all = simulate_routes(panel, year, params)?;
    let significant = significance_filter(&all, params)?;
    let countries = panel.countries();
    let is_eu = |iso: &str| countries.get(iso).is_some_and(|c| c.eu_member);

    let mut selected: Vec<RouteResult> = significant
        .into_iter()
        .filter(|r| r.dist_epicenter_km <= params.route_max_km)
        .filter(|r| match scope {
            RouteScope::EuAny => is_eu(&r.iso3_o) || is_eu(&r.iso3_d),
            RouteScope::EuOnly => is_eu(&r.iso3_o) && is_eu(&r.iso3_d),
            RouteScope::EpicenterOnly => r.involves(&params.epicenter_iso3),
            RouteScope::TopOutliers(_) | RouteScope::All => true,
        })
        .collect();

    if let RouteScope::TopOutliers(n) = scope {
        selected.sort_by(|a, b| {
            b.f_norm
                .total_cmp(&a.f_norm)
                .then_with(|| a.iso3_o.cmp(&b.iso3_o))
                .then_with(|| a.iso3_d.cmp(&b.iso3_d))
        });
        selected.truncate(n);
    }
    if selected.is_empty() {
        return Err(Error::EmptySelection(format!(
            "route scope `{}` selected no routes",
            scope.name()
        )));
    }
    selected.sort_by(by_epicenter_distance);
    classify_routes(&mut selected, params.classification_threshold)?;
    Ok(selected)
}

/// Share-weighted force change on epicenter routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateResult {
    /// `sum_i (F_shock_i / sum F_shock) * F_eff_i`, with
    /// `F_eff = F_shock - F_norm` on masked routes and zero elsewhere.
    pub f_target: f64,
    /// Sum of `F_diff` over masked routes.
    pub local_conflict_force: f64,
    pub masked_flow_count: usize,
}

pub fn anti_gravity_aggregate(routes: &[RouteResult], epicenter: &str) -> Result<AggregateResult> {
    let total = total_shocked(routes)?;
    let mut result = AggregateResult {
        f_target: 0.0,
        local_conflict_force: 0.0,
        masked_flow_count: 0,
    };
    for r in routes.iter().filter(|r| r.involves(epicenter)) {
        let weight = r.f_shock / total;
        result.f_target += weight * (r.f_shock - r.f_norm);
        result.local_conflict_force += r.f_diff;
        result.masked_flow_count += 1;
    }
    Ok(result)
}

const ROUTE_COLUMNS: [&str; 8] = [
    "iso3_o",
    "iso3_d",
    "dist_epicenter_km",
    "f_norm",
    "f_shock",
    "f_diff",
    "pct_change",
    "class",
];

pub fn write_routes<W: Write>(routes: &[RouteResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROUTE_COLUMNS).map_err(csv_write_error)?;
    for r in routes {
        w.write_record([
            r.iso3_o.clone(),
            r.iso3_d.clone(),
            crate::fmt_f64(r.dist_epicenter_km),
            crate::fmt_f64(r.f_norm),
            crate::fmt_f64(r.f_shock),
            crate::fmt_f64(r.f_diff),
            crate::fmt_f64(r.pct_change),
            r.class.as_str().to_string(),
        ])
        .map_err(csv_write_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

pub fn read_routes<R: Read>(input: R, file: &str) -> Result<Vec<RouteResult>> {
    let mut rdr = csv::Reader::from_reader(input);
    let malformed = |line: u64, msg: String| Error::Malformed {
        file: file.to_string(),
        line,
        column: "<row>".into(),
        message: msg,
    };
    let headers = rdr
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if headers.iter().ne(ROUTE_COLUMNS) {
        return Err(malformed(1, "unexpected route header".into()));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let rec = row.map_err(|e| malformed(0, e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| malformed(line, format!("bad number `{}`", &rec[i])))
        };
        out.push(RouteResult {
            iso3_o: rec[0].to_string(),
            iso3_d: rec[1].to_string(),
            dist_epicenter_km: num(2)?,
            f_norm: num(3)?,
            f_shock: num(4)?,
            f_diff: num(5)?,
            pct_change: num(6)?,
            class: rec[7].parse()?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shock::ClampMode;

    fn route(o: &str, d: &str, f_norm: f64, f_shock: f64, dist: f64) -> RouteResult {
        RouteResult {
            iso3_o: o.into(),
            iso3_d: d.into(),
            f_norm,
            f_shock,
            f_diff: f_norm - f_shock,
            pct_change: 100.0 * ((f_shock - f_norm) / f_norm),
            dist_epicenter_km: dist,
            class: RouteClass::Repulsion,
        }
    }

    #[test]
    fn pct_change_format() {
        let r = route("DEU", "NLD", 100.0, 65.5, 1000.0);
        assert!((r.pct_change + 34.5).abs() < 1e-12);
    }

    #[test]
    fn epicenter_route_survives_filter() {
        let p = ShockParams::new("UKR");
        let routes = vec![
            route("DEU", "FRA", 1e9, 1e9, 1000.0),
            route("UKR", "FRA", 1.0, 1.0, 0.0),
            route("ITA", "FRA", 1.0, 1.0, 1000.0),
        ];
        let kept = significance_filter(&routes, &p).unwrap();
        let keys: Vec<_> = kept.iter().map(|r| r.iso3_o.as_str()).collect();
        assert_eq!(keys, vec!["DEU", "UKR"]);
    }

    #[test]
    fn filter_is_noop_when_all_significant() {
        let p = ShockParams::new("UKR");
        let routes = vec![route("DEU", "FRA", 5.0, 5.0, 1.0), route("ITA", "FRA", 4.0, 4.0, 1.0)];
        assert_eq!(significance_filter(&routes, &p).unwrap(), routes);
    }

    #[test]
    fn filter_rejects_nonpositive_total() {
        let p = ShockParams::new("UKR");
        let routes = vec![route("DEU", "FRA", 5.0, -5.0, 1.0)];
        assert!(significance_filter(&routes, &p).is_err());
    }

    #[test]
    fn aggregate_without_masked_routes_is_zero() {
        let routes = vec![route("DEU", "FRA", 10.0, 5.0, 1.0)];
        let agg = anti_gravity_aggregate(&routes, "UKR").unwrap();
        assert_eq!(agg.f_target, 0.0);
        assert_eq!(agg.masked_flow_count, 0);
    }

    #[test]
    fn aggregate_single_route() {
        let routes = vec![route("UKR", "POL", 10.0, 1.0, 0.0)];
        let agg = anti_gravity_aggregate(&routes, "UKR").unwrap();
        assert!((agg.f_target + 9.0).abs() < 1e-12);
        assert!((agg.local_conflict_force - 9.0).abs() < 1e-12);
        assert_eq!(agg.masked_flow_count, 1);
    }

    #[test]
    fn aggregate_negative_with_masked_flows() {
        let routes = vec![
            route("DEU", "FRA", 10.0, 9.0, 1.0),
            route("UKR", "POL", 10.0, 1.0, 0.0),
            route("POL", "UKR", 4.0, 3.0, 600.0),
        ];
        assert!(anti_gravity_aggregate(&routes, "UKR").unwrap().f_target < 0.0);
    }

    #[test]
    fn aggregate_scales_with_forces() {
        let base = vec![route("DEU", "FRA", 10.0, 9.0, 1.0), route("UKR", "POL", 10.0, 2.0, 0.0)];
        let scaled: Vec<_> = base
            .iter()
            .map(|r| route(&r.iso3_o, &r.iso3_d, r.f_norm * 7.0, r.f_shock * 7.0, 0.0))
            .collect();
        let a = anti_gravity_aggregate(&base, "UKR").unwrap().f_target;
        let b = anti_gravity_aggregate(&scaled, "UKR").unwrap().f_target;
        assert!((b / a - 7.0).abs() < 1e-12);
    }

    #[test]
    fn scope_parsing() {
        assert_eq!("top_outliers:10".parse::<RouteScope>().unwrap(), RouteScope::TopOutliers(10));
        assert_eq!("eu_only".parse::<RouteScope>().unwrap(), RouteScope::EuOnly);
        assert!("top_outliers:0".parse::<RouteScope>().is_err());
        assert!("nope".parse::<RouteScope>().is_err());
    }

    #[test]
    fn classification_threshold() {
        let mut routes = vec![
            route("A", "B", 100.0, 0.0, 1.0),
            route("C", "D", 100.0, 100.0, 1.0),
        ];
        classify_routes(&mut routes, 0.05).unwrap();
        assert_eq!(routes[0].class, RouteClass::Redirection);
        assert_eq!(routes[1].class, RouteClass::Repulsion);
    }

    #[test]
    fn routes_csv_round_trip() {
        let mut p = ShockParams::new("UKR");
        p.clamp_mode = ClampMode::ClampAtZero;
        let routes = vec![
            route("DEU", "FRA", 1.234_567_890_123_456_7e20, 9.87e19, 1234.5),
            route("UKR", "POL", 0.1, 0.01, 0.0),
        ];
        let mut buf = Vec::new();
        write_routes(&routes, &mut buf).unwrap();
        assert_eq!(read_routes(buf.as_slice(), "r").unwrap(), routes);
    }
}
