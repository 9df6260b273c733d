//! Inverse-distance-weighted force field on a regular lat/lng grid.
//!
//! Each country contributes the signed sum of its outgoing route changes
//! (`F_shock - F_norm`, so losses are negative). A grid cell takes the
//! weighted mean of every country within `max_km`, with weights
//! `1 / (d^2 + eps)`. Negative cells are labelled redirection, the rest
//! repulsion.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};
use crate::geo::{haversine_km, make_grid, GeoPoint, GridSpec};
use crate::ingest::{csv_write_error, CountryTable};
use crate::output::write_atomic;
use crate::shock::RouteResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellClass {
    Redirection,
    Repulsion,
    Empty,
}

impl CellClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CellClass::Redirection => "Redirection",
            CellClass::Repulsion => "Repulsion",
            CellClass::Empty => "Empty",
        }
    }

    fn of(value: Option<f64>) -> Self {
        match value {
            None => CellClass::Empty,
            Some(v) if v < 0.0 => CellClass::Redirection,
            Some(_) => CellClass::Repulsion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCell {
    pub center: GeoPoint,
    pub value: Option<f64>,
    pub class: CellClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub cells: Vec<FieldCell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub redirection: usize,
    pub repulsion: usize,
    pub empty: usize,
}

impl ClassCounts {
    pub fn populated(&self) -> usize {
        self.redirection + self.repulsion
    }
}

impl FieldGrid {
    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for cell in &self.cells {
            match cell.class {
                CellClass::Redirection => c.redirection += 1,
                CellClass::Repulsion => c.repulsion += 1,
                CellClass::Empty => c.empty += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwOptions {
    pub max_km: f64,
    /// Added to squared distance (km^2).
    pub epsilon: f64,
}

impl Default for IdwOptions {
    fn default() -> Self {
        Self {
            max_km: 2000.0,
            epsilon: 1e-10,
        }
    }
}

/// Per-origin sum of `F_shock - F_norm`, keyed in code order.
pub fn aggregate_by_origin(routes: &[RouteResult]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for r in routes {
        *out.entry(r.iso3_o.clone()).or_insert(0.0) -= r.f_diff;
    }
    out
}

/// Interpolates `origin_values` onto the grid described by `spec`.
pub fn idw_field(
    origin_values: &BTreeMap<String, f64>,
    countries: &CountryTable,
    spec: &GridSpec,
    opts: IdwOptions,
) -> Result<FieldGrid> {
    if origin_values.is_empty() {
        return Err(Error::EmptySelection("no origin values to interpolate".into()));
    }
    if !(opts.max_km > 0.0) || !(opts.epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "IDW needs positive max_km and epsilon, got {} and {}",
            opts.max_km, opts.epsilon
        )));
    }
    let mut sources = Vec::with_capacity(origin_values.len());
    for (iso3, &value) in origin_values {
        let c = countries
            .get(iso3)
            .ok_or_else(|| Error::UnknownCountry(iso3.clone()))?;
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite field value for {iso3}")));
        }
        sources.push((c.location, value));
    }

    let cells = make_grid(spec)?
        .into_iter()
        .map(|center| {
            let value = interpolate(center, &sources, opts);
            FieldCell {
                center,
                value,
                class: CellClass::of(value),
            }
        })
        .collect();
    Ok(FieldGrid { spec: *spec, cells })
}

fn interpolate(at: GeoPoint, sources: &[(GeoPoint, f64)], opts: IdwOptions) -> Option<f64> {
    let mut weighted = 0.0;
    let mut weights = 0.0;
    for &(loc, value) in sources {
        let d = haversine_km(at, loc);
        if d <= opts.max_km {
            let w = 1.0 / (d * d + opts.epsilon);
            weighted += w * value;
            weights += w;
        }
    }
    (weights > 0.0).then(|| weighted / weights)
}

pub fn write_field_csv<W: Write>(grid: &FieldGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lat", "lng", "value", "class"])
        .map_err(csv_write_error)?;
    for cell in &grid.cells {
        w.write_record([
            crate::fmt_f64(cell.center.lat()),
            crate::fmt_f64(cell.center.lng()),
            cell.value.map(crate::fmt_f64).unwrap_or_default(),
            cell.class.as_str().to_string(),
        ])
        .map_err(csv_write_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

/// RFC 7946 FeatureCollection of populated cell centers.
pub fn write_field_geojson<W: Write>(grid: &FieldGrid, mut out: W) -> Result<()> {
    let features: Vec<_> = grid
        .cells
        .iter()
        .filter_map(|cell| {
            let value = cell.value?;
            Some(json!({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [cell.center.lng(), cell.center.lat()],
                },
                "properties": { "value": value, "class": cell.class.as_str() },
            }))
        })
        .collect();
    let doc = json!({ "type": "FeatureCollection", "features": features });
    serde_json::to_writer(&mut out, &doc)
        .map_err(|e| Error::Numerical(format!("GeoJSON serialization failed: {e}")))?;
    out.write_all(b"\n").map_err(|e| Error::io("<geojson writer>", e))
}

/// Writes the CSV and GeoJSON exports and returns the class counts.
pub fn partition_and_export(
    grid: &FieldGrid,
    csv_path: &Path,
    geojson_path: &Path,
) -> Result<ClassCounts> {
    write_atomic(csv_path, |w| write_field_csv(grid, w))?;
    write_atomic(geojson_path, |w| write_field_geojson(grid, w))?;
    Ok(grid.counts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_countries;
    use crate::shock::RouteClass;

    fn route(o: &str, f_diff: f64) -> RouteResult {
        RouteResult {
            iso3_o: o.into(),
            iso3_d: "XXX".into(),
            f_norm: 10.0,
            f_shock: 10.0 - f_diff,
            f_diff,
            pct_change: 0.0,
            dist_epicenter_km: 0.0,
            class: RouteClass::Repulsion,
        }
    }

    fn countries() -> CountryTable {
        let csv = "iso3,name,lat,lng\nAAA,A,0,-1\nBBB,B,0,1\nCCC,C,60,60\n";
        parse_countries(csv.as_bytes(), "c").unwrap()
    }

    #[test]
    fn aggregates_losses_negative() {
        let agg = aggregate_by_origin(&[route("DEU", 3.0), route("DEU", 4.0)]);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg["DEU"], -7.0);
        assert!(aggregate_by_origin(&[]).is_empty());
        assert_eq!(aggregate_by_origin(&[route("FRA", 2.0)])["FRA"], -2.0);
    }

    #[test]
    fn coincident_cell_returns_source_value() {
        let values = BTreeMap::from([("AAA".to_string(), -4.0), ("BBB".to_string(), 10.0)]);
        // one cell centered at (0, -1)
        let spec = GridSpec::bbox(2.0, (-1.0, 1.0), (-2.0, 0.0));
        let grid = idw_field(&values, &countries(), &spec, IdwOptions::default()).unwrap();
        let v = grid.cells[0].value.unwrap();
        assert!((v + 4.0).abs() <= 1e-6 * 4.0, "{v}");
    }

    #[test]
    fn equidistant_cell_averages() {
        let values = BTreeMap::from([("AAA".to_string(), -10.0), ("BBB".to_string(), 0.0)]);
        // one cell centered at (0, 0)
        let spec = GridSpec::bbox(2.0, (-1.0, 1.0), (-1.0, 1.0));
        let grid = idw_field(&values, &countries(), &spec, IdwOptions::default()).unwrap();
        assert!((grid.cells[0].value.unwrap() + 5.0).abs() < 1e-9);
        assert_eq!(grid.cells[0].class, CellClass::Redirection);
    }

    #[test]
    fn far_cells_are_empty() {
        let values = BTreeMap::from([("AAA".to_string(), -1.0)]);
        let spec = GridSpec::bbox(2.0, (-60.0, -58.0), (100.0, 102.0));
        let grid = idw_field(&values, &countries(), &spec, IdwOptions::default()).unwrap();
        assert_eq!(grid.cells[0].value, None);
        assert_eq!(grid.counts(), ClassCounts { redirection: 0, repulsion: 0, empty: 1 });
    }

    #[test]
    fn unknown_origin_is_an_error() {
        let values = BTreeMap::from([("ZZZ".to_string(), -1.0)]);
        let spec = GridSpec::global(90.0);
        assert!(idw_field(&values, &countries(), &spec, IdwOptions::default()).is_err());
        assert!(idw_field(&BTreeMap::new(), &countries(), &spec, IdwOptions::default()).is_err());
    }

    #[test]
    fn counts_by_class() {
        let p = GeoPoint::new(0.0, 0.0).unwrap();
        let cell = |v: Option<f64>| FieldCell { center: p, value: v, class: CellClass::of(v) };
        let grid = FieldGrid {
            spec: GridSpec::global(90.0),
            cells: vec![cell(Some(-1.0)), cell(Some(-2.0)), cell(Some(-3.0)), cell(None)],
        };
        assert_eq!(grid.counts(), ClassCounts { redirection: 3, repulsion: 0, empty: 1 });

        let positive = FieldGrid {
            spec: GridSpec::global(90.0),
            cells: vec![cell(Some(1.0)), cell(Some(0.0))],
        };
        assert_eq!(positive.counts().redirection, 0);
        assert_eq!(positive.counts().repulsion, 2);
    }
}
