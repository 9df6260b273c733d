//! Great-circle geometry and regular lat/lng grids.
//!
//! Distances use a spherical Earth of radius [`EARTH_RADIUS_KM`] (IUGG mean
//! radius). Longitudes are normalized to `[-180, 180)` on construction.

use crate::error::{Error, Result};

/// IUGG mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// A point on the sphere, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lng: f64,
}

impl GeoPoint {
    /// Validates latitude and wraps longitude into `[-180, 180)`.
    pub fn new(lat: f64, lng: f64) -> Result<Self> {
        if !lat.is_finite() || !lng.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate ({lat}, {lng})"
            )));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidInput(format!(
                "latitude {lat} outside [-90, 90]"
            )));
        }
        Ok(Self {
            lat,
            lng: normalize_lng(lng),
        })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lng(&self) -> f64 {
        self.lng
    }
}

fn normalize_lng(lng: f64) -> f64 {
    let wrapped = (lng + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// Haversine great-circle distance in kilometres.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lng - a.lng).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Regular grid definition. The default bounding box is the whole globe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: f64,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lng_min: f64,
    pub lng_max: f64,
}

const SPAN_TOLERANCE: f64 = 1e-9;

impl GridSpec {
    pub fn global(resolution: f64) -> Self {
        Self {
            resolution,
            lat_min: -90.0,
            lat_max: 90.0,
            lng_min: -180.0,
            lng_max: 180.0,
        }
    }

    pub fn bbox(resolution: f64, lat: (f64, f64), lng: (f64, f64)) -> Self {
        Self {
            resolution,
            lat_min: lat.0,
            lat_max: lat.1,
            lng_min: lng.0,
            lng_max: lng.1,
        }
    }

    /// Number of (rows, columns), checking that the resolution tiles the box.
    pub fn dimensions(&self) -> Result<(usize, usize)> {
        let res = self.resolution;
        if !res.is_finite() || res <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be positive, got {res}"
            )));
        }
        let bounds = [self.lat_min, self.lat_max, self.lng_min, self.lng_max];
        if bounds.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite grid bounds".into()));
        }
        if self.lat_min < -90.0 || self.lat_max > 90.0 {
            return Err(Error::InvalidInput("grid latitude outside [-90, 90]".into()));
        }
        let rows = whole_cells(self.lat_max - self.lat_min, res, "latitude")?;
        let cols = whole_cells(self.lng_max - self.lng_min, res, "longitude")?;
        Ok((rows, cols))
    }

    pub fn cell_count(&self) -> Result<usize> {
        self.dimensions().map(|(r, c)| r * c)
    }
}

fn whole_cells(span: f64, res: f64, axis: &str) -> Result<usize> {
    if span <= 0.0 {
        return Err(Error::InvalidInput(format!("empty {axis} span")));
    }
    let cells = span / res;
    let rounded = cells.round();
    if (cells - rounded).abs() > SPAN_TOLERANCE || rounded < 1.0 {
        return Err(Error::InvalidInput(format!(
            "resolution {res} does not divide the {axis} span {span}"
        )));
    }
    Ok(rounded as usize)
}

/// Cell centers in row-major order starting from the south-west corner.
pub fn make_grid(spec: &GridSpec) -> Result<Vec<GeoPoint>> {
    let (rows, cols) = spec.dimensions()?;
    let res = spec.resolution;
    let mut cells = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let lat = spec.lat_min + (i as f64 + 0.5) * res;
        for j in 0..cols {
            let lng = spec.lng_min + (j as f64 + 0.5) * res;
            cells.push(GeoPoint::new(lat, lng)?);
        }
    }
    Ok(cells)
}
