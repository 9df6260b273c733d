//! One-at-a-time parameter sweeps of the shock simulation and a simple
//! shape classifier for the resulting response curves.

use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{csv_write_error, GravityPanel, Year};
use crate::shock::{significance_filter, simulate_routes, ShockParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// `s_p`
    Intensity,
    /// `R_km`
    Radius,
    MaskReduction,
}

impl SweepParameter {
    /// Config key / file-name stem.
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::Intensity => "s_p",
            SweepParameter::Radius => "R_km",
            SweepParameter::MaskReduction => "mask_reduction",
        }
    }

    fn apply(self, params: &mut ShockParams, value: f64) {
        match self {
            SweepParameter::Intensity => params.intensity = value,
            SweepParameter::Radius => params.radius_km = value,
            SweepParameter::MaskReduction => params.mask_reduction = value,
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s_p" => Ok(SweepParameter::Intensity),
            "R_km" => Ok(SweepParameter::Radius),
            "mask_reduction" => Ok(SweepParameter::MaskReduction),
            other => Err(Error::InvalidInput(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

/// Which routes contribute to a sweep total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepScope {
    /// Every panel pair.
    #[default]
    AllPairs,
    /// Only routes passing the significance filter at each sweep point.
    Significant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// `sum (F_shock - F_norm)` at each value.
    pub totals: Vec<f64>,
}

fn check_values(parameter: SweepParameter, values: &[f64]) -> Result<()> {
    let key = parameter.key();
    if values.len() < 3 {
        return Err(Error::config(key, "a sweep needs at least 3 values"));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(key, "sweep values must be strictly increasing"));
    }
    let legal = |v: f64| match parameter {
        SweepParameter::Intensity => v.is_finite() && v >= 0.0,
        SweepParameter::Radius => v.is_finite() && v > 0.0,
        SweepParameter::MaskReduction => (0.0..=1.0).contains(&v),
    };
    if let Some(v) = values.iter().find(|v| !legal(**v)) {
        return Err(Error::config(key, format!("illegal sweep value {v}")));
    }
    Ok(())
}

/// Runs the shock simulation at each value of `parameter`, all else fixed.
pub fn sweep(
    panel: &GravityPanel,
    year: Year,
    base: &ShockParams,
    parameter: SweepParameter,
    values: &[f64],
    scope: SweepScope,
) -> Result<ResponseCurve> {
    check_values(parameter, values)?;
    let mut totals = Vec::with_capacity(values.len());
    for &v in values {
        let mut params = base.clone();
        parameter.apply(&mut params, v);
        let mut routes = simulate_routes(panel, year, &params)?;
        if scope == SweepScope::Significant {
            routes = significance_filter(&routes, &params)?;
        }
        totals.push(routes.iter().map(|r| r.f_shock - r.f_norm).sum());
    }
    Ok(ResponseCurve {
        parameter,
        values: values.to_vec(),
        totals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseShape {
    Linear,
    /// Second differences share the sign of the trend: the change grows.
    NonlinearAccelerating,
    /// Curved, but not uniformly accelerating (kinks, saturation).
    Nonlinear,
    Insensitive,
}

impl ResponseShape {
    pub fn as_str(self) -> &'static str {
        match self {
            ResponseShape::Linear => "Linear",
            ResponseShape::NonlinearAccelerating => "NonlinearAccelerating",
            ResponseShape::Nonlinear => "Nonlinear",
            ResponseShape::Insensitive => "Insensitive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseClassification {
    pub shape: ResponseShape,
    /// `max - min` of the totals.
    pub range: f64,
    pub mean: f64,
    pub max_abs_second_diff: f64,
}

pub const DEFAULT_SHAPE_TOLERANCE: f64 = 1e-6;

/// Classifies an equally spaced curve.
///
/// Insensitive when the spread of totals is within `tol * |mean|`; linear when
/// every second difference is within `tol * range`.
pub fn classify_response(curve: &ResponseCurve, tol: f64) -> Result<ResponseClassification> {
    let (values, totals) = (&curve.values, &curve.totals);
    if values.len() < 3 || values.len() != totals.len() {
        return Err(Error::InvalidInput(
            "a response curve needs at least 3 matching points".into(),
        ));
    }
    let step = values[1] - values[0];
    if values
        .windows(2)
        .any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs())
    {
        return Err(Error::InvalidInput("sweep values are not equally spaced".into()));
    }

    let max = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    let first: Vec<f64> = totals.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<f64> = first.windows(2).map(|w| w[1] - w[0]).collect();
    let max_abs_second_diff = second.iter().fold(0.0f64, |m, d| m.max(d.abs()));

    let shape = if range <= tol * mean.abs() {
        ResponseShape::Insensitive
    } else if max_abs_second_diff <= tol * range {
        ResponseShape::Linear
    } else {
        let significant = |d: f64| d.abs() > tol * range;
        let accelerating = [1.0, -1.0].iter().any(|&sign: &f64| {
            second.iter().all(|&d| significant(d) && d.signum() == sign)
                && first.iter().all(|&d| d.signum() == sign)
        });
        if accelerating {
            ResponseShape::NonlinearAccelerating
        } else {
            ResponseShape::Nonlinear
        }
    };
    Ok(ResponseClassification {
        shape,
        range,
        mean,
        max_abs_second_diff,
    })
}

/// `parameter,value,total` rows followed by a `classification` footer row.
pub fn write_curve<W: Write>(
    curve: &ResponseCurve,
    class: &ResponseClassification,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", "value", "total"])
        .map_err(csv_write_error)?;
    for (v, t) in curve.values.iter().zip(&curve.totals) {
        w.write_record([
            curve.parameter.key().to_string(),
            crate::fmt_f64(*v),
            crate::fmt_f64(*t),
        ])
        .map_err(csv_write_error)?;
    }
    w.write_record(["classification", class.shape.as_str(), ""])
        .map_err(csv_write_error)?;
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(totals: &[f64]) -> ResponseCurve {
        ResponseCurve {
            parameter: SweepParameter::Intensity,
            values: (0..totals.len()).map(|i| i as f64).collect(),
            totals: totals.to_vec(),
        }
    }

    fn shape(totals: &[f64]) -> ResponseShape {
        classify_response(&curve(totals), DEFAULT_SHAPE_TOLERANCE)
            .unwrap()
            .shape
    }

    #[test]
    fn shape_examples() {
        assert_eq!(shape(&[-10.0, -20.0, -30.0, -40.0]), ResponseShape::Linear);
        assert_eq!(
            shape(&[-1.0, -4.0, -9.0, -16.0]),
            ResponseShape::NonlinearAccelerating
        );
        assert_eq!(shape(&[-5.0, -5.0, -5.0]), ResponseShape::Insensitive);
    }

    #[test]
    fn decelerating_and_kinked_curves_are_not_linear() {
        assert_eq!(shape(&[-16.0, -9.0, -4.0, -1.0]), ResponseShape::Nonlinear);
        assert_eq!(shape(&[-1.0, -2.0, -3.0, -3.5, -4.0]), ResponseShape::Nonlinear);
    }

    #[test]
    fn rejects_unequal_spacing() {
        let c = ResponseCurve {
            parameter: SweepParameter::Radius,
            values: vec![1.0, 2.0, 4.0],
            totals: vec![1.0, 2.0, 3.0],
        };
        assert!(classify_response(&c, 1e-6).is_err());
    }

    #[test]
    fn sweep_values_are_checked() {
        assert!(check_values(SweepParameter::Intensity, &[1.0, 2.0]).is_err());
        assert!(check_values(SweepParameter::Intensity, &[1.0, 3.0, 2.0]).is_err());
        assert!(check_values(SweepParameter::MaskReduction, &[0.0, 0.5, 1.5]).is_err());
        assert!(check_values(SweepParameter::Radius, &[0.0, 1.0, 2.0]).is_err());
        assert!(check_values(SweepParameter::Intensity, &[1.0, 2.0, 3.0, 4.0, 5.0]).is_ok());
    }

    #[test]
    fn curve_csv_has_footer() {
        let c = curve(&[-1.0, -2.0, -3.0]);
        let class = classify_response(&c, 1e-6).unwrap();
        let mut buf = Vec::new();
        write_curve(&c, &class, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().last().unwrap(), "classification,Linear,");
    }
}
