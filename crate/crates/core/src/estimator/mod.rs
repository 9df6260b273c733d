//! Augmented log-linear gravity regression.
//!
//! The response is `ln(trade)` for one year; regressors are chosen from the
//! log GDPs, log distance and three policy dummies. Fits use Householder QR
//! with classical standard errors and t-distribution p-values.

mod deltas;
mod qr;
pub mod special;

pub use deltas::{trade_deltas, write_deltas, DeltaRecord, DeltaReport};
pub use qr::{householder_lstsq, Matrix, QrSolution, RANK_TOLERANCE};

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{csv_write_error, GravityPanel, PanelPair, Year};
use special::student_t_two_sided_p;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Intercept,
    LnGdpO,
    LnGdpD,
    LnDist,
    /// Both endpoints are EU members.
    IntraEu,
    /// Sanctioning origin, sanctioned destination.
    Sanctions,
    EnergyExporterO,
}

impl Term {
    pub const ALL: [Term; 7] = [
        Term::Intercept,
        Term::LnGdpO,
        Term::LnGdpD,
        Term::LnDist,
        Term::IntraEu,
        Term::Sanctions,
        Term::EnergyExporterO,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Term::Intercept => "intercept",
            Term::LnGdpO => "ln_gdp_o",
            Term::LnGdpD => "ln_gdp_d",
            Term::LnDist => "ln_dist",
            Term::IntraEu => "intra_eu",
            Term::Sanctions => "sanctions",
            Term::EnergyExporterO => "energy_exporter_o",
        }
    }

    pub fn is_dummy(self) -> bool {
        matches!(self, Term::IntraEu | Term::Sanctions | Term::EnergyExporterO)
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Term::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model term `{s}`")))
    }
}

/// An ordered list of regressors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    terms: Vec<Term>,
}

impl ModelSpec {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("a model needs at least one term".into()));
        }
        let unique: BTreeSet<_> = terms.iter().collect();
        if unique.len() != terms.len() {
            return Err(Error::InvalidInput("duplicate model term".into()));
        }
        if terms.iter().skip(1).any(|t| *t == Term::Intercept) {
            return Err(Error::InvalidInput("intercept must come first".into()));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn contains(&self, other: &ModelSpec) -> bool {
        other.terms.iter().all(|t| self.terms.contains(t))
    }

    /// Baseline gravity model, then intra-EU, sanctions and energy-exporter
    /// terms added one at a time.
    pub fn standard_chain() -> Vec<ModelSpec> {
        use Term::*;
        let base = vec![Intercept, LnGdpO, LnGdpD, LnDist];
        let mut chain = vec![ModelSpec { terms: base.clone() }];
        let mut terms = base;
        for t in [IntraEu, Sanctions, EnergyExporterO] {
            terms.push(t);
            chain.push(ModelSpec {
                terms: terms.clone(),
            });
        }
        chain
    }

    pub fn full() -> ModelSpec {
        ModelSpec {
            terms: Term::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignOptions {
    /// Destination code for the sanctions dummy.
    pub sanctions_destination: String,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            sanctions_destination: "RUS".into(),
        }
    }
}

/// Regression inputs for one model and year.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub x: Matrix,
    pub y: Vec<f64>,
    /// `(iso3_o, iso3_d)` of each row.
    pub rows: Vec<(String, String)>,
    /// Rows with zero trade in the year.
    pub zero_excluded: usize,
    /// Rows with no observation in the year.
    pub missing_excluded: usize,
}

fn regressor(
    term: Term,
    panel: &GravityPanel,
    pair: &PanelPair,
    year: Year,
    opts: &DesignOptions,
) -> f64 {
    let (o, d) = (panel.origin(pair), panel.dest(pair));
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    match term {
        Term::Intercept => 1.0,
        Term::LnGdpO => o.gdp(year).map_or(f64::NAN, f64::ln),
        Term::LnGdpD => d.gdp(year).map_or(f64::NAN, f64::ln),
        Term::LnDist => pair.dist_km.ln(),
        Term::IntraEu => flag(o.eu_member && d.eu_member),
        Term::Sanctions => flag(o.sanctioning && d.iso3 == opts.sanctions_destination),
        Term::EnergyExporterO => flag(o.energy_exporter),
    }
}

fn usable(pair: &PanelPair, year: Year) -> std::result::Result<f64, bool> {
    match pair.trade(year) {
        Some(v) if v > 0.0 => Ok(v),
        Some(_) => Err(true),
        None => Err(false),
    }
}

/// Builds `ln(trade)` and the regressors for `spec`. Zero and missing trade
/// rows are dropped and counted.
pub fn build_design(
    panel: &GravityPanel,
    year: Year,
    spec: &ModelSpec,
    opts: &DesignOptions,
) -> Result<Design> {
    panel.require_year(year)?;
    let k = spec.terms.len();
    let mut columns = vec![Vec::new(); k];
    let mut y = Vec::new();
    let mut rows = Vec::new();
    let (mut zero_excluded, mut missing_excluded) = (0, 0);
    for pair in panel.pairs() {
        let trade = match usable(pair, year) {
            Ok(v) => v,
            Err(true) => {
                zero_excluded += 1;
                continue;
            }
            Err(false) => {
                missing_excluded += 1;
                continue;
            }
        };
        for (col, term) in columns.iter_mut().zip(&spec.terms) {
            col.push(regressor(*term, panel, pair, year, opts));
        }
        y.push(trade.ln());
        rows.push((pair.iso3_o.clone(), pair.iso3_d.clone()));
    }
    let n = y.len();
    if n <= k {
        return Err(Error::InsufficientRows { n, k });
    }
    let names = spec.terms.iter().map(|t| t.name().to_string()).collect();
    Ok(Design {
        x: Matrix::from_columns(columns, names)?,
        y,
        rows,
        zero_excluded,
        missing_excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub terms: Vec<String>,
    pub betas: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub n: usize,
    pub k: usize,
    pub rss: f64,
}

impl FitResult {
    pub fn coefficient(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }
}

/// Ordinary least squares with homoskedastic standard errors.
///
/// R² is centered when the design has a constant column.
pub fn ols_fit(x: &Matrix, y: &[f64]) -> Result<FitResult> {
    if x.cols() == 0 {
        return Err(Error::InvalidInput("empty design".into()));
    }
    if (0..x.cols()).any(|j| x.column(j).iter().any(|v| !v.is_finite()))
        || y.iter().any(|v| !v.is_finite())
    {
        return Err(Error::Numerical("non-finite value in regression data".into()));
    }
    let (n, k) = (x.rows(), x.cols());
    let sol = householder_lstsq(x, y)?;
    let fitted = x.mul_vec(&sol.beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let df = (n - k) as f64;
    let sigma2 = rss / df;

    let standard_errors: Vec<f64> = sol
        .unscaled_variances()
        .iter()
        .map(|v| (sigma2 * v).sqrt())
        .collect();
    let t_stats: Vec<f64> = sol
        .beta
        .iter()
        .zip(&standard_errors)
        .map(|(b, se)| match (*b, *se) {
            (b, se) if se > 0.0 => b / se,
            (0.0, _) => 0.0,
            (b, _) => b.signum() * f64::INFINITY,
        })
        .collect();
    let p_values = t_stats
        .iter()
        .map(|t| student_t_two_sided_p(*t, df))
        .collect();

    let tss = if x.has_constant_column() {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r2 = if tss > 0.0 {
        1.0 - rss / tss
    } else if rss == 0.0 {
        1.0
    } else {
        0.0
    };
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - k as f64);

    Ok(FitResult {
        terms: x.names().to_vec(),
        betas: sol.beta,
        standard_errors,
        t_stats,
        p_values,
        r2,
        adj_r2,
        n,
        k,
        rss,
    })
}

/// `exp(beta) - 1`: proportional effect of a dummy in a log-linear model.
pub fn effect_size(beta: f64) -> f64 {
    beta.exp_m1()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedRow {
    pub spec: ModelSpec,
    pub fit: FitResult,
}

/// Fits each model of a nested chain on one common sample.
pub fn nested_comparison(
    panel: &GravityPanel,
    year: Year,
    chain: &[ModelSpec],
    opts: &DesignOptions,
) -> Result<Vec<NestedRow>> {
    if chain.is_empty() {
        return Err(Error::NonNested("empty model chain".into()));
    }
    for w in chain.windows(2) {
        if !w[1].contains(&w[0]) {
            return Err(Error::NonNested(format!(
                "{:?} does not contain {:?}",
                names(&w[1]),
                names(&w[0])
            )));
        }
    }
    let designs = chain
        .iter()
        .map(|spec| build_design(panel, year, spec, opts))
        .collect::<Result<Vec<_>>>()?;
    // Rows that every model can use.
    let mut common: BTreeSet<&(String, String)> = designs[0].rows.iter().collect();
    for d in &designs[1..] {
        let rows: BTreeSet<_> = d.rows.iter().collect();
        common.retain(|r| rows.contains(r));
    }
    chain
        .iter()
        .zip(&designs)
        .map(|(spec, design)| {
            let keep: Vec<usize> = (0..design.rows.len())
                .filter(|&i| common.contains(&design.rows[i]))
                .collect();
            let (x, y) = subset(design, &keep)?;
            Ok(NestedRow {
                spec: spec.clone(),
                fit: ols_fit(&x, &y)?,
            })
        })
        .collect()
}

fn names(spec: &ModelSpec) -> Vec<&'static str> {
    spec.terms.iter().map(|t| t.name()).collect()
}

fn subset(design: &Design, keep: &[usize]) -> Result<(Matrix, Vec<f64>)> {
    if keep.len() == design.rows.len() {
        return Ok((design.x.clone(), design.y.clone()));
    }
    let columns = (0..design.x.cols())
        .map(|j| keep.iter().map(|&i| design.x.get(i, j)).collect())
        .collect();
    let x = Matrix::from_columns(columns, design.x.names().to_vec())?;
    Ok((x, keep.iter().map(|&i| design.y[i]).collect()))
}

/// `term,beta,se,t,p` rows, then `n`, `k`, `r2`, `adj_r2` footer rows.
pub fn write_fit_table<W: Write>(fit: &FitResult, out: W) -> Result<()> {
    let f = crate::fmt_f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "beta", "se", "t", "p"])
        .map_err(csv_write_error)?;
    for i in 0..fit.terms.len() {
        w.write_record([
            fit.terms[i].clone(),
            f(fit.betas[i]),
            f(fit.standard_errors[i]),
            f(fit.t_stats[i]),
            f(fit.p_values[i]),
        ])
        .map_err(csv_write_error)?;
    }
    for (key, value) in [
        ("n", fit.n.to_string()),
        ("k", fit.k.to_string()),
        ("r2", f(fit.r2)),
        ("adj_r2", f(fit.adj_r2)),
    ] {
        w.write_record([key, &value, "", "", ""])
            .map_err(csv_write_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

/// Human-readable report: the nested chain and the final model's
/// coefficients with effect sizes for dummies.
pub fn render_fit_report(year: Year, chain: &[NestedRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "gravity regression, response ln(trade_{year})");
    let _ = writeln!(s);
    let _ = writeln!(s, "[nested models]");
    for (i, row) in chain.iter().enumerate() {
        let _ = writeln!(
            s,
            "model {} terms={} n={} k={} r2={} adj_r2={}",
            i + 1,
            names(&row.spec).join("+"),
            row.fit.n,
            row.fit.k,
            crate::fmt_f64(row.fit.r2),
            crate::fmt_f64(row.fit.adj_r2),
        );
    }
    if let Some(last) = chain.last() {
        let fit = &last.fit;
        let _ = writeln!(s);
        let _ = writeln!(s, "[final model]");
        for i in 0..fit.terms.len() {
            let _ = write!(
                s,
                "{} beta={} se={} t={} p={}",
                fit.terms[i],
                crate::fmt_f64(fit.betas[i]),
                crate::fmt_f64(fit.standard_errors[i]),
                crate::fmt_f64(fit.t_stats[i]),
                crate::fmt_f64(fit.p_values[i]),
            );
            if fit.terms[i].parse::<Term>().is_ok_and(Term::is_dummy) {
                let _ = write!(s, " effect={}", crate::fmt_f64(effect_size(fit.betas[i])));
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(
            s,
            "n={} k={} r2={} adj_r2={}",
            fit.n,
            fit.k,
            crate::fmt_f64(fit.r2),
            crate::fmt_f64(fit.adj_r2)
        );
    }
    s
}
