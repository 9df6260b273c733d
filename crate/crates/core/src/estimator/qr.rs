//! Dense column-major matrices and Householder least squares.

use crate::error::{Error, Result};

/// Column-major `rows x cols` matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    names: Vec<String>,
}

impl Matrix {
    /// Builds from row slices. Columns are named `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged design rows".into()));
        }
        let mut data = vec![0.0; rows.len() * cols];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                data[j * rows.len() + i] = *v;
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
            names: (0..cols).map(|j| format!("x{j}")).collect(),
        })
    }

    pub fn from_columns(columns: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) || names.len() != columns.len() {
            return Err(Error::InvalidInput("inconsistent design columns".into()));
        }
        let cols = columns.len();
        Ok(Self {
            rows,
            cols,
            data: columns.into_iter().flatten().collect(),
            names,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::InvalidInput("column name count mismatch".into()));
        }
        self.names = names;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    /// `X * beta`.
    pub fn mul_vec(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, b) in beta.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(self.column(j)) {
                *o += b * x;
            }
        }
        out
    }

    /// True when some column is a nonzero constant, i.e. the model has an intercept.
    pub fn has_constant_column(&self) -> bool {
        (0..self.cols).any(|j| {
            let c = self.column(j);
            c[0] != 0.0 && c.iter().all(|v| *v == c[0])
        })
    }
}

/// Relative threshold on `|R_jj|` below which a column counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Least-squares solution from a Householder QR factorization.
#[derive(Debug, Clone)]
pub struct QrSolution {
    pub beta: Vec<f64>,
    /// Upper-triangular `k x k` factor, row-major.
    r: Vec<f64>,
    k: usize,
}

impl QrSolution {
    /// Diagonal of `(R^T R)^{-1} = (X^T X)^{-1}`.
    pub fn unscaled_variances(&self) -> Vec<f64> {
        let k = self.k;
        let r = |i: usize, j: usize| self.r[i * k + j];
        // R^{-1} by back substitution, one column at a time.
        let mut inv = vec![0.0; k * k];
        for col in 0..k {
            for i in (0..=col).rev() {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for m in i + 1..=col {
                    s -= r(i, m) * inv[m * k + col];
                }
                inv[i * k + col] = s / r(i, i);
            }
        }
        (0..k)
            .map(|i| (i..k).map(|j| inv[i * k + j].powi(2)).sum())
            .collect()
    }
}

/// Solves `min ||X beta - y||` without forming normal equations.
pub fn householder_lstsq(x: &Matrix, y: &[f64]) -> Result<QrSolution> {
    let (n, k) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::InsufficientRows { n, k });
    }
    let mut a = x.data.clone();
    let mut qty = y.to_vec();
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let col = &a[j * n..(j + 1) * n];
        let norm = col[j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[j] = 0.0;
            continue;
        }
        let alpha = if col[j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            diag[j] = alpha;
            continue;
        }
        // H = I - 2 v v^T / (v^T v), applied to the trailing columns and y
        for c in j..k {
            let cc = &mut a[c * n + j..(c + 1) * n];
            let s = 2.0 * dot(&v, cc) / vnorm2;
            cc.iter_mut().zip(&v).for_each(|(t, vi)| *t -= s * vi);
        }
        let s = 2.0 * dot(&v, &qty[j..]) / vnorm2;
        qty[j..].iter_mut().zip(&v).for_each(|(t, vi)| *t -= s * vi);
        diag[j] = a[j * n + j];
    }

    let largest = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if let Some(j) = diag
        .iter()
        .position(|d| !(d.abs() > RANK_TOLERANCE * largest))
    {
        return Err(Error::RankDeficient {
            column: x.names()[j].clone(),
        });
    }

    let mut r = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            r[i * k + j] = a[j * n + i];
        }
    }
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for j in i + 1..k {
            s -= r[i * k + j] * beta[j];
        }
        beta[i] = s / r[i * k + i];
    }
    Ok(QrSolution { beta, r, k })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
