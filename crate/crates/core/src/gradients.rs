//! Per-sample gate gradients and the outer-product Hessian `(1/m)·AᵀA`.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Hessian;
use crate::textfmt::{self, Lines};

const GRAD_MAGIC: &str = "GRAD-1";

/// `m×N` matrix whose row `k` is the loss gradient of calibration sample
/// `k` with respect to the block gates, evaluated with every gate at one.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMatrix {
    m: usize,
    n: usize,
    rows: Vec<f64>,
}

impl GradientMatrix {
    pub fn new(m: usize, n: usize, rows: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "gradient matrix needs at least one sample and one block, got {m}x{n}"
            )));
        }
        if rows.len() != m * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {m}x{n} gradient matrix, got {}",
                m * n,
                rows.len()
            )));
        }
        if let Some(pos) = rows.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(GradientMatrix { m, n, rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Self::new(m, n, rows.concat())
    }

    /// Sample count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Block count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.n..(k + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.rows[k * self.n + i]
    }

    pub fn entries(&self) -> &[f64] {
        &self.rows
    }

    /// Rows `range` as a new matrix.
    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.m || range.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "row range {range:?} invalid for {} samples",
                self.m
            )));
        }
        let rows = self.rows[range.start * self.n..range.end * self.n].to_vec();
        Self::new(range.len(), self.n, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = textfmt::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub(crate) fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut lines = Lines::new(path, text);
        let (hl, header) = lines.next_line("GRAD-1 header")?;
        let dims = textfmt::parse_header(path, hl, header, GRAD_MAGIC, 2)?;
        let (m, n) = (dims[0], dims[1]);
        if m == 0 || n == 0 {
            return Err(Error::parse(
                path,
                hl,
                "sample and block counts must be positive",
            ));
        }
        let mut rows = Vec::with_capacity(m * n);
        for _ in 0..m {
            let (ln, line) = lines.next_line("a gradient row")?;
            rows.extend(textfmt::parse_row(path, ln, line, n)?);
        }
        lines.expect_end()?;
        Self::new(m, n, rows)
    }

    pub fn to_grad1_string(&self) -> String {
        let mut out = format!("{GRAD_MAGIC} {} {}\n", self.m, self.n);
        textfmt::format_rows(&mut out, self.n, &self.rows);
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        textfmt::write_string(path.as_ref(), &self.to_grad1_string())
    }
}

/// Builds `H[i][j] = (1/m) Σ_k A[k][i]·A[k][j]`.
///
/// Rows of the upper triangle are computed in parallel, each accumulating
/// over samples in index order, then mirrored; the output is bit-identical
/// to the sequential computation and exactly symmetric.
pub fn build_hessian(a: &GradientMatrix) -> Hessian {
    let (m, n) = (a.m(), a.n());
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0; n - i];
            for k in 0..m {
                let row = a.row(k);
                let ai = row[i];
                for (slot, aj) in acc.iter_mut().zip(&row[i..]) {
                    *slot += ai * aj;
                }
            }
            acc.iter().map(|s| s / m as f64).collect()
        })
        .collect();

    let mut entries = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, v) in row.iter().enumerate() {
            let j = i + off;
            entries[i * n + j] = *v;
            entries[j * n + i] = *v;
        }
    }
    Hessian::from_symmetric_unchecked(n, entries)
}

/// How far the mean gradient is from zero, the condition under which the
/// first-order Taylor term may be dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientDiagnostic {
    pub mean_grad_norm: f64,
    pub per_block_mean: Vec<f64>,
    pub per_block_rms: Vec<f64>,
}

impl GradientDiagnostic {
    /// Ratio of the mean-gradient norm to the RMS gradient norm; near zero
    /// when per-sample gradients mostly cancel.
    pub fn relative_mean_norm(&self) -> f64 {
        let rms_norm = self.per_block_rms.iter().map(|r| r * r).sum::<f64>().sqrt();
        if rms_norm == 0.0 {
            0.0
        } else {
            self.mean_grad_norm / rms_norm
        }
    }
}

pub fn gradient_diagnostic(a: &GradientMatrix) -> GradientDiagnostic {
    let (m, n) = (a.m(), a.n());
    let mut sum = vec![0.0; n];
    let mut sq = vec![0.0; n];
    for k in 0..m {
        for (i, v) in a.row(k).iter().enumerate() {
            sum[i] += v;
            sq[i] += v * v;
        }
    }
    let per_block_mean: Vec<f64> = sum.iter().map(|s| s / m as f64).collect();
    let per_block_rms = sq.iter().map(|s| (s / m as f64).sqrt()).collect();
    let mean_grad_norm = per_block_mean.iter().map(|v| v * v).sum::<f64>().sqrt();
    GradientDiagnostic {
        mean_grad_norm,
        per_block_mean,
        per_block_rms,
    }
}
