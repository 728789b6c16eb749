//! Penalized QUBO and Ising reformulations of the constrained program.
//!
//! `xᵀHx` subject to `Σx = M` becomes the unconstrained objective
//! `xᵀHx + λ(Σx − M)²`, which is then rewritten with spins `s = 1 − 2x`.
//! Feasible configurations are exactly the spin states of magnetization
//! `N − 2M`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Configuration, Hessian, SYMMETRY_TOL};
use crate::textfmt::{self, Lines};

const QUBO_MAGIC: &str = "QUBO-1";
const ISING_MAGIC: &str = "ISING-1";

/// Objective `xᵀQx + constant` over `x ∈ {0,1}ᴺ`. Linear terms live on the
/// diagonal since `xᵢ² = xᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    quadratic: Vec<f64>,
    constant: f64,
}

impl QuboInstance {
    pub fn new(n: usize, quadratic: Vec<f64>, constant: f64) -> Result<Self> {
        if quadratic.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} quadratic coefficients, got {}",
                n * n,
                quadratic.len()
            )));
        }
        if let Some(pos) = quadratic.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        if !constant.is_finite() {
            return Err(Error::InvalidArgument("constant must be finite".into()));
        }
        check_symmetric(n, &quadratic)?;
        Ok(QuboInstance {
            n,
            quadratic,
            constant,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quadratic(&self) -> &[f64] {
        &self.quadratic
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.quadratic[i * self.n + j]
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn objective(&self, x: &[bool]) -> f64 {
        assert_eq!(x.len(), self.n, "assignment length");
        let mut total = 0.0;
        for i in (0..self.n).filter(|&i| x[i]) {
            for j in (0..self.n).filter(|&j| x[j]) {
                total += self.q(i, j);
            }
        }
        total + self.constant
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = textfmt::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub(crate) fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut lines = Lines::new(path, text);
        let (hl, header) = lines.next_line("QUBO-1 header")?;
        let n = textfmt::parse_header(path, hl, header, QUBO_MAGIC, 1)?[0];
        let mut quadratic = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        let mut constant = None;
        while let Some((ln, line)) = lines.next() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["c", v] => {
                    if constant.is_some() {
                        return Err(Error::parse(path, ln, "duplicate constant line"));
                    }
                    constant = Some(textfmt::parse_finite(path, ln, v)?);
                }
                [a, b, v] => {
                    let i = textfmt::parse_index(path, ln, a, n)?;
                    let j = textfmt::parse_index(path, ln, b, n)?;
                    let (i, j) = (i.min(j), i.max(j));
                    let v = textfmt::parse_finite(path, ln, v)?;
                    if std::mem::replace(&mut seen[i * n + j], true) {
                        return Err(Error::parse(
                            path,
                            ln,
                            format!("duplicate entry ({i}, {j})"),
                        ));
                    }
                    if i == j {
                        quadratic[i * n + i] = v;
                    } else {
                        quadratic[i * n + j] = v / 2.0;
                        quadratic[j * n + i] = v / 2.0;
                    }
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        ln,
                        "expected `c <value>` or `<i> <j> <value>`",
                    ))
                }
            }
        }
        let constant = constant.ok_or_else(|| Error::parse(path, hl, "missing constant line"))?;
        Self::new(n, quadratic, constant).map_err(|e| Error::parse(path, hl, e.to_string()))
    }

    /// QUBO-1 text: header, constant, then one `<i> <j> <value>` line per
    /// nonzero upper-triangle coefficient. Off-diagonal values are the full
    /// coefficient of `xᵢxⱼ`, i.e. `Q[i][j] + Q[j][i]`.
    pub fn to_qubo1_string(&self) -> String {
        let n = self.n;
        let mut out = format!("{QUBO_MAGIC} {n}\nc {}\n", self.constant);
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    self.q(i, i)
                } else {
                    self.q(i, j) + self.q(j, i)
                };
                if v != 0.0 {
                    let _ = writeln!(out, "{i} {j} {v}");
                }
            }
        }
        out
    }
}

/// Objective `sᵀJs + hᵀs + offset` over `s ∈ {−1,+1}ᴺ`, with `J` symmetric
/// and zero on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    h: Vec<f64>,
    j: Vec<f64>,
    offset: f64,
}

impl IsingInstance {
    pub fn new(n: usize, h: Vec<f64>, j: Vec<f64>, offset: f64) -> Result<Self> {
        if h.len() != n || j.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "ising instance with {n} spins needs {n} fields and {} couplings",
                n * n
            )));
        }
        if h.iter().chain(&j).any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidArgument(
                "ising coefficients must be finite".into(),
            ));
        }
        if let Some(i) = (0..n).find(|&i| j[i * n + i] != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coupling J[{i}][{i}] must be zero"
            )));
        }
        check_symmetric(n, &j)?;
        Ok(IsingInstance { n, h, j, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &[f64] {
        &self.j
    }

    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.j[i * self.n + j]
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn objective(&self, s: &[i8]) -> f64 {
        assert_eq!(s.len(), self.n, "assignment length");
        let mut total = 0.0;
        for i in 0..self.n {
            let row = &self.j[i * self.n..(i + 1) * self.n];
            let acc: f64 = row.iter().zip(s).map(|(c, &sj)| c * f64::from(sj)).sum();
            total += f64::from(s[i]) * acc + self.h[i] * f64::from(s[i]);
        }
        total + self.offset
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = textfmt::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub(crate) fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut lines = Lines::new(path, text);
        let (hl, header) = lines.next_line("ISING-1 header")?;
        let n = textfmt::parse_header(path, hl, header, ISING_MAGIC, 1)?[0];
        let mut h = vec![0.0; n];
        let mut j = vec![0.0; n * n];
        let mut seen_h = vec![false; n];
        let mut seen_j = vec![false; n * n];
        let mut offset = None;
        while let Some((ln, line)) = lines.next() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["c", v] => {
                    if offset.is_some() {
                        return Err(Error::parse(path, ln, "duplicate offset line"));
                    }
                    offset = Some(textfmt::parse_finite(path, ln, v)?);
                }
                ["h", a, v] => {
                    let i = textfmt::parse_index(path, ln, a, n)?;
                    if std::mem::replace(&mut seen_h[i], true) {
                        return Err(Error::parse(
                            path,
                            ln,
                            format!("duplicate field for spin {i}"),
                        ));
                    }
                    h[i] = textfmt::parse_finite(path, ln, v)?;
                }
                ["J", a, b, v] => {
                    let a = textfmt::parse_index(path, ln, a, n)?;
                    let b = textfmt::parse_index(path, ln, b, n)?;
                    if a == b {
                        return Err(Error::parse(path, ln, "couplings must join distinct spins"));
                    }
                    let (a, b) = (a.min(b), a.max(b));
                    if std::mem::replace(&mut seen_j[a * n + b], true) {
                        return Err(Error::parse(
                            path,
                            ln,
                            format!("duplicate coupling ({a}, {b})"),
                        ));
                    }
                    let v = textfmt::parse_finite(path, ln, v)?;
                    j[a * n + b] = v / 2.0;
                    j[b * n + a] = v / 2.0;
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        ln,
                        "expected `c <value>`, `h <i> <value>` or `J <i> <j> <value>`",
                    ))
                }
            }
        }
        let offset = offset.ok_or_else(|| Error::parse(path, hl, "missing offset line"))?;
        Self::new(n, h, j, offset).map_err(|e| Error::parse(path, hl, e.to_string()))
    }

    /// ISING-1 text: header, `c <offset>`, nonzero `h <i> <value>` lines, and
    /// `J <i> <j> <value>` lines for `i < j` carrying the full coefficient of
    /// `sᵢsⱼ`, i.e. `J[i][j] + J[j][i]`.
    pub fn to_ising1_string(&self) -> String {
        let n = self.n;
        let mut out = format!("{ISING_MAGIC} {n}\nc {}\n", self.offset);
        for (i, v) in self.h.iter().enumerate() {
            if *v != 0.0 {
                let _ = writeln!(out, "h {i} {v}");
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.coupling(i, j) + self.coupling(j, i);
                if v != 0.0 {
                    let _ = writeln!(out, "J {i} {j} {v}");
                }
            }
        }
        out
    }
}

fn check_symmetric(n: usize, m: &[f64]) -> Result<()> {
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let tol = SYMMETRY_TOL * scale;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (m[i * n + j] - m[j * n + i]).abs();
            if diff > tol {
                return Err(Error::NotSymmetric { i, j, diff, tol });
            }
        }
    }
    Ok(())
}

/// `λ = 1 + 4·N·max|H|`.
///
/// A single bit flip changes `xᵀHx` by at most `(2N + 1)·max|H|`, while
/// moving one step toward cardinality `M` lowers the penalty by at least
/// `λ`. Every infeasible point therefore has a strictly better neighbour, so
/// all local and global minimizers of the penalized objective are feasible.
pub fn default_penalty(h: &Hessian) -> f64 {
    1.0 + 4.0 * h.n() as f64 * h.max_abs()
}

/// Encodes `xᵀHx + λ(Σx − M)²` as a QUBO. `H` is symmetrized first.
pub fn to_qubo(h: &Hessian, m: usize, lambda: f64) -> Result<QuboInstance> {
    let n = h.n();
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "cardinality must satisfy 1 <= M < N, got M = {m}, N = {n}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "penalty weight must be positive, got {lambda}"
        )));
    }
    let mf = m as f64;
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = if i == j {
                h.get(i, i) + lambda * (1.0 - 2.0 * mf)
            } else {
                0.5 * (h.get(i, j) + h.get(j, i)) + lambda
            };
        }
    }
    QuboInstance::new(n, q, lambda * mf * mf)
}

/// Rewrites a QUBO in spins via `xᵢ = (1 − sᵢ)/2`; both objectives agree on
/// every assignment.
pub fn to_ising(q: &QuboInstance) -> IsingInstance {
    let n = q.n();
    let mut h = vec![0.0; n];
    let mut j = vec![0.0; n * n];
    let mut offset = q.constant();
    for a in 0..n {
        let qaa = q.q(a, a);
        offset += qaa / 2.0;
        h[a] -= qaa / 2.0;
        for b in 0..n {
            if a == b {
                continue;
            }
            // Q_ab x_a x_b = Q_ab (1 - s_a - s_b + s_a s_b) / 4
            let qab = q.q(a, b);
            offset += qab / 4.0;
            h[a] -= qab / 4.0;
            h[b] -= qab / 4.0;
            j[a * n + b] += qab / 8.0;
            j[b * n + a] += qab / 8.0;
        }
    }
    IsingInstance { n, h, j, offset }
}

/// Spin image `sᵢ = 1 − 2xᵢ` of a configuration.
pub fn spins_of(config: &Configuration) -> Vec<i8> {
    config
        .indicator()
        .into_iter()
        .map(|x| if x { -1 } else { 1 })
        .collect()
}

pub fn magnetization(spins: &[i8]) -> i64 {
    spins.iter().map(|&s| i64::from(s)).sum()
}

/// Writes a QUBO-1 file.
pub fn export_qubo(q: &QuboInstance, path: impl AsRef<Path>) -> Result<()> {
    textfmt::write_string(path.as_ref(), &q.to_qubo1_string())
}

/// Writes an ISING-1 file.
pub fn export_ising(s: &IsingInstance, path: impl AsRef<Path>) -> Result<()> {
    textfmt::write_string(path.as_ref(), &s.to_ising1_string())
}
