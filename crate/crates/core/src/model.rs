//! Shared numeric types and the energy functional `xᵀHx`.
//!
//! A [`Configuration`] is the set of blocks marked for removal, i.e. the
//! support of the binary vector `x`. With every gate starting at one, the
//! gate perturbation of a removal is exactly `-x`, so the second-order loss
//! change is proportional to `xᵀHx` and that is the quantity every solver
//! in this crate minimizes.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textfmt::{self, Lines};

/// Relative tolerance used when none is given: two energies `a <= b` are
/// degenerate iff `b - a <= tol * max(1, |a|)`.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Relative symmetry tolerance applied on construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

const HESS_MAGIC: &str = "HESS-1";

/// Dense, symmetric `N×N` proxy Hessian stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian {
    n: usize,
    entries: Vec<f64>,
}

impl Hessian {
    /// Builds a Hessian from row-major entries, rejecting non-finite values
    /// and asymmetry beyond `1e-12 * max(1, max|H|)`.
    pub fn from_dense(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "hessian must have at least one block".into(),
            ));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} hessian, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        let h = Hessian { n, entries };
        h.check_symmetric()?;
        Ok(h)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Self::from_dense(n, rows.concat())
    }

    /// Constructor for callers that build an exactly symmetric matrix by
    /// mirroring, such as the gradient outer product.
    pub(crate) fn from_symmetric_unchecked(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Hessian { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = *d;
        }
        Hessian { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Hessian {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Number of blocks `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.n).fold(0.0, |m, i| m.max(self.get(i, i).abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_dense(self.n, self.entries.iter().map(|v| v * c).collect())
    }

    pub fn transposed(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Hessian { n, entries }
    }

    fn check_symmetric(&self) -> Result<()> {
        let tol = SYMMETRY_TOL * self.max_abs().max(1.0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let diff = (self.get(i, j) - self.get(j, i)).abs();
                if diff > tol {
                    return Err(Error::NotSymmetric { i, j, diff, tol });
                }
            }
        }
        Ok(())
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi rotation. Intended
    /// for the `N <= 128` regime of this crate.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig = jacobi_eigenvalues(self.n, self.entries.clone());
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// Checks positive semidefiniteness: the smallest eigenvalue must be at
    /// least `-1e-8 * trace(H)`.
    pub fn check_psd(&self) -> Result<()> {
        let min = self.eigenvalues()[0];
        let floor = -1e-8 * self.trace().abs();
        if min < floor {
            return Err(Error::InvalidArgument(format!(
                "hessian is not positive semidefinite: smallest eigenvalue {min:e} < {floor:e}"
            )));
        }
        Ok(())
    }

    /// Reads a HESS-1 file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = textfmt::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub(crate) fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut lines = Lines::new(path, text);
        let (hl, header) = lines.next_line("HESS-1 header")?;
        let n = textfmt::parse_header(path, hl, header, HESS_MAGIC, 1)?[0];
        if n == 0 {
            return Err(Error::parse(path, hl, "block count must be positive"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (ln, line) = lines.next_line("a matrix row")?;
            entries.extend(textfmt::parse_row(path, ln, line, n)?);
        }
        lines.expect_end()?;
        Self::from_dense(n, entries).map_err(|e| Error::parse(path, hl, e.to_string()))
    }

    pub fn to_hess1_string(&self) -> String {
        let mut out = format!("{HESS_MAGIC} {}\n", self.n);
        textfmt::format_rows(&mut out, self.n, &self.entries);
        out
    }

    /// Writes a HESS-1 file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        textfmt::write_string(path.as_ref(), &self.to_hess1_string())
    }
}

fn jacobi_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
    let frob: f64 = a.iter().map(|v| v * v).sum();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= 1e-30 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// A set of block indices marked for removal, kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    removed: Vec<usize>,
}

impl Configuration {
    /// `removed` must be strictly increasing with every index below `n`.
    pub fn new(n: usize, removed: Vec<usize>) -> Result<Self> {
        if let Some(w) = removed.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfiguration(format!(
                "removed indices must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = removed.last() {
            if last >= n {
                return Err(Error::InvalidConfiguration(format!(
                    "index {last} out of range for {n} blocks"
                )));
            }
        }
        Ok(Configuration { n, removed })
    }

    /// Sorts the indices first; duplicates are still rejected.
    pub fn from_unsorted(n: usize, mut removed: Vec<usize>) -> Result<Self> {
        removed.sort_unstable();
        Self::new(n, removed)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, removed: Vec<usize>) -> Self {
        debug_assert!(removed.windows(2).all(|w| w[0] < w[1]));
        Configuration { n, removed }
    }

    pub fn from_indicator(x: &[bool]) -> Self {
        let removed = x
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i)
            .collect();
        Configuration {
            n: x.len(),
            removed,
        }
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut x = vec![false; self.n];
        for &i in &self.removed {
            x[i] = true;
        }
        x
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cardinality `M`.
    pub fn len(&self) -> usize {
        self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn removed(&self) -> &[usize] {
        &self.removed
    }

    pub fn contains(&self, i: usize) -> bool {
        self.removed.binary_search(&i).is_ok()
    }

    /// The configuration obtained by exchanging a removed block for a kept one.
    pub fn swapped(&self, out_idx: usize, in_idx: usize) -> Result<Self> {
        self.check_swap(out_idx, in_idx)?;
        let mut removed: Vec<usize> = self
            .removed
            .iter()
            .copied()
            .filter(|&k| k != out_idx)
            .collect();
        let pos = removed.partition_point(|&k| k < in_idx);
        removed.insert(pos, in_idx);
        Ok(Configuration { n: self.n, removed })
    }

    fn check_swap(&self, out_idx: usize, in_idx: usize) -> Result<()> {
        if !self.contains(out_idx) {
            return Err(Error::InvalidSwap(format!(
                "block {out_idx} is not removed"
            )));
        }
        if in_idx >= self.n {
            return Err(Error::InvalidSwap(format!(
                "block {in_idx} out of range for {} blocks",
                self.n
            )));
        }
        if self.contains(in_idx) {
            return Err(Error::InvalidSwap(format!(
                "block {in_idx} is already removed"
            )));
        }
        Ok(())
    }

    /// Size of the symmetric difference of the removed sets.
    pub fn hamming(&self, other: &Configuration) -> usize {
        let (a, b) = (&self.removed, &other.removed);
        let (mut i, mut j, mut common) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        a.len() + b.len() - 2 * common
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order of the removed-index sequences.
impl Ord for Configuration {
    fn cmp(&self, other: &Self) -> Ordering {
        self.removed.cmp(&other.removed).then(self.n.cmp(&other.n))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.removed)
    }
}

/// `Σ_{i∈S} Σ_{j∈S} H[i][j]` with outer `i` and inner `j` ascending.
#[inline]
pub fn energy_of(h: &Hessian, removed: &[usize]) -> f64 {
    let mut total = 0.0;
    for &i in removed {
        let row = h.row(i);
        let mut acc = 0.0;
        for &j in removed {
            acc += row[j];
        }
        total += acc;
    }
    total
}

/// Energy `xᵀHx` of a configuration.
pub fn energy(h: &Hessian, config: &Configuration) -> Result<f64> {
    if config.n() != h.n() {
        return Err(Error::DimensionMismatch {
            hessian: h.n(),
            config: config.n(),
        });
    }
    Ok(energy_of(h, config.removed()))
}

/// Energy change of swapping `out_idx` (removed) for `in_idx` (kept), in
/// `O(M)`. Relies on the symmetry of `h`.
#[inline]
pub fn swap_delta_of(h: &Hessian, removed: &[usize], out_idx: usize, in_idx: usize) -> f64 {
    let row_in = h.row(in_idx);
    let row_out = h.row(out_idx);
    let mut cross = 0.0;
    for &k in removed {
        if k != out_idx {
            cross += row_in[k] - row_out[k];
        }
    }
    row_in[in_idx] - row_out[out_idx] + 2.0 * cross
}

/// Checked form of [`swap_delta_of`].
pub fn swap_delta(
    h: &Hessian,
    config: &Configuration,
    out_idx: usize,
    in_idx: usize,
) -> Result<f64> {
    if config.n() != h.n() {
        return Err(Error::DimensionMismatch {
            hessian: h.n(),
            config: config.n(),
        });
    }
    config.check_swap(out_idx, in_idx)?;
    Ok(swap_delta_of(h, config.removed(), out_idx, in_idx))
}

/// A feasible configuration together with its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub config: Configuration,
    pub energy: f64,
}

impl Solution {
    /// Evaluates the energy from scratch.
    pub fn evaluate(h: &Hessian, config: Configuration) -> Result<Self> {
        let energy = energy(h, &config)?;
        Ok(Solution { config, energy })
    }
}

/// True when `hi` lies within the degeneracy band anchored at `lo`.
#[inline]
pub fn within_band(tol: f64, lo: f64, hi: f64) -> bool {
    hi - lo <= tol * lo.abs().max(1.0)
}

/// Sorts solutions into canonical spectrum order.
///
/// Solutions are sorted by energy; bands are then formed greedily from the
/// bottom, each anchored at its lowest energy and holding every following
/// energy within the degeneracy tolerance of that anchor. Each band is
/// ordered lexicographically by removed set. The result depends only on the
/// multiset of solutions, not on their input order.
pub fn canonical_sort(solutions: &mut [Solution], tol: f64) {
    solutions.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| a.config.cmp(&b.config))
    });
    if tol <= 0.0 {
        return;
    }
    let mut start = 0;
    while start < solutions.len() {
        let anchor = solutions[start].energy;
        let mut end = start + 1;
        while end < solutions.len() && within_band(tol, anchor, solutions[end].energy) {
            end += 1;
        }
        solutions[start..end].sort_by(|a, b| a.config.cmp(&b.config));
        start = end;
    }
}

/// Energy-ordered list of distinct feasible configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    solutions: Vec<Solution>,
    degeneracy_tol: f64,
}

impl Spectrum {
    /// Deduplicates `candidates` by configuration and sorts them canonically.
    pub fn from_candidates(mut candidates: Vec<Solution>, degeneracy_tol: f64) -> Result<Self> {
        check_tol(degeneracy_tol)?;
        candidates.sort_by(|a, b| a.config.cmp(&b.config));
        candidates.dedup_by(|a, b| a.config == b.config);
        canonical_sort(&mut candidates, degeneracy_tol);
        Ok(Spectrum {
            solutions: candidates,
            degeneracy_tol,
        })
    }

    /// Accepts solutions already in canonical order, validating that claim.
    pub fn from_ordered(solutions: Vec<Solution>, degeneracy_tol: f64) -> Result<Self> {
        check_tol(degeneracy_tol)?;
        let mut seen: Vec<&Configuration> = solutions.iter().map(|s| &s.config).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "spectrum contains duplicate configurations".into(),
            ));
        }
        let mut sorted = solutions.clone();
        canonical_sort(&mut sorted, degeneracy_tol);
        if sorted != solutions {
            return Err(Error::InvalidArgument(
                "solutions are not in canonical energy order".into(),
            ));
        }
        Ok(Spectrum {
            solutions,
            degeneracy_tol,
        })
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn into_solutions(self) -> Vec<Solution> {
        self.solutions
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn ground(&self) -> Option<&Solution> {
        self.solutions.first()
    }

    pub fn truncate(&mut self, k: usize) {
        self.solutions.truncate(k);
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "degeneracy tolerance must be a finite nonnegative number, got {tol}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, r: &[usize]) -> Configuration {
        Configuration::new(n, r.to_vec()).unwrap()
    }

    fn sample3() -> Hessian {
        Hessian::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn energy_identity_and_ones() {
        assert_eq!(
            energy(&Hessian::identity(4), &cfg(4, &[0, 2])).unwrap(),
            2.0
        );
        let ones = Hessian::from_dense(4, vec![1.0; 16]).unwrap();
        assert_eq!(energy(&ones, &cfg(4, &[1, 3])).unwrap(), 4.0);
    }

    #[test]
    fn energy_hand_expanded() {
        let h = sample3();
        let e = energy(&h, &cfg(3, &[1, 2])).unwrap();
        // dense bilinear form over x = (0, 1, 1)
        let x = [0.0, 1.0, 1.0];
        let mut dense = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                dense += x[i] * h.get(i, j) * x[j];
            }
        }
        assert_eq!(e, 2.0);
        assert_eq!(dense, 2.0);
    }

    #[test]
    fn energy_dimension_mismatch_names_both() {
        let err = energy(&Hessian::identity(4), &cfg(5, &[0])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('4') && msg.contains('5'), "{msg}");
    }

    #[test]
    fn swap_delta_examples() {
        let id = Hessian::identity(4);
        assert_eq!(swap_delta(&id, &cfg(4, &[0, 2]), 0, 1).unwrap(), 0.0);
        let d = Hessian::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(swap_delta(&d, &cfg(4, &[0, 1]), 1, 3).unwrap(), 2.0);
    }

    #[test]
    fn swap_delta_rejects_illegal_swaps() {
        let id = Hessian::identity(4);
        let c = cfg(4, &[0, 2]);
        assert!(matches!(
            swap_delta(&id, &c, 1, 3),
            Err(Error::InvalidSwap(_))
        ));
        assert!(matches!(
            swap_delta(&id, &c, 0, 2),
            Err(Error::InvalidSwap(_))
        ));
        assert!(matches!(
            swap_delta(&id, &c, 0, 9),
            Err(Error::InvalidSwap(_))
        ));
    }

    #[test]
    fn configuration_validation() {
        assert!(Configuration::new(4, vec![0, 0]).is_err());
        assert!(Configuration::new(4, vec![2, 1]).is_err());
        assert!(Configuration::new(4, vec![4]).is_err());
        assert_eq!(
            Configuration::from_unsorted(4, vec![3, 1])
                .unwrap()
                .removed(),
            &[1, 3]
        );
        let c = cfg(5, &[1, 4]);
        assert_eq!(Configuration::from_indicator(&c.indicator()), c);
        assert_eq!(c.swapped(4, 0).unwrap().removed(), &[0, 1]);
    }

    #[test]
    fn hamming_distance() {
        assert_eq!(cfg(6, &[0, 1, 2]).hamming(&cfg(6, &[3, 4, 5])), 6);
        assert_eq!(cfg(6, &[0, 1, 2]).hamming(&cfg(6, &[0, 1, 3])), 2);
        assert_eq!(cfg(6, &[0, 1, 2]).hamming(&cfg(6, &[0, 1, 2])), 0);
    }

    #[test]
    fn rejects_asymmetric_and_nonfinite() {
        assert!(matches!(
            Hessian::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            Hessian::from_rows(&[vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        // within tolerance
        assert!(Hessian::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-13, 1.0]]).is_ok());
    }

    #[test]
    fn eigenvalues_known_cases() {
        let h = Hessian::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = h.eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
        let e = Hessian::diagonal(&[3.0, -1.0, 2.0]).eigenvalues();
        assert_eq!(e, vec![-1.0, 2.0, 3.0]);
        assert!(Hessian::diagonal(&[3.0, -1.0, 2.0]).check_psd().is_err());
        assert!(sample3().check_psd().is_ok());
    }

    #[test]
    fn hess1_round_trip_and_rejection() {
        let h = sample3();
        let text = h.to_hess1_string();
        assert!(text.starts_with("HESS-1 3\n"));
        let back = Hessian::parse(Path::new("x"), &text).unwrap();
        assert_eq!(back, h);

        let bad = "HESS-1 2\n1 2\n3 1\n";
        let err = Hessian::parse(Path::new("bad.hess"), bad).unwrap_err();
        assert!(err.to_string().contains("not symmetric"), "{err}");

        let short = "HESS-1 2\n1 2\n2\n";
        let err = Hessian::parse(Path::new("short.hess"), short).unwrap_err();
        assert!(err.to_string().contains("short.hess:3"), "{err}");

        assert!(Hessian::parse(Path::new("x"), "HESS-2 2\n1 0\n0 1\n").is_err());
        assert!(Hessian::parse(Path::new("x"), "HESS-1 1\ninf\n").is_err());
        assert!(Hessian::parse(Path::new("x"), "HESS-1 1\n1\n1\n").is_err());
    }

    #[test]
    fn canonical_sort_bands_are_lexicographic() {
        let mk = |r: &[usize], e: f64| Solution {
            config: cfg(5, r),
            energy: e,
        };
        let mut v = vec![
            mk(&[1, 2], 5.0),
            mk(&[0, 3], 5.0 + 1e-12),
            mk(&[0, 1], 3.0),
            mk(&[0, 2], 4.0),
        ];
        canonical_sort(&mut v, DEFAULT_DEGENERACY_TOL);
        let order: Vec<_> = v.iter().map(|s| s.config.removed().to_vec()).collect();
        assert_eq!(order, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2]]);

        // with zero tolerance the strict energy order wins
        canonical_sort(&mut v, 0.0);
        assert_eq!(v[2].config.removed(), &[1, 2]);
    }

    #[test]
    fn spectrum_dedups_and_validates_order() {
        let mk = |r: &[usize], e: f64| Solution {
            config: cfg(4, r),
            energy: e,
        };
        let s = Spectrum::from_candidates(
            vec![mk(&[0, 1], 1.0), mk(&[0, 1], 1.0), mk(&[2, 3], 0.5)],
            0.0,
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.ground().unwrap().config.removed(), &[2, 3]);
        assert!(Spectrum::from_ordered(vec![mk(&[0, 1], 1.0), mk(&[2, 3], 0.5)], 0.0).is_err());
        assert!(Spectrum::from_ordered(vec![mk(&[0, 1], 1.0), mk(&[0, 1], 1.0)], 0.0).is_err());
        assert!(Spectrum::from_candidates(vec![], -1.0).is_err());
    }
}
