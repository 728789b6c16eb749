//! Exhaustive enumeration of all `C(N, M)` feasible configurations.
//!
//! The search space is split into partitions that fix a short prefix of the
//! smallest removed indices. Inside a partition the remaining indices are
//! walked in revolving-door order, so consecutive configurations differ by a
//! single swap and the running energy is updated with [`swap_delta_of`] in
//! `O(M)` per step.
//!
//! Top-K retention never discards a configuration that could appear in the
//! global top K: a candidate is dropped only once K other configurations are
//! known to precede it in canonical spectrum order, whichever degeneracy
//! bands end up forming. The final merge therefore sees the same top K no
//! matter how partitions were scheduled across threads, and reported
//! energies are always recomputed from scratch.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    canonical_sort, energy_of, swap_delta_of, Configuration, Hessian, Solution, Spectrum,
};

/// Swaps between from-scratch re-evaluations of the running energy.
pub const REANCHOR_INTERVAL: u64 = 100_000;

/// Largest relative degeneracy tolerance the exact solver accepts.
pub const MAX_DEGENERACY_TOL: f64 = 0.5;

/// Exact binomial coefficient `C(n, m)`.
pub fn count_feasible(n: usize, m: usize) -> Result<BigUint> {
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "cannot choose {m} of {n} blocks"
        )));
    }
    let k = m.min(n - m);
    let mut c = BigUint::from(1u32);
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    Ok(c)
}

/// Refuses work when `C(n, m)` exceeds `limit`.
pub fn enforce_guard(n: usize, m: usize, limit: &BigUint) -> Result<()> {
    let count = count_feasible(n, m)?;
    if &count > limit {
        return Err(Error::ResourceGuard {
            n,
            m,
            count: count.to_string(),
            limit: limit.to_string(),
        });
    }
    Ok(())
}

/// One step of a revolving-door walk: `out` leaves, `inn` enters, and the
/// sorted positions `lo..=hi` (0-based) of the current subset changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct DoorMove {
    pub out: usize,
    pub inn: usize,
    pub lo: usize,
    pub hi: usize,
}

/// Revolving-door (minimal change) walk over the `t`-subsets of `0..s`,
/// following Knuth's Algorithm R (TAOCP 7.2.1.3). Requires `1 <= t < s`.
pub(crate) struct RevolvingDoor {
    t: usize,
    // 1-based: c[1..=t] is the subset, c[t + 1] = s is a sentinel.
    c: Vec<usize>,
    done: bool,
}

impl RevolvingDoor {
    pub(crate) fn new(s: usize, t: usize) -> Self {
        assert!(
            t >= 1 && t < s,
            "revolving door needs 1 <= t < s (t = {t}, s = {s})"
        );
        let mut c = vec![0; t + 2];
        for (j, slot) in c.iter_mut().enumerate().take(t + 1).skip(1) {
            *slot = j - 1;
        }
        c[t + 1] = s;
        RevolvingDoor { t, c, done: false }
    }

    /// The current subset, ascending.
    pub(crate) fn current(&self) -> &[usize] {
        &self.c[1..=self.t]
    }

    pub(crate) fn advance(&mut self) -> Option<DoorMove> {
        if self.done {
            return None;
        }
        let t = self.t;
        let c = &mut self.c;

        if t == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                return Some(DoorMove {
                    out: c[1] - 1,
                    inn: c[1],
                    lo: 0,
                    hi: 0,
                });
            }
            self.done = true;
            return None;
        }

        let mut j = 2;
        let mut try_decrease;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                return Some(DoorMove {
                    out: c[1] - 1,
                    inn: c[1],
                    lo: 0,
                    hi: 0,
                });
            }
            try_decrease = true;
        } else {
            if c[1] > 0 {
                c[1] -= 1;
                return Some(DoorMove {
                    out: c[1] + 1,
                    inn: c[1],
                    lo: 0,
                    hi: 0,
                });
            }
            try_decrease = false;
        }

        loop {
            if try_decrease {
                // c[j] == c[j - 1] + 1 here
                if c[j] >= j {
                    let out = c[j];
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    return Some(DoorMove {
                        out,
                        inn: j - 2,
                        lo: j - 2,
                        hi: j - 1,
                    });
                }
                j += 1;
                if j > t {
                    break;
                }
            }
            // c[j - 1] == j - 2 here
            if c[j] + 1 < c[j + 1] {
                let out = c[j - 1];
                c[j - 1] = c[j];
                c[j] += 1;
                return Some(DoorMove {
                    out,
                    inn: c[j],
                    lo: j - 2,
                    hi: j - 1,
                });
            }
            j += 1;
            if j > t {
                break;
            }
            try_decrease = true;
        }
        self.done = true;
        None
    }
}

/// Walks every configuration extending `prefix` with `m - prefix.len()`
/// indices above its last element, in revolving-door order. Energies are
/// maintained incrementally and re-anchored every [`REANCHOR_INTERVAL`] swaps.
fn walk_partition<F>(h: &Hessian, m: usize, prefix: &[usize], mut visit: F)
where
    F: FnMut(&[usize], f64),
{
    let n = h.n();
    let base = prefix.last().map_or(0, |&p| p + 1);
    let s = n - base;
    let t = m - prefix.len();

    let mut set: Vec<usize> = prefix.to_vec();
    set.extend(base..base + t);
    let mut e = energy_of(h, &set);
    visit(&set, e);
    if t == 0 || t == s {
        return;
    }

    let off = prefix.len();
    let mut door = RevolvingDoor::new(s, t);
    let mut since_anchor = 0u64;
    while let Some(mv) = door.advance() {
        e += swap_delta_of(h, &set, base + mv.out, base + mv.inn);
        let cur = door.current();
        for p in mv.lo..=mv.hi {
            set[off + p] = base + cur[p];
        }
        since_anchor += 1;
        if since_anchor == REANCHOR_INTERVAL {
            e = energy_of(h, &set);
            since_anchor = 0;
        }
        visit(&set, e);
    }
}

/// Visits every `M`-subset exactly once in a single revolving-door sequence,
/// passing the ascending removed indices and the incrementally maintained
/// energy.
pub fn enumerate_incremental<F>(h: &Hessian, m: usize, visit: F) -> Result<()>
where
    F: FnMut(&[usize], f64),
{
    check_cardinality(h.n(), m)?;
    walk_partition(h, m, &[], visit);
    Ok(())
}

fn check_cardinality(n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "cardinality must satisfy 1 <= M < N, got M = {m}, N = {n}"
        )));
    }
    Ok(())
}

/// Prefix length used to split the search space: the shortest (at most 3)
/// for which no partition holds more than 1/64 of all configurations.
fn partition_depth(n: usize, m: usize) -> usize {
    let total = count_feasible(n, m).expect("m < n");
    let max_d = (m - 1).min(3);
    for d in 1..=max_d {
        let largest = count_feasible(n - d, m - d).expect("m - d <= n - d");
        if largest * 64u32 <= total {
            return d;
        }
    }
    max_d
}

/// All ascending prefixes of length `depth` that admit a completion to `m`
/// indices below `n`, in lexicographic order.
fn partition_prefixes(n: usize, m: usize, depth: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, depth: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == depth {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(0, |&p| p + 1);
        // leave room for the m - len - 1 indices that must follow
        let end = n - (m - cur.len() - 1);
        for i in start..end {
            cur.push(i);
            rec(n, m, depth, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, depth, &mut Vec::with_capacity(depth), &mut out);
    out
}

#[derive(Debug, Clone)]
struct Candidate {
    energy: f64,
    removed: Vec<usize>,
}

/// Bounded collector of the lowest-energy configurations.
///
/// `y` definitely precedes `x` when `e_y < e_x - gap(e_x)` (so `y` is in a
/// strictly lower degeneracy band) or when `e_y <= e_x` and `y` is
/// lexicographically smaller. A candidate with K definite predecessors can
/// never reach the top K and is dropped.
struct TopK {
    k: usize,
    tol: f64,
    drift: f64,
    ceiling: f64,
    cap: usize,
    buf: Vec<Candidate>,
}

impl TopK {
    fn new(k: usize, tol: f64, drift: f64) -> Self {
        let cap = (2 * k).max(256);
        TopK {
            k,
            tol,
            drift,
            ceiling: f64::INFINITY,
            cap,
            buf: Vec::with_capacity(cap),
        }
    }

    #[inline]
    fn gap(&self, e: f64) -> f64 {
        4.0 * self.tol * e.abs().max(1.0)
    }

    /// `approx` may carry incremental drift; the stored energy is exact.
    #[inline]
    fn offer(&mut self, h: &Hessian, removed: &[usize], approx: f64) {
        let lower = approx - self.drift;
        if lower - 4.0 * self.tol * (approx.abs() + self.drift).max(1.0) > self.ceiling {
            return;
        }
        let energy = energy_of(h, removed);
        self.insert(Candidate {
            energy,
            removed: removed.to_vec(),
        });
    }

    fn insert(&mut self, c: Candidate) {
        if c.energy - self.gap(c.energy) > self.ceiling {
            return;
        }
        self.buf.push(c);
        if self.buf.len() >= self.cap {
            self.prune();
            self.cap = (2 * self.buf.len()).max(2 * self.k).max(256);
        }
    }

    fn prune(&mut self) {
        self.buf.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.removed.cmp(&b.removed))
        });
        let k = self.k;
        let keep: Vec<bool> = (0..self.buf.len())
            .map(|x| {
                let ex = self.buf[x].energy;
                let below = ex - self.gap(ex);
                let mut count = self.buf[..x].partition_point(|y| y.energy < below);
                if count >= k {
                    return false;
                }
                for y in &self.buf[count..x] {
                    // sorted, so e_y <= e_x for every y before x
                    if y.removed < self.buf[x].removed {
                        count += 1;
                        if count >= k {
                            return false;
                        }
                    }
                }
                true
            })
            .collect();
        let mut flags = keep.into_iter();
        self.buf.retain(|_| flags.next().unwrap_or(false));
        if self.buf.len() >= k {
            self.ceiling = self.buf[k - 1].energy;
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        for c in other.buf {
            self.insert(c);
        }
        self
    }
}

/// Parameters for [`solve_topk`].
#[derive(Debug, Clone)]
pub struct ExactSolveRequest<'a> {
    pub hessian: &'a Hessian,
    /// Cardinality `M`, `1 <= M < N`.
    pub m: usize,
    /// Spectrum size.
    pub k: usize,
    pub degeneracy_tol: f64,
    pub threads: usize,
}

impl<'a> ExactSolveRequest<'a> {
    pub fn new(hessian: &'a Hessian, m: usize, k: usize) -> Self {
        ExactSolveRequest {
            hessian,
            m,
            k,
            degeneracy_tol: crate::model::DEFAULT_DEGENERACY_TOL,
            threads: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        check_cardinality(self.hessian.n(), self.m)?;
        if self.k == 0 {
            return Err(Error::InvalidArgument(
                "spectrum size K must be at least 1".into(),
            ));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument(
                "thread count must be positive".into(),
            ));
        }
        if !(self.degeneracy_tol >= 0.0 && self.degeneracy_tol < MAX_DEGENERACY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "degeneracy tolerance must lie in [0, {MAX_DEGENERACY_TOL}), got {}",
                self.degeneracy_tol
            )));
        }
        Ok(())
    }
}

/// The `min(K, C(N, M))` lowest-energy configurations in canonical order.
/// The result does not depend on `threads`.
pub fn solve_topk(req: &ExactSolveRequest<'_>) -> Result<Spectrum> {
    req.validate()?;
    let h = req.hessian;
    let (n, m, k) = (h.n(), req.m, req.k);
    let tol = req.degeneracy_tol;
    // generous bound on accumulated rounding between re-anchors
    let drift = 1e-8 * ((m + 1) * (m + 1)) as f64 * h.max_abs();

    let prefixes = partition_prefixes(n, m, partition_depth(n, m));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(req.threads)
        .build()
        .map_err(|e| {
            Error::InvalidArgument(format!("cannot start {} worker threads: {e}", req.threads))
        })?;

    let collected = pool.install(|| {
        prefixes
            .par_iter()
            .fold(
                || TopK::new(k, tol, drift),
                |mut acc, prefix| {
                    walk_partition(h, m, prefix, |set, e| acc.offer(h, set, e));
                    acc
                },
            )
            .reduce(|| TopK::new(k, tol, drift), TopK::merge)
    });

    let mut solutions: Vec<Solution> = collected
        .buf
        .into_iter()
        .map(|c| Solution {
            config: Configuration::from_sorted_unchecked(n, c.removed),
            energy: c.energy,
        })
        .collect();
    canonical_sort(&mut solutions, tol);
    solutions.truncate(k);
    Spectrum::from_ordered(solutions, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Hessian;

    fn binom(n: usize, k: usize) -> usize {
        count_feasible(n, k).unwrap().try_into().unwrap()
    }

    #[test]
    fn count_feasible_small() {
        assert_eq!(count_feasible(4, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(count_feasible(9, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(count_feasible(9, 9).unwrap(), BigUint::from(1u32));
        assert!(count_feasible(3, 4).is_err());
    }

    #[test]
    fn revolving_door_is_a_minimal_change_listing() {
        for s in 2..=11 {
            for t in 1..s {
                let mut door = RevolvingDoor::new(s, t);
                let mut seen = std::collections::HashSet::new();
                let mut prev = door.current().to_vec();
                seen.insert(prev.clone());
                while let Some(mv) = door.advance() {
                    let cur = door.current().to_vec();
                    assert!(cur.windows(2).all(|w| w[0] < w[1]), "unsorted {cur:?}");
                    assert!(*cur.last().unwrap() < s);
                    assert!(prev.contains(&mv.out) && !prev.contains(&mv.inn));
                    assert!(cur.contains(&mv.inn) && !cur.contains(&mv.out));
                    let mut expect = prev.clone();
                    expect.retain(|&v| v != mv.out);
                    expect.push(mv.inn);
                    expect.sort_unstable();
                    assert_eq!(expect, cur);
                    // only positions lo..=hi moved
                    for p in 0..t {
                        if p < mv.lo || p > mv.hi {
                            assert_eq!(prev[p], cur[p], "s={s} t={t} move={mv:?}");
                        }
                    }
                    assert!(seen.insert(cur.clone()), "repeat {cur:?}");
                    prev = cur;
                }
                assert_eq!(seen.len(), binom(s, t), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn enumerate_counts_and_single_swaps() {
        let h = Hessian::identity(4);
        let mut visited = Vec::new();
        enumerate_incremental(&h, 2, |s, _| visited.push(s.to_vec())).unwrap();
        assert_eq!(visited.len(), 6);
        visited.sort();
        visited.dedup();
        assert_eq!(visited.len(), 6);

        let h = Hessian::identity(6);
        let mut prev: Option<Vec<usize>> = None;
        enumerate_incremental(&h, 3, |s, _| {
            if let Some(p) = &prev {
                let a = Configuration::new(6, p.clone()).unwrap();
                let b = Configuration::new(6, s.to_vec()).unwrap();
                assert_eq!(a.hamming(&b), 2);
            }
            prev = Some(s.to_vec());
        })
        .unwrap();
    }

    #[test]
    fn enumerate_rejects_bad_cardinality() {
        let h = Hessian::identity(4);
        assert!(enumerate_incremental(&h, 0, |_, _| {}).is_err());
        assert!(enumerate_incremental(&h, 4, |_, _| {}).is_err());
    }

    #[test]
    fn partitions_cover_everything_once() {
        for n in 2..=10 {
            for m in 1..n {
                let h = Hessian::identity(n);
                let mut all = Vec::new();
                for p in partition_prefixes(n, m, partition_depth(n, m)) {
                    walk_partition(&h, m, &p, |s, _| all.push(s.to_vec()));
                }
                let total = all.len();
                all.sort();
                all.dedup();
                assert_eq!(all.len(), total);
                assert_eq!(total, binom(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn diagonal_topk_breaks_ties_lexicographically() {
        let h = Hessian::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let s = solve_topk(&ExactSolveRequest::new(&h, 2, 3)).unwrap();
        let got: Vec<(Vec<usize>, f64)> = s
            .solutions()
            .iter()
            .map(|x| (x.config.removed().to_vec(), x.energy))
            .collect();
        assert_eq!(
            got,
            vec![(vec![0, 1], 3.0), (vec![0, 2], 4.0), (vec![0, 3], 5.0)]
        );
    }

    #[test]
    fn identity_topk_is_first_subsets() {
        let h = Hessian::identity(5);
        let s = solve_topk(&ExactSolveRequest::new(&h, 2, 4)).unwrap();
        let got: Vec<Vec<usize>> = s
            .solutions()
            .iter()
            .map(|x| x.config.removed().to_vec())
            .collect();
        assert_eq!(got, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]]);
        assert!(s.solutions().iter().all(|x| x.energy == 2.0));
    }

    #[test]
    fn topk_larger_than_space_returns_everything() {
        let h = Hessian::identity(4);
        let s = solve_topk(&ExactSolveRequest::new(&h, 2, 100)).unwrap();
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn solve_rejects_invalid_requests() {
        let h = Hessian::identity(4);
        assert!(solve_topk(&ExactSolveRequest::new(&h, 2, 0)).is_err());
        assert!(solve_topk(&ExactSolveRequest::new(&h, 4, 1)).is_err());
        let mut r = ExactSolveRequest::new(&h, 2, 1);
        r.threads = 0;
        assert!(solve_topk(&r).is_err());
        r.threads = 1;
        r.degeneracy_tol = 0.9;
        assert!(solve_topk(&r).is_err());
    }

    #[test]
    fn guard_refuses_large_spaces() {
        let limit = BigUint::from(1_000_000u32);
        assert!(matches!(
            enforce_guard(32, 16, &limit),
            Err(Error::ResourceGuard { .. })
        ));
        assert!(enforce_guard(20, 5, &limit).is_ok());
    }

    #[test]
    fn topk_prune_keeps_lexicographic_head_of_degenerate_block() {
        let mut top = TopK::new(3, 1e-10, 0.0);
        for r in (0..600usize).rev() {
            top.insert(Candidate {
                energy: 1.0,
                removed: vec![r],
            });
        }
        top.prune();
        let kept: Vec<usize> = top.buf.iter().map(|c| c.removed[0]).collect();
        assert_eq!(kept, vec![0, 1, 2]);
    }
}
