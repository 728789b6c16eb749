//! Swap-move simulated annealing and steepest-descent local search.
//!
//! Every move exchanges one removed block for one kept block, so each
//! configuration visited has exactly `M` removed blocks and no penalty
//! weight is needed.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::REANCHOR_INTERVAL;
use crate::model::{
    energy_of, swap_delta_of, Configuration, Hessian, Solution, Spectrum, DEFAULT_DEGENERACY_TOL,
};

/// Annealing schedule and pool settings.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealConfig {
    pub restarts: usize,
    pub steps_per_restart: usize,
    pub t_initial: f64,
    pub t_final: f64,
    pub seed: u64,
    pub pool_size: usize,
    pub degeneracy_tol: f64,
}

impl AnnealConfig {
    /// 8 restarts of 10⁴ steps, geometric cooling from the largest diagonal
    /// magnitude of `h` down by a factor 10⁶, and a pool of 32.
    pub fn default_for(h: &Hessian) -> Self {
        let t_initial = default_start_temperature(h);
        AnnealConfig {
            restarts: 8,
            steps_per_restart: 10_000,
            t_initial,
            t_final: 1e-6 * t_initial,
            seed: 0,
            pool_size: 32,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }

    /// Per-step factor `c` with `t_final = t_initial · c^steps`.
    pub fn cooling(&self) -> f64 {
        (self.t_final / self.t_initial).powf(1.0 / self.steps_per_restart as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.restarts == 0 || self.steps_per_restart == 0 || self.pool_size == 0 {
            return bad("restarts, steps per restart and pool size must all be positive".into());
        }
        if !(self.t_initial.is_finite() && self.t_initial > 0.0) {
            return bad(format!(
                "initial temperature must be positive, got {}",
                self.t_initial
            ));
        }
        if !(self.t_final > 0.0 && self.t_final < self.t_initial) {
            return bad(format!(
                "final temperature must lie in (0, {}), got {}",
                self.t_initial, self.t_final
            ));
        }
        if !(self.degeneracy_tol >= 0.0 && self.degeneracy_tol.is_finite()) {
            return bad(format!(
                "invalid degeneracy tolerance {}",
                self.degeneracy_tol
            ));
        }
        Ok(())
    }
}

/// Largest diagonal magnitude, falling back to the largest entry and then to
/// one so that the temperature is always positive.
fn default_start_temperature(h: &Hessian) -> f64 {
    [h.max_abs_diagonal(), h.max_abs(), 1.0]
        .into_iter()
        .find(|t| *t > 0.0)
        .unwrap_or(1.0)
}

/// Distinct low-energy configurations seen by one restart, best first.
struct Pool {
    cap: usize,
    entries: Vec<Solution>,
    members: HashSet<Vec<usize>>,
}

impl Pool {
    fn new(cap: usize) -> Self {
        Pool {
            cap,
            entries: Vec::with_capacity(cap + 1),
            members: HashSet::new(),
        }
    }

    fn worst(&self) -> f64 {
        if self.entries.len() < self.cap {
            f64::INFINITY
        } else {
            self.entries.last().map_or(f64::INFINITY, |s| s.energy)
        }
    }

    /// `removed` need not be sorted; the stored energy is recomputed.
    fn offer(&mut self, h: &Hessian, removed: &[usize]) {
        let mut key = removed.to_vec();
        key.sort_unstable();
        if self.members.contains(&key) {
            return;
        }
        let energy = energy_of(h, &key);
        if energy >= self.worst() {
            return;
        }
        let config = Configuration::from_sorted_unchecked(h.n(), key.clone());
        let pos = self.entries.partition_point(|s| {
            s.energy
                .total_cmp(&energy)
                .then_with(|| s.config.cmp(&config))
                .is_lt()
        });
        self.entries.insert(pos, Solution { config, energy });
        self.members.insert(key);
        if self.entries.len() > self.cap {
            if let Some(dropped) = self.entries.pop() {
                self.members.remove(dropped.config.removed());
            }
        }
    }
}

/// Observer invoked with every proposed configuration (unsorted indices).
pub type ProposalObserver<'a> = &'a (dyn Fn(&[usize]) + Sync);

/// Simulated annealing over swap moves; deterministic for a fixed seed.
pub fn anneal(h: &Hessian, m: usize, cfg: &AnnealConfig) -> Result<Spectrum> {
    anneal_observed(h, m, cfg, None)
}

/// [`anneal`] with an optional hook that sees every proposed configuration.
pub fn anneal_observed(
    h: &Hessian,
    m: usize,
    cfg: &AnnealConfig,
    observer: Option<ProposalObserver<'_>>,
) -> Result<Spectrum> {
    let n = h.n();
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "cardinality must satisfy 1 <= M < N, got M = {m}, N = {n}"
        )));
    }
    cfg.validate()?;
    let cooling = cfg.cooling();

    let pools: Vec<Vec<Solution>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(h, m, cfg, cooling, cfg.seed ^ r as u64, observer))
        .collect();

    let mut all: Vec<Solution> = pools.into_iter().flatten().collect();
    all.sort_by(|a, b| a.config.cmp(&b.config));
    all.dedup_by(|a, b| a.config == b.config);
    let mut spectrum = Spectrum::from_candidates(all, cfg.degeneracy_tol)?;
    spectrum.truncate(cfg.pool_size);
    Ok(spectrum)
}

fn run_restart(
    h: &Hessian,
    m: usize,
    cfg: &AnnealConfig,
    cooling: f64,
    seed: u64,
    observer: Option<ProposalObserver<'_>>,
) -> Vec<Solution> {
    let n = h.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut removed: Vec<usize> = sample(&mut rng, n, m).into_vec();
    removed.sort_unstable();
    let mut is_removed = vec![false; n];
    for &i in &removed {
        is_removed[i] = true;
    }
    let mut kept: Vec<usize> = (0..n).filter(|&i| !is_removed[i]).collect();

    let mut pool = Pool::new(cfg.pool_size);
    let mut energy = energy_of(h, &removed);
    pool.offer(h, &removed);
    let mut best = (energy, removed.clone());
    let mut temp = cfg.t_initial;
    let mut proposal = Vec::with_capacity(m);

    let mut accepted: u64 = 0;
    for _ in 0..cfg.steps_per_restart {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..n - m);
        let (out, inn) = (removed[i], kept[j]);
        if let Some(obs) = observer {
            proposal.clear();
            proposal.extend_from_slice(&removed);
            proposal[i] = inn;
            obs(&proposal);
        }
        let delta = swap_delta_of(h, &removed, out, inn);
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp();
        if accept {
            removed[i] = inn;
            kept[j] = out;
            energy += delta;
            accepted += 1;
            if accepted.is_multiple_of(REANCHOR_INTERVAL) {
                energy = energy_of(h, &removed);
            }
            if energy < pool.worst() {
                pool.offer(h, &removed);
            }
            if energy < best.0 {
                best = (energy, removed.clone());
            }
        }
        temp *= cooling;
    }

    // polish both the best and the final state
    for start in [best.1, removed] {
        let config = Configuration::from_unsorted(n, start).expect("annealer keeps a valid subset");
        let polished = descend(h, config, observer);
        pool.offer(h, polished.config.removed());
    }
    pool.entries
}

/// Steepest descent over swaps from `start`: repeatedly applies the most
/// improving swap, ties going to the lexicographically smallest
/// `(out, in)` pair, until no swap improves the energy. The result is
/// 1-swap locally optimal.
pub fn local_search(h: &Hessian, m: usize, start: &Configuration) -> Result<Solution> {
    if start.n() != h.n() {
        return Err(Error::DimensionMismatch {
            hessian: h.n(),
            config: start.n(),
        });
    }
    if start.len() != m {
        return Err(Error::InvalidConfiguration(format!(
            "start removes {} blocks, expected {m}",
            start.len()
        )));
    }
    Ok(descend(h, start.clone(), None))
}

/// Swaps must lower the energy by more than this to count as improving.
pub fn improvement_threshold(energy: f64) -> f64 {
    1e-12 * energy.abs().max(1.0)
}

fn descend(h: &Hessian, start: Configuration, observer: Option<ProposalObserver<'_>>) -> Solution {
    let n = h.n();
    let mut removed = start.removed().to_vec();
    let mut energy = energy_of(h, &removed);
    let mut proposal = Vec::with_capacity(removed.len());
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        let threshold = -improvement_threshold(energy);
        for &out in &removed {
            for inn in (0..n).filter(|i| removed.binary_search(i).is_err()) {
                if let Some(obs) = observer {
                    proposal.clear();
                    proposal.extend(removed.iter().map(|&k| if k == out { inn } else { k }));
                    obs(&proposal);
                }
                let delta = swap_delta_of(h, &removed, out, inn);
                if delta < threshold && best.is_none_or(|(d, _, _)| delta < d) {
                    best = Some((delta, out, inn));
                }
            }
        }
        let Some((_, out, inn)) = best else { break };
        removed.retain(|&k| k != out);
        let pos = removed.partition_point(|&k| k < inn);
        removed.insert(pos, inn);
        energy = energy_of(h, &removed);
    }
    Solution {
        config: Configuration::from_sorted_unchecked(n, removed),
        energy,
    }
}
