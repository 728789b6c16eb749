//! Removal frequencies, pairwise distances and diverse shortlists over a
//! spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Solution, Spectrum};

/// How often each block is removed among the first `spectrum_size`
/// solutions of a spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub n: usize,
    pub counts: Vec<usize>,
    pub spectrum_size: usize,
}

pub fn removal_frequency(spec: &Spectrum, topk: usize) -> Result<FrequencyReport> {
    if topk > spec.len() {
        return Err(Error::InvalidArgument(format!(
            "requested the first {topk} solutions but the spectrum holds {}",
            spec.len()
        )));
    }
    let n = spec.ground().map_or(0, |s| s.config.n());
    let mut counts = vec![0; n];
    for sol in &spec.solutions()[..topk] {
        for &i in sol.config.removed() {
            counts[i] += 1;
        }
    }
    Ok(FrequencyReport {
        n,
        counts,
        spectrum_size: topk,
    })
}

/// Hamming distances between the removal indicators of every pair.
pub fn pairwise_distance(spec: &Spectrum) -> Vec<Vec<usize>> {
    let sols = spec.solutions();
    let mut d = vec![vec![0; sols.len()]; sols.len()];
    for a in 0..sols.len() {
        for b in (a + 1)..sols.len() {
            let v = sols[a].config.hamming(&sols[b].config);
            d[a][b] = v;
            d[b][a] = v;
        }
    }
    d
}

/// Greedy max-min selection starting from the ground state.
///
/// Each round adds the solution whose smallest Hamming distance to the
/// chosen set is largest; ties go to lower energy, then to the
/// lexicographically smaller configuration.
pub fn select_diverse(spec: &Spectrum, k: usize) -> Result<Vec<Solution>> {
    let sols = spec.solutions();
    if k > sols.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot select {k} solutions from a spectrum of {}",
            sols.len()
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut chosen = vec![0usize];
    let mut min_dist: Vec<usize> = sols
        .iter()
        .map(|s| s.config.hamming(&sols[0].config))
        .collect();
    let mut taken = vec![false; sols.len()];
    taken[0] = true;
    while chosen.len() < k {
        let next = (0..sols.len())
            .filter(|&i| !taken[i])
            .min_by(|&a, &b| {
                min_dist[b]
                    .cmp(&min_dist[a])
                    .then(sols[a].energy.total_cmp(&sols[b].energy))
                    .then_with(|| sols[a].config.cmp(&sols[b].config))
            })
            .expect("k <= len leaves a candidate");
        taken[next] = true;
        chosen.push(next);
        for (i, d) in min_dist.iter_mut().enumerate() {
            *d = (*d).min(sols[i].config.hamming(&sols[next].config));
        }
    }
    Ok(chosen.into_iter().map(|i| sols[i].clone()).collect())
}
