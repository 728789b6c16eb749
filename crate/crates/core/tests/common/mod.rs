//! Independent oracles and instance generators shared by the integration
//! tests and the acceptance harness.

#![allow(dead_code)]

use cbo_core::gradients::{build_hessian, GradientMatrix};
use cbo_core::Hessian;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with entries uniform in [-1, 1].
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Hessian {
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            e[i * n + j] = v;
            e[j * n + i] = v;
        }
    }
    Hessian::from_dense(n, e).unwrap()
}

/// Gradient-outer-product Hessian from `samples` Gaussian-ish gradient rows.
pub fn random_gradient_hessian(rng: &mut ChaCha8Rng, n: usize, samples: usize) -> Hessian {
    let rows: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(-1.0..1.0) + rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    build_hessian(&GradientMatrix::from_rows(&rows).unwrap())
}

/// All M-subsets of 0..N in lexicographic order, by plain recursion.
pub fn all_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// x^T H x over the full indicator vector.
pub fn quadratic_form(h: &Hessian, x: &[bool]) -> f64 {
    let n = h.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if x[i] && x[j] {
                s += h.get(i, j);
            }
        }
    }
    s
}

pub fn indicator(n: usize, removed: &[usize]) -> Vec<bool> {
    let mut x = vec![false; n];
    for &i in removed {
        x[i] = true;
    }
    x
}

/// Materializes every feasible configuration, sorts by energy with the
/// band rule, and keeps the first `k`.
pub fn naive_topk(h: &Hessian, m: usize, k: usize, tol: f64) -> Vec<(Vec<usize>, f64)> {
    let n = h.n();
    let mut all: Vec<(Vec<usize>, f64)> = all_subsets(n, m)
        .into_iter()
        .map(|s| {
            let e = quadratic_form(h, &indicator(n, &s));
            (s, e)
        })
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = Vec::with_capacity(all.len());
    let mut start = 0;
    while start < all.len() {
        let anchor = all[start].1;
        let mut end = start + 1;
        while end < all.len() && all[end].1 - anchor <= tol * anchor.abs().max(1.0) {
            end += 1;
        }
        let mut band = all[start..end].to_vec();
        band.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(band);
        start = end;
    }
    out.truncate(k);
    out
}

pub fn binomial(n: usize, m: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    if m > n {
        0
    } else {
        row[m]
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}
