//! k-nearest-neighbor relative entropy estimation.
//!
//! For sample sets P (size k, dimension n) and Q, the estimate is
//!
//! ```text
//! D(P||Q) ~ (n/k) * sum_i log(d_i^S / d_i) + log(k / (k-1))
//! ```
//!
//! where `d_i` is the Euclidean distance from the i-th P-point to its r-th
//! nearest neighbor among the *other* P-points and `d_i^S` the distance to
//! the r-th nearest Q-point. The two sample sets must be disjoint draws.
//! Estimates can be negative at finite sample sizes; no clamping happens
//! here.
//!
//! Sample sizes stay in the low thousands at the dimensions used here, so
//! queries are brute force with an O(n) selection, parallelized per query
//! point; the summation order is fixed, keeping results deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SampleMatrix;
use crate::error::{Error, Result};
use crate::Base;

/// Fixed seed for the duplicate-resolving jitter; the estimator carries no
/// RNG of its own, so this keeps it a pure function of its inputs.
const JITTER_SEED: u64 = 0x6b6e6e5f6a697474;

pub fn knn_kl_estimate(
    samples_p: &SampleMatrix,
    samples_q: &SampleMatrix,
    r: usize,
    base: Base,
) -> Result<f64> {
    let dim = samples_p.dim();
    let k = samples_p.count();
    let m = samples_q.count();
    if dim == 0 || k == 0 || m == 0 {
        return Err(Error::Usage("empty sample set".into()));
    }
    // Align Q's rows to P's variable order.
    let q = samples_q
        .restricted(&samples_p.variables().iter().map(String::as_str).collect::<Vec<_>>())?;
    if r == 0 || r >= k || r > m {
        return Err(Error::Usage(format!(
            "neighbor rank r={r} incompatible with sample sizes {k}/{m}"
        )));
    }

    let p_cols = to_columns(samples_p);
    let q_cols = to_columns(&q);
    let (within, across) = rth_distances(&p_cols, &q_cols, r);

    if within.iter().chain(across.iter()).any(|&d| d == 0.0) {
        // Duplicate points: jitter both sets once and retry.
        let p_j = jitter(&p_cols, 0);
        let q_j = jitter(&q_cols, 1);
        let (within, across) = rth_distances(&p_j, &q_j, r);
        if within.iter().chain(across.iter()).any(|&d| d == 0.0) {
            return Err(Error::Numeric("duplicate points persist after jitter".into()));
        }
        return Ok(finish(dim, k, &within, &across, base));
    }
    Ok(finish(dim, k, &within, &across, base))
}

fn finish(dim: usize, k: usize, within: &[f64], across: &[f64], base: Base) -> f64 {
    let sum: f64 = within.iter().zip(across).map(|(&d, &ds)| (ds / d).ln()).sum();
    let nats = dim as f64 / k as f64 * sum + (k as f64 / (k as f64 - 1.0)).ln();
    base.from_nats(nats)
}

fn to_columns(s: &SampleMatrix) -> Vec<Vec<f64>> {
    (0..s.count()).map(|c| s.data().column(c).iter().copied().collect()).collect()
}

/// For each P-point: (r-th NN distance among other P-points,
/// r-th NN distance among Q-points).
fn rth_distances(p: &[Vec<f64>], q: &[Vec<f64>], r: usize) -> (Vec<f64>, Vec<f64>) {
    let pairs: Vec<(f64, f64)> = (0..p.len())
        .into_par_iter()
        .map(|i| {
            let within = rth_smallest(
                p.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| dist_sq(&p[i], x)),
                r,
            );
            let across = rth_smallest(q.iter().map(|x| dist_sq(&p[i], x)), r);
            (within.sqrt(), across.sqrt())
        })
        .collect();
    pairs.into_iter().unzip()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn rth_smallest(iter: impl Iterator<Item = f64>, r: usize) -> f64 {
    let mut v: Vec<f64> = iter.collect();
    debug_assert!(r <= v.len());
    let (_, rth, _) = v.select_nth_unstable_by(r - 1, |a, b| a.total_cmp(b));
    *rth
}

/// Uniform jitter of magnitude 1e-9 per-dimension standard deviation
/// (1e-9 absolute on constant dimensions), used only to break exact
/// duplicates.
fn jitter(cols: &[Vec<f64>], stream: u64) -> Vec<Vec<f64>> {
    let dim = cols[0].len();
    let n = cols.len() as f64;
    let mut scale = vec![0.0f64; dim];
    for d in 0..dim {
        let mean: f64 = cols.iter().map(|c| c[d]).sum::<f64>() / n;
        let var: f64 = cols.iter().map(|c| (c[d] - mean) * (c[d] - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        scale[d] = 1e-9 * if sd > 0.0 { sd } else { 1.0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED ^ stream);
    cols.iter()
        .map(|c| {
            c.iter()
                .zip(&scale)
                .map(|(&v, &s)| v + rng.random_range(-1.0..1.0) * s)
                .collect()
        })
        .collect()
}
