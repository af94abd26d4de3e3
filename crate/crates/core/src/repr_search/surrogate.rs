//! One-hot ridge-regression surrogate used by the budgeted proposal
//! strategy: predicts a candidate's batched GWD from its categorical
//! triple and ranks unexplored candidates by predicted score.

use super::{CandidateEval, CandidateSpace};
use crate::representations::ChannelSpec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

const RIDGE_LAMBDA: f64 = 1e-3;

fn one_hot(space: &CandidateSpace, c: &ChannelSpec) -> Vec<f64> {
    let nw = space.windows.len();
    let nm = space.measurements.len();
    let na = space.aggregations.len();
    let mut x = vec![0.0; nw + nm + na + 1];
    if let Some(i) = space.windows.iter().position(|w| w == &c.window) {
        x[i] = 1.0;
    }
    if let Some(i) = space.measurements.iter().position(|m| m == &c.measurement) {
        x[nw + i] = 1.0;
    }
    if let Some(i) = space.aggregations.iter().position(|a| a == &c.aggregation) {
        x[nw + nm + i] = 1.0;
    }
    *x.last_mut().unwrap() = 1.0; // bias
    x
}

/// Solves (X^T X + lambda I) w = X^T y by Gaussian elimination.
fn ridge_fit(xs: &[Vec<f64>], ys: &[f64]) -> Vec<f64> {
    let d = xs[0].len();
    let mut a = vec![vec![0.0; d + 1]; d];
    for (x, &y) in xs.iter().zip(ys) {
        for i in 0..d {
            for j in 0..d {
                a[i][j] += x[i] * x[j];
            }
            a[i][d] += x[i] * y;
        }
    }
    for i in 0..d {
        a[i][i] += RIDGE_LAMBDA;
    }
    // Elimination with partial pivoting.
    for col in 0..d {
        let pivot = (col..d).max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()).unwrap();
        a.swap(col, pivot);
        let pv = a[col][col];
        if pv.abs() < 1e-12 {
            continue;
        }
        for row in 0..d {
            if row == col {
                continue;
            }
            let factor = a[row][col] / pv;
            for j in col..=d {
                a[row][j] -= factor * a[col][j];
            }
        }
    }
    (0..d).map(|i| if a[i][i].abs() < 1e-12 { 0.0 } else { a[i][d] / a[i][i] }).collect()
}

/// Pool sorted by predicted score ascending; prediction ties break by a
/// seeded shuffle so the ordering stays deterministic.
pub fn rank_candidates(
    space: &CandidateSpace,
    evals: &[CandidateEval],
    pool: &[ChannelSpec],
    seed: u64,
) -> Vec<ChannelSpec> {
    let scored: Vec<(&CandidateEval, f64)> =
        evals.iter().filter_map(|e| e.score.map(|s| (e, s))).collect();
    if scored.is_empty() {
        return pool.to_vec();
    }
    let xs: Vec<Vec<f64>> = scored.iter().map(|(e, _)| one_hot(space, &e.candidate)).collect();
    let ys: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
    let w = ridge_fit(&xs, &ys);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut rng);
    let mut ranked: Vec<(usize, f64)> = pool
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let x = one_hot(space, c);
            let pred: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            (i, pred)
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap()
            .then_with(|| order[a.0].cmp(&order[b.0]))
    });
    ranked.into_iter().map(|(i, _)| pool[i]).collect()
}
