//! Gaussian RBF similarity matrices with data-dependent variance.

use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Bandwidth h.
    pub h: f64,
    /// Floor below which the data-dependent variance is treated as zero
    /// (all points coincident).
    pub epsilon_floor: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { h: 0.7, epsilon_floor: 1e-12 }
    }
}

/// C_ij = exp(-|p_i - p_j|^2 / (2 h^2 sigma^2)) with sigma^2 the mean
/// squared distance over distinct pairs i < j. Coincident point sets
/// (sigma^2 under the floor) yield the all-ones matrix.
pub fn similarity_matrix(points: ArrayView2<'_, f64>, params: &KernelParams) -> Result<Array2<f64>> {
    let n = points.nrows();
    if n == 0 {
        return Err(Error::validation("similarity matrix needs at least one point"));
    }
    if !(params.h > 0.0) {
        return Err(Error::validation("kernel bandwidth must be positive"));
    }
    let mut d2 = Array2::<f64>::zeros((n, n));
    let mut sum = 0.0;
    for i in 0..n {
        let pi = points.row(i);
        for j in (i + 1)..n {
            let d: f64 = pi
                .iter()
                .zip(points.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2[[i, j]] = d;
            d2[[j, i]] = d;
            sum += d;
        }
    }
    if n == 1 {
        return Ok(Array2::from_elem((1, 1), 1.0));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let sigma2 = sum / pairs;
    if sigma2 < params.epsilon_floor {
        return Ok(Array2::from_elem((n, n), 1.0));
    }
    let denom = 2.0 * params.h * params.h * sigma2;
    Ok(d2.mapv(|d| (-d / denom).exp()))
}

/// Generalized KL distortion between two similarity values:
/// a * log(a / b) - a + b. Pointwise non-negative, zero iff a == b, which
/// keeps collapsed feature sets (all-similar, b near 1) from scoring below
/// faithful ones.
pub fn kl_distortion(a: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Numerical {
            iterations: 0,
            msg: format!("kl distortion undefined for b = {b}"),
        });
    }
    Ok(a * (a / b).ln() - a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_points_forced_off_diagonal() {
        let pts = array![[0.0, 0.0], [3.0, 4.0]];
        let c = similarity_matrix(pts.view(), &KernelParams::default()).unwrap();
        // Single pair: its squared distance equals the mean, so the
        // off-diagonal is exp(-1 / (2 * 0.49)).
        let expected = (-1.0_f64 / 0.98).exp();
        assert!((c[[0, 1]] - expected).abs() < 1e-12);
        assert!((expected - 0.3604478).abs() < 1e-6);
        assert_eq!(c[[0, 0]], 1.0);
        assert_eq!(c[[1, 0]], c[[0, 1]]);
    }

    #[test]
    fn single_point_is_unit() {
        let pts = array![[1.0, 2.0, 3.0]];
        let c = similarity_matrix(pts.view(), &KernelParams::default()).unwrap();
        assert_eq!(c, array![[1.0]]);
    }

    #[test]
    fn coincident_points_all_ones() {
        let pts = array![[1.0, 1.0], [1.0, 1.0]];
        let c = similarity_matrix(pts.view(), &KernelParams::default()).unwrap();
        assert_eq!(c, Array2::from_elem((2, 2), 1.0));
    }

    #[test]
    fn entries_in_unit_interval_diag_one() {
        let pts = array![[0.0, 0.0], [1.0, 0.5], [0.3, 2.0], [4.0, 1.0]];
        let c = similarity_matrix(pts.view(), &KernelParams::default()).unwrap();
        for i in 0..4 {
            assert_eq!(c[[i, i]], 1.0);
            for j in 0..4 {
                assert!(c[[i, j]] > 0.0 && c[[i, j]] <= 1.0);
                assert_eq!(c[[i, j]], c[[j, i]]);
            }
        }
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_distortion(1.0, 1.0).unwrap(), 0.0);
        assert!((kl_distortion(1.0, 0.5).unwrap() - (2.0f64.ln() - 0.5)).abs() < 1e-12);
        assert!((kl_distortion(0.5, 1.0).unwrap() - (0.5 * 0.5f64.ln() + 0.5)).abs() < 1e-12);
        assert!(kl_distortion(0.5, 0.0).is_err());
    }

    #[test]
    fn kl_non_negative() {
        for a in [0.01, 0.3, 0.7, 1.0] {
            for b in [0.01, 0.3, 0.7, 1.0] {
                let v = kl_distortion(a, b).unwrap();
                assert!(v >= -1e-15, "kl({a}, {b}) = {v}");
            }
        }
    }
}
