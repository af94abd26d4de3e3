//! Point-set transforms that provably leave RBF similarity matrices
//! unchanged: affine maps, constant concatenation, and duplication.

use crate::error::{Error, Result};
use ndarray::Array2;

#[derive(Debug, Clone, PartialEq)]
pub enum InvarianceKind {
    /// v -> a * v + b applied coordinate-wise; requires a != 0.
    Affine { a: f64, b: f64 },
    /// Appends the constant vector to every point.
    ConcatConstant(Vec<f64>),
    /// Every point becomes [v || v].
    Duplicate,
}

pub fn invariance_transform(points: &Array2<f64>, kind: &InvarianceKind) -> Result<Array2<f64>> {
    match kind {
        InvarianceKind::Affine { a, b } => {
            if *a == 0.0 {
                return Err(Error::validation("affine scale must be nonzero"));
            }
            Ok(points.mapv(|v| a * v + b))
        }
        InvarianceKind::ConcatConstant(c) => {
            let (n, d) = points.dim();
            let mut out = Array2::<f64>::zeros((n, d + c.len()));
            for i in 0..n {
                for j in 0..d {
                    out[[i, j]] = points[[i, j]];
                }
                for (j, &v) in c.iter().enumerate() {
                    out[[i, d + j]] = v;
                }
            }
            Ok(out)
        }
        InvarianceKind::Duplicate => {
            let (n, d) = points.dim();
            let mut out = Array2::<f64>::zeros((n, 2 * d));
            for i in 0..n {
                for j in 0..d {
                    out[[i, j]] = points[[i, j]];
                    out[[i, d + j]] = points[[i, j]];
                }
            }
            Ok(out)
        }
    }
}
