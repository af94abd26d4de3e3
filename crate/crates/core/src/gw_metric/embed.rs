//! Grid-to-point-set embedding: sparsification plus normalized pixel
//! position concatenation.

use crate::representations::FeatureGrid;
use ndarray::Array2;

/// Retained feature points, one row per pixel with a nonzero feature
/// vector; each row is [f_0 .. f_{N_c-1}, x/W, y/H].
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePointSet {
    points: Array2<f64>,
}

impl FeaturePointSet {
    pub fn from_points(points: Array2<f64>) -> Self {
        FeaturePointSet { points }
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    /// Number of retained pixels.
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    /// Point dimension D.
    pub fn dim(&self) -> usize {
        self.points.ncols()
    }
}

/// Drops pixels whose feature vector is identically zero and appends the
/// normalized pixel position to the rest.
pub fn embed_features(grid: &FeatureGrid) -> FeaturePointSet {
    let (w, h, n_c) = (grid.width(), grid.height(), grid.n_c());
    let mut rows = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let features = grid.pixel(x, y);
            if features.iter().all(|&v| v == 0.0) {
                continue;
            }
            let mut row = Vec::with_capacity(n_c + 2);
            row.extend_from_slice(features);
            row.push(x as f64 / w as f64);
            row.push(y as f64 / h as f64);
            rows.push(row);
        }
    }
    let m = rows.len();
    let d = n_c + 2;
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    FeaturePointSet { points: Array2::from_shape_vec((m, d), flat).expect("consistent row length") }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_nonzero_pixel() {
        let mut g = FeatureGrid::zeros(2, 2, 1);
        g.set(1, 1, 0, 3.0);
        let pts = embed_features(&g);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts.dim(), 3);
        assert_eq!(pts.points().row(0).to_vec(), vec![3.0, 0.5, 0.5]);
    }

    #[test]
    fn all_zero_grid_empty() {
        let g = FeatureGrid::zeros(4, 4, 2);
        let pts = embed_features(&g);
        assert!(pts.is_empty());
    }

    #[test]
    fn dimensions_and_count() {
        let mut g = FeatureGrid::zeros(4, 4, 3);
        g.set(0, 0, 1, 1.0);
        g.set(2, 3, 0, -2.0);
        let pts = embed_features(&g);
        assert_eq!(pts.len(), 2);
        assert_eq!(pts.dim(), 5);
        // Positions stay inside the unit square.
        for row in pts.points().rows() {
            assert!((0.0..=1.0).contains(&row[3]));
            assert!((0.0..=1.0).contains(&row[4]));
        }
    }
}
