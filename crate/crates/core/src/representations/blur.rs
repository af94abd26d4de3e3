//! Separable per-channel Gaussian blur with reflect-padded borders.

use super::grid::FeatureGrid;
use crate::error::{Error, Result};

/// Kernel radius ceil(3 sigma); sigma = 0 returns the grid unchanged.
pub fn gaussian_blur(grid: &FeatureGrid, sigma: f64) -> Result<FeatureGrid> {
    if sigma < 0.0 {
        return Err(Error::validation("blur sigma must be non-negative"));
    }
    if sigma == 0.0 {
        return Ok(grid.clone());
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for i in -radius..=radius {
        kernel.push((-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= norm;
    }

    let (w, h, n_c) = (grid.width() as i64, grid.height() as i64, grid.n_c());
    let reflect = |i: i64, n: i64| -> usize {
        // Symmetric reflection (border sample mirrored too); this fold is a
        // partition of the infinite extension, so channel mass is conserved.
        let period = 2 * n;
        let m = i.rem_euclid(period);
        (if m < n { m } else { period - 1 - m }) as usize
    };

    let mut tmp = grid.clone();
    // Horizontal pass.
    for y in 0..h as usize {
        for x in 0..w {
            for c in 0..n_c {
                let mut acc = 0.0;
                for (ki, k) in kernel.iter().enumerate() {
                    let sx = reflect(x + ki as i64 - radius, w);
                    acc += k * grid.get(sx, y, c);
                }
                tmp.set(x as usize, y, c, acc);
            }
        }
    }
    // Vertical pass.
    let mut out = grid.clone();
    for y in 0..h {
        for x in 0..w as usize {
            for c in 0..n_c {
                let mut acc = 0.0;
                for (ki, k) in kernel.iter().enumerate() {
                    let sy = reflect(y + ki as i64 - radius, h);
                    acc += k * tmp.get(x, sy, c);
                }
                out.set(x, y as usize, c, acc);
            }
        }
    }
    Ok(out)
}
