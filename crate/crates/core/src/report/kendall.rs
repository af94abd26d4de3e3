//! Kendall rank correlation between two score vectors.

use crate::error::{Error, Result};

/// Kendall's tau-a over all pairs; ties contribute zero. Requires at least
/// two entries and matching lengths.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::validation("rank correlation needs equal-length inputs"));
    }
    if a.len() < 2 {
        return Err(Error::validation("rank correlation needs at least two entries"));
    }
    let n = a.len();
    let mut num = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            let s = (da * db).partial_cmp(&0.0);
            match s {
                Some(std::cmp::Ordering::Greater) => num += 1,
                Some(std::cmp::Ordering::Less) => num -= 1,
                _ => {}
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(num as f64 / pairs)
}
