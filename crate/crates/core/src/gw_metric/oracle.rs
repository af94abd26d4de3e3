//! Brute-force verification oracle: dense grid search over the coupling
//! polytope, scoring each feasible plan with the literal quadruple sum.

use crate::error::{Error, Result};
use ndarray::Array2;

const MAX_CELLS: usize = 16;
const MAX_COMBOS: f64 = 5e7;
const FEAS_TOL: f64 = 1e-9;

/// Minimal objective over a dense grid of couplings with uniform marginals.
/// The free parameters are the cells T_ij with i < n-1, j < m-1; the last
/// row and column are completed from the marginal constraints and
/// infeasible completions are rejected. `resolution` is the number of grid
/// steps per free parameter.
pub fn brute_force_gw(ce: &Array2<f64>, cf: &Array2<f64>, resolution: usize) -> Result<f64> {
    let n = ce.nrows();
    let m = cf.nrows();
    if ce.ncols() != n || cf.ncols() != m || n == 0 || m == 0 {
        return Err(Error::validation("oracle inputs must be square and non-empty"));
    }
    if n * m > MAX_CELLS {
        return Err(Error::validation(format!(
            "oracle limited to n*m <= {MAX_CELLS}, got {n}x{m}"
        )));
    }
    if resolution == 0 {
        return Err(Error::validation("oracle resolution must be positive"));
    }
    let free = (n - 1) * (m - 1);
    if ((resolution + 1) as f64).powi(free as i32) > MAX_COMBOS {
        return Err(Error::validation("oracle resolution too fine for this instance"));
    }

    let p = 1.0 / n as f64;
    let q = 1.0 / m as f64;
    if free == 0 {
        // Unique coupling: the product of marginals.
        let t = Array2::from_elem((n, m), p * q);
        return Ok(literal_objective(ce, cf, &t));
    }

    let mut t = Array2::<f64>::zeros((n, m));
    let mut best = f64::INFINITY;
    let cell_max = p.min(q);
    let stack_fill = |t: &mut Array2<f64>, best: &mut f64| {
        fill_cell(ce, cf, t, 0, n, m, p, q, cell_max, resolution, best);
    };
    stack_fill(&mut t, &mut best);
    if best.is_infinite() {
        return Err(Error::Numerical {
            iterations: 0,
            msg: "oracle found no feasible coupling on the grid".into(),
        });
    }
    Ok(best)
}

/// Recursive enumeration over the free cells in row-major order; each
/// completed assignment is finished by the marginal constraints.
#[allow(clippy::too_many_arguments)]
fn fill_cell(
    ce: &Array2<f64>,
    cf: &Array2<f64>,
    t: &mut Array2<f64>,
    cell: usize,
    n: usize,
    m: usize,
    p: f64,
    q: f64,
    cell_max: f64,
    resolution: usize,
    best: &mut f64,
) {
    let free_cols = m - 1;
    if cell == (n - 1) * free_cols {
        if complete(t, n, m, p, q) {
            let obj = literal_objective(ce, cf, t);
            if obj < *best {
                *best = obj;
            }
        }
        return;
    }
    let i = cell / free_cols;
    let j = cell % free_cols;
    for step in 0..=resolution {
        let v = cell_max * step as f64 / resolution as f64;
        // Partial row/column feasibility prune.
        let row_used: f64 = (0..j).map(|jj| t[[i, jj]]).sum();
        let col_used: f64 = (0..i).map(|ii| t[[ii, j]]).sum();
        if row_used + v > p + FEAS_TOL || col_used + v > q + FEAS_TOL {
            break;
        }
        t[[i, j]] = v;
        fill_cell(ce, cf, t, cell + 1, n, m, p, q, cell_max, resolution, best);
    }
    t[[i, j]] = 0.0;
}

/// Fills the last column and row from the marginals; false if infeasible.
fn complete(t: &mut Array2<f64>, n: usize, m: usize, p: f64, q: f64) -> bool {
    for i in 0..n - 1 {
        let used: f64 = (0..m - 1).map(|j| t[[i, j]]).sum();
        let rest = p - used;
        if rest < -FEAS_TOL {
            return false;
        }
        t[[i, m - 1]] = rest.max(0.0);
    }
    let mut last_row_total = 0.0;
    for j in 0..m {
        let used: f64 = (0..n - 1).map(|i| t[[i, j]]).sum();
        let rest = q - used;
        if rest < -FEAS_TOL {
            return false;
        }
        t[[n - 1, j]] = rest.max(0.0);
        last_row_total += t[[n - 1, j]];
    }
    (last_row_total - p).abs() <= 1e-6
}

/// The quadruple sum with KL distortion, evaluated naively.
pub(crate) fn literal_objective(ce: &Array2<f64>, cf: &Array2<f64>, t: &Array2<f64>) -> f64 {
    let n = ce.nrows();
    let m = cf.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            let tij = t[[i, j]];
            if tij == 0.0 {
                continue;
            }
            for k in 0..n {
                let a = ce[[i, k]];
                let la = a.ln();
                for l in 0..m {
                    let tkl = t[[k, l]];
                    if tkl == 0.0 {
                        continue;
                    }
                    let b = cf[[j, l]];
                    total += tij * tkl * (a * (la - b.ln()) - a + b);
                }
            }
        }
    }
    total
}
