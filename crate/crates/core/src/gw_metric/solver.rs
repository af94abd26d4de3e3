//! Entropic projected-gradient solver for the Gromov-Wasserstein
//! discrepancy with KL distortion.
//!
//! Each outer step linearizes the quadratic objective into a cost matrix
//! and projects onto the uniform-marginal polytope with a log-stabilized
//! Sinkhorn loop. The generalized KL loss
//! L(a, b) = a log a - a log b - a + b splits into marginal-constant terms
//! and a coupling term, so the linearized cost is
//! cost(T)_ij = (1/n) sum_k Ce_ik log Ce_ik - (Ce T log Cf)_ij up to
//! constants absorbed by the Sinkhorn potentials; the reported objective
//! is the literal quadruple sum of the full loss evaluated on T.

use crate::error::{Error, Result};
use crate::gw_metric::SolverConfig;
use ndarray::{Array1, Array2};

/// Coupling between n events and m features with uniform marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    values: Array2<f64>,
}

impl TransportPlan {
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Max deviation of row sums from 1/n and column sums from 1/m.
    pub fn marginal_violation(&self) -> f64 {
        let (n, m) = self.values.dim();
        let rows = self.values.sum_axis(ndarray::Axis(1));
        let cols = self.values.sum_axis(ndarray::Axis(0));
        let r = rows.iter().map(|s| (s - 1.0 / n as f64).abs()).fold(0.0, f64::max);
        let c = cols.iter().map(|s| (s - 1.0 / m as f64).abs()).fold(0.0, f64::max);
        r.max(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwdResult {
    /// The discrepancy value on the returned plan.
    pub objective: f64,
    pub plan: TransportPlan,
    /// Outer iterations used.
    pub iterations: usize,
    pub converged: bool,
    pub marginal_violation: f64,
}

fn validate_similarity(c: &Array2<f64>, name: &str) -> Result<()> {
    let (r, cols) = c.dim();
    if r != cols {
        return Err(Error::validation(format!("{name} must be square, got {r}x{cols}")));
    }
    for i in 0..r {
        for j in 0..i {
            if (c[[i, j]] - c[[j, i]]).abs() > 1e-9 {
                return Err(Error::validation(format!("{name} is not symmetric at ({i}, {j})")));
            }
        }
    }
    if c.iter().any(|&v| !(v > 0.0) || v > 1.0 + 1e-12) {
        return Err(Error::validation(format!("{name} entries must lie in (0, 1]")));
    }
    Ok(())
}

/// Scaling-form Sinkhorn with absorption into log-domain potentials.
/// `alpha`/`beta` are warm-started dual potentials, updated in place.
fn sinkhorn(
    cost: &Array2<f64>,
    eps: f64,
    max_iters: usize,
    alpha: &mut Array1<f64>,
    beta: &mut Array1<f64>,
) -> Result<Array2<f64>> {
    let (n, m) = cost.dim();
    let p = 1.0 / n as f64;
    let q = 1.0 / m as f64;
    let build_kernel = |alpha: &Array1<f64>, beta: &Array1<f64>| {
        let mut k = Array2::<f64>::zeros((n, m));
        for i in 0..n {
            for j in 0..m {
                k[[i, j]] = ((alpha[i] + beta[j] - cost[[i, j]]) / eps).exp();
            }
        }
        k
    };
    let mut kernel = build_kernel(alpha, beta);
    let mut u = Array1::<f64>::ones(n);
    let mut v = Array1::<f64>::ones(m);
    const ABSORB: f64 = 1e100;
    for iter in 0..max_iters {
        let kv = kernel.dot(&v);
        for i in 0..n {
            if kv[i] <= 0.0 || !kv[i].is_finite() {
                return Err(Error::Numerical {
                    iterations: iter,
                    msg: "sinkhorn underflow in row scaling".into(),
                });
            }
            u[i] = p / kv[i];
        }
        let ktu = kernel.t().dot(&u);
        for j in 0..m {
            if ktu[j] <= 0.0 || !ktu[j].is_finite() {
                return Err(Error::Numerical {
                    iterations: iter,
                    msg: "sinkhorn underflow in column scaling".into(),
                });
            }
            v[j] = q / ktu[j];
        }
        let extreme = u.iter().chain(v.iter()).any(|&s| s > ABSORB || s < 1.0 / ABSORB);
        if extreme {
            for i in 0..n {
                alpha[i] += eps * u[i].ln();
                u[i] = 1.0;
            }
            for j in 0..m {
                beta[j] += eps * v[j].ln();
                v[j] = 1.0;
            }
            kernel = build_kernel(alpha, beta);
            continue;
        }
        // Column marginals are exact after the v update; stop when rows
        // agree too.
        let kv = kernel.dot(&v);
        let row_err = (0..n).map(|i| (u[i] * kv[i] - p).abs()).fold(0.0, f64::max);
        if row_err < 1e-9 {
            break;
        }
    }
    for i in 0..n {
        alpha[i] += eps * u[i].ln();
    }
    for j in 0..m {
        beta[j] += eps * v[j].ln();
    }
    let mut t = Array2::<f64>::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            t[[i, j]] = ((alpha[i] + beta[j] - cost[[i, j]]) / eps).exp();
        }
    }
    if t.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical {
            iterations: max_iters,
            msg: "non-finite transport plan".into(),
        });
    }
    Ok(t)
}

/// Cells at or below which the solver hedges the non-convex outer loop
/// with extra deterministic restarts; such instances solve in microseconds.
const MULTISTART_MAX_CELLS: usize = 64;
const MULTISTART_RESTARTS: usize = 15;

/// Minimizes the KL-distortion transport objective between two similarity
/// matrices. Deterministic: the restart inits come from a fixed seed.
pub fn solve_gw(ce: &Array2<f64>, cf: &Array2<f64>, cfg: &SolverConfig) -> Result<GwdResult> {
    cfg.validate()?;
    validate_similarity(ce, "event similarity matrix")?;
    validate_similarity(cf, "feature similarity matrix")?;
    let n = ce.nrows();
    let m = cf.nrows();
    let mut best = solve_gw_from(ce, cf, cfg, band_init(n, m), true)?;
    if n * m <= MULTISTART_MAX_CELLS {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x6077);
        for _ in 0..MULTISTART_RESTARTS {
            let mut t = Array2::<f64>::from_shape_fn((n, m), |_| rng.random_range(0.5..1.5));
            let total = t.sum();
            t.mapv_inplace(|v| v / total);
            // Restarts anneal from a much lower smoothing than the main
            // pass so distinct inits can settle into distinct basins
            // instead of being funneled into one.
            let r = solve_gw_from(ce, cf, cfg, t, false)?;
            if r.objective < best.objective {
                best = r;
            }
        }
    }
    Ok(best)
}

/// Start near the product coupling, which is a stationary point of the
/// outer loop (on symmetric instances the first linearized cost is
/// constant and Sinkhorn returns the product coupling verbatim). A tiny
/// deterministic band toward index-aligned matching breaks that tie
/// without affecting non-degenerate instances.
fn band_init(n: usize, m: usize) -> Array2<f64> {
    let mut t = Array2::<f64>::from_shape_fn((n, m), |(i, j)| {
        let d = (i as f64 + 0.5) / n as f64 - (j as f64 + 0.5) / m as f64;
        1.0 + 1e-3 * (-d * d / 0.02).exp()
    });
    let total = t.sum();
    t.mapv_inplace(|v| v / total);
    t
}

fn solve_gw_from(
    ce: &Array2<f64>,
    cf: &Array2<f64>,
    cfg: &SolverConfig,
    init: Array2<f64>,
    anneal: bool,
) -> Result<GwdResult> {
    let n = ce.nrows();
    let m = cf.nrows();

    let log_cf = cf.mapv(f64::ln);
    // a log a term of the tensorized KL loss.
    let ce_log_ce = ce.mapv(|a| a * a.ln());
    let row_const = ce_log_ce.sum_axis(ndarray::Axis(1)) / n as f64;

    let cost_of = |t: &Array2<f64>| -> Array2<f64> {
        let mut cost = ce.dot(t).dot(&log_cf);
        cost.mapv_inplace(|v| -v);
        for i in 0..n {
            let rc = row_const[i];
            cost.row_mut(i).mapv_inplace(|v| v + rc);
        }
        cost
    };

    let mut t = init;
    let mut alpha = Array1::<f64>::zeros(n);
    let mut beta = Array1::<f64>::zeros(m);
    let mut prev_obj = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    // Annealed regularization: early outer steps use a heavier entropy
    // smoothing, halved each iteration until the configured epsilon is
    // reached. The smoothed early landscape steers the non-convex outer
    // loop into a consistent basin before the final sharpening, which
    // keeps objectives comparable across near-identical instances.
    const ANNEAL_START: f64 = 0.1;
    const ANNEAL_START_RESTART: f64 = 5e-3;
    for iter in 1..=cfg.outer_max {
        iterations = iter;
        let start = if anneal { ANNEAL_START } else { ANNEAL_START_RESTART };
        let eps = (start * 0.5f64.powi(iter as i32 - 1)).max(cfg.epsilon);
        let cost = cost_of(&t);
        let obj = (&cost * &t).sum();
        if eps <= cfg.epsilon
            && prev_obj.is_finite()
            && (obj - prev_obj).abs() <= cfg.tol * prev_obj.abs().max(1e-12)
        {
            converged = true;
            break;
        }
        prev_obj = obj;
        t = sinkhorn(&cost, eps, cfg.sinkhorn_max, &mut alpha, &mut beta).map_err(
            |e| match e {
                Error::Numerical { iterations: inner, msg } => Error::Numerical {
                    iterations: inner,
                    msg: format!("outer iteration {iter}: {msg}"),
                },
                other => other,
            },
        )?;
    }

    // Reported objective: the literal quadruple sum on the returned plan,
    // using its actual marginals for the constant terms. The -a and +b
    // parts of the loss reduce to quadratic forms in the row and column
    // marginals.
    let rows = t.sum_axis(ndarray::Axis(1));
    let cols = t.sum_axis(ndarray::Axis(0));
    let const_term = rows.dot(&ce_log_ce.dot(&rows));
    let minus_a = rows.dot(&ce.dot(&rows));
    let plus_b = cols.dot(&cf.dot(&cols));
    let coupling_term = (&t * &ce.dot(&t).dot(&log_cf)).sum();
    let objective = const_term - coupling_term - minus_a + plus_b;
    if !objective.is_finite() {
        return Err(Error::Numerical { iterations, msg: "non-finite objective".into() });
    }

    let plan = TransportPlan { values: t };
    let marginal_violation = plan.marginal_violation();
    Ok(GwdResult { objective, plan, iterations, converged, marginal_violation })
}
