//! Gromov-Wasserstein discrepancy between raw event windows and their
//! dense representations: kernel construction, the entropic solver, a
//! brute-force oracle and batched evaluation.

mod batch;
mod embed;
mod invariance;
mod kernel;
mod oracle;
mod solver;

pub use batch::{gwd_batch, gwd_sample, subsample_event_points, BatchReport, PerSample, SampleGwd};
pub use embed::{embed_features, FeaturePointSet};
pub use invariance::{invariance_transform, InvarianceKind};
pub use kernel::{kl_distortion, similarity_matrix, KernelParams};
pub use oracle::brute_force_gw;
pub use solver::{solve_gw, GwdResult, TransportPlan};

use serde::{Deserialize, Serialize};

/// Entropic solver and per-sample evaluation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Entropic regularization weight.
    pub epsilon: f64,
    /// Max projected-gradient outer iterations.
    pub outer_max: usize,
    /// Max Sinkhorn iterations per outer step.
    pub sinkhorn_max: usize,
    /// Relative objective change declaring convergence.
    pub tol: f64,
    /// Max events per sample; larger samples are uniformly subsampled.
    pub event_cap: usize,
    /// Subsampling RNG seed.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 5e-3,
            outer_max: 200,
            sinkhorn_max: 500,
            tol: 1e-7,
            event_cap: 2000,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        if !(self.epsilon > 0.0)
            || self.outer_max == 0
            || self.sinkhorn_max == 0
            || !(self.tol > 0.0 && self.tol < 1.0)
            || self.event_cap == 0
        {
            return Err(crate::error::Error::validation(
                "solver config fields must be positive and tol < 1",
            ));
        }
        Ok(())
    }
}
