//! Per-sample GWD evaluation and order-independent batch averaging.

use crate::error::{Error, Result};
use crate::event_model::{normalize, NormalizedEvents, Sample};
use crate::gw_metric::{embed_features, similarity_matrix, solve_gw, KernelParams, SolverConfig};
use crate::representations::ReprBuilder;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Normalized 4-D event points, uniformly subsampled (seeded) beyond the
/// cap with their time order preserved.
pub fn subsample_event_points(events: &NormalizedEvents, cap: usize, seed: u64) -> Array2<f64> {
    let n = events.count();
    let take: Vec<usize> = if n > cap {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, n, cap).into_vec();
        idx.sort_unstable();
        idx
    } else {
        (0..n).collect()
    };
    let mut out = Array2::<f64>::zeros((take.len(), 4));
    for (row, &i) in take.iter().enumerate() {
        for d in 0..4 {
            out[[row, d]] = events.points[i][d];
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleGwd {
    pub gwd: f64,
    pub converged: bool,
    pub iterations: usize,
    pub marginal_violation: f64,
}

/// Scores one window: normalized capped events on one side, the embedded
/// sparsified representation on the other.
pub fn gwd_sample(sample: &Sample, builder: &ReprBuilder, cfg: &SolverConfig) -> Result<SampleGwd> {
    cfg.validate()?;
    if sample.events.is_empty() {
        return Err(Error::Degenerate("window contains no events".into()));
    }
    let event_points = subsample_event_points(&normalize(sample), cfg.event_cap, cfg.seed);
    let grid = builder.build(sample)?;
    let features = embed_features(&grid);
    if features.is_empty() {
        return Err(Error::Degenerate("representation has no nonzero feature pixels".into()));
    }
    let params = KernelParams::default();
    let ce = similarity_matrix(event_points.view(), &params)?;
    let cf = similarity_matrix(features.points().view(), &params)?;
    let r = solve_gw(&ce, &cf, cfg)?;
    Ok(SampleGwd {
        gwd: r.objective,
        converged: r.converged,
        iterations: r.iterations,
        marginal_violation: r.marginal_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerSample {
    pub idx: usize,
    pub gwd: f64,
    pub converged: bool,
    pub iters: usize,
}

/// Mean GWD over the first `n` non-degenerate samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub mean: f64,
    pub n: usize,
    pub skipped: usize,
    pub per_sample: Vec<PerSample>,
}

/// Averages per-sample GWD over the first `n` non-degenerate windows.
/// Degenerate windows are skipped and counted. Evaluations run
/// concurrently; results merge by sample index.
pub fn gwd_batch(
    samples: &[Sample],
    builder: &ReprBuilder,
    cfg: &SolverConfig,
    n: usize,
) -> Result<BatchReport> {
    if n == 0 {
        return Err(Error::validation("batch size must be positive"));
    }
    if n > samples.len() {
        return Err(Error::validation(format!(
            "batch size {n} exceeds corpus size {}",
            samples.len()
        )));
    }
    // Degeneracy is cheap to detect (no transport solve), so pick the
    // first n usable windows up front and only solve those.
    let mut chosen = Vec::with_capacity(n);
    let mut skipped = 0usize;
    for (idx, sample) in samples.iter().enumerate() {
        if chosen.len() == n {
            break;
        }
        let degenerate = sample.events.is_empty()
            || builder.build(sample).map(|g| embed_features(&g).is_empty()).unwrap_or(false);
        if degenerate {
            skipped += 1;
        } else {
            chosen.push(idx);
        }
    }
    if chosen.is_empty() {
        return Err(Error::Degenerate("all samples in the batch are degenerate".into()));
    }
    let results: Vec<(usize, Result<SampleGwd>)> = chosen
        .par_iter()
        .map(|&idx| (idx, gwd_sample(&samples[idx], builder, cfg)))
        .collect();
    let mut per_sample = Vec::with_capacity(results.len());
    for (idx, r) in results {
        let s = r?;
        per_sample.push(PerSample { idx, gwd: s.gwd, converged: s.converged, iters: s.iterations });
    }
    let mean = per_sample.iter().map(|s| s.gwd).sum::<f64>() / per_sample.len() as f64;
    Ok(BatchReport { mean, n: per_sample.len(), skipped, per_sample })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::{Event, EventStream};
    use crate::representations::PresetName;

    fn toy_samples() -> Vec<Sample> {
        let events = vec![
            Event::new(1, 1, 0.05, 1),
            Event::new(2, 1, 0.25, 1),
            Event::new(3, 2, 0.45, -1),
            Event::new(1, 3, 0.65, 1),
            Event::new(2, 3, 0.85, -1),
            Event::new(0, 0, 1.05, 1),
            Event::new(3, 0, 1.25, -1),
            Event::new(2, 2, 1.45, 1),
            Event::new(1, 0, 1.65, 1),
            Event::new(0, 2, 1.85, -1),
        ];
        let stream = EventStream::new(events, 4, 4).unwrap();
        vec![stream.slice_window(0.0, 1.0).unwrap(), stream.slice_window(1.0, 2.0).unwrap()]
    }

    #[test]
    fn subsample_respects_cap_and_order() {
        let pts: Vec<[f64; 4]> = (0..10).map(|i| [0.0, 0.0, i as f64 / 10.0, 1.0]).collect();
        let norm = NormalizedEvents { points: pts };
        let s = subsample_event_points(&norm, 4, 7);
        assert_eq!(s.nrows(), 4);
        for r in 1..4 {
            assert!(s[[r, 2]] > s[[r - 1, 2]]);
        }
        let again = subsample_event_points(&norm, 4, 7);
        assert_eq!(s, again);
    }

    #[test]
    fn empty_sample_is_degenerate() {
        let stream = EventStream::new(vec![], 4, 4).unwrap();
        let sample = stream.slice_window(0.0, 1.0).unwrap();
        let builder = ReprBuilder::preset(PresetName::Hist2);
        let err = gwd_sample(&sample, &builder, &SolverConfig::default());
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn gwd_sample_deterministic() {
        let samples = toy_samples();
        let builder = ReprBuilder::preset(PresetName::Voxel12);
        let cfg = SolverConfig::default();
        let a = gwd_sample(&samples[0], &builder, &cfg).unwrap();
        let b = gwd_sample(&samples[0], &builder, &cfg).unwrap();
        assert_eq!(a.gwd.to_bits(), b.gwd.to_bits());
        assert!(a.gwd.is_finite());
    }

    #[test]
    fn batch_mean_is_arithmetic_mean() {
        let samples = toy_samples();
        let builder = ReprBuilder::preset(PresetName::Hist2);
        let cfg = SolverConfig::default();
        let one = gwd_batch(&samples, &builder, &cfg, 1).unwrap();
        let v0 = gwd_sample(&samples[0], &builder, &cfg).unwrap().gwd;
        assert_eq!(one.mean, v0);
        let both = gwd_batch(&samples, &builder, &cfg, 2).unwrap();
        let v1 = gwd_sample(&samples[1], &builder, &cfg).unwrap().gwd;
        assert!((both.mean - (v0 + v1) / 2.0).abs() < 1e-15);
        assert_eq!(both.skipped, 0);
    }

    #[test]
    fn batch_rejects_oversized_n() {
        let samples = toy_samples();
        let builder = ReprBuilder::preset(PresetName::Hist2);
        assert!(gwd_batch(&samples, &builder, &SolverConfig::default(), 3).is_err());
    }

    #[test]
    fn batch_skips_degenerate_windows() {
        let mut samples = toy_samples();
        let stream = EventStream::new(vec![], 4, 4).unwrap();
        samples.insert(0, stream.slice_window(0.0, 1.0).unwrap());
        let builder = ReprBuilder::preset(PresetName::Hist2);
        let report = gwd_batch(&samples, &builder, &SolverConfig::default(), 2).unwrap();
        assert_eq!(report.skipped, 1);
        assert_eq!(report.n, 2);
        assert_eq!(report.per_sample[0].idx, 1);
    }

    #[test]
    fn report_json_schema() {
        let samples = toy_samples();
        let builder = ReprBuilder::preset(PresetName::Hist2);
        let report = gwd_batch(&samples, &builder, &SolverConfig::default(), 1).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        for key in ["\"mean\":", "\"n\":", "\"skipped\":", "\"per_sample\":", "\"idx\":", "\"gwd\":", "\"converged\":", "\"iters\":"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
