//! Batch studies: channel sweeps, blur sweeps, the sample-count study, and
//! the similarity-invariance suite.

use crate::error::{Error, Result};
use crate::event_model::Sample;
use crate::gw_metric::{
    gwd_batch, invariance_transform, similarity_matrix, solve_gw, BatchReport, InvarianceKind,
    KernelParams, SolverConfig,
};
use crate::report::kendall_tau;
use crate::representations::{ReprBuilder, ReprKind};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Channels,
    BlurSigma,
    SampleCount,
}

/// Representation family swept over channel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepFamily {
    Voxel,
    Mdes,
}

impl std::str::FromStr for SweepFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "voxel" => Ok(SweepFamily::Voxel),
            "mdes" => Ok(SweepFamily::Mdes),
            other => Err(Error::validation(format!("unknown sweep family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub mean: f64,
    pub std: f64,
    pub skipped: usize,
}

/// One curve of batch GWD means along a single swept variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
    pub representation: String,
}

fn batch_std(report: &BatchReport) -> f64 {
    let k = report.per_sample.len() as f64;
    let var = report
        .per_sample
        .iter()
        .map(|s| (s.gwd - report.mean).powi(2))
        .sum::<f64>()
        / k;
    var.sqrt()
}

fn point_from_batch(value: f64, report: &BatchReport) -> SweepPoint {
    SweepPoint { value, mean: report.mean, std: batch_std(report), skipped: report.skipped }
}

/// Batch GWD at each channel count for a voxel or event-stack family.
pub fn sweep_channels(
    samples: &[Sample],
    family: SweepFamily,
    channels: &[usize],
    cfg: &SolverConfig,
    n: usize,
) -> Result<SweepReport> {
    if channels.is_empty() {
        return Err(Error::validation("channel sweep needs at least one channel count"));
    }
    if channels.iter().any(|&c| c == 0) {
        return Err(Error::validation("channel counts must be at least 1"));
    }
    let mut sorted = channels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut points = Vec::with_capacity(sorted.len());
    for &c in &sorted {
        let builder = match family {
            SweepFamily::Voxel => ReprBuilder { kind: ReprKind::Voxel(c), blur_sigma: 0.0 },
            SweepFamily::Mdes => ReprBuilder { kind: ReprKind::Mdes(c), blur_sigma: 0.0 },
        };
        let report = gwd_batch(samples, &builder, cfg, n)?;
        points.push(point_from_batch(c as f64, &report));
    }
    let name = match family {
        SweepFamily::Voxel => "voxel",
        SweepFamily::Mdes => "mdes",
    };
    Ok(SweepReport { axis: SweepAxis::Channels, points, representation: name.into() })
}

/// Batch GWD of one representation under increasing Gaussian blur.
pub fn sweep_blur(
    samples: &[Sample],
    builder: &ReprBuilder,
    sigmas: &[f64],
    cfg: &SolverConfig,
    n: usize,
) -> Result<SweepReport> {
    if sigmas.is_empty() {
        return Err(Error::validation("blur sweep needs at least one sigma"));
    }
    if sigmas.iter().any(|&s| !s.is_finite() || s < 0.0) {
        return Err(Error::validation("blur sigmas must be finite and non-negative"));
    }
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let mut points = Vec::with_capacity(sorted.len());
    for &sigma in &sorted {
        let blurred = builder.clone().with_blur(sigma);
        let report = gwd_batch(samples, &blurred, cfg, n)?;
        points.push(point_from_batch(sigma, &report));
    }
    Ok(SweepReport { axis: SweepAxis::BlurSigma, points, representation: builder.label() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCurve {
    pub representation: String,
    pub points: Vec<SweepPoint>,
}

/// Sample-count study: batch GWD per representation at each N, plus a rank
/// agreement table against the ranking at the largest N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSweepReport {
    pub axis: SweepAxis,
    pub ns: Vec<usize>,
    pub curves: Vec<SampleCurve>,
    /// (N, Kendall tau of the representation ranking at N vs. at max N).
    pub kendall_vs_max: Vec<(usize, f64)>,
}

pub fn sweep_samples(
    samples: &[Sample],
    builders: &[ReprBuilder],
    ns: &[usize],
    cfg: &SolverConfig,
) -> Result<SampleSweepReport> {
    if builders.is_empty() {
        return Err(Error::validation("sample sweep needs at least one representation"));
    }
    if ns.is_empty() {
        return Err(Error::validation("sample sweep needs at least one batch size"));
    }
    if ns.iter().any(|&n| n == 0) {
        return Err(Error::validation("batch sizes must be positive"));
    }
    if ns.iter().any(|&n| n > samples.len()) {
        return Err(Error::validation(format!(
            "batch size exceeds corpus size {}",
            samples.len()
        )));
    }
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut curves = Vec::with_capacity(builders.len());
    for builder in builders {
        let mut points = Vec::with_capacity(sorted.len());
        for &n in &sorted {
            let report = gwd_batch(samples, builder, cfg, n)?;
            points.push(point_from_batch(n as f64, &report));
        }
        curves.push(SampleCurve { representation: builder.label(), points });
    }
    let last = sorted.len() - 1;
    let reference: Vec<f64> = curves.iter().map(|c| c.points[last].mean).collect();
    let mut kendall_vs_max = Vec::with_capacity(sorted.len());
    for (i, &n) in sorted.iter().enumerate() {
        let at_n: Vec<f64> = curves.iter().map(|c| c.points[i].mean).collect();
        let tau = if curves.len() < 2 { 1.0 } else { kendall_tau(&at_n, &reference)? };
        kendall_vs_max.push((n, tau));
    }
    Ok(SampleSweepReport { axis: SweepAxis::SampleCount, ns: sorted, curves, kendall_vs_max })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceSuite {
    pub name: String,
    /// Largest entrywise similarity-matrix deviation across all point sets.
    pub max_deviation: f64,
    /// Largest |GWD(transformed) − GWD(original)| across all point sets.
    pub max_gwd_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub seed: u64,
    pub point_sets: usize,
    pub tolerance: f64,
    pub suites: Vec<InvarianceSuite>,
    pub pass: bool,
}

const INVARIANCE_TOL: f64 = 1e-12;

fn random_point_set(rng: &mut ChaCha12Rng, n: usize, d: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0))
}

/// Checks that the affine, constant-concatenation, and duplication
/// transforms leave similarity matrices (and hence solved GWD values)
/// unchanged on seeded random point sets.
pub fn invariance_report(
    seed: u64,
    point_sets: usize,
    affine: Option<(f64, f64)>,
    cfg: &SolverConfig,
) -> Result<InvarianceReport> {
    if point_sets == 0 {
        return Err(Error::validation("invariance check needs at least one point set"));
    }
    if let Some((a, _)) = affine {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::validation("affine scale must be finite and nonzero"));
        }
    }
    let affine_cases: Vec<(f64, f64)> = match affine {
        Some(pair) => vec![pair],
        None => {
            let mut cases = Vec::new();
            for a in [0.5, 3.0, -2.0] {
                for b in [-1.0, 0.0, 10.0] {
                    cases.push((a, b));
                }
            }
            cases
        }
    };
    let params = KernelParams::default();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(point_sets);
    for _ in 0..point_sets {
        let n = rng.random_range(5..=12);
        let d = rng.random_range(2..=5);
        sets.push(random_point_set(&mut rng, n, d));
    }

    let mut suites = Vec::new();
    let kinds: Vec<(String, Vec<InvarianceKind>)> = vec![
        (
            "affine".into(),
            affine_cases
                .iter()
                .map(|&(a, b)| InvarianceKind::Affine { a, b })
                .collect(),
        ),
        ("concat_constant".into(), vec![InvarianceKind::ConcatConstant(vec![0.25, -3.0])]),
        ("duplicate".into(), vec![InvarianceKind::Duplicate]),
    ];
    for (name, transforms) in kinds {
        let mut max_dev = 0.0f64;
        let mut max_gwd_dev = 0.0f64;
        for points in &sets {
            let base_sim = similarity_matrix(points.view(), &params)?;
            let base = solve_gw(&base_sim, &base_sim, cfg)?;
            for kind in &transforms {
                let mapped = invariance_transform(points, kind)?;
                let sim = similarity_matrix(mapped.view(), &params)?;
                for (x, y) in base_sim.iter().zip(sim.iter()) {
                    max_dev = max_dev.max((x - y).abs());
                }
                let solved = solve_gw(&sim, &sim, cfg)?;
                max_gwd_dev = max_gwd_dev.max((solved.objective - base.objective).abs());
            }
        }
        let pass = max_dev <= INVARIANCE_TOL;
        suites.push(InvarianceSuite {
            name,
            max_deviation: max_dev,
            max_gwd_deviation: max_gwd_dev,
            pass,
        });
    }
    let pass = suites.iter().all(|s| s.pass);
    Ok(InvarianceReport { seed, point_sets, tolerance: INVARIANCE_TOL, suites, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::default_demo_corpus;

    fn tiny_corpus() -> Vec<Sample> {
        let recipe = default_demo_corpus(4, 11);
        recipe.generate().unwrap().1
    }

    fn fast_cfg() -> SolverConfig {
        SolverConfig { event_cap: 120, ..SolverConfig::default() }
    }

    #[test]
    fn channel_sweep_shape() {
        let samples = tiny_corpus();
        let r = sweep_channels(&samples, SweepFamily::Voxel, &[2, 1], &fast_cfg(), 2).unwrap();
        assert_eq!(r.axis, SweepAxis::Channels);
        assert_eq!(r.points.len(), 2);
        assert!(r.points[0].value < r.points[1].value);
        assert!(r.points.iter().all(|p| p.mean.is_finite() && p.std >= 0.0));
    }

    #[test]
    fn channel_sweep_rejects_zero() {
        let samples = tiny_corpus();
        assert!(sweep_channels(&samples, SweepFamily::Mdes, &[0], &fast_cfg(), 2).is_err());
        assert!(sweep_channels(&samples, SweepFamily::Mdes, &[], &fast_cfg(), 2).is_err());
    }

    #[test]
    fn blur_zero_matches_plain_batch() {
        let samples = tiny_corpus();
        let cfg = fast_cfg();
        let builder = ReprBuilder { kind: ReprKind::Voxel(2), blur_sigma: 0.0 };
        let sweep = sweep_blur(&samples, &builder, &[0.0], &cfg, 2).unwrap();
        let batch = gwd_batch(&samples, &builder, &cfg, 2).unwrap();
        assert_eq!(sweep.points[0].mean, batch.mean);
    }

    #[test]
    fn blur_rejects_negative() {
        let samples = tiny_corpus();
        let builder = ReprBuilder { kind: ReprKind::Voxel(2), blur_sigma: 0.0 };
        assert!(sweep_blur(&samples, &builder, &[-1.0], &fast_cfg(), 2).is_err());
    }

    #[test]
    fn sample_sweep_single_repr_tau_one() {
        let samples = tiny_corpus();
        let builder = ReprBuilder { kind: ReprKind::Voxel(2), blur_sigma: 0.0 };
        let r = sweep_samples(&samples, &[builder], &[2, 4], &fast_cfg()).unwrap();
        assert_eq!(r.kendall_vs_max, vec![(2, 1.0), (4, 1.0)]);
    }

    #[test]
    fn sample_sweep_rejects_oversized_n() {
        let samples = tiny_corpus();
        let builder = ReprBuilder { kind: ReprKind::Voxel(2), blur_sigma: 0.0 };
        assert!(sweep_samples(&samples, &[builder], &[99], &fast_cfg()).is_err());
    }

    #[test]
    fn invariance_suites_pass() {
        let cfg = SolverConfig::default();
        let r = invariance_report(3, 3, None, &cfg).unwrap();
        assert!(r.pass, "suites: {:?}", r.suites);
        assert_eq!(r.suites.len(), 3);
        // identical seed, identical deviations
        let r2 = invariance_report(3, 3, None, &cfg).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn invariance_rejects_zero_scale() {
        let cfg = SolverConfig::default();
        assert!(invariance_report(1, 1, Some((0.0, 1.0)), &cfg).is_err());
    }
}
