//! Stage-wise categorical search over the representation family: channels
//! are filled one at a time, each stage picking the (window, measurement,
//! aggregation) triple with the lowest batched GWD.

mod surrogate;

use crate::error::{Error, Result};
use crate::event_model::{normalize, Sample};
use crate::gw_metric::{embed_features, similarity_matrix, solve_gw, subsample_event_points, KernelParams, SolverConfig};
use crate::representations::{
    build_family_representation, window_basis, AggregationFn, ChannelSpec, FeatureGrid,
    MeasurementFn, RepresentationSpec, WindowSpec,
};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The categorical domain of one channel: 7 windows x 7 measurements x 4
/// aggregations = 196 triples.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSpace {
    pub windows: Vec<WindowSpec>,
    pub measurements: Vec<MeasurementFn>,
    pub aggregations: Vec<AggregationFn>,
}

impl Default for CandidateSpace {
    fn default() -> Self {
        CandidateSpace {
            windows: window_basis(),
            measurements: MeasurementFn::ALL.to_vec(),
            aggregations: AggregationFn::ALL.to_vec(),
        }
    }
}

impl CandidateSpace {
    pub fn total(&self) -> usize {
        self.windows.len() * self.measurements.len() * self.aggregations.len()
    }

    /// All triples in fixed enumeration order: window-major, then
    /// measurement, then aggregation. This order also breaks score ties.
    pub fn all(&self) -> Vec<ChannelSpec> {
        let mut out = Vec::with_capacity(self.total());
        for w in &self.windows {
            for m in &self.measurements {
                for a in &self.aggregations {
                    out.push(ChannelSpec { window: *w, measurement: *m, aggregation: *a });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProposalStrategy {
    Exhaustive,
    RandomK { k: usize, seed: u64 },
    Surrogate { k: usize, seed: u64 },
}

impl ProposalStrategy {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProposalStrategy::Exhaustive => Ok(()),
            ProposalStrategy::RandomK { k, .. } | ProposalStrategy::Surrogate { k, .. } => {
                if *k == 0 {
                    Err(Error::validation("sampled strategies need k >= 1"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// One scored candidate; `score` is absent when every sample was
/// degenerate for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEval {
    pub candidate: ChannelSpec,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub chosen: Vec<ChannelSpec>,
    /// Best batched GWD per stage, non-increasing for exhaustive search.
    pub stage_scores: Vec<f64>,
    /// Audit log: every (candidate, score) pair per stage.
    pub evaluations: Vec<Vec<CandidateEval>>,
    pub target_channels: usize,
}

impl SearchState {
    pub fn new(target_channels: usize) -> Self {
        SearchState {
            chosen: Vec::new(),
            stage_scores: Vec::new(),
            evaluations: Vec::new(),
            target_channels,
        }
    }
}

/// All triples not already chosen, in enumeration order.
pub fn enumerate_candidates(space: &CandidateSpace, state: &SearchState) -> Vec<ChannelSpec> {
    space.all().into_iter().filter(|c| !state.chosen.contains(c)).collect()
}

/// Proposes this stage's candidates. The surrogate strategy ranks the
/// remainder with a ridge model fit on `stage_evals` once its random
/// exploration half has been scored.
pub fn propose(
    state: &SearchState,
    space: &CandidateSpace,
    strategy: &ProposalStrategy,
    stage_evals: &[CandidateEval],
) -> Vec<ChannelSpec> {
    let remaining = enumerate_candidates(space, state);
    match strategy {
        ProposalStrategy::Exhaustive => remaining,
        ProposalStrategy::RandomK { k, seed } => {
            random_subset(&remaining, *k, *seed, state.chosen.len() as u64)
        }
        ProposalStrategy::Surrogate { k, seed } => {
            let explore = (*k / 2).max(1);
            if stage_evals.is_empty() {
                random_subset(&remaining, explore, *seed, state.chosen.len() as u64)
            } else {
                let already: Vec<ChannelSpec> =
                    stage_evals.iter().map(|e| e.candidate).collect();
                let pool: Vec<ChannelSpec> =
                    remaining.into_iter().filter(|c| !already.contains(c)).collect();
                let take = k.saturating_sub(stage_evals.len()).min(pool.len());
                surrogate::rank_candidates(space, stage_evals, &pool, *seed)
                    .into_iter()
                    .take(take)
                    .collect()
            }
        }
    }
}

fn random_subset(pool: &[ChannelSpec], k: usize, seed: u64, stage: u64) -> Vec<ChannelSpec> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ (stage.wrapping_mul(0x9e3779b97f4a7c15)));
    let mut pool: Vec<ChannelSpec> = pool.to_vec();
    pool.shuffle(&mut rng);
    pool.truncate(k.min(pool.len()));
    pool
}

/// Precomputed event-side data shared by every candidate evaluation.
pub struct EvalContext<'a> {
    samples: &'a [Sample],
    cfg: &'a SolverConfig,
    /// Samples to average over (GWD_N).
    pub n: usize,
    /// Event similarity matrix per sample; None for empty windows.
    event_kernels: Vec<Option<Array2<f64>>>,
}

impl<'a> EvalContext<'a> {
    pub fn new(samples: &'a [Sample], cfg: &'a SolverConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        if n == 0 || n > samples.len() {
            return Err(Error::validation(format!(
                "batch size {n} must be in 1..={}",
                samples.len()
            )));
        }
        let params = KernelParams::default();
        let event_kernels = samples
            .iter()
            .map(|s| {
                if s.events.is_empty() {
                    Ok(None)
                } else {
                    let pts = subsample_event_points(&normalize(s), cfg.event_cap, cfg.seed);
                    similarity_matrix(pts.view(), &params).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if event_kernels.iter().all(|k| k.is_none()) {
            return Err(Error::Degenerate("corpus has no non-empty windows".into()));
        }
        Ok(EvalContext { samples, cfg, n, event_kernels })
    }

    /// Grid for a partial representation: filled channels first, the rest
    /// of the target volume zero.
    fn partial_grid(&self, sample: &Sample, channels: &[ChannelSpec], target: usize) -> Result<FeatureGrid> {
        let filled = build_family_representation(sample, &RepresentationSpec::new(channels.to_vec()))?;
        let mut grid = FeatureGrid::zeros(filled.width(), filled.height(), target);
        for y in 0..filled.height() {
            for x in 0..filled.width() {
                for c in 0..channels.len() {
                    grid.set(x, y, c, filled.get(x, y, c));
                }
            }
        }
        Ok(grid)
    }

    /// Mean GWD of the partial representation over the first n
    /// non-degenerate samples; None when every sample is degenerate.
    pub fn score_channels(&self, channels: &[ChannelSpec], target: usize) -> Result<Option<f64>> {
        let params = KernelParams::default();
        let mut values = Vec::with_capacity(self.n);
        for (idx, kernel) in self.event_kernels.iter().enumerate() {
            if values.len() == self.n {
                break;
            }
            let Some(ce) = kernel else { continue };
            let grid = self.partial_grid(&self.samples[idx], channels, target)?;
            let features = embed_features(&grid);
            if features.is_empty() {
                continue;
            }
            let cf = similarity_matrix(features.points().view(), &params)?;
            values.push(solve_gw(ce, &cf, self.cfg)?.objective);
        }
        if values.is_empty() {
            return Ok(None);
        }
        Ok(Some(values.iter().sum::<f64>() / values.len() as f64))
    }
}

/// Scores one candidate appended to the already-chosen channels.
pub fn evaluate_candidate(
    state: &SearchState,
    candidate: &ChannelSpec,
    ctx: &EvalContext<'_>,
) -> Result<f64> {
    if state.chosen.contains(candidate) {
        return Err(Error::validation("candidate already chosen"));
    }
    let mut channels = state.chosen.clone();
    channels.push(*candidate);
    match ctx.score_channels(&channels, state.target_channels.max(channels.len()))? {
        Some(score) => Ok(score),
        None => Err(Error::Degenerate("candidate degenerate on every sample".into())),
    }
}

/// Greedy stage-wise minimization: fills `n_c` channels, each stage
/// appending the proposed candidate with the lowest batched GWD. Ties
/// break by enumeration order. Unscoreable candidates are logged with an
/// empty score and never win.
pub fn stagewise_search(
    samples: &[Sample],
    space: &CandidateSpace,
    strategy: &ProposalStrategy,
    cfg: &SolverConfig,
    n_c: usize,
    n: usize,
) -> Result<(RepresentationSpec, SearchState)> {
    strategy.validate()?;
    if n_c == 0 {
        return Err(Error::validation("search needs at least one channel"));
    }
    if n_c > space.total() {
        return Err(Error::validation("more channels requested than candidates exist"));
    }
    let ctx = EvalContext::new(samples, cfg, n)?;
    let enum_order = space.all();
    let enum_index =
        |c: &ChannelSpec| enum_order.iter().position(|e| e == c).unwrap_or(usize::MAX);

    let mut state = SearchState::new(n_c);
    for _stage in 0..n_c {
        let mut stage_evals: Vec<CandidateEval> = Vec::new();
        loop {
            let batch = propose(&state, space, strategy, &stage_evals);
            if batch.is_empty() {
                break;
            }
            let scored: Vec<CandidateEval> = batch
                .par_iter()
                .map(|cand| {
                    let score = match evaluate_candidate(&state, cand, &ctx) {
                        Ok(s) => Some(s),
                        Err(Error::Degenerate(_)) => None,
                        Err(e) => return Err(e),
                    };
                    Ok(CandidateEval { candidate: *cand, score })
                })
                .collect::<Result<Vec<_>>>()?;
            stage_evals.extend(scored);
            // Only the surrogate strategy proposes a second phase.
            if !matches!(strategy, ProposalStrategy::Surrogate { .. }) || stage_evals.len() > batch.len() {
                break;
            }
        }
        if stage_evals.is_empty() {
            return Err(Error::validation("no candidates remain"));
        }
        let winner = stage_evals
            .iter()
            .filter_map(|e| e.score.map(|s| (e.candidate, s)))
            .min_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .unwrap()
                    .then_with(|| enum_index(&a.0).cmp(&enum_index(&b.0)))
            })
            .ok_or_else(|| Error::Degenerate("every candidate was degenerate this stage".into()))?;
        // Deterministic log order regardless of evaluation order.
        stage_evals.sort_by_key(|e| enum_index(&e.candidate));
        state.chosen.push(winner.0);
        state.stage_scores.push(winner.1);
        state.evaluations.push(stage_evals);
        log::info!(
            "stage {}: best GWD_{} = {:.6}",
            state.chosen.len(),
            ctx.n,
            winner.1
        );
    }
    Ok((RepresentationSpec::new(state.chosen.clone()), state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::{generate_synthetic_scene, ScenePattern, SyntheticSceneConfig};

    fn tiny_corpus() -> Vec<Sample> {
        let cfg = SyntheticSceneConfig {
            width: 12,
            height: 8,
            duration: 1.0,
            pattern: ScenePattern::TwoSpeedBars,
            speed: 12.0,
            contrast_threshold: 1.0,
            noise_rate: 0.0,
            seed: 3,
        };
        let stream = generate_synthetic_scene(&cfg).unwrap();
        (0..4)
            .map(|i| stream.slice_window(0.25 * i as f64, 0.25 * (i + 1) as f64).unwrap())
            .collect()
    }

    fn fast_cfg() -> SolverConfig {
        SolverConfig { event_cap: 100, outer_max: 50, ..SolverConfig::default() }
    }

    #[test]
    fn enumeration_counts() {
        let space = CandidateSpace::default();
        assert_eq!(space.total(), 196);
        let mut state = SearchState::new(12);
        assert_eq!(enumerate_candidates(&space, &state).len(), 196);
        state.chosen.push(space.all()[0]);
        assert_eq!(enumerate_candidates(&space, &state).len(), 195);
        for c in space.all().into_iter().skip(1).take(11) {
            state.chosen.push(c);
        }
        assert_eq!(enumerate_candidates(&space, &state).len(), 184);
    }

    #[test]
    fn random_k_deterministic_and_clamped() {
        let space = CandidateSpace::default();
        let state = SearchState::new(12);
        let s1 = propose(&state, &space, &ProposalStrategy::RandomK { k: 100, seed: 1 }, &[]);
        let s2 = propose(&state, &space, &ProposalStrategy::RandomK { k: 100, seed: 1 }, &[]);
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 100);
        let clamped = propose(&state, &space, &ProposalStrategy::RandomK { k: 300, seed: 1 }, &[]);
        assert_eq!(clamped.len(), 196);
        let exhaustive = propose(&state, &space, &ProposalStrategy::Exhaustive, &[]);
        assert_eq!(exhaustive.len(), 196);
    }

    #[test]
    fn evaluate_rejects_duplicate_candidate() {
        let samples = tiny_corpus();
        let cfg = fast_cfg();
        let ctx = EvalContext::new(&samples, &cfg, 2).unwrap();
        let space = CandidateSpace::default();
        let mut state = SearchState::new(2);
        let cand = space.all()[10];
        state.chosen.push(cand);
        assert!(matches!(
            evaluate_candidate(&state, &cand, &ctx),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn evaluate_deterministic() {
        let samples = tiny_corpus();
        let cfg = fast_cfg();
        let ctx = EvalContext::new(&samples, &cfg, 2).unwrap();
        let state = SearchState::new(2);
        let cand = default_candidate();
        let a = evaluate_candidate(&state, &cand, &ctx).unwrap();
        let b = evaluate_candidate(&state, &cand, &ctx).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a.is_finite() && a > 0.0);
    }

    fn default_candidate() -> ChannelSpec {
        ChannelSpec {
            window: WindowSpec::recent_fraction(1.0),
            measurement: MeasurementFn::T,
            aggregation: AggregationFn::Mean,
        }
    }

    #[test]
    fn two_channel_search_on_restricted_space() {
        let samples = tiny_corpus();
        let cfg = fast_cfg();
        let space = CandidateSpace {
            windows: vec![WindowSpec::recent_fraction(1.0)],
            measurements: vec![MeasurementFn::T, MeasurementFn::P],
            aggregations: vec![AggregationFn::Sum],
        };
        let (spec, state) =
            stagewise_search(&samples, &space, &ProposalStrategy::Exhaustive, &cfg, 2, 2).unwrap();
        assert_eq!(spec.n_c(), 2);
        assert_ne!(spec.channels[0], spec.channels[1]);
        assert_eq!(state.stage_scores.len(), 2);
        assert!(state.stage_scores.iter().all(|s| s.is_finite()));
        // Stage 1 picks the better of the two singleton channels.
        let stage1 = &state.evaluations[0];
        let best = stage1
            .iter()
            .filter_map(|e| e.score)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(state.stage_scores[0], best);
    }

    #[test]
    fn search_reproducible() {
        let samples = tiny_corpus();
        let cfg = fast_cfg();
        let space = CandidateSpace {
            windows: window_basis(),
            measurements: vec![MeasurementFn::T, MeasurementFn::C],
            aggregations: vec![AggregationFn::Sum],
        };
        let strat = ProposalStrategy::RandomK { k: 5, seed: 11 };
        let a = stagewise_search(&samples, &space, &strat, &cfg, 2, 2).unwrap();
        let b = stagewise_search(&samples, &space, &strat, &cfg, 2, 2).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.stage_scores, b.1.stage_scores);
    }

    #[test]
    fn surrogate_search_runs() {
        let samples = tiny_corpus();
        let cfg = fast_cfg();
        let space = CandidateSpace::default();
        let strat = ProposalStrategy::Surrogate { k: 10, seed: 5 };
        let (spec, state) = stagewise_search(&samples, &space, &strat, &cfg, 1, 2).unwrap();
        assert_eq!(spec.n_c(), 1);
        // Exploration half plus ranked half.
        assert!(state.evaluations[0].len() <= 10);
        assert!(state.evaluations[0].len() >= 5);
    }
}
