//! Python bindings: corpus generation, representation building, and GWD
//! scoring, mirroring the `ergo` CLI's core operations.

use ergo_core::event_model::{ScenePattern, Sample, SyntheticSceneConfig};
use ergo_core::gw_metric::{gwd_batch, gwd_sample, SolverConfig};
use ergo_core::report::{default_demo_corpus, invariance_report, load_corpus, CorpusRecipe};
use ergo_core::repr_search::{stagewise_search, CandidateSpace, ProposalStrategy};
use ergo_core::representations::ReprBuilder;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::path::PathBuf;

fn err(e: ergo_core::Error) -> PyErr {
    match e {
        ergo_core::Error::Validation(_) | ergo_core::Error::Parse { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn resolve_builder(repr: &str, blur_sigma: f64) -> PyResult<ReprBuilder> {
    let builder = ReprBuilder::resolve(repr).map_err(err)?;
    Ok(builder.with_blur(blur_sigma))
}

/// A generated event corpus: the scene recipe plus its sample windows.
#[pyclass]
struct Corpus {
    recipe: CorpusRecipe,
    samples: Vec<Sample>,
}

#[pymethods]
impl Corpus {
    /// Number of sample windows.
    fn __len__(&self) -> usize {
        self.samples.len()
    }

    #[getter]
    fn width(&self) -> u32 {
        self.recipe.scene.width
    }

    #[getter]
    fn height(&self) -> u32 {
        self.recipe.scene.height
    }

    /// Events of window `idx` as (x, y, t, polarity) tuples.
    fn events(&self, idx: usize) -> PyResult<Vec<(u16, u16, f64, i8)>> {
        let sample = self.sample(idx)?;
        Ok(sample.events.iter().map(|e| (e.x, e.y, e.t, e.p)).collect())
    }

    /// (t_start, t_end) of window `idx`.
    fn window(&self, idx: usize) -> PyResult<(f64, f64)> {
        let sample = self.sample(idx)?;
        Ok((sample.t_start, sample.t_end))
    }

    /// Writes the corpus (evb + csv + index JSON) to a directory.
    fn write(&self, path: PathBuf) -> PyResult<()> {
        self.recipe.write_to(&path).map_err(err)
    }

    /// Dense H x W x C representation of window `idx` as a flat
    /// channel-major list plus its shape.
    #[pyo3(signature = (idx, repr, blur_sigma = 0.0))]
    fn representation(
        &self,
        idx: usize,
        repr: &str,
        blur_sigma: f64,
    ) -> PyResult<((usize, usize, usize), Vec<f64>)> {
        let sample = self.sample(idx)?;
        let grid = resolve_builder(repr, blur_sigma)?.build(sample).map_err(err)?;
        let (w, h, c) = (grid.width(), grid.height(), grid.n_c());
        let mut flat = Vec::with_capacity(w * h * c);
        for ch in 0..c {
            for y in 0..h {
                for x in 0..w {
                    flat.push(grid.get(x, y, ch));
                }
            }
        }
        Ok(((h, w, c), flat))
    }

    /// GWD of one window for a preset name or spec-file path.
    #[pyo3(signature = (idx, repr, blur_sigma = 0.0, epsilon = 5e-3, event_cap = 2000, seed = 0))]
    fn gwd(
        &self,
        idx: usize,
        repr: &str,
        blur_sigma: f64,
        epsilon: f64,
        event_cap: usize,
        seed: u64,
    ) -> PyResult<f64> {
        let sample = self.sample(idx)?;
        let cfg = SolverConfig { epsilon, event_cap, seed, ..SolverConfig::default() };
        let builder = resolve_builder(repr, blur_sigma)?;
        Ok(gwd_sample(sample, &builder, &cfg).map_err(err)?.gwd)
    }

    /// Mean GWD over the first `n` non-degenerate windows; returns
    /// (mean, n, skipped).
    #[pyo3(signature = (repr, n = None, blur_sigma = 0.0, epsilon = 5e-3, event_cap = 2000, seed = 0))]
    fn gwd_batch(
        &self,
        repr: &str,
        n: Option<usize>,
        blur_sigma: f64,
        epsilon: f64,
        event_cap: usize,
        seed: u64,
    ) -> PyResult<(f64, usize, usize)> {
        let cfg = SolverConfig { epsilon, event_cap, seed, ..SolverConfig::default() };
        let builder = resolve_builder(repr, blur_sigma)?;
        let report = gwd_batch(&self.samples, &builder, &cfg, n.unwrap_or(self.samples.len()))
            .map_err(err)?;
        Ok((report.mean, report.n, report.skipped))
    }

    /// Greedy stage-wise search; returns (spec_json, stage_scores).
    #[pyo3(signature = (channels, n = None, event_cap = 500, seed = 0))]
    fn search(
        &self,
        channels: usize,
        n: Option<usize>,
        event_cap: usize,
        seed: u64,
    ) -> PyResult<(String, Vec<f64>)> {
        let cfg = SolverConfig { event_cap, seed, tol: 1e-5, ..SolverConfig::default() };
        let (spec, state) = stagewise_search(
            &self.samples,
            &CandidateSpace::default(),
            &ProposalStrategy::Exhaustive,
            &cfg,
            channels,
            n.unwrap_or(self.samples.len()),
        )
        .map_err(err)?;
        let json = serde_json::to_string_pretty(&spec)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok((json, state.stage_scores))
    }
}

impl Corpus {
    fn sample(&self, idx: usize) -> PyResult<&Sample> {
        self.samples
            .get(idx)
            .ok_or_else(|| PyValueError::new_err(format!("window index {idx} out of range")))
    }
}

/// The bundled demo corpus (64x48 two-speed-bars).
#[pyfunction]
#[pyo3(signature = (samples = 20, seed = 0))]
fn demo_corpus(samples: usize, seed: u64) -> PyResult<Corpus> {
    let recipe = default_demo_corpus(samples, seed);
    let (_, windows) = recipe.generate().map_err(err)?;
    Ok(Corpus { recipe, samples: windows })
}

/// A corpus from explicit scene parameters.
#[pyfunction]
#[pyo3(signature = (pattern, width, height, duration, speed, samples, contrast = 1.0, noise_rate = 0.0, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn generate_corpus(
    pattern: &str,
    width: u32,
    height: u32,
    duration: f64,
    speed: f64,
    samples: usize,
    contrast: f64,
    noise_rate: f64,
    seed: u64,
) -> PyResult<Corpus> {
    let pattern: ScenePattern = pattern.parse().map_err(err)?;
    let recipe = CorpusRecipe {
        scene: SyntheticSceneConfig {
            width,
            height,
            duration,
            pattern,
            speed,
            contrast_threshold: contrast,
            noise_rate,
            seed,
        },
        samples,
    };
    let (_, windows) = recipe.generate().map_err(err)?;
    Ok(Corpus { recipe, samples: windows })
}

/// A corpus previously written with `Corpus.write` or `ergo gen`.
#[pyfunction]
fn read_corpus(path: PathBuf) -> PyResult<Corpus> {
    let (index, samples) = load_corpus(&path).map_err(err)?;
    Ok(Corpus { recipe: index.recipe, samples })
}

/// Runs the similarity-invariance suites; returns
/// [(name, max_deviation, pass)].
#[pyfunction]
#[pyo3(signature = (seed = 0, point_sets = 10))]
fn invariance(seed: u64, point_sets: usize) -> PyResult<Vec<(String, f64, bool)>> {
    let report =
        invariance_report(seed, point_sets, None, &SolverConfig::default()).map_err(err)?;
    Ok(report.suites.into_iter().map(|s| (s.name, s.max_deviation, s.pass)).collect())
}

#[pymodule]
fn ergo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Corpus>()?;
    m.add_function(wrap_pyfunction!(demo_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(generate_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(read_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(invariance, m)?)?;
    Ok(())
}
