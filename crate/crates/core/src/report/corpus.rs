//! Corpus persistence: a generated event stream split into equal sample
//! windows, stored as an evb file plus a JSON index.

use crate::error::{Error, Result};
use crate::event_model::{
    generate_synthetic_scene, load_events, save_events, EventFormat, EventStream, Sample,
    ScenePattern, SyntheticSceneConfig,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Everything needed to regenerate a corpus deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecipe {
    pub scene: SyntheticSceneConfig,
    /// Number of equal-length sample windows the stream is split into.
    pub samples: usize,
}

/// The bundled default recipe used by the acceptance studies.
pub fn default_demo_corpus(samples: usize, seed: u64) -> CorpusRecipe {
    CorpusRecipe {
        scene: SyntheticSceneConfig {
            width: 16,
            height: 64,
            // One-second windows aligned with the scene's 1 s period.
            duration: samples as f64,
            pattern: ScenePattern::ModulatedRows,
            // Fast-row events per pixel per window.
            speed: 8192.0,
            contrast_threshold: 1.0,
            noise_rate: 0.0,
            seed,
        },
        samples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusIndex {
    pub recipe: CorpusRecipe,
    pub windows: Vec<(f64, f64)>,
}

impl CorpusRecipe {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::validation("corpus needs at least one sample window"));
        }
        Ok(())
    }

    pub fn window_bounds(&self) -> Vec<(f64, f64)> {
        let dt = self.scene.duration / self.samples as f64;
        (0..self.samples)
            .map(|i| (i as f64 * dt, (i + 1) as f64 * dt))
            .collect()
    }

    pub fn generate(&self) -> Result<(EventStream, Vec<Sample>)> {
        self.validate()?;
        let stream = generate_synthetic_scene(&self.scene)?;
        let samples = self
            .window_bounds()
            .iter()
            .map(|&(t0, t1)| stream.slice_window(t0, t1))
            .collect::<Result<Vec<_>>>()?;
        Ok((stream, samples))
    }

    /// Writes events.evb, events.csv and corpus.json into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let (stream, _) = self.generate()?;
        std::fs::create_dir_all(dir)?;
        save_events(&stream, &dir.join("events.evb"), EventFormat::Evb)?;
        save_events(&stream, &dir.join("events.csv"), EventFormat::Csv)?;
        let index = CorpusIndex { recipe: self.clone(), windows: self.window_bounds() };
        std::fs::write(dir.join("corpus.json"), serde_json::to_string_pretty(&index)?)?;
        Ok(())
    }
}

/// Loads a corpus directory written by [`CorpusRecipe::write_to`].
pub fn load_corpus(dir: &Path) -> Result<(CorpusIndex, Vec<Sample>)> {
    let index: CorpusIndex =
        serde_json::from_str(&std::fs::read_to_string(dir.join("corpus.json"))?)?;
    let stream = load_events(&dir.join("events.evb"), EventFormat::Evb)?;
    let samples = index
        .windows
        .iter()
        .map(|&(t0, t1)| stream.slice_window(t0, t1))
        .collect::<Result<Vec<_>>>()?;
    Ok((index, samples))
}
