//! Dense grid representations built from event windows: the general
//! (window, measurement, aggregation) channel family plus named presets.

mod blur;
mod family;
mod grid;
mod presets;

pub use blur::gaussian_blur;
pub use family::{
    aggregate, apply_window, build_family_representation, measure, window_basis, AggregationFn,
    ChannelSpec, MeasurementFn, RepresentationSpec, WindowKind, WindowSpec,
};
pub use grid::FeatureGrid;
pub use presets::{build_preset, PresetName};

use crate::error::{Error, Result};
use crate::event_model::Sample;
use serde::{Deserialize, Serialize};

/// A representation recipe the GWD pipeline can score: either a named
/// preset, a channel-count variant of a preset family, or an explicit
/// channel spec, optionally followed by a Gaussian blur.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReprBuilder {
    pub kind: ReprKind,
    /// Blur applied after construction; 0 disables it.
    #[serde(default)]
    pub blur_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReprKind {
    Preset(PresetName),
    /// Voxel grid with an arbitrary number of temporal bins.
    Voxel(usize),
    /// Mixed-density event stack with an arbitrary number of channels.
    Mdes(usize),
    Family(RepresentationSpec),
}

impl ReprBuilder {
    pub fn preset(name: PresetName) -> Self {
        ReprBuilder { kind: ReprKind::Preset(name), blur_sigma: 0.0 }
    }

    pub fn family(spec: RepresentationSpec) -> Self {
        ReprBuilder { kind: ReprKind::Family(spec), blur_sigma: 0.0 }
    }

    pub fn with_blur(mut self, sigma: f64) -> Self {
        self.blur_sigma = sigma;
        self
    }

    /// Resolves a CLI-style `--repr` argument: a preset name or a path to a
    /// representation spec JSON file.
    pub fn resolve(arg: &str) -> Result<Self> {
        if let Ok(name) = arg.parse::<PresetName>() {
            return Ok(ReprBuilder::preset(name));
        }
        let path = std::path::Path::new(arg);
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let spec: RepresentationSpec = serde_json::from_str(&text)?;
            spec.validate()?;
            return Ok(ReprBuilder::family(spec));
        }
        Err(Error::validation(format!(
            "'{arg}' is neither a preset name nor an existing spec file"
        )))
    }

    pub fn build(&self, sample: &Sample) -> Result<FeatureGrid> {
        let grid = match &self.kind {
            ReprKind::Preset(name) => build_preset(sample, *name)?,
            ReprKind::Voxel(bins) => presets::build_voxel(sample, *bins)?,
            ReprKind::Mdes(channels) => presets::build_mdes(sample, *channels)?,
            ReprKind::Family(spec) => build_family_representation(sample, spec)?,
        };
        if self.blur_sigma > 0.0 {
            gaussian_blur(&grid, self.blur_sigma)
        } else if self.blur_sigma < 0.0 {
            Err(Error::validation("blur sigma must be non-negative"))
        } else {
            Ok(grid)
        }
    }

    /// Short label for reports and plot legends.
    pub fn label(&self) -> String {
        match &self.kind {
            ReprKind::Preset(name) => name.to_string(),
            ReprKind::Voxel(b) => format!("voxel{b}"),
            ReprKind::Mdes(c) => format!("mdes{c}"),
            ReprKind::Family(spec) => format!("family{}", spec.n_c()),
        }
    }
}
