//! The per-channel representation family: a windowing function selecting
//! events, a measurement mapping each event to a value, and a per-pixel
//! aggregation producing one feature map.

use super::grid::FeatureGrid;
use crate::error::{Error, Result};
use crate::event_model::Sample;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    /// Selects events with normalized t in [a, b).
    Time,
    /// Selects the most recent ceil((b - a) * N_e) events.
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub a: f64,
    pub b: f64,
}

impl WindowSpec {
    pub fn time(a: f64, b: f64) -> Self {
        WindowSpec { kind: WindowKind::Time, a, b }
    }

    /// Most recent `fraction` of events.
    pub fn recent_fraction(fraction: f64) -> Self {
        WindowSpec { kind: WindowKind::Count, a: 1.0 - fraction, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.a) || !(0.0..=1.0).contains(&self.b) || self.a >= self.b {
            return Err(Error::validation(format!(
                "window bounds must satisfy 0 <= a < b <= 1, got a={} b={}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementFn {
    #[serde(rename = "t_pos")]
    TPos,
    #[serde(rename = "t_neg")]
    TNeg,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "p")]
    P,
    #[serde(rename = "c_pos")]
    CPos,
    #[serde(rename = "c_neg")]
    CNeg,
    #[serde(rename = "c")]
    C,
}

impl MeasurementFn {
    pub const ALL: [MeasurementFn; 7] = [
        MeasurementFn::TPos,
        MeasurementFn::TNeg,
        MeasurementFn::T,
        MeasurementFn::P,
        MeasurementFn::CPos,
        MeasurementFn::CNeg,
        MeasurementFn::C,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationFn {
    Max,
    Sum,
    Mean,
    Variance,
}

impl AggregationFn {
    pub const ALL: [AggregationFn; 4] = [
        AggregationFn::Max,
        AggregationFn::Sum,
        AggregationFn::Mean,
        AggregationFn::Variance,
    ];
}

/// One (window, measurement, aggregation) triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub window: WindowSpec,
    #[serde(rename = "measure")]
    pub measurement: MeasurementFn,
    #[serde(rename = "agg")]
    pub aggregation: AggregationFn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationSpec {
    pub channels: Vec<ChannelSpec>,
}

impl RepresentationSpec {
    pub fn new(channels: Vec<ChannelSpec>) -> Self {
        RepresentationSpec { channels }
    }

    pub fn n_c(&self) -> usize {
        self.channels.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::validation("representation needs at least one channel"));
        }
        for ch in &self.channels {
            ch.window.validate()?;
        }
        Ok(())
    }
}

/// The seven-window basis: three equally spaced non-overlapping time
/// windows, and count windows over the most recent 1, 1/2, 1/4, 1/8
/// fractions (the first being the global window).
pub fn window_basis() -> Vec<WindowSpec> {
    vec![
        WindowSpec::time(0.0, 1.0 / 3.0),
        WindowSpec::time(1.0 / 3.0, 2.0 / 3.0),
        WindowSpec::time(2.0 / 3.0, 1.0),
        WindowSpec::recent_fraction(1.0),
        WindowSpec::recent_fraction(0.5),
        WindowSpec::recent_fraction(0.25),
        WindowSpec::recent_fraction(0.125),
    ]
}

/// Keeps the window's events. The result keeps the full window bounds so
/// timestamp normalization stays relative to the whole sample.
pub fn apply_window(sample: &Sample, w: &WindowSpec) -> Sample {
    match w.kind {
        WindowKind::Time => {
            let events = sample
                .events
                .iter()
                .filter(|e| {
                    let tn = sample.normalized_t(e.t);
                    tn >= w.a && (tn < w.b || (w.b >= 1.0 && tn < 1.0 + 1e-12))
                })
                .copied()
                .collect();
            sample.with_events(events)
        }
        WindowKind::Count => {
            let n = sample.events.len();
            if n == 0 {
                return sample.with_events(Vec::new());
            }
            let keep = (((w.b - w.a) * n as f64).ceil() as usize).clamp(1, n);
            sample.with_events(sample.events[n - keep..].to_vec())
        }
    }
}

/// Per-event measurement values with their pixel index. Subscripted
/// variants drop events of the other polarity.
pub fn measure(sample: &Sample, m: MeasurementFn) -> Vec<(usize, f64)> {
    let width = sample.width as usize;
    sample
        .events
        .iter()
        .filter_map(|e| {
            let value = match m {
                MeasurementFn::T => sample.normalized_t(e.t),
                MeasurementFn::TPos if e.p > 0 => sample.normalized_t(e.t),
                MeasurementFn::TNeg if e.p < 0 => sample.normalized_t(e.t),
                MeasurementFn::P => f64::from(e.p),
                MeasurementFn::C => 1.0,
                MeasurementFn::CPos if e.p > 0 => 1.0,
                MeasurementFn::CNeg if e.p < 0 => 1.0,
                _ => return None,
            };
            Some((e.y as usize * width + e.x as usize, value))
        })
        .collect()
}

/// Per-pixel aggregation into one H*W image. Pixels with no values read 0.
/// Variance is the population variance.
pub fn aggregate(values: &[(usize, f64)], a: AggregationFn, width: usize, height: usize) -> Vec<f64> {
    let npix = width * height;
    match a {
        AggregationFn::Sum => {
            let mut out = vec![0.0; npix];
            for &(idx, v) in values {
                out[idx] += v;
            }
            out
        }
        AggregationFn::Max => {
            let mut out = vec![0.0; npix];
            let mut seen = vec![false; npix];
            for &(idx, v) in values {
                if !seen[idx] || v > out[idx] {
                    out[idx] = v;
                    seen[idx] = true;
                }
            }
            out
        }
        AggregationFn::Mean => {
            let mut sum = vec![0.0; npix];
            let mut count = vec![0usize; npix];
            for &(idx, v) in values {
                sum[idx] += v;
                count[idx] += 1;
            }
            for i in 0..npix {
                if count[i] > 0 {
                    sum[i] /= count[i] as f64;
                }
            }
            sum
        }
        AggregationFn::Variance => {
            let mut sum = vec![0.0; npix];
            let mut sq = vec![0.0; npix];
            let mut count = vec![0usize; npix];
            for &(idx, v) in values {
                sum[idx] += v;
                sq[idx] += v * v;
                count[idx] += 1;
            }
            let mut out = vec![0.0; npix];
            for i in 0..npix {
                if count[i] > 0 {
                    let n = count[i] as f64;
                    let mean = sum[i] / n;
                    out[i] = (sq[i] / n - mean * mean).max(0.0);
                }
            }
            out
        }
    }
}

/// Channel c is aggregate(measure(window(sample))), channels stacked in
/// spec order.
pub fn build_family_representation(sample: &Sample, spec: &RepresentationSpec) -> Result<FeatureGrid> {
    spec.validate()?;
    let (w, h) = (sample.width as usize, sample.height as usize);
    let mut grid = FeatureGrid::zeros(w, h, spec.n_c());
    for (c, ch) in spec.channels.iter().enumerate() {
        let windowed = apply_window(sample, &ch.window);
        let values = measure(&windowed, ch.measurement);
        let image = aggregate(&values, ch.aggregation, w, h);
        grid.set_channel(c, &image);
    }
    grid.validate_finite()?;
    Ok(grid)
}
