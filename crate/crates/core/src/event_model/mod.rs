//! Raw event data: streams, time-window slicing, normalization, synthetic
//! scene generation and file I/O.

mod io;
mod synth;

pub use io::{load_events, save_events, EventFormat};
pub use synth::{generate_synthetic_scene, ScenePattern, SyntheticSceneConfig};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A single brightness-change event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    /// Timestamp in seconds.
    pub t: f64,
    /// Polarity, exactly -1 or +1.
    pub p: i8,
}

impl Event {
    pub fn new(x: u16, y: u16, t: f64, p: i8) -> Self {
        Event { x, y, t, p }
    }
}

/// A time-ordered sequence of events with its sensor geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    events: Vec<Event>,
    width: u32,
    height: u32,
}

impl EventStream {
    /// Builds a stream, sorting by timestamp (stable) and checking bounds
    /// and polarity.
    pub fn new(mut events: Vec<Event>, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation("sensor must have nonzero area"));
        }
        for (i, e) in events.iter().enumerate() {
            if u32::from(e.x) >= width || u32::from(e.y) >= height {
                return Err(Error::validation(format!(
                    "event {i} at ({}, {}) outside {width}x{height} sensor",
                    e.x, e.y
                )));
            }
            if e.p != 1 && e.p != -1 {
                return Err(Error::validation(format!("event {i} has polarity {}", e.p)));
            }
            if !e.t.is_finite() || e.t < 0.0 {
                return Err(Error::validation(format!("event {i} has timestamp {}", e.t)));
            }
        }
        events.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        Ok(EventStream { events, width, height })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Events with t0 <= t < t1.
    pub fn slice_window(&self, t0: f64, t1: f64) -> Result<Sample> {
        if !(t0 < t1) {
            return Err(Error::validation(format!("empty window [{t0}, {t1})")));
        }
        let lo = self.events.partition_point(|e| e.t < t0);
        let hi = self.events.partition_point(|e| e.t < t1);
        Ok(Sample {
            events: self.events[lo..hi].to_vec(),
            t_start: t0,
            t_end: t1,
            width: self.width,
            height: self.height,
        })
    }
}

/// Events within one time window [t_start, t_end).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub events: Vec<Event>,
    pub t_start: f64,
    pub t_end: f64,
    pub width: u32,
    pub height: u32,
}

impl Sample {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Timestamp mapped to [0, 1] within the window.
    pub fn normalized_t(&self, t: f64) -> f64 {
        (t - self.t_start) / self.duration()
    }

    /// Derived sample reusing this window's bounds and geometry.
    pub fn with_events(&self, events: Vec<Event>) -> Sample {
        Sample { events, ..self.clone() }
    }
}

/// Events as 4-vectors (x/W, y/H, (t - t_start)/dT, p).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedEvents {
    pub points: Vec<[f64; 4]>,
}

impl NormalizedEvents {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Coordinates divided by sensor size, timestamps mapped to [0, 1],
/// polarity passed through.
pub fn normalize(sample: &Sample) -> NormalizedEvents {
    let w = f64::from(sample.width);
    let h = f64::from(sample.height);
    let points = sample
        .events
        .iter()
        .map(|e| {
            [
                f64::from(e.x) / w,
                f64::from(e.y) / h,
                sample.normalized_t(e.t),
                f64::from(e.p),
            ]
        })
        .collect();
    NormalizedEvents { points }
}
