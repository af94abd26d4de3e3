//! Synthetic scene generator: moving step edges over a piecewise-linear
//! intensity model, plus Poisson shot noise.
//!
//! A unit-contrast edge crossing a pixel center changes that pixel's
//! intensity by 1, emitting floor(1/C) events whose polarity is the sign of
//! the change. Edge positions wrap around the sensor so arbitrarily long
//! streams stay active.

use super::{Event, EventStream};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenePattern {
    TranslatingEdge,
    TranslatingBar,
    TwoSpeedBars,
    ModulatedRows,
}

impl std::str::FromStr for ScenePattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "translating-edge" => Ok(ScenePattern::TranslatingEdge),
            "translating-bar" => Ok(ScenePattern::TranslatingBar),
            "two-speed-bars" => Ok(ScenePattern::TwoSpeedBars),
            "modulated-rows" => Ok(ScenePattern::ModulatedRows),
            other => Err(Error::validation(format!("unknown pattern '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSceneConfig {
    pub width: u32,
    pub height: u32,
    /// Stream duration in seconds.
    pub duration: f64,
    pub pattern: ScenePattern,
    /// Edge speed in pixels per second.
    pub speed: f64,
    /// Contrast threshold C.
    pub contrast_threshold: f64,
    /// Spurious events per pixel per second.
    pub noise_rate: f64,
    pub seed: u64,
}

impl SyntheticSceneConfig {
    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::validation("sensor must have nonzero area"));
        }
        if !(self.speed > 0.0) {
            return Err(Error::validation("speed must be positive"));
        }
        if !(self.duration > 0.0) {
            return Err(Error::validation("duration must be positive"));
        }
        if !(self.contrast_threshold > 0.0) {
            return Err(Error::validation("contrast threshold must be positive"));
        }
        if self.noise_rate < 0.0 {
            return Err(Error::validation("noise rate must be non-negative"));
        }
        Ok(())
    }
}

/// Deterministic function of the config, including the seed.
pub fn generate_synthetic_scene(config: &SyntheticSceneConfig) -> Result<EventStream> {
    config.validate()?;
    let mut events = Vec::new();
    match config.pattern {
        ScenePattern::TranslatingEdge => {
            edge_events(&mut events, config, 0..config.height, config.speed, 0.0, 1);
        }
        ScenePattern::TranslatingBar => {
            bar_events(&mut events, config, 0..config.height, config.speed, 0.0);
        }
        ScenePattern::TwoSpeedBars => {
            // Two sawtooth edges confined to thin horizontal bands, the
            // lower one at half speed and offset by half the sensor width.
            // Each edge has a sharp bright front and a sub-threshold decay,
            // so only positive events fire; the edge wraps around the
            // sensor repeatedly, giving every band pixel recurring events
            // whose times trace the edge's passage across the width.
            let h = config.height;
            let band = (h / 48).max(1);
            edge_events(&mut events, config, h / 4..h / 4 + band, config.speed, 0.0, 1);
            edge_events(
                &mut events,
                config,
                (3 * h) / 4..(3 * h) / 4 + band,
                config.speed * 0.5,
                f64::from(config.width) * 0.5,
                1,
            );
        }
        ScenePattern::ModulatedRows => {
            modulated_rows_events(&mut events, config);
        }
    }
    if config.noise_rate > 0.0 {
        noise_events(&mut events, config);
    }
    EventStream::new(events, config.width, config.height)
}

/// One edge of unit contrast starting at horizontal offset `x0` and moving
/// in +x at `speed`, wrapping modulo the sensor width. Emits events for
/// every row in `rows` each time the edge crosses a pixel center.
fn edge_events(
    out: &mut Vec<Event>,
    config: &SyntheticSceneConfig,
    rows: std::ops::Range<u32>,
    speed: f64,
    x0: f64,
    polarity: i8,
) {
    let w = f64::from(config.width);
    // Unit intensity step against threshold C.
    let per_crossing = (1.0 / config.contrast_threshold).floor() as usize;
    if per_crossing == 0 {
        return;
    }
    for x in 0..config.width {
        let center = f64::from(x) + 0.5;
        // Crossing times: speed*t + x0 == center (mod width).
        let mut offset = (center - x0).rem_euclid(w);
        loop {
            let t = offset / speed;
            if t >= config.duration {
                break;
            }
            for y in rows.clone() {
                for _ in 0..per_crossing {
                    out.push(Event::new(x as u16, y as u16, t, polarity));
                }
            }
            offset += w;
        }
    }
}

/// A bright bar: leading edge emits positive events, trailing edge negative.
fn bar_events(
    out: &mut Vec<Event>,
    config: &SyntheticSceneConfig,
    rows: std::ops::Range<u32>,
    speed: f64,
    x0: f64,
) {
    let bar_width = (f64::from(config.width) / 2.0).max(1.0);
    edge_events(out, config, rows.clone(), speed, x0, 1);
    edge_events(out, config, rows, speed, x0 - bar_width, -1);
}

/// Depth of the sinusoidal per-pixel rate modulation in [`ScenePattern::ModulatedRows`].
const MODULATION_DEPTH: f64 = 0.4;

/// Inverts u = t + (a/tau)(sin(tau t + psi) - sin psi) by Newton iteration,
/// mapping a uniform phase grid to event times whose instantaneous rate is
/// proportional to 1 + a cos(tau t + psi).
fn rate_warp(u: f64, a: f64, psi: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut t = u;
    for _ in 0..8 {
        let f = t + (a / tau) * ((tau * t + psi).sin() - psi.sin()) - u;
        let fp = 1.0 + a * (tau * t + psi).cos();
        t -= f / fp;
    }
    t.clamp(0.0, 1.0 - 1e-12)
}

/// Two dense horizontal rows firing all-positive event trains with a 1 s
/// period. The fast row spans the full width at `speed / contrast` events
/// per pixel per period; the slow row covers the middle half-width at half
/// that rate. Each pixel's instantaneous rate is sinusoidally modulated with
/// a seeded random phase, fixed for the whole stream, so every 1 s window
/// of the stream carries the same event pattern.
fn modulated_rows_events(out: &mut Vec<Event>, config: &SyntheticSceneConfig) {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let tau = std::f64::consts::TAU;
    let fast_y = (config.height * 5 / 16) as u16;
    let slow_y = (config.height * 11 / 16) as u16;
    let fast_count = (config.speed / config.contrast_threshold).round() as usize;
    let slow_count = fast_count / 2;
    let mut pixels = Vec::new();
    for x in 0..config.width as u16 {
        let psi = rng.random_range(0.0..tau);
        let phi = rng.random_range(0.0..1.0);
        pixels.push((x, fast_y, fast_count, psi, phi));
    }
    for x in (config.width / 4) as u16..(3 * config.width / 4) as u16 {
        let psi = rng.random_range(0.0..tau);
        let phi = rng.random_range(0.0..1.0);
        pixels.push((x, slow_y, slow_count, psi, phi));
    }
    for period in 0..config.duration.ceil() as u64 {
        for &(x, y, count, psi, phi) in &pixels {
            for k in 0..count {
                let u = (k as f64 + phi) / count as f64;
                let t = period as f64 + rate_warp(u, MODULATION_DEPTH, psi);
                if t < config.duration {
                    out.push(Event::new(x, y, t, 1));
                }
            }
        }
    }
}

fn noise_events(out: &mut Vec<Event>, config: &SyntheticSceneConfig) {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let lambda = config.noise_rate * config.duration;
    let poisson = Poisson::new(lambda).expect("positive rate");
    for y in 0..config.height {
        for x in 0..config.width {
            let count = poisson.sample(&mut rng) as u64;
            for _ in 0..count {
                let t = rng.random_range(0.0..config.duration);
                let p = if rng.random_bool(0.5) { 1 } else { -1 };
                out.push(Event::new(x as u16, y as u16, t, p));
            }
        }
    }
}
