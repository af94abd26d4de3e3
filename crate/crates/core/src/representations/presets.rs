//! Named representations: 2D histogram, voxel grid, mixed-density event
//! stack, time surface and time-ordered recent event queues.

use super::grid::FeatureGrid;
use crate::error::{Error, Result};
use crate::event_model::Sample;
use serde::{Deserialize, Serialize};

/// Time-surface decay constant, seconds.
const TAU: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Hist2,
    Voxel12,
    Mdes12,
    TimeSurface12,
    Tore12,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::Hist2,
        PresetName::Voxel12,
        PresetName::Mdes12,
        PresetName::TimeSurface12,
        PresetName::Tore12,
    ];
}

impl std::str::FromStr for PresetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hist2" => Ok(PresetName::Hist2),
            "voxel12" => Ok(PresetName::Voxel12),
            "mdes12" => Ok(PresetName::Mdes12),
            "timesurface12" => Ok(PresetName::TimeSurface12),
            "tore12" => Ok(PresetName::Tore12),
            other => Err(Error::validation(format!("unknown preset '{other}'"))),
        }
    }
}

impl std::fmt::Display for PresetName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PresetName::Hist2 => "hist2",
            PresetName::Voxel12 => "voxel12",
            PresetName::Mdes12 => "mdes12",
            PresetName::TimeSurface12 => "timesurface12",
            PresetName::Tore12 => "tore12",
        };
        f.write_str(s)
    }
}

pub fn build_preset(sample: &Sample, name: PresetName) -> Result<FeatureGrid> {
    match name {
        PresetName::Hist2 => build_hist2(sample),
        PresetName::Voxel12 => build_voxel(sample, 12),
        PresetName::Mdes12 => build_mdes(sample, 12),
        PresetName::TimeSurface12 => build_time_surface(sample, 12),
        PresetName::Tore12 => build_tore(sample, 12),
    }
}

/// Two channels: per-pixel count of positive events, then negative.
fn build_hist2(sample: &Sample) -> Result<FeatureGrid> {
    let mut grid = FeatureGrid::zeros(sample.width as usize, sample.height as usize, 2);
    for e in &sample.events {
        let c = if e.p > 0 { 0 } else { 1 };
        grid.add(e.x as usize, e.y as usize, c, 1.0);
    }
    Ok(grid)
}

/// Temporal bins at coordinates t* * (bins - 1); each event deposits its
/// polarity into the two nearest bins with bilinear weights.
pub fn build_voxel(sample: &Sample, bins: usize) -> Result<FeatureGrid> {
    if bins == 0 {
        return Err(Error::validation("voxel grid needs at least one bin"));
    }
    let mut grid = FeatureGrid::zeros(sample.width as usize, sample.height as usize, bins);
    for e in &sample.events {
        let pos = sample.normalized_t(e.t) * (bins - 1) as f64;
        let p = f64::from(e.p);
        let lo = pos.floor() as usize;
        for b in [lo, lo + 1] {
            if b < bins {
                let w = 1.0 - (b as f64 - pos).abs();
                if w > 0.0 {
                    grid.add(e.x as usize, e.y as usize, b, p * w);
                }
            }
        }
    }
    Ok(grid)
}

/// Channel c keeps the most recent ceil(N_e / 2^c) events; at each pixel
/// the most recent of those events' polarity wins (stack semantics).
pub fn build_mdes(sample: &Sample, channels: usize) -> Result<FeatureGrid> {
    if channels == 0 {
        return Err(Error::validation("mdes needs at least one channel"));
    }
    let (w, h) = (sample.width as usize, sample.height as usize);
    let mut grid = FeatureGrid::zeros(w, h, channels);
    let n = sample.events.len();
    if n == 0 {
        return Ok(grid);
    }
    for c in 0..channels {
        let fraction = 1.0 / (1u64 << c.min(63)) as f64;
        let keep = ((fraction * n as f64).ceil() as usize).clamp(1, n);
        // Events are time-sorted; later writes overwrite earlier ones.
        for e in &sample.events[n - keep..] {
            grid.set(e.x as usize, e.y as usize, c, f64::from(e.p));
        }
    }
    Ok(grid)
}

/// Exponential decay of the time since each pixel's last event, sampled at
/// equally spaced reference times; one half of the channels per polarity.
fn build_time_surface(sample: &Sample, channels: usize) -> Result<FeatureGrid> {
    if channels == 0 || channels % 2 != 0 {
        return Err(Error::validation("time surface needs an even channel count"));
    }
    let refs = channels / 2;
    let (w, h) = (sample.width as usize, sample.height as usize);
    let mut grid = FeatureGrid::zeros(w, h, channels);
    let dt = sample.duration();
    let ref_time = |k: usize| {
        if refs == 1 {
            sample.t_end
        } else {
            sample.t_start + k as f64 * dt / (refs - 1) as f64
        }
    };
    // last event time per pixel, per polarity, updated as the reference
    // times advance through the sorted events.
    let mut last = vec![[f64::NAN; 2]; w * h];
    let mut next_ev = 0;
    for k in 0..refs {
        let s = ref_time(k);
        while next_ev < sample.events.len() && sample.events[next_ev].t <= s {
            let e = &sample.events[next_ev];
            let side = if e.p > 0 { 0 } else { 1 };
            last[e.y as usize * w + e.x as usize][side] = e.t;
            next_ev += 1;
        }
        for idx in 0..w * h {
            for side in 0..2 {
                let t_last = last[idx][side];
                if t_last.is_finite() {
                    let c = side * refs + k;
                    grid.set(idx % w, idx / w, c, (-(s - t_last) / TAU).exp());
                }
            }
        }
    }
    Ok(grid)
}

/// Per-pixel, per-polarity queues of the most recent normalized event ages
/// (t_end - t) / dT, most recent first. Queues with at least one event are
/// padded with the maximal age 1; pixels with no events of that polarity
/// stay 0.
fn build_tore(sample: &Sample, channels: usize) -> Result<FeatureGrid> {
    if channels == 0 || channels % 2 != 0 {
        return Err(Error::validation("tore needs an even channel count"));
    }
    let cap = channels / 2;
    let (w, h) = (sample.width as usize, sample.height as usize);
    let mut grid = FeatureGrid::zeros(w, h, channels);
    let dt = sample.duration();
    let mut queues: Vec<[Vec<f64>; 2]> = vec![[Vec::new(), Vec::new()]; w * h];
    // Iterate newest-first so each queue holds the `cap` most recent ages.
    for e in sample.events.iter().rev() {
        let side = if e.p > 0 { 0 } else { 1 };
        let q = &mut queues[e.y as usize * w + e.x as usize][side];
        if q.len() < cap {
            q.push((sample.t_end - e.t) / dt);
        }
    }
    for idx in 0..w * h {
        for side in 0..2 {
            let q = &queues[idx][side];
            if q.is_empty() {
                continue;
            }
            for slot in 0..cap {
                let v = q.get(slot).copied().unwrap_or(1.0);
                grid.set(idx % w, idx / w, side * cap + slot, v);
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::{Event, EventStream};

    fn sample(events: Vec<Event>, w: u32, h: u32) -> Sample {
        EventStream::new(events, w, h).unwrap().slice_window(0.0, 1.0).unwrap()
    }

    #[test]
    fn hist2_counts_polarities() {
        let s = sample(
            vec![Event::new(0, 0, 0.1, 1), Event::new(0, 0, 0.2, 1), Event::new(0, 0, 0.3, -1)],
            2,
            2,
        );
        let g = build_preset(&s, PresetName::Hist2).unwrap();
        assert_eq!(g.get(0, 0, 0), 2.0);
        assert_eq!(g.get(0, 0, 1), 1.0);
        assert_eq!(g.channel_sum(0), 2.0);
        assert_eq!(g.channel_sum(1), 1.0);
    }

    #[test]
    fn voxel_endpoint_event_fills_single_bin() {
        let s = sample(vec![Event::new(0, 0, 0.0, 1)], 2, 2);
        let g = build_voxel(&s, 12).unwrap();
        assert_eq!(g.get(0, 0, 0), 1.0);
        for b in 1..12 {
            assert_eq!(g.get(0, 0, b), 0.0);
        }
    }

    #[test]
    fn voxel_mass_equals_signed_polarity_sum() {
        let s = sample(
            vec![
                Event::new(0, 0, 0.13, 1),
                Event::new(1, 0, 0.57, -1),
                Event::new(1, 1, 0.99, 1),
                Event::new(0, 1, 0.42, 1),
            ],
            2,
            2,
        );
        let g = build_voxel(&s, 12).unwrap();
        let total: f64 = (0..12).map(|b| g.channel_sum(b)).sum();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mdes_last_channel_is_most_recent_event() {
        let events: Vec<Event> = (0..8)
            .map(|i| Event::new(0, 0, 0.1 * i as f64, if i == 7 { -1 } else { 1 }))
            .collect();
        let s = sample(events, 2, 2);
        let g = build_mdes(&s, 12).unwrap();
        // Channel 3 keeps ceil(8/8) = 1 event: the most recent one, p = -1.
        assert_eq!(g.get(0, 0, 3), -1.0);
        // Channel 0 sees all events but the most recent overwrite wins.
        assert_eq!(g.get(0, 0, 0), -1.0);
    }

    #[test]
    fn mdes_empty_sample_is_zero() {
        let s = sample(vec![], 2, 2);
        let g = build_mdes(&s, 12).unwrap();
        assert!(g.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn time_surface_values_in_unit_range() {
        let s = sample(
            vec![Event::new(0, 0, 0.2, 1), Event::new(1, 1, 0.8, -1), Event::new(0, 1, 0.5, 1)],
            2,
            2,
        );
        let g = build_preset(&s, PresetName::TimeSurface12).unwrap();
        assert!(g.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        // The positive event at t=0.2 decays at reference time t=0.2 (k=1).
        assert!((g.get(0, 0, 1) - 1.0).abs() < 1e-12);
        // Pixel (1, 0) never fires: all zero.
        assert!(g.pixel(1, 0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tore_queue_pads_with_max_age() {
        let s = sample(vec![Event::new(0, 0, 0.75, 1)], 2, 2);
        let g = build_preset(&s, PresetName::Tore12).unwrap();
        // One positive event of age 0.25, the rest of the queue padded to 1.
        assert!((g.get(0, 0, 0) - 0.25).abs() < 1e-12);
        for slot in 1..6 {
            assert_eq!(g.get(0, 0, slot), 1.0);
        }
        // No negative events at that pixel: negative half stays 0.
        for slot in 6..12 {
            assert_eq!(g.get(0, 0, slot), 0.0);
        }
    }

    #[test]
    fn tore_keeps_most_recent_first() {
        let events: Vec<Event> = (0..8).map(|i| Event::new(0, 0, 0.1 * i as f64 + 0.1, 1)).collect();
        let s = sample(events, 2, 2);
        let g = build_preset(&s, PresetName::Tore12).unwrap();
        // Most recent event t=0.8 has the smallest age.
        assert!((g.get(0, 0, 0) - 0.2).abs() < 1e-12);
        assert!((g.get(0, 0, 5) - 0.7).abs() < 1e-12);
    }
}
