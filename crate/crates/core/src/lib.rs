//! Distortion measurement between raw event streams and dense grid
//! representations, plus a stage-wise search over a parametrized
//! representation family.
//!
//! The pipeline: synthesize or load an event stream, split it into sample
//! windows, build a grid representation per window, embed both sides as
//! feature point sets, and solve an entropic Gromov-Wasserstein problem
//! between their similarity matrices. Batched means of that objective
//! drive the sweeps and the categorical search.

pub mod error;
pub mod event_model;
pub mod gw_metric;
pub mod report;
pub mod repr_search;
pub mod representations;

pub use error::{Error, Result};
