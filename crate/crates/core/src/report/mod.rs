//! Batched studies over a sample corpus: channel-count sweeps, blur
//! sweeps, sample-count ranking studies and the invariance check, all
//! emitting deterministic serializable reports.

mod corpus;
mod kendall;
mod sweep;

pub use corpus::{default_demo_corpus, load_corpus, CorpusIndex, CorpusRecipe};
pub use kendall::kendall_tau;
pub use sweep::{
    invariance_report, sweep_blur, sweep_channels, sweep_samples, InvarianceReport,
    InvarianceSuite, SampleCurve, SampleSweepReport, SweepAxis, SweepFamily, SweepPoint,
    SweepReport,
};
