//! Asynchronous channel-hopping sequence pairs with maximal rendezvous
//! diversity.
//!
//! - [`sequence`]: channel-hopping words, cyclic shifts, the FARCH
//!   sender/receiver construction and negative-control baselines.
//! - [`metrics`]: exact diversity, MTTR, MCTTR and MTTR_h by enumerating
//!   every clock offset, plus lower-bound checks.
//! - [`sim`]: Monte Carlo average TTR under primary-user traffic.
//! - [`format`] and [`report`]: sequence files and plot-ready CSV.

pub mod error;
pub mod format;
pub mod metrics;
pub mod report;
pub mod sequence;
pub mod sim;

pub use error::{Error, Result};
pub use metrics::{
    analyze, bound_report, build_profile, correlation_sum_check, hit_count, is_max_diversity,
    metrics_report, mttr_h, mttr_h_oracle, Analysis, BoundCheck, BoundReport, ConditionalBound,
    Direction, MetricsReport, RendezvousProfile,
};
pub use sequence::{
    baseline_pair, farch_pair, random_permutation, BaselineKind, ChannelId, ChannelSequence,
    PairOrigin, Permutation, SequencePair,
};
pub use sim::{
    average_ttr, run_trial, simulate_all, sweep, PairSource, Scenario, SimStats, SweepConfig,
    SweepRow, TrafficMode, TrialOutcome, TrialResult, TrialRng,
};
