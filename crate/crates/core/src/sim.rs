//! Monte Carlo rendezvous under primary-user traffic.
//!
//! One *run* places `X` PUs on distinct channels (shared by every SU pair in
//! the run). Each SU pair then draws its own sequences, relative clock offset
//! and PU activity, and hops until both radios sit on the same channel in a
//! slot where that channel's PU (if any) is silent.
//!
//! Randomness is split into counter-addressed ChaCha8 streams keyed by
//! `(seed, run, pair)`, so results do not depend on thread scheduling. PU
//! activity for slot `t` and PU `j` is read at a fixed word position of the
//! activity stream and compared against `p`; with a common seed, raising `p`
//! or `X` can therefore only block more rendezvous, never fewer.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::Direction;
use crate::sequence::{farch_pair, ChannelId, Permutation, SequencePair};

const MAX_SU_PAIRS: usize = 0xFFFF;
const PLACEMENT_LANE: u64 = 0xFFFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TrafficMode {
    /// Every PU transmits independently with probability `p` in each slot.
    #[default]
    PerSlot,
    /// Every PU is either on or off for the whole trial.
    #[serde(rename = "static")]
    StaticPerRun,
}

impl TrafficMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TrafficMode::PerSlot => "per-slot",
            TrafficMode::StaticPerRun => "static",
        }
    }
}

impl std::str::FromStr for TrafficMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-slot" | "per_slot" => Ok(TrafficMode::PerSlot),
            "static" | "static-per-run" | "static_per_run" => Ok(TrafficMode::StaticPerRun),
            other => Err(invalid(format!("unknown traffic mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_channels: usize,
    pub n_pus: usize,
    pub transmit_prob: f64,
    #[serde(default)]
    pub traffic_mode: TrafficMode,
    #[serde(default = "default_pairs")]
    pub n_su_pairs: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    /// Defaults to `4 * N²`.
    #[serde(default)]
    pub max_slots: Option<usize>,
}

fn default_pairs() -> usize {
    10
}

fn default_trials() -> usize {
    10_000
}

impl Scenario {
    /// 10 SU pairs, 10 000 runs, per-slot traffic.
    pub fn new(n_channels: usize, n_pus: usize, transmit_prob: f64, seed: u64) -> Self {
        Self {
            n_channels,
            n_pus,
            transmit_prob,
            traffic_mode: TrafficMode::PerSlot,
            n_su_pairs: default_pairs(),
            trials: default_trials(),
            seed,
            max_slots: None,
        }
    }

    pub fn max_slots(&self) -> usize {
        self.max_slots
            .unwrap_or(4 * self.n_channels * self.n_channels)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_channels;
        if n < 2 {
            return Err(invalid(format!("need at least 2 channels, got {n}")));
        }
        if self.n_pus >= n {
            return Err(invalid(format!(
                "X = {} PUs must be fewer than N = {n} channels",
                self.n_pus
            )));
        }
        if !(0.0..=1.0).contains(&self.transmit_prob) {
            return Err(invalid(format!(
                "transmit probability {} outside [0, 1]",
                self.transmit_prob
            )));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.n_su_pairs == 0 || self.n_su_pairs > MAX_SU_PAIRS {
            return Err(invalid(format!(
                "SU pair count {} outside 1..={MAX_SU_PAIRS}",
                self.n_su_pairs
            )));
        }
        if self.max_slots() < n * n {
            return Err(invalid(format!(
                "max_slots {} below N² = {}",
                self.max_slots(),
                n * n
            )));
        }
        Ok(())
    }
}

/// Where each SU pair's sequences come from.
#[derive(Debug, Clone)]
pub enum PairSource {
    /// A fresh random FARCH permutation per SU pair per run.
    FreshFarch,
    /// The same pair every time.
    Fixed(SequencePair),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// 1-based slot of the later-starting SU.
    pub ttr: usize,
    pub rendezvous_channel: ChannelId,
    pub shift: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialResult {
    Rendezvous(TrialOutcome),
    Timeout { shift: usize, direction: Direction },
}

impl TrialResult {
    pub fn outcome(&self) -> Option<&TrialOutcome> {
        match self {
            TrialResult::Rendezvous(o) => Some(o),
            TrialResult::Timeout { .. } => None,
        }
    }
}

/// Random streams for one SU pair in one run.
pub struct TrialRng {
    setup: ChaCha8Rng,
    activity: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(seed: u64, run: u64, pair_index: u64) -> Self {
        let lane = (run << 16) | (pair_index & 0xFFFF);
        Self {
            setup: stream(seed, lane << 1),
            activity: stream(seed, (lane << 1) | 1),
        }
    }

    /// Stream for sequence and offset draws.
    pub fn setup(&mut self) -> &mut ChaCha8Rng {
        &mut self.setup
    }

    fn pu_transmitting(&mut self, slot: usize, pu: usize, n_channels: usize, p: f64) -> bool {
        let pos = (slot as u128 * n_channels as u128 + pu as u128) * 2;
        self.activity.set_word_pos(pos);
        let u = (self.activity.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        u < p
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Channels hosting PUs, in placement order (PU `j` sits on entry `j`).
fn place_pus<R: Rng + ?Sized>(n_channels: usize, n_pus: usize, rng: &mut R) -> Vec<usize> {
    let mut channels: Vec<usize> = (0..n_channels).collect();
    channels.shuffle(rng);
    channels.truncate(n_pus);
    channels
}

fn run_placement(seed: u64, run: u64, scenario: &Scenario) -> Vec<usize> {
    let mut rng = stream(seed, ((run << 16) | PLACEMENT_LANE) << 1);
    place_pus(scenario.n_channels, scenario.n_pus, &mut rng)
}

/// Hops one SU pair against a fixed PU placement.
pub fn simulate_pair(
    pair: &SequencePair,
    scenario: &Scenario,
    pu_channels: &[usize],
    rng: &mut TrialRng,
) -> TrialResult {
    let n = pair.n_channels();
    let t = pair.period();
    let shift = rng.setup.gen_range(0..t);
    let direction = if rng.setup.gen::<bool>() {
        Direction::SenderAhead
    } else {
        Direction::ReceiverAhead
    };
    let (ahead, behind) = direction.orient(pair.sender(), pair.receiver());

    let mut pu_on = vec![None; n];
    for (j, &c) in pu_channels.iter().enumerate() {
        pu_on[c] = Some(j);
    }

    let p = scenario.transmit_prob;
    for slot in 0..scenario.max_slots() {
        let c = behind.at(slot);
        if ahead.at(shift + slot) != c {
            continue;
        }
        let blocked = match pu_on[c] {
            None => false,
            Some(j) => {
                let activity_slot = match scenario.traffic_mode {
                    TrafficMode::PerSlot => slot,
                    TrafficMode::StaticPerRun => 0,
                };
                rng.pu_transmitting(activity_slot, j, n, p)
            }
        };
        if !blocked {
            return TrialResult::Rendezvous(TrialOutcome {
                ttr: slot + 1,
                rendezvous_channel: ChannelId(c),
                shift,
                direction,
            });
        }
    }
    TrialResult::Timeout { shift, direction }
}

/// One trial: place PUs, draw an offset and direction, hop until rendezvous.
pub fn run_trial(
    pair: &SequencePair,
    scenario: &Scenario,
    rng: &mut TrialRng,
) -> Result<TrialResult> {
    scenario.validate()?;
    check_pair(pair, scenario)?;
    let placement = place_pus(scenario.n_channels, scenario.n_pus, &mut rng.setup);
    Ok(simulate_pair(pair, scenario, &placement, rng))
}

fn check_pair(pair: &SequencePair, scenario: &Scenario) -> Result<()> {
    if pair.n_channels() != scenario.n_channels {
        return Err(invalid(format!(
            "pair has {} channels but scenario has {}",
            pair.n_channels(),
            scenario.n_channels
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub mean_ttr: f64,
    /// Sample standard deviation over sqrt(count); NaN below two samples.
    pub std_err: f64,
    /// Completed SU-pair trials contributing to the mean.
    pub n_trials: usize,
    pub timeout_count: usize,
    pub max_ttr: usize,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    count: u64,
    sum: u64,
    sum_sq: u128,
    max: usize,
    timeouts: usize,
}

impl Tally {
    fn push(&mut self, r: &TrialResult) {
        match r {
            TrialResult::Rendezvous(o) => {
                let v = o.ttr as u64;
                self.count += 1;
                self.sum += v;
                self.sum_sq += (v as u128) * (v as u128);
                self.max = self.max.max(o.ttr);
            }
            TrialResult::Timeout { .. } => self.timeouts += 1,
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.max = self.max.max(o.max);
        self.timeouts += o.timeouts;
        self
    }

    fn stats(&self) -> SimStats {
        let n = self.count as f64;
        let mean = if self.count == 0 {
            f64::NAN
        } else {
            self.sum as f64 / n
        };
        let std_err = if self.count < 2 {
            f64::NAN
        } else {
            // exact integer sums keep this independent of evaluation order
            let ss = self.sum_sq as f64 - (self.sum as f64) * (self.sum as f64) / n;
            (ss.max(0.0) / (n - 1.0)).sqrt() / n.sqrt()
        };
        SimStats {
            mean_ttr: mean,
            std_err,
            n_trials: self.count as usize,
            timeout_count: self.timeouts,
            max_ttr: self.max,
        }
    }
}

/// Every SU-pair trial of every run, in (run, pair) order.
pub fn simulate_all(source: &PairSource, scenario: &Scenario) -> Result<Vec<TrialResult>> {
    scenario.validate()?;
    if let PairSource::Fixed(pair) = source {
        check_pair(pair, scenario)?;
    }
    let per_run: Vec<Vec<TrialResult>> = (0..scenario.trials as u64)
        .into_par_iter()
        .map(|run| simulate_run(source, scenario, run))
        .collect::<Result<_>>()?;
    Ok(per_run.into_iter().flatten().collect())
}

fn simulate_run(source: &PairSource, scenario: &Scenario, run: u64) -> Result<Vec<TrialResult>> {
    let placement = run_placement(scenario.seed, run, scenario);
    (0..scenario.n_su_pairs as u64)
        .map(|idx| {
            let mut rng = TrialRng::new(scenario.seed, run, idx);
            Ok(match source {
                PairSource::FreshFarch => {
                    let w = Permutation::random_with(scenario.n_channels, &mut rng.setup)?;
                    simulate_pair(&farch_pair(&w)?, scenario, &placement, &mut rng)
                }
                PairSource::Fixed(pair) => simulate_pair(pair, scenario, &placement, &mut rng),
            })
        })
        .collect()
}

/// Mean TTR over `trials` runs of `n_su_pairs` pairs each.
pub fn average_ttr(source: &PairSource, scenario: &Scenario) -> Result<SimStats> {
    scenario.validate()?;
    if let PairSource::Fixed(pair) = source {
        check_pair(pair, scenario)?;
    }
    let tally = (0..scenario.trials as u64)
        .into_par_iter()
        .map(|run| {
            let mut t = Tally::default();
            for r in simulate_run(source, scenario, run)? {
                t.push(&r);
            }
            Ok::<_, Error>(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.stats())
}

/// Cartesian grid of scenarios. `n_pus` and `n_pus_fraction` are exclusive;
/// the fraction form sets `X = floor(fraction * N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_channels: Vec<usize>,
    #[serde(default)]
    pub n_pus: Option<Vec<usize>>,
    #[serde(default)]
    pub n_pus_fraction: Option<f64>,
    pub transmit_prob: Vec<f64>,
    #[serde(default)]
    pub traffic_mode: TrafficMode,
    #[serde(default = "default_pairs")]
    pub n_su_pairs: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub max_slots: Option<usize>,
}

impl SweepConfig {
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        let mut out = Vec::new();
        for &n in &self.n_channels {
            let xs: Vec<usize> = match (&self.n_pus, self.n_pus_fraction) {
                (Some(xs), None) => xs.clone(),
                (None, Some(f)) => vec![(f * n as f64 + 1e-9).floor().max(0.0) as usize],
                (None, None) => vec![0],
                (Some(_), Some(_)) => {
                    return Err(invalid("give either n_pus or n_pus_fraction, not both"))
                }
            };
            for x in xs {
                for &p in &self.transmit_prob {
                    out.push(Scenario {
                        n_channels: n,
                        n_pus: x,
                        transmit_prob: p,
                        traffic_mode: self.traffic_mode,
                        n_su_pairs: self.n_su_pairs,
                        trials: self.trials,
                        seed: self.seed,
                        max_slots: self.max_slots,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// One sweep point. Invalid points carry `error` and no statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub x: usize,
    pub p: f64,
    pub traffic_mode: TrafficMode,
    pub trials: usize,
    pub mean_ttr: Option<f64>,
    pub std_err: Option<f64>,
    pub timeouts: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_result(scenario: &Scenario, result: Result<SimStats>) -> Self {
        let (stats, error) = match result {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            n: scenario.n_channels,
            x: scenario.n_pus,
            p: scenario.transmit_prob,
            traffic_mode: scenario.traffic_mode,
            trials: scenario.trials,
            mean_ttr: stats.map(|s| s.mean_ttr),
            std_err: stats.map(|s| s.std_err),
            timeouts: stats.map(|s| s.timeout_count),
            seed: scenario.seed,
            error,
        }
    }
}

/// Runs every grid point with fresh FARCH pairs. Points share the master
/// seed, so neighbouring rows are coupled. `progress` sees each row as it
/// completes.
pub fn sweep(
    config: &SweepConfig,
    mut progress: impl FnMut(usize, usize, &SweepRow),
) -> Result<Vec<SweepRow>> {
    let scenarios = config.scenarios()?;
    let total = scenarios.len();
    let mut rows = Vec::with_capacity(total);
    for (i, sc) in scenarios.iter().enumerate() {
        let row = SweepRow::from_result(sc, average_ttr(&PairSource::FreshFarch, sc));
        progress(i + 1, total, &row);
        rows.push(row);
    }
    Ok(rows)
}
