//! Exact rendezvous metrics by enumeration over every clock offset.
//!
//! For a pair `(u, v)` with period `T` there are two ways to count TTR at a
//! relative shift `tau`: `u` ahead (count from `v`'s first slot) and `v`
//! ahead (count from `u`'s first slot). The [`RendezvousProfile`] records, for
//! each direction, shift and channel, the first 1-based slot of the behind
//! sequence at which both sequences sit on that channel. Every metric here
//! (diversity, MTTR, MCTTR, MTTR_h) is a reduction of that table.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sequence::{check_compatible, ChannelId, ChannelSequence, SequencePair};

/// Which sequence's clock runs ahead. TTR is counted from the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Sender (`u`) ahead by `tau`; slots are counted on the receiver.
    SenderAhead,
    /// Receiver (`v`) ahead by `tau`; slots are counted on the sender.
    ReceiverAhead,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::SenderAhead, Direction::ReceiverAhead];

    fn index(self) -> usize {
        match self {
            Direction::SenderAhead => 0,
            Direction::ReceiverAhead => 1,
        }
    }

    /// `(ahead, behind)` for a sender/receiver pair.
    pub fn orient<'a>(
        self,
        sender: &'a ChannelSequence,
        receiver: &'a ChannelSequence,
    ) -> (&'a ChannelSequence, &'a ChannelSequence) {
        match self {
            Direction::SenderAhead => (sender, receiver),
            Direction::ReceiverAhead => (receiver, sender),
        }
    }
}

/// Number of slots `i < prefix` with `ahead[tau + i] = behind[i] = k`, where
/// `u` plays the sender and `v` the receiver role for `direction`.
pub fn hit_count(
    u: &ChannelSequence,
    v: &ChannelSequence,
    direction: Direction,
    tau: usize,
    prefix: usize,
    k: ChannelId,
) -> Result<usize> {
    check_compatible(u, v)?;
    let t = u.period();
    if prefix == 0 || prefix > t {
        return Err(invalid(format!("prefix length {prefix} outside 1..={t}")));
    }
    if k.0 >= u.n_channels() {
        return Err(invalid(format!(
            "channel {k} outside 0..{}",
            u.n_channels()
        )));
    }
    let (ahead, behind) = direction.orient(u, v);
    Ok((0..prefix)
        .filter(|&i| behind.at(i) == k.0 && ahead.at(tau + i) == k.0)
        .count())
}

const PARALLEL_WORK: usize = 1 << 16;

/// First-rendezvous slot per (direction, shift, channel).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RendezvousProfile {
    n_channels: usize,
    period: usize,
    // row-major: [direction][tau][channel]
    first_slot: Vec<Option<usize>>,
}

impl RendezvousProfile {
    pub fn build(pair: &SequencePair) -> Self {
        let n = pair.n_channels();
        let t = pair.period();
        let mut first_slot = vec![None; 2 * t * n];
        let fill_row = |(row, cells): (usize, &mut [Option<usize>])| {
            let direction = Direction::BOTH[row / t];
            let tau = row % t;
            let (ahead, behind) = direction.orient(pair.sender(), pair.receiver());
            let mut filled = 0;
            for i in 0..t {
                let c = behind.at(i);
                if ahead.at(tau + i) == c && cells[c].is_none() {
                    cells[c] = Some(i + 1);
                    filled += 1;
                    if filled == n {
                        break;
                    }
                }
            }
        };
        // each row scans up to T slots
        if t * t >= PARALLEL_WORK {
            first_slot.par_chunks_mut(n).enumerate().for_each(fill_row);
        } else {
            first_slot.chunks_mut(n).enumerate().for_each(fill_row);
        }
        Self {
            n_channels: n,
            period: t,
            first_slot,
        }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// 1-based first slot on channel `k`, or `None` if the pair never meets
    /// there within one period at this shift.
    pub fn first_slot(&self, direction: Direction, tau: usize, k: ChannelId) -> Option<usize> {
        self.row(direction, tau % self.period)[k.0]
    }

    fn row(&self, direction: Direction, tau: usize) -> &[Option<usize>] {
        let start = (direction.index() * self.period + tau) * self.n_channels;
        &self.first_slot[start..start + self.n_channels]
    }

    fn rows(&self) -> impl Iterator<Item = &[Option<usize>]> {
        self.first_slot.chunks(self.n_channels)
    }

    pub fn is_max_diversity(&self) -> bool {
        self.first_slot.iter().all(Option::is_some)
    }

    /// Smallest number of distinct rendezvous channels over all shifts and
    /// both directions.
    pub fn diversity(&self) -> usize {
        self.rows()
            .map(|r| r.iter().filter(|c| c.is_some()).count())
            .min()
            .unwrap_or(0)
    }

    /// Worst case over shifts of the first rendezvous on any channel. Defined
    /// whenever every (direction, shift) meets on at least one channel.
    pub fn mttr(&self) -> Option<usize> {
        self.rows()
            .map(|r| r.iter().flatten().min().copied())
            .try_fold(0, |acc, m| m.map(|m| acc.max(m)))
    }

    /// Worst-case TTR when an adversary blocks at most `h` channels.
    ///
    /// Per shift the adversary blocks the `h` channels that meet earliest, so
    /// the TTR there is the `(h+1)`-th smallest first-slot value.
    pub fn mttr_h(&self, h: usize) -> Result<usize> {
        self.check_h(h)?;
        if !self.is_max_diversity() {
            return Err(not_max_diversity());
        }
        Ok(self
            .rows()
            .map(|r| {
                let mut slots: Vec<usize> = r.iter().flatten().copied().collect();
                *slots.select_nth_unstable(h).1
            })
            .max()
            .unwrap_or(0))
    }

    /// MTTR_h for every `h` in `0..N`; all `None` without maximal diversity
    /// except entry 0, which follows [`RendezvousProfile::mttr`].
    pub fn mttr_h_curve(&self) -> Vec<Option<usize>> {
        let n = self.n_channels;
        if !self.is_max_diversity() {
            let mut curve = vec![None; n];
            curve[0] = self.mttr();
            return curve;
        }
        let mut curve = vec![0; n];
        for row in self.rows() {
            let mut slots: Vec<usize> = row.iter().flatten().copied().collect();
            slots.sort_unstable();
            for (worst, s) in curve.iter_mut().zip(slots) {
                *worst = (*worst).max(s);
            }
        }
        curve.into_iter().map(Some).collect()
    }

    fn check_h(&self, h: usize) -> Result<()> {
        if h >= self.n_channels {
            return Err(invalid(format!("h = {h} outside 0..{}", self.n_channels)));
        }
        Ok(())
    }
}

fn not_max_diversity() -> Error {
    Error::MetricUndefined(
        "pair does not have maximal rendezvous diversity; MCTTR and MTTR_h are undefined".into(),
    )
}

pub fn build_profile(pair: &SequencePair) -> RendezvousProfile {
    RendezvousProfile::build(pair)
}

pub fn is_max_diversity(pair: &SequencePair) -> bool {
    RendezvousProfile::build(pair).is_max_diversity()
}

pub fn mttr_h(pair: &SequencePair, h: usize) -> Result<usize> {
    RendezvousProfile::build(pair).mttr_h(h)
}

/// MTTR_h straight from its definition: every direction, every shift and
/// every available set of `N - h` channels, scanning the sequences directly.
/// Exponential in `N`; kept as a cross-check of [`RendezvousProfile::mttr_h`].
pub fn mttr_h_oracle(pair: &SequencePair, h: usize) -> Result<usize> {
    let n = pair.n_channels();
    let t = pair.period();
    if h >= n {
        return Err(invalid(format!("h = {h} outside 0..{n}")));
    }
    if n > 63 {
        return Err(invalid("oracle supports at most 63 channels"));
    }
    let (u, v) = (pair.sender(), pair.receiver());
    for direction in Direction::BOTH {
        for tau in 0..t {
            for k in 0..n {
                if hit_count(u, v, direction, tau, t, ChannelId(k))? == 0 {
                    return Err(not_max_diversity());
                }
            }
        }
    }

    let available_sets: Vec<u64> = (0..n)
        .combinations(n - h)
        .map(|set| set.iter().fold(0u64, |m, &k| m | 1 << k))
        .collect();
    let mut worst = 0;
    for direction in Direction::BOTH {
        let (ahead, behind) = direction.orient(u, v);
        for tau in 0..t {
            for &mask in &available_sets {
                let ttr = (0..t)
                    .find(|&i| {
                        let c = behind.at(i);
                        ahead.at(tau + i) == c && mask & (1 << c) != 0
                    })
                    .map(|i| i + 1)
                    .ok_or_else(not_max_diversity)?;
                worst = worst.max(ttr);
            }
        }
    }
    Ok(worst)
}

/// Returns `(sum over tau of H_{v^tau, u_m}(k), x_k * y_k)` where `x_k`
/// counts `k` in the first `m` slots of `u` and `y_k` counts `k` in `v`.
/// The two are always equal.
pub fn correlation_sum_check(
    u: &ChannelSequence,
    m: usize,
    v: &ChannelSequence,
    k: ChannelId,
) -> Result<(usize, usize)> {
    check_compatible(u, v)?;
    let t = u.period();
    let mut lhs = 0;
    for tau in 0..t {
        lhs += hit_count(u, v, Direction::ReceiverAhead, tau, m, k)?;
    }
    let x = u.channel_counts_in_prefix(m)[k.0];
    let y = v.channel_counts()[k.0];
    Ok((lhs, x * y))
}

/// Measured metrics of one pair. Slot counts are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub period: usize,
    pub max_diversity: bool,
    pub diversity: usize,
    pub mttr: Option<usize>,
    pub mcttr: Option<usize>,
    /// Indexed by `h = 0..N`.
    pub mttr_h: Vec<Option<usize>>,
    pub sender_visits: Vec<usize>,
    pub receiver_visits: Vec<usize>,
}

impl MetricsReport {
    pub fn from_profile(pair: &SequencePair, profile: &RendezvousProfile) -> Self {
        let mttr_h = profile.mttr_h_curve();
        Self {
            n: pair.n_channels(),
            period: pair.period(),
            max_diversity: profile.is_max_diversity(),
            diversity: profile.diversity(),
            mttr: mttr_h[0],
            mcttr: mttr_h[mttr_h.len() - 1],
            mttr_h,
            sender_visits: pair.sender().channel_counts(),
            receiver_visits: pair.receiver().channel_counts(),
        }
    }
}

pub fn metrics_report(pair: &SequencePair) -> MetricsReport {
    MetricsReport::from_profile(pair, &RendezvousProfile::build(pair))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: usize,
    pub bound: usize,
    pub pass: bool,
}

impl BoundCheck {
    fn new(value: usize, bound: usize) -> Self {
        Self {
            value,
            bound,
            pass: value >= bound,
        }
    }
}

/// A lower bound that only holds for pairs with MCTTR = N².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalBound {
    pub h: usize,
    pub value: usize,
    pub bound: usize,
    pub pass: bool,
    pub applicable: bool,
}

/// Measured metrics against the MCTTR ≥ N², MTTR ≥ N and MTTR_h ≥ (h+1)N
/// lower bounds, plus the two necessary conditions for MCTTR = N².
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mcttr: BoundCheck,
    pub mttr: ConditionalBound,
    /// `h = 0..=N-2`.
    pub mttr_h: Vec<ConditionalBound>,
    pub uniform_frequency: bool,
    pub distinctness: bool,
}

impl BoundReport {
    pub fn from_report(pair: &SequencePair, report: &MetricsReport) -> Result<Self> {
        if !report.max_diversity {
            return Err(not_max_diversity());
        }
        let n = report.n;
        let curve: Vec<usize> = report.mttr_h.iter().map(|v| v.unwrap_or(0)).collect();
        let mcttr = curve[n - 1];
        let optimal_mcttr = mcttr == n * n;
        let conditional = |h: usize| {
            let bound = (h + 1) * n;
            ConditionalBound {
                h,
                value: curve[h],
                bound,
                pass: curve[h] >= bound,
                applicable: optimal_mcttr,
            }
        };
        Ok(Self {
            mcttr: BoundCheck::new(mcttr, n * n),
            mttr: conditional(0),
            mttr_h: (0..n - 1).map(conditional).collect(),
            uniform_frequency: pair.sender().is_uniform_frequency()
                && pair.receiver().is_uniform_frequency(),
            distinctness: pair.is_distinct(),
        })
    }

    /// Every applicable bound passes.
    pub fn all_pass(&self) -> bool {
        self.mcttr.pass
            && (!self.mttr.applicable || self.mttr.pass)
            && self.mttr_h.iter().all(|b| !b.applicable || b.pass)
    }
}

pub fn bound_report(pair: &SequencePair) -> Result<BoundReport> {
    BoundReport::from_report(pair, &metrics_report(pair))
}

/// Metrics plus bounds, in the shape written by `analyze`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    #[serde(flatten)]
    pub metrics: MetricsReport,
    /// `None` when the pair lacks maximal rendezvous diversity.
    pub bounds: Option<BoundReport>,
}

pub fn analyze(pair: &SequencePair) -> Analysis {
    let metrics = metrics_report(pair);
    let bounds = BoundReport::from_report(pair, &metrics).ok();
    Analysis { metrics, bounds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{
        baseline_pair, farch_pair, random_permutation, BaselineKind, Permutation,
    };
    use proptest::prelude::*;

    fn seq(n: usize, e: &[usize]) -> ChannelSequence {
        ChannelSequence::new(n, e.to_vec()).unwrap()
    }

    fn pair(n: usize, u: &[usize], v: &[usize]) -> SequencePair {
        SequencePair::new(seq(n, u), seq(n, v)).unwrap()
    }

    fn example_n4() -> SequencePair {
        farch_pair(&Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap()
    }

    fn example_n5() -> SequencePair {
        farch_pair(&Permutation::new(vec![1, 4, 3, 0, 2]).unwrap()).unwrap()
    }

    #[test]
    fn hit_count_examples() {
        let u = seq(2, &[0, 1]);
        assert_eq!(
            hit_count(&u, &u, Direction::SenderAhead, 0, 2, ChannelId(0)).unwrap(),
            1
        );

        let u = seq(3, &[1, 2, 0, 0, 0, 1, 2, 1, 2]);
        let v = seq(3, &[1, 0, 2, 1, 0, 2, 1, 0, 2]);
        for k in 0..3 {
            assert!(hit_count(&u, &v, Direction::SenderAhead, 0, 9, ChannelId(k)).unwrap() >= 1);
        }
    }

    #[test]
    fn hit_count_errors() {
        let u = seq(2, &[0, 1]);
        let v3 = seq(3, &[0, 1]);
        let long = seq(2, &[0, 1, 0]);
        let d = Direction::SenderAhead;
        assert!(matches!(
            hit_count(&u, &v3, d, 0, 1, ChannelId(0)),
            Err(Error::IncompatiblePair(_))
        ));
        assert!(matches!(
            hit_count(&u, &long, d, 0, 1, ChannelId(0)),
            Err(Error::IncompatiblePair(_))
        ));
        assert!(hit_count(&u, &u, d, 0, 0, ChannelId(0)).is_err());
        assert!(hit_count(&u, &u, d, 0, 3, ChannelId(0)).is_err());
        assert!(hit_count(&u, &u, d, 0, 2, ChannelId(2)).is_err());
    }

    #[test]
    fn single_slot_profile() {
        let p = RendezvousProfile::build(&SequencePair::new(seq(2, &[0]), seq(2, &[0])).unwrap());
        assert_eq!(
            p.first_slot(Direction::SenderAhead, 0, ChannelId(0)),
            Some(1)
        );
        assert_eq!(p.first_slot(Direction::SenderAhead, 0, ChannelId(1)), None);
        assert_eq!(p.mttr(), Some(1));
        assert!(!p.is_max_diversity());
    }

    #[test]
    fn example_profile_bounded_by_period() {
        let p = RendezvousProfile::build(&example_n4());
        assert!(p.is_max_diversity());
        for d in Direction::BOTH {
            for tau in 0..16 {
                for k in 0..4 {
                    let s = p.first_slot(d, tau, ChannelId(k)).unwrap();
                    assert!((1..=16).contains(&s));
                }
            }
        }
    }

    #[test]
    fn section_three_pair_has_mcttr_below_period() {
        let p = pair(2, &[0, 0, 1, 1, 0, 0, 1, 1], &[0, 0, 0, 0, 1, 1, 1, 1]);
        let prof = RendezvousProfile::build(&p);
        assert!(prof.is_max_diversity());
        assert_eq!(prof.mttr_h(1).unwrap(), 7);
        let b = bound_report(&p).unwrap();
        assert_eq!(b.mcttr.value, 7);
        assert!(b.mcttr.pass);
        assert!(!b.mttr.applicable);
    }

    #[test]
    fn diversity_negatives() {
        assert!(!is_max_diversity(
            &baseline_pair(BaselineKind::RoundRobin, 3, 0).unwrap()
        ));
        let c = pair(3, &[0, 0, 0], &[0, 0, 0]);
        assert!(!is_max_diversity(&c));
        assert!(matches!(mttr_h(&c, 1), Err(Error::MetricUndefined(_))));
        assert!(matches!(
            mttr_h_oracle(&c, 1),
            Err(Error::MetricUndefined(_))
        ));
        assert!(matches!(bound_report(&c), Err(Error::MetricUndefined(_))));
        // constant pair still meets immediately on channel 0 at every shift
        let r = metrics_report(&c);
        assert_eq!(r.mttr, Some(1));
        assert_eq!(r.mcttr, None);
        assert_eq!(r.mttr_h, vec![Some(1), None, None]);
    }

    #[test]
    fn round_robin_three_misses_at_unit_shift() {
        let p = RendezvousProfile::build(&baseline_pair(BaselineKind::RoundRobin, 3, 0).unwrap());
        for k in 0..3 {
            assert_eq!(p.first_slot(Direction::SenderAhead, 1, ChannelId(k)), None);
            assert_eq!(
                p.first_slot(Direction::SenderAhead, 0, ChannelId(k)),
                Some(k + 1)
            );
        }
        assert_eq!(p.mttr(), None);
        assert_eq!(p.diversity(), 0);
    }

    #[test]
    fn example_metrics() {
        let r4 = metrics_report(&example_n4());
        assert_eq!((r4.mttr, r4.mcttr), (Some(5), Some(16)));
        let r5 = metrics_report(&example_n5());
        assert_eq!((r5.mttr, r5.mcttr), (Some(5), Some(25)));

        let b5 = bound_report(&example_n5()).unwrap();
        assert!(b5.all_pass());
        assert!(b5.uniform_frequency && b5.distinctness);
        assert_eq!(
            b5.mcttr,
            BoundCheck {
                value: 25,
                bound: 25,
                pass: true
            }
        );

        let b4 = bound_report(&example_n4()).unwrap();
        assert_eq!((b4.mttr.value, b4.mttr.bound), (5, 4));
        assert!(b4.mttr.pass && b4.mttr.applicable);
    }

    #[test]
    fn h_out_of_range() {
        assert!(matches!(
            mttr_h(&example_n4(), 4),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            mttr_h_oracle(&example_n4(), 4),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn correlation_examples() {
        let u = seq(2, &[0, 1]);
        assert_eq!(
            correlation_sum_check(&u, 2, &u, ChannelId(0)).unwrap(),
            (1, 1)
        );
        let p = example_n4();
        let (lhs, rhs) = correlation_sum_check(p.sender(), 16, p.receiver(), ChannelId(2)).unwrap();
        // brute force over all 16 shifts, written out
        let s = p.sender().entries();
        let r = p.receiver().entries();
        let brute: usize = (0..16)
            .map(|tau| {
                (0..16)
                    .filter(|&i| s[i] == 2 && r[(i + tau) % 16] == 2)
                    .count()
            })
            .sum();
        assert_eq!((lhs, rhs, brute), (16, 16, 16));
    }

    #[test]
    fn farch_meets_each_channel_exactly_once() {
        for n in 2..=9 {
            let p = farch_pair(&random_permutation(n, n as u64).unwrap()).unwrap();
            let t = n * n;
            for d in Direction::BOTH {
                for tau in 0..t {
                    for k in 0..n {
                        let h =
                            hit_count(p.sender(), p.receiver(), d, tau, t, ChannelId(k)).unwrap();
                        assert_eq!(h, 1, "n={n} {d:?} tau={tau} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_profile_matches_direct_scan() {
        // T = 289 crosses the parallel threshold
        let p = farch_pair(&random_permutation(17, 4).unwrap()).unwrap();
        let prof = RendezvousProfile::build(&p);
        let t = p.period();
        for d in Direction::BOTH {
            let (a, b) = d.orient(p.sender(), p.receiver());
            for tau in 0..t {
                for k in 0..17 {
                    let first = (0..t)
                        .find(|&i| b.at(i) == k && a.at(tau + i) == k)
                        .map(|i| i + 1);
                    assert_eq!(prof.first_slot(d, tau, ChannelId(k)), first);
                }
            }
        }
        assert_eq!(prof.mttr(), Some(17));
        assert_eq!(prof.mttr_h(16).unwrap(), 289);
    }

    #[test]
    fn analysis_json_field_names() {
        let a = analyze(&example_n5());
        let v: serde_json::Value = serde_json::to_value(&a).unwrap();
        for key in [
            "n",
            "period",
            "max_diversity",
            "mttr",
            "mcttr",
            "mttr_h",
            "bounds",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let b = &v["bounds"]["mcttr"];
        assert_eq!(b["value"], 25);
        assert_eq!(b["bound"], 25);
        assert_eq!(b["pass"], true);
    }

    fn arb_pair() -> impl Strategy<Value = SequencePair> {
        (2usize..5, 1usize..20).prop_flat_map(|(n, t)| {
            (
                prop::collection::vec(0..n, t),
                prop::collection::vec(0..n, t),
            )
                .prop_map(move |(u, v)| pair(n, &u, &v))
        })
    }

    proptest! {
        #[test]
        fn profile_matches_positional_scan(p in arb_pair(), tau in 0usize..40) {
            let prof = RendezvousProfile::build(&p);
            let t = p.period();
            let (u, v) = (p.sender().entries(), p.receiver().entries());
            // sum over k of H equals count of positions where shifted u equals v
            let agree = (0..t).filter(|&i| u[(tau + i) % t] == v[i]).count();
            let total: usize = (0..p.n_channels())
                .map(|k| hit_count(p.sender(), p.receiver(), Direction::SenderAhead, tau, t, ChannelId(k)).unwrap())
                .sum();
            prop_assert_eq!(agree, total);
            for k in 0..p.n_channels() {
                let first = (0..t).find(|&i| v[i] == k && u[(tau + i) % t] == k).map(|i| i + 1);
                prop_assert_eq!(prof.first_slot(Direction::SenderAhead, tau, ChannelId(k)), first);
                let first = (0..t).find(|&i| u[i] == k && v[(tau + i) % t] == k).map(|i| i + 1);
                prop_assert_eq!(prof.first_slot(Direction::ReceiverAhead, tau, ChannelId(k)), first);
            }
        }

        #[test]
        fn correlation_identity(p in arb_pair(), m_frac in 0.0f64..1.0, k in 0usize..5) {
            let k = k % p.n_channels();
            let m = 1 + ((p.period() - 1) as f64 * m_frac) as usize;
            let (lhs, rhs) = correlation_sum_check(p.sender(), m, p.receiver(), ChannelId(k)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn curve_is_monotone_and_matches_oracle(p in arb_pair()) {
            let prof = RendezvousProfile::build(&p);
            let curve = prof.mttr_h_curve();
            if prof.is_max_diversity() {
                for h in 0..p.n_channels() {
                    prop_assert_eq!(curve[h], Some(mttr_h_oracle(&p, h).unwrap()));
                    if h > 0 {
                        prop_assert!(curve[h] >= curve[h - 1]);
                    }
                }
                let b = BoundReport::from_report(&p, &metrics_report(&p)).unwrap();
                prop_assert!(b.mcttr.pass);
                if b.mcttr.value == p.n_channels().pow(2) {
                    prop_assert!(b.uniform_frequency && b.distinctness);
                    prop_assert!(b.all_pass());
                }
            }
        }
    }
}
