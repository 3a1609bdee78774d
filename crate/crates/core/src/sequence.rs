//! Channel-hopping sequences and the FARCH sender/receiver construction.
//!
//! A sequence is a period-`T` word over the channel alphabet `0..N`. Slots are
//! stored 0-based; reported TTR values elsewhere in the crate are 1-based.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Index of a licensed channel, `0 <= value < N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelId(pub usize);

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A periodic channel-hopping word over `N` channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct ChannelSequence {
    n_channels: usize,
    entries: Vec<usize>,
}

#[derive(Deserialize)]
struct RawSequence {
    n_channels: usize,
    entries: Vec<usize>,
}

impl TryFrom<RawSequence> for ChannelSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        ChannelSequence::new(raw.n_channels, raw.entries)
    }
}

impl ChannelSequence {
    /// Builds a sequence, rejecting `N < 2`, empty words and out-of-range entries.
    pub fn new(n_channels: usize, entries: Vec<usize>) -> Result<Self> {
        if n_channels < 2 {
            return Err(invalid(format!(
                "need at least 2 channels, got {n_channels}"
            )));
        }
        if entries.is_empty() {
            return Err(invalid("sequence period must be at least 1"));
        }
        if let Some((slot, &ch)) = entries.iter().enumerate().find(|(_, &c)| c >= n_channels) {
            return Err(invalid(format!(
                "entry {ch} at slot {slot} is outside channel range 0..{n_channels}"
            )));
        }
        Ok(Self {
            n_channels,
            entries,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn period(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Channel visited at (0-based) slot `i`, read periodically.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.entries[i % self.entries.len()]
    }

    /// `u^tau`: entry `i` of the result is entry `(i + tau) mod T` of `self`.
    pub fn cyclic_shift(&self, tau: usize) -> ChannelSequence {
        let t = self.period();
        let mut entries = self.entries.clone();
        entries.rotate_left(tau % t);
        ChannelSequence {
            n_channels: self.n_channels,
            entries,
        }
    }

    /// Number of times each channel is visited in the first `prefix` slots.
    pub fn channel_counts_in_prefix(&self, prefix: usize) -> Vec<usize> {
        let mut counts = vec![0; self.n_channels];
        for &c in &self.entries[..prefix.min(self.period())] {
            counts[c] += 1;
        }
        counts
    }

    /// Number of times each channel is visited in one period.
    pub fn channel_counts(&self) -> Vec<usize> {
        self.channel_counts_in_prefix(self.period())
    }

    /// True when every channel is visited equally often over a period.
    pub fn is_uniform_frequency(&self) -> bool {
        let counts = self.channel_counts();
        counts.iter().all(|&c| c == counts[0])
    }

    /// True when `self` equals some cyclic shift of `other`.
    pub fn is_cyclic_shift_of(&self, other: &ChannelSequence) -> bool {
        if self.n_channels != other.n_channels || self.period() != other.period() {
            return false;
        }
        let t = self.period();
        (0..t).any(|tau| (0..t).all(|i| other.at(tau + i) == self.entries[i]))
    }
}

impl fmt::Display for ChannelSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A bijection on `0..N` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n < 2 {
            return Err(invalid(format!("permutation needs n >= 2, got {n}")));
        }
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(invalid(format!("{image:?} is not a permutation of 0..{n}")));
            }
            seen[v] = true;
        }
        Ok(Self { image })
    }

    /// Uniformly random permutation of `0..n` (Fisher-Yates over a ChaCha8
    /// stream seeded by `seed`).
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(n, &mut rng)
    }

    pub fn random_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("permutation needs n >= 2, got {n}")));
        }
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Ok(Self { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }
}

/// Same as [`Permutation::random`].
pub fn random_permutation(n: usize, seed: u64) -> Result<Permutation> {
    Permutation::random(n, seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOrigin {
    Farch(Permutation),
    External,
}

/// A sender/receiver pair sharing `N` and the period `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePair {
    sender: ChannelSequence,
    receiver: ChannelSequence,
    origin: PairOrigin,
}

impl SequencePair {
    /// Wraps two arbitrary sequences as an external pair.
    pub fn new(sender: ChannelSequence, receiver: ChannelSequence) -> Result<Self> {
        Self::with_origin(sender, receiver, PairOrigin::External)
    }

    fn with_origin(
        sender: ChannelSequence,
        receiver: ChannelSequence,
        origin: PairOrigin,
    ) -> Result<Self> {
        check_compatible(&sender, &receiver)?;
        Ok(Self {
            sender,
            receiver,
            origin,
        })
    }

    pub fn sender(&self) -> &ChannelSequence {
        &self.sender
    }

    pub fn receiver(&self) -> &ChannelSequence {
        &self.receiver
    }

    pub fn origin(&self) -> &PairOrigin {
        &self.origin
    }

    pub fn n_channels(&self) -> usize {
        self.sender.n_channels
    }

    pub fn period(&self) -> usize {
        self.sender.period()
    }

    /// Neither sequence is a cyclic shift of the other.
    pub fn is_distinct(&self) -> bool {
        // shift equivalence is symmetric, one direction suffices
        !self.sender.is_cyclic_shift_of(&self.receiver)
    }
}

pub(crate) fn check_compatible(u: &ChannelSequence, v: &ChannelSequence) -> Result<()> {
    if u.n_channels != v.n_channels {
        return Err(Error::IncompatiblePair(format!(
            "channel counts differ ({} vs {})",
            u.n_channels, v.n_channels
        )));
    }
    if u.period() != v.period() {
        return Err(Error::IncompatiblePair(format!(
            "periods differ ({} vs {})",
            u.period(),
            v.period()
        )));
    }
    Ok(())
}

/// Builds the FARCH pair for permutation `w`.
///
/// The sender repeats `w` N times. For even N the receiver holds `w_i` on
/// slots `i*N .. i*N + N`. For odd N the receiver is `[w_0, w_{N-1}]`, then N
/// copies of `[w_{N-2}, .., w_1]`, then N-1 copies of `[w_0, w_{N-1}]`.
/// Both have period N².
pub fn farch_pair(w: &Permutation) -> Result<SequencePair> {
    let n = w.n();
    let w = w.image();
    let sender: Vec<usize> = w.iter().copied().cycle().take(n * n).collect();

    let receiver: Vec<usize> = if n.is_multiple_of(2) {
        w.iter().flat_map(|&c| std::iter::repeat_n(c, n)).collect()
    } else {
        let head = [w[0], w[n - 1]];
        let middle: Vec<usize> = w[1..n - 1].iter().rev().copied().collect();
        let mut r = Vec::with_capacity(n * n);
        r.extend_from_slice(&head);
        for _ in 0..n {
            r.extend_from_slice(&middle);
        }
        for _ in 0..n - 1 {
            r.extend_from_slice(&head);
        }
        r
    };
    debug_assert_eq!(receiver.len(), n * n);

    SequencePair::with_origin(
        ChannelSequence::new(n, sender)?,
        ChannelSequence::new(n, receiver)?,
        PairOrigin::Farch(Permutation::new(w.to_vec())?),
    )
}

/// Negative-control generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    /// Sender = receiver = `[0, 1, .., N-1]` repeated N times.
    RoundRobin,
    /// Two independent i.i.d. uniform words of length N².
    UniformRandom,
}

pub fn baseline_pair(kind: BaselineKind, n: usize, seed: u64) -> Result<SequencePair> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 channels, got {n}")));
    }
    let t = n * n;
    let (s, r) = match kind {
        BaselineKind::RoundRobin => {
            let rr: Vec<usize> = (0..t).map(|i| i % n).collect();
            (rr.clone(), rr)
        }
        BaselineKind::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = (0..t).map(|_| rng.gen_range(0..n)).collect();
            let r = (0..t).map(|_| rng.gen_range(0..n)).collect();
            (s, r)
        }
    };
    SequencePair::new(ChannelSequence::new(n, s)?, ChannelSequence::new(n, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn seq(n: usize, e: &[usize]) -> ChannelSequence {
        ChannelSequence::new(n, e.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(ChannelSequence::new(1, vec![0]).is_err());
        assert!(ChannelSequence::new(3, vec![]).is_err());
        assert!(ChannelSequence::new(3, vec![0, 3]).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0]).is_err());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
        assert!(Permutation::random(1, 0).is_err());
    }

    #[test]
    fn two_element_permutations() {
        for seed in 0..20 {
            let p = random_permutation(2, seed).unwrap();
            assert!(p.image() == [0, 1] || p.image() == [1, 0]);
        }
    }

    #[test]
    fn permutation_is_deterministic() {
        assert_eq!(
            random_permutation(4, 77).unwrap(),
            random_permutation(4, 77).unwrap()
        );
    }

    #[test]
    fn permutations_of_five_look_uniform() {
        let all: Vec<Vec<usize>> = (0..5).permutations(5).collect();
        assert_eq!(all.len(), 120);
        let mut hist: HashMap<Vec<usize>, usize> = all.iter().map(|p| (p.clone(), 0)).collect();
        let samples = 10_000;
        for seed in 0..samples {
            let p = random_permutation(5, seed).unwrap();
            *hist.get_mut(p.image()).expect("not a permutation of 0..5") += 1;
        }
        let expected = samples as f64 / 120.0;
        let chi2: f64 = hist
            .values()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        // 119 degrees of freedom; 180 is past the 0.9999 quantile
        assert!(chi2 < 180.0, "chi-square {chi2}");
        assert!(hist.values().all(|&c| c > 0));
    }

    #[test]
    fn example_pairs() {
        let p = farch_pair(&Permutation::new(vec![0, 3, 2, 1]).unwrap()).unwrap();
        assert_eq!(
            p.sender().entries(),
            [0, 3, 2, 1, 0, 3, 2, 1, 0, 3, 2, 1, 0, 3, 2, 1]
        );
        assert_eq!(
            p.receiver().entries(),
            [0, 0, 0, 0, 3, 3, 3, 3, 2, 2, 2, 2, 1, 1, 1, 1]
        );

        let p = farch_pair(&Permutation::new(vec![1, 4, 3, 0, 2]).unwrap()).unwrap();
        assert_eq!(p.sender().entries(), [1, 4, 3, 0, 2].repeat(5));
        assert_eq!(
            p.receiver().entries(),
            [1, 2, 0, 3, 4, 0, 3, 4, 0, 3, 4, 0, 3, 4, 0, 3, 4, 1, 2, 1, 2, 1, 2, 1, 2]
        );

        let p = farch_pair(&Permutation::new(vec![0, 1]).unwrap()).unwrap();
        assert_eq!(p.sender().entries(), [0, 1, 0, 1]);
        assert_eq!(p.receiver().entries(), [0, 0, 1, 1]);
    }

    #[test]
    fn odd_three_has_single_middle_symbol() {
        let p = farch_pair(&Permutation::new(vec![2, 0, 1]).unwrap()).unwrap();
        assert_eq!(p.receiver().entries(), [2, 1, 0, 0, 0, 2, 1, 2, 1]);
    }

    #[test]
    fn shift_examples() {
        let s = seq(3, &[1, 0, 2]);
        assert_eq!(s.cyclic_shift(0), s);
        assert_eq!(s.cyclic_shift(1).entries(), [0, 2, 1]);
        assert_eq!(s.cyclic_shift(3), s);
    }

    #[test]
    fn baselines() {
        let rr = baseline_pair(BaselineKind::RoundRobin, 2, 0).unwrap();
        assert_eq!(rr.sender().entries(), [0, 1, 0, 1]);
        assert_eq!(rr.receiver().entries(), [0, 1, 0, 1]);
        assert!(!rr.is_distinct());
        let a = baseline_pair(BaselineKind::UniformRandom, 4, 9).unwrap();
        let b = baseline_pair(BaselineKind::UniformRandom, 4, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.period(), 16);
        assert!(baseline_pair(BaselineKind::RoundRobin, 1, 0).is_err());
    }

    #[test]
    fn incompatible_pairs_rejected() {
        assert!(SequencePair::new(seq(2, &[0, 1]), seq(3, &[0, 1])).is_err());
        assert!(SequencePair::new(seq(2, &[0, 1]), seq(2, &[0, 1, 1])).is_err());
    }

    #[test]
    fn json_rejects_out_of_range() {
        let ok: ChannelSequence =
            serde_json::from_str(r#"{"n_channels":3,"entries":[0,2,1]}"#).unwrap();
        assert_eq!(ok.period(), 3);
        assert!(
            serde_json::from_str::<ChannelSequence>(r#"{"n_channels":3,"entries":[0,3]}"#).is_err()
        );
    }

    proptest! {
        #[test]
        fn farch_structure(n in 2usize..=16, seed in any::<u64>()) {
            let w = random_permutation(n, seed).unwrap();
            let pair = farch_pair(&w).unwrap();
            let (s, r) = (pair.sender(), pair.receiver());
            prop_assert_eq!(s.period(), n * n);
            prop_assert_eq!(r.period(), n * n);
            for i in 0..n * n {
                prop_assert_eq!(s.at(i), w.image()[i % n]);
            }
            if n % 2 == 0 {
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(r.at(i * n + j), w.image()[i]);
                    }
                }
            }
            // s_i = s_j iff i = j mod N; r_i != r_j whenever i = j mod N (i != j)
            for i in 0..n * n {
                for j in (i + 1)..n * n {
                    prop_assert_eq!(s.at(i) == s.at(j), (j - i) % n == 0);
                    if (j - i) % n == 0 {
                        prop_assert_ne!(r.at(i), r.at(j));
                    }
                }
            }
            prop_assert!(s.channel_counts().iter().all(|&c| c == n));
            prop_assert!(r.channel_counts().iter().all(|&c| c == n));
        }

        #[test]
        fn shift_composes(entries in prop::collection::vec(0usize..5, 1..40), a in 0usize..100, b in 0usize..100) {
            let s = ChannelSequence::new(5, entries).unwrap();
            prop_assert_eq!(s.cyclic_shift(a).cyclic_shift(b), s.cyclic_shift(a + b));
            let shifted = s.cyclic_shift(a);
            for i in 0..s.period() {
                prop_assert_eq!(shifted.at(i), s.at(i + a));
            }
        }
    }
}
