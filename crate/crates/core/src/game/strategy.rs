use std::collections::BTreeMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// One action index per player.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PureProfile(pub Vec<usize>);

impl PureProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        PureProfile(actions)
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::Dimension(format!(
                "pure profile has {} entries, game has {n} players",
                self.0.len()
            )));
        }
        if let Some(&a) = self.0.iter().find(|&&a| a >= m) {
            return Err(Error::Dimension(format!("action {a} out of range for {m} actions")));
        }
        Ok(())
    }
}

impl Deref for PureProfile {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// A probability vector over a player's actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MixedStrategy<T> {
    probs: Vec<T>,
}

impl<T: Scalar> MixedStrategy<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("mixed strategy over zero actions".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= T::zero())) {
            return Err(Error::Invalid("negative or non-finite probability".into()));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::input_tol() {
            return Err(Error::Invalid(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(MixedStrategy { probs })
    }

    pub fn pure(m: usize, action: usize) -> Self {
        let mut probs = vec![T::zero(); m];
        probs[action] = T::one();
        MixedStrategy { probs }
    }

    pub fn uniform(m: usize) -> Self {
        MixedStrategy {
            probs: vec![T::one() / T::from_usize_lossy(m); m],
        }
    }

    /// Two-action strategy putting probability `p_first` on action 0.
    pub fn binary(p_first: T) -> Result<Self> {
        Self::new(vec![p_first, T::one() - p_first])
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn num_actions(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, action: usize) -> T {
        self.probs[action]
    }

    /// Samples an action with a single uniform draw.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, p) in self.probs.iter().enumerate() {
            acc += p.as_f64();
            if u < acc {
                return a;
            }
        }
        // rounding: fall back to the last action with positive mass
        self.probs
            .iter()
            .rposition(|p| *p > T::zero())
            .unwrap_or(self.probs.len() - 1)
    }
}

/// Uniform distribution over a multiset of `k` actions, stored as exact counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KUniformStrategy {
    counts: Vec<u32>,
    k: u32,
}

impl KUniformStrategy {
    pub fn new(counts: Vec<u32>, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("k must be positive".into()));
        }
        if counts.is_empty() {
            return Err(Error::Invalid("k-uniform strategy over zero actions".into()));
        }
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if total != k as u64 {
            return Err(Error::Invalid(format!("counts sum to {total}, expected k = {k}")));
        }
        Ok(KUniformStrategy { counts, k })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_actions(&self) -> usize {
        self.counts.len()
    }

    pub fn to_mixed<T: Scalar>(&self) -> MixedStrategy<T> {
        let k = T::from_u32(self.k).expect("k representable");
        MixedStrategy {
            probs: self
                .counts
                .iter()
                .map(|&c| T::from_u32(c).expect("count representable") / k)
                .collect(),
        }
    }
}

/// One mixed strategy per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MixedProfile<T> {
    strategies: Vec<MixedStrategy<T>>,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn new(strategies: Vec<MixedStrategy<T>>) -> Self {
        MixedProfile { strategies }
    }

    pub fn uniform(n: usize, m: usize) -> Self {
        MixedProfile {
            strategies: vec![MixedStrategy::uniform(m); n],
        }
    }

    pub fn from_pure(profile: &[usize], m: usize) -> Self {
        MixedProfile {
            strategies: profile.iter().map(|&a| MixedStrategy::pure(m, a)).collect(),
        }
    }

    /// Binary-action profile from the probabilities of action 0.
    pub fn binary(p_first: &[T]) -> Result<Self> {
        Ok(MixedProfile {
            strategies: p_first
                .iter()
                .map(|&p| MixedStrategy::binary(p))
                .collect::<Result<_>>()?,
        })
    }

    pub fn strategies(&self) -> &[MixedStrategy<T>] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &MixedStrategy<T> {
        &self.strategies[player]
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.strategies.len() != n {
            return Err(Error::Dimension(format!(
                "profile has {} strategies, game has {n} players",
                self.strategies.len()
            )));
        }
        if let Some(s) = self.strategies.iter().find(|s| s.num_actions() != m) {
            return Err(Error::Dimension(format!(
                "strategy over {} actions, game has {m}",
                s.num_actions()
            )));
        }
        Ok(())
    }

    /// Same profile with `player` switched to the given strategy.
    pub fn with_strategy(&self, player: usize, strategy: MixedStrategy<T>) -> Self {
        let mut out = self.clone();
        out.strategies[player] = strategy;
        out
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> PureProfile {
        PureProfile(self.strategies.iter().map(|s| s.sample(rng)).collect())
    }
}

/// A profile in which every player uses a k-uniform strategy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KUniformProfile {
    strategies: Vec<KUniformStrategy>,
}

impl KUniformProfile {
    pub fn new(strategies: Vec<KUniformStrategy>) -> Self {
        KUniformProfile { strategies }
    }

    pub fn strategies(&self) -> &[KUniformStrategy] {
        &self.strategies
    }

    pub fn to_mixed<T: Scalar>(&self) -> MixedProfile<T> {
        MixedProfile::new(self.strategies.iter().map(|s| s.to_mixed()).collect())
    }
}

/// A finitely supported distribution over pure profiles.
///
/// When `k` is set the distribution is k-uniform: every weight is `count / k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CorrelatedDistribution<T> {
    support: Vec<(PureProfile, T)>,
    k: Option<u32>,
}

impl<T: Scalar> CorrelatedDistribution<T> {
    pub fn new(support: Vec<(PureProfile, T)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Invalid("empty support".into()));
        }
        if support.iter().any(|(_, w)| !(w.is_finite() && *w > T::zero())) {
            return Err(Error::Invalid("support weights must be positive".into()));
        }
        let total: T = support.iter().map(|(_, w)| *w).sum();
        if (total - T::one()).abs() > T::input_tol() {
            return Err(Error::Invalid(format!("weights sum to {total}, expected 1")));
        }
        Ok(CorrelatedDistribution { support, k: None })
    }

    /// Uniform distribution over a multiset of profiles; duplicates are merged
    /// and the support is kept in profile order.
    pub fn from_multiset<I: IntoIterator<Item = PureProfile>>(profiles: I) -> Result<Self> {
        let mut counts: BTreeMap<PureProfile, u32> = BTreeMap::new();
        let mut k = 0u32;
        for p in profiles {
            *counts.entry(p).or_default() += 1;
            k += 1;
        }
        if k == 0 {
            return Err(Error::Invalid("empty multiset".into()));
        }
        let kt = T::from_u32(k).expect("k representable");
        let support = counts
            .into_iter()
            .map(|(p, c)| (p, T::from_u32(c).expect("count representable") / kt))
            .collect();
        Ok(CorrelatedDistribution { support, k: Some(k) })
    }

    pub fn point_mass(profile: PureProfile) -> Self {
        CorrelatedDistribution {
            support: vec![(profile, T::one())],
            k: Some(1),
        }
    }

    pub fn support(&self) -> &[(PureProfile, T)] {
        &self.support
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        for (p, _) in &self.support {
            p.validate(n, m)?;
        }
        if let Some(k) = self.k {
            if self.support.len() > k as usize {
                return Err(Error::Invalid("k-uniform support larger than k".into()));
            }
            let kt = T::from_u32(k).expect("k representable");
            for (_, w) in &self.support {
                let scaled = *w * kt;
                if (scaled - scaled.round()).abs() > T::pmf_tol() * kt {
                    return Err(Error::Invalid(format!("weight {w} is not a multiple of 1/{k}")));
                }
            }
        }
        Ok(())
    }

    /// Integer counts of a k-uniform distribution, in support order.
    pub fn counts(&self) -> Option<Vec<u32>> {
        let k = self.k?;
        let kt = T::from_u32(k)?;
        self.support
            .iter()
            .map(|(_, w)| (*w * kt).round().to_u32())
            .collect()
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> &PureProfile {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (p, w) in &self.support {
            acc += w.as_f64();
            if u < acc {
                return p;
            }
        }
        &self.support[self.support.len() - 1].0
    }
}
