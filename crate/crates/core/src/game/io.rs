//! Structured-text (JSON) encodings of games, profiles and distributions.
//!
//! Grid-valued objects are written with their exact integer encoding
//! (`counts` + `k`) rather than floating-point probabilities.

use serde::{Deserialize, Serialize};

use super::{
    CorrelatedDistribution, ExplicitGame, KUniformProfile, KUniformStrategy, MixedProfile,
    MixedStrategy, PureProfile,
};
use crate::{Error, Result, Scalar};

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct ExplicitRecord<T> {
    n: usize,
    m: usize,
    payoffs: Vec<T>,
}

pub fn explicit_game_from_json<T: Scalar>(text: &str) -> Result<ExplicitGame<T>> {
    let r: ExplicitRecord<T> = serde_json::from_str(text)?;
    ExplicitGame::new(r.n, r.m, r.payoffs)
}

pub fn explicit_game_to_json<T: Scalar>(game: &ExplicitGame<T>) -> Result<String> {
    use super::Game;
    Ok(serde_json::to_string(&ExplicitRecord {
        n: game.num_players(),
        m: game.num_actions(),
        payoffs: game.payoffs().to_vec(),
    })?)
}

/// One player's strategy in a profile file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
pub enum StrategyRecord<T> {
    Grid { counts: Vec<u32>, k: u32 },
    Mixed { probs: Vec<T> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProfileRecord<T> {
    pub strategies: Vec<StrategyRecord<T>>,
}

impl<T: Scalar> ProfileRecord<T> {
    pub fn to_profile(&self) -> Result<MixedProfile<T>> {
        let strategies = self
            .strategies
            .iter()
            .map(|s| match s {
                StrategyRecord::Grid { counts, k } => {
                    Ok(KUniformStrategy::new(counts.clone(), *k)?.to_mixed())
                }
                StrategyRecord::Mixed { probs } => MixedStrategy::new(probs.clone()),
            })
            .collect::<Result<_>>()?;
        Ok(MixedProfile::new(strategies))
    }

    pub fn from_mixed(profile: &MixedProfile<T>) -> Self {
        ProfileRecord {
            strategies: profile
                .strategies()
                .iter()
                .map(|s| StrategyRecord::Mixed {
                    probs: s.probs().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_grid(profile: &KUniformProfile) -> Self {
        ProfileRecord {
            strategies: profile
                .strategies()
                .iter()
                .map(|s| StrategyRecord::Grid {
                    counts: s.counts().to_vec(),
                    k: s.k(),
                })
                .collect(),
        }
    }
}

pub fn profile_from_json<T: Scalar>(text: &str) -> Result<MixedProfile<T>> {
    serde_json::from_str::<ProfileRecord<T>>(text)?.to_profile()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SupportRecord<T> {
    pub profile: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DistributionRecord<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub support: Vec<SupportRecord<T>>,
}

impl<T: Scalar> DistributionRecord<T> {
    pub fn to_distribution(&self) -> Result<CorrelatedDistribution<T>> {
        match self.k {
            Some(k) => {
                let mut multiset = Vec::new();
                for s in &self.support {
                    let c = s.count.ok_or_else(|| {
                        Error::Parse("k-uniform support entries need a `count`".into())
                    })?;
                    multiset.extend(std::iter::repeat_n(PureProfile(s.profile.clone()), c as usize));
                }
                let dist = CorrelatedDistribution::from_multiset(multiset)?;
                if dist.k() != Some(k) {
                    return Err(Error::Invalid(format!("counts do not sum to k = {k}")));
                }
                Ok(dist)
            }
            None => CorrelatedDistribution::new(
                self.support
                    .iter()
                    .map(|s| {
                        s.weight
                            .map(|w| (PureProfile(s.profile.clone()), w))
                            .ok_or_else(|| Error::Parse("support entries need a `weight`".into()))
                    })
                    .collect::<Result<_>>()?,
            ),
        }
    }

    pub fn from_distribution(dist: &CorrelatedDistribution<T>) -> Self {
        match dist.counts() {
            Some(counts) => DistributionRecord {
                k: dist.k(),
                support: dist
                    .support()
                    .iter()
                    .zip(counts)
                    .map(|((p, _), c)| SupportRecord {
                        profile: p.0.clone(),
                        weight: None,
                        count: Some(c),
                    })
                    .collect(),
            },
            None => DistributionRecord {
                k: None,
                support: dist
                    .support()
                    .iter()
                    .map(|(p, w)| SupportRecord {
                        profile: p.0.clone(),
                        weight: Some(*w),
                        count: None,
                    })
                    .collect(),
            },
        }
    }
}

pub fn distribution_from_json<T: Scalar>(text: &str) -> Result<CorrelatedDistribution<T>> {
    serde_json::from_str::<DistributionRecord<T>>(text)?.to_distribution()
}
