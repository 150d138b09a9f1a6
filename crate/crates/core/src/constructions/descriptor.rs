//! Serializable game descriptors.
//!
//! A descriptor is either JSON with a `family` tag or a single line
//! `family:key=value,key=value`, e.g. `xor:kappa=3` or
//! `random_majority_mp:n=8,m=8,t=4,seed=1`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{random_regular_matrix, MajorityMpGame, ObserverGame, ObserverSubgame, XorIrGame};
use crate::game::{io::explicit_game_from_json, BinaryMatrix, ExplicitGame, Game};
use crate::seed::derive_rng;
use crate::{Error, Result, Scalar};

fn default_w() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSpec {
    Explicit {
        n: usize,
        m: usize,
        payoffs: Vec<f64>,
    },
    ExplicitFile {
        path: String,
    },
    RandomExplicit {
        n: usize,
        m: usize,
        seed: u64,
    },
    MatchingPennies,
    Observer {
        b: usize,
        #[serde(default = "default_w")]
        w: f64,
        /// Number of random observers instantiated alongside the pairs.
        #[serde(default)]
        observers: usize,
        #[serde(default)]
        seed: u64,
    },
    MajorityMp {
        matrix: Vec<Vec<u8>>,
    },
    MajorityMpFile {
        path: String,
    },
    RandomMajorityMp {
        n: usize,
        m: usize,
        t: usize,
        seed: u64,
    },
    Xor {
        kappa: u32,
    },
}

/// A constructed game, keeping the concrete family for family-specific
/// operations.
#[derive(Clone, Debug)]
pub enum BuiltGame<T: Scalar> {
    Explicit(ExplicitGame<T>),
    Observer(ObserverSubgame),
    Majority(MajorityMpGame),
    Xor(XorIrGame),
}

impl<T: Scalar> BuiltGame<T> {
    pub fn as_game(&self) -> &dyn Game<T> {
        match self {
            BuiltGame::Explicit(g) => g,
            BuiltGame::Observer(g) => g,
            BuiltGame::Majority(g) => g,
            BuiltGame::Xor(g) => g,
        }
    }
}

impl GameSpec {
    /// Parses JSON (a descriptor or an explicit game file) or the one-line form.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let value: Value = serde_json::from_str(text)?;
            if value.get("family").is_some() {
                return Ok(serde_json::from_value(value)?);
            }
            let explicit: ExplicitGame<f64> = explicit_game_from_json(text)?;
            return Ok(GameSpec::Explicit {
                n: explicit.num_players(),
                m: explicit.num_actions(),
                payoffs: explicit.payoffs().to_vec(),
            });
        }
        Self::parse_line(text)
    }

    fn parse_line(line: &str) -> Result<Self> {
        let (family, rest) = line.split_once(':').unwrap_or((line, ""));
        if family.is_empty() {
            return Err(Error::Parse("empty game family".into()));
        }
        let mut map = Map::new();
        map.insert("family".into(), Value::String(family.to_string()));
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{pair}`")))?;
            let v = v.trim();
            let value = if let Ok(u) = v.parse::<u64>() {
                Value::from(u)
            } else if let Ok(f) = v.parse::<f64>() {
                Value::from(f)
            } else {
                Value::String(v.to_string())
            };
            map.insert(k.trim().to_string(), value);
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| Error::Parse(format!("game spec `{line}`: {e}")))
    }

    /// Reads a descriptor from a file if `arg` names one, else parses `arg`.
    pub fn resolve(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            Self::parse(&std::fs::read_to_string(path)?)
        } else {
            Self::parse(arg)
        }
    }

    /// One-line form, when every field is a scalar.
    pub fn to_line(&self) -> Option<String> {
        let Value::Object(map) = serde_json::to_value(self).ok()? else {
            return None;
        };
        let family = map.get("family")?.as_str()?.to_string();
        let mut parts = Vec::new();
        for (k, v) in &map {
            if k == "family" {
                continue;
            }
            match v {
                Value::Number(n) => parts.push(format!("{k}={n}")),
                Value::String(s) if !s.contains([',', '=']) => parts.push(format!("{k}={s}")),
                _ => return None,
            }
        }
        Some(if parts.is_empty() {
            family
        } else {
            format!("{family}:{}", parts.join(","))
        })
    }

    pub fn build<T: Scalar>(&self) -> Result<BuiltGame<T>> {
        Ok(match self {
            GameSpec::Explicit { n, m, payoffs } => {
                BuiltGame::Explicit(ExplicitGame::new(*n, *m, payoffs.iter().map(|&v| T::lit(v)).collect())?)
            }
            GameSpec::ExplicitFile { path } => {
                BuiltGame::Explicit(explicit_game_from_json(&std::fs::read_to_string(path)?)?)
            }
            GameSpec::RandomExplicit { n, m, seed } => BuiltGame::Explicit(ExplicitGame::random(*n, *m, *seed)?),
            GameSpec::MatchingPennies => BuiltGame::Explicit(ExplicitGame::matching_pennies()),
            GameSpec::Observer { b, w, observers, seed } => {
                let g = ObserverGame::new(*b, *w)?;
                let subsets = (0..*observers)
                    .map(|o| g.random_subset(&mut derive_rng(*seed, "observer-subset", o as u64)))
                    .collect();
                BuiltGame::Observer(g.subgame(subsets)?)
            }
            GameSpec::MajorityMp { matrix } => {
                BuiltGame::Majority(MajorityMpGame::new(BinaryMatrix::from_rows(matrix)?)?)
            }
            GameSpec::MajorityMpFile { path } => {
                let m: BinaryMatrix = std::fs::read_to_string(path)?.parse()?;
                BuiltGame::Majority(MajorityMpGame::new(m)?)
            }
            GameSpec::RandomMajorityMp { n, m, t, seed } => {
                BuiltGame::Majority(MajorityMpGame::new(random_regular_matrix(*n, *m, *t, *seed)?)?)
            }
            GameSpec::Xor { kappa } => BuiltGame::Xor(XorIrGame::new(*kappa)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_round_trip() {
        let s = GameSpec::parse("random_majority_mp:n=8,m=8,t=4,seed=3").unwrap();
        assert_eq!(s, GameSpec::RandomMajorityMp { n: 8, m: 8, t: 4, seed: 3 });
        assert_eq!(GameSpec::parse(&s.to_line().unwrap()).unwrap(), s);
        assert_eq!(GameSpec::parse("matching_pennies").unwrap(), GameSpec::MatchingPennies);
        let o = GameSpec::parse("observer:b=16").unwrap();
        assert_eq!(o, GameSpec::Observer { b: 16, w: 1.0, observers: 0, seed: 0 });
    }

    #[test]
    fn json_forms() {
        let s = GameSpec::parse(r#"{"family":"xor","kappa":3}"#).unwrap();
        assert_eq!(s, GameSpec::Xor { kappa: 3 });
        let e = GameSpec::parse(r#"{"n":1,"m":2,"payoffs":[0.0,1.0]}"#).unwrap();
        assert!(matches!(e, GameSpec::Explicit { n: 1, m: 2, .. }));
        assert!(GameSpec::parse("xor:kappa=3,bogus=1").is_err());
        assert!(GameSpec::parse("nope:x=1").is_err());
    }

    #[test]
    fn builds_each_family() {
        let g = GameSpec::Xor { kappa: 2 }.build::<f64>().unwrap();
        assert_eq!(g.as_game().num_players(), 12);
        let g = GameSpec::Observer { b: 4, w: 1.0, observers: 3, seed: 1 }.build::<f64>().unwrap();
        assert_eq!(g.as_game().num_players(), 11);
        let g = GameSpec::MajorityMp { matrix: vec![vec![1, 0], vec![1, 1]] }.build::<f32>().unwrap();
        assert_eq!(g.as_game().num_players(), 4);
    }
}
