//! Approximate equilibria of many-player games on k-uniform strategy grids.
//!
//! The crate covers verification of the standard approximate solution
//! concepts (ε-Nash, weak Nash, correlated and weak correlated equilibria,
//! individual rationality), three structured game families with exact
//! expected-payoff kernels, k-uniform sampling from exact equilibria,
//! exhaustive grid search, combinatorial discrepancy and its correspondence
//! with near-half grid profiles, and regret-matching dynamics with a
//! support-size audit.
//!
//! All numerical code is generic over [`Scalar`]; the aliases below fix the
//! scalar to `f64`, which is what the command-line front end uses.

pub mod constructions;
pub mod discrepancy;
pub mod dynamics;
mod error;
pub mod game;
pub mod grid;
mod scalar;
pub mod sampling;
pub mod seed;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use game::{
    BinaryMatrix, CorrelatedDistribution, Evaluator, ExplicitGame, Game, KUniformProfile,
    KUniformStrategy, MixedProfile, MixedStrategy, PureProfile, SignedSumDistribution,
};

pub type Strategy = MixedStrategy<f64>;
pub type Profile = MixedProfile<f64>;
pub type Distribution = CorrelatedDistribution<f64>;
pub type Explicit = ExplicitGame<f64>;
pub type SignedSum = SignedSumDistribution<f64>;

pub type StrategyF32 = MixedStrategy<f32>;
pub type ProfileF32 = MixedProfile<f32>;
pub type DistributionF32 = CorrelatedDistribution<f32>;
pub type ExplicitF32 = ExplicitGame<f32>;
pub type SignedSumF32 = SignedSumDistribution<f32>;
