//! Floating-point scalar abstraction.
//!
//! Every probability kernel, payoff evaluator and verifier in this crate is
//! written once against [`Scalar`] and instantiated for `f64` (the default used
//! by the CLI) and `f32`. Grid coordinates stay exact: k-uniform strategies carry
//! integer counts and are converted to a scalar only at evaluation time.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Tolerance on the sum of user-supplied probability vectors.
    const INPUT_TOL: f64;
    /// Tolerance on the sum of computed probability mass functions.
    const PMF_TOL: f64;
    /// Slack applied to every regret/threshold comparison.
    const REGRET_TOL: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("representable count")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn input_tol() -> Self {
        Self::lit(Self::INPUT_TOL)
    }

    fn pmf_tol() -> Self {
        Self::lit(Self::PMF_TOL)
    }

    fn regret_tol() -> Self {
        Self::lit(Self::REGRET_TOL)
    }
}

impl Scalar for f64 {
    const INPUT_TOL: f64 = 1e-12;
    const PMF_TOL: f64 = 1e-10;
    const REGRET_TOL: f64 = 1e-9;
}

// Single precision cannot resolve the double-precision tolerances; these are
// the closest meaningful values for 24-bit mantissas.
impl Scalar for f32 {
    const INPUT_TOL: f64 = 1e-5;
    const PMF_TOL: f64 = 1e-4;
    const REGRET_TOL: f64 = 1e-5;
}
