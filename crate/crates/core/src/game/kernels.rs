//! Exact probability kernels shared by the game families.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Largest label dimension accepted by [`xor_pushforward`].
pub const MAX_XOR_DIM: u32 = 20;

/// Distribution of the number of successes among independent Bernoulli trials
/// with success probabilities `probs` (Poisson-binomial), by incremental
/// convolution. Entry `c` is `P(count = c)`.
pub fn count_distribution<T: Scalar>(probs: &[T]) -> Result<Vec<T>> {
    check_probs(probs)?;
    let mut pmf = Vec::with_capacity(probs.len() + 1);
    pmf.push(T::one());
    for &p in probs {
        let q = T::one() - p;
        pmf.push(T::zero());
        for c in (1..pmf.len()).rev() {
            pmf[c] = pmf[c] * q + pmf[c - 1] * p;
        }
        pmf[0] = pmf[0] * q;
    }
    Ok(pmf)
}

fn check_probs<T: Scalar>(probs: &[T]) -> Result<()> {
    match probs.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
        Some(p) => Err(Error::Invalid(format!("probability {p} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Exact law of `S = X_1 + … + X_t` for independent `X_j ∈ {+1, −1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SignedSumDistribution<T> {
    /// `by_plus[c] = P(exactly c terms are +1)`, i.e. `P(S = 2c − t)`.
    by_plus: Vec<T>,
}

impl<T: Scalar> SignedSumDistribution<T> {
    /// `probs[j]` is the probability that term `j` equals `+1`. An empty input
    /// yields the point mass at zero.
    pub fn new(probs: &[T]) -> Result<Self> {
        Ok(SignedSumDistribution {
            by_plus: count_distribution(probs)?,
        })
    }

    /// Number of terms.
    pub fn terms(&self) -> usize {
        self.by_plus.len() - 1
    }

    /// `P(S = total)`; zero off the support or for the wrong parity.
    pub fn pmf(&self, total: i64) -> T {
        let t = self.terms() as i64;
        if total.abs() > t || (total + t) % 2 != 0 {
            return T::zero();
        }
        self.by_plus[((total + t) / 2) as usize]
    }

    /// `(total, probability)` pairs over `{−t, −t+2, …, t}`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        let t = self.terms() as i64;
        self.by_plus
            .iter()
            .enumerate()
            .map(move |(c, &p)| (2 * c as i64 - t, p))
    }

    pub fn prob_positive(&self) -> T {
        self.iter().filter(|(s, _)| *s > 0).map(|(_, p)| p).sum()
    }

    pub fn prob_zero(&self) -> T {
        self.pmf(0)
    }

    pub fn prob_negative(&self) -> T {
        self.iter().filter(|(s, _)| *s < 0).map(|(_, p)| p).sum()
    }

    /// `E[sign(S)] = P(S > 0) − P(S < 0)`.
    pub fn expected_sign(&self) -> T {
        self.prob_positive() - self.prob_negative()
    }

    pub fn mean(&self) -> T {
        self.iter().map(|(s, p)| T::lit(s as f64) * p).sum()
    }

    pub fn variance(&self) -> T {
        let mu = self.mean();
        self.iter()
            .map(|(s, p)| {
                let d = T::lit(s as f64) - mu;
                d * d * p
            })
            .sum()
    }

    pub fn total_mass(&self) -> T {
        self.by_plus.iter().copied().sum()
    }
}

/// Convenience wrapper matching the library's operation name.
pub fn signed_sum_dist<T: Scalar>(probs: &[T]) -> Result<SignedSumDistribution<T>> {
    SignedSumDistribution::new(probs)
}

/// Law of `⊕_{i : A_i = 1} labels[i]` over `{0,1}^dim` for independent
/// `A_i ~ Bernoulli(q_i)`. Labels are bit masks; entry `x` of the result is
/// `P(XOR = x)`. Runs in `O(n · 2^dim)`.
pub fn xor_pushforward<T: Scalar>(q: &[T], labels: &[u32], dim: u32) -> Result<Vec<T>> {
    if dim > MAX_XOR_DIM {
        return Err(Error::guard("xor label dimension", dim as u128, MAX_XOR_DIM as u128));
    }
    if q.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} probabilities but {} labels",
            q.len(),
            labels.len()
        )));
    }
    check_probs(q)?;
    let size = 1usize << dim;
    if let Some(l) = labels.iter().find(|&&l| l as usize >= size) {
        return Err(Error::Invalid(format!("label {l:#b} exceeds dimension {dim}")));
    }
    let mut dist = vec![T::zero(); size];
    dist[0] = T::one();
    let mut next = vec![T::zero(); size];
    for (&p, &s) in q.iter().zip(labels) {
        if p == T::zero() || s == 0 {
            continue;
        }
        let stay = T::one() - p;
        for x in 0..size {
            next[x] = dist[x] * stay + dist[x ^ s as usize] * p;
        }
        std::mem::swap(&mut dist, &mut next);
    }
    Ok(dist)
}
