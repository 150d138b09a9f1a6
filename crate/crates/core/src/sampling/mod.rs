//! k-uniform sampling from exact equilibria.
//!
//! Averaging `k` independent draws from each player's equilibrium strategy
//! (or `k` draws from a correlated equilibrium) gives a k-uniform object that
//! is an approximate weak equilibrium with positive probability once `k`
//! reaches the bounds below.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{expected_payoff, CorrelatedDistribution, Game, KUniformProfile, KUniformStrategy, MixedProfile};
use crate::seed::{derive_rng, derive_seed};
use crate::verify::{ce_regrets, check_weak_ce, check_weak_nash, nash_regrets};
use crate::{Error, Evaluator, Result, Scalar};

pub const DEFAULT_MAX_ATTEMPTS: usize = 10;

fn check_domain(epsilon: f64, delta: f64, m: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Invalid(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Invalid(format!("delta {delta} must lie in (0, 1)")));
    }
    if !(m >= 2.0 && m.is_finite()) {
        return Err(Error::Invalid(format!("m = {m} must be at least 2")));
    }
    Ok(())
}

/// `32 (ln 8 + ln m − ln ε − ln δ) / ε²`, before rounding; `m` may be real.
pub fn weak_nash_bound_real(epsilon: f64, delta: f64, m: f64) -> Result<f64> {
    check_domain(epsilon, delta, m)?;
    Ok(32.0 * (8f64.ln() + m.ln() - epsilon.ln() - delta.ln()) / (epsilon * epsilon))
}

/// `2 (m ln m − ln δ) / ε²`, before rounding; `m` may be real.
pub fn weak_ce_bound_real(epsilon: f64, delta: f64, m: f64) -> Result<f64> {
    check_domain(epsilon, delta, m)?;
    Ok(2.0 * (m * m.ln() - delta.ln()) / (epsilon * epsilon))
}

/// Grid size sufficient for an (ε, δ)-weak Nash equilibrium.
pub fn k_bound_weak_nash(epsilon: f64, delta: f64, m: usize) -> Result<u64> {
    Ok(weak_nash_bound_real(epsilon, delta, m as f64)?.ceil() as u64)
}

/// Support size sufficient for an (ε, δ)-weak correlated equilibrium.
pub fn k_bound_weak_ce(epsilon: f64, delta: f64, m: usize) -> Result<u64> {
    Ok(weak_ce_bound_real(epsilon, delta, m as f64)?.ceil() as u64)
}

/// A k-bound together with its arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub m: usize,
    pub k: u64,
}

impl SamplingBudget {
    pub fn weak_nash(epsilon: f64, delta: f64, m: usize) -> Result<Self> {
        Ok(SamplingBudget { epsilon, delta, m, k: k_bound_weak_nash(epsilon, delta, m)? })
    }

    pub fn weak_ce(epsilon: f64, delta: f64, m: usize) -> Result<Self> {
        Ok(SamplingBudget { epsilon, delta, m, k: k_bound_weak_ce(epsilon, delta, m)? })
    }
}

fn k_to_u32(k: u64) -> Result<u32> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    u32::try_from(k).map_err(|_| Error::guard("grid size k", k as u128, u32::MAX as u128))
}

/// Tabulates `k` draws from each player's strategy; player `i` uses its own
/// generator derived from `(seed, i)`.
pub fn sample_k_uniform_profile<T: Scalar>(profile: &MixedProfile<T>, k: u64, seed: u64) -> Result<KUniformProfile> {
    let k = k_to_u32(k)?;
    let strategies = profile
        .strategies()
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = derive_rng(seed, "k-uniform-profile", i as u64);
            let mut counts = vec![0u32; s.num_actions()];
            for _ in 0..k {
                counts[s.sample(&mut rng)] += 1;
            }
            KUniformStrategy::new(counts, k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KUniformProfile::new(strategies))
}

/// One row of an attempt log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: usize,
    pub seed: u64,
    pub k: u64,
    pub satisfied_fraction: f64,
    pub max_regret: f64,
    pub passed: bool,
}

pub fn attempts_to_csv(records: &[AttemptRecord]) -> String {
    let mut out = String::from("attempt,seed,k,satisfied_fraction,max_regret,passed\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.attempt, r.seed, r.k, r.satisfied_fraction, r.max_regret, r.passed
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SamplingOutcome<P> {
    Found {
        result: P,
        attempts: usize,
        records: Vec<AttemptRecord>,
    },
    Exhausted {
        best_fraction: f64,
        records: Vec<AttemptRecord>,
    },
}

impl<P> SamplingOutcome<P> {
    pub fn records(&self) -> &[AttemptRecord] {
        match self {
            SamplingOutcome::Found { records, .. } | SamplingOutcome::Exhausted { records, .. } => records,
        }
    }

    pub fn result(&self) -> Option<&P> {
        match self {
            SamplingOutcome::Found { result, .. } => Some(result),
            SamplingOutcome::Exhausted { .. } => None,
        }
    }
}

fn require_exact_nash<T: Scalar, G: Game<T> + ?Sized>(game: &G, profile: &MixedProfile<T>) -> Result<()> {
    match nash_regrets(game, profile, Evaluator::Exact) {
        Ok(r) => match r.iter().position(|&x| x > T::regret_tol()) {
            Some(i) => Err(Error::Invalid(format!(
                "input profile is not an exact equilibrium: player {i} has regret {}",
                r[i]
            ))),
            None => Ok(()),
        },
        // Without an exact evaluator the precondition cannot be checked.
        Err(Error::Guard { .. }) => Ok(()),
        Err(e) => Err(e),
    }
}

fn run_attempts<T, P, F>(k: u64, seed: u64, tag: &str, max_attempts: usize, mut attempt: F) -> Result<SamplingOutcome<P>>
where
    T: Scalar,
    F: FnMut(u64) -> Result<(P, bool, crate::verify::RegretReport<T>)>,
{
    let mut records = Vec::new();
    let mut best = 0.0f64;
    for a in 0..max_attempts {
        let s = derive_seed(seed, tag, a as u64);
        let (candidate, passed, report) = attempt(s)?;
        best = best.max(report.satisfied_fraction);
        records.push(AttemptRecord {
            attempt: a + 1,
            seed: s,
            k,
            satisfied_fraction: report.satisfied_fraction,
            max_regret: report.max_regret().as_f64(),
            passed,
        });
        if passed {
            return Ok(SamplingOutcome::Found { result: candidate, attempts: a + 1, records });
        }
    }
    Ok(SamplingOutcome::Exhausted { best_fraction: best, records })
}

/// Samples k-uniform profiles at `k = k_bound_weak_nash(ε, δ, m)` until one
/// passes the weak Nash check.
pub fn weak_nash_by_sampling<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    exact_eq: &MixedProfile<T>,
    epsilon: f64,
    delta: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<SamplingOutcome<KUniformProfile>> {
    let k = k_bound_weak_nash(epsilon, delta, game.num_actions())?;
    weak_nash_by_sampling_with_k(game, exact_eq, k, epsilon, delta, seed, max_attempts)
}

/// As [`weak_nash_by_sampling`] with an explicit grid size.
pub fn weak_nash_by_sampling_with_k<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    exact_eq: &MixedProfile<T>,
    k: u64,
    epsilon: f64,
    delta: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<SamplingOutcome<KUniformProfile>> {
    exact_eq.validate(game.num_players(), game.num_actions())?;
    require_exact_nash(game, exact_eq)?;
    run_attempts(k, seed, "weak-nash-attempt", max_attempts, |s| {
        let sampled = sample_k_uniform_profile(exact_eq, k, s)?;
        let (passed, report) = check_weak_nash(game, &sampled.to_mixed::<T>(), epsilon, delta, Evaluator::Exact)?;
        Ok((sampled, passed, report))
    })
}

/// Where correlated samples are drawn from.
#[derive(Clone, Copy, Debug)]
pub enum CorrelatedSource<'a, T: Scalar> {
    Distribution(&'a CorrelatedDistribution<T>),
    /// Product distribution of a mixed profile.
    Product(&'a MixedProfile<T>),
}

/// Uniform distribution over `k` i.i.d. draws from `source`.
pub fn sample_correlated_k_uniform<T: Scalar>(
    source: CorrelatedSource<'_, T>,
    k: u64,
    seed: u64,
) -> Result<CorrelatedDistribution<T>> {
    let k = k_to_u32(k)?;
    let mut rng = derive_rng(seed, "k-uniform-distribution", 0);
    let draws: Vec<_> = (0..k)
        .map(|_| match source {
            CorrelatedSource::Distribution(d) => d.sample(&mut rng).clone(),
            CorrelatedSource::Product(p) => p.sample(&mut rng),
        })
        .collect();
    CorrelatedDistribution::from_multiset(draws)
}

/// Samples k-uniform distributions at `k = k_bound_weak_ce(ε, δ, m)` until
/// one passes the weak correlated-equilibrium check.
pub fn weak_ce_by_sampling<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    source: CorrelatedSource<'_, T>,
    epsilon: f64,
    delta: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<SamplingOutcome<CorrelatedDistribution<T>>> {
    let k = k_bound_weak_ce(epsilon, delta, game.num_actions())?;
    weak_ce_by_sampling_with_k(game, source, k, epsilon, delta, seed, max_attempts)
}

pub fn weak_ce_by_sampling_with_k<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    source: CorrelatedSource<'_, T>,
    k: u64,
    epsilon: f64,
    delta: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<SamplingOutcome<CorrelatedDistribution<T>>> {
    match source {
        CorrelatedSource::Product(p) => {
            p.validate(game.num_players(), game.num_actions())?;
            require_exact_nash(game, p)?;
        }
        CorrelatedSource::Distribution(d) => {
            if let Some((i, r)) = ce_regrets(game, d)?
                .iter()
                .enumerate()
                .find(|(_, r)| r.internal > T::regret_tol())
            {
                return Err(Error::Invalid(format!(
                    "input distribution is not an exact correlated equilibrium: player {i} has regret {}",
                    r.internal
                )));
            }
        }
    }
    run_attempts(k, seed, "weak-ce-attempt", max_attempts, |s| {
        let sampled = sample_correlated_k_uniform(source, k, s)?;
        let (passed, report) = check_weak_ce(game, &sampled, epsilon, delta)?;
        Ok((sampled, passed, report))
    })
}

/// `min(1, 4 e^{−ε̂² k / 8} / ε̂)`.
pub fn concentration_bound(eps_hat: f64, k: u64) -> f64 {
    (4.0 * (-(eps_hat * eps_hat) * k as f64 / 8.0).exp() / eps_hat).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub eps_hat: f64,
    pub k: u64,
    pub trials: usize,
    pub violations: usize,
    pub frequency: f64,
    pub bound: f64,
    /// Per-trial `|E_resampled[f] − E[f]|`, in trial order.
    pub deviations: Vec<f64>,
}

/// Measures how often the exact expectation of `f = u_player` under the
/// empirical product of `k` draws per player deviates from its expectation
/// under `profile` by more than `eps_hat`.
pub fn concentration_trial<T: Scalar, G: Game<T> + ?Sized>(
    game: &G,
    player: usize,
    profile: &MixedProfile<T>,
    eps_hat: f64,
    k: u64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if !(eps_hat > 0.0) {
        return Err(Error::Invalid(format!("eps_hat {eps_hat} must be positive")));
    }
    let exact = expected_payoff(game, profile, player)?.as_f64();
    let deviations = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, "concentration-trial", t as u64);
            let sampled = sample_k_uniform_profile(profile, k, s)?.to_mixed::<T>();
            Ok((expected_payoff(game, &sampled, player)?.as_f64() - exact).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let violations = deviations.iter().filter(|&&d| d > eps_hat).count();
    Ok(ConcentrationReport {
        eps_hat,
        k,
        trials,
        violations,
        frequency: if trials == 0 { 0.0 } else { violations as f64 / trials as f64 },
        bound: concentration_bound(eps_hat, k),
        deviations,
    })
}
