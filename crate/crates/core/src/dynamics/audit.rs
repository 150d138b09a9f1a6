//! Support-size audit of play traces on the XOR game.
//!
//! For every prefix whose pushforward has at most `2^κ / 4` points, the
//! violated-player finder names a player whose exact payoff under the prefix
//! distribution is at most `¼`, while its individually rational level is
//! `½`. Such a prefix is not `¼`-individually rational, and since every
//! `¼`-correlated equilibrium is `¼`-individually rational, it is not a
//! `¼`-correlated equilibrium either.

use serde::{Deserialize, Serialize};

use super::PlayTrace;
use crate::constructions::{ViolationSearch, XorIrGame};
use crate::{Result, Scalar};

pub const IMPLICATION: &str = "a player with payoff at most 1/4 against individually rational level 1/2 makes the prefix not 1/4-individually rational (strictly so when the payoff is below 1/4); every 1/4-correlated equilibrium is 1/4-individually rational, so such a prefix is not a 1/4-correlated equilibrium";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PrefixCertificate<T> {
    pub t: usize,
    pub support: usize,
    pub player: usize,
    pub label: u32,
    pub bits: u64,
    pub payoff: T,
    pub ir_level: T,
    /// `payoff ≤ ¼`.
    pub certified: bool,
    /// `payoff < ¼`, a strict violation of `¼`-individual rationality.
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AuditReport<T> {
    pub kappa: u32,
    pub players: usize,
    pub support_threshold: usize,
    pub prefixes: usize,
    /// Prefixes within the support threshold.
    pub eligible: usize,
    pub certified: usize,
    /// Eligible prefixes whose best certificate exceeded `¼`; the
    /// construction guarantees none.
    pub failures: usize,
    /// Prefixes over the threshold; no claim is made about them.
    pub skipped: usize,
    pub certificates: Vec<PrefixCertificate<T>>,
    pub implication: String,
}

/// Audits every prefix of `trace`.
pub fn support_lower_bound_audit<T: Scalar>(game: &XorIrGame, trace: &PlayTrace<T>) -> Result<AuditReport<T>> {
    let points = game.points();
    let threshold = points / 4;
    let mut counts = vec![0usize; points];
    let mut support = 0usize;
    let mut certificates = Vec::new();
    let (mut eligible, mut skipped) = (0, 0);
    let quarter = T::lit(0.25);
    for (idx, round) in trace.rounds.iter().enumerate() {
        let t = idx + 1;
        let x = game.xor_image(round) as usize;
        if counts[x] == 0 {
            support += 1;
        }
        counts[x] += 1;
        if support > threshold {
            skipped += 1;
            continue;
        }
        eligible += 1;
        let tt = T::from_usize_lossy(t);
        let nu: Vec<T> = counts.iter().map(|&c| T::from_usize_lossy(c) / tt).collect();
        let cert = match game.find_violated_player_in(&nu)? {
            ViolationSearch::Found(c) | ViolationSearch::NotFound(c) => c,
        };
        // Re-derive the payoff from the raw counts and the certificate's set.
        let hits: usize = (0..points).filter(|&y| (cert.target_set >> y) & 1 == 1).map(|y| counts[y]).sum();
        let payoff = T::from_usize_lossy(hits) / tt;
        certificates.push(PrefixCertificate {
            t,
            support,
            player: cert.player,
            label: cert.label,
            bits: cert.bits,
            payoff,
            ir_level: T::lit(0.5),
            certified: payoff <= quarter + T::regret_tol(),
            strict: payoff < quarter - T::regret_tol(),
        });
    }
    let certified = certificates.iter().filter(|c| c.certified).count();
    Ok(AuditReport {
        kappa: game.kappa(),
        players: game.player_count(),
        support_threshold: threshold,
        prefixes: trace.rounds.len(),
        eligible,
        certified,
        failures: eligible - certified,
        skipped,
        certificates,
        implication: IMPLICATION.to_string(),
    })
}
