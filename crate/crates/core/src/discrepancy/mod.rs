//! Combinatorial discrepancy of 0/1 matrices and its correspondence with
//! near-half profiles of majority matching-pennies games.

mod beck_fiala;
mod equivalence;

pub use beck_fiala::beck_fiala_color;
pub use equivalence::{
    coloring_to_profile, equivalence_report, forward_k, profile_to_coloring, Direction, EquivalenceReport,
    ForwardReport, ReverseReport, NASH_THRESHOLD,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::BinaryMatrix;
use crate::{Error, Result};

pub const MAX_EXACT_COLUMNS: usize = 30;

/// Column signs `χ` and optional row signs `χ'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub cols: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<i8>>,
}

impl Coloring {
    pub fn new(cols: Vec<i8>, rows: Option<Vec<i8>>) -> Result<Self> {
        let ok = |v: &[i8]| v.iter().all(|&s| s == 1 || s == -1);
        if !ok(&cols) || !rows.as_deref().is_none_or(ok) {
            return Err(Error::Invalid("coloring entries must be +1 or -1".into()));
        }
        Ok(Coloring { cols, rows })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscMethod {
    Exact,
    BeckFiala,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscReport {
    pub disc: i64,
    pub coloring: Vec<i8>,
    pub row_sums: Vec<i64>,
    pub method: DiscMethod,
}

impl DiscReport {
    pub(crate) fn from_coloring(matrix: &BinaryMatrix, coloring: Vec<i8>, method: DiscMethod) -> Self {
        let row_sums = matrix.signed_row_sums(&coloring);
        let disc = row_sums.iter().map(|s| s.abs()).max().unwrap_or(0);
        DiscReport { disc, coloring, row_sums, method }
    }
}

/// Exact `min_χ ‖Mχ‖_∞`.
///
/// Colorings are ordered lexicographically with `+1` before `−1`; a global
/// sign flip preserves the value, so only colorings with `χ_0 = +1` are
/// scanned, and the lexicographically smallest minimizer is returned.
pub fn disc_exact(matrix: &BinaryMatrix) -> Result<DiscReport> {
    let m = matrix.cols();
    if m == 0 {
        return Ok(DiscReport::from_coloring(matrix, Vec::new(), DiscMethod::Exact));
    }
    if m > MAX_EXACT_COLUMNS {
        return Err(Error::guard("discrepancy columns", m as u128, MAX_EXACT_COLUMNS as u128));
    }
    // χ_j = −1 iff bit (m − 1 − j) of the code is set, so code order is
    // lexicographic order.
    let masks: Vec<(u32, i64)> = (0..matrix.rows())
        .map(|i| {
            let mask = (0..m).filter(|&j| matrix.get(i, j)).fold(0u32, |acc, j| acc | (1 << (m - 1 - j)));
            (mask, mask.count_ones() as i64)
        })
        .collect();
    let value = |code: u32| -> i64 {
        masks
            .iter()
            .map(|&(mask, ones)| (ones - 2 * (mask & code).count_ones() as i64).abs())
            .max()
            .unwrap_or(0)
    };
    let total: u64 = 1 << (m - 1);
    let chunk: u64 = 1 << 14;
    let (_, best_code) = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = total.min(lo + chunk);
            (lo..hi)
                .map(|code| (value(code as u32), code as u32))
                .min()
                .expect("nonempty chunk")
        })
        .min()
        .expect("at least one coloring");
    let coloring = (0..m)
        .map(|j| if (best_code >> (m - 1 - j)) & 1 == 1 { -1 } else { 1 })
        .collect();
    Ok(DiscReport::from_coloring(matrix, coloring, DiscMethod::Exact))
}
