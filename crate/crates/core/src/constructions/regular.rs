//! Random biregular 0/1 matrices and the balance ratio.

use rand::seq::SliceRandom;

use crate::game::BinaryMatrix;
use crate::seed::derive_rng;
use crate::{Error, Result};

pub const REGULAR_RETRY_LIMIT: usize = 100_000;

/// `n × m` matrix with every row sum `t` and every column sum `t·n/m`.
///
/// Configuration model: row stubs are matched to a shuffled list of column
/// stubs, and the draw is rejected whenever a cell would be hit twice.
pub fn random_regular_matrix(n: usize, m: usize, t: usize, seed: u64) -> Result<BinaryMatrix> {
    if n == 0 || m == 0 || t == 0 {
        return Err(Error::Invalid("matrix dimensions and degree must be positive".into()));
    }
    if (t * n) % m != 0 {
        return Err(Error::Invalid(format!("t·n = {} is not divisible by m = {m}", t * n)));
    }
    let tc = t * n / m;
    if t > m || tc > n {
        return Err(Error::Invalid(format!("degrees ({t}, {tc}) infeasible for {n}x{m}")));
    }
    let mut stubs: Vec<usize> = (0..m).flat_map(|j| std::iter::repeat_n(j, tc)).collect();
    for attempt in 0..REGULAR_RETRY_LIMIT {
        let mut rng = derive_rng(seed, "random-regular-matrix", attempt as u64);
        stubs.shuffle(&mut rng);
        let mut data = vec![0u8; n * m];
        let simple = stubs.chunks(t).enumerate().all(|(i, cols)| {
            cols.iter().all(|&j| {
                let cell = &mut data[i * m + j];
                let fresh = *cell == 0;
                *cell = 1;
                fresh
            })
        });
        if simple {
            return BinaryMatrix::new(n, m, data);
        }
    }
    Err(Error::Numerical(format!(
        "no simple {n}x{m} matrix with row degree {t} after {REGULAR_RETRY_LIMIT} draws"
    )))
}

/// Smallest `α` for which the matrix is `α`-balanced: the largest ratio
/// among row sums, among column sums, and between row and column sums.
pub fn balance_ratio(matrix: &BinaryMatrix) -> Result<f64> {
    let r = matrix.row_sums();
    let c = matrix.col_sums();
    let (rmin, rmax) = min_max(&r);
    let (cmin, cmax) = min_max(&c);
    if rmin == 0 || cmin == 0 {
        return Err(Error::Invalid("matrix has an all-zero row or column".into()));
    }
    let ratio = |a: usize, b: usize| a as f64 / b as f64;
    Ok(ratio(rmax, rmin)
        .max(ratio(cmax, cmin))
        .max(ratio(rmax, cmin))
        .max(ratio(cmax, rmin)))
}

fn min_max(v: &[usize]) -> (usize, usize) {
    v.iter()
        .fold((usize::MAX, 0), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
