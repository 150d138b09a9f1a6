//! Beck–Fiala floating-colors rounding.
//!
//! Colors start at 0 and move inside `[−1, 1]^m`. While some row has more
//! than `t` floating columns (`t` the largest column sum), the colors move
//! along a direction that keeps every such row's sum fixed until another
//! color reaches `±1` and freezes. Such a direction exists because there are
//! fewer of these rows than floating columns. Remaining floating colors are
//! rounded to the nearest sign, which moves each row sum by less than `2t`.

use super::{DiscMethod, DiscReport};
use crate::game::BinaryMatrix;
use crate::{Error, Result};

const FREEZE_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const MAX_RESTARTS: usize = 8;

/// Nonzero vector in the null space of `rows × cols` matrix `a`, which must
/// have fewer rows than columns.
fn null_vector(mut a: Vec<Vec<f64>>, cols: usize) -> Option<Vec<f64>> {
    let rows = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if val <= PIVOT_TOL {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for v in a[r].iter_mut() {
            *v /= p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0.0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] -= f * a[r][j];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut y = vec![0.0; cols];
    y[free] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        y[pc] = -a[row][free];
    }
    Some(y)
}

fn float_colors(matrix: &BinaryMatrix, t: usize, perturb: usize) -> Option<Vec<f64>> {
    let m = matrix.cols();
    let mut x = vec![0.0f64; m];
    let row_support: Vec<Vec<usize>> = (0..matrix.rows()).map(|i| matrix.row_support(i)).collect();
    for _ in 0..=m {
        let floating: Vec<usize> = (0..m).filter(|&j| x[j].abs() < 1.0 - FREEZE_TOL).collect();
        if floating.is_empty() {
            break;
        }
        let active: Vec<&Vec<usize>> = row_support
            .iter()
            .filter(|s| s.iter().filter(|&&j| x[j].abs() < 1.0 - FREEZE_TOL).count() > t)
            .collect();
        if active.is_empty() {
            break;
        }
        let pos: Vec<Option<usize>> = (0..m).map(|j| floating.iter().position(|&f| f == j)).collect();
        let system: Vec<Vec<f64>> = active
            .iter()
            .map(|s| {
                let mut row = vec![0.0; floating.len()];
                for &j in s.iter() {
                    if let Some(p) = pos[j] {
                        row[p] = 1.0;
                    }
                }
                row
            })
            .collect();
        let mut y = null_vector(system, floating.len())?;
        // Restarts walk the opposite direction.
        if perturb % 2 == 1 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
        let step = floating
            .iter()
            .zip(&y)
            .filter(|(_, &d)| d.abs() > PIVOT_TOL)
            .map(|(&j, &d)| if d > 0.0 { (1.0 - x[j]) / d } else { (-1.0 - x[j]) / d })
            .fold(f64::INFINITY, f64::min);
        if !step.is_finite() {
            return None;
        }
        for (&j, &d) in floating.iter().zip(&y) {
            x[j] = (x[j] + step * d).clamp(-1.0, 1.0);
            if x[j].abs() >= 1.0 - FREEZE_TOL {
                x[j] = x[j].signum();
            }
        }
    }
    Some(x)
}

/// Coloring with `‖Mχ‖_∞ < 2t`, `t` the largest column sum.
pub fn beck_fiala_color(matrix: &BinaryMatrix) -> Result<DiscReport> {
    let t = matrix.col_sums().into_iter().max().unwrap_or(0);
    for attempt in 0..MAX_RESTARTS {
        if let Some(x) = float_colors(matrix, t, attempt) {
            let coloring: Vec<i8> = x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect();
            let report = DiscReport::from_coloring(matrix, coloring, DiscMethod::BeckFiala);
            if t == 0 || report.disc < 2 * t as i64 {
                return Ok(report);
            }
        }
    }
    Err(Error::Numerical(format!("floating-colors rounding degenerate after {MAX_RESTARTS} restarts")))
}
