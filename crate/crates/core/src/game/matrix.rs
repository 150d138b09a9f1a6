use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense 0/1 matrix. The text format is a header line `n m` followed by `n`
/// rows of `m` whitespace-separated `0`/`1` tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::Invalid("matrix entries must be 0 or 1".into()));
        }
        Ok(BinaryMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        BinaryMatrix { rows: n, cols: n, data }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![1; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j] == 1
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| (0..self.cols).filter(|&j| self.get(i, j)).count())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|j| (0..self.rows).filter(|&i| self.get(i, j)).count())
            .collect()
    }

    /// Column indices of the ones in row `i`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j)).collect()
    }

    /// Row indices of the ones in column `j`.
    pub fn col_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        BinaryMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `M χ` for a ±1 column coloring.
    pub fn signed_row_sums(&self, coloring: &[i8]) -> Vec<i64> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| self.get(i, j))
                    .map(|j| coloring[j] as i64)
                    .sum()
            })
            .collect()
    }

    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in order {
            data.extend_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        BinaryMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let rows = next_usize("row count")?;
        let cols = next_usize("column count")?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            match next_usize("matrix entry")? {
                v @ (0 | 1) => data.push(v as u8),
                v => return Err(Error::Parse(format!("matrix entry {v} is not 0/1"))),
            }
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("trailing tokens after matrix".into()));
        }
        Self::new(rows, cols, data)
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<&str> = (0..self.cols)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_round_trip() {
        let m: BinaryMatrix = "2 3\n1 0 1\n0 1 1\n".parse().unwrap();
        assert_eq!(m.row_sums(), vec![2, 2]);
        assert_eq!(m.col_sums(), vec![1, 1, 2]);
        assert_eq!(m.to_string().parse::<BinaryMatrix>().unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!("2 2\n1 0\n1".parse::<BinaryMatrix>().is_err());
        assert!("1 2\n1 2".parse::<BinaryMatrix>().is_err());
        assert!("1 1\n1 1".parse::<BinaryMatrix>().is_err());
    }

    #[test]
    fn transpose_swaps_sums() {
        let m: BinaryMatrix = "2 3\n1 0 1\n0 1 1\n".parse().unwrap();
        let t = m.transpose();
        assert_eq!(t.row_sums(), m.col_sums());
        assert_eq!(t.transpose(), m);
    }
}
