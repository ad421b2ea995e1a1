use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Observations in column-major order: `n` rows (observations) by `p`
/// columns (coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Build from column-major storage.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let p = columns.len();
        if p == 0 {
            return Err(Error::InvalidInput("data matrix has no columns".into()));
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("columns have unequal lengths".into()));
        }
        let values: Vec<f64> = columns.into_iter().flatten().collect();
        Self::from_column_major(n, p, values)
    }

    /// Build from row-major rows (as read from a CSV file).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("data matrix has no rows".into()));
        }
        let p = rows[0].len();
        let mut values = vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::RaggedRows {
                    row: i,
                    found: row.len(),
                    expected: p,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                values[j * n + i] = v;
            }
        }
        Self::from_column_major(n, p, values)
    }

    pub fn from_column_major(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 || p < 1 {
            return Err(Error::InvalidInput(format!(
                "need n >= 2 observations and p >= 1 columns (got n = {n}, p = {p})"
            )));
        }
        if values.len() != n * p {
            return Err(Error::InvalidInput("storage length is not n * p".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos % n,
                pos / n
            )));
        }
        Ok(Self { n, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.n + row]
    }

    /// Apply `f` to every entry of column `j`.
    pub fn map_column(&mut self, j: usize, f: impl Fn(f64) -> f64) {
        for v in &mut self.values[j * self.n..(j + 1) * self.n] {
            *v = f(*v);
        }
    }
}

/// How tied observations are ranked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "seed", rename_all = "snake_case")]
pub enum TiePolicy {
    Reject,
    RandomBreak(u64),
}

/// Column ranks, each column a permutation of 1..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankMatrix {
    n: usize,
    p: usize,
    ranks: Vec<u32>,
}

impl RankMatrix {
    /// Build from rank columns, validating that each is a permutation of 1..n.
    pub fn from_columns(columns: Vec<Vec<u32>>) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if p == 0 || n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("rank columns must be non-empty and equal length".into()));
        }
        for c in &columns {
            check_permutation(c)?;
        }
        Ok(Self {
            n,
            p,
            ranks: columns.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.ranks[j * self.n..(j + 1) * self.n]
    }
}

/// Check that `ranks` is a permutation of 1..n.
pub(crate) fn check_permutation(ranks: &[u32]) -> Result<()> {
    let n = ranks.len();
    let mut seen = vec![false; n];
    for &r in ranks {
        let r = r as usize;
        if r == 0 || r > n || seen[r - 1] {
            return Err(Error::BadPermutation { n });
        }
        seen[r - 1] = true;
    }
    Ok(())
}

/// Rank every column of `data` (1 = smallest).
pub fn compute_ranks(data: &DataMatrix, tie_policy: TiePolicy) -> Result<RankMatrix> {
    let n = data.n();
    let mut ranks = Vec::with_capacity(n * data.p());
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for (j, col) in data.columns().enumerate() {
        order.clear();
        order.extend(0..n);
        match tie_policy {
            TiePolicy::Reject => {
                order.sort_unstable_by(|&a, &b| col[a].total_cmp(&col[b]));
                if order.windows(2).any(|w| col[w[0]] == col[w[1]]) {
                    return Err(Error::TiesPresent { column: j });
                }
            }
            TiePolicy::RandomBreak(seed) => {
                let mut rng = rng::stream(seed, j as u64);
                let keys: Vec<u64> = (0..n).map(|_| rng.random()).collect();
                order.sort_unstable_by(|&a, &b| {
                    col[a].total_cmp(&col[b]).then(keys[a].cmp(&keys[b])).then(a.cmp(&b))
                });
            }
        }
        let mut col_ranks = vec![0u32; n];
        for (r, &i) in order.iter().enumerate() {
            col_ranks[i] = r as u32 + 1;
        }
        ranks.extend(col_ranks);
    }
    Ok(RankMatrix {
        n,
        p: data.p(),
        ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(col: Vec<f64>) -> DataMatrix {
        DataMatrix::from_columns(vec![col]).unwrap()
    }

    #[test]
    fn ranks_follow_order_statistics() {
        let r = compute_ranks(&single(vec![0.3, -1.2, 2.0]), TiePolicy::Reject).unwrap();
        assert_eq!(r.column(0), &[2, 1, 3]);
    }

    #[test]
    fn sorted_column_gets_identity_ranks() {
        let r = compute_ranks(&single((0..7).map(f64::from).collect()), TiePolicy::Reject).unwrap();
        assert_eq!(r.column(0), &[1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn ties_rejected_with_column() {
        let d = DataMatrix::from_columns(vec![vec![1.0, 2.0], vec![1.0, 1.0]]).unwrap();
        match compute_ranks(&d, TiePolicy::Reject) {
            Err(Error::TiesPresent { column }) => assert_eq!(column, 1),
            other => panic!("expected TiesPresent, got {other:?}"),
        }
    }

    #[test]
    fn random_break_is_seeded_permutation() {
        let d = single(vec![1.0, 1.0, 1.0, 0.0, 2.0]);
        let a = compute_ranks(&d, TiePolicy::RandomBreak(3)).unwrap();
        let b = compute_ranks(&d, TiePolicy::RandomBreak(3)).unwrap();
        assert_eq!(a, b);
        check_permutation(a.column(0)).unwrap();
        assert_eq!(a.column(0)[3], 1);
        assert_eq!(a.column(0)[4], 5);
    }

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert!(DataMatrix::from_columns(vec![vec![1.0, f64::NAN]]).is_err());
        assert!(matches!(
            DataMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::RaggedRows { row: 1, .. })
        ));
    }
}
