use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pair::{fast_value, Scratch};
use super::{CoefficientKind, DataMatrix, RankMatrix};
use crate::error::{Error, Result};

/// All pairwise values of one coefficient, for (s, t) with s < t in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStatSheet {
    pub kind: CoefficientKind,
    pub n: usize,
    pub p: usize,
    pub values: Vec<f64>,
}

impl PairStatSheet {
    pub fn new(kind: CoefficientKind, n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if p < 2 || values.len() != p * (p - 1) / 2 {
            return Err(Error::InvalidInput(format!(
                "sheet for p = {p} needs {} values, got {}",
                p * p.saturating_sub(1) / 2,
                values.len()
            )));
        }
        Ok(Self { kind, n, p, values })
    }

    pub fn num_pairs(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.values[pair_index(s, t, self.p)]
    }
}

/// Position of the pair (s, t), s < t, in lexicographic order.
pub fn pair_index(s: usize, t: usize, p: usize) -> usize {
    debug_assert!(s < t && t < p);
    s * (2 * p - s - 1) / 2 + (t - s - 1)
}

/// Pairwise sheet of a rank coefficient via the fast algorithms. Pairs are
/// evaluated in parallel; each value depends only on its two columns.
pub fn pairwise_sheet(ranks: &RankMatrix, kind: CoefficientKind) -> Result<PairStatSheet> {
    if !kind.is_rank_based() {
        return Err(Error::UnsupportedKind(kind));
    }
    let (n, p) = (ranks.n(), ranks.p());
    if p < 2 {
        return Err(Error::InvalidInput("need at least two columns".into()));
    }
    if n < kind.order() {
        return Err(Error::InvalidInput(format!("{kind} needs n >= {}", kind.order())));
    }
    // inverse[s][k] = observation holding rank k+1 in column s
    let inverse: Vec<Vec<u32>> = (0..p)
        .map(|s| {
            let mut inv = vec![0u32; n];
            for (i, &r) in ranks.column(s).iter().enumerate() {
                inv[r as usize - 1] = i as u32;
            }
            inv
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..p - 1)
        .into_par_iter()
        .map_init(
            || (Scratch::default(), vec![0u32; n]),
            |(scratch, pi), s| {
                let inv = &inverse[s];
                (s + 1..p)
                    .map(|t| {
                        let yr = ranks.column(t);
                        for (k, &obs) in inv.iter().enumerate() {
                            pi[k] = yr[obs as usize] - 1;
                        }
                        fast_value(kind, pi, scratch).to_f64()
                    })
                    .collect()
            },
        )
        .collect();
    PairStatSheet::new(kind, n, p, rows.into_iter().flatten().collect())
}

/// Pairwise Pearson correlations.
pub fn pearson_sheet(data: &DataMatrix) -> Result<PairStatSheet> {
    let (n, p) = (data.n(), data.p());
    if p < 2 {
        return Err(Error::InvalidInput("need at least two columns".into()));
    }
    let standardized: Vec<Vec<f64>> = data
        .columns()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n as f64;
            let centered: Vec<f64> = c.iter().map(|v| v - mean).collect();
            let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= 0.0 {
                return Err(Error::DegenerateColumn);
            }
            Ok(centered.into_iter().map(|v| v / norm).collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = (0..p - 1)
        .into_par_iter()
        .map(|s| {
            (s + 1..p)
                .map(|t| {
                    let r: f64 = standardized[s].iter().zip(&standardized[t]).map(|(a, b)| a * b).sum();
                    r.clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();
    PairStatSheet::new(CoefficientKind::Pearson, n, p, rows.into_iter().flatten().collect())
}

/// Sheet for any coefficient: Pearson from the raw data, the rest from ranks.
pub fn sheet_for(data: &DataMatrix, ranks: &RankMatrix, kind: CoefficientKind) -> Result<PairStatSheet> {
    match kind {
        CoefficientKind::Pearson => pearson_sheet(data),
        _ => pairwise_sheet(ranks, kind),
    }
}
