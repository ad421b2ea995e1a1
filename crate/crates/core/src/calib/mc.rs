use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::pair::{fast_value, Scratch};
use crate::kernels::CoefficientKind;

/// Powers of T_n whose Monte Carlo means are stored.
pub const MC_POWERS: [u32; 5] = [2, 4, 6, 8, 12];

pub const MIN_REPLICATES: usize = 10_000;

const CHUNK: usize = 4096;

/// Sample means of T_n^k, k in MC_POWERS, over B null permutations.
#[derive(Clone, Debug, PartialEq)]
pub struct McMoments {
    pub replicates: usize,
    pub seed: u64,
    /// Aligned with MC_POWERS.
    pub means: [f64; 5],
}

impl McMoments {
    pub fn get(&self, power: u32) -> Option<f64> {
        MC_POWERS.iter().position(|&k| k == power).map(|i| self.means[i])
    }
}

/// Draw B uniform permutations (replicate b uses stream (seed, b)) and
/// average the stored powers of the fast statistic. Chunk sums are reduced
/// in index order, so the result does not depend on the worker count.
pub fn mc_moments(kind: CoefficientKind, n: usize, b: usize, seed: u64) -> Result<McMoments> {
    if b < MIN_REPLICATES {
        return Err(Error::InfeasibleB(b));
    }
    if !kind.is_rank_based() {
        return Err(Error::UnsupportedKind(kind));
    }
    if n < kind.order().max(2) {
        return Err(Error::InvalidInput(format!(
            "{kind} needs n >= {} (got {n})",
            kind.order()
        )));
    }
    let chunks = b.div_ceil(CHUNK);
    let sums: Vec<[f64; 5]> = (0..chunks)
        .into_par_iter()
        .map_init(
            || (Scratch::default(), Vec::<u32>::with_capacity(n)),
            |(scratch, pi), c| {
                let mut acc = [0.0f64; 5];
                for rep in c * CHUNK..((c + 1) * CHUNK).min(b) {
                    let mut rng = crate::rng::stream(seed, rep as u64);
                    pi.clear();
                    pi.extend(0..n as u32);
                    pi.shuffle(&mut rng);
                    let t = fast_value(kind, pi, scratch).to_f64();
                    let t2 = t * t;
                    let t4 = t2 * t2;
                    let t6 = t4 * t2;
                    let t8 = t4 * t4;
                    acc[0] += t2;
                    acc[1] += t4;
                    acc[2] += t6;
                    acc[3] += t8;
                    acc[4] += t6 * t6;
                }
                acc
            },
        )
        .collect();
    let mut total = [0.0f64; 5];
    for s in &sums {
        for (t, v) in total.iter_mut().zip(s) {
            *t += v;
        }
    }
    let bf = b as f64;
    Ok(McMoments {
        replicates: b,
        seed,
        means: total.map(|v| v / bf),
    })
}
