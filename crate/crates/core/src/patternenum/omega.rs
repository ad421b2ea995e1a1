use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::taustar::coefficient_array;
use crate::error::{Error, Result};
use crate::exact::{binomial, binomial_u128, factorial, parse_ratio, ratio_int};
use crate::kernels::pattern::{next_permutation, pattern_table, PatternTable};
use crate::kernels::CoefficientKind;

/// Index of an Omega coefficient: kernel kind, moment order r, union size b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaKey {
    pub kind: CoefficientKind,
    pub r: usize,
    pub b: usize,
}

impl OmegaKey {
    pub fn new(kind: CoefficientKind, r: usize, b: usize) -> Result<Self> {
        if !kind.is_degenerate() {
            return Err(Error::UnsupportedKind(kind));
        }
        let m = kind.order();
        if r == 0 || b < m || b > r * m {
            return Err(Error::InvalidInput(format!(
                "Omega index out of range: need r >= 1 and {m} <= b <= {} (got r = {r}, b = {b})",
                r * m
            )));
        }
        Ok(OmegaKey { kind, r, b })
    }

    fn m(&self) -> usize {
        self.kind.order()
    }

    /// Rough kernel-evaluation count of the exhaustive route.
    pub fn enumeration_work(&self) -> f64 {
        let b = self.b as f64;
        let subsets = binomial(self.b as u64, self.m() as u64);
        let per_perm = crate::exact::to_f64(&ratio_int(subsets)) * self.m() as f64
            + b * (1u64 << self.b) as f64;
        crate::exact::to_f64(&ratio_int(factorial(self.b as u64))) * per_perm
    }
}

/// Where an Omega value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSource {
    Enumerated,
    /// Embedded published constant.
    Printed,
    /// Some subset meets the others in fewer than two points.
    DegeneracyZero,
}

#[derive(Clone, Copy, Debug)]
pub struct OmegaOptions {
    /// Allow exhaustive enumeration beyond `work_limit`.
    pub long_running: bool,
    pub work_limit: f64,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        OmegaOptions {
            long_running: false,
            work_limit: 5e8,
        }
    }
}

/// Hard ceiling even with `long_running`.
const HARD_WORK_LIMIT: f64 = 1e12;

const PRINTED_R2: [(CoefficientKind, usize, &str); 15] = [
    (CoefficientKind::HoeffdingD, 5, "1/10"),
    (CoefficientKind::HoeffdingD, 6, "41/45"),
    (CoefficientKind::HoeffdingD, 7, "49/30"),
    (CoefficientKind::HoeffdingD, 8, "28/45"),
    (CoefficientKind::BkrR, 6, "41/180"),
    (CoefficientKind::BkrR, 7, "287/60"),
    (CoefficientKind::BkrR, 8, "952/45"),
    (CoefficientKind::BkrR, 9, "154/5"),
    (CoefficientKind::BkrR, 10, "14"),
    (CoefficientKind::TauStar, 4, "2/9"),
    (CoefficientKind::TauStar, 5, "32/45"),
    (CoefficientKind::TauStar, 6, "2/5"),
    (CoefficientKind::HoeffdingD, 9, "0"),
    (CoefficientKind::HoeffdingD, 10, "0"),
    (CoefficientKind::BkrR, 11, "0"),
];

/// Published value of Omega, when one exists.
pub fn printed_omega(key: OmegaKey) -> Option<BigRational> {
    if key.r == 2 {
        if key.kind == CoefficientKind::BkrR && key.b == 12 {
            return Some(BigRational::zero());
        }
        if key.kind == CoefficientKind::TauStar && (key.b == 7 || key.b == 8) {
            return Some(BigRational::zero());
        }
        return PRINTED_R2
            .iter()
            .find(|(k, b, _)| *k == key.kind && *b == key.b)
            .and_then(|(_, _, s)| parse_ratio(s));
    }
    if key.kind == CoefficientKind::TauStar && (key.r == 4 || key.r == 8) {
        let arr = coefficient_array(key.r).ok()?;
        let scale = ratio_int(num_traits::pow(BigInt::from(3), key.r));
        return Some(arr.get(key.b).unwrap_or_else(BigRational::zero) / scale);
    }
    None
}

/// Omega vanishes once b exceeds r (m - 1): some subset then shares at most
/// one point with the union of the others, and the first-order projection
/// of a degenerate kernel is zero.
pub fn is_degeneracy_zero(key: OmegaKey) -> bool {
    key.b > key.r * (key.m() - 1)
}

fn cache() -> &'static Mutex<HashMap<OmegaKey, BigRational>> {
    static C: OnceLock<Mutex<HashMap<OmegaKey, BigRational>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Omega with the default policy: enumerate when cheap, else the embedded
/// constant, else fail with a work estimate.
pub fn omega(key: OmegaKey) -> Result<BigRational> {
    omega_with(key, OmegaOptions::default()).map(|(v, _)| v)
}

pub fn omega_with(key: OmegaKey, opts: OmegaOptions) -> Result<(BigRational, OmegaSource)> {
    let key = OmegaKey::new(key.kind, key.r, key.b)?;
    if is_degeneracy_zero(key) {
        return Ok((BigRational::zero(), OmegaSource::DegeneracyZero));
    }
    let work = key.enumeration_work();
    if work <= opts.work_limit {
        return Ok((omega_enumerate(key)?, OmegaSource::Enumerated));
    }
    if !opts.long_running {
        if let Some(v) = printed_omega(key) {
            return Ok((v, OmegaSource::Printed));
        }
        return Err(Error::Infeasible {
            work,
            hint: "enable the long-running flag to enumerate".into(),
        });
    }
    Ok((omega_enumerate(key)?, OmegaSource::Enumerated))
}

/// Exhaustive Omega over S_b; per permutation the sum over covers is
/// obtained by inclusion-exclusion over the union,
/// `sum_U (-1)^{b-|U|} (sum_{I subset U} psi_I)^r`.
pub fn omega_enumerate(key: OmegaKey) -> Result<BigRational> {
    let key = OmegaKey::new(key.kind, key.r, key.b)?;
    let work = key.enumeration_work();
    if work > HARD_WORK_LIMIT {
        return Err(Error::Infeasible {
            work,
            hint: format!("exceeds the hard limit of {HARD_WORK_LIMIT:.0e}"),
        });
    }
    if let Some(v) = cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let table = pattern_table(key.kind)?;
    let (b, m, r) = (key.b, key.m(), key.r);
    let subsets = subset_list(b, m);
    let chunks: Vec<i128> = (0..b)
        .into_par_iter()
        .map(|first| {
            let mut pi: Vec<u8> = Vec::with_capacity(b);
            pi.push(first as u8);
            pi.extend((0..b as u8).filter(|&v| v as usize != first));
            let mut f = vec![0i64; 1 << b];
            let mut vals = vec![0u8; m];
            let mut acc: i128 = 0;
            loop {
                acc += cover_sum(table, &pi, &subsets, r, &mut f, &mut vals);
                if !next_permutation(&mut pi[1..]) {
                    break;
                }
            }
            acc
        })
        .collect();
    let total: i128 = chunks.into_iter().sum();
    let den = factorial(b as u64) * num_traits::pow(BigInt::from(table.scale), r);
    let v = BigRational::new(BigInt::from(total), den);
    cache().lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// (bitmask, indices) of every m-subset of 0..b.
fn subset_list(b: usize, m: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    crate::kernels::pair::for_each_subset(b, m, |ix| {
        let mask = ix.iter().fold(0usize, |acc, &i| acc | 1 << i);
        out.push((mask, ix.to_vec()));
    });
    out
}

fn cover_sum(
    table: &PatternTable,
    pi: &[u8],
    subsets: &[(usize, Vec<usize>)],
    r: usize,
    f: &mut [i64],
    vals: &mut [u8],
) -> i128 {
    let b = pi.len();
    f.iter_mut().for_each(|v| *v = 0);
    for (mask, ix) in subsets {
        for (v, &i) in vals.iter_mut().zip(ix) {
            *v = pi[i];
        }
        f[*mask] = table.lookup(vals);
    }
    // subset-sum (zeta) transform
    for bit in 0..b {
        let step = 1 << bit;
        for mask in 0..f.len() {
            if mask & step != 0 {
                f[mask] += f[mask ^ step];
            }
        }
    }
    let mut acc: i128 = 0;
    for (mask, &s) in f.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let p = (s as i128).pow(r as u32);
        if (b - mask.count_ones() as usize) % 2 == 0 {
            acc += p;
        } else {
            acc -= p;
        }
    }
    acc
}

/// Number of ordered covers of [b] by r m-subsets.
pub fn cover_count(m: usize, r: usize, b: usize) -> BigInt {
    let mut total = BigInt::zero();
    for k in m..=b {
        let t = binomial(b as u64, k as u64) * num_traits::pow(binomial(k as u64, m as u64), r);
        if (b - k) % 2 == 0 {
            total += t;
        } else {
            total -= t;
        }
    }
    total
}

/// Monte Carlo estimate of Omega with its standard error.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OmegaEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Sample (pi, cover) uniformly. The first r - 1 subsets are uniform; the
/// last takes the u uncovered points plus a uniform fill from the covered
/// ones, accepted with probability C(b-u, m-u) / C(b-u_min, m-u_min) so
/// that every cover is equally likely.
pub fn omega_monte_carlo(key: OmegaKey, samples: usize, seed: u64) -> Result<OmegaEstimate> {
    let key = OmegaKey::new(key.kind, key.r, key.b)?;
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let table = pattern_table(key.kind)?;
    let (b, m, r) = (key.b, key.m(), key.r);
    let covers = crate::exact::to_f64(&ratio_int(cover_count(m, r, b)));
    let unit = covers / (table.scale as f64).powi(r as i32);
    let u_min = b.saturating_sub((r - 1) * m);
    let fills = |u: usize| binomial_u128((b - u) as u64, (m - u) as u64) as f64;
    let accept: Vec<f64> = (0..=m).map(|u| if u < u_min { 0.0 } else { fills(u) / fills(u_min) }).collect();
    const CHUNK: usize = 100_000;
    let n_chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = crate::rng::stream(seed, c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut pi: Vec<u8> = (0..b as u8).collect();
            let mut pool: Vec<usize> = (0..b).collect();
            let mut sets: Vec<Vec<usize>> = vec![Vec::with_capacity(m); r];
            let mut vals = vec![0u8; m];
            let mut covered = Vec::with_capacity(b);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                pi.shuffle(&mut rng);
                loop {
                    let mut union = 0usize;
                    for set in sets.iter_mut().take(r - 1) {
                        for i in 0..m {
                            let j = rng.random_range(i..b);
                            pool.swap(i, j);
                        }
                        set.clear();
                        set.extend_from_slice(&pool[..m]);
                        set.sort_unstable();
                        union |= set.iter().fold(0, |acc, &i| acc | 1 << i);
                    }
                    let u = b - union.count_ones() as usize;
                    if u > m || rng.random::<f64>() >= accept[u] {
                        continue;
                    }
                    covered.clear();
                    let last = &mut sets[r - 1];
                    last.clear();
                    for i in 0..b {
                        if union >> i & 1 == 1 {
                            covered.push(i);
                        } else {
                            last.push(i);
                        }
                    }
                    for i in 0..m - u {
                        let j = rng.random_range(i..covered.len());
                        covered.swap(i, j);
                    }
                    last.extend_from_slice(&covered[..m - u]);
                    last.sort_unstable();
                    break;
                }
                let mut prod = 1i64;
                for set in &sets {
                    for (v, &i) in vals.iter_mut().zip(set) {
                        *v = pi[i];
                    }
                    prod *= table.lookup(&vals);
                    if prod == 0 {
                        break;
                    }
                }
                let x = prod as f64;
                s1 += x;
                s2 += x * x;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = parts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean) * nf / (nf - 1.0);
    Ok(OmegaEstimate {
        mean: mean * unit,
        std_error: (var / nf).sqrt() * unit,
        samples,
    })
}

/// Exact `E T_n^r` from the binomial-basis expansion.
pub fn moment_from_omega(kind: CoefficientKind, r: usize, n: usize) -> Result<BigRational> {
    moment_from_omega_with(kind, r, n, OmegaOptions::default())
}

pub fn moment_from_omega_with(
    kind: CoefficientKind,
    r: usize,
    n: usize,
    opts: OmegaOptions,
) -> Result<BigRational> {
    if !kind.is_degenerate() {
        return Err(Error::UnsupportedKind(kind));
    }
    let m = kind.order();
    if n < m {
        return Err(Error::InvalidInput(format!("{kind} needs n >= {m} (got {n})")));
    }
    if r == 0 {
        return Ok(BigRational::from_integer(1.into()));
    }
    let mut total = BigRational::zero();
    for b in m..=(r * m).min(n) {
        let key = OmegaKey::new(kind, r, b)?;
        let w = match omega_with(key, opts) {
            Ok((v, _)) => v,
            Err(Error::Infeasible { .. }) => return Err(Error::MissingOmega { kind, r, b }),
            Err(e) => return Err(e),
        };
        total += ratio_int(binomial(n as u64, b as u64)) * w;
    }
    let den = num_traits::pow(binomial(n as u64, m as u64), r);
    Ok(total / ratio_int(den))
}
