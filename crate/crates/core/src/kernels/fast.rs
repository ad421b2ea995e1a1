//! Fast exact algorithms for single-pair rank coefficients.
//!
//! Every function takes `pi`, the second-coordinate ranks (0-based) listed
//! in first-coordinate order: `pi[k]` is the y-rank of the point whose
//! x-rank is `k`. All results are exact integers from which the
//! coefficient is an explicit rational.
//!
//! For the degenerate kernels of D and R, the sum over ordered distinct
//! tuples of `f(i1,i2) f(i3,i4)` with `f(i,j) = (a_i - a_j)(b_i - b_j)` is
//! `F^2 - 4 sum_i g_i^2 + 2 sum_ij f_ij^2` (F the total, g_i the row sums);
//! with binary `a`, `b` these only need the four quadrant counts around the
//! threshold point(s).

/// Sum of squared rank differences.
pub fn spearman_d2(pi: &[u32]) -> u64 {
    pi.iter()
        .enumerate()
        .map(|(k, &y)| {
            let d = k as i64 - y as i64;
            (d * d) as u64
        })
        .sum()
}

/// Number of inversions of `pi`, by merge sort.
pub fn inversions(pi: &[u32]) -> u64 {
    let mut buf: Vec<u32> = pi.to_vec();
    let mut scratch = vec![0u32; pi.len()];
    sort_count(&mut buf, &mut scratch)
}

fn sort_count(v: &mut [u32], scratch: &mut [u32]) -> u64 {
    let n = v.len();
    if n <= 1 {
        return 0;
    }
    if n <= 16 {
        // insertion sort counts each shift as one inversion
        let mut inv = 0u64;
        for i in 1..n {
            let x = v[i];
            let mut j = i;
            while j > 0 && v[j - 1] > x {
                v[j] = v[j - 1];
                j -= 1;
                inv += 1;
            }
            v[j] = x;
        }
        return inv;
    }
    let mid = n / 2;
    let (left, right) = v.split_at_mut(mid);
    let mut inv = sort_count(left, &mut scratch[..mid]) + sort_count(right, &mut scratch[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            scratch[k] = left[i];
            i += 1;
        } else {
            scratch[k] = right[j];
            inv += (left.len() - i) as u64;
            j += 1;
        }
        k += 1;
    }
    scratch[k..k + left.len() - i].copy_from_slice(&left[i..]);
    k += left.len() - i;
    scratch[k..k + right.len() - j].copy_from_slice(&right[j..]);
    v.copy_from_slice(&scratch[..n]);
    inv
}

/// Ordered distinct-quadruple sum for quadrant counts (n11, n10, n01, n00).
#[inline]
fn quadrant_term(n11: i64, n10: i64, n01: i64, n00: i64) -> i64 {
    let f = 2 * (n11 * n00 - n10 * n01);
    let g = n11 * n00 * n00 + n00 * n11 * n11 + n10 * n01 * n01 + n01 * n10 * n10;
    let h = 2 * (n11 * n00 + n10 * n01);
    f * f - 4 * g + 2 * h
}

/// Sum of the Hoeffding kernel over ordered distinct 5-tuples, scaled so
/// that D = result / (16 C(n,5)). O(n log n) with a Fenwick tree.
pub fn hoeffding_sum(pi: &[u32]) -> i128 {
    let n = pi.len();
    let mut tree = vec![0u32; n + 1];
    let mut total: i128 = 0;
    for (k, &y) in pi.iter().enumerate() {
        // points earlier in x order with smaller y
        let mut n11 = 0i64;
        let mut i = y as usize;
        while i > 0 {
            n11 += tree[i] as i64;
            i &= i - 1;
        }
        let mut i = y as usize + 1;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
        let n10 = k as i64 - n11;
        let n01 = y as i64 - n11;
        let n00 = n as i64 - 1 - n11 - n10 - n01;
        total += quadrant_term(n11, n10, n01, n00) as i128;
    }
    total
}

/// Dominance counts: `table[a * (n+1) + b] = #{k < a : pi[k] < b}`.
pub fn dominance_table(pi: &[u32], table: &mut Vec<u32>) {
    let n = pi.len();
    let w = n + 1;
    table.clear();
    table.resize(w * w, 0);
    for (a, &y) in pi.iter().enumerate() {
        let (prev, next) = table.split_at_mut((a + 1) * w);
        let prev = &prev[a * w..];
        let next = &mut next[..w];
        let y = y as usize;
        next[..=y].copy_from_slice(&prev[..=y]);
        for b in y + 1..w {
            next[b] = prev[b] + 1;
        }
    }
}

/// Sum of the BKR kernel over ordered distinct 6-tuples, scaled so that
/// R = result / (32 C(n,6)). O(n^2).
pub fn bkr_sum(pi: &[u32], table: &mut Vec<u32>) -> i128 {
    let n = pi.len();
    let w = n + 1;
    dominance_table(pi, table);
    let mut total: i128 = 0;
    for (a, &y5) in pi.iter().enumerate() {
        let row = &table[a * w..(a + 1) * w];
        let mut row_total: i64 = 0;
        for (x6, &y6) in pi.iter().enumerate() {
            if x6 == a {
                continue;
            }
            let n11 = row[y6 as usize] as i64;
            let n10 = a as i64 - n11 - (x6 < a) as i64;
            let n01 = y6 as i64 - n11 - (y5 < y6) as i64;
            let n00 = n as i64 - 2 - n11 - n10 - n01;
            row_total += quadrant_term(n11, n10, n01, n00);
        }
        total += row_total as i128;
    }
    total
}

/// Number of 4-subsets whose lower pair in x is also the lower (or upper)
/// pair in y. O(n^2).
pub fn taustar_concordant(pi: &[u32], table: &mut Vec<u32>) -> u128 {
    let n = pi.len();
    let w = n + 1;
    dominance_table(pi, table);
    let mut count: u128 = 0;
    for b in 1..n {
        let row = &table[(b + 1) * w..(b + 2) * w];
        let yb = pi[b] as usize;
        let right = n - b - 1;
        let mut acc: u64 = 0;
        for &ya in &pi[..b] {
            let ya = ya as usize;
            let (ymin, ymax) = if ya < yb { (ya, yb) } else { (yb, ya) };
            let ne = right + row[ymax + 1] as usize - ymax - 1;
            let se = ymin - row[ymin] as usize;
            acc += (ne * ne.saturating_sub(1) / 2 + se * se.saturating_sub(1) / 2) as u64;
        }
        count += acc as u128;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_counts() {
        assert_eq!(inversions(&[0, 1, 2, 3]), 0);
        assert_eq!(inversions(&[3, 2, 1, 0]), 6);
        let rev: Vec<u32> = (0..40).rev().collect();
        assert_eq!(inversions(&rev), 40 * 39 / 2);
        let brute = |p: &[u32]| {
            let mut c = 0;
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    c += (p[i] > p[j]) as u64;
                }
            }
            c
        };
        let p: Vec<u32> = (0..97u32).map(|i| (i * 37 + 11) % 97).collect();
        assert_eq!(inversions(&p), brute(&p));
    }

    #[test]
    fn dominance_counts() {
        let pi = [2u32, 0, 3, 1];
        let mut t = Vec::new();
        dominance_table(&pi, &mut t);
        let w = 5;
        for a in 0..=4 {
            for b in 0..=4 {
                let direct = pi[..a].iter().filter(|&&y| (y as usize) < b).count() as u32;
                assert_eq!(t[a * w + b], direct);
            }
        }
    }
}
