use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Integer partition with parts in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    /// Sorts the parts; zero parts are dropped.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        IntegerPartition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// (part value, multiplicity) pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

/// All partitions of `r`, in reverse lexicographic order.
pub fn partitions(r: usize) -> Vec<IntegerPartition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<IntegerPartition>) {
        if rest == 0 {
            out.push(IntegerPartition { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, r, &mut Vec::new(), &mut out);
    out
}

/// Ordered distinct-index power sum
/// `sum over pairwise distinct (i_1..i_l) of prod_b x_{i_b}^{lambda_b}`.
///
/// Dynamic program over the indices; the state is the number of parts of
/// each distinct size still unassigned. Assignments are unordered within
/// equal parts, so the result is scaled by `prod m_j!`.
pub fn distinct_power_sum(lambda: &IntegerPartition, x: &[BigInt]) -> BigInt {
    let mult = lambda.multiplicities();
    if lambda.len() > x.len() {
        return BigInt::zero();
    }
    // mixed-radix state encoding of assigned counts
    let radix: Vec<usize> = mult.iter().map(|&(_, m)| m + 1).collect();
    let size: usize = radix.iter().product();
    let mut stride = vec![1usize; radix.len()];
    for j in 1..radix.len() {
        stride[j] = stride[j - 1] * radix[j - 1];
    }
    let max_part = mult.first().map_or(0, |&(v, _)| v);
    let mut dp = vec![BigInt::zero(); size];
    dp[0] = BigInt::one();
    let mut powers = vec![BigInt::one(); max_part + 1];
    for xi in x {
        for k in 1..=max_part {
            powers[k] = &powers[k - 1] * xi;
        }
        // descending state order so each index is used at most once
        for s in (0..size).rev() {
            let mut acc = BigInt::zero();
            for (j, &(part, m)) in mult.iter().enumerate() {
                let c = (s / stride[j]) % radix[j];
                if c > 0 && c <= m {
                    let prev = &dp[s - stride[j]];
                    if !prev.is_zero() {
                        acc += prev * &powers[part];
                    }
                }
            }
            if !acc.is_zero() {
                dp[s] += acc;
            }
        }
    }
    let mut out = dp[size - 1].clone();
    for &(_, m) in &mult {
        out *= crate::exact::factorial(m as u64);
    }
    out
}

/// Same quantity by Moebius inversion over set partitions of the parts,
/// from plain power sums. Cost grows with Bell(l); kept as an oracle.
pub fn distinct_power_sum_mobius(lambda: &IntegerPartition, x: &[BigInt]) -> BigInt {
    let parts = lambda.parts();
    let l = parts.len();
    let mut cache: Vec<Option<BigInt>> = vec![None; lambda.total() + 1];
    let mut power_sum = |k: usize| -> BigInt {
        if cache[k].is_none() {
            cache[k] = Some(x.iter().map(|v| num_traits::pow(v.clone(), k)).sum());
        }
        cache[k].clone().unwrap()
    };
    let mut total = BigInt::zero();
    // restricted growth strings enumerate set partitions of 0..l
    let mut rgs = vec![0usize; l];
    loop {
        let blocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; blocks];
        let mut weights = vec![0usize; blocks];
        for (i, &b) in rgs.iter().enumerate() {
            sizes[b] += 1;
            weights[b] += parts[i];
        }
        let mut term = BigInt::one();
        for b in 0..blocks {
            // mu(0, pi) = prod (-1)^{|B|-1} (|B|-1)!
            term *= crate::exact::factorial(sizes[b] as u64 - 1);
            if sizes[b] % 2 == 0 {
                term = -term;
            }
            term *= power_sum(weights[b]);
        }
        total += term;
        // next restricted growth string
        let mut i = l;
        loop {
            if i <= 1 {
                return total;
            }
            i -= 1;
            let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for v in rgs.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(lambda: &IntegerPartition, x: &[BigInt]) -> BigInt {
        fn rec(parts: &[usize], x: &[BigInt], used: &mut Vec<bool>) -> BigInt {
            if parts.is_empty() {
                return BigInt::one();
            }
            let mut s = BigInt::zero();
            for i in 0..x.len() {
                if !used[i] {
                    used[i] = true;
                    s += num_traits::pow(x[i].clone(), parts[0]) * rec(&parts[1..], x, used);
                    used[i] = false;
                }
            }
            s
        }
        rec(lambda.parts(), x, &mut vec![false; x.len()])
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=12).map(|r| partitions(r).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
        for lam in partitions(7) {
            assert_eq!(lam.total(), 7);
            assert!(lam.parts().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn multiplicities_of_partition() {
        let lam = IntegerPartition::new(vec![1, 3, 1, 2, 1]);
        assert_eq!(lam.parts(), &[3, 2, 1, 1, 1]);
        assert_eq!(lam.multiplicities(), vec![(3, 1), (2, 1), (1, 3)]);
    }

    #[test]
    fn dp_and_mobius_match_direct_sum() {
        let x: Vec<BigInt> = [-3i64, 5, 2, -1, 4, 0, 7]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        for r in 1..=6 {
            for lam in partitions(r) {
                let want = brute(&lam, &x);
                assert_eq!(distinct_power_sum(&lam, &x), want, "{:?}", lam);
                assert_eq!(distinct_power_sum_mobius(&lam, &x), want, "{:?}", lam);
            }
        }
    }

    #[test]
    fn too_many_parts_gives_zero() {
        let x = vec![BigInt::from(2), BigInt::from(3)];
        let lam = IntegerPartition::new(vec![1, 1, 1]);
        assert!(distinct_power_sum(&lam, &x).is_zero());
        assert!(distinct_power_sum_mobius(&lam, &x).is_zero());
    }
}
