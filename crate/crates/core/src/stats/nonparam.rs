//! Non-parametric two-sample tests.

use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample: pairs where it is larger, plus half
    /// the ties.
    pub u: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Whether `p_value` comes from the exact permutation distribution.
    pub exact: bool,
}

/// Largest per-sample size for which the exact distribution is used.
pub const EXACT_MAX_N: usize = 8;

/// Mann-Whitney U test, two-sided.
///
/// Small samples (both at most [`EXACT_MAX_N`]) use the exact conditional
/// permutation distribution, which handles ties. Larger samples use the
/// normal approximation with tie and continuity corrections. When every
/// value is identical the p-value is 1.
///
/// # Panics
/// If either sample is empty or contains NaN.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> MannWhitney {
    let (u, _) = u_and_ranks(a, b);
    if a.len() <= EXACT_MAX_N && b.len() <= EXACT_MAX_N {
        MannWhitney {
            u,
            p_value: exact_p(a, b),
            exact: true,
        }
    } else {
        MannWhitney {
            u,
            p_value: asymptotic_p(a, b),
            exact: false,
        }
    }
}

/// Normal-approximation p-value with tie and continuity corrections.
pub fn asymptotic_p(a: &[f64], b: &[f64]) -> f64 {
    let (u, ranks) = u_and_ranks(a, b);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let ties = tie_term(&ranks);
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if !(var > 0.0) {
        return 1.0;
    }
    let mu = n1 * n2 / 2.0;
    let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * normal.sf(z)).min(1.0)
}

/// Exact two-sided p-value from the permutation distribution of the rank sum,
/// conditional on the observed ties.
pub fn exact_p(a: &[f64], b: &[f64]) -> f64 {
    let (_, ranks) = u_and_ranks(a, b);
    // doubled mid-ranks are integers
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let n1 = a.len();
    let observed: usize = doubled[..n1].iter().sum();
    let max_sum: usize = doubled.iter().sum();
    // ways[k][s]: subsets of size k with doubled rank sum s
    let mut ways = vec![vec![0f64; max_sum + 1]; n1 + 1];
    ways[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=n1).rev() {
            for s in (r..=max_sum).rev() {
                let add = ways[k - 1][s - r];
                if add != 0.0 {
                    ways[k][s] += add;
                }
            }
        }
    }
    let total: f64 = ways[n1].iter().sum();
    let le: f64 = ways[n1][..=observed].iter().sum();
    let ge: f64 = ways[n1][observed..].iter().sum();
    (2.0 * le.min(ge) / total).min(1.0)
}

/// Vargha-Delaney A: probability that a draw from `a` exceeds one from `b`,
/// counting ties as one half.
pub fn vargha_delaney_a12(a: &[f64], b: &[f64]) -> f64 {
    let (u, _) = u_and_ranks(a, b);
    u / (a.len() as f64 * b.len() as f64)
}

// U of `a` and the mid-ranks of the pooled sample (a first, then b).
fn u_and_ranks(a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    assert!(pooled.iter().all(|x| !x.is_nan()), "samples must not contain NaN");
    let ranks = midranks(&pooled);
    let n1 = a.len() as f64;
    let r1: f64 = ranks[..a.len()].iter().sum();
    (r1 - n1 * (n1 + 1.0) / 2.0, ranks)
}

fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    ranks
}

// Sum of t^3 - t over tie groups.
fn tie_term(ranks: &[f64]) -> f64 {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        total += t * t * t - t;
        i = j + 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_triples() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        assert_eq!(r.u, 0.0);
        assert!((r.p_value - 0.1).abs() < 1e-12, "{}", r.p_value);
        assert!(r.exact);
    }

    #[test]
    fn identical_values_give_one() {
        let r = mann_whitney_u(&[2.0; 31], &[2.0; 31]);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.u, 31.0 * 31.0 / 2.0);
        assert_eq!(mann_whitney_u(&[5.0; 3], &[5.0; 4]).p_value, 1.0);
    }

    #[test]
    fn disjoint_31s_significant() {
        let a: Vec<f64> = (0..31).map(|i| 100.0 + i as f64).collect();
        let b: Vec<f64> = (0..31).map(|i| i as f64).collect();
        let r = mann_whitney_u(&a, &b);
        assert!(!r.exact);
        assert!(r.p_value <= 0.05);
        assert_eq!(r.u, 961.0);
        assert_eq!(vargha_delaney_a12(&a, &b), 1.0);
    }

    #[test]
    fn a12_by_hand() {
        assert_eq!(vargha_delaney_a12(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(vargha_delaney_a12(&[1.0, 2.0], &[1.0, 2.0]), 0.5);
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn asymptotic_matches_reference_value() {
        // U = 3 for n1 = n2 = 5 without ties: sigma^2 = 25*11/12,
        // z = (12.5 - 3 - 0.5) / sqrt(22.9167) = 1.88, two-sided p = 0.0601
        let p = asymptotic_p(&[1.0, 2.0, 3.0, 5.0, 7.0], &[4.0, 6.0, 8.0, 9.0, 10.0]);
        assert!((p - 0.0601).abs() < 5e-4, "{p}");
    }
}
