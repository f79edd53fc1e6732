//! Mann-Whitney and Vargha-Delaney against brute-force oracles.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vndn_core::stats::{
    asymptotic_p, compare, mann_whitney_u, summarize, vargha_delaney_a12, AppKind, NodeMetrics, NodeRole, RunMetrics,
};

// U of `a` by pair counting.
fn pair_u(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Two-sided exact p by enumerating every split of the pooled sample.
fn enumerated_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (n1, n) = (a.len(), pooled.len());
    let observed = pair_u(a, b);
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (i, v) in pooled.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    x.push(*v);
                } else {
                    y.push(*v);
                }
            }
            (x, y)
        };
        let u = pair_u(&x, &y);
        total += 1;
        if u <= observed + 1e-9 {
            le += 1;
        }
        if u >= observed - 1e-9 {
            ge += 1;
        }
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

fn sample(rng: &mut ChaCha8Rng, n: usize, levels: u32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0..levels) as f64).collect()
}

#[test]
fn spec_examples() {
    let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
    assert_eq!(r.u, 0.0);
    assert!((r.p_value - 0.1).abs() < 1e-12, "{}", r.p_value);
    assert!((enumerated_p(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]) - 0.1).abs() < 1e-12);

    let same = [3.0, 1.0, 4.0, 1.0, 5.0];
    assert!(mann_whitney_u(&same, &same).p_value > 0.99);
    assert_eq!(mann_whitney_u(&[2.0; 12], &[2.0; 12]).p_value, 1.0);

    let lo: Vec<f64> = (0..31).map(f64::from).collect();
    let hi: Vec<f64> = (100..131).map(f64::from).collect();
    let r = mann_whitney_u(&hi, &lo);
    assert!(!r.exact);
    assert!(r.p_value <= 0.05);
    assert_eq!(r.u, 961.0);

    assert_eq!(vargha_delaney_a12(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]), 1.0);
    assert_eq!(vargha_delaney_a12(&same, &same), 0.5);
}

#[test]
fn p_matches_enumeration_up_to_eight() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_returned: f64 = 0.0;
    for n1 in 1..=8 {
        for n2 in 1..=8 {
            for trial in 0..6 {
                // alternate heavy ties, light ties and continuous values
                let levels = [3, 10, 1000][trial % 3];
                let a = sample(&mut rng, n1, levels);
                let b = sample(&mut rng, n2, levels);
                let oracle = enumerated_p(&a, &b);
                let r = mann_whitney_u(&a, &b);
                assert_eq!(r.u, pair_u(&a, &b));
                worst_returned = worst_returned.max((r.p_value - oracle).abs());
                assert!((0.0..=1.0).contains(&asymptotic_p(&a, &b)));
            }
        }
    }
    assert!(worst_returned < 1e-9, "returned p off by {worst_returned}");
}

#[test]
fn a12_matches_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let n1 = rng.gen_range(1..40);
        let n2 = rng.gen_range(1..40);
        let levels = rng.gen_range(2..50);
        let a = sample(&mut rng, n1, levels);
        let b = sample(&mut rng, n2, levels);
        let want = pair_u(&a, &b) / (n1 * n2) as f64;
        assert!((vargha_delaney_a12(&a, &b) - want).abs() < 1e-12);
    }
}

#[test]
fn summary_totals_are_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let runs: Vec<RunMetrics> = (0..5)
        .map(|_| RunMetrics {
            nodes: (0..20)
                .map(|i| {
                    let sent = rng.gen_range(0..500);
                    NodeMetrics {
                        app_kind: [AppKind::None, AppKind::Distinct, AppKind::Shared][i % 3],
                        interests_sent: sent,
                        data_received: rng.gen_range(0..=sent),
                        ..NodeMetrics::new(i as u32, NodeRole::Vehicle)
                    }
                })
                .collect(),
        })
        .collect();
    let s = summarize("Up-2", &runs);
    let consumers = || runs.iter().flat_map(|r| r.nodes.iter()).filter(|n| n.app_kind != AppKind::None);
    assert_eq!(s.interests_total, consumers().map(|n| n.interests_sent).sum::<u64>());
    assert_eq!(s.data_total, consumers().map(|n| n.data_received).sum::<u64>());
    assert_eq!(s.distinct_interests + s.shared_interests, s.interests_total);
    assert_eq!(s.distinct_data + s.shared_data, s.data_total);
    assert!(s.satisfaction_min <= s.satisfaction_mean && s.satisfaction_mean <= s.satisfaction_max);
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u32..20).prop_map(f64::from), 1..35)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn a12_is_antisymmetric_and_bounded(a in values(), b in values()) {
        let x = vargha_delaney_a12(&a, &b);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((x + vargha_delaney_a12(&b, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn a12_ignores_increasing_transforms(a in values(), b in values()) {
        let f = |v: &[f64]| v.iter().map(|x| (x * 0.7).exp() + 3.0 * x).collect::<Vec<_>>();
        prop_assert!((vargha_delaney_a12(&a, &b) - vargha_delaney_a12(&f(&a), &f(&b))).abs() < 1e-12);
    }

    #[test]
    fn p_is_symmetric(a in values(), b in values()) {
        let (p, q) = (mann_whitney_u(&a, &b).p_value, mann_whitney_u(&b, &a).p_value);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p - q).abs() < 1e-12, "{} vs {}", p, q);
        let c = compare("A-1", &a, "B-1", &b, "data_received");
        prop_assert!((0.0..=1.0).contains(&c.p_value) && (0.0..=1.0).contains(&c.a12));
    }
}
