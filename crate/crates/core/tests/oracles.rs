//! Exhaustive checks of the kIC combinatorics against independent routes.

use std::collections::HashSet;

use crowdrate::kic::{enumerate_valid_responses, spammer_error_prob, spammer_error_prob_bruteforce, Pattern};

/// Distinct partitions reached by labeling `k` items with `n` labels in
/// every possible way.
fn partitions_by_labeling(k: usize, n: usize) -> usize {
    let mut seen = HashSet::new();
    let mut labels = vec![0usize; k];
    loop {
        seen.insert(Pattern::from_labels(&labels));
        let mut i = 0;
        loop {
            if i == k {
                return seen.len();
            }
            labels[i] += 1;
            if labels[i] < n {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

fn stirling_sum(k: usize, n: usize) -> u64 {
    // S(i, j) by the triangle recurrence, computed locally.
    let mut s = vec![vec![0u64; n + 1]; k + 1];
    s[0][0] = 1;
    for i in 1..=k {
        for j in 1..=n {
            s[i][j] = j as u64 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s[k][1..].iter().sum()
}

#[test]
fn binary_response_count_is_power_of_two() {
    for k in 2..=16 {
        assert_eq!(enumerate_valid_responses(k, 2).unwrap().len(), 1 << (k - 1));
    }
}

#[test]
fn response_count_matches_labeling_enumeration() {
    for n in 2..=5 {
        for k in 1..=8 {
            let enumerated = enumerate_valid_responses(k, n).unwrap().len();
            assert_eq!(enumerated, partitions_by_labeling(k, n), "k={k} n={n}");
            assert_eq!(enumerated as u64, stirling_sum(k, n), "k={k} n={n}");
        }
    }
}

/// Per-item mismatch averaged over every pair of labelings of `k` items,
/// scoring each pair under the best global label swap. Works on raw labels
/// instead of partitions.
fn spammer_error_by_labelings(k: usize) -> f64 {
    let total: u64 = (0u32..1 << k)
        .flat_map(|truth| (0u32..1 << k).map(move |guess| (truth, guess)))
        .map(|(t, g)| {
            let w = (t ^ g).count_ones();
            u64::from(w.min(k as u32 - w))
        })
        .sum();
    total as f64 / (k as f64 * 4f64.powi(k as i32))
}

#[test]
fn spammer_error_three_routes_agree() {
    for k in 2..=10 {
        let closed = spammer_error_prob(k).unwrap();
        let brute = spammer_error_prob_bruteforce(k).unwrap();
        let labels = spammer_error_by_labelings(k);
        assert!((closed - brute).abs() < 1e-12, "k={k}");
        assert!((closed - labels).abs() < 1e-12, "k={k}");
    }
}

#[test]
fn uniform_labels_induce_uniform_patterns() {
    // Every binary pattern is hit by exactly two labelings.
    for k in 2..=10 {
        let mut counts = std::collections::HashMap::new();
        for bits in 0u32..1 << k {
            let labels: Vec<u32> = (0..k).map(|i| (bits >> i) & 1).collect();
            *counts.entry(Pattern::from_labels(&labels)).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 1 << (k - 1));
        assert!(counts.values().all(|&c| c == 2));
    }
}
