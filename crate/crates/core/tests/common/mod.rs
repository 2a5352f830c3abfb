//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

/// Distribution of the number of successes by enumerating all `2^k` vote
/// outcomes. Each outcome's probability is built from the outcome with its
/// lowest set bit cleared, so the cost is one multiply per subset.
pub fn brute_force_pmf(p: &[f64]) -> Vec<f64> {
    let k = p.len();
    let mut weight = vec![0.0; 1 << k];
    weight[0] = p.iter().map(|x| 1.0 - x).product();
    let mut mass = vec![0.0; k + 1];
    mass[0] = weight[0];
    for mask in 1usize..(1 << k) {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        // Voter i flips from wrong to right. Recompute the product directly
        // when the ratio is undefined.
        weight[mask] = if p[i] < 1.0 {
            weight[rest] * p[i] / (1.0 - p[i])
        } else {
            (0..k)
                .map(|v| {
                    if mask & (1 << v) != 0 {
                        p[v]
                    } else {
                        1.0 - p[v]
                    }
                })
                .product()
        };
        mass[mask.count_ones() as usize] += weight[mask];
    }
    mass
}

/// Strict-majority accuracy of the first `k` entries, by enumeration.
pub fn brute_force_majority(p: &[f64]) -> f64 {
    let k = p.len();
    brute_force_pmf(p)
        .iter()
        .enumerate()
        .filter(|(j, _)| 2 * j > k)
        .map(|(_, m)| m)
        .sum()
}
