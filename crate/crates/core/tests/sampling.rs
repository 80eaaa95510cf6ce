//! Statistical checks on permutation sampling.

use std::collections::HashMap;

use seglab_core::optimizers::sample_permutation;
use seglab_core::SeedRng;

#[test]
fn single_element_is_identity() {
    assert_eq!(sample_permutation(&mut SeedRng::new(1), 1), vec![0]);
}

#[test]
fn two_elements_balanced() {
    let mut rng = SeedRng::new(10);
    let draws = 100_000;
    let identity = (0..draws)
        .filter(|_| sample_permutation(&mut rng, 2) == vec![0, 1])
        .count();
    let freq = identity as f64 / draws as f64;
    assert!((freq - 0.5).abs() <= 0.01, "{freq}");
}

#[test]
fn four_elements_chi_square() {
    let mut rng = SeedRng::new(11);
    let draws = 100_000;
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(sample_permutation(&mut rng, 4)).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let expected = draws as f64 / 24.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // upper 1e-3 quantile of chi-square with 23 degrees of freedom
    assert!(chi2 < 49.728, "chi2 = {chi2}");
}
