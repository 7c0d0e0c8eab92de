mod common;

use fr3sim::params::fit_ple;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn synthetic(freq: f64, n: f64, sigma: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    (0..count)
        .map(|_| {
            let d = rng.random_range(5.0..600.0);
            (d, common::ci_reference(freq, d, n) + noise.sample(&mut rng))
        })
        .collect()
}

#[test]
fn recovers_exponent_within_two_hundredths() {
    for (i, (f, n)) in [(6.75, 1.79), (16.95, 1.85), (6.75, 2.56), (16.95, 2.59), (28.0, 3.4)].into_iter().enumerate() {
        let fit = fit_ple(&synthetic(f, n, 4.0, 10_000, 100 + i as u64), f).unwrap();
        assert!((fit.ple - n).abs() < 0.02, "{f} GHz: {} vs {n}", fit.ple);
        assert!((fit.shadow_sigma - 4.0).abs() < 0.15, "{}", fit.shadow_sigma);
    }
}

#[test]
fn noiseless_samples_are_exact() {
    let fit = fit_ple(&synthetic(16.95, 2.0, 1e-300, 50, 1), 16.95).unwrap();
    assert!((fit.ple - 2.0).abs() < 1e-9);
    assert!(fit.shadow_sigma < 1e-9);
}
