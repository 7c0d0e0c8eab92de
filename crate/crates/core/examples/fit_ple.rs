// Recovers a path-loss exponent and shadow sigma from synthetic measurements.
//
//     cargo run --example fit_ple

use fr3sim::params::fit_ple;
use fr3sim::propagation::{ci_path_loss, sample_shadowing, ShadowStream};

fn main() {
    let (f, n, sigma) = (16.95, 1.85, 4.0);
    let mut stream = ShadowStream::new(42);
    let samples: Vec<(f64, f64)> = (0..5_000)
        .map(|i| {
            let d = 10.0 + 490.0 * (i as f64 + 0.5) / 5_000.0;
            let shadow = sample_shadowing(sigma, &mut stream).unwrap();
            (d, ci_path_loss(f, d, n, shadow).unwrap())
        })
        .collect();
    let fit = fit_ple(&samples, f).unwrap();
    println!("true n = {n}, sigma = {sigma} dB");
    println!("fit  n = {:.4}, sigma = {:.3} dB", fit.ple, fit.shadow_sigma);

    match fit_ple(&[(50.0, 90.0), (50.0, 92.0)], f) {
        Ok(_) => unreachable!(),
        Err(e) => println!("single distance: {e}"),
    }
}
