// Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use fr3sim::sensing::{Combining, SensingPlan, SpectralShape};

pub const C: f64 = 299_792_458.0;

/// Composite Simpson rule over `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Zeroth, first and second spectral moments of one sub-band, split at the
/// center so the triangular kink falls on a node.
fn band_moments(center: f64, width: f64, shape: SpectralShape) -> [f64; 3] {
    let density = |f: f64| {
        let x = ((f - center) / width).abs();
        match shape {
            SpectralShape::Rectangular => 1.0,
            SpectralShape::Triangular => 1.0 - 2.0 * x,
        }
    };
    let mut m = [0.0; 3];
    for (k, slot) in m.iter_mut().enumerate() {
        let g = |f: f64| density(f) * f.powi(k as i32);
        *slot = simpson(g, center - width / 2.0, center, 400) + simpson(g, center, center + width / 2.0, 400);
    }
    m
}

/// Delay CRB from the Fisher information of `r(f) = a·e^{jφ}·S(f)·e^{−j2πfτ} + w(f)`
/// with unknown phase(s) treated as nuisance parameters. Noise density is set
/// so that total signal energy over noise density equals the plan SNR.
pub fn quadrature_delay_crb(plan: &SensingPlan) -> f64 {
    let moments: Vec<[f64; 3]> = plan
        .subbands
        .iter()
        .map(|b| band_moments(b.offset_hz, b.bandwidth_hz, plan.shape))
        .collect();
    let energy: f64 = moments.iter().map(|m| m[0]).sum();
    let snr = 10f64.powf(plan.snr_db / 10.0);
    let n0 = energy / snr;
    let two_pi = 2.0 * std::f64::consts::PI;
    // J_ττ = (2/N0)(2π)² m2, J_τφ = −(2/N0)(2π) m1, J_φφ = (2/N0) m0
    let schur = |m: [f64; 3]| (2.0 / n0) * two_pi * two_pi * (m[2] - m[1] * m[1] / m[0]);
    let info = match plan.combining {
        Combining::Coherent => {
            let total = moments.iter().fold([0.0; 3], |acc, m| [acc[0] + m[0], acc[1] + m[1], acc[2] + m[2]]);
            schur(total)
        }
        Combining::Noncoherent => moments.iter().map(|m| schur(*m)).sum(),
    };
    1.0 / info
}

/// Friis at 1 m plus `10·n·log10(d)`, written out from the definitions.
pub fn ci_reference(freq_ghz: f64, d_m: f64, n: f64) -> f64 {
    let lambda = C / (freq_ghz * 1e9);
    20.0 * (4.0 * std::f64::consts::PI / lambda).log10() + 10.0 * n * d_m.log10()
}

/// Shannon rate in Mbps with isotropic antennas and a −174 dBm/Hz floor.
pub fn rate_reference(tx_dbm: f64, nf_db: f64, bw_mhz: f64, loss_db: f64) -> f64 {
    let noise_dbm = -174.0 + 10.0 * (bw_mhz * 1e6).log10() + nf_db;
    let snr = 10f64.powf((tx_dbm - loss_db - noise_dbm) / 10.0);
    bw_mhz * (1.0 + snr).log2()
}
