// SNR and Shannon rate per carrier, then the closed-form calculators.
//
//     cargo run --example link_budget

use fr3sim::link::{
    coherence_time, coverage_gain, noise_power, peak_rate, pn_snr_loss, shannon_rate, snr, typical_gains, GainModel,
    LinkConfig, PeakRateSpec,
};
use fr3sim::propagation::ci_path_loss;

fn main() {
    let isotropic = LinkConfig::default();
    let aperture = isotropic.with_gain_model(GainModel::EqualAperture {
        tx_ref_dbi: 10.0,
        rx_ref_dbi: 6.0,
        ref_ghz: 7.0,
    });
    println!("{:>6} {:>8} {:>10} {:>12} {:>12}", "GHz", "MHz", "PL dB", "iso Mbps", "aperture Mbps");
    for (f, bw) in [(7.0, 100.0), (14.0, 200.0), (18.0, 300.0), (24.0, 400.0)] {
        let pl = ci_path_loss(f, 200.0, 2.0, 0.0).unwrap();
        let r_iso = shannon_rate(bw, snr(&isotropic, f, bw, pl));
        let r_ap = shannon_rate(bw, snr(&aperture, f, bw, pl));
        println!("{f:>6} {bw:>8} {pl:>10.2} {r_iso:>12.1} {r_ap:>12.1}");
    }
    println!("noise in 400 MHz with 7 dB NF: {:.2} dBm", noise_power(400.0, 7.0).unwrap());

    for f in [7.0, 14.0, 28.0] {
        let g = typical_gains(f);
        println!("typical gains at {f} GHz: BS {:.1} dBi, UE {:.1} dBi (approximate: {})", g.tx_dbi, g.rx_dbi, g.approximate);
    }

    for (streams, bw) in [(12, 1.2), (16, 1.2), (12, 1.6), (16, 1.6)] {
        let spec = PeakRateSpec::new(10.0, streams, bw).unwrap();
        println!("1024-QAM, {streams} streams, {bw} GHz: {} Gbps", peak_rate(&spec));
    }

    println!("phase-noise penalty across the band: {:.2} dB", pn_snr_loss(7.125, 24.25).unwrap());
    println!(
        "0.22 lower exponent: {} dB at 100 m, {} dB at 1 km",
        coverage_gain(0.22, 100.0, 1.0).unwrap(),
        coverage_gain(0.22, 1000.0, 1.0).unwrap()
    );
    for f in [7.0, 24.0] {
        let t = coherence_time(f, 30.0).unwrap().seconds().unwrap();
        println!("coherence time at {f} GHz, 30 m/s: {:.3} ms", t * 1e3);
    }
}
