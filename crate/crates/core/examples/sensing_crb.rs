// Delay CRB for one wide band, a split two-band plan, and a bandwidth sweep.
//
//     cargo run --example sensing_crb

use fr3sim::sensing::{plan_bounds, rms_bandwidth, sweep_scaling, Combining, SensingPlan, SubBand};

fn main() {
    let single = SensingPlan::single(400e6, 17.0).unwrap();
    let (crb, sigma) = plan_bounds(&single).unwrap();
    println!("400 MHz at 17 dB: beta {:.1} MHz, CRB {crb:.3e} s², range std {:.2} cm", rms_bandwidth(&single).unwrap() / 1e6, sigma * 100.0);

    let split = vec![SubBand::new(-500e6, 200e6), SubBand::new(500e6, 200e6)];
    for combining in [Combining::Coherent, Combining::Noncoherent] {
        let plan = SensingPlan::new(split.clone(), 17.0, combining).unwrap();
        let (_, sigma) = plan_bounds(&plan).unwrap();
        println!("two 200 MHz bands 1 GHz apart, {combining:?}: {:.2} cm", sigma * 100.0);
    }

    println!("\nscaling 400 MHz at 7 GHz:");
    println!("{:>7} {:>8} {:>7} {:>12} {:>10}", "factor", "GHz", "SNR", "CRB s²", "range m");
    for r in sweep_scaling(400e6, 7.0, &[1.0, 2.0, 3.0], &[0.0, 17.0]).unwrap() {
        println!("{:>7} {:>8} {:>7} {:>12.3e} {:>10.4}", r.factor, r.carrier_ghz, r.snr_db, r.crb_s2, r.range_std_m);
    }
}
