// Band selection and hopping policies under a blockage timeline.
//
//     cargo run --example band_hopping

use fr3sim::agility::{
    compare_policies, select_band, simulate_hopping, BlockageEvent, BlockageLoss, HopFixture, HopPolicy, LinkContext,
    Objective,
};
use fr3sim::coverage::BandChannel;
use fr3sim::link::LinkConfig;
use fr3sim::params::{CarrierBand, MaterialLossEntry};
use fr3sim::propagation::Obstruction;

fn main() {
    let bands: Vec<BandChannel> = CarrierBand::rate_coverage_plan()
        .into_iter()
        .map(|b| BandChannel::new(b, 1.85, 0.0).unwrap())
        .collect();
    let link = LinkConfig::default();

    let mut ctx = LinkContext::new(20.0);
    println!("open street at 20 m: {}", select_band(&bands, &ctx, &link, Objective::MaxRate).unwrap());
    ctx.impairments.materials = vec![
        MaterialLossEntry::new("concrete", 14.0, 45.0).unwrap(),
        MaterialLossEntry::new("concrete", 18.0, 50.0).unwrap(),
        MaterialLossEntry::new("concrete", 24.0, 60.0).unwrap(),
    ];
    ctx.impairments.obstructions = vec![Obstruction::new("concrete").above(10.0)];
    println!("behind concrete: {}", select_band(&bands, &ctx, &link, Objective::MaxRate).unwrap());
    match select_band(&bands, &ctx, &link, Objective::MinRateGuarantee(5000.0)) {
        Ok(b) => println!("5 Gbps guarantee: {b}"),
        Err(e) => println!("5 Gbps guarantee: {e}"),
    }

    let fixture = HopFixture {
        timeline: vec![
            BlockageEvent::new(0.10, 0.35, vec!["24GHz".into(), "18GHz".into()], BlockageLoss::Db(25.0)).unwrap(),
            BlockageEvent::new(0.50, 0.52, vec!["24GHz".into()], BlockageLoss::Db(20.0)).unwrap(),
            BlockageEvent::new(0.70, 0.90, vec!["24GHz".into(), "18GHz".into(), "14GHz".into()], BlockageLoss::Db(30.0))
                .unwrap(),
        ],
        horizon_s: 1.0,
        step_s: 0.005,
        bands,
        context: LinkContext::new(150.0),
        link,
        speed_mps: 3.0,
    };
    let policies = [
        HopPolicy::Static("7GHz".into()),
        HopPolicy::Static("24GHz".into()),
        HopPolicy::GreedyRate,
        HopPolicy::hysteresis_default(),
    ];
    println!("\n{:<14} {:<22} {:>10} {:>5}", "gains", "policy", "Mbps", "hops");
    for r in compare_policies(&fixture, &policies).unwrap() {
        println!("{:<14} {:<22} {:>10.1} {:>5}", r.gain_model.to_string(), r.policy, r.mean_rate_mbps, r.hops);
    }

    let trace = simulate_hopping(&fixture, &HopPolicy::GreedyRate).unwrap();
    println!("\ngreedy hops:");
    for s in trace.samples.iter().filter(|s| s.flags.hop) {
        println!("  t = {:.3} s -> {} ({})", s.t_s, s.band, s.flags);
    }
}
