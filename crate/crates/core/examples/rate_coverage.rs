// Monte Carlo rate coverage for the 7/14/18/24 GHz plan and its crossovers.
//
//     cargo run --release --example rate_coverage

use fr3sim::coverage::{coverage_at, run_rate_coverage, DropScenario};
use fr3sim::params::ChannelParamTable;

fn main() {
    let table = ChannelParamTable::shipped_defaults();
    let scenario = DropScenario::rate_coverage_default(&table, 20_000, 7).expect("defaults resolve");
    for b in &scenario.bands {
        println!(
            "{:>6}: {} MHz, ple {} (approximate: {}), sigma {} dB",
            b.band.label, b.band.bandwidth_mhz, b.ple, b.approximate, b.shadow_sigma_db
        );
    }
    let result = run_rate_coverage(&scenario).expect("valid scenario");

    println!("\ncoverage at selected thresholds:");
    print!("{:>10}", "Mbps");
    for c in &result.curves {
        print!("{:>8}", c.band.label);
    }
    println!();
    for t in [50.0, 200.0, 500.0, 1000.0, 2000.0] {
        print!("{t:>10}");
        for c in &result.curves {
            print!("{:>8.3}", coverage_at(&result, &c.band.label, t).unwrap());
        }
        println!();
    }

    println!("\ncrossovers:");
    for c in &result.crossovers {
        println!("  {:>8.1} Mbps: {} -> {}", c.rate_mbps, c.band_below, c.band_above);
    }
}
