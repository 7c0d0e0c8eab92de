// Shipped channel parameters, a user override, and nearest-frequency lookup.
//
//     cargo run --example param_table

use fr3sim::params::{parse_param_table, ChannelParamTable, Environment, LookupMode, Visibility};

fn main() {
    let mut table = ChannelParamTable::shipped_defaults();
    println!("{} cells ({})", table.len(), table.source);
    for e in table.entries() {
        let ple = e.ple.map_or("-".to_string(), |n| n.to_string());
        let ds = e.rms_ds.map_or("-".to_string(), |d| format!("{d} ns"));
        println!("  {:<18} ple {:<5} ds {}", e.name(), ple, ds);
    }

    let user = parse_param_table("[channel.params]\nple.UMi.LoS.24 = 1.95\nsigma.UMi.LoS.24 = 3.2\n", "site survey")
        .expect("valid table");
    for e in user.entries() {
        table.insert(e.clone()).expect("valid cell");
    }
    let cell = table.lookup(Environment::UMi, Visibility::LoS, 24.0).expect("just inserted");
    println!("user cell {}: ple {:?}, sigma {:?}", cell.name(), cell.ple, cell.shadow_sigma);

    match table.lookup(Environment::InH, Visibility::NLoS, 16.95) {
        Ok(_) => unreachable!("no InH NLoS cells are shipped"),
        Err(e) => println!("exact lookup: {e}"),
    }

    let r = table
        .resolve(Environment::UMi, Visibility::NLoS, 14.0, LookupMode::Nearest { span_ghz: None })
        .expect("UMi NLoS cells exist");
    println!(
        "nearest for UMi NLoS 14 GHz: {} GHz cell, ple {}, approximate = {}",
        r.entry.freq_ghz,
        r.entry.ple.unwrap(),
        r.approximate
    );
}
