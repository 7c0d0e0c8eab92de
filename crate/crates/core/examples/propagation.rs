// Close-in path loss plus rain, foliage and penetration across the band.
//
//     cargo run --example propagation

use fr3sim::params::MaterialLossEntry;
use fr3sim::propagation::{
    cif_path_loss, ci_path_loss, foliage_loss, fspl, penetration_loss, rain_attenuation, RainPolarization, RainSpec,
};

fn main() {
    println!("free space at 1 m: {:.2} dB (6.75 GHz), {:.2} dB (28 GHz)", fspl(6.75, 1.0).unwrap(), fspl(28.0, 1.0).unwrap());
    println!("doubling frequency adds {:.4} dB", fspl(14.0, 50.0).unwrap() - fspl(7.0, 50.0).unwrap());

    println!("\nUMi LoS, ple 1.85 at 16.95 GHz:");
    for d in [1.0, 10.0, 100.0, 500.0] {
        println!("  {d:>5} m  {:.2} dB", ci_path_loss(16.95, d, 1.85, 0.0).unwrap());
    }
    println!(
        "indoor CIF at 12 GHz, n = 1.3, b = 0.05 around 10 GHz, 30 m: {:.2} dB",
        cif_path_loss(12.0, 30.0, 1.3, 0.05, 10.0, 0.0).unwrap()
    );

    let rain = RainSpec::new(8.0, RainPolarization::Horizontal).unwrap();
    let rain_v = RainSpec::new(8.0, RainPolarization::Vertical).unwrap();
    println!("\nrain at 8 mm/hr (dB/km, H / V):");
    for f in [7.0, 10.0, 14.0, 18.0, 24.0] {
        println!(
            "  {f:>4} GHz  {:.4} / {:.4}",
            rain_attenuation(&rain, f, 1.0).unwrap(),
            rain_attenuation(&rain_v, f, 1.0).unwrap()
        );
    }

    let (f7, f24) = (foliage_loss(7.0, 100.0).unwrap(), foliage_loss(24.0, 100.0).unwrap());
    println!("\n100 m of foliage: {f7:.2} dB at 7 GHz, {f24:.2} dB at 24 GHz ({:.2} dB apart)", f24 - f7);

    let table = vec![
        MaterialLossEntry::new("concrete", 7.0, 25.0).unwrap(),
        MaterialLossEntry::new("concrete", 24.0, 60.0).unwrap(),
    ];
    for f in [7.0, 24.0] {
        println!("concrete at {f} GHz: {} dB", penetration_loss(&table, "concrete", f).unwrap());
    }
    if let Err(e) = penetration_loss(&table, "concrete", 14.0) {
        println!("concrete at 14 GHz: {e}");
    }
}
