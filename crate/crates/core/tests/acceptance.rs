// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
//     cargo test -p fr3sim --test acceptance

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fr3sim::agility::{simulate_hopping, BlockageEvent, BlockageLoss, HopFixture, HopPolicy, LinkContext};
use fr3sim::coverage::{run_rate_coverage, BandChannel, DropScenario};
use fr3sim::link::{antenna_gain_fixed_aperture, coverage_gain, peak_rate, pn_snr_loss, LinkConfig, PeakRateSpec};
use fr3sim::params::{fit_ple, CarrierBand, ChannelParamTable, Environment, Visibility};
use fr3sim::propagation::{foliage_loss, fspl, rain_attenuation, RainPolarization, RainSpec};
use fr3sim::sensing::{plan_bounds, Combining, SensingPlan, SpectralShape, SubBand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rain_endpoints() -> Check {
    let start = Instant::now();
    let spec = RainSpec::new(8.0, RainPolarization::Horizontal).map_err(|e| e.to_string())?;
    let g7 = rain_attenuation(&spec, 7.0, 1.0).map_err(|e| e.to_string())?;
    let g24 = rain_attenuation(&spec, 24.0, 1.0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((g7 - 0.04).abs() <= 0.01, format!("7 GHz: {g7:.4} dB/km"))?;
    ensure((g24 - 1.16).abs() <= 0.06, format!("24 GHz: {g24:.4} dB/km"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("{g7:.4} and {g24:.4} dB/km in {elapsed:?}"))
}

fn foliage() -> Check {
    let a = foliage_loss(7.0, 100.0).map_err(|e| e.to_string())?;
    let b = foliage_loss(24.0, 100.0).map_err(|e| e.to_string())?;
    ensure((a - 34.66).abs() <= 0.05, format!("7 GHz: {a:.3}"))?;
    ensure((b - 49.18).abs() <= 0.05, format!("24 GHz: {b:.3}"))?;
    ensure((b - a - 14.52).abs() <= 0.05, format!("difference {:.3}", b - a))?;
    Ok(format!("{a:.2} / {b:.2} dB, difference {:.2} dB", b - a))
}

fn peak_rates() -> Check {
    let mut got = Vec::new();
    for ((streams, bw), want) in [(12, 1.2), (16, 1.2), (12, 1.6), (16, 1.6)].into_iter().zip([144.0, 192.0, 192.0, 256.0]) {
        let r = peak_rate(&PeakRateSpec::new(10.0, streams, bw).map_err(|e| e.to_string())?);
        ensure(r == want, format!("{streams} streams, {bw} GHz: {r} != {want}"))?;
        got.push(r.to_string());
    }
    Ok(format!("{} Gbps", got.join(", ")))
}

fn coverage_gains() -> Check {
    let a = coverage_gain(0.22, 100.0, 1.0).map_err(|e| e.to_string())?;
    let b = coverage_gain(0.22, 1000.0, 1.0).map_err(|e| e.to_string())?;
    ensure(a == 4.4 && b == 6.6, format!("{a:?}, {b:?}"))?;
    Ok(format!("{a} dB, {b} dB"))
}

fn phase_noise() -> Check {
    let l = pn_snr_loss(7.125, 24.25).map_err(|e| e.to_string())?;
    ensure((l - 10.64).abs() <= 0.10, format!("{l:.4} dB"))?;
    ensure((l - 10.7).abs() <= 0.10, format!("{l:.4} dB vs the rounded 10.7 dB"))?;
    Ok(format!("{l:.3} dB"))
}

fn sensing_target() -> Check {
    let plan = SensingPlan::single(400e6, 17.0).map_err(|e| e.to_string())?;
    let (_, sigma) = plan_bounds(&plan).map_err(|e| e.to_string())?;
    ensure(sigma < 0.10, format!("range std {sigma} m"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let n = rng.random_range(1..=3);
        let mut edge = rng.random_range(-1e9..0.0);
        let mut bands = Vec::new();
        for _ in 0..n {
            let w = rng.random_range(50e6..600e6);
            let gap = rng.random_range(0.0..1e9);
            bands.push(SubBand::new(edge + gap + w / 2.0, w));
            edge += gap + w;
        }
        let combining = if rng.random_bool(0.5) { Combining::Coherent } else { Combining::Noncoherent };
        let shape = if rng.random_bool(0.5) { SpectralShape::Rectangular } else { SpectralShape::Triangular };
        let plan = SensingPlan::with_shape(bands, rng.random_range(0.0..25.0), combining, shape).map_err(|e| e.to_string())?;
        let (crb, _) = plan_bounds(&plan).map_err(|e| e.to_string())?;
        let oracle = common::quadrature_delay_crb(&plan);
        worst = worst.max((crb / oracle - 1.0).abs());
    }
    ensure(worst < 1e-3, format!("oracle mismatch {worst:.2e}"))?;
    Ok(format!("{:.2} cm; worst oracle mismatch {worst:.1e}", sigma * 100.0))
}

fn six_db_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let f = rng.random_range(0.5..50.0);
        let d = rng.random_range(1.0..5000.0);
        let dp = fspl(2.0 * f, d).unwrap() - fspl(f, d).unwrap();
        let dg = antenna_gain_fixed_aperture(2.0 * f, 7.0, 10.0).unwrap() - antenna_gain_fixed_aperture(f, 7.0, 10.0).unwrap();
        ensure((dp - 6.02).abs() <= 0.001, format!("fspl delta {dp} at ({f}, {d})"))?;
        ensure((dg - 6.02).abs() <= 0.001, format!("gain delta {dg} at {f}"))?;
    }
    Ok("100 random (f, d) pairs".into())
}

fn table_regression() -> Check {
    use Environment::*;
    use Visibility::*;
    let quoted_ple = [
        (InH, LoS, 6.75, 1.34),
        (InH, LoS, 16.95, 1.32),
        (InH, LoS, 28.0, 1.2),
        (UMi, LoS, 6.75, 1.79),
        (UMi, LoS, 16.95, 1.85),
        (UMi, LoS, 28.0, 2.02),
        (UMi, NLoS, 6.75, 2.56),
        (UMi, NLoS, 16.95, 2.59),
        (UMi, NLoS, 28.0, 3.4),
        (InF, NLoS, 6.75, 1.78),
        (InF, NLoS, 16.95, 2.11),
    ];
    let quoted_ds = [(InF, LoS, 6.75, 14.0), (InF, LoS, 16.95, 12.7)];
    let t = ChannelParamTable::shipped_defaults();
    for (e, v, f, n) in quoted_ple {
        let got = t.lookup(e, v, f).map_err(|x| x.to_string())?.ple;
        ensure(got == Some(n), format!("{e}.{v}.{f}: {got:?} != {n}"))?;
    }
    for (e, v, f, ds) in quoted_ds {
        let got = t.lookup(e, v, f).map_err(|x| x.to_string())?.rms_ds;
        ensure(got == Some(ds), format!("{e}.{v}.{f} DS: {got:?} != {ds}"))?;
    }
    let values: usize = t
        .entries()
        .map(|e| [e.ple, e.shadow_sigma, e.rms_ds, e.rms_asa].iter().filter(|x| x.is_some()).count())
        .sum();
    ensure(values == quoted_ple.len() + quoted_ds.len(), format!("{values} shipped values, expected 13"))?;
    Ok("11 PLE and 2 DS cells, nothing else".into())
}

fn rate_coverage_shape() -> Check {
    let table = ChannelParamTable::shipped_defaults();
    let scenario = DropScenario::rate_coverage_default(&table, 100_000, 2025).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let result = run_rate_coverage(&scenario).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;

    let best_at = |t: f64| {
        let mut best = &result.curves[0];
        for c in &result.curves[1..] {
            if c.coverage(t) > best.coverage(t) {
                best = c;
            }
        }
        best
    };
    let low = best_at(200.0);
    ensure(low.band.label == "7GHz", format!("best at 200 Mbps is {}", low.band.label))?;
    let first = result.crossovers.first().ok_or("no crossovers")?;
    ensure(first.band_below == "7GHz", format!("first crossover leaves {}", first.band_below))?;
    let seven_max = result.curve("7GHz").unwrap().rates().last().copied().unwrap();
    let high = best_at(seven_max * 1.01);
    ensure(
        high.band.bandwidth_mhz > 100.0 && high.coverage(seven_max * 1.01) > 0.0,
        format!("best above the 7 GHz peak is {}", high.band.label),
    )?;
    ensure(result.crossovers.len() >= 2, format!("{} crossovers", result.crossovers.len()))?;
    let path: Vec<String> = result
        .crossovers
        .iter()
        .map(|c| format!("{}->{} @ {:.0}", c.band_below, c.band_above, c.rate_mbps))
        .collect();
    Ok(format!("{} in {elapsed:.1?}", path.join(", ")))
}

fn oracle_equivalence() -> Check {
    // fit_ple against an independent synthesis
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let noise = Normal::new(0.0, 4.0).unwrap();
    let mut worst_fit: f64 = 0.0;
    for (f, n) in [(6.75, 1.79), (16.95, 2.59), (28.0, 3.4)] {
        let samples: Vec<(f64, f64)> = (0..10_000)
            .map(|_| {
                let d = rng.random_range(5.0..500.0);
                (d, common::ci_reference(f, d, n) + noise.sample(&mut rng))
            })
            .collect();
        let fit = fit_ple(&samples, f).map_err(|e| e.to_string())?;
        worst_fit = worst_fit.max((fit.ple - n).abs());
    }
    ensure(worst_fit <= 0.02, format!("fit error {worst_fit}"))?;

    // greedy hopping against a from-scratch pointwise argmax, every blockage pattern
    let mut fixtures = 0;
    for (specs, steps) in [
        (vec![(7.0, 100.0, 2.0), (14.0, 200.0, 2.2)], 4usize),
        (vec![(7.0, 100.0, 1.9), (14.0, 200.0, 2.0), (24.0, 400.0, 2.4)], 3usize),
    ] {
        let nb = specs.len();
        let bands: Vec<BandChannel> = specs
            .iter()
            .map(|&(f, bw, n)| BandChannel::new(CarrierBand::new(format!("b{f}"), f, bw).unwrap(), n, 0.0).unwrap())
            .collect();
        for mask in 0u32..(1 << (nb * steps)) {
            let mut timeline = Vec::new();
            for s in 0..steps {
                for (b, band) in bands.iter().enumerate() {
                    if mask & (1 << (s * nb + b)) != 0 {
                        let t0 = s as f64 * 0.01;
                        timeline.push(
                            BlockageEvent::new(t0, t0 + 0.01, vec![band.band.label.clone()], BlockageLoss::Db(20.0))
                                .unwrap(),
                        );
                    }
                }
            }
            let fixture = HopFixture {
                timeline,
                horizon_s: steps as f64 * 0.01,
                step_s: 0.01,
                bands: bands.clone(),
                context: LinkContext::new(120.0),
                link: LinkConfig::default(),
                speed_mps: 1.0,
            };
            let trace = simulate_hopping(&fixture, &HopPolicy::GreedyRate).map_err(|e| e.to_string())?;
            ensure(trace.samples.len() == steps, "wrong step count")?;
            for (s, sample) in trace.samples.iter().enumerate() {
                let rates: Vec<f64> = specs
                    .iter()
                    .enumerate()
                    .map(|(b, &(f, bw, n))| {
                        let blocked = mask & (1 << (s * nb + b)) != 0;
                        let loss = common::ci_reference(f, 120.0, n) + if blocked { 20.0 } else { 0.0 };
                        common::rate_reference(43.0, 7.0, bw, loss)
                    })
                    .collect();
                let best = (0..nb).fold(0, |acc, b| if rates[b] > rates[acc] { b } else { acc });
                ensure(
                    sample.band == bands[best].band.label && (sample.rate_mbps / rates[best] - 1.0).abs() < 1e-9,
                    format!("mask {mask:#b} step {s}: {} vs {}", sample.band, bands[best].band.label),
                )?;
            }
            fixtures += 1;
        }
    }

    // coverage curves on randomized scenarios
    let table = ChannelParamTable::shipped_defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let mut s = DropScenario::rate_coverage_default(&table, 1_000, i).unwrap();
        let keep = rng.random_range(1..=4);
        s.bands.truncate(keep);
        for b in &mut s.bands {
            b.ple = rng.random_range(1.5..3.5);
            b.shadow_sigma_db = rng.random_range(0.0..8.0);
        }
        s.min_distance_m = rng.random_range(1.0..50.0);
        s.cell_radius_m = s.min_distance_m + rng.random_range(0.0..1000.0);
        s.link.tx_power_dbm = rng.random_range(10.0..50.0);
        let r = run_rate_coverage(&s).map_err(|e| e.to_string())?;
        for c in &r.curves {
            let ok = c.points.iter().all(|p| (0.0..=1.0).contains(&p.1)) && c.points.windows(2).all(|w| w[1].1 <= w[0].1);
            ensure(ok, format!("scenario {i}: {} not monotone", c.band.label))?;
        }
    }
    Ok(format!("fit error {worst_fit:.4}; {fixtures} hop fixtures; 50 coverage scenarios"))
}

fn run_cli(out: &Path, workers: &str, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fr3sim"))
        .args(["--out", out.to_str().unwrap(), "--seed", "31", "--workers", workers])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), format!("{args:?}: {}", String::from_utf8_lossy(&status.stderr)))
}

fn determinism() -> Check {
    let root = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let input = root.path().join("meas.csv");
    let mut text = String::from("distance_m,path_loss_db\n");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let d: f64 = rng.random_range(10.0..300.0);
        text += &format!("{d},{}\n", common::ci_reference(16.95, d, 1.9) + rng.random_range(-5.0..5.0));
    }
    std::fs::write(&input, text).map_err(|e| e.to_string())?;
    let input = input.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["propagate", "--freq", "6.75,16.95", "--rain", "8"],
        vec!["budget", "--lookup", "nearest"],
        vec!["rate-coverage", "--drops", "20000"],
        vec!["sensing", "--snr", "0,17"],
        vec!["hop", "--policy", "greedy", "--policy", "hysteresis"],
        vec!["fit-ple", "--input", input, "--freq", "16.95"],
    ];
    let mut files = 0;
    for (i, args) in commands.iter().enumerate() {
        let dirs: Vec<_> = ["1", "1", "4"].iter().enumerate().map(|(k, w)| (root.path().join(format!("{i}-{k}")), *w)).collect();
        for (dir, workers) in &dirs {
            run_cli(dir, workers, args)?;
        }
        let mut names: Vec<_> = std::fs::read_dir(&dirs[0].0)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            let a = std::fs::read(dirs[0].0.join(&name)).unwrap();
            for (dir, _) in &dirs[1..] {
                let b = std::fs::read(dir.join(&name)).map_err(|e| e.to_string())?;
                ensure(a == b, format!("{} differs for {args:?}", name.to_string_lossy()))?;
            }
            files += 1;
        }
    }
    Ok(format!("{files} output files identical across reruns and 1/4 workers"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("rain endpoints", rain_endpoints),
        ("foliage", foliage),
        ("peak rates", peak_rates),
        ("coverage gain", coverage_gains),
        ("phase noise", phase_noise),
        ("sensing target", sensing_target),
        ("six-dB laws", six_db_laws),
        ("table regression", table_regression),
        ("rate-coverage shape", rate_coverage_shape),
        ("oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
