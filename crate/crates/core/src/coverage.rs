//! Monte Carlo rate-coverage engine.
//!
//! Users are dropped uniformly over the area of an annulus around the cell
//! site. For every drop and every band the engine draws an independent
//! shadowing term, composes CI path loss with the configured impairments,
//! and converts the resulting SNR into a Shannon rate over the band's
//! allocation. Coverage at threshold `t` is the fraction of drops whose rate
//! is at least `t`.
//!
//! Every random draw comes from a counter-based stream indexed by
//! `(seed, drop, band)`, so results do not depend on the number of workers.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{shannon_rate, snr, LinkConfig};
use crate::params::{CarrierBand, ChannelParamTable, Environment, LookupMode, Visibility};
use crate::propagation::{fspl, Impairments, ShadowStream};

/// Shadow sigma used when the table has none for a band, dB.
pub const DEFAULT_SHADOW_SIGMA_DB: f64 = 4.0;
/// Number of points in the common threshold grid.
pub const THRESHOLD_GRID_POINTS: usize = 1000;

/// A carrier together with the channel parameters used to simulate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandChannel {
    pub band: CarrierBand,
    pub ple: f64,
    pub shadow_sigma_db: f64,
    /// Parameters were borrowed from a neighboring measured frequency.
    pub approximate: bool,
}

impl BandChannel {
    pub fn new(band: CarrierBand, ple: f64, shadow_sigma_db: f64) -> Result<Self> {
        if !(ple > 0.0 && ple.is_finite()) {
            return Err(Error::invalid(format!("band `{}`", band.label), format!("ple {ple} must be > 0")));
        }
        if !(shadow_sigma_db >= 0.0 && shadow_sigma_db.is_finite()) {
            return Err(Error::invalid(
                format!("band `{}`", band.label),
                format!("shadow sigma {shadow_sigma_db} must be >= 0"),
            ));
        }
        Ok(BandChannel {
            band,
            ple,
            shadow_sigma_db,
            approximate: false,
        })
    }

    /// Resolves each band's parameters from `table`. Missing cells are an
    /// error naming the band; a missing shadow sigma falls back to `default_sigma_db`.
    pub fn resolve_all(
        table: &ChannelParamTable,
        environment: Environment,
        visibility: Visibility,
        bands: &[CarrierBand],
        mode: LookupMode,
        default_sigma_db: f64,
    ) -> Result<Vec<BandChannel>> {
        bands
            .iter()
            .map(|band| {
                let resolved = table
                    .resolve(environment, visibility, band.center_ghz, mode)
                    .map_err(|e| band_error(band, e))?;
                let ple = resolved.entry.require_ple().map_err(|e| band_error(band, e))?;
                let sigma = resolved.entry.shadow_sigma.unwrap_or(default_sigma_db);
                let mut ch = BandChannel::new(band.clone(), ple, sigma)?;
                ch.approximate = resolved.approximate;
                Ok(ch)
            })
            .collect()
    }
}

fn band_error(band: &CarrierBand, err: Error) -> Error {
    match err {
        Error::MissingEntry { key, available } => Error::MissingEntry {
            key: format!("{key} (band `{}`)", band.label),
            available,
        },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropScenario {
    pub cell_radius_m: f64,
    pub min_distance_m: f64,
    pub environment: Environment,
    pub visibility: Visibility,
    pub bands: Vec<BandChannel>,
    pub link: LinkConfig,
    pub impairments: Impairments,
    pub n_drops: usize,
    pub seed: u64,
}

impl DropScenario {
    /// The four-carrier plan (7/14/18/24 GHz with 100/200/300/400 MHz) in UMi NLoS
    /// over a 10–500 m annulus, 43 dBm, 7 dB NF, isotropic antennas.
    ///
    /// Carrier parameters come from the nearest measured frequency between
    /// 6 and 24.25 GHz, so every band is tagged approximate.
    pub fn rate_coverage_default(table: &ChannelParamTable, n_drops: usize, seed: u64) -> Result<Self> {
        let bands = BandChannel::resolve_all(
            table,
            Environment::UMi,
            Visibility::NLoS,
            &CarrierBand::rate_coverage_plan(),
            LookupMode::Nearest {
                span_ghz: Some((6.0, 24.25)),
            },
            DEFAULT_SHADOW_SIGMA_DB,
        )?;
        Ok(DropScenario {
            cell_radius_m: 500.0,
            min_distance_m: 10.0,
            environment: Environment::UMi,
            visibility: Visibility::NLoS,
            bands,
            link: LinkConfig::default(),
            impairments: Impairments::default(),
            n_drops,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_distance_m >= 1.0) {
            return Err(Error::invalid("scenario", format!("min distance {} m must be >= 1 m", self.min_distance_m)));
        }
        // equal radii pin every drop to one distance
        if !(self.cell_radius_m >= self.min_distance_m && self.cell_radius_m.is_finite()) {
            return Err(Error::invalid(
                "scenario",
                format!("cell radius {} m is below min distance {} m", self.cell_radius_m, self.min_distance_m),
            ));
        }
        if self.n_drops == 0 {
            return Err(Error::invalid("scenario", "n_drops must be >= 1"));
        }
        if self.bands.is_empty() {
            return Err(Error::invalid("scenario", "band plan is empty"));
        }
        for (i, b) in self.bands.iter().enumerate() {
            if self.bands[..i].iter().any(|o| o.band.label == b.band.label) {
                return Err(Error::invalid("scenario", format!("duplicate band label `{}`", b.band.label)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCurve {
    pub band: CarrierBand,
    /// `(threshold Mbps, coverage)` on the common grid, thresholds ascending.
    pub points: Vec<(f64, f64)>,
    sorted_rates: Vec<f64>,
}

impl BandCurve {
    /// Fraction of drops with rate ≥ `rate_mbps`.
    pub fn coverage(&self, rate_mbps: f64) -> f64 {
        let n = self.sorted_rates.len();
        if n == 0 {
            return 0.0;
        }
        let below = self.sorted_rates.partition_point(|r| *r < rate_mbps);
        (n - below) as f64 / n as f64
    }

    pub fn rates(&self) -> &[f64] {
        &self.sorted_rates
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub rate_mbps: f64,
    /// Best band just below `rate_mbps`.
    pub band_below: String,
    /// Best band from `rate_mbps` on.
    pub band_above: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCoverageResult {
    pub curves: Vec<BandCurve>,
    pub crossovers: Vec<Crossover>,
}

/// `0` followed by log-spaced points from the smallest positive to the largest rate.
fn threshold_grid(min_pos: Option<f64>, max: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    let Some(lo) = min_pos else {
        return grid;
    };
    let steps = THRESHOLD_GRID_POINTS - 1;
    let (l0, l1) = (lo.ln(), max.ln());
    for i in 0..steps {
        let t = if i + 1 == steps {
            max
        } else {
            (l0 + (l1 - l0) * i as f64 / (steps - 1) as f64).exp()
        };
        if t > *grid.last().unwrap() {
            grid.push(t);
        }
    }
    grid
}

impl RateCoverageResult {
    /// Builds curves and crossovers from per-band rate samples.
    pub fn from_rates(samples: Vec<(CarrierBand, Vec<f64>)>) -> Self {
        let mut curves: Vec<BandCurve> = samples
            .into_iter()
            .map(|(band, mut rates)| {
                rates.sort_by(f64::total_cmp);
                BandCurve {
                    band,
                    points: Vec::new(),
                    sorted_rates: rates,
                }
            })
            .collect();
        let max = curves
            .iter()
            .filter_map(|c| c.sorted_rates.last().copied())
            .fold(0.0, f64::max);
        let min_pos = curves
            .iter()
            .flat_map(|c| c.sorted_rates.iter().copied().find(|r| *r > 0.0))
            .min_by(f64::total_cmp);
        let grid = threshold_grid(min_pos, max);
        for c in &mut curves {
            c.points = grid.iter().map(|&t| (t, c.coverage(t))).collect();
        }
        let mut result = RateCoverageResult {
            curves,
            crossovers: Vec::new(),
        };
        result.crossovers = crossover_points(&result);
        result
    }

    pub fn curve(&self, label: &str) -> Result<&BandCurve> {
        self.curves
            .iter()
            .find(|c| c.band.label == label)
            .ok_or_else(|| Error::UnknownBand(label.to_string()))
    }

    /// `band,rate_mbps,coverage`
    pub fn write_coverage_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["band", "rate_mbps", "coverage"])?;
        for c in &self.curves {
            for (t, p) in &c.points {
                w.write_record([c.band.label.as_str(), &t.to_string(), &p.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("coverage csv", e))?;
        Ok(())
    }

    /// `rate_mbps,band_below,band_above`
    pub fn write_crossovers_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rate_mbps", "band_below", "band_above"])?;
        for x in &self.crossovers {
            w.write_record([x.rate_mbps.to_string().as_str(), &x.band_below, &x.band_above])?;
        }
        w.flush().map_err(|e| Error::io("crossover csv", e))?;
        Ok(())
    }
}

/// Empirical coverage `P(rate ≥ rate_mbps)` for one band.
pub fn coverage_at(result: &RateCoverageResult, band: &str, rate_mbps: f64) -> Result<f64> {
    Ok(result.curve(band)?.coverage(rate_mbps))
}

/// Index of the best band at grid point `i`; ties go to the lower carrier.
fn leader(curves: &[BandCurve], i: usize) -> usize {
    let mut best = 0;
    for (j, c) in curves.iter().enumerate().skip(1) {
        let (p, q) = (c.points[i].1, curves[best].points[i].1);
        if p > q || (p == q && c.band.center_ghz < curves[best].band.center_ghz) {
            best = j;
        }
    }
    best
}

/// Thresholds on the common grid where the highest-coverage band changes.
pub fn crossover_points(result: &RateCoverageResult) -> Vec<Crossover> {
    let curves = &result.curves;
    if curves.len() < 2 {
        return Vec::new();
    }
    let n = curves[0].points.len();
    let mut out = Vec::new();
    let mut current = leader(curves, 0);
    for i in 1..n {
        // beyond the largest observed rate every curve is zero; nothing dominates there
        if curves.iter().all(|c| c.points[i].1 == 0.0) {
            break;
        }
        let next = leader(curves, i);
        if next != current {
            out.push(Crossover {
                rate_mbps: curves[0].points[i].0,
                band_below: curves[current].band.label.clone(),
                band_above: curves[next].band.label.clone(),
            });
            current = next;
        }
    }
    out
}

struct BandPrecomp {
    fspl_1m: f64,
    ple: f64,
    sigma: f64,
    fixed_loss: f64,
    rain_db_per_km: f64,
    freq: f64,
    bandwidth: f64,
}

/// Per-drop rates into `out` (`bands.len()` entries).
fn drop_rates(s: &DropScenario, pre: &[BandPrecomp], drop: usize, out: &mut [f64]) {
    let slots = pre.len() as u64 + 1;
    let base = drop as u64 * slots;
    let mut geo = ShadowStream::with_stream(s.seed, base);
    let (r0, r1) = (s.min_distance_m, s.cell_radius_m);
    let u = geo.uniform();
    let d = (r0 * r0 + u * (r1 * r1 - r0 * r0)).sqrt();
    for (b, (p, slot)) in pre.iter().zip(out.iter_mut()).enumerate() {
        let mut stream = ShadowStream::with_stream(s.seed, base + 1 + b as u64);
        let z = stream.standard_normal();
        let shadow = if p.sigma == 0.0 { 0.0 } else { p.sigma * z };
        let loss = p.fspl_1m + 10.0 * p.ple * d.log10() + shadow + p.fixed_loss + p.rain_db_per_km * d / 1000.0;
        *slot = shannon_rate(p.bandwidth, snr(&s.link, p.freq, p.bandwidth, loss));
    }
}

fn precompute(s: &DropScenario) -> Result<Vec<BandPrecomp>> {
    s.bands
        .iter()
        .map(|b| {
            let f = b.band.center_ghz;
            Ok(BandPrecomp {
                fspl_1m: fspl(f, 1.0)?,
                ple: b.ple,
                sigma: b.shadow_sigma_db,
                fixed_loss: s.impairments.fixed_loss(f)?,
                rain_db_per_km: s.impairments.rain_db_per_km(f)?,
                freq: f,
                bandwidth: b.band.bandwidth_mhz,
            })
        })
        .collect()
}

fn simulate(s: &DropScenario) -> Result<RateCoverageResult> {
    s.validate()?;
    let pre = precompute(s)?;
    let nb = pre.len();
    let mut rates = vec![0.0; s.n_drops * nb];
    rates
        .par_chunks_mut(nb)
        .enumerate()
        .for_each(|(i, chunk)| drop_rates(s, &pre, i, chunk));
    let samples = s
        .bands
        .iter()
        .enumerate()
        .map(|(b, ch)| (ch.band.clone(), rates.iter().skip(b).step_by(nb).copied().collect()))
        .collect();
    Ok(RateCoverageResult::from_rates(samples))
}

/// Runs the scenario on the ambient rayon pool.
pub fn run_rate_coverage(scenario: &DropScenario) -> Result<RateCoverageResult> {
    simulate(scenario)
}

/// Runs the scenario on a dedicated pool of `workers` threads.
pub fn run_rate_coverage_with_workers(scenario: &DropScenario, workers: usize) -> Result<RateCoverageResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| simulate(scenario))
}
