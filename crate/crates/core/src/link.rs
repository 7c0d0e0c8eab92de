//! Link-budget arithmetic: noise floor, antenna-gain models, SNR and Shannon
//! rate, plus the closed-form calculators for peak rate, phase-noise SNR loss,
//! coverage gain from a lower path-loss exponent and coherence time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::SPEED_OF_LIGHT;

/// Thermal noise density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;
/// Clarke-model constant in `T_c = 0.423 / f_D`.
pub const COHERENCE_CONSTANT: f64 = 0.423;

/// `−174 + 10·log10(B) + NF`, dBm.
pub fn noise_power(bandwidth_mhz: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth_mhz > 0.0 && bandwidth_mhz.is_finite()) {
        return Err(Error::domain(format!("bandwidth {bandwidth_mhz} MHz must be > 0")));
    }
    Ok(THERMAL_NOISE_DBM_HZ + 10.0 * (bandwidth_mhz * 1e6).log10() + noise_figure_db)
}

/// Gain of an antenna whose physical aperture is held fixed across frequency.
pub fn antenna_gain_fixed_aperture(freq_ghz: f64, ref_ghz: f64, ref_gain_dbi: f64) -> Result<f64> {
    if !(freq_ghz > 0.0 && ref_ghz > 0.0) {
        return Err(Error::domain(format!(
            "frequencies must be > 0 (got {freq_ghz} and {ref_ghz} GHz)"
        )));
    }
    Ok(ref_gain_dbi + 20.0 * (freq_ghz / ref_ghz).log10())
}

/// Typical deployed gains, interpolated in log-frequency between anchors and
/// clamped outside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalGains {
    /// `(freq GHz, bs dBi, ue dBi)`, strictly increasing in frequency.
    anchors: Vec<(f64, f64, f64)>,
}

impl Default for TypicalGains {
    fn default() -> Self {
        TypicalGains {
            anchors: vec![(7.0, 10.0, 6.0), (28.0, 26.0, 13.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPair {
    pub tx_dbi: f64,
    pub rx_dbi: f64,
    /// Set when the value came from interpolation or clamping rather than an anchor.
    pub approximate: bool,
}

impl TypicalGains {
    pub fn new(mut anchors: Vec<(f64, f64, f64)>) -> Result<Self> {
        anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
        if anchors.is_empty() {
            return Err(Error::invalid("typical gain anchors", "at least one anchor is required"));
        }
        if anchors.iter().any(|a| !(a.0 > 0.0)) || anchors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(
                "typical gain anchors",
                "frequencies must be positive and distinct",
            ));
        }
        Ok(TypicalGains { anchors })
    }

    pub fn anchors(&self) -> &[(f64, f64, f64)] {
        &self.anchors
    }

    /// `(bs gain, ue gain)` at `freq_ghz`.
    pub fn lookup(&self, freq_ghz: f64) -> GainPair {
        let a = &self.anchors;
        if let Some(&(_, bs, ue)) = a.iter().find(|x| x.0 == freq_ghz) {
            return GainPair {
                tx_dbi: bs,
                rx_dbi: ue,
                approximate: false,
            };
        }
        let (first, last) = (a[0], a[a.len() - 1]);
        let (bs, ue) = if freq_ghz <= first.0 {
            (first.1, first.2)
        } else if freq_ghz >= last.0 {
            (last.1, last.2)
        } else {
            let i = a.partition_point(|x| x.0 <= freq_ghz);
            let (lo, hi) = (a[i - 1], a[i]);
            let t = (freq_ghz / lo.0).ln() / (hi.0 / lo.0).ln();
            (lo.1 + t * (hi.1 - lo.1), lo.2 + t * (hi.2 - lo.2))
        };
        GainPair {
            tx_dbi: bs,
            rx_dbi: ue,
            approximate: true,
        }
    }
}

/// `(bs, ue)` typical gains with the default 7 and 28 GHz anchors.
pub fn typical_gains(freq_ghz: f64) -> GainPair {
    TypicalGains::default().lookup(freq_ghz)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GainModel {
    /// Same gains at every frequency.
    EqualGain { tx_dbi: f64, rx_dbi: f64 },
    /// Fixed apertures at both ends: gains grow 20 dB/decade from the reference.
    EqualAperture { tx_ref_dbi: f64, rx_ref_dbi: f64, ref_ghz: f64 },
    /// Typical deployed BS/UE gains (transmitter = BS).
    Typical(TypicalGains),
}

impl GainModel {
    pub fn kind(&self) -> GainModelKind {
        match self {
            GainModel::EqualGain { .. } => GainModelKind::EqualGain,
            GainModel::EqualAperture { .. } => GainModelKind::EqualAperture,
            GainModel::Typical(_) => GainModelKind::Typical,
        }
    }

    pub fn gains(&self, freq_ghz: f64) -> GainPair {
        match self {
            GainModel::EqualGain { tx_dbi, rx_dbi } => GainPair {
                tx_dbi: *tx_dbi,
                rx_dbi: *rx_dbi,
                approximate: false,
            },
            GainModel::EqualAperture {
                tx_ref_dbi,
                rx_ref_dbi,
                ref_ghz,
            } => {
                let scale = 20.0 * (freq_ghz / ref_ghz).log10();
                GainPair {
                    tx_dbi: tx_ref_dbi + scale,
                    rx_dbi: rx_ref_dbi + scale,
                    approximate: false,
                }
            }
            GainModel::Typical(t) => t.lookup(freq_ghz),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GainModelKind {
    EqualGain,
    EqualAperture,
    Typical,
}

impl FromStr for GainModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal_gain" => Ok(GainModelKind::EqualGain),
            "equal_aperture" => Ok(GainModelKind::EqualAperture),
            "typical" | "typical_lookup" => Ok(GainModelKind::Typical),
            other => Err(Error::invalid(
                "gain_model",
                format!("`{other}` (expected equal_gain, equal_aperture or typical)"),
            )),
        }
    }
}

impl fmt::Display for GainModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainModelKind::EqualGain => "equal_gain",
            GainModelKind::EqualAperture => "equal_aperture",
            GainModelKind::Typical => "typical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub tx_power_dbm: f64,
    pub gain_model: GainModel,
    pub noise_figure_db: f64,
}

impl Default for LinkConfig {
    /// 43 dBm, 7 dB noise figure, isotropic antennas.
    fn default() -> Self {
        LinkConfig {
            tx_power_dbm: 43.0,
            gain_model: GainModel::EqualGain {
                tx_dbi: 0.0,
                rx_dbi: 0.0,
            },
            noise_figure_db: 7.0,
        }
    }
}

impl LinkConfig {
    pub fn new(tx_power_dbm: f64, gain_model: GainModel, noise_figure_db: f64) -> Result<Self> {
        if !(noise_figure_db >= 0.0 && noise_figure_db.is_finite()) {
            return Err(Error::invalid("link", format!("noise figure {noise_figure_db} dB must be >= 0")));
        }
        if !tx_power_dbm.is_finite() {
            return Err(Error::invalid("link", "tx power must be finite"));
        }
        if let GainModel::EqualAperture { ref_ghz, .. } = gain_model {
            if !(ref_ghz > 0.0) {
                return Err(Error::invalid("link", format!("aperture reference {ref_ghz} GHz must be > 0")));
            }
        }
        Ok(LinkConfig {
            tx_power_dbm,
            gain_model,
            noise_figure_db,
        })
    }

    pub fn with_gain_model(&self, gain_model: GainModel) -> Self {
        LinkConfig {
            gain_model,
            ..self.clone()
        }
    }
}

/// Received SNR in dB: `P_tx + G_tx + G_rx − PL − N`.
pub fn snr(link: &LinkConfig, freq_ghz: f64, bandwidth_mhz: f64, total_path_loss_db: f64) -> f64 {
    let g = link.gain_model.gains(freq_ghz);
    let noise = THERMAL_NOISE_DBM_HZ + 10.0 * (bandwidth_mhz * 1e6).log10() + link.noise_figure_db;
    link.tx_power_dbm + g.tx_dbi + g.rx_dbi - total_path_loss_db - noise
}

/// `B·log2(1 + SNR)` in Mbps for `B` in MHz.
pub fn shannon_rate(bandwidth_mhz: f64, snr_db: f64) -> f64 {
    bandwidth_mhz * (10f64.powf(snr_db / 10.0)).ln_1p() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRateSpec {
    pub bits_per_symbol: f64,
    pub streams: u32,
    pub total_bandwidth_ghz: f64,
    /// Derating for coding and control overhead; 1.0 is the ideal ceiling.
    pub efficiency: f64,
}

impl PeakRateSpec {
    pub fn new(bits_per_symbol: f64, streams: u32, total_bandwidth_ghz: f64) -> Result<Self> {
        Self::with_efficiency(bits_per_symbol, streams, total_bandwidth_ghz, 1.0)
    }

    pub fn with_efficiency(bits_per_symbol: f64, streams: u32, total_bandwidth_ghz: f64, efficiency: f64) -> Result<Self> {
        if !(bits_per_symbol > 0.0 && streams > 0 && total_bandwidth_ghz > 0.0) {
            return Err(Error::domain("peak-rate inputs must all be > 0"));
        }
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::domain(format!("efficiency {efficiency} must be in (0, 1]")));
        }
        Ok(PeakRateSpec {
            bits_per_symbol,
            streams,
            total_bandwidth_ghz,
            efficiency,
        })
    }
}

/// bits/symbol × streams × bandwidth, Gbps.
pub fn peak_rate(spec: &PeakRateSpec) -> f64 {
    spec.bits_per_symbol * spec.streams as f64 * spec.total_bandwidth_ghz * spec.efficiency
}

/// SNR loss from a fixed timing jitter when moving from `f_low` to `f_high`.
pub fn pn_snr_loss(f_low_ghz: f64, f_high_ghz: f64) -> Result<f64> {
    if !(f_low_ghz > 0.0 && f_high_ghz >= f_low_ghz) {
        return Err(Error::domain(format!(
            "need f_high >= f_low > 0 (got {f_low_ghz}, {f_high_ghz} GHz)"
        )));
    }
    Ok(20.0 * (f_high_ghz / f_low_ghz).log10())
}

/// Extra received signal from a lower path-loss exponent: `10·Δn·log10(d/d0)`.
pub fn coverage_gain(delta_ple: f64, distance_m: f64, ref_distance_m: f64) -> Result<f64> {
    if !(ref_distance_m > 0.0 && distance_m >= ref_distance_m) {
        return Err(Error::domain(format!(
            "need distance {distance_m} m >= reference {ref_distance_m} m > 0"
        )));
    }
    Ok(10.0 * (distance_m / ref_distance_m).log10() * delta_ple)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceTime {
    Bounded { seconds: f64 },
    /// Static terminal, no Doppler.
    Unbounded,
}

impl CoherenceTime {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            CoherenceTime::Bounded { seconds } => Some(*seconds),
            CoherenceTime::Unbounded => None,
        }
    }
}

/// `0.423 / f_D` with Doppler `f_D = f·v/c`.
pub fn coherence_time(freq_ghz: f64, speed_mps: f64) -> Result<CoherenceTime> {
    if !(freq_ghz > 0.0) || !(speed_mps >= 0.0 && speed_mps.is_finite()) {
        return Err(Error::domain(format!(
            "need freq > 0 and speed >= 0 (got {freq_ghz} GHz, {speed_mps} m/s)"
        )));
    }
    if speed_mps == 0.0 {
        return Ok(CoherenceTime::Unbounded);
    }
    let doppler = freq_ghz * 1e9 * speed_mps / SPEED_OF_LIGHT;
    Ok(CoherenceTime::Bounded {
        seconds: COHERENCE_CONSTANT / doppler,
    })
}
