//! Deterministic path-loss models and shadow-fading draws.
//!
//! All frequencies are in GHz and all distances in meters unless a name says
//! otherwise. Losses are positive dB.

mod rain;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{MaterialLossEntry, Polarization};

pub use rain::{
    p838_regression, rain_attenuation, RainCoefficient, RainCoefficients, RainPolarization, RainSpec,
    RAIN_COEFFICIENTS_SECTION,
};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Upper depth limit of the Weissberger foliage model, meters.
pub const MAX_FOLIAGE_DEPTH_M: f64 = 400.0;
/// Depth at which Weissberger switches from the linear to the power-law branch.
pub const FOLIAGE_BRANCH_DEPTH_M: f64 = 14.0;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} must be > 0")))
    }
}

/// Friis free-space loss `20·log10(4π·d·f/c)`.
pub fn fspl(freq_ghz: f64, distance_m: f64) -> Result<f64> {
    check_positive("frequency", freq_ghz)?;
    check_positive("distance", distance_m)?;
    Ok(20.0 * (4.0 * std::f64::consts::PI * distance_m * freq_ghz * 1e9 / SPEED_OF_LIGHT).log10())
}

fn check_ci_distance(distance_m: f64) -> Result<()> {
    if distance_m >= 1.0 && distance_m.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("distance {distance_m} m is below the 1 m CI reference")))
    }
}

/// Close-in model with 1 m free-space anchor.
pub fn ci_path_loss(freq_ghz: f64, distance_m: f64, ple: f64, shadow_db: f64) -> Result<f64> {
    check_ci_distance(distance_m)?;
    check_positive("ple", ple)?;
    Ok(fspl(freq_ghz, 1.0)? + 10.0 * ple * distance_m.log10() + shadow_db)
}

/// Close-in model with a frequency-weighted exponent `n·(1 + b·(f − f0)/f0)`.
pub fn cif_path_loss(
    freq_ghz: f64,
    distance_m: f64,
    ple: f64,
    freq_slope: f64,
    anchor_ghz: f64,
    shadow_db: f64,
) -> Result<f64> {
    check_ci_distance(distance_m)?;
    check_positive("anchor frequency", anchor_ghz)?;
    let effective = ple * (1.0 + freq_slope * (freq_ghz - anchor_ghz) / anchor_ghz);
    Ok(fspl(freq_ghz, 1.0)? + 10.0 * effective * distance_m.log10() + shadow_db)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoliageSpec {
    pub depth_m: f64,
}

impl FoliageSpec {
    pub fn new(depth_m: f64) -> Result<Self> {
        if !(0.0..=MAX_FOLIAGE_DEPTH_M).contains(&depth_m) {
            return Err(Error::domain(format!(
                "foliage depth {depth_m} m outside [0, {MAX_FOLIAGE_DEPTH_M}] m"
            )));
        }
        Ok(FoliageSpec { depth_m })
    }

    pub fn loss(&self, freq_ghz: f64) -> Result<f64> {
        foliage_loss(freq_ghz, self.depth_m)
    }
}

/// Weissberger foliage loss.
///
/// Depth 14 m belongs to the linear branch. The two branches do not meet
/// there: the power-law branch is lower by `(6.3 − 1.33·14^0.588)·f^0.284`,
/// about 0.04 dB at 7 GHz and 0.05 dB at 24 GHz.
pub fn foliage_loss(freq_ghz: f64, depth_m: f64) -> Result<f64> {
    check_positive("frequency", freq_ghz)?;
    if !(0.0..=MAX_FOLIAGE_DEPTH_M).contains(&depth_m) {
        return Err(Error::domain(format!(
            "foliage depth {depth_m} m outside [0, {MAX_FOLIAGE_DEPTH_M}] m"
        )));
    }
    let f = freq_ghz.powf(0.284);
    Ok(if depth_m == 0.0 {
        0.0
    } else if depth_m <= FOLIAGE_BRANCH_DEPTH_M {
        0.45 * f * depth_m
    } else {
        1.33 * f * depth_m.powf(0.588)
    })
}

/// Exact-match penetration loss. With several polarizations on file for the
/// same material and frequency, `unspecified` is preferred, then `co`, then `cross`.
pub fn penetration_loss(table: &[MaterialLossEntry], material: &str, freq_ghz: f64) -> Result<f64> {
    table
        .iter()
        .filter(|e| e.matches(material, freq_ghz))
        .min_by_key(|e| match e.polarization {
            Polarization::Unspecified => 0,
            Polarization::Co => 1,
            Polarization::Cross => 2,
        })
        .map(|e| e.loss_db)
        .ok_or_else(|| Error::MissingMaterial {
            material: material.to_string(),
            freq_ghz,
        })
}

pub fn penetration_loss_polarized(
    table: &[MaterialLossEntry],
    material: &str,
    freq_ghz: f64,
    polarization: Polarization,
) -> Result<f64> {
    table
        .iter()
        .find(|e| e.matches(material, freq_ghz) && e.polarization == polarization)
        .map(|e| e.loss_db)
        .ok_or_else(|| Error::MissingMaterial {
            material: material.to_string(),
            freq_ghz,
        })
}

/// A material whose measured loss drops as frequency rises.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityWarning {
    pub material: String,
    pub polarization: Polarization,
    pub lower: (f64, f64),
    pub higher: (f64, f64),
}

impl std::fmt::Display for MonotonicityWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "material `{}`: loss {} dB at {} GHz is below {} dB at {} GHz",
            self.material, self.higher.1, self.higher.0, self.lower.1, self.lower.0
        )
    }
}

/// Lints a material table: penetration loss is expected to grow with frequency.
/// Violations are accepted but reported.
pub fn monotonicity_warnings(table: &[MaterialLossEntry]) -> Vec<MonotonicityWarning> {
    let mut sorted: Vec<&MaterialLossEntry> = table.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.material, a.polarization)
            .cmp(&(&b.material, b.polarization))
            .then(a.freq_ghz.total_cmp(&b.freq_ghz))
    });
    sorted
        .windows(2)
        .filter(|w| w[0].material == w[1].material && w[0].polarization == w[1].polarization)
        .filter(|w| w[1].freq_ghz > w[0].freq_ghz && w[1].loss_db < w[0].loss_db)
        .map(|w| MonotonicityWarning {
            material: w[0].material.clone(),
            polarization: w[0].polarization,
            lower: (w[0].freq_ghz, w[0].loss_db),
            higher: (w[1].freq_ghz, w[1].loss_db),
        })
        .collect()
}

/// A material in the path, optionally only affecting carriers above a frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub material: String,
    pub above_ghz: Option<f64>,
}

impl Obstruction {
    pub fn new(material: impl Into<String>) -> Self {
        Obstruction {
            material: material.into(),
            above_ghz: None,
        }
    }

    pub fn above(mut self, freq_ghz: f64) -> Self {
        self.above_ghz = Some(freq_ghz);
        self
    }

    pub fn applies_to(&self, freq_ghz: f64) -> bool {
        self.above_ghz.is_none_or(|f| freq_ghz > f)
    }
}

/// Losses stacked on top of the distance-dependent path loss.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Impairments {
    /// Applied over the full link distance.
    pub rain: Option<RainSpec>,
    pub foliage: Option<FoliageSpec>,
    pub obstructions: Vec<Obstruction>,
    /// Penetration table used to resolve `obstructions`.
    pub materials: Vec<MaterialLossEntry>,
}

impl Impairments {
    pub fn is_empty(&self) -> bool {
        self.rain.is_none() && self.foliage.is_none() && self.obstructions.is_empty()
    }

    /// Distance-independent part: foliage plus penetration, dB.
    pub fn fixed_loss(&self, freq_ghz: f64) -> Result<f64> {
        let mut loss = match &self.foliage {
            Some(f) => f.loss(freq_ghz)?,
            None => 0.0,
        };
        for o in self.obstructions.iter().filter(|o| o.applies_to(freq_ghz)) {
            loss += penetration_loss(&self.materials, &o.material, freq_ghz)?;
        }
        Ok(loss)
    }

    /// Rain specific attenuation, dB/km (0 without rain).
    pub fn rain_db_per_km(&self, freq_ghz: f64) -> Result<f64> {
        match &self.rain {
            Some(r) => r.specific_attenuation(freq_ghz),
            None => Ok(0.0),
        }
    }

    pub fn loss(&self, freq_ghz: f64, distance_m: f64) -> Result<f64> {
        Ok(self.fixed_loss(freq_ghz)? + self.rain_db_per_km(freq_ghz)? * distance_m / 1000.0)
    }
}

/// Counter-based random stream. Streams derived from the same seed with
/// different indices are independent, so parallel workers never share state.
#[derive(Debug, Clone)]
pub struct ShadowStream {
    rng: ChaCha8Rng,
}

impl ShadowStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ShadowStream { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Zero-mean Gaussian shadowing in dB. One normal is drawn regardless of `sigma`
/// so the stream position does not depend on it.
pub fn sample_shadowing(sigma_db: f64, stream: &mut ShadowStream) -> Result<f64> {
    if !(sigma_db >= 0.0 && sigma_db.is_finite()) {
        return Err(Error::domain(format!("shadow sigma {sigma_db} dB must be >= 0")));
    }
    let z = stream.standard_normal();
    Ok(if sigma_db == 0.0 { 0.0 } else { sigma_db * z })
}
