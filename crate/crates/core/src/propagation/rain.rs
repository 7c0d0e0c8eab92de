//! Rain specific attenuation `γ = k·R^α` (dB/km) with ITU-R P.838-3 coefficients.
//!
//! The default coefficient table is the recommendation's frequency grid from
//! 1 to 100 GHz, evaluated from its Gaussian-sum regression. Between grid
//! points `log k` and `α` are interpolated linearly in `log f`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};

pub const RAIN_COEFFICIENTS_SECTION: &str = "rain.coefficients";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RainPolarization {
    #[default]
    Horizontal,
    Vertical,
}

impl FromStr for RainPolarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" | "horizontal" => Ok(RainPolarization::Horizontal),
            "v" | "vertical" => Ok(RainPolarization::Vertical),
            other => Err(Error::invalid("rain polarization", format!("`{other}` (expected horizontal or vertical)"))),
        }
    }
}

impl fmt::Display for RainPolarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RainPolarization::Horizontal => "horizontal",
            RainPolarization::Vertical => "vertical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainCoefficient {
    pub freq_ghz: f64,
    pub k: f64,
    pub alpha: f64,
}

// (a_j, b_j, c_j) Gaussian terms plus (m, c) linear term in log10 f.
type Regression = (&'static [(f64, f64, f64)], f64, f64);

const K_H: Regression = (
    &[
        (-5.33980, -0.10008, 1.13098),
        (-0.35351, 1.26970, 0.45400),
        (-0.23789, 0.86036, 0.15354),
        (-0.94158, 0.64552, 0.16817),
    ],
    -0.18961,
    0.71147,
);
const K_V: Regression = (
    &[
        (-3.80595, 0.56934, 0.81061),
        (-3.44965, -0.22911, 0.51059),
        (-0.39902, 0.73042, 0.11899),
        (0.50167, 1.07319, 0.27195),
    ],
    -0.16398,
    0.63297,
);
const ALPHA_H: Regression = (
    &[
        (-0.14318, 1.82442, -0.55187),
        (0.29591, 0.77564, 0.19822),
        (0.32177, 0.63773, 0.13164),
        (-5.37610, -0.96230, 1.47828),
        (16.1721, -3.29980, 3.43990),
    ],
    0.67849,
    -1.95537,
);
const ALPHA_V: Regression = (
    &[
        (-0.07771, 2.33840, -0.76284),
        (0.56727, 0.95545, 0.54039),
        (-0.20238, 1.14520, 0.26809),
        (-48.2991, 0.791669, 0.116226),
        (48.5833, 0.791459, 0.116479),
    ],
    -0.053739,
    0.83433,
);

fn regression((terms, m, c): Regression, freq_ghz: f64) -> f64 {
    let x = freq_ghz.log10();
    terms.iter().map(|(a, b, w)| a * (-((x - b) / w).powi(2)).exp()).sum::<f64>() + m * x + c
}

/// `(k, α)` straight from the regression, without the table grid.
pub fn p838_regression(pol: RainPolarization, freq_ghz: f64) -> (f64, f64) {
    let (k, a) = match pol {
        RainPolarization::Horizontal => (K_H, ALPHA_H),
        RainPolarization::Vertical => (K_V, ALPHA_V),
    };
    (10f64.powf(regression(k, freq_ghz)), regression(a, freq_ghz))
}

/// The recommendation's tabulated frequencies up to 100 GHz.
fn p838_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (2..=12).map(|i| i as f64 * 0.5).collect();
    grid.extend((7..=100).map(f64::from));
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RainCoefficients {
    horizontal: Vec<RainCoefficient>,
    vertical: Vec<RainCoefficient>,
}

impl Default for RainCoefficients {
    fn default() -> Self {
        Self::itu_p838()
    }
}

impl RainCoefficients {
    pub fn itu_p838() -> Self {
        let table = |pol| {
            p838_grid()
                .into_iter()
                .map(|f| {
                    let (k, alpha) = p838_regression(pol, f);
                    RainCoefficient { freq_ghz: f, k, alpha }
                })
                .collect()
        };
        RainCoefficients {
            horizontal: table(RainPolarization::Horizontal),
            vertical: table(RainPolarization::Vertical),
        }
    }

    pub fn new(horizontal: Vec<RainCoefficient>, vertical: Vec<RainCoefficient>) -> Result<Self> {
        validate_table("horizontal", &horizontal)?;
        validate_table("vertical", &vertical)?;
        Ok(RainCoefficients { horizontal, vertical })
    }

    pub fn table(&self, pol: RainPolarization) -> &[RainCoefficient] {
        match pol {
            RainPolarization::Horizontal => &self.horizontal,
            RainPolarization::Vertical => &self.vertical,
        }
    }

    /// Interpolated `(k, α)` at `freq_ghz`.
    pub fn k_alpha(&self, pol: RainPolarization, freq_ghz: f64) -> Result<(f64, f64)> {
        let table = self.table(pol);
        let (lo, hi) = (table[0].freq_ghz, table[table.len() - 1].freq_ghz);
        if !(freq_ghz >= lo && freq_ghz <= hi) {
            return Err(Error::OutOfRange {
                freq_ghz,
                lo_ghz: lo,
                hi_ghz: hi,
            });
        }
        let i = table.partition_point(|c| c.freq_ghz <= freq_ghz);
        if i == 0 || table[i - 1].freq_ghz == freq_ghz {
            let c = table[i.saturating_sub(1)];
            return Ok((c.k, c.alpha));
        }
        let (a, b) = (table[i - 1], table[i]);
        let t = (freq_ghz.ln() - a.freq_ghz.ln()) / (b.freq_ghz.ln() - a.freq_ghz.ln());
        let log_k = a.k.ln() + t * (b.k.ln() - a.k.ln());
        Ok((log_k.exp(), a.alpha + t * (b.alpha - a.alpha)))
    }

    /// Replaces a polarization's table when `[rain.coefficients]` has entries for it.
    /// Keys are `h.<freq GHz>` or `v.<freq GHz>` with value `k, alpha`.
    pub fn apply_config(&mut self, config: &Config) -> Result<()> {
        let Some(section) = config.section(RAIN_COEFFICIENTS_SECTION) else {
            return Ok(());
        };
        let mut h = Vec::new();
        let mut v = Vec::new();
        for e in &section.entries {
            let (pol, freq) = e
                .key
                .split_once('.')
                .ok_or_else(|| e.error("expected `h.<freq>` or `v.<freq>`"))?;
            let pol: RainPolarization = pol.parse().map_err(|err: Error| e.error(err))?;
            let freq_ghz: f64 = freq.parse().map_err(|_| e.error(format!("invalid frequency `{freq}`")))?;
            let values = e.f64_list()?;
            let [k, alpha] = values[..] else {
                return Err(e.error("expected `k, alpha`"));
            };
            let coeff = RainCoefficient { freq_ghz, k, alpha };
            match pol {
                RainPolarization::Horizontal => h.push(coeff),
                RainPolarization::Vertical => v.push(coeff),
            }
        }
        if !h.is_empty() {
            validate_table("horizontal", &h)?;
            self.horizontal = h;
        }
        if !v.is_empty() {
            validate_table("vertical", &v)?;
            self.vertical = v;
        }
        Ok(())
    }
}

fn validate_table(name: &str, table: &[RainCoefficient]) -> Result<()> {
    let what = || format!("{name} rain coefficient table");
    if table.is_empty() {
        return Err(Error::invalid(what(), "empty"));
    }
    for c in table {
        if !(c.freq_ghz > 0.0 && c.k > 0.0 && c.alpha > 0.0) || !c.k.is_finite() || !c.alpha.is_finite() {
            return Err(Error::invalid(
                what(),
                format!("entry at {} GHz needs f > 0, k > 0, alpha > 0", c.freq_ghz),
            ));
        }
    }
    if table.windows(2).any(|w| w[1].freq_ghz <= w[0].freq_ghz) {
        return Err(Error::invalid(what(), "frequencies must be strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RainSpec {
    pub rain_rate_mm_hr: f64,
    pub polarization: RainPolarization,
    pub coefficients: RainCoefficients,
}

impl RainSpec {
    pub fn new(rain_rate_mm_hr: f64, polarization: RainPolarization) -> Result<Self> {
        Self::with_coefficients(rain_rate_mm_hr, polarization, RainCoefficients::itu_p838())
    }

    pub fn with_coefficients(
        rain_rate_mm_hr: f64,
        polarization: RainPolarization,
        coefficients: RainCoefficients,
    ) -> Result<Self> {
        if !(rain_rate_mm_hr >= 0.0 && rain_rate_mm_hr.is_finite()) {
            return Err(Error::domain(format!("rain rate {rain_rate_mm_hr} mm/hr must be >= 0")));
        }
        Ok(RainSpec {
            rain_rate_mm_hr,
            polarization,
            coefficients,
        })
    }

    /// dB/km
    pub fn specific_attenuation(&self, freq_ghz: f64) -> Result<f64> {
        let (k, alpha) = self.coefficients.k_alpha(self.polarization, freq_ghz)?;
        if self.rain_rate_mm_hr == 0.0 {
            return Ok(0.0);
        }
        Ok(k * self.rain_rate_mm_hr.powf(alpha))
    }
}

/// Rain loss over `path_km`, dB.
pub fn rain_attenuation(spec: &RainSpec, freq_ghz: f64, path_km: f64) -> Result<f64> {
    if !(path_km >= 0.0 && path_km.is_finite()) {
        return Err(Error::domain(format!("rain path length {path_km} km must be >= 0")));
    }
    Ok(spec.specific_attenuation(freq_ghz)? * path_km)
}
