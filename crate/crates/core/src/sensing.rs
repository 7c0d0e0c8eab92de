//! Delay-estimation bounds for multiband sensing.
//!
//! A plan is a set of non-overlapping sub-bands placed around a reference
//! carrier. Coherent combining keeps the cross-band phase, so the RMS
//! bandwidth is the second central moment of the whole composite spectrum;
//! noncoherent combining treats every sub-band as a separate observation and
//! only their own widths count.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubBand {
    /// Center offset from the reference carrier, Hz.
    pub offset_hz: f64,
    pub bandwidth_hz: f64,
}

impl SubBand {
    pub fn new(offset_hz: f64, bandwidth_hz: f64) -> Self {
        SubBand { offset_hz, bandwidth_hz }
    }

    fn lo(&self) -> f64 {
        self.offset_hz - self.bandwidth_hz / 2.0
    }

    fn hi(&self) -> f64 {
        self.offset_hz + self.bandwidth_hz / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Combining {
    #[default]
    Coherent,
    Noncoherent,
}

/// Power spectral shape of every sub-band, peak-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SpectralShape {
    #[default]
    Rectangular,
    /// Linear roll-off from the center to zero at both edges.
    Triangular,
}

impl SpectralShape {
    /// Variance of the shape over a width `B`, in units of `B²`.
    pub fn variance_factor(self) -> f64 {
        match self {
            SpectralShape::Rectangular => 1.0 / 12.0,
            SpectralShape::Triangular => 1.0 / 24.0,
        }
    }

    /// Energy of a width-`B` band, in units of `B`.
    pub fn energy_factor(self) -> f64 {
        match self {
            SpectralShape::Rectangular => 1.0,
            SpectralShape::Triangular => 0.5,
        }
    }

    /// Density at normalized position `x ∈ [−½, ½]` across the band.
    pub fn density(self, x: f64) -> f64 {
        if x.abs() > 0.5 {
            return 0.0;
        }
        match self {
            SpectralShape::Rectangular => 1.0,
            SpectralShape::Triangular => 1.0 - 2.0 * x.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingPlan {
    pub subbands: Vec<SubBand>,
    pub snr_db: f64,
    pub combining: Combining,
    pub shape: SpectralShape,
}

impl SensingPlan {
    pub fn new(subbands: Vec<SubBand>, snr_db: f64, combining: Combining) -> Result<Self> {
        Self::with_shape(subbands, snr_db, combining, SpectralShape::Rectangular)
    }

    pub fn with_shape(subbands: Vec<SubBand>, snr_db: f64, combining: Combining, shape: SpectralShape) -> Result<Self> {
        if subbands.is_empty() {
            return Err(Error::domain("sensing plan has no sub-bands"));
        }
        if let Some(b) = subbands.iter().find(|b| !(b.bandwidth_hz > 0.0 && b.bandwidth_hz.is_finite())) {
            return Err(Error::domain(format!("sub-band bandwidth {} Hz must be > 0", b.bandwidth_hz)));
        }
        if subbands.iter().any(|b| !b.offset_hz.is_finite()) || !snr_db.is_finite() {
            return Err(Error::domain("sub-band offsets and SNR must be finite"));
        }
        let mut sorted = subbands.clone();
        sorted.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
        if let Some(w) = sorted.windows(2).find(|w| w[1].lo() < w[0].hi()) {
            return Err(Error::domain(format!(
                "sub-bands centered at {} Hz and {} Hz overlap",
                w[0].offset_hz, w[1].offset_hz
            )));
        }
        Ok(SensingPlan {
            subbands,
            snr_db,
            combining,
            shape,
        })
    }

    pub fn single(bandwidth_hz: f64, snr_db: f64) -> Result<Self> {
        Self::new(vec![SubBand::new(0.0, bandwidth_hz)], snr_db, Combining::Coherent)
    }

    /// Offsets and widths multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::domain(format!("scale factor {factor} must be > 0")));
        }
        let subbands = self
            .subbands
            .iter()
            .map(|b| SubBand::new(b.offset_hz * factor, b.bandwidth_hz * factor))
            .collect();
        Self::with_shape(subbands, self.snr_db, self.combining, self.shape)
    }

    /// Energy-weighted centroid of the composite spectrum, Hz.
    pub fn centroid_hz(&self) -> f64 {
        let w = self.weights();
        self.subbands.iter().zip(&w).map(|(b, w)| w * b.offset_hz).sum()
    }

    fn weights(&self) -> Vec<f64> {
        let total: f64 = self.subbands.iter().map(|b| b.bandwidth_hz).sum();
        self.subbands.iter().map(|b| b.bandwidth_hz / total).collect()
    }
}

/// RMS (effective) bandwidth β in Hz.
///
/// Coherent: `β² = Σ w_k (v·B_k² + Δf_k²)`; noncoherent: `β² = Σ w_k v·B_k²`,
/// with energy weights `w_k ∝ B_k`, shape variance factor `v` (1/12 for flat
/// spectra) and `Δf_k` the sub-band offset from the energy centroid.
pub fn rms_bandwidth(plan: &SensingPlan) -> Result<f64> {
    if plan.subbands.is_empty() {
        return Err(Error::domain("sensing plan has no sub-bands"));
    }
    let v = plan.shape.variance_factor();
    let w = plan.weights();
    let centroid = plan.centroid_hz();
    let beta2: f64 = plan
        .subbands
        .iter()
        .zip(&w)
        .map(|(b, w)| {
            let spread = v * b.bandwidth_hz * b.bandwidth_hz;
            let offset = match plan.combining {
                Combining::Coherent => (b.offset_hz - centroid).powi(2),
                Combining::Noncoherent => 0.0,
            };
            w * (spread + offset)
        })
        .sum();
    Ok(beta2.sqrt())
}

/// Delay CRB `1/(8π²·β²·SNR)`, s².
pub fn delay_crb(beta_hz: f64, snr_db: f64) -> Result<f64> {
    if !(beta_hz > 0.0 && beta_hz.is_finite()) {
        return Err(Error::domain(format!("rms bandwidth {beta_hz} Hz must be > 0")));
    }
    let snr = 10f64.powf(snr_db / 10.0);
    Ok(1.0 / (8.0 * std::f64::consts::PI.powi(2) * beta_hz * beta_hz * snr))
}

/// Range standard deviation `c·√CRB`, meters.
pub fn range_std(crb_s2: f64) -> Result<f64> {
    if !(crb_s2 >= 0.0) {
        return Err(Error::domain(format!("CRB {crb_s2} s² must be >= 0")));
    }
    Ok(SPEED_OF_LIGHT * crb_s2.sqrt())
}

/// CRB and range deviation for a plan at its own SNR.
pub fn plan_bounds(plan: &SensingPlan) -> Result<(f64, f64)> {
    let crb = delay_crb(rms_bandwidth(plan)?, plan.snr_db)?;
    Ok((crb, range_std(crb)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub factor: f64,
    pub carrier_ghz: f64,
    pub snr_db: f64,
    pub crb_s2: f64,
    pub range_std_m: f64,
}

/// Scales a single band and its carrier together by each factor and tabulates
/// the bounds over the SNR grid.
pub fn sweep_scaling(base_bandwidth_hz: f64, base_freq_ghz: f64, factors: &[f64], snr_grid: &[f64]) -> Result<Vec<SweepRow>> {
    let plan = SensingPlan::single(base_bandwidth_hz, 0.0)?;
    sweep_plan(&plan, base_freq_ghz, factors, snr_grid)
}

/// Like [`sweep_scaling`] for an arbitrary plan; rows are factor-major.
pub fn sweep_plan(plan: &SensingPlan, base_freq_ghz: f64, factors: &[f64], snr_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if factors.is_empty() || snr_grid.is_empty() {
        return Err(Error::domain("sweep needs at least one factor and one SNR"));
    }
    let mut rows = Vec::with_capacity(factors.len() * snr_grid.len());
    for &factor in factors {
        let beta = rms_bandwidth(&plan.scaled(factor)?)?;
        for &snr_db in snr_grid {
            let crb_s2 = delay_crb(beta, snr_db)?;
            rows.push(SweepRow {
                factor,
                carrier_ghz: base_freq_ghz * factor,
                snr_db,
                crb_s2,
                range_std_m: range_std(crb_s2)?,
            });
        }
    }
    Ok(rows)
}

/// `factor,snr_db,crb_s2,range_std_m`
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["factor", "snr_db", "crb_s2", "range_std_m"])?;
    for r in rows {
        w.write_record([
            r.factor.to_string(),
            r.snr_db.to_string(),
            r.crb_s2.to_string(),
            r.range_std_m.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("sweep csv", e))?;
    Ok(())
}
