//! Measured channel-parameter registry, carrier band plans and the
//! close-in (CI) path-loss-exponent fit.
//!
//! The shipped table holds only the omnidirectional measurements that are
//! published as numbers: path-loss exponents for UMi/InH/InF and two InF LoS
//! RMS delay spreads. Every other cell (shadow sigmas, angular spreads, extra
//! frequencies) must come from a config file. Lookups never interpolate across
//! frequency unless the caller opts into [`LookupMode::Nearest`], in which case
//! the result is tagged approximate.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{Config, Section};
use crate::error::{Error, Result};
use crate::propagation::fspl;

/// Section holding channel-parameter cells.
pub const PARAMS_SECTION: &str = "channel.params";
/// Section holding material penetration losses.
pub const MATERIALS_SECTION: &str = "materials";

/// Default band-edge validity range, GHz.
pub const DEFAULT_VALIDITY_GHZ: (f64, f64) = (0.5, 100.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierBand {
    pub label: String,
    pub center_ghz: f64,
    pub bandwidth_mhz: f64,
}

impl CarrierBand {
    pub fn new(label: impl Into<String>, center_ghz: f64, bandwidth_mhz: f64) -> Result<Self> {
        Self::with_validity(label, center_ghz, bandwidth_mhz, DEFAULT_VALIDITY_GHZ)
    }

    pub fn with_validity(
        label: impl Into<String>,
        center_ghz: f64,
        bandwidth_mhz: f64,
        (lo, hi): (f64, f64),
    ) -> Result<Self> {
        let band = CarrierBand {
            label: label.into(),
            center_ghz,
            bandwidth_mhz,
        };
        let what = || format!("band `{}`", band.label);
        if band.label.is_empty() || band.label.contains([',', '"', '\n']) {
            return Err(Error::invalid(what(), "label must be non-empty without commas or quotes"));
        }
        if !(center_ghz > 0.0 && center_ghz.is_finite()) {
            return Err(Error::invalid(what(), "center frequency must be > 0"));
        }
        if !(bandwidth_mhz > 0.0 && bandwidth_mhz.is_finite()) {
            return Err(Error::invalid(what(), "bandwidth must be > 0"));
        }
        if band.low_edge_ghz() < lo || band.high_edge_ghz() > hi {
            return Err(Error::invalid(
                what(),
                format!(
                    "edges [{}, {}] GHz fall outside validity range [{lo}, {hi}] GHz",
                    band.low_edge_ghz(),
                    band.high_edge_ghz()
                ),
            ));
        }
        Ok(band)
    }

    pub fn low_edge_ghz(&self) -> f64 {
        self.center_ghz - self.bandwidth_mhz / 2000.0
    }

    pub fn high_edge_ghz(&self) -> f64 {
        self.center_ghz + self.bandwidth_mhz / 2000.0
    }

    /// Four carriers with bandwidth growing with frequency: 7/14/18/24 GHz
    /// carrying 100/200/300/400 MHz.
    pub fn rate_coverage_plan() -> Vec<CarrierBand> {
        [(7.0, 100.0), (14.0, 200.0), (18.0, 300.0), (24.0, 400.0)]
            .into_iter()
            .map(|(f, b)| CarrierBand::new(format!("{f}GHz"), f, b).expect("valid plan"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Environment {
    UMi,
    InH,
    InF,
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "UMi" => Ok(Environment::UMi),
            "InH" => Ok(Environment::InH),
            "InF" => Ok(Environment::InF),
            other => Err(Error::invalid("environment", format!("`{other}` (expected UMi, InH or InF)"))),
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Environment::UMi => "UMi",
            Environment::InH => "InH",
            Environment::InF => "InF",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Visibility {
    LoS,
    NLoS,
}

impl FromStr for Visibility {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LoS" => Ok(Visibility::LoS),
            "NLoS" => Ok(Visibility::NLoS),
            other => Err(Error::invalid("visibility", format!("`{other}` (expected LoS or NLoS)"))),
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::LoS => "LoS",
            Visibility::NLoS => "NLoS",
        })
    }
}

/// Frequencies are keyed at 1 kHz resolution so that `6.75` and `6.750` collide.
fn freq_key(freq_ghz: f64) -> u64 {
    (freq_ghz * 1e6).round() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamKey {
    pub environment: Environment,
    pub visibility: Visibility,
    freq_khz: u64,
}

impl ParamKey {
    pub fn new(environment: Environment, visibility: Visibility, freq_ghz: f64) -> Self {
        ParamKey {
            environment,
            visibility,
            freq_khz: freq_key(freq_ghz),
        }
    }
}

/// One measured cell. Any quantity may be absent; consumers ask for what they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParamEntry {
    pub environment: Environment,
    pub visibility: Visibility,
    pub freq_ghz: f64,
    pub ple: Option<f64>,
    /// dB
    pub shadow_sigma: Option<f64>,
    /// ns
    pub rms_ds: Option<f64>,
    /// degrees
    pub rms_asa: Option<f64>,
}

impl ChannelParamEntry {
    pub fn new(environment: Environment, visibility: Visibility, freq_ghz: f64) -> Self {
        ChannelParamEntry {
            environment,
            visibility,
            freq_ghz,
            ple: None,
            shadow_sigma: None,
            rms_ds: None,
            rms_asa: None,
        }
    }

    pub fn with_ple(mut self, ple: f64) -> Self {
        self.ple = Some(ple);
        self
    }

    pub fn with_shadow_sigma(mut self, sigma: f64) -> Self {
        self.shadow_sigma = Some(sigma);
        self
    }

    pub fn with_rms_ds(mut self, ns: f64) -> Self {
        self.rms_ds = Some(ns);
        self
    }

    pub fn with_rms_asa(mut self, deg: f64) -> Self {
        self.rms_asa = Some(deg);
        self
    }

    pub fn key(&self) -> ParamKey {
        ParamKey::new(self.environment, self.visibility, self.freq_ghz)
    }

    pub fn name(&self) -> String {
        format!("{}.{}.{}", self.environment, self.visibility, self.freq_ghz)
    }

    /// The path-loss exponent, or a missing-entry error naming the cell.
    pub fn require_ple(&self) -> Result<f64> {
        self.ple.ok_or_else(|| Error::MissingEntry {
            key: format!("ple.{}", self.name()),
            available: Vec::new(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let what = || format!("channel entry {}", self.name());
        if !(self.freq_ghz > 0.0 && self.freq_ghz.is_finite()) {
            return Err(Error::invalid(what(), "frequency must be > 0"));
        }
        if let Some(n) = self.ple {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::invalid(what(), format!("ple = {n} must be > 0")));
            }
        }
        if let Some(s) = self.shadow_sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid(what(), format!("shadow sigma = {s} must be >= 0")));
            }
        }
        if let Some(ds) = self.rms_ds {
            if !(ds >= 0.0 && ds.is_finite()) {
                return Err(Error::invalid(what(), format!("rms delay spread = {ds} must be >= 0")));
            }
        }
        if let Some(asa) = self.rms_asa {
            if !(0.0..=360.0).contains(&asa) {
                return Err(Error::invalid(what(), format!("rms angular spread = {asa} must be in [0, 360]")));
            }
        }
        Ok(())
    }

    /// Field-wise overlay: every field present in `other` wins.
    fn overlay(&mut self, other: &ChannelParamEntry) {
        self.ple = other.ple.or(self.ple);
        self.shadow_sigma = other.shadow_sigma.or(self.shadow_sigma);
        self.rms_ds = other.rms_ds.or(self.rms_ds);
        self.rms_asa = other.rms_asa.or(self.rms_asa);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Ple,
    Sigma,
    Ds,
    Asa,
}

impl Field {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "ple" => Some(Field::Ple),
            "sigma" => Some(Field::Sigma),
            "ds" => Some(Field::Ds),
            "asa" => Some(Field::Asa),
            _ => None,
        }
    }

    fn slot(self, entry: &mut ChannelParamEntry) -> &mut Option<f64> {
        match self {
            Field::Ple => &mut entry.ple,
            Field::Sigma => &mut entry.shadow_sigma,
            Field::Ds => &mut entry.rms_ds,
            Field::Asa => &mut entry.rms_asa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LookupMode {
    #[default]
    Exact,
    /// Use the closest measured frequency, optionally restricted to a span
    /// (GHz). Results are tagged approximate when the frequency differs.
    Nearest { span_ghz: Option<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedParams {
    pub entry: ChannelParamEntry,
    pub requested_ghz: f64,
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParamTable {
    entries: BTreeMap<ParamKey, ChannelParamEntry>,
    pub source: String,
}

impl Default for ChannelParamTable {
    fn default() -> Self {
        Self::shipped_defaults()
    }
}

impl ChannelParamTable {
    pub fn empty(source: impl Into<String>) -> Self {
        ChannelParamTable {
            entries: BTreeMap::new(),
            source: source.into(),
        }
    }

    /// Omnidirectional CI-model (1 m anchor) measurements quoted as numbers.
    ///
    /// UMi NLoS at 28 GHz is reported as a 3.4–3.56 range; the low end is used.
    /// UMi LoS at 28 GHz is quoted both as 2.02 and as "2.02 to 2.1"; 2.02 is used.
    pub fn shipped_defaults() -> Self {
        use Environment::*;
        use Visibility::*;
        let ples: [(Environment, Visibility, f64, f64); 11] = [
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
        let mut table = Self::empty("shipped defaults");
        for (env, vis, f, n) in ples {
            table.overlay(ChannelParamEntry::new(env, vis, f).with_ple(n));
        }
        for (f, ds) in [(6.75, 14.0), (16.95, 12.7)] {
            table.overlay(ChannelParamEntry::new(InF, LoS, f).with_rms_ds(ds));
        }
        table
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ChannelParamEntry> {
        self.entries.values()
    }

    /// Inserts or field-wise overlays an entry, then validates the merged cell.
    pub fn insert(&mut self, entry: ChannelParamEntry) -> Result<()> {
        let key = entry.key();
        let mut merged = self.entries.get(&key).cloned().unwrap_or_else(|| entry.clone());
        merged.overlay(&entry);
        merged.validate()?;
        self.entries.insert(key, merged);
        Ok(())
    }

    fn overlay(&mut self, entry: ChannelParamEntry) {
        self.insert(entry).expect("shipped defaults are valid");
    }

    fn available(&self, env: Environment, vis: Visibility) -> Vec<String> {
        self.entries
            .values()
            .filter(|e| e.environment == env && e.visibility == vis)
            .map(ChannelParamEntry::name)
            .collect()
    }

    /// Exact-key lookup.
    pub fn lookup(&self, env: Environment, vis: Visibility, freq_ghz: f64) -> Result<&ChannelParamEntry> {
        self.entries
            .get(&ParamKey::new(env, vis, freq_ghz))
            .ok_or_else(|| Error::MissingEntry {
                key: format!("{env}.{vis}.{freq_ghz}"),
                available: self.available(env, vis),
            })
    }

    pub fn resolve(&self, env: Environment, vis: Visibility, freq_ghz: f64, mode: LookupMode) -> Result<ResolvedParams> {
        if let Ok(entry) = self.lookup(env, vis, freq_ghz) {
            return Ok(ResolvedParams {
                entry: entry.clone(),
                requested_ghz: freq_ghz,
                approximate: false,
            });
        }
        let missing = || Error::MissingEntry {
            key: format!("{env}.{vis}.{freq_ghz}"),
            available: self.available(env, vis),
        };
        let LookupMode::Nearest { span_ghz } = mode else {
            return Err(missing());
        };
        let nearest = self
            .entries
            .values()
            .filter(|e| e.environment == env && e.visibility == vis)
            .filter(|e| span_ghz.is_none_or(|(lo, hi)| (lo..=hi).contains(&e.freq_ghz)))
            .min_by(|a, b| {
                let da = (a.freq_ghz - freq_ghz).abs();
                let db = (b.freq_ghz - freq_ghz).abs();
                // ties go to the lower frequency (iteration order is ascending)
                da.total_cmp(&db)
            });
        match nearest {
            Some(entry) => Ok(ResolvedParams {
                entry: entry.clone(),
                requested_ghz: freq_ghz,
                approximate: true,
            }),
            None => Err(missing()),
        }
    }

    /// Applies the `[channel.params]` section of `config` on top of this table.
    /// Keys look like `ple.UMi.LoS.6.75`; fields are `ple`, `sigma`, `ds`, `asa`.
    pub fn apply_config(&mut self, config: &Config) -> Result<()> {
        let Some(section) = config.section(PARAMS_SECTION) else {
            return Ok(());
        };
        for entry in parse_param_section(section)? {
            self.insert(entry)?;
        }
        Ok(())
    }

    /// Serializes the table as a `[channel.params]` section.
    pub fn to_config_string(&self) -> String {
        let mut out = format!("# source: {}\n[{PARAMS_SECTION}]\n", self.source.replace('\n', " "));
        for e in self.entries.values() {
            let name = e.name();
            for (field, v) in [("ple", e.ple), ("sigma", e.shadow_sigma), ("ds", e.rms_ds), ("asa", e.rms_asa)] {
                if let Some(v) = v {
                    out.push_str(&format!("{field}.{name} = {v}\n"));
                }
            }
        }
        out
    }
}

fn parse_param_section(section: &Section) -> Result<Vec<ChannelParamEntry>> {
    let mut cells: BTreeMap<ParamKey, ChannelParamEntry> = BTreeMap::new();
    let mut seen: Vec<(ParamKey, &'static str, usize)> = Vec::new();
    for e in &section.entries {
        let mut parts = e.key.splitn(4, '.');
        let (Some(field), Some(env), Some(vis), Some(freq)) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(e.error("expected `<field>.<env>.<visibility>.<freq GHz>`"));
        };
        let field_kind = Field::parse(field).ok_or_else(|| e.error(format!("unknown field `{field}`")))?;
        let env: Environment = env.parse().map_err(|err: Error| e.error(err))?;
        let vis: Visibility = vis.parse().map_err(|err: Error| e.error(err))?;
        let freq: f64 = freq
            .parse()
            .ok()
            .filter(|f: &f64| *f > 0.0 && f.is_finite())
            .ok_or_else(|| e.error(format!("invalid frequency `{freq}`")))?;
        let value = e.f64()?;
        let key = ParamKey::new(env, vis, freq);
        let field_name: &'static str = match field_kind {
            Field::Ple => "ple",
            Field::Sigma => "sigma",
            Field::Ds => "ds",
            Field::Asa => "asa",
        };
        if let Some((_, _, first)) = seen.iter().find(|(k, f, _)| *k == key && *f == field_name) {
            return Err(Error::DuplicateKey {
                key: format!("{} (first defined on line {first})", e.key),
                line: e.line,
            });
        }
        seen.push((key, field_name, e.line));
        let cell = cells.entry(key).or_insert_with(|| ChannelParamEntry::new(env, vis, freq));
        *field_kind.slot(cell) = Some(value);
        cell.validate().map_err(|err| e.error(err))?;
    }
    Ok(cells.into_values().collect())
}

/// Parses a `[channel.params]` document into a standalone table (no defaults).
pub fn parse_param_table(text: &str, source: impl Into<String>) -> Result<ChannelParamTable> {
    let config: Config = text.parse()?;
    let mut table = ChannelParamTable::empty(source);
    table.apply_config(&config)?;
    Ok(table)
}

/// Loads a config file and merges its `[channel.params]` over the shipped defaults.
pub fn load_param_table(path: impl AsRef<Path>) -> Result<ChannelParamTable> {
    let path = path.as_ref();
    let config = Config::load(path)?;
    let mut table = ChannelParamTable::shipped_defaults();
    table.apply_config(&config)?;
    table.source = format!("shipped defaults + {}", path.display());
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    Co,
    Cross,
    Unspecified,
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "co" => Ok(Polarization::Co),
            "cross" => Ok(Polarization::Cross),
            "unspecified" => Ok(Polarization::Unspecified),
            other => Err(Error::invalid("polarization", format!("`{other}` (expected co, cross, unspecified)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialLossEntry {
    pub material: String,
    pub freq_ghz: f64,
    pub loss_db: f64,
    pub polarization: Polarization,
}

impl MaterialLossEntry {
    pub fn new(material: impl Into<String>, freq_ghz: f64, loss_db: f64) -> Result<Self> {
        Self::with_polarization(material, freq_ghz, loss_db, Polarization::Unspecified)
    }

    pub fn with_polarization(
        material: impl Into<String>,
        freq_ghz: f64,
        loss_db: f64,
        polarization: Polarization,
    ) -> Result<Self> {
        let entry = MaterialLossEntry {
            material: material.into(),
            freq_ghz,
            loss_db,
            polarization,
        };
        if !(loss_db >= 0.0 && loss_db.is_finite()) {
            return Err(Error::invalid(
                format!("material `{}` at {freq_ghz} GHz", entry.material),
                "loss must be >= 0",
            ));
        }
        if !(freq_ghz > 0.0 && freq_ghz.is_finite()) {
            return Err(Error::invalid(format!("material `{}`", entry.material), "frequency must be > 0"));
        }
        Ok(entry)
    }

    pub(crate) fn matches(&self, material: &str, freq_ghz: f64) -> bool {
        self.material == material && freq_key(self.freq_ghz) == freq_key(freq_ghz)
    }
}

/// Reads `[materials]`: `<material> @ <freq GHz> [@ co|cross|unspecified] = <loss dB>`.
pub fn parse_materials(config: &Config) -> Result<Vec<MaterialLossEntry>> {
    let Some(section) = config.section(MATERIALS_SECTION) else {
        return Ok(Vec::new());
    };
    let mut out: Vec<MaterialLossEntry> = Vec::new();
    for e in &section.entries {
        let parts: Vec<&str> = e.key.split('@').map(str::trim).collect();
        let (material, freq, pol) = match parts.as_slice() {
            [m, f] => (*m, *f, Polarization::Unspecified),
            [m, f, p] => (*m, *f, p.parse().map_err(|err: Error| e.error(err))?),
            _ => return Err(e.error("expected `<material> @ <freq GHz> [@ <polarization>]`")),
        };
        let freq: f64 = freq.parse().map_err(|_| e.error(format!("invalid frequency `{freq}`")))?;
        let entry = MaterialLossEntry::with_polarization(material, freq, e.f64()?, pol).map_err(|err| e.error(err))?;
        if out
            .iter()
            .any(|o| o.matches(&entry.material, entry.freq_ghz) && o.polarization == entry.polarization)
        {
            return Err(Error::DuplicateKey {
                key: e.key.clone(),
                line: e.line,
            });
        }
        out.push(entry);
    }
    Ok(out)
}

/// Closed-form least-squares CI fit against the 1 m free-space anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PleFit {
    pub ple: f64,
    /// RMS residual, dB.
    pub shadow_sigma: f64,
}

/// Fits the CI path-loss exponent to `(distance m, path loss dB)` samples.
///
/// Minimizes `Σ (PL_i − FSPL(f, 1 m) − 10·n·log10 d_i)²`, which has the closed
/// form `n = Σ a_i x_i / Σ x_i²` with `x_i = 10·log10 d_i` and `a_i` the excess
/// over the anchor.
pub fn fit_ple(samples: &[(f64, f64)], freq_ghz: f64) -> Result<PleFit> {
    if samples.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    if let Some(&(d, _)) = samples.iter().find(|(d, _)| !(*d > 1.0 && d.is_finite())) {
        return Err(Error::domain(format!("distance {d} m must be > 1 m")));
    }
    if let Some(&(_, pl)) = samples.iter().find(|(_, pl)| !pl.is_finite()) {
        return Err(Error::domain(format!("path loss {pl} dB is not finite")));
    }
    let first = samples[0].0;
    if samples.iter().all(|(d, _)| *d == first) {
        return Err(Error::Degenerate(format!(
            "all {} samples share distance {first} m; need at least two distinct distances",
            samples.len()
        )));
    }
    let anchor = fspl(freq_ghz, 1.0)?;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(d, pl) in samples {
        let x = 10.0 * d.log10();
        sxy += (pl - anchor) * x;
        sxx += x * x;
    }
    let ple = sxy / sxx;
    let sse: f64 = samples
        .iter()
        .map(|&(d, pl)| {
            let r = pl - anchor - 10.0 * ple * d.log10();
            r * r
        })
        .sum();
    Ok(PleFit {
        ple,
        shadow_sigma: (sse / samples.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Environment::*;
    use Visibility::*;

    #[test]
    fn lookup_quoted_cells() {
        let t = ChannelParamTable::shipped_defaults();
        assert_eq!(t.lookup(InH, LoS, 6.75).unwrap().ple, Some(1.34));
        assert_eq!(t.lookup(UMi, NLoS, 16.95).unwrap().ple, Some(2.59));
        assert_eq!(t.lookup(InF, LoS, 16.95).unwrap().rms_ds, Some(12.7));
        assert_eq!(t.lookup(InF, LoS, 16.95).unwrap().ple, None);
    }

    #[test]
    fn missing_key_lists_available() {
        let t = ChannelParamTable::shipped_defaults();
        let err = t.lookup(UMi, LoS, 99.9).unwrap_err();
        match err {
            Error::MissingEntry { available, .. } => {
                assert_eq!(available, vec!["UMi.LoS.6.75", "UMi.LoS.16.95", "UMi.LoS.28"]);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn shipped_defaults_never_invent_sigmas_or_spreads() {
        let t = ChannelParamTable::shipped_defaults();
        assert_eq!(t.len(), 13);
        assert!(t.entries().all(|e| e.shadow_sigma.is_none() && e.rms_asa.is_none()));
        assert_eq!(t.entries().filter(|e| e.rms_ds.is_some()).count(), 2);
    }

    #[test]
    fn config_overrides_and_merges_fieldwise() {
        let cfg: Config = "[channel.params]\nple.UMi.LoS.6.75 = 1.9\nsigma.UMi.LoS.6.75 = 3.1\n".parse().unwrap();
        let mut t = ChannelParamTable::shipped_defaults();
        t.apply_config(&cfg).unwrap();
        let e = t.lookup(UMi, LoS, 6.75).unwrap();
        assert_eq!(e.ple, Some(1.9));
        assert_eq!(e.shadow_sigma, Some(3.1));
        let cfg: Config = "[channel.params]\nds.InF.LoS.6.75 = 20\n".parse().unwrap();
        t.apply_config(&cfg).unwrap();
        assert_eq!(t.lookup(InF, LoS, 6.75).unwrap().rms_ds, Some(20.0));
    }

    #[test]
    fn invariant_violations_name_the_entry() {
        let err = parse_param_table("[channel.params]\nple.UMi.LoS.6.75 = -1\n", "t").unwrap_err();
        assert!(err.to_string().contains("UMi.LoS.6.75"), "{err}");
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_param_table("[channel.params]\nasa.UMi.LoS.6.75 = 400\n", "t").unwrap_err();
        assert!(err.to_string().contains("angular"), "{err}");
    }

    #[test]
    fn numerically_equal_frequencies_are_duplicates() {
        let err = parse_param_table("[channel.params]\nple.UMi.LoS.6.75 = 1\nple.UMi.LoS.6.750 = 2\n", "t").unwrap_err();
        assert!(matches!(err, Error::DuplicateKey { line: 3, .. }), "{err}");
    }

    #[test]
    fn malformed_param_keys() {
        for bad in ["ple.UMi.LoS", "foo.UMi.LoS.7", "ple.Rural.LoS.7", "ple.UMi.LOS.7", "ple.UMi.LoS.-3"] {
            let text = format!("[channel.params]\n{bad} = 2\n");
            assert!(parse_param_table(&text, "t").is_err(), "{bad}");
        }
    }

    #[test]
    fn nearest_mode_tags_approximation() {
        let t = ChannelParamTable::shipped_defaults();
        let r = t.resolve(UMi, NLoS, 24.0, LookupMode::Nearest { span_ghz: None }).unwrap();
        assert!(r.approximate);
        assert_eq!(r.entry.freq_ghz, 28.0);
        let r = t
            .resolve(UMi, NLoS, 24.0, LookupMode::Nearest { span_ghz: Some((6.0, 24.25)) })
            .unwrap();
        assert_eq!(r.entry.freq_ghz, 16.95);
        let r = t.resolve(UMi, NLoS, 16.95, LookupMode::Nearest { span_ghz: None }).unwrap();
        assert!(!r.approximate);
        assert!(t.resolve(UMi, NLoS, 24.0, LookupMode::Exact).is_err());
    }

    #[test]
    fn carrier_band_invariants() {
        assert!(CarrierBand::new("a", 7.0, 100.0).is_ok());
        assert!(CarrierBand::new("a", 0.0, 100.0).is_err());
        assert!(CarrierBand::new("a", 7.0, 0.0).is_err());
        assert!(CarrierBand::new("a", 0.6, 400.0).is_err());
        assert!(CarrierBand::new("a", 99.9, 400.0).is_err());
        assert!(CarrierBand::with_validity("a", 24.0, 400.0, (7.125, 24.25)).is_ok());
        assert!(CarrierBand::with_validity("a", 24.1, 400.0, (7.125, 24.25)).is_err());
        assert!(CarrierBand::new("a,b", 7.0, 100.0).is_err());
    }

    #[test]
    fn materials_section() {
        let cfg: Config = "[materials]\nconcrete @ 16.95 = 30\nIRR glass @ 6.75 @ co = 20\n".parse().unwrap();
        let m = parse_materials(&cfg).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1].material, "IRR glass");
        assert_eq!(m[1].polarization, Polarization::Co);
        let cfg: Config = "[materials]\nconcrete @ 16.95 = -3\n".parse().unwrap();
        assert!(parse_materials(&cfg).is_err());
        let cfg: Config = "[materials]\nconcrete @ 16.95 = 3\nconcrete@16.950 = 4\n".parse().unwrap();
        assert!(matches!(parse_materials(&cfg), Err(Error::DuplicateKey { .. })));
    }

    #[test]
    fn fit_recovers_noiseless_exponent() {
        let f = 16.95;
        let anchor = fspl(f, 1.0).unwrap();
        let samples: Vec<(f64, f64)> = (1..50)
            .map(|i| {
                let d = 1.5 * i as f64;
                (d, anchor + 20.0 * d.log10())
            })
            .collect();
        let fit = fit_ple(&samples, f).unwrap();
        assert!((fit.ple - 2.0).abs() < 1e-9);
        assert!(fit.shadow_sigma < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_and_out_of_domain() {
        assert!(matches!(fit_ple(&[(10.0, 80.0), (10.0, 82.0)], 7.0), Err(Error::Degenerate(_))));
        assert!(matches!(fit_ple(&[(1.0, 80.0), (10.0, 82.0)], 7.0), Err(Error::Domain(_))));
        assert!(matches!(fit_ple(&[], 7.0), Err(Error::Degenerate(_))));
    }

    fn arb_entry() -> impl Strategy<Value = ChannelParamEntry> {
        (
            prop_oneof![Just(UMi), Just(InH), Just(InF)],
            prop_oneof![Just(LoS), Just(NLoS)],
            1u32..100_000,
            proptest::option::of(0.1f64..6.0),
            proptest::option::of(0.0f64..15.0),
            proptest::option::of(0.0f64..500.0),
            proptest::option::of(0.0f64..360.0),
        )
            .prop_filter_map("at least one field", |(env, vis, fk, ple, sig, ds, asa)| {
                if ple.is_none() && sig.is_none() && ds.is_none() && asa.is_none() {
                    return None;
                }
                Some(ChannelParamEntry {
                    environment: env,
                    visibility: vis,
                    freq_ghz: fk as f64 / 1000.0,
                    ple,
                    shadow_sigma: sig,
                    rms_ds: ds,
                    rms_asa: asa,
                })
            })
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(entries in proptest::collection::vec(arb_entry(), 0..20)) {
            let mut table = ChannelParamTable::empty("prop");
            for e in entries {
                // replace rather than overlay so the generated cell is the whole truth
                table.entries.insert(e.key(), e);
            }
            let again = parse_param_table(&table.to_config_string(), "prop").unwrap();
            prop_assert_eq!(table.entries, again.entries);
        }

        #[test]
        fn lookup_never_fabricates(fk in 1u32..100_000) {
            let f = fk as f64 / 1000.0;
            let t = ChannelParamTable::shipped_defaults();
            for env in [UMi, InH, InF] {
                for vis in [LoS, NLoS] {
                    let present = t.entries().any(|e| e.key() == ParamKey::new(env, vis, f));
                    prop_assert_eq!(t.lookup(env, vis, f).is_ok(), present);
                }
            }
        }

        /// Adding δ·10·log10(d_i) to every sample shifts the fitted exponent by exactly δ;
        /// at a single distance d this is the c / (10·log10 d) relation.
        #[test]
        fn fit_shift_is_exact(
            ds in proptest::collection::vec(1.5f64..1000.0, 2..40),
            noise in proptest::collection::vec(-8.0f64..8.0, 40),
            n in 1.0f64..4.0,
            delta in -1.0f64..1.0,
        ) {
            prop_assume!(ds.iter().any(|d| *d != ds[0]));
            let f = 7.0;
            let anchor = fspl(f, 1.0).unwrap();
            let base: Vec<(f64, f64)> = ds.iter().zip(&noise)
                .map(|(&d, &z)| (d, anchor + 10.0 * n * d.log10() + z)).collect();
            let shifted: Vec<(f64, f64)> = base.iter()
                .map(|&(d, pl)| (d, pl + delta * 10.0 * d.log10())).collect();
            let a = fit_ple(&base, f).unwrap();
            let b = fit_ple(&shifted, f).unwrap();
            prop_assert!((b.ple - a.ple - delta).abs() < 1e-9);
            prop_assert!((b.shadow_sigma - a.shadow_sigma).abs() < 1e-8);
        }
    }
}
