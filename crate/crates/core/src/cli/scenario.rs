//! Resolves scenario-file sections and flags into model inputs, recording
//! where every value came from.

use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ChannelArgs, ImpairmentArgs, LinkArgs};
use crate::agility::{BlockageEvent, BlockageLoss};
use crate::config::{Config, Section};
use crate::coverage::BandChannel;
use crate::error::{Error, Result};
use crate::link::{GainModel, GainModelKind, LinkConfig, TypicalGains};
use crate::params::{
    parse_materials, CarrierBand, ChannelParamTable, Environment, LookupMode, MaterialLossEntry, Visibility,
};
use crate::propagation::{
    monotonicity_warnings, FoliageSpec, Impairments, Obstruction, RainCoefficients, RainPolarization, RainSpec,
    RAIN_COEFFICIENTS_SECTION,
};

const SECTIONS: &[&str] = &[
    crate::params::PARAMS_SECTION,
    crate::params::MATERIALS_SECTION,
    RAIN_COEFFICIENTS_SECTION,
    "link",
    "gains.typical",
    "rain",
    "foliage",
    "obstructions",
    "bands",
    "blockage",
    "propagate",
    "budget",
    "scenario",
    "sensing",
    "hop",
    "fit",
];

const DEFAULT_NEAREST_SPAN_GHZ: (f64, f64) = (6.0, 24.25);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub name: String,
    pub value: String,
    pub source: String,
}

pub(super) struct Scenario {
    pub config: Config,
    pub provenance: Vec<Provenance>,
    table: ChannelParamTable,
    shipped: ChannelParamTable,
    materials: Vec<MaterialLossEntry>,
    rain_coefficients: RainCoefficients,
    rain_source: &'static str,
}

impl Scenario {
    pub fn new(config: Config) -> Result<Self> {
        if let Some(s) = config.sections().iter().find(|s| !SECTIONS.contains(&s.name.as_str())) {
            return Err(Error::invalid(
                format!("section [{}]", s.name),
                format!("unknown section (known: {})", SECTIONS.join(", ")),
            ));
        }
        let shipped = ChannelParamTable::shipped_defaults();
        let mut table = shipped.clone();
        table.apply_config(&config)?;
        let materials = parse_materials(&config)?;
        let mut rain_coefficients = RainCoefficients::itu_p838();
        rain_coefficients.apply_config(&config)?;
        let rain_source = if config.section(RAIN_COEFFICIENTS_SECTION).is_some() {
            "config [rain.coefficients]"
        } else {
            "ITU-R P.838-3 table"
        };
        let mut sc = Scenario {
            config,
            provenance: Vec::new(),
            table,
            shipped,
            materials,
            rain_coefficients,
            rain_source,
        };
        for w in monotonicity_warnings(&sc.materials) {
            sc.note("warning", w, "materials table");
        }
        Ok(sc)
    }

    pub fn note(&mut self, name: impl Into<String>, value: impl Display, source: impl Into<String>) {
        self.provenance.push(Provenance {
            name: name.into(),
            value: value.to_string(),
            source: source.into(),
        });
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.config.section(name)
    }

    pub fn allow_keys(&self, section: &str, keys: &[&str]) -> Result<()> {
        match self.section(section) {
            Some(s) => s.reject_unknown(keys),
            None => Ok(()),
        }
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<String> {
        self.section(section).and_then(|s| s.str(key)).map(String::from)
    }

    /// Flag, then `[section] key`, then `default`.
    pub fn parsed<T: FromStr + Display + Clone>(
        &mut self,
        section: &str,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T> {
        let (v, src) = match flag {
            Some(v) => (v, "flag"),
            None => match self.section(section).map(|s| s.parse::<T>(key)).transpose()?.flatten() {
                Some(v) => (v, "config"),
                None => (default, "tool default"),
            },
        };
        self.note(format!("{section}.{key}"), &v, src);
        Ok(v)
    }

    pub fn f64(&mut self, section: &str, key: &str, flag: Option<f64>, default: f64) -> Result<f64> {
        let v = self.parsed(section, key, flag, default)?;
        if !v.is_finite() {
            return Err(Error::invalid(format!("[{section}] {key}"), "value must be finite"));
        }
        Ok(v)
    }

    pub fn opt_f64(&mut self, section: &str, key: &str, flag: Option<f64>) -> Result<Option<f64>> {
        let v = match flag {
            Some(v) => Some((v, "flag")),
            None => self.section(section).map(|s| s.f64(key)).transpose()?.flatten().map(|v| (v, "config")),
        };
        if let Some((v, src)) = v {
            self.note(format!("{section}.{key}"), v, src);
        }
        Ok(v.map(|x| x.0))
    }

    pub fn required_f64(&mut self, section: &str, key: &str) -> Result<f64> {
        self.opt_f64(section, key, None)?
            .ok_or_else(|| Error::invalid(format!("[{section}] {key}"), "required key is missing"))
    }

    pub fn string(&mut self, section: &str, key: &str, flag: Option<String>, default: &str) -> Result<String> {
        self.parsed(section, key, flag, default.to_string())
    }

    pub fn list(&mut self, section: &str, key: &str, flag: &[f64], default: &[f64]) -> Result<Vec<f64>> {
        let (v, src) = if !flag.is_empty() {
            (flag.to_vec(), "flag")
        } else if let Some(e) = self.section(section).and_then(|s| s.get(key)) {
            (e.f64_list()?, "config")
        } else {
            (default.to_vec(), "tool default")
        };
        if v.is_empty() {
            return Err(Error::invalid(format!("[{section}] {key}"), "list is empty"));
        }
        let shown: Vec<String> = v.iter().map(f64::to_string).collect();
        self.note(format!("{section}.{key}"), shown.join(", "), src);
        Ok(v)
    }

    pub fn channel(
        &mut self,
        section: &str,
        args: &ChannelArgs,
        env: Environment,
        vis: Visibility,
        nearest_by_default: bool,
    ) -> Result<(Environment, Visibility, LookupMode)> {
        let env = self.parsed(section, "environment", args.env, env)?;
        let vis = self.parsed(section, "visibility", args.vis, vis)?;
        let default = if nearest_by_default { "nearest" } else { "exact" };
        let mode = match self.string(section, "lookup", args.lookup.clone(), default)?.as_str() {
            "exact" => LookupMode::Exact,
            "nearest" => {
                let (span, src) = match self.section(section).and_then(|s| s.get("nearest_span_ghz")) {
                    Some(e) => match e.f64_list()?.as_slice() {
                        [lo, hi] if lo < hi => (Some((*lo, *hi)), "config"),
                        _ => return Err(e.error("expected `<low GHz>, <high GHz>`")),
                    },
                    None if nearest_by_default => (Some(DEFAULT_NEAREST_SPAN_GHZ), "tool default"),
                    None => (None, "tool default"),
                };
                if let Some((lo, hi)) = span {
                    self.note(format!("{section}.nearest_span_ghz"), format!("{lo}, {hi}"), src);
                }
                LookupMode::Nearest { span_ghz: span }
            }
            other => {
                return Err(Error::invalid(format!("[{section}] lookup"), format!("`{other}` (expected exact or nearest)")))
            }
        };
        Ok((env, vis, mode))
    }

    fn param_source(&self, env: Environment, vis: Visibility, freq_ghz: f64, ple: f64) -> &'static str {
        match self.shipped.lookup(env, vis, freq_ghz) {
            Ok(e) if e.ple == Some(ple) => "shipped defaults",
            _ => "user config",
        }
    }

    /// `(ple, approximate)` for one carrier.
    pub fn resolve_param(&mut self, env: Environment, vis: Visibility, freq_ghz: f64, mode: LookupMode) -> Result<(f64, bool)> {
        let r = self.table.resolve(env, vis, freq_ghz, mode)?;
        let ple = r.entry.require_ple()?;
        let mut src = self.param_source(env, vis, r.entry.freq_ghz, ple).to_string();
        if r.approximate {
            src.push_str(&format!(", nearest cell {} GHz, approximate", r.entry.freq_ghz));
        }
        self.note(format!("ple.{env}.{vis}@{freq_ghz}"), ple, src);
        Ok((ple, r.approximate))
    }

    pub fn band_channels(
        &mut self,
        env: Environment,
        vis: Visibility,
        bands: &[CarrierBand],
        mode: LookupMode,
        default_sigma_db: f64,
    ) -> Result<Vec<BandChannel>> {
        let channels = BandChannel::resolve_all(&self.table, env, vis, bands, mode, default_sigma_db)?;
        for ch in &channels {
            let r = self.table.resolve(env, vis, ch.band.center_ghz, mode)?;
            let mut src = self.param_source(env, vis, r.entry.freq_ghz, ch.ple).to_string();
            if ch.approximate {
                src.push_str(&format!(", nearest cell {} GHz, approximate", r.entry.freq_ghz));
            }
            self.note(format!("ple@{}", ch.band.label), ch.ple, src);
            let sigma_src = if r.entry.shadow_sigma.is_some() { "user config" } else { "tool default" };
            self.note(format!("shadow_sigma_db@{}", ch.band.label), ch.shadow_sigma_db, sigma_src);
        }
        Ok(channels)
    }

    pub fn bands(&mut self, flag: &[String]) -> Result<Vec<CarrierBand>> {
        let (bands, src) = if !flag.is_empty() {
            (flag.iter().map(|s| parse_band(s)).collect::<Result<Vec<_>>>()?, "flag")
        } else if let Some(section) = self.section("bands") {
            let mut v = Vec::new();
            for e in &section.entries {
                match e.f64_list()?.as_slice() {
                    [c, bw] => v.push(CarrierBand::new(e.key.clone(), *c, *bw).map_err(|err| e.error(err))?),
                    _ => return Err(e.error("expected `<center GHz>, <bandwidth MHz>`")),
                }
            }
            (v, "config")
        } else {
            (CarrierBand::rate_coverage_plan(), "tool default")
        };
        if bands.is_empty() {
            return Err(Error::invalid("bands", "band plan is empty"));
        }
        for (i, b) in bands.iter().enumerate() {
            if bands[..i].iter().any(|o| o.label == b.label) {
                return Err(Error::invalid("bands", format!("duplicate label `{}`", b.label)));
            }
        }
        let shown: Vec<String> = bands
            .iter()
            .map(|b| format!("{}={}:{}", b.label, b.center_ghz, b.bandwidth_mhz))
            .collect();
        self.note("bands", shown.join(","), src);
        Ok(bands)
    }

    pub fn link(&mut self, args: &LinkArgs) -> Result<LinkConfig> {
        const S: &str = "link";
        self.allow_keys(S, &["tx_power_dbm", "noise_figure_db", "gain_model", "tx_gain_dbi", "rx_gain_dbi", "ref_ghz"])?;
        let tx = self.f64(S, "tx_power_dbm", args.tx_power, 43.0)?;
        let nf = self.f64(S, "noise_figure_db", args.noise_figure, 7.0)?;
        let kind: GainModelKind = self.string(S, "gain_model", args.gain_model.clone(), "equal_gain")?.parse()?;
        let model = match kind {
            GainModelKind::EqualGain => GainModel::EqualGain {
                tx_dbi: self.f64(S, "tx_gain_dbi", None, 0.0)?,
                rx_dbi: self.f64(S, "rx_gain_dbi", None, 0.0)?,
            },
            GainModelKind::EqualAperture => GainModel::EqualAperture {
                tx_ref_dbi: self.f64(S, "tx_gain_dbi", None, 0.0)?,
                rx_ref_dbi: self.f64(S, "rx_gain_dbi", None, 0.0)?,
                ref_ghz: self.f64(S, "ref_ghz", None, 7.0)?,
            },
            GainModelKind::Typical => GainModel::Typical(self.typical_gains()?),
        };
        LinkConfig::new(tx, model, nf)
    }

    fn typical_gains(&mut self) -> Result<TypicalGains> {
        let Some(section) = self.section("gains.typical") else {
            let g = TypicalGains::default();
            let shown: Vec<String> = g.anchors().iter().map(|(f, b, u)| format!("{f} GHz: {b}/{u} dBi")).collect();
            self.note("gains.typical", shown.join("; "), "shipped defaults");
            return Ok(g);
        };
        let mut anchors = Vec::new();
        for e in &section.entries {
            let f: f64 = e.key.parse().map_err(|_| e.error("key must be a frequency in GHz"))?;
            match e.f64_list()?.as_slice() {
                [bs, ue] => anchors.push((f, *bs, *ue)),
                _ => return Err(e.error("expected `<bs dBi>, <ue dBi>`")),
            }
        }
        let g = TypicalGains::new(anchors)?;
        let shown: Vec<String> = g.anchors().iter().map(|(f, b, u)| format!("{f} GHz: {b}/{u} dBi")).collect();
        self.note("gains.typical", shown.join("; "), "config");
        Ok(g)
    }

    pub fn impairments(&mut self, args: &ImpairmentArgs) -> Result<Impairments> {
        self.allow_keys("rain", &["rate_mm_hr", "polarization"])?;
        self.allow_keys("foliage", &["depth_m"])?;
        let mut imp = Impairments {
            materials: self.materials.clone(),
            ..Impairments::default()
        };
        if let Some(rate) = self.opt_f64("rain", "rate_mm_hr", args.rain)? {
            let pol: RainPolarization = self
                .string("rain", "polarization", args.polarization.clone(), "horizontal")?
                .parse()?;
            let source = self.rain_source;
            self.note("rain.coefficients", source, source);
            imp.rain = Some(RainSpec::with_coefficients(rate, pol, self.rain_coefficients.clone())?);
        }
        if let Some(depth) = self.opt_f64("foliage", "depth_m", args.foliage_depth)? {
            imp.foliage = Some(FoliageSpec::new(depth)?);
        }
        let mut obstructions = Vec::new();
        if !args.obstructions.is_empty() {
            for s in &args.obstructions {
                obstructions.push(parse_obstruction(s)?);
            }
            self.note("obstructions", args.obstructions.join(", "), "flag");
        } else if let Some(section) = self.section("obstructions") {
            let mut shown = Vec::new();
            for e in &section.entries {
                let o = Obstruction::new(e.key.clone());
                obstructions.push(if e.value == "all" { o } else { o.above(e.f64()?) });
                shown.push(format!("{}@{}", e.key, e.value));
            }
            self.note("obstructions", shown.join(", "), "config");
        }
        imp.obstructions = obstructions;
        Ok(imp)
    }

    /// `[blockage]`: `<name> = <start s>, <end s>, <band|band...>, <loss dB or material>`.
    pub fn blockages(&mut self) -> Result<Vec<BlockageEvent>> {
        let Some(section) = self.section("blockage") else {
            self.note("blockage", "none", "tool default");
            return Ok(Vec::new());
        };
        let mut events = Vec::new();
        for e in &section.entries {
            let items: Vec<&str> = e.list().collect();
            let [start, end, bands, loss] = items.as_slice() else {
                return Err(e.error("expected `<start s>, <end s>, <band|band...>, <loss dB or material>`"));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| e.error(format!("`{s}` is not a number")));
            let loss = match loss.parse::<f64>() {
                Ok(db) => BlockageLoss::Db(db),
                Err(_) => BlockageLoss::Material(loss.to_string()),
            };
            let bands = bands.split('|').map(|b| b.trim().to_string()).collect();
            events.push(BlockageEvent::new(num(start)?, num(end)?, bands, loss).map_err(|err| e.error(err))?);
        }
        self.note("blockage", format!("{} event(s)", events.len()), "config");
        Ok(events)
    }
}

/// `label=center_ghz:bandwidth_mhz` or `center_ghz:bandwidth_mhz` (label `<center>GHz`).
pub(super) fn parse_band(s: &str) -> Result<CarrierBand> {
    let bad = || Error::invalid("band", format!("`{s}` (expected [label=]center_ghz:bandwidth_mhz)"));
    let (label, spec) = match s.split_once('=') {
        Some((l, rest)) => (Some(l.trim()), rest),
        None => (None, s),
    };
    let (c, bw) = spec.split_once(':').ok_or_else(bad)?;
    let c: f64 = c.trim().parse().map_err(|_| bad())?;
    let bw: f64 = bw.trim().parse().map_err(|_| bad())?;
    let label = label.map(String::from).unwrap_or_else(|| format!("{c}GHz"));
    CarrierBand::new(label, c, bw)
}

fn parse_obstruction(s: &str) -> Result<Obstruction> {
    match s.split_once('@') {
        None => Ok(Obstruction::new(s.trim())),
        Some((m, f)) => {
            let f: f64 = f
                .trim()
                .parse()
                .map_err(|_| Error::invalid("obstruction", format!("`{s}` (expected material[@GHz])")))?;
            Ok(Obstruction::new(m.trim()).above(f))
        }
    }
}
