//! Band selection and frequency hopping under blockage.
//!
//! Rates are deterministic here: each band's loss is the CI path loss at the
//! context distance (no shadowing draw) plus impairments plus any blockage
//! active at that instant.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coverage::BandChannel;
use crate::error::{Error, Result};
use crate::link::{coherence_time, shannon_rate, snr, GainModel, GainModelKind, LinkConfig, TypicalGains};
use crate::params::MaterialLossEntry;
use crate::propagation::{ci_path_loss, penetration_loss, Impairments};

pub const DEFAULT_HYSTERESIS_MARGIN_DB: f64 = 3.0;
pub const DEFAULT_MIN_DWELL_S: f64 = 0.010;

/// Where the link is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkContext {
    pub distance_m: f64,
    pub impairments: Impairments,
}

impl LinkContext {
    pub fn new(distance_m: f64) -> Self {
        LinkContext {
            distance_m,
            impairments: Impairments::default(),
        }
    }

    fn base_loss(&self, ch: &BandChannel) -> Result<f64> {
        let f = ch.band.center_ghz;
        Ok(ci_path_loss(f, self.distance_m, ch.ple, 0.0)? + self.impairments.loss(f, self.distance_m)?)
    }
}

fn rate_for(ch: &BandChannel, link: &LinkConfig, loss_db: f64) -> f64 {
    let b = ch.band.bandwidth_mhz;
    shannon_rate(b, snr(link, ch.band.center_ghz, b, loss_db))
}

/// Instantaneous Shannon rate of every band, Mbps.
pub fn band_rates(bands: &[BandChannel], ctx: &LinkContext, link: &LinkConfig) -> Result<Vec<f64>> {
    bands
        .iter()
        .map(|ch| Ok(rate_for(ch, link, ctx.base_loss(ch)?)))
        .collect()
}

/// Highest rate; ties go to the lower carrier.
fn argmax(bands: &[BandChannel], rates: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..bands.len() {
        let better = rates[i] > rates[best]
            || (rates[i] == rates[best] && bands[i].band.center_ghz < bands[best].band.center_ghz);
        if better {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    MaxRate,
    /// Lowest carrier that sustains the given rate (Mbps).
    MinRateGuarantee(f64),
}

pub fn select_band(bands: &[BandChannel], ctx: &LinkContext, link: &LinkConfig, objective: Objective) -> Result<String> {
    if bands.is_empty() {
        return Err(Error::invalid("band selection", "no candidate bands"));
    }
    let rates = band_rates(bands, ctx, link)?;
    let best = argmax(bands, &rates);
    match objective {
        Objective::MaxRate => Ok(bands[best].band.label.clone()),
        Objective::MinRateGuarantee(required) => {
            let mut order: Vec<usize> = (0..bands.len()).collect();
            order.sort_by(|&a, &b| bands[a].band.center_ghz.total_cmp(&bands[b].band.center_ghz));
            order
                .into_iter()
                .find(|&i| rates[i] >= required)
                .map(|i| bands[i].band.label.clone())
                .ok_or_else(|| Error::Infeasible {
                    required_mbps: required,
                    best_band: bands[best].band.label.clone(),
                    best_mbps: rates[best],
                })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BlockageLoss {
    Db(f64),
    /// Resolved through the penetration table at each band's carrier.
    Material(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockageEvent {
    pub start_s: f64,
    pub end_s: f64,
    pub affected_bands: Vec<String>,
    pub loss: BlockageLoss,
}

impl BlockageEvent {
    pub fn new(start_s: f64, end_s: f64, affected_bands: Vec<String>, loss: BlockageLoss) -> Result<Self> {
        if !(start_s < end_s) {
            return Err(Error::invalid("blockage", format!("start {start_s} s must precede end {end_s} s")));
        }
        if let BlockageLoss::Db(db) = loss {
            if !(db >= 0.0) {
                return Err(Error::invalid("blockage", format!("added loss {db} dB must be >= 0")));
            }
        }
        Ok(BlockageEvent {
            start_s,
            end_s,
            affected_bands,
            loss,
        })
    }

    pub fn active_at(&self, t_s: f64) -> bool {
        self.start_s <= t_s && t_s < self.end_s
    }

    fn loss_for(&self, ch: &BandChannel, materials: &[MaterialLossEntry]) -> Result<f64> {
        match &self.loss {
            BlockageLoss::Db(db) => Ok(*db),
            BlockageLoss::Material(m) => penetration_loss(materials, m, ch.band.center_ghz),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HopPolicy {
    Static(String),
    GreedyRate,
    /// Switch only when the best band beats the serving band by `margin_db`
    /// (rate ratio) and the serving band has been held for `min_dwell_s`.
    Hysteresis { margin_db: f64, min_dwell_s: f64 },
}

impl HopPolicy {
    pub fn hysteresis_default() -> Self {
        HopPolicy::Hysteresis {
            margin_db: DEFAULT_HYSTERESIS_MARGIN_DB,
            min_dwell_s: DEFAULT_MIN_DWELL_S,
        }
    }

    fn validate(&self) -> Result<()> {
        if let HopPolicy::Hysteresis { margin_db, min_dwell_s } = self {
            if !(*margin_db >= 0.0 && *min_dwell_s >= 0.0) {
                return Err(Error::invalid("hysteresis policy", "margin and min_dwell must be >= 0"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for HopPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HopPolicy::Static(b) => write!(f, "static:{b}"),
            HopPolicy::GreedyRate => f.write_str("greedy"),
            HopPolicy::Hysteresis { margin_db, min_dwell_s } => write!(f, "hysteresis:{margin_db}:{min_dwell_s}"),
        }
    }
}

/// `static:<band>`, `greedy`, `hysteresis`, or `hysteresis:<margin dB>:<min dwell s>`.
impl FromStr for HopPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("hop policy", format!("`{s}`"));
        let mut parts = s.split(':');
        let policy = match (parts.next(), parts.next(), parts.next()) {
            (Some("greedy"), None, None) => HopPolicy::GreedyRate,
            (Some("static"), Some(band), None) if !band.is_empty() => HopPolicy::Static(band.to_string()),
            (Some("hysteresis"), None, None) => HopPolicy::hysteresis_default(),
            (Some("hysteresis"), Some(m), Some(d)) => HopPolicy::Hysteresis {
                margin_db: m.parse().map_err(|_| bad())?,
                min_dwell_s: d.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        policy.validate()?;
        Ok(policy)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFlags {
    pub hop: bool,
    pub blocked: bool,
    /// The dwell that just ended was shorter than that band's coherence time.
    pub ce_limited: bool,
}

impl fmt::Display for StepFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [(self.hop, "hop"), (self.blocked, "blocked"), (self.ce_limited, "ce_limited")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect();
        f.write_str(&names.join("|"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t_s: f64,
    pub band: String,
    pub rate_mbps: f64,
    pub flags: StepFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopTrace {
    pub samples: Vec<TraceSample>,
    pub mean_rate_mbps: f64,
    pub hops: usize,
}

impl HopTrace {
    /// `t_s,band,rate_mbps,flags`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_s", "band", "rate_mbps", "flags"])?;
        for s in &self.samples {
            w.write_record([s.t_s.to_string(), s.band.clone(), s.rate_mbps.to_string(), s.flags.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("trace csv", e))?;
        Ok(())
    }
}

/// Everything a hopping run needs besides the policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopFixture {
    pub timeline: Vec<BlockageEvent>,
    pub horizon_s: f64,
    pub step_s: f64,
    pub bands: Vec<BandChannel>,
    pub context: LinkContext,
    pub link: LinkConfig,
    pub speed_mps: f64,
}

impl HopFixture {
    fn validate(&self) -> Result<()> {
        if !(self.step_s > 0.0 && self.horizon_s >= self.step_s) {
            return Err(Error::invalid(
                "hop timing",
                format!("need step > 0 and horizon >= step (got {} / {})", self.step_s, self.horizon_s),
            ));
        }
        if self.bands.is_empty() {
            return Err(Error::invalid("hop", "no bands"));
        }
        if !(self.speed_mps >= 0.0) {
            return Err(Error::invalid("hop", format!("speed {} m/s must be >= 0", self.speed_mps)));
        }
        for ev in &self.timeline {
            if let Some(b) = ev.affected_bands.iter().find(|b| !self.bands.iter().any(|c| &c.band.label == *b)) {
                return Err(Error::UnknownBand(b.clone()));
            }
        }
        Ok(())
    }

    fn step_count(&self) -> usize {
        (self.horizon_s / self.step_s + 1e-9).floor() as usize
    }

    /// Per-step, per-band `(rate, blocked)`.
    fn rate_grid(&self, link: &LinkConfig) -> Result<Vec<Vec<(f64, bool)>>> {
        let base: Vec<f64> = self
            .bands
            .iter()
            .map(|ch| self.context.base_loss(ch))
            .collect::<Result<_>>()?;
        (0..self.step_count())
            .map(|i| {
                let t = i as f64 * self.step_s;
                self.bands
                    .iter()
                    .zip(&base)
                    .map(|(ch, &loss)| {
                        let mut extra = 0.0;
                        let mut blocked = false;
                        for ev in self.timeline.iter().filter(|e| e.active_at(t)) {
                            if ev.affected_bands.contains(&ch.band.label) {
                                extra += ev.loss_for(ch, &self.context.impairments.materials)?;
                                blocked = true;
                            }
                        }
                        Ok((rate_for(ch, link, loss + extra), blocked))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Steps through `[0, horizon)` and lets `policy` pick the serving band.
pub fn simulate_hopping(fixture: &HopFixture, policy: &HopPolicy) -> Result<HopTrace> {
    simulate_with_link(fixture, policy, &fixture.link)
}

fn simulate_with_link(fixture: &HopFixture, policy: &HopPolicy, link: &LinkConfig) -> Result<HopTrace> {
    fixture.validate()?;
    policy.validate()?;
    let bands = &fixture.bands;
    let grid = fixture.rate_grid(link)?;
    let fixed = match policy {
        HopPolicy::Static(label) => Some(
            bands
                .iter()
                .position(|c| &c.band.label == label)
                .ok_or_else(|| Error::UnknownBand(label.clone()))?,
        ),
        _ => None,
    };
    let coherence: Vec<Option<f64>> = bands
        .iter()
        .map(|c| Ok(coherence_time(c.band.center_ghz, fixture.speed_mps)?.seconds()))
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(grid.len());
    let mut current: Option<usize> = None;
    let mut dwell_start = 0.0;
    let mut hops = 0;
    for (i, row) in grid.iter().enumerate() {
        let t = i as f64 * fixture.step_s;
        let rates: Vec<f64> = row.iter().map(|r| r.0).collect();
        let best = argmax(bands, &rates);
        let next = match (policy, current) {
            (HopPolicy::Static(_), _) => fixed.unwrap(),
            (_, None) => best,
            (HopPolicy::GreedyRate, Some(_)) => best,
            (HopPolicy::Hysteresis { margin_db, min_dwell_s }, Some(cur)) => {
                let ratio = 10f64.powf(margin_db / 10.0);
                let dwell_ok = t - dwell_start >= min_dwell_s - 1e-12;
                if best != cur && rates[best] > rates[cur] * ratio && dwell_ok {
                    best
                } else {
                    cur
                }
            }
        };
        let mut flags = StepFlags {
            blocked: row[next].1,
            ..StepFlags::default()
        };
        if let Some(prev) = current.filter(|&p| p != next) {
            hops += 1;
            flags.hop = true;
            flags.ce_limited = coherence[prev].is_some_and(|tc| t - dwell_start < tc);
            dwell_start = t;
        }
        current = Some(next);
        samples.push(TraceSample {
            t_s: t,
            band: bands[next].band.label.clone(),
            rate_mbps: rates[next],
            flags,
        });
    }
    let mean_rate_mbps = samples.iter().map(|s| s.rate_mbps).sum::<f64>() / samples.len() as f64;
    Ok(HopTrace {
        samples,
        mean_rate_mbps,
        hops,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRow {
    pub gain_model: GainModelKind,
    pub policy: String,
    pub mean_rate_mbps: f64,
    pub hops: usize,
}

/// Runs every policy under an equal-gain model and under typical BS/UE gains.
///
/// The equal-gain run keeps the fixture's gains when its link already uses
/// equal gains, otherwise it uses isotropic antennas. The typical run uses the
/// fixture's anchors when it already uses them, otherwise the defaults.
pub fn compare_policies(fixture: &HopFixture, policies: &[HopPolicy]) -> Result<Vec<PolicyRow>> {
    let equal = match &fixture.link.gain_model {
        g @ GainModel::EqualGain { .. } => g.clone(),
        _ => GainModel::EqualGain {
            tx_dbi: 0.0,
            rx_dbi: 0.0,
        },
    };
    let typical = match &fixture.link.gain_model {
        g @ GainModel::Typical(_) => g.clone(),
        _ => GainModel::Typical(TypicalGains::default()),
    };
    compare_policies_with(fixture, policies, &[equal, typical])
}

pub fn compare_policies_with(fixture: &HopFixture, policies: &[HopPolicy], models: &[GainModel]) -> Result<Vec<PolicyRow>> {
    if policies.is_empty() {
        return Err(Error::invalid("policy comparison", "at least one policy is required"));
    }
    let mut rows = Vec::with_capacity(policies.len() * models.len());
    for model in models {
        let link = fixture.link.with_gain_model(model.clone());
        for p in policies {
            let trace = simulate_with_link(fixture, p, &link)?;
            rows.push(PolicyRow {
                gain_model: model.kind(),
                policy: p.to_string(),
                mean_rate_mbps: trace.mean_rate_mbps,
                hops: trace.hops,
            });
        }
    }
    Ok(rows)
}

/// `gain_model,policy,mean_rate_mbps,hops`
pub fn write_policy_csv<W: Write>(rows: &[PolicyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gain_model", "policy", "mean_rate_mbps", "hops"])?;
    for r in rows {
        w.write_record([
            r.gain_model.to_string(),
            r.policy.clone(),
            r.mean_rate_mbps.to_string(),
            r.hops.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("policy csv", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CarrierBand;
    use crate::propagation::Obstruction;
    use proptest::prelude::*;

    fn ch(label: &str, f: f64, bw: f64, ple: f64) -> BandChannel {
        BandChannel::new(CarrierBand::new(label, f, bw).unwrap(), ple, 0.0).unwrap()
    }

    fn paper_plan(ple: f64) -> Vec<BandChannel> {
        CarrierBand::rate_coverage_plan()
            .into_iter()
            .map(|b| BandChannel::new(b, ple, 0.0).unwrap())
            .collect()
    }

    fn fixture(bands: Vec<BandChannel>, timeline: Vec<BlockageEvent>) -> HopFixture {
        HopFixture {
            timeline,
            horizon_s: 1.0,
            step_s: 0.01,
            bands,
            context: LinkContext::new(150.0),
            link: LinkConfig::default(),
            speed_mps: 3.0,
        }
    }

    #[test]
    fn selection_basics() {
        let link = LinkConfig::default();
        let ctx = LinkContext::new(100.0);
        let one = vec![ch("a", 10.0, 100.0, 2.0)];
        assert_eq!(select_band(&one, &ctx, &link, Objective::MaxRate).unwrap(), "a");
        assert!(select_band(&[], &ctx, &link, Objective::MaxRate).is_err());
    }

    #[test]
    fn exact_ties_go_to_the_lower_carrier() {
        let bands = vec![ch("b", 14.0, 100.0, 2.0), ch("a", 7.0, 100.0, 2.0)];
        assert_eq!(argmax(&bands, &[5.0, 5.0]), 1);
    }

    #[test]
    fn wide_band_wins_short_los_and_concrete_flips_it() {
        let link = LinkConfig::default();
        let bands = paper_plan(1.85);
        let mut ctx = LinkContext::new(20.0);
        assert_eq!(select_band(&bands, &ctx, &link, Objective::MaxRate).unwrap(), "24GHz");
        ctx.impairments.materials = bands
            .iter()
            .map(|b| MaterialLossEntry::new("concrete", b.band.center_ghz, 60.0).unwrap())
            .collect();
        ctx.impairments.obstructions = vec![Obstruction::new("concrete").above(10.0)];
        assert_eq!(select_band(&bands, &ctx, &link, Objective::MaxRate).unwrap(), "7GHz");
    }

    #[test]
    fn guarantee_picks_lowest_feasible_or_reports_best() {
        let link = LinkConfig::default();
        let bands = paper_plan(1.85);
        let ctx = LinkContext::new(50.0);
        let rates = band_rates(&bands, &ctx, &link).unwrap();
        let need = rates[0] + 1.0;
        let pick = select_band(&bands, &ctx, &link, Objective::MinRateGuarantee(need)).unwrap();
        assert_ne!(pick, "7GHz");
        let err = select_band(&bands, &ctx, &link, Objective::MinRateGuarantee(1e9)).unwrap_err();
        match err {
            Error::Infeasible { best_band, best_mbps, .. } => {
                assert_eq!(best_band, "24GHz");
                assert!((best_mbps - rates[3]).abs() < 1e-9);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn greedy_without_blockage_is_constant() {
        let f = fixture(paper_plan(2.59), vec![]);
        let pick = select_band(&f.bands, &f.context, &f.link, Objective::MaxRate).unwrap();
        let trace = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
        assert_eq!(trace.samples.len(), 100);
        assert!(trace.samples.iter().all(|s| s.band == pick));
        assert_eq!(trace.hops, 0);
    }

    #[test]
    fn greedy_dodges_blockage() {
        let bands = vec![ch("low", 7.0, 100.0, 2.0), ch("high", 14.0, 200.0, 2.0)];
        let ctx = LinkContext::new(150.0);
        let link = LinkConfig::default();
        let rates = band_rates(&bands, &ctx, &link).unwrap();
        assert!(rates[1] > rates[0], "{rates:?}");
        let ev = BlockageEvent::new(0.2, 0.6, vec!["high".into()], BlockageLoss::Db(30.0)).unwrap();
        let f = fixture(bands, vec![ev]);
        let greedy = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
        let stat = simulate_hopping(&f, &HopPolicy::Static("high".into())).unwrap();
        assert!(greedy.mean_rate_mbps > stat.mean_rate_mbps);
        assert_eq!(greedy.hops, 2);
        let hop = greedy.samples.iter().find(|s| s.flags.hop).unwrap();
        assert!((hop.t_s - 0.2).abs() < 1e-9);
        assert_eq!(hop.band, "low");
        assert!(stat.samples.iter().filter(|s| s.flags.blocked).count() == 40);

        // hand-computed: 40 steps on the blocked-free low band, 60 on high
        let expected = (40.0 * rates[0] + 60.0 * rates[1]) / 100.0;
        assert!((greedy.mean_rate_mbps - expected).abs() < 1e-9);
    }

    #[test]
    fn material_blockage_resolves_through_table() {
        let bands = vec![ch("low", 7.0, 100.0, 2.0), ch("high", 14.0, 200.0, 2.0)];
        let ev = BlockageEvent::new(0.0, 1.0, vec!["high".into()], BlockageLoss::Material("glass".into())).unwrap();
        let mut f = fixture(bands, vec![ev]);
        assert!(matches!(simulate_hopping(&f, &HopPolicy::GreedyRate), Err(Error::MissingMaterial { .. })));
        f.context.impairments.materials = vec![MaterialLossEntry::new("glass", 14.0, 40.0).unwrap()];
        let trace = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
        assert!(trace.samples.iter().all(|s| s.band == "low"));
    }

    #[test]
    fn min_dwell_equal_to_horizon_allows_at_most_one_hop() {
        let bands = vec![ch("low", 7.0, 100.0, 2.0), ch("high", 14.0, 200.0, 2.0)];
        let evs = vec![
            BlockageEvent::new(0.1, 0.3, vec!["high".into()], BlockageLoss::Db(40.0)).unwrap(),
            BlockageEvent::new(0.5, 0.7, vec!["high".into()], BlockageLoss::Db(40.0)).unwrap(),
        ];
        let f = fixture(bands, evs);
        let p = HopPolicy::Hysteresis {
            margin_db: 0.0,
            min_dwell_s: f.horizon_s,
        };
        assert!(simulate_hopping(&f, &p).unwrap().hops <= 1);
        assert_eq!(simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap().hops, 4);
    }

    #[test]
    fn coherence_flag_marks_short_dwells() {
        let bands = vec![ch("low", 7.0, 100.0, 2.0), ch("high", 14.0, 200.0, 2.0)];
        let ev = BlockageEvent::new(0.0, 0.01, vec!["high".into()], BlockageLoss::Db(40.0)).unwrap();
        let mut f = fixture(bands, vec![ev]);
        // walking pace: coherence time at 7 GHz is ~12 ms, so a 10 ms dwell is too short
        f.speed_mps = 1.5;
        let trace = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
        let hop = trace.samples.iter().find(|s| s.flags.hop).unwrap();
        assert!(hop.flags.ce_limited);
        f.speed_mps = 30.0;
        let trace = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
        assert!(trace.samples.iter().all(|s| !s.flags.ce_limited));
        f.speed_mps = 0.0;
        let trace = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
        assert!(trace.samples.iter().all(|s| !s.flags.ce_limited));
    }

    #[test]
    fn config_errors() {
        let mut f = fixture(paper_plan(2.0), vec![]);
        assert!(matches!(
            simulate_hopping(&f, &HopPolicy::Static("nope".into())),
            Err(Error::UnknownBand(_))
        ));
        f.step_s = 0.0;
        assert!(simulate_hopping(&f, &HopPolicy::GreedyRate).is_err());
        assert!(BlockageEvent::new(1.0, 1.0, vec![], BlockageLoss::Db(1.0)).is_err());
        assert!(BlockageEvent::new(0.0, 1.0, vec![], BlockageLoss::Db(-1.0)).is_err());
        let f = fixture(
            paper_plan(2.0),
            vec![BlockageEvent::new(0.0, 1.0, vec!["zzz".into()], BlockageLoss::Db(1.0)).unwrap()],
        );
        assert!(matches!(simulate_hopping(&f, &HopPolicy::GreedyRate), Err(Error::UnknownBand(_))));
    }

    #[test]
    fn policy_strings_round_trip() {
        for p in [
            HopPolicy::GreedyRate,
            HopPolicy::Static("7GHz".into()),
            HopPolicy::Hysteresis {
                margin_db: 1.5,
                min_dwell_s: 0.02,
            },
        ] {
            assert_eq!(p.to_string().parse::<HopPolicy>().unwrap(), p);
        }
        assert_eq!("hysteresis".parse::<HopPolicy>().unwrap(), HopPolicy::hysteresis_default());
        for bad in ["", "static", "static:", "greedy:1", "hysteresis:1", "hysteresis:-1:0", "hysteresis:a:b"] {
            assert!(bad.parse::<HopPolicy>().is_err(), "{bad}");
        }
    }

    #[test]
    fn single_static_policy_table() {
        let f = fixture(paper_plan(2.0), vec![]);
        let rows = compare_policies_with(&f, &[HopPolicy::Static("7GHz".into())], std::slice::from_ref(&f.link.gain_model)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].hops, 0);
        assert!(compare_policies(&f, &[]).is_err());
    }

    #[test]
    fn typical_gains_widen_the_high_band_lead() {
        let bands = vec![ch("7GHz", 7.0, 100.0, 2.59), ch("24GHz", 24.0, 400.0, 2.59)];
        let f = fixture(bands, vec![]);
        let policies = [HopPolicy::Static("7GHz".into()), HopPolicy::Static("24GHz".into())];
        let rows = compare_policies(&f, &policies).unwrap();
        let gap = |kind| {
            let r: Vec<&PolicyRow> = rows.iter().filter(|r| r.gain_model == kind).collect();
            r[1].mean_rate_mbps - r[0].mean_rate_mbps
        };
        assert!(gap(GainModelKind::Typical) > gap(GainModelKind::EqualGain));
    }

    fn small_fixture() -> impl Strategy<Value = HopFixture> {
        let band = (1usize..5, 1.5f64..3.5);
        let event = (0usize..20, 1usize..10, 0usize..3, 0.0f64..50.0);
        (
            proptest::collection::vec(band, 2..4),
            proptest::collection::vec(event, 0..5),
            20.0f64..400.0,
        )
            .prop_map(|(specs, events, distance)| {
                let bands: Vec<BandChannel> = specs
                    .iter()
                    .enumerate()
                    .map(|(i, (bwk, ple))| ch(&format!("b{i}"), 7.0 + 6.0 * i as f64, 100.0 * *bwk as f64, *ple))
                    .collect();
                let n = bands.len();
                let timeline = events
                    .into_iter()
                    .map(|(s, len, b, loss)| {
                        let start = s as f64 * 0.01;
                        BlockageEvent::new(start, start + len as f64 * 0.01, vec![format!("b{}", b % n)], BlockageLoss::Db(loss))
                            .unwrap()
                    })
                    .collect();
                HopFixture {
                    timeline,
                    horizon_s: 0.2,
                    step_s: 0.01,
                    bands,
                    context: LinkContext::new(distance),
                    link: LinkConfig::default(),
                    speed_mps: 10.0,
                }
            })
    }

    proptest! {
        #[test]
        fn greedy_is_pointwise_max(f in small_fixture()) {
            let grid = f.rate_grid(&f.link).unwrap();
            let trace = simulate_hopping(&f, &HopPolicy::GreedyRate).unwrap();
            for (s, row) in trace.samples.iter().zip(&grid) {
                let max = row.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(s.rate_mbps, max);
            }
            for b in &f.bands {
                let st = simulate_hopping(&f, &HopPolicy::Static(b.band.label.clone())).unwrap();
                prop_assert!(trace.mean_rate_mbps >= st.mean_rate_mbps - 1e-9);
            }
        }

        #[test]
        fn deterministic(f in small_fixture()) {
            let p = HopPolicy::hysteresis_default();
            prop_assert_eq!(simulate_hopping(&f, &p).unwrap(), simulate_hopping(&f, &p).unwrap());
        }

        #[test]
        fn hop_count_nonincreasing_in_margin(f in small_fixture(), m in 0.0f64..6.0, dm in 0.0f64..6.0) {
            prop_assume!(f.bands.len() == 2);
            let a = simulate_hopping(&f, &HopPolicy::Hysteresis { margin_db: m, min_dwell_s: 0.0 }).unwrap();
            let b = simulate_hopping(&f, &HopPolicy::Hysteresis { margin_db: m + dm, min_dwell_s: 0.0 }).unwrap();
            prop_assert!(b.hops <= a.hops, "{} > {}", b.hops, a.hops);
        }

        #[test]
        fn hop_count_nonincreasing_in_dwell(f in small_fixture(), d in 0usize..10, dd in 0usize..10) {
            prop_assume!(f.bands.len() == 2);
            let p = |steps: usize| HopPolicy::Hysteresis { margin_db: 0.0, min_dwell_s: steps as f64 * 0.01 };
            let a = simulate_hopping(&f, &p(d)).unwrap();
            let b = simulate_hopping(&f, &p(d + dd)).unwrap();
            prop_assert!(b.hops <= a.hops, "{} > {}", b.hops, a.hops);
        }
    }
}
