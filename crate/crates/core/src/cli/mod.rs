//! `fr3sim` command line.
//!
//! Every subcommand reads an optional scenario file (`--config`), applies the
//! flags on top, computes its outputs in memory and then writes them into
//! `--out` next to a `manifest.json` that can be replayed.

mod scenario;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::agility::{compare_policies, simulate_hopping, write_policy_csv, HopFixture, HopPolicy, LinkContext};
use crate::config::Config;
use crate::coverage::{run_rate_coverage, run_rate_coverage_with_workers, DropScenario};
use crate::error::{Error, Result};
use crate::link::{coherence_time, noise_power, pn_snr_loss, shannon_rate, snr, CoherenceTime};
use crate::params::{fit_ple, Environment, Visibility};
use crate::propagation::{cif_path_loss, ci_path_loss, fspl, rain_attenuation};
use crate::sensing::{sweep_plan, write_sweep_csv, Combining, SensingPlan, SpectralShape, SubBand};

use scenario::{Provenance, Scenario};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Parser)]
#[command(name = "fr3sim", version, about = "Upper mid-band channel, link, coverage, sensing and hopping analysis")]
pub struct Cli {
    /// Scenario file (INI-style sections, `key = value`).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true, value_name = "U64", default_value_t = 1)]
    pub seed: u64,

    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "fr3sim-out")]
    pub out: PathBuf,

    /// Worker threads for parallel stages; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
pub enum Command {
    /// Path loss and excess losses over a frequency × distance grid.
    Propagate(PropagateArgs),
    /// Per-band link budget: SNR, Shannon rate, coherence time.
    Budget(BudgetArgs),
    /// Monte Carlo rate-coverage curves and band crossovers.
    RateCoverage(RateCoverageArgs),
    /// Delay CRB and range accuracy over a bandwidth-scaling sweep.
    Sensing(SensingArgs),
    /// Band-hopping policy comparison under blockage.
    Hop(HopArgs),
    /// Fit a CI path-loss exponent to measured samples.
    FitPle(FitArgs),
    /// Re-run a previous manifest into --out.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Propagate(_) => "propagate",
            Command::Budget(_) => "budget",
            Command::RateCoverage(_) => "rate-coverage",
            Command::Sensing(_) => "sensing",
            Command::Hop(_) => "hop",
            Command::FitPle(_) => "fit-ple",
            Command::Replay(_) => "replay",
        }
    }
}

/// Channel-parameter selection shared by several subcommands.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ChannelArgs {
    /// Environment: UMi, InH or InF.
    #[arg(long, value_name = "ENV")]
    pub env: Option<Environment>,

    /// LoS or NLoS.
    #[arg(long, value_name = "VIS")]
    pub vis: Option<Visibility>,

    /// `exact`, or `nearest` to borrow the closest measured frequency (tagged approximate).
    #[arg(long, value_name = "MODE")]
    pub lookup: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ImpairmentArgs {
    /// Rain rate, mm/hr.
    #[arg(long, value_name = "MM_HR")]
    pub rain: Option<f64>,

    /// Rain polarization: horizontal or vertical.
    #[arg(long, value_name = "POL")]
    pub polarization: Option<String>,

    /// Foliage depth along the path, m.
    #[arg(long, value_name = "M")]
    pub foliage_depth: Option<f64>,

    /// Obstructing material, optionally only above a frequency: `concrete` or `concrete@10`.
    #[arg(long = "obstruction", value_name = "MATERIAL[@GHZ]")]
    pub obstructions: Vec<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct LinkArgs {
    /// equal_gain, equal_aperture or typical.
    #[arg(long, value_name = "MODEL")]
    pub gain_model: Option<String>,

    /// Transmit power, dBm.
    #[arg(long, value_name = "DBM")]
    pub tx_power: Option<f64>,

    /// Receiver noise figure, dB.
    #[arg(long, value_name = "DB")]
    pub noise_figure: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub impairments: ImpairmentArgs,

    /// Carrier frequencies, GHz (comma-separated).
    #[arg(long = "freq", value_name = "GHZ", value_delimiter = ',')]
    pub freqs: Vec<f64>,

    /// Link distances, m (comma-separated).
    #[arg(long = "distance", value_name = "M", value_delimiter = ',')]
    pub distances: Vec<f64>,

    /// `ci` or `cif`.
    #[arg(long, value_name = "MODEL")]
    pub model: Option<String>,

    /// Fixed rain path length, km (default: the link distance).
    #[arg(long, value_name = "KM")]
    pub length_km: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BudgetArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub impairments: ImpairmentArgs,
    #[command(flatten)]
    pub link: LinkArgs,

    /// Band plan: `label=center_ghz:bandwidth_mhz` or `center_ghz:bandwidth_mhz`, comma-separated.
    #[arg(long, value_name = "PLAN", value_delimiter = ',')]
    pub bands: Vec<String>,

    /// Link distance, m.
    #[arg(long, value_name = "M")]
    pub distance: Option<f64>,

    /// UE speed for coherence time, m/s.
    #[arg(long, value_name = "M_S")]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RateCoverageArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub impairments: ImpairmentArgs,
    #[command(flatten)]
    pub link: LinkArgs,

    /// Band plan: `label=center_ghz:bandwidth_mhz` or `center_ghz:bandwidth_mhz`, comma-separated.
    #[arg(long, value_name = "PLAN", value_delimiter = ',')]
    pub bands: Vec<String>,

    /// Number of user drops.
    #[arg(long, value_name = "N")]
    pub drops: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SensingArgs {
    /// Single-band bandwidth, MHz (ignored when --subbands is given).
    #[arg(long, value_name = "MHZ")]
    pub bandwidth: Option<f64>,

    /// Sub-bands as `offset_mhz:bandwidth_mhz`, comma-separated.
    #[arg(long, value_name = "PLAN", value_delimiter = ',', allow_hyphen_values = true)]
    pub subbands: Vec<String>,

    /// SNR grid, dB (comma-separated).
    #[arg(long = "snr", value_name = "DB", value_delimiter = ',', allow_hyphen_values = true)]
    pub snr: Vec<f64>,

    /// Bandwidth scale factors (comma-separated).
    #[arg(long, value_name = "X", value_delimiter = ',')]
    pub factors: Vec<f64>,

    /// Base carrier, GHz; scaled with each factor.
    #[arg(long, value_name = "GHZ")]
    pub carrier: Option<f64>,

    /// Combine sub-bands without phase coherence.
    #[arg(long)]
    pub noncoherent: bool,

    /// Spectral shape: rectangular or triangular.
    #[arg(long, value_name = "SHAPE")]
    pub shape: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct HopArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub impairments: ImpairmentArgs,
    #[command(flatten)]
    pub link: LinkArgs,

    /// Band plan: `label=center_ghz:bandwidth_mhz` or `center_ghz:bandwidth_mhz`, comma-separated.
    #[arg(long, value_name = "PLAN", value_delimiter = ',')]
    pub bands: Vec<String>,

    /// Policy: `greedy`, `static:<band>`, `hysteresis` or `hysteresis:<margin dB>:<min dwell s>`. Repeatable.
    #[arg(long = "policy", value_name = "POLICY")]
    pub policies: Vec<String>,

    /// Link distance, m.
    #[arg(long, value_name = "M")]
    pub distance: Option<f64>,

    /// Simulated time, s.
    #[arg(long, value_name = "S")]
    pub horizon: Option<f64>,

    /// Time step, s.
    #[arg(long, value_name = "S")]
    pub step: Option<f64>,

    /// UE speed, m/s.
    #[arg(long, value_name = "M_S")]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV with columns `distance_m,path_loss_db`.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Measurement carrier, GHz.
    #[arg(long, value_name = "GHZ")]
    pub freq: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A manifest.json written by an earlier run.
    pub manifest: PathBuf,
}

/// Written next to every output set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    /// The scenario file as loaded (normalized).
    pub config: String,
    pub command: serde_json::Value,
    /// Every parameter the run used, with its source.
    pub resolved: Vec<Provenance>,
    pub outputs: Vec<String>,
}

/// Result of a subcommand before anything touches the filesystem.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: String,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every output plus the manifest into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }
}

/// Runs the binary with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli).and_then(|out| out.write_to(&cli.out).map(|_| out)) {
        Ok(out) => {
            print!("{}", out.summary);
            println!("wrote {} file(s) to {}", out.files.len() + 1, cli.out.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

/// Loads the scenario file and runs the subcommand in memory.
pub fn execute(cli: &Cli) -> Result<RunOutput> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, cli.workers);
    }
    execute_with(&cli.command, config, cli.seed, cli.workers)
}

/// Runs `command` against an already-loaded config.
pub fn execute_with(command: &Command, config: Config, seed: u64, workers: Option<usize>) -> Result<RunOutput> {
    let mut sc = Scenario::new(config)?;
    let (files, summary) = match command {
        Command::Propagate(a) => propagate(&mut sc, a)?,
        Command::Budget(a) => budget(&mut sc, a)?,
        Command::RateCoverage(a) => rate_coverage(&mut sc, a, seed, workers)?,
        Command::Sensing(a) => sensing(&mut sc, a)?,
        Command::Hop(a) => hop(&mut sc, a)?,
        Command::FitPle(a) => fit(&mut sc, a)?,
        Command::Replay(_) => return Err(Error::invalid("replay", "a manifest cannot replay another replay")),
    };
    let mut text = format!("{} (seed {seed})\n", command.name());
    for p in &sc.provenance {
        let _ = writeln!(text, "  {} = {} [{}]", p.name, p.value, p.source);
    }
    text.push_str(&summary);
    let manifest = RunManifest {
        subcommand: command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: sc.config.to_string(),
        command: serde_json::to_value(command).expect("command serializes"),
        resolved: sc.provenance.clone(),
        outputs: files.iter().map(|(n, _)| n.clone()).collect(),
    };
    Ok(RunOutput {
        manifest,
        files,
        summary: text,
    })
}

/// Re-executes a manifest; outputs are byte-identical to the original run.
pub fn replay(manifest_path: &Path, workers: Option<usize>) -> Result<RunOutput> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let bad = |e: serde_json::Error| Error::invalid(format!("manifest {}", manifest_path.display()), e.to_string());
    let manifest: RunManifest = serde_json::from_str(&text).map_err(bad)?;
    let command: Command = serde_json::from_value(manifest.command.clone()).map_err(bad)?;
    let config: Config = manifest.config.parse()?;
    execute_with(&command, config, manifest.seed, workers)
}

type Outputs = (Vec<(String, Vec<u8>)>, String);

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::io("csv buffer", e.into_error()))
}

fn propagate(sc: &mut Scenario, a: &PropagateArgs) -> Result<Outputs> {
    const SECTION: &str = "propagate";
    sc.allow_keys(
        SECTION,
        &[
            "environment", "visibility", "lookup", "nearest_span_ghz", "freqs_ghz", "distances_m", "model", "cif_slope",
            "cif_anchor_ghz", "rain_path_km",
        ],
    )?;
    let (env, vis, mode) = sc.channel(SECTION, &a.channel, Environment::UMi, Visibility::LoS, false)?;
    let freqs = sc.list(SECTION, "freqs_ghz", &a.freqs, &[16.95])?;
    let distances = sc.list(SECTION, "distances_m", &a.distances, &[1.0, 10.0, 100.0])?;
    let model = sc.string(SECTION, "model", a.model.clone(), "ci")?;
    let impairments = sc.impairments(&a.impairments)?;
    let rain_path = sc.opt_f64(SECTION, "rain_path_km", a.length_km)?;

    let cif = match model.as_str() {
        "ci" => None,
        "cif" => {
            let slope = sc.required_f64(SECTION, "cif_slope")?;
            let anchor = sc.required_f64(SECTION, "cif_anchor_ghz")?;
            let entry = sc.resolve_param(env, vis, anchor, mode)?;
            Some((entry, slope, anchor))
        }
        other => return Err(Error::invalid("[propagate] model", format!("`{other}` (expected ci or cif)"))),
    };

    let mut rows = Vec::new();
    for &f in &freqs {
        let (ple, approximate) = match cif {
            Some(((n, approx), b, f0)) => (n * (1.0 + b * (f - f0) / f0), approx),
            None => sc.resolve_param(env, vis, f, mode)?,
        };
        for &d in &distances {
            let pl = match cif {
                Some(((n, _), b, f0)) => cif_path_loss(f, d, n, b, f0, 0.0)?,
                None => ci_path_loss(f, d, ple, 0.0)?,
            };
            let rain = match &impairments.rain {
                Some(r) => rain_attenuation(r, f, rain_path.unwrap_or(d / 1000.0))?,
                None => 0.0,
            };
            let foliage = match &impairments.foliage {
                Some(fs) => fs.loss(f)?,
                None => 0.0,
            };
            let penetration = impairments.fixed_loss(f)? - foliage;
            rows.push(vec![
                f.to_string(),
                d.to_string(),
                ple.to_string(),
                approximate.to_string(),
                fspl(f, 1.0)?.to_string(),
                pl.to_string(),
                rain.to_string(),
                foliage.to_string(),
                penetration.to_string(),
                (pl + rain + foliage + penetration).to_string(),
            ]);
        }
    }
    let n = rows.len();
    let csv = csv_bytes(
        &[
            "freq_ghz", "distance_m", "ple", "approximate", "fspl_1m_db", "path_loss_db", "rain_db", "foliage_db",
            "penetration_db", "total_db",
        ],
        rows,
    )?;
    Ok((vec![("propagate.csv".into(), csv)], format!("{n} grid points\n")))
}

fn budget(sc: &mut Scenario, a: &BudgetArgs) -> Result<Outputs> {
    const SECTION: &str = "budget";
    sc.allow_keys(SECTION, &["environment", "visibility", "lookup", "nearest_span_ghz", "distance_m", "speed_mps"])?;
    let (env, vis, mode) = sc.channel(SECTION, &a.channel, Environment::UMi, Visibility::LoS, true)?;
    let bands = sc.bands(&a.bands)?;
    let distance = sc.f64(SECTION, "distance_m", a.distance, 100.0)?;
    let speed = sc.f64(SECTION, "speed_mps", a.speed, 3.0)?;
    let link = sc.link(&a.link)?;
    let impairments = sc.impairments(&a.impairments)?;

    let mut rows = Vec::new();
    for band in &bands {
        let f = band.center_ghz;
        let (ple, approximate) = sc.resolve_param(env, vis, f, mode)?;
        let pl = ci_path_loss(f, distance, ple, 0.0)?;
        let extra = impairments.loss(f, distance)?;
        let gains = link.gain_model.gains(f);
        let noise = noise_power(band.bandwidth_mhz, link.noise_figure_db)?;
        let s = snr(&link, f, band.bandwidth_mhz, pl + extra);
        let tc = match coherence_time(f, speed)? {
            CoherenceTime::Bounded { seconds } => (seconds * 1e3).to_string(),
            CoherenceTime::Unbounded => "inf".to_string(),
        };
        rows.push(vec![
            band.label.clone(),
            f.to_string(),
            band.bandwidth_mhz.to_string(),
            ple.to_string(),
            (approximate || gains.approximate).to_string(),
            pl.to_string(),
            extra.to_string(),
            gains.tx_dbi.to_string(),
            gains.rx_dbi.to_string(),
            noise.to_string(),
            s.to_string(),
            shannon_rate(band.bandwidth_mhz, s).to_string(),
            tc,
        ]);
    }
    let lo = bands.iter().map(|b| b.center_ghz).fold(f64::INFINITY, f64::min);
    let hi = bands.iter().map(|b| b.center_ghz).fold(f64::NEG_INFINITY, f64::max);
    let summary = format!(
        "phase-noise SNR penalty {lo} -> {hi} GHz: {:.2} dB\n",
        pn_snr_loss(lo, hi)?
    );
    let csv = csv_bytes(
        &[
            "band", "freq_ghz", "bandwidth_mhz", "ple", "approximate", "path_loss_db", "impairment_db", "tx_gain_dbi",
            "rx_gain_dbi", "noise_dbm", "snr_db", "rate_mbps", "coherence_time_ms",
        ],
        rows,
    )?;
    Ok((vec![("budget.csv".into(), csv)], summary))
}

fn rate_coverage(sc: &mut Scenario, a: &RateCoverageArgs, seed: u64, workers: Option<usize>) -> Result<Outputs> {
    const SECTION: &str = "scenario";
    sc.allow_keys(
        SECTION,
        &[
            "environment", "visibility", "lookup", "nearest_span_ghz", "cell_radius_m", "min_distance_m", "drops",
            "shadow_sigma_db",
        ],
    )?;
    let (environment, visibility, mode) = sc.channel(SECTION, &a.channel, Environment::UMi, Visibility::NLoS, true)?;
    let bands = sc.bands(&a.bands)?;
    let sigma = sc.f64(SECTION, "shadow_sigma_db", None, crate::coverage::DEFAULT_SHADOW_SIGMA_DB)?;
    let channels = sc.band_channels(environment, visibility, &bands, mode, sigma)?;
    let n_drops = sc.parsed(SECTION, "drops", a.drops, 10_000usize)?;
    let scenario = DropScenario {
        cell_radius_m: sc.f64(SECTION, "cell_radius_m", None, 500.0)?,
        min_distance_m: sc.f64(SECTION, "min_distance_m", None, 10.0)?,
        environment,
        visibility,
        bands: channels,
        link: sc.link(&a.link)?,
        impairments: sc.impairments(&a.impairments)?,
        n_drops,
        seed,
    };
    let result = match workers {
        Some(w) => run_rate_coverage_with_workers(&scenario, w)?,
        None => run_rate_coverage(&scenario)?,
    };
    let mut coverage = Vec::new();
    result.write_coverage_csv(&mut coverage)?;
    let mut crossovers = Vec::new();
    result.write_crossovers_csv(&mut crossovers)?;
    let mut summary = format!("{n_drops} drops, {} crossover(s)\n", result.crossovers.len());
    for c in &result.crossovers {
        let _ = writeln!(summary, "  {} -> {} at {:.1} Mbps", c.band_below, c.band_above, c.rate_mbps);
    }
    Ok((
        vec![("coverage.csv".into(), coverage), ("crossovers.csv".into(), crossovers)],
        summary,
    ))
}

fn parse_shape(s: &str) -> Result<SpectralShape> {
    match s {
        "rect" | "rectangular" => Ok(SpectralShape::Rectangular),
        "tri" | "triangular" => Ok(SpectralShape::Triangular),
        other => Err(Error::invalid("shape", format!("`{other}` (expected rectangular or triangular)"))),
    }
}

fn parse_subband(s: &str) -> Result<SubBand> {
    let bad = || Error::invalid("sub-band", format!("`{s}` (expected offset_mhz:bandwidth_mhz)"));
    let (off, bw) = s.split_once(':').ok_or_else(bad)?;
    let off: f64 = off.trim().parse().map_err(|_| bad())?;
    let bw: f64 = bw.trim().parse().map_err(|_| bad())?;
    Ok(SubBand::new(off * 1e6, bw * 1e6))
}

fn sensing(sc: &mut Scenario, a: &SensingArgs) -> Result<Outputs> {
    const SECTION: &str = "sensing";
    sc.allow_keys(
        SECTION,
        &["bandwidth_mhz", "subbands", "snr_db", "factors", "carrier_ghz", "combining", "shape"],
    )?;
    let snr_grid = sc.list(SECTION, "snr_db", &a.snr, &[17.0])?;
    let factors = sc.list(SECTION, "factors", &a.factors, &[1.0, 2.0, 4.0])?;
    let carrier = sc.f64(SECTION, "carrier_ghz", a.carrier, 7.0)?;
    let combining = if a.noncoherent {
        sc.note("combining", "noncoherent", "flag");
        Combining::Noncoherent
    } else {
        match sc.string(SECTION, "combining", None, "coherent")?.as_str() {
            "coherent" => Combining::Coherent,
            "noncoherent" => Combining::Noncoherent,
            other => return Err(Error::invalid("[sensing] combining", format!("`{other}`"))),
        }
    };
    let shape = parse_shape(&sc.string(SECTION, "shape", a.shape.clone(), "rectangular")?)?;
    let subbands = if !a.subbands.is_empty() {
        sc.note("subbands", a.subbands.join(","), "flag");
        a.subbands.iter().map(|s| parse_subband(s)).collect::<Result<Vec<_>>>()?
    } else if let Some(list) = sc.raw(SECTION, "subbands") {
        let items: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        sc.note("subbands", items.join(","), "config");
        items.iter().map(|s| parse_subband(s)).collect::<Result<Vec<_>>>()?
    } else {
        let bw = sc.f64(SECTION, "bandwidth_mhz", a.bandwidth, 400.0)?;
        vec![SubBand::new(0.0, bw * 1e6)]
    };
    let plan = SensingPlan::with_shape(subbands, snr_grid[0], combining, shape)?;
    let rows = sweep_plan(&plan, carrier, &factors, &snr_grid)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    let best = rows.iter().map(|r| r.range_std_m).fold(f64::INFINITY, f64::min);
    let worst = rows.iter().map(|r| r.range_std_m).fold(0.0, f64::max);
    let summary = format!(
        "{} rows, range std {:.4} to {:.4} m\n",
        rows.len(),
        best,
        worst
    );
    Ok((vec![("sensing.csv".into(), csv)], summary))
}

fn hop(sc: &mut Scenario, a: &HopArgs) -> Result<Outputs> {
    const SECTION: &str = "hop";
    sc.allow_keys(
        SECTION,
        &[
            "environment", "visibility", "lookup", "nearest_span_ghz", "distance_m", "horizon_s", "step_s", "speed_mps",
            "policies",
        ],
    )?;
    let (env, vis, mode) = sc.channel(SECTION, &a.channel, Environment::UMi, Visibility::LoS, true)?;
    let bands = sc.bands(&a.bands)?;
    let channels = sc.band_channels(env, vis, &bands, mode, 0.0)?;
    let mut context = LinkContext::new(sc.f64(SECTION, "distance_m", a.distance, 100.0)?);
    context.impairments = sc.impairments(&a.impairments)?;
    let fixture = HopFixture {
        timeline: sc.blockages()?,
        horizon_s: sc.f64(SECTION, "horizon_s", a.horizon, 1.0)?,
        step_s: sc.f64(SECTION, "step_s", a.step, 0.01)?,
        bands: channels,
        context,
        link: sc.link(&a.link)?,
        speed_mps: sc.f64(SECTION, "speed_mps", a.speed, 3.0)?,
    };
    let policy_strings: Vec<String> = if !a.policies.is_empty() {
        sc.note("policies", a.policies.join(", "), "flag");
        a.policies.clone()
    } else if let Some(list) = sc.raw(SECTION, "policies") {
        let v: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        sc.note("policies", v.join(", "), "config");
        v
    } else {
        let lowest = bands
            .iter()
            .min_by(|x, y| x.center_ghz.total_cmp(&y.center_ghz))
            .expect("band plan is nonempty");
        let v = vec![format!("static:{}", lowest.label), "greedy".into(), "hysteresis".into()];
        sc.note("policies", v.join(", "), "tool default");
        v
    };
    let policies: Vec<HopPolicy> = policy_strings.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let rows = compare_policies(&fixture, &policies)?;
    let trace = simulate_hopping(&fixture, &policies[0])?;
    let mut table = Vec::new();
    write_policy_csv(&rows, &mut table)?;
    let mut trace_csv = Vec::new();
    trace.write_csv(&mut trace_csv)?;
    let mut summary = format!(
        "{} blockage event(s); trace.csv follows `{}`\n",
        fixture.timeline.len(),
        policies[0]
    );
    for r in &rows {
        let _ = writeln!(
            summary,
            "  {:<14} {:<24} {:>10.1} Mbps {:>4} hop(s)",
            r.gain_model.to_string(),
            r.policy,
            r.mean_rate_mbps,
            r.hops
        );
    }
    Ok((vec![("policies.csv".into(), table), ("trace.csv".into(), trace_csv)], summary))
}

fn fit(sc: &mut Scenario, a: &FitArgs) -> Result<Outputs> {
    const SECTION: &str = "fit";
    sc.allow_keys(SECTION, &["input", "freq_ghz"])?;
    let input = match &a.input {
        Some(p) => p.clone(),
        None => PathBuf::from(
            sc.raw(SECTION, "input")
                .ok_or_else(|| Error::invalid("fit-ple", "no input: pass --input or set [fit] input"))?,
        ),
    };
    sc.note("input", input.display(), if a.input.is_some() { "flag" } else { "config" });
    let freq = match a.freq {
        Some(f) => {
            sc.note("freq_ghz", f, "flag");
            f
        }
        None => sc.required_f64(SECTION, "freq_ghz")?,
    };
    let mut reader = csv::Reader::from_path(&input).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(&input, io),
        other => Error::invalid(format!("input {}", input.display()), format!("{other:?}")),
    })?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::invalid(format!("input {}", input.display()), format!("missing column `{name}`")))
    };
    let (di, pi) = (col("distance_m")?, col("path_loss_db")?);
    let mut samples = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let get = |j: usize| -> Result<f64> {
            rec.get(j)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line: i + 2,
                    msg: format!("{}: non-numeric `{}`", input.display(), &headers[j]),
                })
        };
        samples.push((get(di)?, get(pi)?));
    }
    let fit = fit_ple(&samples, freq)?;
    let csv = csv_bytes(
        &["freq_ghz", "samples", "ple", "shadow_sigma_db"],
        [vec![
            freq.to_string(),
            samples.len().to_string(),
            fit.ple.to_string(),
            fit.shadow_sigma.to_string(),
        ]],
    )?;
    let summary = format!(
        "n = {:.4}, sigma = {:.3} dB over {} samples\n",
        fit.ple,
        fit.shadow_sigma,
        samples.len()
    );
    Ok((vec![("fit.csv".into(), csv)], summary))
}
