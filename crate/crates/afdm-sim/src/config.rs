//! Experiment configuration: a small TOML dialect, validated into a
//! ready-to-run [`ExperimentSpec`].
//!
//! One file describes one experiment. The grammar has three sections:
//!
//! ```toml
//! [experiment]
//! system = "afdm-im"        # afdm-im | afdm | ofdm-im
//! detector = "ml"           # ml | mmse
//! snr_db = [20.0, 23.0, 26.0, 29.0, 32.0]
//! seed = 7                  # optional, default 1
//! min_errors = 200          # optional, default 200
//! min_trials = 0            # optional floor, default 0
//! max_trials = 250000       # optional, default sized to ~10^7 bits
//! noiseless = false         # optional
//!
//! [modem]
//! n_total = 32
//! n_sub = 8
//! k_active = 1
//! mod_order = 2
//! power = "conventional"    # conventional | pr | ps
//! c1 = 0.078125             # optional, default from the delay profile
//! c2 = 0.0                  # optional, default 0
//! cpp_len = 1               # optional, default longest path delay
//! e_total = 32.0            # optional, default n_total
//!
//! [channel]
//! profile = "2-path"        # a stock profile…
//! # delays = [0, 1]         # …or explicit taps (mutually exclusive)
//! # dopplers = [0.5, 0.8]
//! ```
//!
//! Unknown keys are rejected rather than ignored — a typo in an experiment
//! file must not silently change what was simulated. Defaults are resolved
//! here, once, so the stored spec is self-describing.

use std::path::Path;

use serde::Deserialize;

use afdm_core::baselines::{ofdm_im_variant, BaselineKind};
use afdm_core::channel::{standard_profiles, ChannelProfile};
use afdm_core::daft::choose_c1;
use afdm_core::im_codec::ModemConfig;
use afdm_core::power::{allocate_power, PowerPlan, PowerStrategy};

use crate::error::{Result, SimError};

/// Which transmit/receive family a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    AfdmIm,
    ClassicAfdm,
    OfdmIm,
}

impl SystemKind {
    pub fn label(self) -> &'static str {
        match self {
            SystemKind::AfdmIm => "afdm-im",
            SystemKind::ClassicAfdm => BaselineKind::ClassicAfdm.label(),
            SystemKind::OfdmIm => BaselineKind::OfdmIm.label(),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "afdm-im" => Ok(SystemKind::AfdmIm),
            "afdm" => Ok(SystemKind::ClassicAfdm),
            "ofdm-im" => Ok(SystemKind::OfdmIm),
            other => Err(SimError::config(
                "experiment.system",
                format!("unknown system {other:?}; expected afdm-im, afdm, or ofdm-im"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Ml,
    Mmse,
}

impl DetectorKind {
    pub fn label(self) -> &'static str {
        match self {
            DetectorKind::Ml => "ml",
            DetectorKind::Mmse => "mmse",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(DetectorKind::Ml),
            "mmse" => Ok(DetectorKind::Mmse),
            other => Err(SimError::config(
                "experiment.detector",
                format!("unknown detector {other:?}; expected ml or mmse"),
            )),
        }
    }
}

// ------------------------------------------------------------ raw schema

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    experiment: RawExperiment,
    modem: RawModem,
    channel: RawChannel,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    system: Option<String>,
    detector: String,
    snr_db: Vec<f64>,
    seed: Option<u64>,
    min_errors: Option<u64>,
    min_trials: Option<u64>,
    max_trials: Option<u64>,
    noiseless: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModem {
    n_total: usize,
    n_sub: usize,
    k_active: usize,
    mod_order: usize,
    power: Option<String>,
    c1: Option<f64>,
    c2: Option<f64>,
    cpp_len: Option<usize>,
    e_total: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    profile: Option<String>,
    delays: Option<Vec<usize>>,
    dopplers: Option<Vec<f64>>,
}

// -------------------------------------------------------- validated spec

/// A fully resolved experiment: every default filled in, every invariant
/// checked. Construction is the only validation point in the harness.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub system: SystemKind,
    pub modem: ModemConfig,
    pub profile: ChannelProfile,
    pub profile_label: String,
    pub snr_db: Vec<f64>,
    pub detector: DetectorKind,
    pub seed: u64,
    pub min_errors: u64,
    /// Trial floor: never stop a point before this many blocks, even with
    /// `min_errors` already collected. Guarantees a minimum bit count per
    /// point when a whole sweep must meet one.
    pub min_trials: u64,
    pub max_trials: u64,
    pub noiseless: bool,
    pub e_total: f64,
    /// Non-fatal advisories (e.g. statistically thin stopping rules).
    pub warnings: Vec<String>,
}

/// Stopping-rule default: cap the run near this many simulated bits when
/// `max_trials` is not given.
pub const DEFAULT_MAX_BITS: u64 = 10_000_000;
pub const DEFAULT_MIN_ERRORS: u64 = 200;

/// Guard-band margin used when deriving the first chirp rate from the
/// channel's Doppler spread.
pub const DOPPLER_GUARD: u32 = 1;

impl ExperimentSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::ConfigFile {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        build_spec(raw)
    }

    /// The power plan this experiment runs under.
    pub fn plan(&self) -> Result<PowerPlan> {
        Ok(allocate_power(self.modem.power_strategy, self.e_total, &self.modem)?)
    }
}

fn parse_power(s: &str) -> Result<PowerStrategy> {
    match s {
        "conventional" => Ok(PowerStrategy::Conventional),
        "pr" => Ok(PowerStrategy::PowerReallocation),
        "ps" => Ok(PowerStrategy::PowerSaving),
        other => Err(SimError::config(
            "modem.power",
            format!("unknown strategy {other:?}; expected conventional, pr, or ps"),
        )),
    }
}

fn build_profile(raw: &RawChannel) -> Result<(ChannelProfile, String)> {
    match (&raw.profile, &raw.delays, &raw.dopplers) {
        (Some(name), None, None) => {
            let known = standard_profiles();
            match known.get(name.as_str()) {
                Some(p) => Ok((p.clone(), name.clone())),
                None => {
                    let names: Vec<&str> = known.keys().copied().collect();
                    Err(SimError::config(
                        "channel.profile",
                        format!("unknown profile {name:?}; stock profiles: {names:?}"),
                    ))
                }
            }
        }
        (None, Some(delays), Some(dopplers)) => {
            let profile = ChannelProfile::from_taps(delays, dopplers)?;
            Ok((profile, "custom".into()))
        }
        (Some(_), _, _) => Err(SimError::config(
            "channel",
            "give either a stock `profile` or explicit `delays`/`dopplers`, not both",
        )),
        _ => Err(SimError::config(
            "channel",
            "missing channel description: set `profile` or both `delays` and `dopplers`",
        )),
    }
}

fn build_spec(raw: RawFile) -> Result<ExperimentSpec> {
    let mut warnings = Vec::new();

    let system = match &raw.experiment.system {
        Some(s) => SystemKind::parse(s)?,
        None => SystemKind::AfdmIm,
    };
    let detector = DetectorKind::parse(&raw.experiment.detector)?;

    let snr_db = raw.experiment.snr_db;
    if snr_db.is_empty() {
        return Err(SimError::config("experiment.snr_db", "SNR grid must be non-empty"));
    }
    if !snr_db.iter().all(|s| s.is_finite()) {
        return Err(SimError::config("experiment.snr_db", "SNR values must be finite"));
    }
    if !snr_db.windows(2).all(|w| w[0] < w[1]) {
        return Err(SimError::config("experiment.snr_db", "SNR grid must be strictly ascending"));
    }

    let (profile, profile_label) = build_profile(&raw.channel)?;

    let m = &raw.modem;
    if system == SystemKind::ClassicAfdm && (m.n_sub != 1 || m.k_active != 1) {
        return Err(SimError::config(
            "modem.n_sub",
            "classic AFDM has every carrier active: set n_sub = 1 and k_active = 1",
        ));
    }
    if system == SystemKind::OfdmIm && (m.c1.unwrap_or(0.0) != 0.0 || m.c2.unwrap_or(0.0) != 0.0)
    {
        return Err(SimError::config(
            "modem.c1",
            "ofdm-im uses the plain DFT; omit c1/c2 or set them to 0",
        ));
    }

    let c1 = match m.c1 {
        Some(v) => v,
        None if system == SystemKind::OfdmIm => 0.0,
        None => choose_c1(profile.alpha_max(), DOPPLER_GUARD, m.n_total, &profile.delays())?,
    };
    let c2 = m.c2.unwrap_or(0.0);
    let cpp_len = m.cpp_len.unwrap_or_else(|| profile.l_max());
    if cpp_len < profile.l_max() {
        return Err(SimError::config(
            "modem.cpp_len",
            format!("prefix length {cpp_len} shorter than the longest delay {}", profile.l_max()),
        ));
    }
    let strategy = parse_power(m.power.as_deref().unwrap_or("conventional"))?;

    let mut modem =
        ModemConfig::new(m.n_total, m.n_sub, m.k_active, m.mod_order, c1, c2, cpp_len, strategy)?;
    if system == SystemKind::OfdmIm {
        modem = ofdm_im_variant(&modem);
    }

    let e_total = m.e_total.unwrap_or(m.n_total as f64);
    if !(e_total.is_finite() && e_total > 0.0) {
        return Err(SimError::config("modem.e_total", "energy budget must be positive"));
    }

    let min_errors = raw.experiment.min_errors.unwrap_or(DEFAULT_MIN_ERRORS);
    if min_errors < 100 {
        warnings.push(format!(
            "min_errors = {min_errors} is below 100; BER points may be statistically thin"
        ));
    }
    let bits_per_block = modem.bits_per_block() as u64;
    let max_trials = raw
        .experiment
        .max_trials
        .unwrap_or_else(|| DEFAULT_MAX_BITS.div_ceil(bits_per_block));
    if max_trials == 0 {
        return Err(SimError::config("experiment.max_trials", "trial cap must be at least 1"));
    }
    let min_trials = raw.experiment.min_trials.unwrap_or(0);
    if min_trials > max_trials {
        return Err(SimError::config(
            "experiment.min_trials",
            format!("trial floor {min_trials} exceeds the cap {max_trials}"),
        ));
    }

    Ok(ExperimentSpec {
        system,
        modem,
        profile,
        profile_label,
        snr_db,
        detector,
        seed: raw.experiment.seed.unwrap_or(1),
        min_errors,
        min_trials,
        max_trials,
        noiseless: raw.experiment.noiseless.unwrap_or(false),
        e_total,
        warnings,
    })
}
