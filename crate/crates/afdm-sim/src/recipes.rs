//! Canned experiments.
//!
//! Each recipe is an ordinary config file that happens to live inside
//! the binary: the TOML below goes through the same parse/validate
//! pipeline as a user-supplied `--config`, so every recipe doubles as a
//! worked example of the grammar. The CLI runs one with
//! `compare <name>`; the spec builders are public so the test suite can
//! reuse the exact parameter sets without copy-pasting them.
//!
//! Simulation budgets are sized for a single desktop core: the floors
//! (`min_trials`) guarantee enough bits for the BER resolution each
//! comparison needs, the caps keep the worst-case runtime in minutes.

use crate::config::ExperimentSpec;
use crate::error::{Result, SimError};
use crate::records::{sort_records, BerRecord};
use crate::runner::{abep_records, run_experiment};

/// Recipe names with one-line descriptions, in menu order.
pub const RECIPES: &[(&str, &str)] = &[
    (
        "ml-vs-bound",
        "ML simulation against the union bound, (32,8,1,2) over the 2-path channel",
    ),
    (
        "diversity-orders",
        "union-bound ABEP for the 2/3/4-path profiles, (32,8,1,2)",
    ),
    (
        "im-vs-afdm",
        "power-reallocated AFDM-IM vs classic AFDM at spectral efficiency 2, 4-path",
    ),
    (
        "im-vs-ofdm",
        "power-saving AFDM-IM vs OFDM-IM over the high-Doppler 2-path channel",
    ),
];

const ML_VS_BOUND: &str = r#"
[experiment]
detector = "ml"
snr_db = [20.0, 23.0, 26.0, 29.0, 32.0]
seed = 7
min_errors = 200
min_trials = 131072   # >= 2e6 bits per point at 16 bits per block
max_trials = 1572864  # high-SNR points run to the cap (~25e6 bits),
                      # enough for the estimate to sit firmly under the bound

[modem]
n_total = 32
n_sub = 8
k_active = 1
mod_order = 2

[channel]
profile = "2-path"
"#;

const DIVERSITY_GRID: &str = r#"
[experiment]
detector = "ml"          # unused: this recipe only evaluates the bound
snr_db = [20.0, 22.5, 25.0, 27.5, 30.0, 32.5, 35.0]

[modem]
n_total = 32
n_sub = 8
k_active = 1
mod_order = 2

[channel]
profile = "PROFILE"
"#;

const IM_VS_AFDM_IM_SIDE: &str = r#"
[experiment]
detector = "mmse"
snr_db = [16.0, 18.0, 20.0, 22.0]
seed = 11
min_errors = 500
min_trials = 8192     # >= 1e6 bits per point at 128 bits per block
max_trials = 65536    # both curves pass 1e-5 near the top of this grid;
                      # past it the ordering question turns into noise

[modem]
n_total = 64
n_sub = 4
k_active = 3
mod_order = 4
power = "pr"

[channel]
profile = "4-path"
"#;

const IM_VS_AFDM_CLASSIC_SIDE: &str = r#"
[experiment]
system = "afdm"
detector = "mmse"
snr_db = [16.0, 18.0, 20.0, 22.0]
seed = 11
min_errors = 500
min_trials = 8192     # same 128 bits per block, so trials pair up
max_trials = 65536

[modem]
n_total = 64
n_sub = 1
k_active = 1
mod_order = 4

[channel]
profile = "4-path"
"#;

const IM_VS_OFDM_AFDM_SIDE: &str = r#"
[experiment]
detector = "mmse"
snr_db = [20.0, 25.0, 30.0, 35.0]
seed = 13
min_errors = 200
min_trials = 8192     # >= 1e6 bits per point at 128 bits per block
max_trials = 32768

[modem]
n_total = 64
n_sub = 4
k_active = 3
mod_order = 4
power = "ps"

[channel]
profile = "2-path"
"#;

const IM_VS_OFDM_OFDM_SIDE: &str = r#"
[experiment]
system = "ofdm-im"
detector = "mmse"
snr_db = [20.0, 25.0, 30.0, 35.0]
seed = 13
min_errors = 200
min_trials = 8192
max_trials = 32768

[modem]
n_total = 64
n_sub = 4
k_active = 3
mod_order = 4
power = "ps"

[channel]
profile = "2-path"
"#;

fn built_in(toml: &str) -> ExperimentSpec {
    ExperimentSpec::from_toml_str(toml).expect("built-in recipe must validate")
}

/// (32,8,1,2), conventional power, ML detection over the 2-path channel.
pub fn ml_vs_bound_spec() -> ExperimentSpec {
    built_in(ML_VS_BOUND)
}

/// The same modem over each stock profile, for slope comparisons.
pub fn diversity_specs() -> Vec<ExperimentSpec> {
    ["2-path", "3-path", "4-path"]
        .iter()
        .map(|name| built_in(&DIVERSITY_GRID.replace("PROFILE", name)))
        .collect()
}

/// Equal spectral efficiency head-to-head: (64,4,3,4) with power
/// reallocation against fully-loaded classic AFDM, 4-path channel.
pub fn im_vs_afdm_specs() -> (ExperimentSpec, ExperimentSpec) {
    (built_in(IM_VS_AFDM_IM_SIDE), built_in(IM_VS_AFDM_CLASSIC_SIDE))
}

/// Chirp vs no chirp: (64,4,3,4) power-saving AFDM-IM against the
/// OFDM-IM twin over the fractional-Doppler 2-path channel.
pub fn im_vs_ofdm_specs() -> (ExperimentSpec, ExperimentSpec) {
    (built_in(IM_VS_OFDM_AFDM_SIDE), built_in(IM_VS_OFDM_OFDM_SIDE))
}

fn sim_records(spec: &ExperimentSpec) -> Result<Vec<BerRecord>> {
    Ok(run_experiment(spec)?.into_iter().map(|p| p.record).collect())
}

fn ml_vs_bound_records(seed: Option<u64>) -> Result<Vec<BerRecord>> {
    let mut spec = ml_vs_bound_spec();
    if let Some(s) = seed {
        spec.seed = s;
    }
    let mut records = sim_records(&spec)?;
    records.extend(abep_records(&spec)?);
    Ok(records)
}

fn diversity_records() -> Result<Vec<BerRecord>> {
    let mut records = Vec::new();
    for spec in diversity_specs() {
        for mut rec in abep_records(&spec)? {
            // Three theory curves share a system; tag each with its
            // channel so the CSV stays self-describing.
            rec.system = format!("{}/{}", rec.system, spec.profile_label);
            records.push(rec);
        }
    }
    Ok(records)
}

fn head_to_head(
    specs: (ExperimentSpec, ExperimentSpec),
    seed: Option<u64>,
) -> Result<Vec<BerRecord>> {
    let (mut a, mut b) = specs;
    if let Some(s) = seed {
        a.seed = s;
        b.seed = s;
    }
    let mut records = sim_records(&a)?;
    records.extend(sim_records(&b)?);
    Ok(records)
}

/// Runs a named recipe, optionally re-seeding its simulations.
pub fn run_recipe(name: &str, seed: Option<u64>) -> Result<Vec<BerRecord>> {
    let mut records = match name {
        "ml-vs-bound" => ml_vs_bound_records(seed)?,
        "diversity-orders" => diversity_records()?,
        "im-vs-afdm" => head_to_head(im_vs_afdm_specs(), seed)?,
        "im-vs-ofdm" => head_to_head(im_vs_ofdm_specs(), seed)?,
        other => {
            let known: Vec<&str> = RECIPES.iter().map(|(n, _)| *n).collect();
            return Err(SimError::config(
                "recipe",
                format!("unknown recipe `{other}`; known: {}", known.join(", ")),
            ));
        }
    };
    sort_records(&mut records);
    Ok(records)
}
