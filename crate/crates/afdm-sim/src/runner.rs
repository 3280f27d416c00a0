//! Seeded, thread-count-independent Monte Carlo BER engine.
//!
//! Every trial runs the full physical chain — encode, power-scale, inverse
//! transform, prefix, tapped delay-Doppler channel, AWGN, forward
//! transform, detect — never the effective-matrix shortcut, so the
//! simulation exercises exactly what the closed-form engine models and the
//! two can disagree only if one of them is wrong.
//!
//! Determinism contract: each trial derives three private ChaCha streams
//! (path gains, data bits, noise) from `(seed, snr index, trial index)`
//! alone. Work is scheduled in fixed 1024-trial batches and summed as
//! integer `(errors, bits)` pairs, an associative reduction, so the result
//! is byte-identical no matter how many worker threads run the batches.
//! Stopping is decided at fixed round boundaries for the same reason.
//!
//! Running several detectors "paired" feeds them the same trials — same
//! gains, same bits, same noise — which removes Monte Carlo variance from
//! detector comparisons; only the decisions differ.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use afdm_core::analysis::UnionBound;
use afdm_core::channel::{apply_time_domain, build_path_matrix, combine, PathRealization};
use afdm_core::daft::{add_cpp, build_daft, DaftOperator};
use afdm_core::detection::{MlDetector, MmseEqualizer};
use afdm_core::im_codec::encode_block;
use afdm_core::power::{snr_to_noise, PowerPlan};
use afdm_core::CMat;

use crate::config::{DetectorKind, ExperimentSpec};
use crate::error::Result;
use crate::records::{BerRecord, PointResult, StopReason};

/// Trials per scheduling unit; also the granularity of parallelism.
pub const BATCH_TRIALS: u64 = 1024;
/// Batches launched between stopping-rule checks. Fixed, so the stopping
/// decision cannot depend on the thread count.
const BATCHES_PER_ROUND: u64 = 16;

const PURPOSE_GAINS: u64 = 0;
const PURPOSE_BITS: u64 = 1;
const PURPOSE_NOISE: u64 = 2;

/// The per-trial RNG for one purpose: one base cipher keyed by the seed,
/// stream id packing (purpose, snr index, trial).
fn stream_rng(seed: u64, snr_index: usize, trial: u64, purpose: u64) -> ChaCha8Rng {
    debug_assert!(snr_index < (1 << 14) && trial < (1 << 48));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 62) | ((snr_index as u64) << 48) | trial);
    rng
}

fn complex_normal(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

enum Engine {
    Ml(MlDetector),
    Mmse(MmseEqualizer),
}

/// A compiled experiment: transform, per-path matrices, and detector
/// engines built once, shared read-only by all worker threads.
pub struct Runner {
    spec: ExperimentSpec,
    plan: PowerPlan,
    op: DaftOperator,
    per_path: Vec<CMat>,
    engines: Vec<(DetectorKind, Engine)>,
}

impl Runner {
    /// Compiles the experiment with its configured detector.
    pub fn new(spec: &ExperimentSpec) -> Result<Self> {
        Self::with_detectors(spec, &[spec.detector])
    }

    /// Compiles the experiment with an explicit detector set for paired
    /// evaluation on identical trials.
    pub fn with_detectors(spec: &ExperimentSpec, detectors: &[DetectorKind]) -> Result<Self> {
        let plan = spec.plan()?;
        let op = build_daft(spec.modem.n_total, spec.modem.c1, spec.modem.c2);
        let per_path: Vec<CMat> =
            spec.profile.paths.iter().map(|p| build_path_matrix(p, &op)).collect();
        let mut engines = Vec::with_capacity(detectors.len());
        for &kind in detectors {
            let engine = match kind {
                DetectorKind::Ml => Engine::Ml(MlDetector::new(&spec.modem)?),
                DetectorKind::Mmse => Engine::Mmse(MmseEqualizer::new(&spec.modem, &per_path)),
            };
            engines.push((kind, engine));
        }
        Ok(Runner { spec: spec.clone(), plan, op, per_path, engines })
    }

    pub fn plan(&self) -> &PowerPlan {
        &self.plan
    }

    /// Per-sample noise variance at one grid point (zero when the
    /// noiseless override is set).
    fn noise_variance(&self, snr_db: f64) -> f64 {
        if self.spec.noiseless {
            0.0
        } else {
            snr_to_noise(snr_db, &self.spec.modem, &self.plan)
        }
    }

    /// One trial through the physical chain; returns per-engine bit error
    /// counts added into `errors`.
    fn run_trial(&self, snr_index: usize, trial: u64, n0: f64, errors: &mut [u64]) {
        let spec = &self.spec;
        let n = spec.modem.n_total;
        let n_paths = spec.profile.n_paths();

        let mut gains_rng = stream_rng(spec.seed, snr_index, trial, PURPOSE_GAINS);
        let gain_scale = (0.5 / n_paths as f64).sqrt();
        let gains: Vec<Complex64> =
            (0..n_paths).map(|_| complex_normal(&mut gains_rng, gain_scale)).collect();

        let mut bits_rng = stream_rng(spec.seed, snr_index, trial, PURPOSE_BITS);
        let sent: Vec<bool> =
            (0..spec.modem.bits_per_block()).map(|_| bits_rng.gen_bool(0.5)).collect();

        let block = encode_block(&sent, &spec.modem).expect("bit count fixed by config");
        let s = self.op.idaft(&block.x) * Complex64::from(self.plan.rho.sqrt());
        let s_cpp = add_cpp(&s, spec.modem.cpp_len, spec.modem.c1);
        let realization = PathRealization::new(gains.clone());
        let mut r = apply_time_domain(&s_cpp, &spec.profile, &realization, spec.modem.cpp_len)
            .expect("prefix length validated at config time");
        if n0 > 0.0 {
            let mut noise_rng = stream_rng(spec.seed, snr_index, trial, PURPOSE_NOISE);
            let noise_scale = (n0 / 2.0).sqrt();
            for i in 0..n {
                r[i] += complex_normal(&mut noise_rng, noise_scale);
            }
        }
        let y = self.op.daft(&r);

        // The combined matrix is only needed by ML engines.
        let mut h_eff: Option<CMat> = None;
        for ((_, engine), err_slot) in self.engines.iter().zip(errors.iter_mut()) {
            let decided = match engine {
                Engine::Ml(det) => {
                    let h = h_eff
                        .get_or_insert_with(|| combine(&self.per_path, &realization));
                    det.detect(&y, h, self.plan.rho).1
                }
                Engine::Mmse(eq) => eq.detect(&y, &gains, n0, self.plan.rho),
            };
            *err_slot += sent.iter().zip(&decided).filter(|(a, b)| a != b).count() as u64;
        }
    }

    fn run_batch(&self, snr_index: usize, start: u64, end: u64, n0: f64) -> Vec<u64> {
        let mut errors = vec![0u64; self.engines.len()];
        for trial in start..end {
            self.run_trial(snr_index, trial, n0, &mut errors);
        }
        errors
    }

    /// Runs one SNR point to the stopping rule; one result per engine,
    /// all sharing the same trials.
    pub fn run_point(&self, snr_index: usize, snr_db: f64) -> Vec<PointResult> {
        let spec = &self.spec;
        let n0 = self.noise_variance(snr_db);
        let n_engines = self.engines.len();
        let mut errors = vec![0u64; n_engines];
        let mut trials_done = 0u64;
        let stop;
        loop {
            let round = (BATCH_TRIALS * BATCHES_PER_ROUND).min(spec.max_trials - trials_done);
            let n_batches = round.div_ceil(BATCH_TRIALS);
            let per_batch: Vec<Vec<u64>> = (0..n_batches)
                .into_par_iter()
                .map(|b| {
                    let start = trials_done + b * BATCH_TRIALS;
                    let end = (start + BATCH_TRIALS).min(trials_done + round);
                    self.run_batch(snr_index, start, end, n0)
                })
                .collect();
            for batch in per_batch {
                for (acc, e) in errors.iter_mut().zip(batch) {
                    *acc += e;
                }
            }
            trials_done += round;
            if trials_done >= spec.min_trials && errors.iter().all(|&e| e >= spec.min_errors) {
                stop = StopReason::MinErrors;
                break;
            }
            if trials_done >= spec.max_trials {
                stop = StopReason::TrialCap;
                break;
            }
        }
        let bits = trials_done * spec.modem.bits_per_block() as u64;
        self.engines
            .iter()
            .zip(errors)
            .map(|((kind, _), e)| PointResult {
                record: BerRecord::sim(snr_db, spec.system.label(), kind.label(), bits, e),
                stop,
                trials: trials_done,
            })
            .collect()
    }

    /// Full sweep; outer index follows the engine order given at
    /// construction, inner index the SNR grid.
    pub fn run(&self) -> Vec<Vec<PointResult>> {
        let mut per_engine: Vec<Vec<PointResult>> = vec![Vec::new(); self.engines.len()];
        for (si, &snr_db) in self.spec.snr_db.iter().enumerate() {
            for (slot, result) in per_engine.iter_mut().zip(self.run_point(si, snr_db)) {
                slot.push(result);
            }
        }
        per_engine
    }
}

/// Runs the experiment exactly as configured.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<PointResult>> {
    Ok(Runner::new(spec)?.run().remove(0))
}

/// Runs several detectors over identical trials (gains, bits, and noise
/// shared per trial index).
pub fn run_paired(
    spec: &ExperimentSpec,
    detectors: &[DetectorKind],
) -> Result<Vec<Vec<PointResult>>> {
    Ok(Runner::with_detectors(spec, detectors)?.run())
}

/// Union-bound overlay on the experiment's grid, in record form.
pub fn abep_records(spec: &ExperimentSpec) -> Result<Vec<BerRecord>> {
    let plan = spec.plan()?;
    let engine = UnionBound::new(&spec.modem, &spec.profile)?;
    Ok(spec
        .snr_db
        .iter()
        .map(|&snr_db| {
            let n0 = snr_to_noise(snr_db, &spec.modem, &plan);
            let bound = engine.abep(plan.rho, n0);
            BerRecord::theory(snr_db, spec.system.label(), bound.value)
        })
        .collect())
}

/// Mean transmitted block energy (prefix excluded) over seeded random
/// blocks — the measured counterpart of `PowerPlan.total_tx_power`.
pub fn mean_block_energy(spec: &ExperimentSpec, blocks: u64) -> Result<f64> {
    let plan = spec.plan()?;
    let op = build_daft(spec.modem.n_total, spec.modem.c1, spec.modem.c2);
    let mut acc = 0.0;
    for trial in 0..blocks {
        let mut bits_rng = stream_rng(spec.seed, 0, trial, PURPOSE_BITS);
        let sent: Vec<bool> =
            (0..spec.modem.bits_per_block()).map(|_| bits_rng.gen_bool(0.5)).collect();
        let block = encode_block(&sent, &spec.modem).expect("bit count fixed by config");
        let s = op.idaft(&block.x) * Complex64::from(plan.rho.sqrt());
        acc += s.norm_squared();
    }
    Ok(acc / blocks as f64)
}

/// Runs `f` inside a dedicated rayon pool of `n` threads (or the global
/// pool when `None`). Results are identical either way; this only affects
/// wall-clock time.
pub fn with_threads<T: Send>(n: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match n {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}
