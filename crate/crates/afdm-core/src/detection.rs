//! Bit recovery from the chirp-domain receive vector.
//!
//! Two detectors, two cost classes. Exhaustive maximum likelihood scores
//! every legal block against ‖y − √ρ·H·x‖² and is optimal by construction;
//! its cost grows as 2^b, so it carries a hard guard rail and a factored
//! fast path ([`MlDetector`]) that turns the scan into table lookups.
//! Linear MMSE solves one regularized system per block and demaps each
//! subblock independently — the workhorse for configurations ML cannot
//! reach.
//!
//! The ML scoring exploits block structure: a candidate is a choice of one
//! pattern per subblock position, and because the channel acts linearly on
//! disjoint column groups, ‖H·x‖² splits into per-position energies plus
//! pairwise cross terms. Both tables are computed once per received
//! channel, after which each of the 2^b candidates costs O(G²) additions
//! instead of a length-N_F matrix product.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::im_codec::{
    demap_with_codebook, encode_block, subblock_codebook, word_to_bits, ImBlock, ModemConfig,
    SubblockContent,
};
use crate::{CMat, CVec, MAX_ML_BITS};

// ----------------------------------------------------------------- codebook

/// The legal transmit alphabet of one subblock, in word order, with dense
/// vectors ready for channel products.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub patterns: Vec<SubblockContent>,
    pub vectors: Vec<CVec>,
}

impl Codebook {
    pub fn new(config: &ModemConfig) -> Self {
        let patterns = subblock_codebook(config);
        let vectors = patterns.iter().map(|sb| sb.vector(config.n_sub)).collect();
        Codebook { patterns, vectors }
    }

    /// Number of per-subblock entries, always 2^p.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

fn guard_ml(config: &ModemConfig) -> Result<()> {
    let bits = config.bits_per_block();
    if bits > MAX_ML_BITS {
        return Err(Error::MlTooLarge { bits, max: MAX_ML_BITS });
    }
    Ok(())
}

/// Rebuilds the decided block from its winning bit word.
fn block_from_word(word: u64, config: &ModemConfig) -> (ImBlock, Vec<bool>) {
    let bits = word_to_bits(word, config.bits_per_block());
    let block = encode_block(&bits, config).expect("word width fixed by config");
    (block, bits)
}

// ---------------------------------------------------------- exhaustive ML

/// Optimal detection: argmin over all 2^b candidate blocks of
/// ‖y − √ρ·H·x‖², ties resolved toward the lower block word.
///
/// This is the definitional route — it materializes every candidate and
/// scores it against the full effective matrix. Use [`MlDetector`] for
/// repeated calls.
pub fn ml_detect(
    y: &CVec,
    h_eff: &CMat,
    rho: f64,
    config: &ModemConfig,
    codebook: &Codebook,
) -> Result<(ImBlock, Vec<bool>)> {
    guard_ml(config)?;
    debug_assert_eq!(codebook.len(), 1 << config.p_bits());
    let sqrt_rho = Complex64::from(libm::sqrt(rho));
    let p = config.p_bits();
    let digit_mask = (codebook.len() - 1) as u64;
    let mut best_word = 0u64;
    let mut best_metric = f64::INFINITY;
    let mut x = CVec::zeros(config.n_total);
    for block_word in 0..(1u64 << config.bits_per_block()) {
        for g in 0..config.n_groups {
            let shift = (config.n_groups - 1 - g) * p;
            let digit = ((block_word >> shift) & digit_mask) as usize;
            x.rows_mut(g * config.n_sub, config.n_sub)
                .copy_from(&codebook.vectors[digit]);
        }
        let metric = (y - (h_eff * &x) * sqrt_rho).norm_squared();
        if metric < best_metric {
            best_metric = metric;
            best_word = block_word;
        }
    }
    Ok(block_from_word(best_word, config))
}

/// Reusable exhaustive-ML engine with factored candidate scoring.
///
/// Holds the per-subblock codebook; each [`detect`](Self::detect) call
/// precomputes the pattern images H^{(g)}·v_j for the given channel, their
/// correlations with y, and the cross-position Gram table, then walks the
/// candidate tree accumulating partial metrics. The decision — including
/// the tie-break — is identical to [`ml_detect`].
pub struct MlDetector {
    config: ModemConfig,
    codebook: Codebook,
}

impl MlDetector {
    pub fn new(config: &ModemConfig) -> Result<Self> {
        guard_ml(config)?;
        Ok(MlDetector { config: config.clone(), codebook: Codebook::new(config) })
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn detect(&self, y: &CVec, h_eff: &CMat, rho: f64) -> (ImBlock, Vec<bool>) {
        let cfg = &self.config;
        let (groups, n_sub, n_pat) = (cfg.n_groups, cfg.n_sub, self.codebook.len());
        let sqrt_rho = libm::sqrt(rho);

        // Images of every pattern at every position under this channel.
        // Patterns have K non-zeros, so each image is K scaled columns.
        let mut images: Vec<Vec<CVec>> = Vec::with_capacity(groups);
        for g in 0..groups {
            let mut at_g = Vec::with_capacity(n_pat);
            for sb in &self.codebook.patterns {
                let mut u = CVec::zeros(cfg.n_total);
                for (&idx, &sym) in sb.indices.iter().zip(&sb.symbols) {
                    u.axpy(sym, &h_eff.column(g * n_sub + idx - 1), Complex64::ONE);
                }
                at_g.push(u);
            }
            images.push(at_g);
        }

        // Candidate metric, dropping the constant ‖y‖²:
        //   Σ_g lin[g][j_g] + Σ_{g<g'} cross[g][g'][j_g][j_g']
        // with lin = ρ‖u‖² − 2√ρ·Re⟨u, y⟩ and cross = 2ρ·Re⟨u, u'⟩.
        let lin: Vec<Vec<f64>> = images
            .iter()
            .map(|at_g| {
                at_g.iter()
                    .map(|u| rho * u.norm_squared() - 2.0 * sqrt_rho * u.dotc(y).re)
                    .collect()
            })
            .collect();
        let mut cross: Vec<Vec<f64>> = vec![Vec::new(); groups * groups];
        for g1 in 0..groups {
            for g2 in (g1 + 1)..groups {
                let mut table = vec![0.0; n_pat * n_pat];
                for (j1, u1) in images[g1].iter().enumerate() {
                    for (j2, u2) in images[g2].iter().enumerate() {
                        table[j1 * n_pat + j2] = 2.0 * rho * u1.dotc(u2).re;
                    }
                }
                cross[g1 * groups + g2] = table;
            }
        }

        // Admissible lower bound on the metric still to come from
        // positions g.. : every undecided term replaced by its table
        // minimum. Lets the scan skip subtrees that cannot beat the
        // incumbent; candidates tied with the incumbent are skipped too,
        // which is exactly what the strict-< update would do.
        let table_min = |t: &Vec<f64>| t.iter().copied().fold(f64::INFINITY, f64::min);
        let mut tail_bound = vec![0.0; groups + 1];
        for g in (0..groups).rev() {
            let mut level = table_min(&lin[g]);
            for g1 in 0..g {
                level += table_min(&cross[g1 * groups + g]);
            }
            tail_bound[g] = tail_bound[g + 1] + level;
        }

        let mut scan = Scan {
            lin: &lin,
            cross: &cross,
            tail_bound: &tail_bound,
            groups,
            n_pat,
            digits: vec![0; groups],
            best_digits: vec![0; groups],
            best_metric: f64::INFINITY,
        };
        scan.descend(0, 0.0);

        let p = cfg.p_bits();
        let mut word = 0u64;
        for &d in &scan.best_digits {
            word = (word << p) | d as u64;
        }
        block_from_word(word, cfg)
    }
}

struct Scan<'a> {
    lin: &'a [Vec<f64>],
    cross: &'a [Vec<f64>],
    tail_bound: &'a [f64],
    groups: usize,
    n_pat: usize,
    digits: Vec<usize>,
    best_digits: Vec<usize>,
    best_metric: f64,
}

impl Scan<'_> {
    fn descend(&mut self, g: usize, acc: f64) {
        if g == self.groups {
            // Strict < keeps the first (lowest-word) candidate on ties.
            if acc < self.best_metric {
                self.best_metric = acc;
                self.best_digits.copy_from_slice(&self.digits);
            }
            return;
        }
        for j in 0..self.n_pat {
            let mut add = self.lin[g][j];
            for g_prev in 0..g {
                add += self.cross[g_prev * self.groups + g][self.digits[g_prev] * self.n_pat + j];
            }
            // Even the rosiest completion of this prefix loses (or ties)
            // against the incumbent — skip the whole subtree.
            if acc + add + self.tail_bound[g + 1] >= self.best_metric {
                continue;
            }
            self.digits[g] = j;
            self.descend(g + 1, acc + add);
        }
    }
}

// ------------------------------------------------------------------ MMSE

/// Linear MMSE estimate of the chirp-domain block.
///
/// Solves (HᴴH + (N₀/ρ)·I)·x̃ = Hᴴ·(y/√ρ) by Cholesky — the transmit
/// power is folded out of y so the regularizer is the per-symbol
/// noise-to-signal ratio and x̃ lands on the unit-power constellation
/// scale. At N₀ = 0 a 1e−12 ridge stands in for the pseudo-inverse.
pub fn mmse_equalize(y: &CVec, h_eff: &CMat, n0: f64, rho: f64) -> CVec {
    debug_assert!(rho > 0.0 && n0 >= 0.0);
    let n = h_eff.ncols();
    let ridge = if n0 > 0.0 { n0 / rho } else { 1e-12 };
    let mut gram = h_eff.adjoint() * h_eff;
    for i in 0..n {
        gram[(i, i)] += Complex64::from(ridge);
    }
    let rhs = h_eff.adjoint() * (y * Complex64::from(1.0 / libm::sqrt(rho)));
    nalgebra::linalg::Cholesky::new(gram)
        .expect("Gram matrix with positive ridge is positive definite")
        .solve(&rhs)
}

/// MMSE equalization followed by independent per-subblock demapping.
pub fn mmse_detect(y: &CVec, h_eff: &CMat, n0: f64, rho: f64, config: &ModemConfig) -> Vec<bool> {
    let codebook = subblock_codebook(config);
    demap_equalized(&mmse_equalize(y, h_eff, n0, rho), &codebook, config)
}

fn demap_equalized(
    x_tilde: &CVec,
    codebook: &[SubblockContent],
    config: &ModemConfig,
) -> Vec<bool> {
    let mut bits = Vec::with_capacity(config.bits_per_block());
    let flat = x_tilde.as_slice();
    for g in 0..config.n_groups {
        let seg = &flat[g * config.n_sub..(g + 1) * config.n_sub];
        bits.extend(demap_with_codebook(seg, codebook, config));
    }
    bits
}

/// Reusable MMSE engine for a fixed channel geometry.
///
/// The per-path matrices H_i are gain-independent, so the Gram blocks
/// H_iᴴH_j and adjoints H_iᴴ are precomputed once; each realization then
/// assembles HᴴH = Σᵢⱼ h̄ᵢhⱼ·(H_iᴴH_j) in O(P²·N_F²) instead of a fresh
/// O(N_F³) triple product.
pub struct MmseEqualizer {
    gram_blocks: Vec<CMat>,
    adjoints: Vec<CMat>,
    codebook: Vec<SubblockContent>,
    config: ModemConfig,
    n_paths: usize,
}

impl MmseEqualizer {
    pub fn new(config: &ModemConfig, per_path: &[CMat]) -> Self {
        let adjoints: Vec<CMat> = per_path.iter().map(|h| h.adjoint()).collect();
        let mut gram_blocks = Vec::with_capacity(per_path.len() * per_path.len());
        for hi in &adjoints {
            for hj in per_path {
                gram_blocks.push(hi * hj);
            }
        }
        MmseEqualizer {
            gram_blocks,
            adjoints,
            codebook: subblock_codebook(config),
            config: config.clone(),
            n_paths: per_path.len(),
        }
    }

    pub fn equalize(&self, y: &CVec, gains: &[Complex64], n0: f64, rho: f64) -> CVec {
        debug_assert!(rho > 0.0 && n0 >= 0.0);
        debug_assert_eq!(gains.len(), self.n_paths);
        let n = self.config.n_total;
        let mut gram = CMat::zeros(n, n);
        for i in 0..self.n_paths {
            for j in 0..self.n_paths {
                let c = gains[i].conj() * gains[j];
                gram.iter_mut()
                    .zip(self.gram_blocks[i * self.n_paths + j].iter())
                    .for_each(|(g, t)| *g += c * t);
            }
        }
        let ridge = if n0 > 0.0 { n0 / rho } else { 1e-12 };
        for i in 0..n {
            gram[(i, i)] += Complex64::from(ridge);
        }
        let y_scaled = y * Complex64::from(1.0 / libm::sqrt(rho));
        let mut rhs = CVec::zeros(n);
        for (i, adj) in self.adjoints.iter().enumerate() {
            rhs += (adj * &y_scaled) * gains[i].conj();
        }
        nalgebra::linalg::Cholesky::new(gram)
            .expect("Gram matrix with positive ridge is positive definite")
            .solve(&rhs)
    }

    pub fn detect(&self, y: &CVec, gains: &[Complex64], n0: f64, rho: f64) -> Vec<bool> {
        demap_equalized(&self.equalize(y, gains, n0, rho), &self.codebook, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_path_matrix, effective_channel, standard_profiles, PathRealization};
    use crate::daft::{build_daft, choose_c1};
    use crate::im_codec::bits_to_word;
    use crate::power::PowerStrategy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn cfg(n_total: usize, n_sub: usize, k: usize, m: usize) -> ModemConfig {
        ModemConfig::new(n_total, n_sub, k, m, 0.0, 0.0, 3, PowerStrategy::Conventional).unwrap()
    }

    fn gaussian_c(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * scale
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| gaussian_c(rng, core::f64::consts::FRAC_1_SQRT_2))
    }

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<bool> {
        (0..len).map(|_| rng.gen_bool(0.5)).collect()
    }

    /// Deliberately naive third route: enumerate bit words, encode, score.
    fn brute_force_bits(y: &CVec, h: &CMat, rho: f64, config: &ModemConfig) -> Vec<bool> {
        let b = config.bits_per_block();
        let sqrt_rho = Complex64::from(libm::sqrt(rho));
        let mut best = (f64::INFINITY, 0u64);
        for word in 0..(1u64 << b) {
            let bits = word_to_bits(word, b);
            let block = encode_block(&bits, config).unwrap();
            let metric = (y - (h * &block.x) * sqrt_rho).norm_squared();
            if metric < best.0 {
                best = (metric, word);
            }
        }
        word_to_bits(best.1, b)
    }

    #[test]
    fn ml_recovers_noise_free_blocks_over_a_physical_channel() {
        let n = 8;
        let profiles = standard_profiles();
        let profile = &profiles["2-path"];
        let c1 = choose_c1(profile.alpha_max(), 1, n, &[0, 1]).unwrap();
        let config = ModemConfig::new(n, 4, 2, 2, c1, 0.0, 3, PowerStrategy::Conventional).unwrap();
        let op = build_daft(n, c1, 0.0);
        let codebook = Codebook::new(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = 1.8;
        for _ in 0..32 {
            let gains = PathRealization::new(vec![gaussian_c(&mut rng, 0.7), gaussian_c(&mut rng, 0.7)]);
            let eff = effective_channel(profile, &gains, &op);
            let sent = random_bits(&mut rng, config.bits_per_block());
            let x = encode_block(&sent, &config).unwrap().x;
            let y = (&eff.h_eff * &x) * Complex64::from(libm::sqrt(rho));
            let (block, bits) = ml_detect(&y, &eff.h_eff, rho, &config, &codebook).unwrap();
            assert_eq!(bits, sent);
            assert_eq!(block.x, x);
        }
    }

    #[test]
    fn ml_tie_breaks_to_the_lowest_word_on_zero_input() {
        // y = 0 and H = I: every candidate has the same energy ρ·G·K, so
        // the scan must keep block word 0.
        let config = cfg(8, 4, 2, 2);
        let codebook = Codebook::new(&config);
        let y = CVec::zeros(8);
        let h = CMat::identity(8, 8);
        let (_, bits) = ml_detect(&y, &h, 1.0, &config, &codebook).unwrap();
        assert_eq!(bits_to_word(&bits), 0);
        let det = MlDetector::new(&config).unwrap();
        let (_, bits_f) = det.detect(&y, &h, 1.0);
        assert_eq!(bits_f, bits);
    }

    #[test]
    fn ml_guard_rail_redirects_to_mmse() {
        // (64, 4, 3, 4): 16 subblocks × 8 bits = 128 bits per block.
        let config = cfg(64, 4, 3, 4);
        let codebook = Codebook::new(&config);
        let y = CVec::zeros(64);
        let h = CMat::identity(64, 64);
        let err = ml_detect(&y, &h, 1.0, &config, &codebook).unwrap_err();
        match &err {
            Error::MlTooLarge { bits, max } => {
                assert_eq!(*bits, 128);
                assert_eq!(*max, MAX_ML_BITS);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(alloc::format!("{err}").contains("MMSE"));
        assert!(MlDetector::new(&config).is_err());
    }

    #[test]
    fn three_ml_routes_agree_on_random_noisy_trials() {
        // Definitional scan, factored detector, and a bit-level brute
        // force must return identical bits — same argmin, same tie rule.
        let config = cfg(8, 4, 2, 2);
        let codebook = Codebook::new(&config);
        let detector = MlDetector::new(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let rho = 2.5;
        let mut disagreements = 0;
        for _ in 0..1200 {
            let h = random_matrix(&mut rng, 8);
            let sent = random_bits(&mut rng, config.bits_per_block());
            let x = encode_block(&sent, &config).unwrap().x;
            let noise = CVec::from_fn(8, |_, _| gaussian_c(&mut rng, 0.35));
            let y = (&h * &x) * Complex64::from(libm::sqrt(rho)) + noise;
            let (_, a) = ml_detect(&y, &h, rho, &config, &codebook).unwrap();
            let (_, b) = detector.detect(&y, &h, rho);
            let c = brute_force_bits(&y, &h, rho, &config);
            if a != b || a != c {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn mmse_identity_channel_recovers_scaled_input() {
        let y = CVec::from_fn(6, |i, _| Complex64::new(i as f64 + 0.5, -(i as f64)));
        let h = CMat::identity(6, 6);
        let rho = 4.0;
        let x_tilde = mmse_equalize(&y, &h, 0.0, rho);
        // n0 = 0 ridge is 1e−12: x̃ ≈ y/√ρ = y/2.
        assert!((&x_tilde - &y * Complex64::from(0.5)).norm() < 1e-9);
    }

    #[test]
    fn mmse_unitary_channel_matches_the_wiener_shrinkage() {
        // For unitary H the solve collapses to x̃ = (ρ/(ρ+N₀))·Hᴴy/√ρ.
        let n = 16;
        let op = build_daft(n, 3.0 / 32.0, 0.004);
        let h = op.a_matrix().clone_owned();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = CVec::from_fn(n, |_, _| gaussian_c(&mut rng, 1.0));
        let (rho, n0) = (2.0, 0.3);
        let x_tilde = mmse_equalize(&y, &h, n0, rho);
        let expected =
            (h.adjoint() * &y) * Complex64::from(rho / (rho + n0) / libm::sqrt(rho));
        assert!((&x_tilde - &expected).norm() < 1e-10);
    }

    #[test]
    fn mmse_near_zero_ridge_reconstructs_through_a_random_channel() {
        let n = 12;
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        // Diagonal boost keeps the random matrix well conditioned.
        let h = random_matrix(&mut rng, n) + CMat::identity(n, n) * Complex64::from(3.0);
        let x = CVec::from_fn(n, |_, _| gaussian_c(&mut rng, 1.0));
        let rho = 1.7;
        let y = (&h * &x) * Complex64::from(libm::sqrt(rho));
        let x_tilde = mmse_equalize(&y, &h, 1e-9, rho);
        assert!((&x_tilde - &x).norm() / x.norm() < 1e-6);
    }

    #[test]
    fn mmse_detect_is_exact_without_noise_and_matches_nearest_psk_when_all_active()
    {
        let n = 8;
        let profiles = standard_profiles();
        let profile = &profiles["3-path"];
        let c1 = choose_c1(profile.alpha_max(), 1, n, &[0, 1, 3]).unwrap();
        let op = build_daft(n, c1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(77);

        let config = ModemConfig::new(n, 4, 2, 4, c1, 0.0, 3, PowerStrategy::Conventional).unwrap();
        for _ in 0..24 {
            let gains = PathRealization::new(vec![
                gaussian_c(&mut rng, 0.6),
                gaussian_c(&mut rng, 0.6),
                gaussian_c(&mut rng, 0.6),
            ]);
            let eff = effective_channel(profile, &gains, &op);
            let sent = random_bits(&mut rng, config.bits_per_block());
            let x = encode_block(&sent, &config).unwrap().x;
            let rho = 1.3;
            let y = (&eff.h_eff * &x) * Complex64::from(libm::sqrt(rho));
            assert_eq!(mmse_detect(&y, &eff.h_eff, 1e-9, rho, &config), sent);
        }

        // All-active single-symbol subblocks: the demapper degenerates to
        // an independent nearest-PSK decision per equalized symbol.
        let classic = ModemConfig::new(n, 1, 1, 4, c1, 0.0, 3, PowerStrategy::Conventional).unwrap();
        let constellation: Vec<Complex64> = subblock_codebook(&classic)
            .iter()
            .map(|sb| sb.symbols[0])
            .collect();
        let gains = PathRealization::new(vec![
            gaussian_c(&mut rng, 0.6),
            gaussian_c(&mut rng, 0.6),
            gaussian_c(&mut rng, 0.6),
        ]);
        let eff = effective_channel(profile, &gains, &op);
        let sent = random_bits(&mut rng, classic.bits_per_block());
        let x = encode_block(&sent, &classic).unwrap().x;
        let rho = 0.9;
        let noise = CVec::from_fn(n, |_, _| gaussian_c(&mut rng, 0.2));
        let y = (&eff.h_eff * &x) * Complex64::from(libm::sqrt(rho)) + noise;
        let bits = mmse_detect(&y, &eff.h_eff, 0.08, rho, &classic);
        let x_tilde = mmse_equalize(&y, &eff.h_eff, 0.08, rho);
        let mut symbolwise = Vec::new();
        for i in 0..n {
            let nearest = (0..4)
                .min_by(|&a, &b| {
                    let da = (x_tilde[i] - constellation[a]).norm_sqr();
                    let db = (x_tilde[i] - constellation[b]).norm_sqr();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            symbolwise.extend(word_to_bits(nearest as u64, 2));
        }
        assert_eq!(bits, symbolwise);
    }

    #[test]
    fn detection_is_invariant_under_common_power_rescaling() {
        let config = cfg(8, 4, 2, 2);
        let codebook = Codebook::new(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..200 {
            let h = random_matrix(&mut rng, 8);
            let sent = random_bits(&mut rng, config.bits_per_block());
            let x = encode_block(&sent, &config).unwrap().x;
            let rho = 1.1;
            let n0 = 0.4;
            let noise = CVec::from_fn(8, |_, _| gaussian_c(&mut rng, libm::sqrt(n0 / 2.0)));
            let y = (&h * &x) * Complex64::from(libm::sqrt(rho)) + noise;
            let c = 3.7;
            let y_scaled = &y * Complex64::from(c);
            let (_, base) = ml_detect(&y, &h, rho, &config, &codebook).unwrap();
            let (_, scaled) = ml_detect(&y_scaled, &h, rho * c * c, &config, &codebook).unwrap();
            assert_eq!(base, scaled);
            let mmse_base = mmse_detect(&y, &h, n0, rho, &config);
            let mmse_scaled = mmse_detect(&y_scaled, &h, n0 * c * c, rho * c * c, &config);
            assert_eq!(mmse_base, mmse_scaled);
        }
    }

    #[test]
    fn factored_mmse_matches_the_definitional_solve() {
        let n = 16;
        let profiles = standard_profiles();
        let profile = &profiles["4-path"];
        let c1 = choose_c1(profile.alpha_max(), 1, n, &profile.delays()).unwrap();
        let config = ModemConfig::new(n, 4, 1, 4, c1, 0.0, 3, PowerStrategy::Conventional).unwrap();
        let op = build_daft(n, c1, 0.0);
        let per_path: Vec<CMat> =
            profile.paths.iter().map(|p| build_path_matrix(p, &op)).collect();
        let engine = MmseEqualizer::new(&config, &per_path);
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..20 {
            let gains: Vec<Complex64> = (0..4).map(|_| gaussian_c(&mut rng, 0.5)).collect();
            let eff = effective_channel(profile, &PathRealization::new(gains.clone()), &op);
            let y = CVec::from_fn(n, |_, _| gaussian_c(&mut rng, 1.0));
            let (rho, n0) = (2.2, 0.15);
            let direct = mmse_equalize(&y, &eff.h_eff, n0, rho);
            let factored = engine.equalize(&y, &gains, n0, rho);
            assert!((&direct - &factored).norm() < 1e-9);
            assert_eq!(
                mmse_detect(&y, &eff.h_eff, n0, rho, &config),
                engine.detect(&y, &gains, n0, rho)
            );
        }
    }
}
