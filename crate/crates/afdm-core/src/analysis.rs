//! Closed-form performance engine.
//!
//! For a pairwise error x → x̂ the receive statistic is the quadratic form
//! δ = hᴴΨh in the path gains, with Ψ = ρ·(Φ(x̂)−Φ(x))ᴴ(Φ(x̂)−Φ(x)) and
//! Φ(x) = [H₁x | … | H_Px] the per-path image of the block. Averaging the
//! Gaussian tail over the gain distribution via the MGF of δ yields the
//! exact pairwise error probability as a finite smooth integral,
//!
//! ```text
//! PEP = (1/π) ∫₀^{π/2} Π_i (1 + λ_i/(4·P·N₀·sin²θ))^(−m_i) dθ,
//! ```
//!
//! where λ_i are the eigenvalues of Ψ (the 1/P is the gain variance).
//! Dropping the sin² (integrand at θ = π/2) gives the Chernoff bound.
//! Summing Hamming-weighted PEPs over all single-subblock pairs and
//! normalizing by the bits per subblock gives the average-bit-error-
//! probability union bound, which tightens onto the simulated curve as SNR
//! grows and whose log-log slope exposes the diversity order P.
//!
//! Differences confined to one subblock make Φ(x̂)−Φ(x) depend only on the
//! difference pattern and its position, so the union bound enumerates
//! 2^p·(2^p−1) ordered pairs per subblock position and averages over the
//! G positions (the chirp channel is not block-circulant, so positions are
//! not interchangeable in general).

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::channel::{build_path_matrix, ChannelProfile};
use crate::daft::build_daft;
use crate::error::{Error, Result};
use crate::im_codec::{subblock_codebook, ModemConfig};
use crate::power::PowerPlan;
use crate::{CMat, CVec};

// ----------------------------------------------------- spectral efficiency

/// Bits per subcarrier use: η = G·(⌊log₂C(N,K)⌋ + K·log₂M)/N_F.
pub fn spectral_efficiency(config: &ModemConfig) -> f64 {
    config.bits_per_block() as f64 / config.n_total as f64
}

/// The all-active reference: η = log₂M.
pub fn spectral_efficiency_classic(mod_order: usize) -> f64 {
    debug_assert!(mod_order.is_power_of_two() && mod_order >= 2);
    mod_order.trailing_zeros() as f64
}

// --------------------------------------------------------------- quadrature

/// Fixed Gauss–Legendre rule on [−1, 1], nodes ascending.
///
/// Nodes and weights come from the eigendecomposition of the Jacobi
/// tridiagonal (Golub–Welsch): nodes are its eigenvalues, weights twice the
/// squared first eigenvector components. Deterministic, no tables.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Node count used by the error-probability integrals.
pub const PEP_QUADRATURE_NODES: usize = 64;

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = k as f64 / libm::sqrt(4.0 * (k * k) as f64 - 1.0);
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eig = nalgebra::SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], 2.0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        GaussLegendre {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// ∫ f over [0, π/2] with the affine node map.
    pub fn integrate_quarter_circle(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = core::f64::consts::FRAC_PI_4;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(half * (t + 1.0)))
            .sum::<f64>()
            * half
    }
}

// ------------------------------------------------------------ pairwise event

/// Per-path image of a block: column i is H_i·x, so Φ(x)·h = H_eff·x.
pub fn build_phi(x: &CVec, per_path: &[CMat]) -> CMat {
    let n = x.len();
    let mut phi = CMat::zeros(n, per_path.len());
    for (i, h) in per_path.iter().enumerate() {
        phi.column_mut(i).copy_from(&(h * x));
    }
    phi
}

/// One pairwise error event x → x̂ with its quadratic-form kernel.
#[derive(Debug, Clone)]
pub struct PairwiseEvent {
    pub x: CVec,
    pub x_hat: CVec,
    /// Ψ = ρ·(Φ(x̂)−Φ(x))ᴴ(Φ(x̂)−Φ(x)), Hermitian PSD, P×P.
    pub psi: CMat,
    /// Eigenvalues of Ψ with multiplicities; zeros kept so Σmᵢ = P.
    pub eigenvalues: Vec<(f64, usize)>,
    /// Bit distance between the two candidates' labels.
    pub hamming: u32,
}

/// Builds the event kernel for a candidate pair under transmit power ρ per
/// active subcarrier.
pub fn pairwise_event(
    x: &CVec,
    x_hat: &CVec,
    per_path: &[CMat],
    rho: f64,
    hamming: u32,
) -> PairwiseEvent {
    let diff = x_hat - x;
    let phi = build_phi(&diff, per_path);
    let psi = (phi.adjoint() * &phi) * Complex64::from(rho);
    let eigenvalues = grouped_eigenvalues(&psi);
    PairwiseEvent { x: x.clone(), x_hat: x_hat.clone(), psi, eigenvalues, hamming }
}

/// Eigenvalues of a Hermitian PSD matrix, descending, with near-equal
/// values merged into multiplicities and everything below 1e−10·λ_max
/// clamped to exactly zero.
pub fn grouped_eigenvalues(psi: &CMat) -> Vec<(f64, usize)> {
    // Hermitize defensively; Ψ is Hermitian up to rounding.
    let h = (psi + psi.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let lmax = vals.first().copied().unwrap_or(0.0).max(0.0);
    let floor = 1e-10 * lmax;
    let merge = 1e-8 * lmax;
    let mut grouped: Vec<(f64, usize)> = Vec::new();
    for v in vals {
        let v = if v < floor { 0.0 } else { v };
        match grouped.last_mut() {
            Some((head, m)) if (*head - v).abs() <= merge => *m += 1,
            _ => grouped.push((v, 1)),
        }
    }
    grouped
}

// ------------------------------------------------------------------- MGF

/// E[exp(s·hᴴΨh)] for h with i.i.d. CN(0, 1/P) entries:
/// Π_i (1 − s·λ_i/P)^(−m_i), valid for s below the smallest pole.
pub fn mgf_quadform(eigenvalues: &[(f64, usize)], s: f64, n_paths: usize) -> f64 {
    let p = n_paths as f64;
    let mut acc = 1.0;
    for &(lambda, m) in eigenvalues {
        let base = 1.0 - s * lambda / p;
        debug_assert!(base > 0.0, "MGF evaluated beyond its pole");
        acc *= libm::pow(base, -(m as f64));
    }
    acc
}

// ------------------------------------------------------------------- PEP

/// Exact pairwise error probability by 64-node quadrature of the MGF
/// integrand over [0, π/2].
pub fn pep_exact(event: &PairwiseEvent, n0: f64, n_paths: usize) -> f64 {
    let gl = GaussLegendre::new(PEP_QUADRATURE_NODES);
    pep_exact_from_eigenvalues(&event.eigenvalues, n0, n_paths, &gl)
}

/// `pep_exact` with caller-owned eigenvalues and quadrature (the hot path
/// for union bounds, which reuse one rule across thousands of events).
pub fn pep_exact_from_eigenvalues(
    eigenvalues: &[(f64, usize)],
    n0: f64,
    n_paths: usize,
    gl: &GaussLegendre,
) -> f64 {
    let integral = gl.integrate_quarter_circle(|theta| {
        let sin2 = libm::sin(theta) * libm::sin(theta);
        mgf_quadform(eigenvalues, -1.0 / (4.0 * n0 * sin2), n_paths)
    });
    integral / core::f64::consts::PI
}

/// Chernoff bound: the integrand at θ = π/2, i.e. the MGF at
/// s = −1/(4N₀). Always ≥ the exact PEP.
pub fn pep_chernoff(event: &PairwiseEvent, n0: f64, n_paths: usize) -> f64 {
    pep_chernoff_from_eigenvalues(&event.eigenvalues, n0, n_paths)
}

/// `pep_chernoff` on bare eigenvalues.
pub fn pep_chernoff_from_eigenvalues(
    eigenvalues: &[(f64, usize)],
    n0: f64,
    n_paths: usize,
) -> f64 {
    mgf_quadform(eigenvalues, -1.0 / (4.0 * n0), n_paths)
}

// ------------------------------------------------------------ union bound

/// ABEP value with its low-SNR vacuity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbepValue {
    pub value: f64,
    /// True when the raw union sum exceeded 1/2 and was clamped.
    pub clamped: bool,
}

/// Precomputed union-bound engine for one (config, profile) pair.
///
/// Event kernels are SNR-independent up to scaling — Ψ is linear in ρ and
/// N₀ only enters the integrand — so the per-pair eigenvalues are computed
/// once (at ρ = 1) and every (ρ, N₀) query is a cheap quadrature sweep.
pub struct UnionBound {
    /// (eigenvalues of Ψ/ρ, summed bit weight) per unordered pair and
    /// subblock position; the weight already counts both directions.
    events: Vec<(Vec<(f64, usize)>, f64)>,
    n_paths: usize,
    p_bits: usize,
    n_groups: usize,
    gl: GaussLegendre,
}

/// Guard rail: the union bound enumerates 2^p patterns per subblock.
pub const MAX_UNION_BOUND_P: usize = 12;

impl UnionBound {
    pub fn new(config: &ModemConfig, profile: &ChannelProfile) -> Result<Self> {
        let p_bits = config.p_bits();
        if p_bits > MAX_UNION_BOUND_P {
            return Err(Error::Config {
                field: "n_sub",
                reason: alloc::format!(
                    "union bound enumerates 2^p subblock patterns; p = {p_bits} exceeds {MAX_UNION_BOUND_P}"
                ),
            });
        }
        let op = build_daft(config.n_total, config.c1, config.c2);
        let per_path: Vec<CMat> =
            profile.paths.iter().map(|path| build_path_matrix(path, &op)).collect();
        let patterns = subblock_codebook(config);
        let vecs: Vec<CVec> = patterns.iter().map(|sb| sb.vector(config.n_sub)).collect();
        let words: Vec<u64> = patterns.iter().map(|sb| sb.word()).collect();
        let n_pat = vecs.len();
        let n_paths = profile.n_paths();

        let mut events = Vec::with_capacity(config.n_groups * n_pat * (n_pat - 1) / 2);
        for g in 0..config.n_groups {
            // Column block of each H_i seen by subblock position g.
            let blocks: Vec<CMat> = per_path
                .iter()
                .map(|h| h.columns(g * config.n_sub, config.n_sub).clone_owned())
                .collect();
            for a in 0..n_pat {
                for b in (a + 1)..n_pat {
                    let d = &vecs[b] - &vecs[a];
                    let cols: Vec<CVec> = blocks.iter().map(|blk| blk * &d).collect();
                    let mut psi = CMat::zeros(n_paths, n_paths);
                    for i in 0..n_paths {
                        for j in 0..n_paths {
                            psi[(i, j)] = cols[i].dotc(&cols[j]);
                        }
                    }
                    let eigs = grouped_eigenvalues(&psi);
                    // Ψ is shared by (a→b) and (b→a); count both.
                    let weight = 2.0 * (words[a] ^ words[b]).count_ones() as f64;
                    events.push((eigs, weight));
                }
            }
        }
        Ok(Self {
            events,
            n_paths,
            p_bits,
            n_groups: config.n_groups,
            gl: GaussLegendre::new(PEP_QUADRATURE_NODES),
        })
    }

    /// The union bound at one operating point, clamped to 1/2.
    pub fn abep(&self, rho: f64, n0: f64) -> AbepValue {
        let mut sum = 0.0;
        let mut scaled: Vec<(f64, usize)> = Vec::new();
        for (eigs, weight) in &self.events {
            scaled.clear();
            scaled.extend(eigs.iter().map(|&(l, m)| (l * rho, m)));
            sum += weight * pep_exact_from_eigenvalues(&scaled, n0, self.n_paths, &self.gl);
        }
        let norm = (self.n_groups * self.p_bits * (1usize << self.p_bits)) as f64;
        let raw = sum / norm;
        if raw > 0.5 {
            AbepValue { value: 0.5, clamped: true }
        } else {
            AbepValue { value: raw, clamped: false }
        }
    }
}

/// One-shot union bound under a power plan.
pub fn abep_union(
    config: &ModemConfig,
    profile: &ChannelProfile,
    plan: &PowerPlan,
    n0: f64,
) -> Result<AbepValue> {
    Ok(UnionBound::new(config, profile)?.abep(plan.rho, n0))
}

// -------------------------------------------------------------- slope fit

/// Least-squares slope of log₁₀(value) against SNR/10 — the decade-per-
/// decade dive rate of a BER curve, whose negative is the empirical
/// diversity order.
pub fn diversity_slope(points: &[(f64, f64)]) -> Result<f64> {
    let usable = points.iter().filter(|p| p.1 > 0.0).count();
    if usable < 3 || usable != points.len() {
        return Err(Error::SlopeFit { usable });
    }
    let n = points.len() as f64;
    let xs = points.iter().map(|p| p.0 / 10.0);
    let ys = points.iter().map(|p| libm::log10(p.1));
    let mean_x = xs.clone().sum::<f64>() / n;
    let mean_y = ys.clone().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.zip(ys) {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    Ok(num / den)
}
