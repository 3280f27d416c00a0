//! Doubly dispersive channels: integer delays, possibly fractional
//! normalized Doppler, i.i.d. complex Gaussian path gains.
//!
//! Three equivalent views of the same channel are maintained and
//! cross-checked against one another:
//!
//! 1. **Time domain** — `apply_time_domain` runs the tapped-delay-line
//!    model r[n] = Σ_i h_i·e^{−j2πε_i n/N}·s[n−l_i] on the prefixed
//!    signal.
//! 2. **Matrix product** — `build_path_matrix` forms
//!    H_i = A·Γ_i·Δ_i·Πˡⁱ·Aᴴ, the chirp-domain image of path i (prefix
//!    phase correction Γ, Doppler diagonal Δ, cyclic delay Π). This is the
//!    authoritative definition.
//! 3. **Closed form** — `closed_form_entry` evaluates each H_i entry
//!    directly as a phase factor times a Dirichlet-like kernel. The kernel
//!    peaks where the column index leads the row by
//!    Ind_i = (α_i + 2N·c1·l_i) mod N; with integer Doppler every other
//!    entry is exactly zero, with fractional Doppler the energy leaks into
//!    the neighboring positions.
//!
//! Route 2 is what detection consumes; routes 1 and 3 exist so that every
//! experiment rests on independently validated constructions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::daft::DaftOperator;
use crate::error::{Error, Result};
use crate::im_codec::ModemConfig;
use crate::{CMat, CVec};

// ---------------------------------------------------------------- profile

/// One propagation path: integer delay in samples, Doppler normalized to
/// the subcarrier spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub delay: usize,
    pub doppler: f64,
}

impl Path {
    /// Integer part of the Doppler under the unique split
    /// ε = α + β with α ∈ ℤ, β ∈ (−1/2, 1/2].
    pub fn alpha(&self) -> i64 {
        libm::ceil(self.doppler - 0.5) as i64
    }

    /// Fractional Doppler β ∈ (−1/2, 1/2].
    pub fn beta(&self) -> f64 {
        self.doppler - self.alpha() as f64
    }
}

/// A deterministic delay–Doppler layout. Gains are random per realization;
/// the layout itself is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub paths: Vec<Path>,
}

impl ChannelProfile {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::EmptyProfile);
        }
        Ok(Self { paths })
    }

    /// Builds a profile from parallel delay/Doppler arrays (the config-file
    /// form).
    pub fn from_taps(delays: &[usize], dopplers: &[f64]) -> Result<Self> {
        if delays.len() != dopplers.len() {
            return Err(Error::Config {
                field: "dopplers",
                reason: alloc::format!(
                    "got {} dopplers for {} delays",
                    dopplers.len(),
                    delays.len()
                ),
            });
        }
        Self::new(
            delays
                .iter()
                .zip(dopplers)
                .map(|(&delay, &doppler)| Path { delay, doppler })
                .collect(),
        )
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    /// Longest path delay (what the prefix must cover).
    pub fn l_max(&self) -> usize {
        self.paths.iter().map(|p| p.delay).max().unwrap_or(0)
    }

    /// Largest integer Doppler magnitude, the α_max that sizes c1.
    pub fn alpha_max(&self) -> u32 {
        self.paths.iter().map(|p| p.alpha().unsigned_abs() as u32).max().unwrap_or(0)
    }

    /// All path delays, in profile order.
    pub fn delays(&self) -> Vec<usize> {
        self.paths.iter().map(|p| p.delay).collect()
    }
}

/// The stock 2/3/4-path evaluation profiles (delays in samples, Doppler
/// normalized): the fixed layouts every comparison experiment runs on.
pub fn standard_profiles() -> BTreeMap<&'static str, ChannelProfile> {
    let mut m = BTreeMap::new();
    m.insert(
        "2-path",
        ChannelProfile::from_taps(&[0, 3], &[0.5, 0.8]).expect("static profile"),
    );
    m.insert(
        "3-path",
        ChannelProfile::from_taps(&[0, 1, 3], &[0.2, 0.5, 0.7]).expect("static profile"),
    );
    m.insert(
        "4-path",
        ChannelProfile::from_taps(&[0, 1, 2, 3], &[0.2, 0.3, 0.5, 0.7]).expect("static profile"),
    );
    m
}

/// One draw of the per-path complex gains. Gains are expected i.i.d.
/// CN(0, 1/P) so the channel has unit average energy; the draw itself
/// happens on the caller's RNG (this crate takes no randomness).
#[derive(Debug, Clone, PartialEq)]
pub struct PathRealization {
    pub gains: Vec<Complex64>,
}

impl PathRealization {
    pub fn new(gains: Vec<Complex64>) -> Self {
        Self { gains }
    }
}

// ------------------------------------------------------------ time domain

/// Runs the tapped-delay-line channel over a prefixed block and returns the
/// received block with the prefix already consumed:
///
/// r[n] = Σ_i h_i · e^{−j2πε_i·n/N} · s_cpp[L + n − l_i],  n = 0..N−1.
///
/// Negative-index taps read into the prefix, which is why `cpp_len` must
/// cover the longest delay. Noise is *not* added here.
pub fn apply_time_domain(
    s_cpp: &CVec,
    profile: &ChannelProfile,
    gains: &PathRealization,
    cpp_len: usize,
) -> Result<CVec> {
    let l_max = profile.l_max();
    if cpp_len < l_max {
        return Err(Error::PrefixTooShort { cpp_len, l_max });
    }
    debug_assert_eq!(gains.gains.len(), profile.n_paths());
    let n_total = s_cpp.len() - cpp_len;
    let mut r = CVec::zeros(n_total);
    for (path, &h) in profile.paths.iter().zip(&gains.gains) {
        let rot = -core::f64::consts::TAU * path.doppler / n_total as f64;
        for n in 0..n_total {
            r[n] += h * Complex64::cis(rot * n as f64) * s_cpp[cpp_len + n - path.delay];
        }
    }
    Ok(r)
}

// --------------------------------------------------------- matrix product

/// Chirp-domain matrix of one path: H_i = A·Γ_i·Δ_i·Πˡⁱ·Aᴴ.
///
/// Γ_i carries the prefix phase correction
/// e^{−j2πc1(N² − 2N(l_i − n))} on the first l_i diagonal entries, Δ_i the
/// Doppler rotation e^{−j2πε_i·n/N}, and Πˡⁱ the cyclic delay. All factors
/// have unit-modulus spectra, so H_i is unitary.
pub fn build_path_matrix(path: &Path, op: &DaftOperator) -> CMat {
    let n = op.n_total;
    let nf = n as f64;
    // Diagonal of Γ_i·Δ_i in one pass.
    let diag: Vec<Complex64> = (0..n)
        .map(|nn| {
            let doppler = -core::f64::consts::TAU * path.doppler * nn as f64 / nf;
            let mut phase = doppler;
            if nn < path.delay {
                phase -= core::f64::consts::TAU
                    * op.c1
                    * (nf * nf - 2.0 * nf * (path.delay - nn) as f64);
            }
            Complex64::cis(phase)
        })
        .collect();
    // B = A·(ΓΔ): scale the columns of A.
    let a = op.a_matrix();
    let b = CMat::from_fn(n, n, |i, j| a[(i, j)] * diag[j]);
    // C = B·Πˡ: column q of C is column (q + l) mod N of B.
    let mut c = CMat::zeros(n, n);
    for q in 0..n {
        let src = (q + path.delay) % n;
        c.column_mut(q).copy_from(&b.column(src));
    }
    &c * op.a_adjoint()
}

/// Closed-form entry of H_i (row `p`, column `q`), normalized so the peak
/// magnitude is 1.
///
/// With θ = p − q + ε_i + 2N·c1·l_i, the entry is
///
/// ```text
/// H_i[p, q] = (1/N)·e^{j2π(c1·l² − q·l/N + c2(q² − p²))}·κ(θ),
/// κ(θ) = e^{−jπθ(1−1/N)}·sin(πθ)/sin(πθ/N),
/// ```
///
/// an N-periodic kernel with κ(0) = N. θ is reduced to the nearest period
/// before evaluation, which keeps the two sines well conditioned for every
/// reachable configuration.
pub fn closed_form_entry(path: &Path, p: usize, q: usize, config: &ModemConfig) -> Complex64 {
    let n = config.n_total as f64;
    let (c1, c2) = (config.c1, config.c2);
    let l = path.delay as f64;
    let theta = p as f64 - q as f64 + path.doppler + 2.0 * n * c1 * l;
    let theta = theta - n * libm::round(theta / n);
    let kernel = if theta == 0.0 {
        Complex64::new(n, 0.0)
    } else {
        let ratio = libm::sin(core::f64::consts::PI * theta)
            / libm::sin(core::f64::consts::PI * theta / n);
        Complex64::cis(-core::f64::consts::PI * theta * (1.0 - 1.0 / n)) * ratio
    };
    let phase = core::f64::consts::TAU
        * (c1 * l * l - q as f64 * l / n + c2 * ((q * q) as f64 - (p * p) as f64));
    Complex64::cis(phase) * kernel / n
}

/// The rows of column `q` predicted to hold path `i`'s energy: everything
/// within `k_eps + 1/2` (circularly) of the nominal peak row
/// q − (α + β + 2N·c1·l). With integer Doppler the band is just the peak
/// row and its k_eps neighbors; fractional Doppler shifts the center off
/// the integer grid.
pub fn column_band(path: &Path, n_total: usize, c1: f64, q: usize, k_eps: u32) -> Vec<usize> {
    let n = n_total as f64;
    let shift = path.doppler + 2.0 * n * c1 * path.delay as f64;
    let center = q as f64 - shift;
    let radius = k_eps as f64 + 0.5;
    (0..n_total)
        .filter(|&p| {
            let mut d = libm::fabs(p as f64 - center) % n;
            if d > n / 2.0 {
                d = n - d;
            }
            d <= radius
        })
        .collect()
}

// ------------------------------------------------------ effective channel

/// The chirp-domain channel of one gain realization: the weighted sum
/// H_eff = Σ h_i·H_i plus the per-path matrices it was assembled from
/// (detection wants both).
#[derive(Debug, Clone)]
pub struct EffectiveChannel {
    pub h_eff: CMat,
    pub per_path: Vec<CMat>,
}

/// Builds all per-path matrices and their gain-weighted sum.
pub fn effective_channel(
    profile: &ChannelProfile,
    gains: &PathRealization,
    op: &DaftOperator,
) -> EffectiveChannel {
    let per_path: Vec<CMat> = profile.paths.iter().map(|p| build_path_matrix(p, op)).collect();
    EffectiveChannel { h_eff: combine(&per_path, gains), per_path }
}

/// Gain-weighted sum of prebuilt per-path matrices (the per-trial step once
/// the H_i are cached).
pub fn combine(per_path: &[CMat], gains: &PathRealization) -> CMat {
    debug_assert_eq!(per_path.len(), gains.gains.len());
    let n = per_path[0].nrows();
    let mut h_eff = CMat::zeros(n, n);
    for (h_i, &g) in per_path.iter().zip(&gains.gains) {
        h_eff.zip_apply(h_i, |acc, v| *acc += g * v);
    }
    h_eff
}
