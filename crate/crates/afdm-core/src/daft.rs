//! The discrete affine Fourier transform (DAFT) pair and the
//! chirp-periodic prefix.
//!
//! The forward operator is A = Λ_c2·F·Λ_c1 with Λ_c = diag(e^{−j2πc·n²})
//! and F the unitary DFT, i.e. entrywise
//!
//! ```text
//! A[m, n] = exp(−j2π(c1·n² + c2·m² + m·n/N)) / √N
//! ```
//!
//! Setting c1 = c2 = 0 recovers plain OFDM; the quadratic chirp phases are
//! what let a delay–Doppler channel separate into non-overlapping shifted
//! bands in the transform domain. Modulation applies Aᴴ (chirp domain →
//! time), demodulation applies A.
//!
//! Because the time-domain signal is chirp-periodic rather than periodic,
//! the guard interval must replicate the tail *with a quadratic phase
//! correction*; `add_cpp` implements that prefix, which degenerates to the
//! ordinary cyclic prefix whenever 2·N·c1 is an integer and N is even.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMat, CVec};

/// Dense DAFT operator for one block length and chirp-rate pair.
///
/// Immutable after construction; the forward and adjoint matrices are both
/// kept because every trial applies each of them once.
#[derive(Debug, Clone)]
pub struct DaftOperator {
    pub n_total: usize,
    pub c1: f64,
    pub c2: f64,
    a: CMat,
    a_h: CMat,
}

/// Builds the dense operator. Desk scale keeps N ≤ 256, where the explicit
/// matrix is fast and directly comparable against closed forms.
pub fn build_daft(n_total: usize, c1: f64, c2: f64) -> DaftOperator {
    assert!(n_total >= 2, "transform needs at least two points");
    let n = n_total as f64;
    let scale = 1.0 / libm::sqrt(n);
    let a = CMat::from_fn(n_total, n_total, |m, nn| {
        let (m, nn) = (m as f64, nn as f64);
        let phase = -core::f64::consts::TAU * (c1 * nn * nn + c2 * m * m + m * nn / n);
        Complex64::cis(phase) * scale
    });
    let a_h = a.adjoint();
    DaftOperator { n_total, c1, c2, a, a_h }
}

impl DaftOperator {
    /// The forward matrix A.
    pub fn a_matrix(&self) -> &CMat {
        &self.a
    }

    /// The adjoint Aᴴ (the modulation matrix).
    pub fn a_adjoint(&self) -> &CMat {
        &self.a_h
    }

    /// Chirp domain → time: s = Aᴴ·x.
    pub fn idaft(&self, x: &CVec) -> CVec {
        debug_assert_eq!(x.len(), self.n_total);
        &self.a_h * x
    }

    /// Time → chirp domain: y = A·r.
    pub fn daft(&self, s: &CVec) -> CVec {
        debug_assert_eq!(s.len(), self.n_total);
        &self.a * s
    }
}

/// Prepends the chirp-periodic prefix: `cpp_len` samples copied from the
/// block tail with the quadratic phase correction
/// e^{−j2πc1(N² + 2Nn)} for n = −L..−1.
pub fn add_cpp(s: &CVec, cpp_len: usize, c1: f64) -> CVec {
    let n = s.len();
    assert!(cpp_len <= n, "prefix cannot be longer than the block");
    let mut out = CVec::zeros(cpp_len + n);
    for i in 0..cpp_len {
        let neg_n = i as f64 - cpp_len as f64; // n = −L .. −1
        let phase = -core::f64::consts::TAU * c1 * ((n * n) as f64 + 2.0 * n as f64 * neg_n);
        out[i] = s[n - cpp_len + i] * Complex64::cis(phase);
    }
    out.rows_mut(cpp_len, n).copy_from(s);
    out
}

/// Drops the prefix again.
pub fn remove_cpp(extended: &CVec, cpp_len: usize) -> CVec {
    debug_assert!(extended.len() >= cpp_len);
    CVec::from(extended.rows(cpp_len, extended.len() - cpp_len).clone_owned())
}

/// Smallest admissible chirp rate for a channel whose integer Doppler
/// stays within ±`alpha_max` and whose fractional spill is truncated to
/// ±`k_eps` neighbors:
///
/// ```text
/// c1 = (2(alpha_max + k_eps) + 1) / (2·N·min_gap)
/// ```
///
/// `min_gap` is the smallest spacing between distinct path delays; with
/// fewer than two distinct delays a gap of 1 is assumed (the conservative
/// choice, and the convention used by all the stock experiment setups).
pub fn choose_c1(alpha_max: u32, k_eps: u32, n_total: usize, delays: &[usize]) -> Result<f64> {
    if delays.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let mut distinct: alloc::vec::Vec<usize> = delays.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let min_gap = if distinct.len() < 2 {
        1
    } else {
        distinct.windows(2).map(|w| w[1] - w[0]).min().unwrap()
    };
    Ok((2.0 * (alpha_max + k_eps) as f64 + 1.0) / (2.0 * n_total as f64 * min_gap as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn infnorm_vs_identity(m: &CMat) -> f64 {
        let n = m.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::ZERO };
                worst = worst.max((m[(i, j)] - target).norm());
            }
        }
        worst
    }

    #[test]
    fn zero_chirp_is_the_dft() {
        let op = build_daft(8, 0.0, 0.0);
        for m in 0..8 {
            for n in 0..8 {
                let f = Complex64::cis(-core::f64::consts::TAU * (m * n) as f64 / 8.0)
                    / libm::sqrt(8.0);
                assert!((op.a_matrix()[(m, n)] - f).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pinned_entry_value() {
        // N = 4, c1 = 1/8, c2 = 0: A[1,1] = (1/2)·e^{−j2π(1/8 + 1/4)}.
        let op = build_daft(4, 0.125, 0.0);
        let expect = Complex64::cis(-core::f64::consts::TAU * (0.125 + 0.25)) * 0.5;
        assert!((op.a_matrix()[(1, 1)] - expect).norm() < 1e-15);
    }

    #[test]
    fn unitarity_and_unit_norms() {
        let op = build_daft(32, 5.0 / 64.0, 0.013);
        let gram = op.a_matrix() * op.a_adjoint();
        assert!(infnorm_vs_identity(&gram) < 1e-10);
        for j in 0..32 {
            assert!((op.a_matrix().column(j).norm() - 1.0).abs() < 1e-12);
            assert!((op.a_matrix().row(j).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn summation_form_matches_matrix_form() {
        // s[n] = (1/√N) Σ_m x[m] e^{+j2π(c1 n² + c2 m² + mn/N)} is the
        // scalar statement of s = Aᴴx.
        let n_total = 16;
        let (c1, c2) = (3.0 / 32.0, 0.007);
        let op = build_daft(n_total, c1, c2);
        let x = CVec::from_fn(n_total, |i, _| Complex64::cis(0.9 * i as f64 - 0.4));
        let s = op.idaft(&x);
        for n in 0..n_total {
            let mut acc = Complex64::ZERO;
            for m in 0..n_total {
                let phase = core::f64::consts::TAU
                    * (c1 * (n * n) as f64 + c2 * (m * m) as f64 + (m * n) as f64 / n_total as f64);
                acc += x[m] * Complex64::cis(phase);
            }
            acc /= libm::sqrt(n_total as f64);
            assert!((s[n] - acc).norm() < 1e-10);
        }
    }

    #[test]
    fn transform_pair_roundtrips_and_preserves_energy() {
        let op = build_daft(64, 5.0 / 128.0, 0.0);
        let x = CVec::from_fn(64, |i, _| Complex64::cis(0.23 * i as f64) * (1.0 + 0.01 * i as f64));
        let s = op.idaft(&x);
        assert!((s.norm() - x.norm()).abs() < 1e-10);
        let back = op.daft(&s);
        assert!((back - &x).norm() < 1e-10);
    }

    #[test]
    fn basis_vector_becomes_a_pure_chirp() {
        let op = build_daft(8, 0.09, 0.21);
        let mut e0 = CVec::zeros(8);
        e0[0] = Complex64::new(1.0, 0.0);
        let s = op.idaft(&e0);
        for n in 0..8 {
            let expect =
                Complex64::cis(core::f64::consts::TAU * 0.09 * (n * n) as f64) / libm::sqrt(8.0);
            assert!((s[n] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn prefix_roundtrip_and_degenerate_cases() {
        let s = CVec::from_fn(16, |i, _| Complex64::cis(1.1 * i as f64));
        let ext = add_cpp(&s, 4, 0.037);
        assert_eq!(ext.len(), 20);
        assert!((remove_cpp(&ext, 4) - &s).norm() == 0.0);
        // Every prefix sample has the same magnitude as its source sample.
        for i in 0..4 {
            assert!((ext[i].norm() - s[12 + i].norm()).abs() < 1e-12);
        }
        // L = 0 is the identity.
        assert_eq!(add_cpp(&s, 0, 0.037), s);
    }

    #[test]
    fn cpp_reduces_to_plain_cp_when_phase_is_integral() {
        // 2·N·c1 integer and N even → e^{−j2πc1(N²+2Nn)} = 1.
        let n = 8;
        let c1 = 5.0 / 16.0; // 2·N·c1 = 5
        let s = CVec::from_fn(n, |i, _| Complex64::cis(0.4 * i as f64 + 0.2));
        let ext = add_cpp(&s, 3, c1);
        for i in 0..3 {
            assert!((ext[i] - s[n - 3 + i]).norm() < 1e-12);
        }
    }

    #[test]
    fn chirp_rate_selection() {
        // Stock setup: alpha_max = 1, k_eps = 1, unit delay gap.
        assert!((choose_c1(1, 1, 64, &[0, 1]).unwrap() - 5.0 / 128.0).abs() < 1e-15);
        // k_eps = 0 variant.
        assert!((choose_c1(0, 0, 32, &[0, 1]).unwrap() - 1.0 / 64.0).abs() < 1e-15);
        // A wider minimum gap divides the rate.
        let gap1 = choose_c1(1, 1, 64, &[0, 1]).unwrap();
        let gap3 = choose_c1(1, 1, 64, &[0, 3]).unwrap();
        assert!((gap3 - gap1 / 3.0).abs() < 1e-15);
        // Single delay falls back to gap 1; no delays is an error.
        assert_eq!(choose_c1(1, 1, 64, &[0]).unwrap(), gap1);
        assert_eq!(choose_c1(1, 1, 64, &[]), Err(Error::EmptyProfile));
    }

    #[test]
    fn cpp_phase_always_unit_magnitude() {
        for &c1 in &[0.0, 0.017, 5.0 / 64.0, 0.333] {
            let s = CVec::from_fn(12, |i, _| Complex64::new(0.5 + i as f64, -1.0));
            let ext = add_cpp(&s, 5, c1);
            for i in 0..5 {
                assert!((ext[i].norm() - s[7 + i].norm()).abs() < 1e-12);
            }
        }
    }
}
