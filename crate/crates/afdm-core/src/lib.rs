//! Core algorithms for a chirp-domain multicarrier modem with index
//! modulation.
//!
//! The crate covers the full signal path of an AFDM-IM link at desk scale:
//!
//! * [`im_codec`] — bit ↔ block mapping: index selection over subblocks,
//!   Gray-coded PSK, and the inverse demapper.
//! * [`daft`] — the discrete affine Fourier transform pair and the
//!   chirp-periodic prefix.
//! * [`channel`] — doubly dispersive (delay–Doppler) channels, applied in
//!   the time domain and synthesized as per-path matrices in the DAFT
//!   domain, with a closed-form entry formula validated against the matrix
//!   route.
//! * [`detection`] — exhaustive ML and MMSE detection.
//! * [`power`] — power-reallocation / power-saving strategies and the
//!   SNR-to-noise-variance calibration.
//! * [`analysis`] — spectral efficiency, pairwise error probabilities via
//!   the MGF of the receive quadratic form, Chernoff bounds, the ABEP
//!   union bound, and diversity-slope fitting.
//! * [`baselines`] — configuration helpers that express classic AFDM and
//!   OFDM-IM as special cases of the same chain.
//!
//! Everything here is pure computation on immutable inputs: no IO, no
//! randomness (gain/bit/noise draws are supplied by the caller), no global
//! state. The crate is `no_std` with `alloc`; the companion simulation
//! crate adds configuration files, CSV persistence, RNG, and the CLI.
//!
//! Dense `nalgebra` matrices are used throughout — block lengths stay at or
//! below 256 subcarriers, where explicit matrices are both fast enough and
//! easiest to cross-check against closed forms.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod baselines;
pub mod channel;
pub mod daft;
pub mod detection;
pub mod im_codec;
pub mod power;

mod error;

pub use error::{Error, Result};

/// Convenience alias: dense complex matrix.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Convenience alias: dense complex column vector.
pub type CVec = nalgebra::DVector<num_complex::Complex64>;

/// Largest supported block length. Dense-matrix synthesis and the
/// closed-form cross-checks are tuned for desk scale; anything larger is
/// rejected at configuration time rather than silently crawling.
pub const MAX_BLOCK_LEN: usize = 256;

/// Widest exhaustive-ML search, in bits per block. Beyond this the
/// codebook (2^b entries) stops being a desk-scale object and detection
/// must fall back to MMSE.
pub const MAX_ML_BITS: usize = 20;
