//! Reference systems for fair comparison: classic AFDM (every subcarrier
//! active, no index bits) and OFDM-IM (same index modulation, DFT in place
//! of the DAFT).
//!
//! Both are specializations of the main chain rather than separate
//! codebases. Classic AFDM is the (N, K) = (1, 1) degenerate grouping, so
//! every "subblock" is a single always-active PSK symbol. OFDM-IM is the
//! c₁ = c₂ = 0 point of the chirp family: the transform collapses to the
//! unitary DFT and the chirp-periodic prefix collapses to a plain cyclic
//! prefix, giving exactly the textbook OFDM front end over the same
//! time-domain channel. Sharing the channel, power, and detection plumbing
//! keeps every comparison apples-to-apples; only the transform differs.

use crate::im_codec::ModemConfig;
use crate::power::PowerStrategy;
use crate::Result;

/// Which reference system a run emulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// All subcarriers carry a PSK symbol; no index bits.
    ClassicAfdm,
    /// Index modulation over the DFT instead of the DAFT.
    OfdmIm,
}

impl BaselineKind {
    /// Stable label used in run records and config files.
    pub fn label(self) -> &'static str {
        match self {
            BaselineKind::ClassicAfdm => "afdm",
            BaselineKind::OfdmIm => "ofdm-im",
        }
    }
}

/// Configuration for classic AFDM at the same block length: unit groups,
/// every carrier active, spectral efficiency log₂M.
pub fn classic_afdm_config(
    n_total: usize,
    mod_order: usize,
    c1: f64,
    c2: f64,
    cpp_len: usize,
) -> Result<ModemConfig> {
    ModemConfig::new(n_total, 1, 1, mod_order, c1, c2, cpp_len, PowerStrategy::Conventional)
}

/// The OFDM-IM twin of an AFDM-IM configuration: identical
/// (N_F, N, K, M) and power strategy, chirp rates zeroed so the transform
/// is the DFT and the prefix is a plain CP.
pub fn ofdm_im_variant(base: &ModemConfig) -> ModemConfig {
    ModemConfig { c1: 0.0, c2: 0.0, ..base.clone() }
}
