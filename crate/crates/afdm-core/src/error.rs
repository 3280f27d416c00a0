use alloc::string::String;

/// Error type shared across the core modules.
///
/// Configuration problems name the offending field so that a front end can
/// report them without string-matching; algorithmic guard rails carry the
/// limit they enforce.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A configuration field failed validation.
    #[error("invalid config: {field}: {reason}")]
    Config { field: &'static str, reason: String },

    /// A bit-vector argument has the wrong length.
    #[error("bit vector length mismatch: expected {expected}, got {got}")]
    BitLength { expected: usize, got: usize },

    /// Exhaustive ML refused to enumerate 2^bits candidates; use MMSE.
    #[error("ML codebook with {bits} bits per block exceeds the {max}-bit guard rail; use MMSE detection instead")]
    MlTooLarge { bits: usize, max: usize },

    /// The chirp-periodic prefix cannot cover the longest channel delay.
    #[error("prefix of {cpp_len} samples shorter than the maximum path delay {l_max}")]
    PrefixTooShort { cpp_len: usize, l_max: usize },

    /// An operation that needs delay information received none.
    #[error("channel profile has no paths")]
    EmptyProfile,

    /// Curve fitting was asked for on unusable data.
    #[error("slope fit needs at least 3 strictly positive points, got {usable}")]
    SlopeFit { usable: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
