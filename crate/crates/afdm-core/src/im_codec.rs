//! Bit ↔ block mapping for the index-modulated chirp waveform.
//!
//! A block of `b` bits is split into `G` equal groups of `p = p1 + K·log2(M)`
//! bits. Within each group the first `p1 = floor(log2 C(N,K))` bits choose
//! which `K` of the `N` subblock positions are active, and the remaining
//! bits pick Gray-coded M-PSK symbols for the active positions in ascending
//! index order. Inactive positions transmit nothing.
//!
//! Index selection uses a fixed lexicographic enumeration of K-subsets with
//! the bit word read as an unsigned rank. The (N, K) = (4, 2) geometry is
//! the one case pinned to an explicit lookup (it is the classical worked
//! example for this block size, and its row order differs from the
//! lexicographic rule); everything else falls through to the generic
//! enumeration.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::power::PowerStrategy;
use crate::CVec;

// ---------------------------------------------------------------- config

/// Static description of one modem configuration.
///
/// `n_total` subcarriers are split into `n_groups` subblocks of `n_sub`
/// each; `k_active` of every subblock carry an M-ary PSK symbol. `c1`/`c2`
/// are the chirp rates of the transform pair (in cycles), `cpp_len` the
/// prefix length in samples, and `power_strategy` how the block power
/// budget is spread over active subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct ModemConfig {
    pub n_total: usize,
    pub n_sub: usize,
    pub k_active: usize,
    pub mod_order: usize,
    pub n_groups: usize,
    pub c1: f64,
    pub c2: f64,
    pub cpp_len: usize,
    pub power_strategy: PowerStrategy,
}

impl ModemConfig {
    /// Validates and derives the group count. Every failure names the field
    /// it refers to.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_total: usize,
        n_sub: usize,
        k_active: usize,
        mod_order: usize,
        c1: f64,
        c2: f64,
        cpp_len: usize,
        power_strategy: PowerStrategy,
    ) -> Result<Self> {
        fn err(field: &'static str, reason: alloc::string::String) -> Error {
            Error::Config { field, reason }
        }
        use alloc::format;

        if n_total < 2 || n_total > crate::MAX_BLOCK_LEN {
            return Err(err(
                "n_total",
                format!("must be in [2, {}], got {n_total}", crate::MAX_BLOCK_LEN),
            ));
        }
        if n_sub == 0 || n_total % n_sub != 0 {
            return Err(err(
                "n_sub",
                format!("must be a non-zero divisor of n_total={n_total}, got {n_sub}"),
            ));
        }
        if k_active == 0 || k_active > n_sub {
            return Err(err(
                "k_active",
                format!("must satisfy 1 <= k <= n_sub={n_sub}, got {k_active}"),
            ));
        }
        if mod_order < 2 || !mod_order.is_power_of_two() {
            return Err(err(
                "mod_order",
                format!("must be a power of two >= 2, got {mod_order}"),
            ));
        }
        if !c1.is_finite() || !c2.is_finite() {
            return Err(err("c1", "chirp rates must be finite".into()));
        }
        if cpp_len > n_total {
            return Err(err(
                "cpp_len",
                format!("prefix cannot exceed the block length {n_total}, got {cpp_len}"),
            ));
        }
        let cfg = Self {
            n_total,
            n_sub,
            k_active,
            mod_order,
            n_groups: n_total / n_sub,
            c1,
            c2,
            cpp_len,
            power_strategy,
        };
        // Subblock words are manipulated as u64 ranks; keep p within one word.
        if cfg.p_bits() > 32 {
            return Err(err(
                "n_sub",
                format!(
                    "subblock carries {} bits; more than 32 per subblock is outside desk scale",
                    cfg.p_bits()
                ),
            ));
        }
        Ok(cfg)
    }

    /// Index bits per subblock: floor(log2 C(N, K)).
    pub fn p1_bits(&self) -> usize {
        floor_log2(binomial(self.n_sub, self.k_active)) as usize
    }

    /// Symbol bits per subblock: K·log2(M).
    pub fn p2_bits(&self) -> usize {
        self.k_active * self.log2_mod()
    }

    /// Total bits per subblock.
    pub fn p_bits(&self) -> usize {
        self.p1_bits() + self.p2_bits()
    }

    /// Bits per block: b = p·G.
    pub fn bits_per_block(&self) -> usize {
        self.p_bits() * self.n_groups
    }

    /// log2 of the PSK order.
    pub fn log2_mod(&self) -> usize {
        self.mod_order.trailing_zeros() as usize
    }
}

// ------------------------------------------------------------- bit utils

/// Exact binomial coefficient. Saturates at `u128::MAX` far beyond any
/// desk-scale configuration; `ModemConfig::new` caps `p` long before that.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .saturating_mul((n - i) as u128)
            .checked_div((i + 1) as u128)
            .unwrap_or(u128::MAX);
    }
    acc
}

fn floor_log2(x: u128) -> u32 {
    debug_assert!(x > 0);
    127 - x.leading_zeros()
}

/// Big-endian bits → unsigned word (first bit is most significant).
pub fn bits_to_word(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

/// Unsigned word → big-endian bits of fixed width.
pub fn word_to_bits(word: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| (word >> (width - 1 - i)) & 1 == 1).collect()
}

// -------------------------------------------------------- index selection

/// Explicit lookup for the (N, K) = (4, 2) geometry, in bit-word order
/// 00, 01, 10, 11. Pinned by hand: the generic lexicographic enumeration
/// would give {1,2},{1,3},{1,4},{2,3} instead.
const LUT_4_2: [[usize; 2]; 4] = [[1, 2], [2, 3], [3, 4], [1, 4]];

/// Maps `p1` index bits to the active K-subset of positions `1..=N`.
///
/// The generic rule unranks the bit word in the lexicographic order of
/// K-subsets; only the first `2^p1` subsets are reachable. Returns positions
/// strictly increasing, 1-based.
pub fn select_indices(p1_bits: &[bool], n_sub: usize, k_active: usize) -> Result<Vec<usize>> {
    let p1 = floor_log2(binomial(n_sub, k_active)) as usize;
    if p1_bits.len() != p1 {
        return Err(Error::BitLength { expected: p1, got: p1_bits.len() });
    }
    let word = bits_to_word(p1_bits);
    if n_sub == 4 && k_active == 2 {
        return Ok(LUT_4_2[word as usize].to_vec());
    }
    Ok(unrank_subset(n_sub, k_active, word as u128))
}

/// `rank`-th K-subset of `1..=n` in lexicographic order.
fn unrank_subset(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut value = 1usize;
    let mut left = k;
    while left > 0 {
        // Number of subsets that continue with `value` as the next element.
        let with_value = binomial(n - value, left - 1);
        if rank < with_value {
            out.push(value);
            left -= 1;
        } else {
            rank -= with_value;
        }
        value += 1;
    }
    out
}

// ------------------------------------------------------------------- PSK

/// Gray-coded M-PSK. BPSK is the real pair {+1, −1}; larger orders sit at
/// odd multiples of π/M so no symbol falls on an axis.
pub fn map_psk(bits: &[bool], mod_order: usize) -> Result<Complex64> {
    let width = mod_order.trailing_zeros() as usize;
    if !mod_order.is_power_of_two() || mod_order < 2 {
        return Err(Error::Config {
            field: "mod_order",
            reason: alloc::format!("must be a power of two >= 2, got {mod_order}"),
        });
    }
    if bits.len() != width {
        return Err(Error::BitLength { expected: width, got: bits.len() });
    }
    let gray = bits_to_word(bits);
    let k = gray_decode(gray);
    let offset = if mod_order == 2 { 0.0 } else { core::f64::consts::PI / mod_order as f64 };
    let phase = offset + core::f64::consts::TAU * k as f64 / mod_order as f64;
    Ok(Complex64::cis(phase))
}

/// Inverse of the reflected binary code: label → constellation position.
fn gray_decode(mut g: u64) -> u64 {
    let mut shift = 1;
    while shift < 64 {
        g ^= g >> shift;
        shift <<= 1;
    }
    g
}

// --------------------------------------------------------------- blocks

/// Content of one subblock: which positions are active and what they carry.
#[derive(Debug, Clone, PartialEq)]
pub struct SubblockContent {
    /// Active positions, strictly increasing, 1-based within the subblock.
    pub indices: Vec<usize>,
    /// Unit-magnitude PSK symbols, one per active position, in index order.
    pub symbols: Vec<Complex64>,
    /// The `p` bits this subblock encodes.
    pub source_bits: Vec<bool>,
}

impl SubblockContent {
    /// Dense length-N vector of the subblock (zeros at inactive positions).
    pub fn vector(&self, n_sub: usize) -> CVec {
        let mut v = CVec::zeros(n_sub);
        for (&idx, &sym) in self.indices.iter().zip(&self.symbols) {
            v[idx - 1] = sym;
        }
        v
    }

    /// Subblock bits as an unsigned word (used for codebook ordering and
    /// Hamming weights).
    pub fn word(&self) -> u64 {
        bits_to_word(&self.source_bits)
    }
}

/// A full modulated block before power scaling and transform.
#[derive(Debug, Clone, PartialEq)]
pub struct ImBlock {
    /// Length-N_F chirp-domain vector with exactly G·K non-zeros.
    pub x: CVec,
    /// Per-group content, in block order.
    pub subblocks: Vec<SubblockContent>,
}

/// Decodes one subblock word (the `p` bits read as an unsigned integer)
/// into its content. Shared by the encoder and the codebook enumerator so
/// the two can never disagree.
pub fn subblock_from_word(word: u64, config: &ModemConfig) -> SubblockContent {
    let p = config.p_bits();
    let bits = word_to_bits(word, p);
    let p1 = config.p1_bits();
    let log2m = config.log2_mod();
    let indices = select_indices(&bits[..p1], config.n_sub, config.k_active)
        .expect("width fixed by config");
    let symbols = (0..config.k_active)
        .map(|k| {
            let start = p1 + k * log2m;
            map_psk(&bits[start..start + log2m], config.mod_order).expect("width fixed by config")
        })
        .collect();
    SubblockContent { indices, symbols, source_bits: bits }
}

/// Maps `b` information bits to a modulated block.
pub fn encode_block(bits: &[bool], config: &ModemConfig) -> Result<ImBlock> {
    let b = config.bits_per_block();
    if bits.len() != b {
        return Err(Error::BitLength { expected: b, got: bits.len() });
    }
    let p = config.p_bits();
    let mut x = CVec::zeros(config.n_total);
    let mut subblocks = Vec::with_capacity(config.n_groups);
    for g in 0..config.n_groups {
        let word = bits_to_word(&bits[g * p..(g + 1) * p]);
        let sb = subblock_from_word(word, config);
        for (&idx, &sym) in sb.indices.iter().zip(&sb.symbols) {
            x[g * config.n_sub + idx - 1] = sym;
        }
        subblocks.push(sb);
    }
    Ok(ImBlock { x, subblocks })
}

/// All `2^p` legal subblock contents in word order (word 0 first).
pub fn subblock_codebook(config: &ModemConfig) -> Vec<SubblockContent> {
    (0..1u64 << config.p_bits()).map(|w| subblock_from_word(w, config)).collect()
}

/// Nearest legal subblock pattern to an equalized estimate, returned as the
/// generating bits.
///
/// Because every legal pattern has exactly K unit-magnitude entries, the
/// squared distance to `x_tilde` differs between patterns only through
/// −2·Re⟨pattern, x̃⟩; the demapper therefore maximizes that correlation,
/// scanning words in ascending order so ties resolve to the lowest bit
/// value.
pub fn demap_subblock(x_tilde: &[Complex64], config: &ModemConfig) -> Vec<bool> {
    let codebook = subblock_codebook(config);
    demap_with_codebook(x_tilde, &codebook, config)
}

/// `demap_subblock` against a prebuilt codebook (hot path for the MMSE
/// receiver, which demaps G subblocks per trial).
pub fn demap_with_codebook(
    x_tilde: &[Complex64],
    codebook: &[SubblockContent],
    config: &ModemConfig,
) -> Vec<bool> {
    debug_assert_eq!(x_tilde.len(), config.n_sub);
    let mut best_word = 0usize;
    let mut best_corr = f64::NEG_INFINITY;
    for (w, sb) in codebook.iter().enumerate() {
        let mut corr = 0.0;
        for (&idx, sym) in sb.indices.iter().zip(&sb.symbols) {
            corr += (sym.conj() * x_tilde[idx - 1]).re;
        }
        if corr > best_corr {
            best_corr = corr;
            best_word = w;
        }
    }
    word_to_bits(best_word as u64, config.p_bits())
}

// ------------------------------------------------------------------ tests

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::PowerStrategy;
    use alloc::vec;

    fn cfg(n_total: usize, n_sub: usize, k: usize, m: usize) -> ModemConfig {
        ModemConfig::new(n_total, n_sub, k, m, 0.0, 0.0, 0, PowerStrategy::Conventional).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn four_choose_two_lookup_is_pinned() {
        assert_eq!(select_indices(&bits("00"), 4, 2).unwrap(), vec![1, 2]);
        assert_eq!(select_indices(&bits("01"), 4, 2).unwrap(), vec![2, 3]);
        assert_eq!(select_indices(&bits("10"), 4, 2).unwrap(), vec![3, 4]);
        assert_eq!(select_indices(&bits("11"), 4, 2).unwrap(), vec![1, 4]);
    }

    #[test]
    fn generic_rule_is_lexicographic() {
        // C(8,2)=28, p1=4: word 0 must map to the first subset in
        // lexicographic order.
        assert_eq!(select_indices(&bits("0000"), 8, 2).unwrap(), vec![1, 2]);
        assert_eq!(select_indices(&bits("0001"), 8, 2).unwrap(), vec![1, 3]);
        // Last reachable word (15) is still inside the 28 available subsets:
        // ranks 0-6 start with 1, 7-12 with 2, so rank 15 is {3,6}.
        assert_eq!(select_indices(&bits("1111"), 8, 2).unwrap(), vec![3, 6]);
    }

    #[test]
    fn degenerate_single_position() {
        // C(1,1)=1 gives p1=0: no index bits, the lone subset is forced.
        assert_eq!(select_indices(&[], 1, 1).unwrap(), vec![1]);
        // C(2,1)=2 gives p1=1, so an empty bit vector is a length error
        // there, not a silent default.
        assert_eq!(
            select_indices(&[], 2, 1),
            Err(Error::BitLength { expected: 1, got: 0 })
        );
        assert_eq!(select_indices(&bits("0"), 2, 1).unwrap(), vec![1]);
        assert_eq!(select_indices(&bits("1"), 2, 1).unwrap(), vec![2]);
    }

    #[test]
    fn index_words_are_injective() {
        for (n, k) in [(4usize, 2usize), (8, 2), (8, 3), (8, 4), (6, 3), (16, 2)] {
            let p1 = floor_log2(binomial(n, k)) as usize;
            let mut seen = std::collections::BTreeSet::new();
            for w in 0..1u64 << p1 {
                let subset = select_indices(&word_to_bits(w, p1), n, k).unwrap();
                assert!(subset.windows(2).all(|p| p[0] < p[1]));
                assert!(subset.iter().all(|&i| (1..=n).contains(&i)));
                assert_eq!(subset.len(), k);
                assert!(seen.insert(subset), "duplicate subset for word {w} over ({n},{k})");
            }
        }
    }

    #[test]
    fn bpsk_and_qpsk_conventions() {
        assert_eq!(map_psk(&bits("0"), 2).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(map_psk(&bits("1"), 2).unwrap(), Complex64::cis(core::f64::consts::PI));
        let q00 = map_psk(&bits("00"), 4).unwrap();
        let expect = Complex64::cis(core::f64::consts::FRAC_PI_4);
        assert!((q00 - expect).norm() < 1e-15);
    }

    #[test]
    fn psk_is_unit_power_and_gray() {
        for m in [2usize, 4, 8, 16] {
            let width = m.trailing_zeros() as usize;
            let symbols: Vec<Complex64> =
                (0..m as u64).map(|w| map_psk(&word_to_bits(w, width), m).unwrap()).collect();
            let mean_power: f64 = symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / m as f64;
            assert!((mean_power - 1.0).abs() < 1e-12);
            // Sort labels by phase and check one-bit steps around the circle.
            let mut by_phase: Vec<(f64, u64)> = (0..m as u64)
                .map(|w| {
                    let s = map_psk(&word_to_bits(w, width), m).unwrap();
                    (libm::atan2(s.im, s.re), w)
                })
                .collect();
            by_phase.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for i in 0..m {
                let a = by_phase[i].1;
                let b = by_phase[(i + 1) % m].1;
                assert_eq!((a ^ b).count_ones(), 1, "labels {a:b} and {b:b} not Gray-adjacent");
            }
        }
    }

    #[test]
    fn encode_single_group_worked_example() {
        // (N, K, M) = (4, 2, 2), one subblock. Index bits 00 → {1, 2};
        // symbol bits 0 then 1 → +1 at position 1, −1 at position 2.
        let c = cfg(4, 4, 2, 2);
        let block = encode_block(&bits("0001"), &c).unwrap();
        let x = &block.x;
        assert!((x[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - Complex64::cis(core::f64::consts::PI)).norm() < 1e-15);
        assert_eq!(x[2], Complex64::new(0.0, 0.0));
        assert_eq!(x[3], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn nonzero_count_is_groups_times_active() {
        let c = cfg(32, 8, 1, 2);
        let b = c.bits_per_block();
        let block = encode_block(&vec![false; b], &c).unwrap();
        let nnz = block.x.iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nnz, c.n_groups * c.k_active);
        for (g, sb) in block.subblocks.iter().enumerate() {
            for &idx in &sb.indices {
                let global = g * c.n_sub + idx - 1;
                assert!(global >= g * c.n_sub && global < (g + 1) * c.n_sub);
                assert!(block.x[global].norm() > 0.0);
            }
        }
    }

    #[test]
    fn roundtrip_exhaustive_up_to_p12() {
        // p = 4, 8 and 12 bit subblocks.
        for c in [cfg(4, 4, 2, 2), cfg(8, 8, 2, 4), cfg(16, 16, 2, 8)] {
            let p = c.p_bits();
            assert!(p <= 12);
            let codebook = subblock_codebook(&c);
            assert_eq!(codebook.len(), 1 << p);
            for w in 0..1u64 << p {
                let sb = &codebook[w as usize];
                let v = sb.vector(c.n_sub);
                let got = demap_with_codebook(v.as_slice(), &codebook, &c);
                assert_eq!(bits_to_word(&got), w, "roundtrip failed at word {w} (p={p})");
            }
        }
    }

    #[test]
    fn demap_ties_resolve_to_lowest_word() {
        let c = cfg(4, 4, 2, 2);
        let zero = vec![Complex64::new(0.0, 0.0); 4];
        let got = demap_subblock(&zero, &c);
        assert_eq!(bits_to_word(&got), 0);
    }

    #[test]
    fn demap_tolerates_sub_half_min_distance_perturbations() {
        let c = cfg(4, 4, 2, 2);
        let codebook = subblock_codebook(&c);
        let vecs: Vec<CVec> = codebook.iter().map(|sb| sb.vector(4)).collect();
        let mut min_dist = f64::INFINITY;
        for i in 0..vecs.len() {
            for j in 0..i {
                min_dist = min_dist.min((&vecs[i] - &vecs[j]).norm());
            }
        }
        assert!(min_dist > 0.0);
        // A fixed off-axis perturbation of norm 0.45·min_dist on every
        // pattern must not flip the decision.
        for (w, v) in vecs.iter().enumerate() {
            let mut noisy = v.clone();
            let dir = CVec::from_fn(4, |i, _| Complex64::cis(1.7 * (i as f64 + 0.3)));
            let scaled = dir.clone() * Complex64::new(0.45 * min_dist / dir.norm(), 0.0);
            noisy += scaled;
            let got = demap_with_codebook(noisy.as_slice(), &codebook, &c);
            assert_eq!(bits_to_word(&got), w as u64);
        }
    }

    #[test]
    fn config_validation_names_fields() {
        let bad = ModemConfig::new(33, 8, 1, 2, 0.0, 0.0, 0, PowerStrategy::Conventional);
        match bad {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n_sub"),
            other => panic!("expected config error, got {other:?}"),
        }
        let bad = ModemConfig::new(32, 8, 9, 2, 0.0, 0.0, 0, PowerStrategy::Conventional);
        assert!(matches!(bad, Err(Error::Config { field: "k_active", .. })));
        let bad = ModemConfig::new(32, 8, 1, 3, 0.0, 0.0, 0, PowerStrategy::Conventional);
        assert!(matches!(bad, Err(Error::Config { field: "mod_order", .. })));
        let bad = ModemConfig::new(512, 8, 1, 2, 0.0, 0.0, 0, PowerStrategy::Conventional);
        assert!(matches!(bad, Err(Error::Config { field: "n_total", .. })));
    }

    #[test]
    fn binomial_handles_desk_scale_exactly() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }
}
