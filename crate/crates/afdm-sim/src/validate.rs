//! Built-in health checks for the `validate` subcommand.
//!
//! Six quick cross-checks, each pitting a production code path against an
//! independently coded oracle: transform unitarity, the time-domain vs
//! matrix channel routes, the closed-form channel entries, the one-path
//! error-probability integral against its textbook closed form, the
//! quadratic-form MGF against plain sampling, and a full index-modulation
//! encode/demap roundtrip. The whole battery runs in well under a second;
//! it is meant as a smoke test after a build or a dependency bump, not as
//! a replacement for the test suite.

use afdm_core::analysis::{grouped_eigenvalues, mgf_quadform, pep_exact_from_eigenvalues, GaussLegendre};
use afdm_core::channel::{
    apply_time_domain, build_path_matrix, closed_form_entry, effective_channel, ChannelProfile,
    Path, PathRealization,
};
use afdm_core::daft::{add_cpp, build_daft};
use afdm_core::im_codec::{demap_with_codebook, encode_block, subblock_codebook, ModemConfig};
use afdm_core::power::PowerStrategy;
use afdm_core::{CMat, CVec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn graded(name: &'static str, worst: f64, tol: f64) -> Self {
        CheckOutcome {
            name,
            pass: worst < tol,
            detail: format!("worst deviation {worst:.2e} (tolerance {tol:.0e})"),
        }
    }
}

/// Runs every check; deterministic for a given seed.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        transform_unitarity(seed),
        channel_route_agreement(seed),
        closed_form_entries(seed),
        one_path_error_integral(),
        mgf_against_sampling(seed),
        index_mod_roundtrip(),
    ]
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|c| c.pass)
}

fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

fn random_profile(rng: &mut ChaCha8Rng, n_total: usize) -> ChannelProfile {
    let n_paths = rng.gen_range(2..=4);
    let mut delays: Vec<usize> = (0..n_total / 4).collect();
    let paths = (0..n_paths)
        .map(|_| {
            let delay = delays.remove(rng.gen_range(0..delays.len()));
            Path { delay, doppler: rng.gen_range(-1.0..1.0) }
        })
        .collect();
    ChannelProfile::new(paths).expect("non-empty by construction")
}

/// ‖AAᴴ − I‖∞ for random sizes and chirp rates.
fn transform_unitarity(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(8..=96);
        let op = build_daft(n, rng.gen_range(0.0..0.25), rng.gen_range(0.0..0.1));
        let gram = op.a_matrix() * op.a_adjoint();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((gram[(i, j)] - expect).norm());
            }
        }
    }
    CheckOutcome::graded("transform-unitarity", worst, 1e-10)
}

/// Sends a random block through the sample-by-sample channel (prefix,
/// taps, Doppler rotation) and through H_eff·x; the two must agree.
fn channel_route_agreement(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = [16usize, 32, 48][rng.gen_range(0..3)];
        let op = build_daft(n, rng.gen_range(0.0..0.25), rng.gen_range(0.0..0.1));
        let profile = random_profile(&mut rng, n);
        let gains = PathRealization::new((0..profile.n_paths()).map(|_| cn(&mut rng)).collect());
        let x = CVec::from_fn(n, |_, _| cn(&mut rng));

        let s_cpp = add_cpp(&op.idaft(&x), profile.l_max(), op.c1);
        let r = apply_time_domain(&s_cpp, &profile, &gains, profile.l_max()).unwrap();
        let via_samples = op.daft(&r);
        let via_matrix = &effective_channel(&profile, &gains, &op).h_eff * &x;

        let scale = via_matrix.norm().max(1e-30);
        worst = worst.max((&via_samples - &via_matrix).norm() / scale);
    }
    CheckOutcome::graded("channel-route-agreement", worst, 1e-9)
}

/// Every entry of H_i from the closed form vs the matrix product.
fn closed_form_entries(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let n = 24;
        let config = ModemConfig::new(
            n,
            4,
            2,
            4,
            rng.gen_range(0.0..0.25),
            rng.gen_range(0.0..0.1),
            6,
            PowerStrategy::Conventional,
        )
        .unwrap();
        let op = build_daft(n, config.c1, config.c2);
        let path = Path { delay: rng.gen_range(0..6), doppler: rng.gen_range(-1.0..1.0) };
        let built = build_path_matrix(&path, &op);
        for p in 0..n {
            for q in 0..n {
                worst = worst.max((built[(p, q)] - closed_form_entry(&path, p, q, &config)).norm());
            }
        }
    }
    CheckOutcome::graded("closed-form-entries", worst, 1e-9)
}

/// One Rayleigh path has the textbook pairwise error probability
/// (1/2)·(1 − √(c/(1+c))) with c = λ/(4N₀); the quadrature must hit it.
fn one_path_error_integral() -> CheckOutcome {
    let gl = GaussLegendre::new(64);
    let mut worst = 0.0f64;
    for (lambda, n0) in [(4.0, 0.1), (2.5, 0.01), (8.0, 1.0), (1.0, 0.003)] {
        let numeric = pep_exact_from_eigenvalues(&[(lambda, 1)], n0, 1, &gl);
        let c: f64 = lambda / (4.0 * n0);
        let analytic = 0.5 * (1.0 - (c / (1.0 + c)).sqrt());
        worst = worst.max((numeric - analytic).abs());
    }
    CheckOutcome::graded("one-path-error-integral", worst, 1e-10)
}

/// E[e^{s·gᴴΨg}] for g with i.i.d. CN(0, 1/P) entries, estimated by plain
/// sampling and compared with the analytic eigenvalue product. Pass means
/// within three standard errors (plus a sliver for the estimate itself).
fn mgf_against_sampling(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let n_paths = 2usize;
    let (dim, draws, s) = (6usize, 20_000usize, -0.35);

    let phi = CMat::from_fn(dim, dim, |_, _| cn(&mut rng));
    let psi = phi.adjoint() * &phi;
    let eigenvalues = grouped_eigenvalues(&psi);
    let analytic = mgf_quadform(&eigenvalues, s, n_paths);

    let lambdas: Vec<f64> = eigenvalues
        .iter()
        .flat_map(|&(l, m)| core::iter::repeat(l).take(m))
        .collect();
    let sigma = (0.5 / n_paths as f64).sqrt();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let q: f64 = lambdas
            .iter()
            .map(|l| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                l * (re * re + im * im) * sigma * sigma
            })
            .sum();
        let v = (s * q).exp();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / draws as f64;
    let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
    let stderr = (var / draws as f64).sqrt();
    let gap = (mean - analytic).abs();
    CheckOutcome {
        name: "mgf-against-sampling",
        pass: gap <= 3.0 * stderr + 1e-4,
        detail: format!("gap {gap:.2e} vs 3·SE = {:.2e}", 3.0 * stderr),
    }
}

/// Encodes every word of a small modem and demaps it noise-free.
fn index_mod_roundtrip() -> CheckOutcome {
    let config = ModemConfig::new(8, 4, 2, 2, 0.0, 0.0, 0, PowerStrategy::Conventional).unwrap();
    let codebook = subblock_codebook(&config);
    let total = config.bits_per_block();
    let mut failures = 0u32;
    for word in 0..(1u32 << total) {
        let bits: Vec<bool> = (0..total).map(|i| word >> (total - 1 - i) & 1 == 1).collect();
        let block = encode_block(&bits, &config).unwrap();
        for (g, sub) in block.subblocks.iter().enumerate() {
            let slice: Vec<Complex64> =
                (0..config.n_sub).map(|i| block.x[g * config.n_sub + i]).collect();
            let recovered = demap_with_codebook(&slice, &codebook, &config);
            if recovered != sub.source_bits {
                failures += 1;
            }
        }
    }
    CheckOutcome {
        name: "index-mod-roundtrip",
        pass: failures == 0,
        detail: format!("{failures} demap mismatches over all 256 words"),
    }
}
