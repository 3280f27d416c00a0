//! Power strategies and SNR calibration.
//!
//! Index modulation leaves (N−K)·G subcarriers silent, which opens two
//! options besides doing nothing about it:
//!
//! * **PR** (power reallocation): the budget of the silent subcarriers is
//!   poured into the active ones, ρ_PR = (N/K)·ρ. Total transmit energy is
//!   unchanged; per-carrier energy grows.
//! * **PS** (power saving): active subcarriers keep the conventional ρ and
//!   the silent ones simply save their share, shrinking the transmitted
//!   block energy to (GK/N_F)·E_T.
//!
//! `Conventional` is the K = N reference point (all subcarriers active at
//! ρ = E_T/N_F); with K < N it behaves like PS — silent carriers cannot
//! transmit, so the truthful block total is ρ·G·K either way.
//!
//! SNR is specified as E_b/N_0T in dB, where E_b = E_T/(η·N_F) is energy
//! per information bit and N_0T relates to the per-subcarrier noise level
//! through N_0 = (K/N)·N_0T. `snr_to_noise` resolves that chain to the
//! complex noise variance N_0 that the channel injects per sample and that
//! MMSE and the error-probability engine consume — one number, one
//! convention, used everywhere.

use crate::analysis::spectral_efficiency;
use crate::error::{Error, Result};
use crate::im_codec::ModemConfig;

/// How the block power budget is spread over active subcarriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerStrategy {
    /// All-active reference: ρ = E_T/N_F.
    Conventional,
    /// Reallocate silent-carrier power into active ones: ρ = N·E_T/(K·N_F).
    PowerReallocation,
    /// Keep ρ = E_T/N_F and save the silent carriers' share.
    PowerSaving,
}

impl PowerStrategy {
    /// Stable lowercase name used in configs and CSV-adjacent tooling.
    pub fn name(self) -> &'static str {
        match self {
            PowerStrategy::Conventional => "conventional",
            PowerStrategy::PowerReallocation => "pr",
            PowerStrategy::PowerSaving => "ps",
        }
    }
}

/// Resolved per-block power numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPlan {
    pub strategy: PowerStrategy,
    /// Energy per active subcarrier (the √ρ scaling applied before the
    /// inverse transform).
    pub rho: f64,
    /// Mean transmitted block energy, prefix excluded: ρ·G·K.
    pub total_tx_power: f64,
    /// The block budget E_T the plan was derived from.
    pub e_total: f64,
}

/// Derives the power plan for a strategy and budget.
pub fn allocate_power(
    strategy: PowerStrategy,
    e_total: f64,
    config: &ModemConfig,
) -> Result<PowerPlan> {
    if !(e_total > 0.0) || !e_total.is_finite() {
        return Err(Error::Config {
            field: "e_total",
            reason: alloc::format!("block energy budget must be positive and finite, got {e_total}"),
        });
    }
    let n_f = config.n_total as f64;
    let active = (config.n_groups * config.k_active) as f64;
    let rho = match strategy {
        PowerStrategy::Conventional | PowerStrategy::PowerSaving => e_total / n_f,
        PowerStrategy::PowerReallocation => {
            config.n_sub as f64 * e_total / (config.k_active as f64 * n_f)
        }
    };
    Ok(PowerPlan { strategy, rho, total_tx_power: rho * active, e_total })
}

/// Fraction of the budget E_T a strategy actually puts on the air.
///
/// PR spends everything (1.0); PS — and Conventional applied to a sparse
/// block — transmit only the active fraction GK/N_F.
pub fn energy_efficiency(strategy: PowerStrategy, config: &ModemConfig) -> f64 {
    match strategy {
        PowerStrategy::PowerReallocation => 1.0,
        PowerStrategy::Conventional | PowerStrategy::PowerSaving => {
            (config.n_groups * config.k_active) as f64 / config.n_total as f64
        }
    }
}

/// Converts an E_b/N_0T operating point in dB to the per-sample complex
/// noise variance N_0.
///
/// E_b = E_T/(η·N_F), N_0T = E_b·10^(−dB/10), N_0 = (K/N)·N_0T. The
/// returned N_0 is the variance the channel injects per received sample
/// (the unitary chirp transform leaves it unchanged), the ridge MMSE uses,
/// and the denominator the pairwise-error engine divides by — simulation
/// and theory share it by construction.
pub fn snr_to_noise(eb_n0t_db: f64, config: &ModemConfig, plan: &PowerPlan) -> f64 {
    let eta = spectral_efficiency(config);
    debug_assert!(eta > 0.0);
    let eb = plan.e_total / (eta * config.n_total as f64);
    let n0t = eb * libm::pow(10.0, -eb_n0t_db / 10.0);
    n0t * config.k_active as f64 / config.n_sub as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_total: usize, n_sub: usize, k: usize, m: usize) -> ModemConfig {
        ModemConfig::new(n_total, n_sub, k, m, 0.0, 0.0, 0, PowerStrategy::Conventional).unwrap()
    }

    #[test]
    fn pr_boosts_by_n_over_k() {
        let c = cfg(64, 4, 3, 4);
        let conv = allocate_power(PowerStrategy::Conventional, 64.0, &c).unwrap();
        let pr = allocate_power(PowerStrategy::PowerReallocation, 64.0, &c).unwrap();
        assert!((pr.rho - conv.rho * 4.0 / 3.0).abs() < 1e-12);
        assert!((pr.total_tx_power - 64.0).abs() < 1e-9);
    }

    #[test]
    fn ps_totals_track_the_active_fraction() {
        let c = cfg(64, 4, 3, 4);
        let ps = allocate_power(PowerStrategy::PowerSaving, 64.0, &c).unwrap();
        assert!((ps.total_tx_power - 0.75 * 64.0).abs() < 1e-9);
        assert!((energy_efficiency(PowerStrategy::PowerSaving, &c) - 0.75).abs() < 1e-12);
        assert!((energy_efficiency(PowerStrategy::PowerReallocation, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strategies_coincide_when_all_active() {
        let c = cfg(64, 1, 1, 4);
        let pr = allocate_power(PowerStrategy::PowerReallocation, 64.0, &c).unwrap();
        let ps = allocate_power(PowerStrategy::PowerSaving, 64.0, &c).unwrap();
        let conv = allocate_power(PowerStrategy::Conventional, 64.0, &c).unwrap();
        assert!((pr.rho - conv.rho).abs() < 1e-12);
        assert!((ps.rho - conv.rho).abs() < 1e-12);
        assert!((pr.total_tx_power - ps.total_tx_power).abs() < 1e-12);
        assert!((energy_efficiency(PowerStrategy::PowerSaving, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_chain_matches_hand_computation() {
        // η = 2, N_F = 64, E_T = 64, 0 dB: E_b = 0.5, N_0T = 0.5,
        // N_0 = (3/4)·0.5 for (N, K) = (4, 3).
        let c = cfg(64, 4, 3, 4);
        let plan = allocate_power(PowerStrategy::Conventional, 64.0, &c).unwrap();
        let n0 = snr_to_noise(0.0, &c, &plan);
        assert!((n0 - 0.375).abs() < 1e-12);
        // All-active: the (K/N) factor disappears.
        let ca = cfg(64, 1, 1, 4);
        let plan_a = allocate_power(PowerStrategy::Conventional, 64.0, &ca).unwrap();
        let n0_a = snr_to_noise(0.0, &ca, &plan_a);
        assert!((n0_a - 0.5).abs() < 1e-12);
        // Doubling E_T at fixed dB doubles N_0.
        let plan2 = allocate_power(PowerStrategy::Conventional, 128.0, &c).unwrap();
        assert!((snr_to_noise(0.0, &c, &plan2) - 2.0 * n0).abs() < 1e-12);
    }

    #[test]
    fn budget_must_be_positive() {
        let c = cfg(64, 4, 3, 4);
        assert!(matches!(
            allocate_power(PowerStrategy::PowerSaving, 0.0, &c),
            Err(Error::Config { field: "e_total", .. })
        ));
    }
}
