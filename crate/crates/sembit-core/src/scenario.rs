//! Physical setup: bandwidth, noise, power budget, and channel gains for
//! `N_s` semantic users plus one bit user.
//!
//! Channel generation is deterministic and documented so golden files are
//! portable: gains are `pathloss * e` where `e` is a unit-mean exponential
//! draw (squared Rayleigh amplitude) produced from a ChaCha20 stream seeded
//! with `seed`. Uniforms are formed as `(next_u64() >> 11) * 2^-53` and
//! transformed by the inverse CDF `e = -ln(1 - u)`. The first draw is the bit
//! user's gain, the following `n` draws belong to the semantic users, so
//! scenarios with different user counts but the same seed share their leading
//! gains.

use crate::semantic::{LogisticParams, SemanticConfig, SemanticError};
use crate::units::dbm_to_watt;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Distance-based path loss `rho0 * (1/d)^beta` with `rho0` referenced at 1 m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    /// Reference path loss at 1 m, in dB (typically negative).
    pub rho0_db: f64,
    /// Path-loss exponent (beta).
    pub exponent: f64,
    /// Transmitter-receiver distance in meters.
    pub distance_m: f64,
}

impl PathLossModel {
    pub fn new(rho0_db: f64, exponent: f64, distance_m: f64) -> Result<Self, ScenarioError> {
        if !(distance_m >= 1.0) {
            return Err(ScenarioError::Invalid(format!(
                "distance must be at least 1 m, got {distance_m}"
            )));
        }
        if !(exponent > 0.0) {
            return Err(ScenarioError::Invalid(format!(
                "path-loss exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self {
            rho0_db,
            exponent,
            distance_m,
        })
    }

    /// Linear mean power gain at the configured distance.
    pub fn linear(&self) -> f64 {
        10f64.powf(self.rho0_db / 10.0) * self.distance_m.powf(-self.exponent)
    }
}

/// Draws `n_users` linear channel gains from the documented deterministic
/// stream: path loss times unit-mean exponential fading.
pub fn draw_channels(pl: &PathLossModel, n_users: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let base = pl.linear();
    (0..n_users)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            base * -(1.0 - u).ln()
        })
        .collect()
}

/// SINR in dB; a zero signal maps to the `-inf` sentinel.
pub fn sinr_db(signal_w: f64, interference_w: f64, noise_w: f64) -> f64 {
    debug_assert!(noise_w > 0.0 && signal_w >= 0.0 && interference_w >= 0.0);
    if signal_w == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (signal_w / (interference_w + noise_w)).log10()
}

/// Immutable description of one coexistence instance.
///
/// Semantic gains are stored sorted descending (user `j` has the `j`-th
/// largest gain); `sem_order` maps each sorted slot back to the position the
/// gain had at construction so user identity survives reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub p_max_watt: f64,
    /// Linear power gain of the bit user (`|h_b|^2`).
    pub gain_bit: f64,
    /// Linear power gains of the semantic users, sorted descending.
    pub gains_sem: Vec<f64>,
    /// Original index (at construction) of each sorted semantic gain.
    pub sem_order: Vec<usize>,
    pub cfg: SemanticConfig,
    pub params: LogisticParams,
    pub seed: u64,
}

impl Scenario {
    /// Builds a scenario from explicit linear gains, bypassing random
    /// generation. Semantic gains are sorted descending internally.
    #[allow(clippy::too_many_arguments)]
    pub fn new_explicit(
        bandwidth_hz: f64,
        noise_psd_dbm_hz: f64,
        p_max_watt: f64,
        gain_bit: f64,
        gains_sem: Vec<f64>,
        cfg: SemanticConfig,
        params: LogisticParams,
        seed: u64,
    ) -> Result<Self, ScenarioError> {
        if !(bandwidth_hz > 0.0) {
            return Err(ScenarioError::Invalid(format!(
                "bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        if !(p_max_watt > 0.0) {
            return Err(ScenarioError::Invalid(format!(
                "power budget must be positive, got {p_max_watt}"
            )));
        }
        if !(gain_bit > 0.0) || gains_sem.iter().any(|&g| !(g > 0.0)) {
            return Err(ScenarioError::Invalid("all gains must be positive".into()));
        }
        cfg.validate_against(&params)?;

        let mut indexed: Vec<(usize, f64)> = gains_sem.iter().copied().enumerate().collect();
        indexed.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let sem_order = indexed.iter().map(|&(i, _)| i).collect();
        let gains_sem = indexed.into_iter().map(|(_, g)| g).collect();

        Ok(Self {
            bandwidth_hz,
            noise_psd_dbm_hz,
            p_max_watt,
            gain_bit,
            gains_sem,
            sem_order,
            cfg,
            params,
            seed,
        })
    }

    /// Builds a scenario by drawing `n_sem + 1` gains from the seeded fading
    /// stream (bit user first).
    #[allow(clippy::too_many_arguments)]
    pub fn from_path_loss(
        bandwidth_hz: f64,
        noise_psd_dbm_hz: f64,
        p_max_watt: f64,
        pl: &PathLossModel,
        n_sem: usize,
        cfg: SemanticConfig,
        params: LogisticParams,
        seed: u64,
    ) -> Result<Self, ScenarioError> {
        let gains = draw_channels(pl, n_sem + 1, seed);
        Self::new_explicit(
            bandwidth_hz,
            noise_psd_dbm_hz,
            p_max_watt,
            gains[0],
            gains[1..].to_vec(),
            cfg,
            params,
            seed,
        )
    }

    pub fn n_sem(&self) -> usize {
        self.gains_sem.len()
    }

    /// Noise power in watts over the given bandwidth.
    pub fn noise_power(&self, bandwidth_hz: f64) -> f64 {
        dbm_to_watt(self.noise_psd_dbm_hz) * bandwidth_hz
    }

    /// Noise power over the whole available band (`sigma_n^2`).
    pub fn sigma2(&self) -> f64 {
        self.noise_power(self.bandwidth_hz)
    }

    /// Bit rate when the bit user transmits alone at full power over the
    /// whole band. All schemes coincide with this value at zero semantic rate.
    pub fn bit_rate_alone(&self) -> f64 {
        let snr = self.p_max_watt * self.gain_bit / self.sigma2();
        self.bandwidth_hz * (1.0 + snr).log2()
    }

    /// Linear SINR floor for the semantic users at the given target semantic
    /// rate (suts/s) over the full band.
    pub fn gamma_floor_linear(&self, target_rate: f64) -> Result<f64, SemanticError> {
        let db = crate::semantic::gamma_for_rate(
            &self.cfg,
            &self.params,
            self.bandwidth_hz,
            target_rate,
        )?;
        Ok(crate::units::db_to_linear(db))
    }

    /// Highest per-user semantic rate expressible over the full band.
    pub fn rate_ceiling(&self) -> f64 {
        self.cfg.rate_ceiling(&self.params, self.bandwidth_hz)
    }

    /// Semantic rate at which the similarity constraint stops dominating.
    pub fn plateau_edge(&self) -> f64 {
        self.cfg.plateau_edge(self.bandwidth_hz)
    }

    /// Short FNV-1a digest over all scenario fields, for provenance tags in
    /// reports and sweep metadata.
    pub fn digest(&self) -> String {
        let mut text = format!(
            "w={:.17e};n0={:.17e};p={:.17e};gb={:.17e};k={};i={:.17e};sth={:.17e};a1={:.17e};a2={:.17e};c1={:.17e};c2={:.17e};seed={}",
            self.bandwidth_hz,
            self.noise_psd_dbm_hz,
            self.p_max_watt,
            self.gain_bit,
            self.cfg.k,
            self.cfg.i_per_l,
            self.cfg.s_th,
            self.params.a1,
            self.params.a2,
            self.params.c1,
            self.params.c2,
            self.seed,
        );
        for g in &self.gains_sem {
            text.push_str(&format!(";gs={g:.17e}"));
        }
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in text.as_bytes() {
            hash ^= u64::from(*byte);
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{hash:016x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SemanticConfig {
        SemanticConfig::new(8, 1.0, 0.8).unwrap()
    }

    fn params() -> LogisticParams {
        LogisticParams::new(0.2, 0.9, 0.25, 0.0, 8).unwrap()
    }

    fn scenario(gains: Vec<f64>) -> Scenario {
        Scenario::new_explicit(1e6, -140.0, 0.1, 3.7e-8, gains, cfg(), params(), 0).unwrap()
    }

    #[test]
    fn noise_power_reference_value() {
        // -140 dBm/Hz over 1 MHz is -80 dBm = 1e-11 W.
        let scn = scenario(vec![1e-8]);
        assert!((scn.noise_power(1e6) - 1e-11).abs() < 1e-24);
        assert!((scn.noise_power(0.5e6) - 0.5e-11).abs() < 1e-24);
        assert!((scn.noise_power(1.0) - 1e-17).abs() < 1e-30);
    }

    #[test]
    fn path_loss_reference_gain() {
        let pl = PathLossModel::new(-30.0, 3.0, 30.0).unwrap();
        assert!((pl.linear() - 1e-3 * 30f64.powi(-3)).abs() < 1e-20);
    }

    #[test]
    fn draws_are_deterministic_and_prefix_stable() {
        let pl = PathLossModel::new(-30.0, 3.0, 30.0).unwrap();
        let a = draw_channels(&pl, 5, 99);
        let b = draw_channels(&pl, 5, 99);
        assert_eq!(a, b);
        let c = draw_channels(&pl, 2, 99);
        assert_eq!(&a[..2], &c[..]);
        let d = draw_channels(&pl, 5, 100);
        assert_ne!(a, d);
    }

    #[test]
    fn draw_mean_matches_exponential_oracle() {
        // Monte-Carlo oracle: sample mean of 1e5 unit-mean draws within 2%.
        let pl = PathLossModel::new(0.0, 1.0, 1.0).unwrap();
        let draws = draw_channels(&pl, 100_000, 7);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean={mean}");
    }

    #[test]
    fn sinr_db_cases() {
        assert!((sinr_db(1e-9, 0.0, 1e-11) - 20.0).abs() < 1e-12);
        assert_eq!(sinr_db(0.0, 1.0, 1e-11), f64::NEG_INFINITY);
        // 1e-9 / (9e-11 + 1e-11) = 10.
        assert!((sinr_db(1e-9, 9e-11, 1e-11) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn semantic_gains_sorted_with_permutation() {
        let scn = scenario(vec![2e-8, 5e-8, 1e-8]);
        assert_eq!(scn.gains_sem, vec![5e-8, 2e-8, 1e-8]);
        assert_eq!(scn.sem_order, vec![1, 0, 2]);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(PathLossModel::new(-30.0, 3.0, 0.5).is_err());
        assert!(PathLossModel::new(-30.0, -1.0, 30.0).is_err());
        assert!(
            Scenario::new_explicit(0.0, -140.0, 0.1, 1e-8, vec![], cfg(), params(), 0).is_err()
        );
        assert!(
            Scenario::new_explicit(1e6, -140.0, 0.1, 0.0, vec![], cfg(), params(), 0).is_err()
        );
        assert!(Scenario::new_explicit(
            1e6,
            -140.0,
            0.1,
            1e-8,
            vec![1e-8, -1e-9],
            cfg(),
            params(),
            0
        )
        .is_err());
    }

    #[test]
    fn bit_rate_alone_formula() {
        let scn = scenario(vec![1e-8]);
        let expected = 1e6 * (1.0f64 + 0.1 * 3.7e-8 / 1e-11).log2();
        assert!((scn.bit_rate_alone() - expected).abs() < 1e-6);
    }
}
