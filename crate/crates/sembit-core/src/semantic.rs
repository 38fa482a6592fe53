//! Sentence-similarity logistic model, semantic rate, and the conversions
//! from similarity/rate requirements to SINR floors.
//!
//! Similarity between a transmitted and a recovered sentence is modeled as a
//! generalized logistic function of the received SNR in dB:
//!
//! ```text
//! sim(snr_db) = a1 + (a2 - a1) / (1 + exp(-(c1 * snr_db + c2)))
//! ```
//!
//! A sentence is decodable only when its similarity reaches a threshold
//! `s_th`, which induces an SINR floor `gamma_sem`. Demanding a semantic rate
//! above the decodability plateau raises that floor further; see
//! [`gamma_for_rate`].
//!
//! No fitted parameter tables for a specific neural transceiver are shipped;
//! the defaults in the CLI configs are non-normative placeholders and
//! [`fit_logistic`] exists to derive parameters from user-supplied samples.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance (dB) for bisection inversions of the logistic.
const INVERSION_TOL_DB: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SemanticError {
    /// A similarity threshold or argument lies outside the reachable range.
    #[error("domain error: {0}")]
    Domain(String),
    /// A target semantic rate exceeds the upper-asymptote ceiling.
    #[error("infeasible rate: target {target} suts/s exceeds ceiling {ceiling} suts/s")]
    InfeasibleRate { target: f64, ceiling: f64 },
    /// Curve fitting could not proceed or did not produce valid parameters.
    #[error("fit error: {0}")]
    Fit(String),
}

/// Coefficients of the generalized logistic similarity curve for one value of
/// `k` (semantic symbols per word).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Lower similarity asymptote, in `[0, 1)`.
    pub a1: f64,
    /// Upper similarity asymptote, in `(a1, 1]`.
    pub a2: f64,
    /// Logistic growth rate per dB of SNR; strictly positive.
    pub c1: f64,
    /// Logistic midpoint offset (dimensionless).
    pub c2: f64,
    /// Semantic symbols per word this parameter set belongs to.
    pub k: u32,
}

impl LogisticParams {
    pub fn new(a1: f64, a2: f64, c1: f64, c2: f64, k: u32) -> Result<Self, SemanticError> {
        if !(a1.is_finite() && a2.is_finite() && c1.is_finite() && c2.is_finite()) {
            return Err(SemanticError::Domain("non-finite logistic parameter".into()));
        }
        if !(0.0..1.0).contains(&a1) || a2 <= a1 || a2 > 1.0 {
            return Err(SemanticError::Domain(format!(
                "asymptotes must satisfy 0 <= a1 < a2 <= 1, got a1={a1}, a2={a2}"
            )));
        }
        if c1 <= 0.0 {
            return Err(SemanticError::Domain(format!(
                "growth rate c1 must be positive, got {c1}"
            )));
        }
        if k == 0 {
            return Err(SemanticError::Domain("k must be at least 1".into()));
        }
        Ok(Self { a1, a2, c1, c2, k })
    }

    /// Sentence similarity at the given received SNR in dB.
    ///
    /// Total and strictly increasing; saturates at `a1` / `a2`.
    pub fn similarity(&self, snr_db: f64) -> f64 {
        if snr_db == f64::NEG_INFINITY {
            return self.a1;
        }
        self.a1 + (self.a2 - self.a1) / (1.0 + (-(self.c1 * snr_db + self.c2)).exp())
    }

    /// SINR floor (dB) induced by a similarity threshold `s_th`.
    ///
    /// Inverts the logistic in closed form; `similarity(gamma_sem(s)) == s`.
    pub fn gamma_sem(&self, s_th: f64) -> Result<f64, SemanticError> {
        if s_th <= self.a1 || s_th >= self.a2 {
            return Err(SemanticError::Domain(format!(
                "threshold {s_th} outside reachable similarity range ({}, {})",
                self.a1, self.a2
            )));
        }
        Ok(-(1.0 / self.c1) * (self.c2 + ((self.a2 - self.a1) / (s_th - self.a1) - 1.0).ln()))
    }
}

/// Per-source semantic configuration: symbols per word, information per word,
/// and the decodability threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticConfig {
    /// Semantic symbols per word.
    pub k: u32,
    /// Semantic information per word (suts/word); source-type constant.
    pub i_per_l: f64,
    /// Sentence-similarity threshold for decodability.
    pub s_th: f64,
}

impl SemanticConfig {
    pub fn new(k: u32, i_per_l: f64, s_th: f64) -> Result<Self, SemanticError> {
        if k == 0 {
            return Err(SemanticError::Domain("k must be at least 1".into()));
        }
        if !(i_per_l > 0.0) {
            return Err(SemanticError::Domain(format!(
                "i_per_l must be positive, got {i_per_l}"
            )));
        }
        if !(0.0..=1.0).contains(&s_th) {
            return Err(SemanticError::Domain(format!(
                "s_th must lie in [0, 1], got {s_th}"
            )));
        }
        Ok(Self { k, i_per_l, s_th })
    }

    /// Checks that `s_th` is strictly inside the logistic's reachable range,
    /// so the induced SINR floor exists, and that `k` matches.
    pub fn validate_against(&self, params: &LogisticParams) -> Result<(), SemanticError> {
        if self.k != params.k {
            return Err(SemanticError::Domain(format!(
                "config k={} does not match parameter set k={}",
                self.k, params.k
            )));
        }
        if self.s_th <= params.a1 || self.s_th >= params.a2 {
            return Err(SemanticError::Domain(format!(
                "s_th={} unreachable for asymptotes ({}, {})",
                self.s_th, params.a1, params.a2
            )));
        }
        Ok(())
    }

    /// Highest semantic rate (suts/s) expressible over `bandwidth_hz`.
    pub fn rate_ceiling(&self, params: &LogisticParams, bandwidth_hz: f64) -> f64 {
        params.a2 * bandwidth_hz * self.i_per_l / self.k as f64
    }

    /// Semantic rate delivered while similarity sits exactly at `s_th`; for
    /// targets at or below this the similarity constraint dominates.
    pub fn plateau_edge(&self, bandwidth_hz: f64) -> f64 {
        self.s_th * bandwidth_hz * self.i_per_l / self.k as f64
    }
}

/// Semantic rate (suts/s) over `bandwidth_hz` at the given SNR.
pub fn semantic_rate(
    cfg: &SemanticConfig,
    params: &LogisticParams,
    bandwidth_hz: f64,
    snr_db: f64,
) -> f64 {
    bandwidth_hz * cfg.i_per_l / cfg.k as f64 * params.similarity(snr_db)
}

/// SINR floor (dB) induced jointly by the similarity threshold and a target
/// semantic rate.
///
/// On the plateau (`target_rate <= s_th * w * i_per_l / k`) the similarity
/// constraint dominates and the floor is `gamma_sem`. Above it, the logistic
/// is inverted by bisection to absolute tolerance 1e-10 dB. The result never
/// falls below `gamma_sem`.
///
/// The plateau condition includes the bandwidth factor so that both sides are
/// rates in suts/s; see the module docs on unit conventions.
pub fn gamma_for_rate(
    cfg: &SemanticConfig,
    params: &LogisticParams,
    bandwidth_hz: f64,
    target_rate: f64,
) -> Result<f64, SemanticError> {
    cfg.validate_against(params)?;
    let gamma_sem = params.gamma_sem(cfg.s_th)?;
    if target_rate <= cfg.plateau_edge(bandwidth_hz) {
        return Ok(gamma_sem);
    }
    let ceiling = cfg.rate_ceiling(params, bandwidth_hz);
    // Required similarity above the plateau; unreachable at the asymptote.
    let needed = target_rate * cfg.k as f64 / (bandwidth_hz * cfg.i_per_l);
    if needed >= params.a2 {
        return Err(SemanticError::InfeasibleRate {
            target: target_rate,
            ceiling,
        });
    }

    // Bracket [gamma_sem, hi] by doubling, then bisect on similarity.
    let mut lo = gamma_sem;
    let mut step = 1.0;
    let mut hi = lo + step;
    while params.similarity(hi) < needed {
        step *= 2.0;
        hi = lo + step;
        if !hi.is_finite() {
            return Err(SemanticError::InfeasibleRate {
                target: target_rate,
                ceiling,
            });
        }
    }
    while hi - lo > INVERSION_TOL_DB {
        let mid = 0.5 * (lo + hi);
        if params.similarity(mid) < needed {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).max(gamma_sem))
}

/// Result of fitting the logistic model to `(snr_db, similarity)` samples.
#[derive(Debug, Clone, Copy)]
pub struct LogisticFit {
    pub params: LogisticParams,
    /// Mean squared residual of the fit.
    pub mse: f64,
    /// Accepted Levenberg–Marquardt steps.
    pub iterations: usize,
}

/// Fits the four logistic coefficients to similarity samples by damped
/// Gauss–Newton (Levenberg–Marquardt) least squares.
///
/// Initialization is deterministic: asymptotes from the sample extrema padded
/// by 2% of the range, growth/offset from a linear regression of the logit
/// transform. Requires at least 4 samples, at least two distinct SNR values,
/// similarities in `[0, 1]`, and non-constant similarities.
pub fn fit_logistic(samples: &[(f64, f64)], k: u32) -> Result<LogisticFit, SemanticError> {
    if samples.len() < 4 {
        return Err(SemanticError::Fit(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(SemanticError::Fit("non-finite sample".into()));
    }
    if samples.iter().any(|&(_, y)| !(0.0..=1.0).contains(&y)) {
        return Err(SemanticError::Fit("similarity outside [0, 1]".into()));
    }
    let x0 = samples[0].0;
    if samples.iter().all(|&(x, _)| x == x0) {
        return Err(SemanticError::Fit("need at least two distinct snr values".into()));
    }
    let (ymin, ymax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(y), hi.max(y))
        });
    let range = ymax - ymin;
    if range < 1e-9 {
        return Err(SemanticError::Fit("degenerate samples: similarity is constant".into()));
    }

    let mut theta = initial_guess(samples, ymin, ymax, range);
    let mut sse = sum_squared_error(samples, &theta);
    let mut lambda = 1e-3;
    let mut accepted = 0usize;

    for _ in 0..300 {
        let (jtj, jtr) = normal_equations(samples, &theta);
        let mut improved = false;
        for _ in 0..25 {
            let mut damped = jtj.clone();
            for i in 0..4 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(delta) = damped.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let candidate = project(&[
                theta[0] + delta[0],
                theta[1] + delta[1],
                theta[2] + delta[2],
                theta[3] + delta[3],
            ]);
            let candidate_sse = sum_squared_error(samples, &candidate);
            if candidate_sse < sse {
                let gain = sse - candidate_sse;
                theta = candidate;
                sse = candidate_sse;
                lambda = (lambda / 3.0).max(1e-12);
                accepted += 1;
                improved = true;
                if gain <= 1e-16 * sse.max(1e-30) {
                    break;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }

    let params = LogisticParams::new(theta[0], theta[1], theta[2], theta[3], k)
        .map_err(|e| SemanticError::Fit(format!("fit left the valid domain: {e}")))?;
    Ok(LogisticFit {
        params,
        mse: sse / samples.len() as f64,
        iterations: accepted,
    })
}

fn initial_guess(samples: &[(f64, f64)], ymin: f64, ymax: f64, range: f64) -> [f64; 4] {
    let a1 = (ymin - 0.02 * range).max(0.0);
    let a2 = (ymax + 0.02 * range).min(1.0);
    // Linear regression of z = ln((a2 - a1)/(y - a1) - 1) = -(c1 x + c2).
    let mut n = 0.0;
    let (mut sx, mut sz, mut sxx, mut sxz) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in samples {
        let span = a2 - a1;
        let clamped = (y - a1).clamp(1e-6 * span, (1.0 - 1e-6) * span);
        let z = (span / clamped - 1.0).ln();
        n += 1.0;
        sx += x;
        sz += z;
        sxx += x * x;
        sxz += x * z;
    }
    let denom = n * sxx - sx * sx;
    let (slope, intercept) = if denom.abs() > 1e-12 {
        let slope = (n * sxz - sx * sz) / denom;
        (slope, (sz - slope * sx) / n)
    } else {
        (-0.3, 0.0)
    };
    let c1 = (-slope).max(1e-3);
    let c2 = -intercept;
    [a1, a2, c1, c2]
}

fn project(theta: &[f64; 4]) -> [f64; 4] {
    let mut a1 = theta[0].clamp(0.0, 1.0);
    let mut a2 = theta[1].clamp(0.0, 1.0);
    if a2 < a1 + 1e-6 {
        let mid = 0.5 * (a1 + a2);
        a1 = (mid - 5e-7).max(0.0);
        a2 = (mid + 5e-7).min(1.0);
        if a2 < a1 + 1e-6 {
            a2 = a1 + 1e-6;
        }
    }
    [a1, a2, theta[2].max(1e-9), theta[3]]
}

fn model(theta: &[f64; 4], x: f64) -> (f64, [f64; 4]) {
    let [a1, a2, c1, c2] = *theta;
    let s = 1.0 / (1.0 + (-(c1 * x + c2)).exp());
    let value = a1 + (a2 - a1) * s;
    let ds = (a2 - a1) * s * (1.0 - s);
    (value, [1.0 - s, s, ds * x, ds])
}

fn sum_squared_error(samples: &[(f64, f64)], theta: &[f64; 4]) -> f64 {
    samples
        .iter()
        .map(|&(x, y)| {
            let (m, _) = model(theta, x);
            (m - y) * (m - y)
        })
        .sum()
}

fn normal_equations(samples: &[(f64, f64)], theta: &[f64; 4]) -> (DMatrix<f64>, DVector<f64>) {
    let mut jtj = DMatrix::zeros(4, 4);
    let mut jtr = DVector::zeros(4);
    for &(x, y) in samples {
        let (m, jac) = model(theta, x);
        let r = m - y;
        for i in 0..4 {
            jtr[i] += jac[i] * r;
            for j in 0..4 {
                jtj[(i, j)] += jac[i] * jac[j];
            }
        }
    }
    (jtj, jtr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn example_params() -> LogisticParams {
        LogisticParams::new(0.2, 0.9, 0.25, 0.0, 8).unwrap()
    }

    fn example_cfg() -> SemanticConfig {
        SemanticConfig::new(8, 1.0, 0.8).unwrap()
    }

    fn unit_f64(rng: &mut ChaCha20Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Independent inversion oracle: bisect similarity directly.
    fn bisect_similarity(params: &LogisticParams, target: f64) -> f64 {
        let (mut lo, mut hi) = (-2000.0, 2000.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if params.similarity(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn similarity_midpoint() {
        let p = example_params();
        assert!((p.similarity(0.0) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn similarity_asymptotes() {
        let p = example_params();
        assert!((p.similarity(1e6) - 0.9).abs() < 1e-12);
        assert!((p.similarity(-1e6) - 0.2).abs() < 1e-12);
        assert_eq!(p.similarity(f64::NEG_INFINITY), 0.2);
    }

    #[test]
    fn similarity_at_10_db_matches_hand_computed_value() {
        // 0.2 + 0.7 / (1 + e^{-2.5}), evaluated independently.
        let p = example_params();
        assert!((p.similarity(10.0) - 0.84689927398512954).abs() < 1e-15);
    }

    #[test]
    fn similarity_strictly_increasing_on_grid() {
        let p = example_params();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let snr = -50.0 + 100.0 * i as f64 / 999.0;
            let s = p.similarity(snr);
            assert!(s > prev, "not increasing at snr={snr}");
            prev = s;
        }
    }

    #[test]
    fn semantic_rate_plateau_value() {
        // 1 MHz, k=8, similarity 0.8 -> 0.1 Msuts/s.
        let cfg = example_cfg();
        let p = example_params();
        let snr = p.gamma_sem(0.8).unwrap();
        let s = semantic_rate(&cfg, &p, 1e6, snr);
        assert!((s - 0.1e6).abs() < 1e-3);
    }

    #[test]
    fn semantic_rate_zero_bandwidth() {
        assert_eq!(semantic_rate(&example_cfg(), &example_params(), 0.0, 5.0), 0.0);
    }

    #[test]
    fn semantic_rate_ceiling_at_high_snr() {
        let cfg = example_cfg();
        let p = example_params();
        let s = semantic_rate(&cfg, &p, 1e6, 1e9);
        assert!((s - 0.9 * 1e6 / 8.0).abs() < 1e-6);
    }

    #[test]
    fn gamma_sem_midpoint_is_minus_c2_over_c1() {
        let p = LogisticParams::new(0.2, 0.9, 0.25, 0.7, 8).unwrap();
        let g = p.gamma_sem(0.55).unwrap();
        assert!((g - (-0.7 / 0.25)).abs() < 1e-12);
    }

    #[test]
    fn gamma_sem_rejects_asymptote() {
        let p = example_params();
        assert!(matches!(p.gamma_sem(0.9), Err(SemanticError::Domain(_))));
        assert!(matches!(p.gamma_sem(0.2), Err(SemanticError::Domain(_))));
        // Trend toward +inf as the threshold approaches the upper asymptote.
        assert!(p.gamma_sem(0.8999).unwrap() > p.gamma_sem(0.89).unwrap());
    }

    #[test]
    fn gamma_sem_matches_bisection_oracle() {
        let p = example_params();
        let g = p.gamma_sem(0.8).unwrap();
        assert!((g - 7.1670378769122234).abs() < 1e-12);
        assert!((g - bisect_similarity(&p, 0.8)).abs() < 1e-9);
        assert!((p.similarity(g) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn gamma_sem_similarity_round_trip() {
        let p = example_params();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = 0.2 + 0.7 * (0.001 + 0.998 * unit_f64(&mut rng));
            let g = p.gamma_sem(s).unwrap();
            assert!((p.similarity(g) - s).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_for_rate_first_branch() {
        let cfg = example_cfg();
        let p = example_params();
        let gs = p.gamma_sem(0.8).unwrap();
        assert!((gamma_for_rate(&cfg, &p, 1e6, 0.0).unwrap() - gs).abs() < 1e-12);
        // Branch boundary: both branches agree.
        let edge = cfg.plateau_edge(1e6);
        assert!((gamma_for_rate(&cfg, &p, 1e6, edge).unwrap() - gs).abs() < 1e-9);
    }

    #[test]
    fn gamma_for_rate_second_branch_matches_inverse_oracle() {
        let cfg = example_cfg();
        let p = example_params();
        let g = gamma_for_rate(&cfg, &p, 1e6, 0.105e6).unwrap();
        // (1e6 / 8) * similarity(g) = 0.105e6.
        assert!((semantic_rate(&cfg, &p, 1e6, g) - 0.105e6).abs() < 1.0);
        let oracle = bisect_similarity(&p, 0.105e6 * 8.0 / 1e6);
        assert!((g - oracle).abs() < 1e-7);
    }

    #[test]
    fn gamma_for_rate_monotone_and_floored() {
        let cfg = example_cfg();
        let p = example_params();
        let gs = p.gamma_sem(0.8).unwrap();
        let ceiling = cfg.rate_ceiling(&p, 1e6);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let target = ceiling * 0.999 * i as f64 / 199.0;
            let g = gamma_for_rate(&cfg, &p, 1e6, target).unwrap();
            assert!(g >= gs);
            assert!(g >= prev - 1e-9);
            prev = g;
        }
    }

    #[test]
    fn gamma_for_rate_rejects_above_ceiling() {
        let cfg = example_cfg();
        let p = example_params();
        let ceiling = cfg.rate_ceiling(&p, 1e6);
        assert!(matches!(
            gamma_for_rate(&cfg, &p, 1e6, ceiling * 1.01),
            Err(SemanticError::InfeasibleRate { .. })
        ));
    }

    #[test]
    fn fit_recovers_noiseless_parameters() {
        let truth = example_params();
        let samples: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let x = -20.0 + 40.0 * i as f64 / 39.0;
                (x, truth.similarity(x))
            })
            .collect();
        let fit = fit_logistic(&samples, 8).unwrap();
        assert!(fit.mse < 1e-6, "mse={}", fit.mse);
        assert!((fit.params.a1 - 0.2).abs() < 1e-3);
        assert!((fit.params.a2 - 0.9).abs() < 1e-3);
    }

    #[test]
    fn fit_rejects_constant_similarity() {
        let samples: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.5)).collect();
        assert!(matches!(fit_logistic(&samples, 8), Err(SemanticError::Fit(_))));
    }

    #[test]
    fn fit_rejects_too_few_or_degenerate_snr() {
        assert!(fit_logistic(&[(0.0, 0.1), (1.0, 0.2), (2.0, 0.3)], 8).is_err());
        let same_x: Vec<(f64, f64)> = vec![(1.0, 0.1), (1.0, 0.2), (1.0, 0.3), (1.0, 0.4)];
        assert!(fit_logistic(&same_x, 8).is_err());
    }

    #[test]
    fn fit_recovers_noisy_parameters_within_5_percent() {
        // Synthetic-recovery oracle: truth (0.1, 0.95, 0.4, -2) plus uniform
        // noise of +-0.005 from a fixed stream.
        let truth = LogisticParams::new(0.1, 0.95, 0.4, -2.0, 8).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let samples: Vec<(f64, f64)> = (0..120)
            .map(|i| {
                let x = -15.0 + 35.0 * i as f64 / 119.0;
                let noise = (unit_f64(&mut rng) - 0.5) * 0.01;
                (x, (truth.similarity(x) + noise).clamp(0.0, 1.0))
            })
            .collect();
        let fit = fit_logistic(&samples, 8).unwrap();
        assert!((fit.params.a1 - 0.1).abs() / 0.1 < 0.05, "a1={}", fit.params.a1);
        assert!((fit.params.a2 - 0.95).abs() / 0.95 < 0.05, "a2={}", fit.params.a2);
        assert!((fit.params.c1 - 0.4).abs() / 0.4 < 0.05, "c1={}", fit.params.c1);
        assert!((fit.params.c2 - (-2.0)).abs() / 2.0 < 0.05, "c2={}", fit.params.c2);
    }

    #[test]
    fn fit_round_trips_self_generated_data() {
        // Fit, regenerate from the fit, fit again: parameters are a fixed point.
        let truth = LogisticParams::new(0.25, 0.92, 0.5, 0.45, 8).unwrap();
        let samples: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let x = -12.0 + 24.0 * i as f64 / 29.0;
                (x, truth.similarity(x))
            })
            .collect();
        let first = fit_logistic(&samples, 8).unwrap();
        let regenerated: Vec<(f64, f64)> = samples
            .iter()
            .map(|&(x, _)| (x, first.params.similarity(x)))
            .collect();
        let second = fit_logistic(&regenerated, 8).unwrap();
        assert!((first.params.a1 - second.params.a1).abs() < 1e-4);
        assert!((first.params.a2 - second.params.a2).abs() < 1e-4);
        assert!((first.params.c1 - second.params.c1).abs() < 1e-3);
        assert!((first.params.c2 - second.params.c2).abs() < 1e-3);
    }

    #[test]
    fn invalid_parameter_construction_is_rejected() {
        assert!(LogisticParams::new(0.9, 0.2, 0.25, 0.0, 8).is_err());
        assert!(LogisticParams::new(0.2, 1.1, 0.25, 0.0, 8).is_err());
        assert!(LogisticParams::new(0.2, 0.9, -0.1, 0.0, 8).is_err());
        assert!(LogisticParams::new(0.2, 0.9, 0.25, 0.0, 0).is_err());
        assert!(SemanticConfig::new(0, 1.0, 0.8).is_err());
        assert!(SemanticConfig::new(8, 0.0, 0.8).is_err());
        assert!(SemanticConfig::new(8, 1.0, 1.5).is_err());
    }
}
