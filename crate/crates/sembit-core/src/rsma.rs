//! RSMA boundary points via successive convex approximation.
//!
//! The bit user splits its message into `N_s + 1` streams decoded
//! alternately with the (unsplit) semantic streams:
//!
//! ```text
//! b,1 -> s,1 -> b,2 -> s,2 -> ... -> s,N_s -> b,N_s+1
//! ```
//!
//! Bit stream `k` therefore sees interference from semantic users `k..N_s`
//! and bit streams `k+1..N_s+1`; semantic user `j` sees semantic users after
//! it and bit streams `j+1..N_s+1`. Power allocation alone can emulate any
//! smaller number of splits or any decoding order, so no order search is
//! needed. Each stream's SINR definition is linearized at the previous
//! iterate, exactly as in the NOMA solver but once per stream.

use crate::sca::{SolveReport, SolverOptions};
use crate::scenario::Scenario;
use crate::semantic::SemanticError;
use crate::subsolver::{self, ConvexSubproblem, SubStatus, SubsolverError};
use serde::Serialize;
use thiserror::Error;

/// Streams with optimized power below this fraction of `P` count as inactive.
pub const ACTIVE_SPLIT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RsmaError {
    #[error("point infeasible at target rate {target} suts/s")]
    PointInfeasible { target: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Subsolver(#[from] SubsolverError),
}

/// One RSMA boundary-point allocation.
#[derive(Debug, Clone, Serialize)]
pub struct RsmaAllocation {
    /// Semantic user powers (W), sorted-gain order.
    pub p_sem: Vec<f64>,
    /// Bit stream powers (W); entry `k` is the stream decoded `k+1`-th among
    /// the bit streams.
    pub p_bit_split: Vec<f64>,
    /// Achieved bit rate (bit/s), recomputed from exact SINRs.
    pub bit_rate: f64,
    /// Bit powers normalized by their sum (zeros when nothing transmits).
    pub split_fractions: Vec<f64>,
    pub report: SolveReport,
}

impl RsmaAllocation {
    /// Number of bit streams carrying more than [`ACTIVE_SPLIT_THRESHOLD`]
    /// of the power budget.
    pub fn active_splits(&self, p_max: f64) -> usize {
        self.p_bit_split
            .iter()
            .filter(|&&p| p > ACTIVE_SPLIT_THRESHOLD * p_max)
            .count()
    }
}

/// Exact linear SINRs under the interleaved decode order; returns
/// `(semantic, bit-stream)` SINRs.
pub fn rsma_exact_sinrs(
    scn: &Scenario,
    p_sem: &[f64],
    p_bit_split: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = scn.n_sem();
    let m = n + 1;
    assert_eq!(p_sem.len(), n, "semantic power vector length");
    assert_eq!(p_bit_split.len(), m, "bit split vector length");
    let sigma2 = scn.sigma2();
    let g_b = scn.gain_bit;

    let sem = (0..n)
        .map(|j| {
            let interference: f64 = (j + 1..n)
                .map(|i| p_sem[i] * scn.gains_sem[i])
                .sum::<f64>()
                + (j + 1..m).map(|l| p_bit_split[l] * g_b).sum::<f64>();
            p_sem[j] * scn.gains_sem[j] / (sigma2 + interference)
        })
        .collect();
    let bit = (0..m)
        .map(|k| {
            let interference: f64 = (k..n)
                .map(|i| p_sem[i] * scn.gains_sem[i])
                .sum::<f64>()
                + (k + 1..m).map(|l| p_bit_split[l] * g_b).sum::<f64>();
            p_bit_split[k] * g_b / (sigma2 + interference)
        })
        .collect();
    (sem, bit)
}

fn exact_bit_rate(scn: &Scenario, p_sem: &[f64], p_bit_split: &[f64]) -> f64 {
    let (_, bit) = rsma_exact_sinrs(scn, p_sem, p_bit_split);
    bit.iter()
        .map(|&rho| scn.bandwidth_hz * (1.0 + rho).log2())
        .sum()
}

/// Bit powers normalized by their sum; the first entry is the split fraction
/// `alpha` for a single semantic user.
pub fn split_fraction_profile(p_bit_split: &[f64]) -> Result<Vec<f64>, RsmaError> {
    let total: f64 = p_bit_split.iter().sum();
    if total <= 0.0 {
        return Err(RsmaError::Domain(
            "split fractions undefined: no bit power allocated".into(),
        ));
    }
    Ok(p_bit_split.iter().map(|&p| p / total).collect())
}

/// Bottom-up threshold-equality semantic powers with bit power `y` on the
/// last stream only (the only stream every semantic user hears).
fn semantic_powers_for_last_stream(scn: &Scenario, gamma_lin: f64, y: f64) -> Vec<f64> {
    let n = scn.n_sem();
    let sigma2 = scn.sigma2();
    let mut p = vec![0.0; n];
    for j in (0..n).rev() {
        let interference: f64 = (j + 1..n).map(|i| p[i] * scn.gains_sem[i]).sum::<f64>()
            + y * scn.gain_bit;
        p[j] = gamma_lin * (sigma2 + interference) / scn.gains_sem[j];
    }
    p
}

/// Largest bit power on the last stream for which the threshold-equality
/// semantic powers stay within the budget. The equality powers are affine in
/// `y`, so the cap follows from the intercepts and slopes directly.
fn max_last_stream_power(scn: &Scenario, gamma_lin: f64) -> f64 {
    let n = scn.n_sem();
    let p_max = scn.p_max_watt;
    let at_zero = semantic_powers_for_last_stream(scn, gamma_lin, 0.0);
    if at_zero.iter().any(|&p| p > p_max) {
        return 0.0;
    }
    // Slopes d p_j / d y, bottom-up.
    let mut slope = vec![0.0; n];
    for j in (0..n).rev() {
        let s: f64 = (j + 1..n)
            .map(|i| slope[i] * scn.gains_sem[i])
            .sum::<f64>()
            + scn.gain_bit;
        slope[j] = gamma_lin * s / scn.gains_sem[j];
    }
    let mut y_max = p_max;
    for j in 0..n {
        if slope[j] > 0.0 {
            y_max = y_max.min((p_max - at_zero[j]) / slope[j]);
        }
    }
    y_max.max(0.0)
}

/// Builds the convex subproblem at linearization point `(p_hat, sigma_hat)`
/// (both of length `N_s + 1`). Variable layout: `p_sem[0..n]`,
/// `p_bit[0..m]`, `rho[0..m]`, `sigma[0..m]`.
fn build_subproblem(
    scn: &Scenario,
    gamma_lin: f64,
    p_hat: &[f64],
    sigma_hat: &[f64],
) -> ConvexSubproblem {
    let n = scn.n_sem();
    let m = n + 1;
    let sigma2 = scn.sigma2();
    let g_b = scn.gain_bit;
    let p_max = scn.p_max_watt;
    let n_vars = n + 3 * m;
    let idx_pb = |k: usize| n + k;
    let idx_rho = |k: usize| n + m + k;
    let idx_sigma = |k: usize| n + 2 * m + k;

    let mut rows = Vec::with_capacity(2 * m + n + 1);

    for k in 0..m {
        // sigma_k covers bit stream k's exact interference.
        let mut cover = vec![0.0; n_vars];
        for i in k..n {
            cover[i] = scn.gains_sem[i];
        }
        for l in k + 1..m {
            cover[idx_pb(l)] = g_b;
        }
        cover[idx_sigma(k)] = -1.0;
        rows.push((cover, -sigma2));

        // First-order surrogate of rho_k <= p_k g_b / sigma_k.
        let mut surrogate = vec![0.0; n_vars];
        surrogate[idx_pb(k)] = -g_b / sigma_hat[k];
        surrogate[idx_sigma(k)] = p_hat[k] * g_b / (sigma_hat[k] * sigma_hat[k]);
        surrogate[idx_rho(k)] = 1.0;
        rows.push((surrogate, p_hat[k] * g_b / sigma_hat[k]));
    }

    // Exact linear SINR floors of the semantic users.
    for j in 0..n {
        let mut row = vec![0.0; n_vars];
        row[j] = -scn.gains_sem[j];
        for i in j + 1..n {
            row[i] = gamma_lin * scn.gains_sem[i];
        }
        for l in j + 1..m {
            row[idx_pb(l)] = gamma_lin * g_b;
        }
        rows.push((row, -gamma_lin * sigma2));
    }

    // Bit power budget over all streams.
    let mut budget = vec![0.0; n_vars];
    for k in 0..m {
        budget[idx_pb(k)] = 1.0;
    }
    rows.push((budget, p_max));

    // Tight valid boxes; sloppy ones wreck the barrier's conditioning.
    // Stream k is heard by semantic users 0..k, the weakest of which caps
    // its power; its SINR denominator is at least noise plus the minimal
    // threshold-equality stack of users k..n.
    let mut bounds = vec![(0.0, p_max); n];
    let mut p_hi = vec![p_max; m];
    for k in 1..m {
        let cap = (p_max * scn.gains_sem[k - 1] / gamma_lin - sigma2) / g_b;
        p_hi[k] = p_hi[k].min(cap.clamp(0.0, p_max));
    }
    for k in 0..m {
        bounds.push((0.0, p_hi[k]));
    }
    for k in 0..m {
        let sigma_lo = min_tail_interference(scn, gamma_lin, k);
        bounds.push((0.0, p_hi[k] * g_b / sigma_lo));
    }
    for k in 0..m {
        let sigma_lo = min_tail_interference(scn, gamma_lin, k);
        let sigma_hi = sigma2
            + (k..n).map(|i| p_max * scn.gains_sem[i]).sum::<f64>()
            + (k + 1..m).map(|l| p_hi[l] * g_b).sum::<f64>();
        bounds.push((sigma_lo.min(sigma_hi), sigma_hi));
    }

    ConvexSubproblem {
        n_vars,
        log_terms: (0..m).map(|k| (idx_rho(k), scn.bandwidth_hz)).collect(),
        linear_constraints: rows,
        bounds,
    }
}

/// Noise plus the smallest interference semantic users `from..` can inflict:
/// their threshold-equality stack ignoring all bit streams.
fn min_tail_interference(scn: &Scenario, gamma_lin: f64, from: usize) -> f64 {
    let n = scn.n_sem();
    let sigma2 = scn.sigma2();
    let mut total = 0.0;
    for j in (from..n).rev() {
        let p_min = gamma_lin * (sigma2 + total) / scn.gains_sem[j];
        total += p_min * scn.gains_sem[j];
    }
    sigma2 + total
}

fn silent_point(scn: &Scenario, tau: f64) -> RsmaAllocation {
    let n = scn.n_sem();
    let mut p_bit_split = vec![0.0; n + 1];
    p_bit_split[n] = scn.p_max_watt;
    let bit_rate = scn.bit_rate_alone();
    let split_fractions = split_fraction_profile(&p_bit_split).unwrap();
    RsmaAllocation {
        p_sem: vec![0.0; n],
        p_bit_split,
        bit_rate,
        split_fractions,
        report: SolveReport {
            objective_trace: vec![bit_rate],
            iterations: 0,
            converged: true,
            tau,
        },
    }
}

fn sca_rsma_from(
    scn: &Scenario,
    target_rate: f64,
    init_scale: f64,
    opts: &SolverOptions,
) -> Result<RsmaAllocation, RsmaError> {
    let n = scn.n_sem();
    let m = n + 1;
    let sigma2 = scn.sigma2();
    let gamma_lin = scn.gamma_floor_linear(target_rate)?;

    // Residual bit power goes on the last stream; semantic powers meet the
    // floor with equality, then get scaled by the multi-start factor.
    let y = max_last_stream_power(scn, gamma_lin).min(scn.p_max_watt) * 0.95;
    let mut p_sem_init = semantic_powers_for_last_stream(scn, gamma_lin, y);
    for p in p_sem_init.iter_mut() {
        *p = (*p * init_scale).min(scn.p_max_watt);
    }
    let mut p_hat = vec![0.0; m];
    p_hat[n] = y;

    let exact_sigmas = |p_sem: &[f64], p_bit: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|k| {
                sigma2
                    + (k..n).map(|i| p_sem[i] * scn.gains_sem[i]).sum::<f64>()
                    + (k + 1..m).map(|l| p_bit[l] * scn.gain_bit).sum::<f64>()
            })
            .collect()
    };
    let mut sigma_hat = exact_sigmas(&p_sem_init, &p_hat);

    let mut hint: Vec<f64> = Vec::with_capacity(n + 3 * m);
    hint.extend_from_slice(&p_sem_init);
    hint.extend_from_slice(&p_hat);
    for k in 0..m {
        hint.push(p_hat[k] * scn.gain_bit / sigma_hat[k]);
    }
    hint.extend_from_slice(&sigma_hat);

    let mut trace: Vec<f64> = Vec::new();
    let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut prev_t = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..opts.max_sca_iterations {
        let sp = build_subproblem(scn, gamma_lin, &p_hat, &sigma_hat);
        let sol = subsolver::solve_from(&sp, &opts.subsolver, Some(&hint))?;
        iterations = iter + 1;
        match sol.status {
            SubStatus::Infeasible => {
                if best.is_none() {
                    return Err(RsmaError::PointInfeasible { target: target_rate });
                }
                converged = true;
                break;
            }
            SubStatus::IterLimit => {
                if best.is_none() {
                    return Err(RsmaError::PointInfeasible { target: target_rate });
                }
                break;
            }
            SubStatus::Optimal => {}
        }

        let p_sem = sol.x[..n].to_vec();
        let p_bit = sol.x[n..n + m].to_vec();
        let t_exact = exact_bit_rate(scn, &p_sem, &p_bit);

        if t_exact < prev_t {
            converged = (t_exact - prev_t).abs() < opts.tau_bps;
            break;
        }
        trace.push(t_exact);
        best = Some((p_sem.clone(), p_bit.clone()));
        if (t_exact - prev_t).abs() < opts.tau_bps {
            converged = true;
            break;
        }
        prev_t = t_exact;
        sigma_hat = exact_sigmas(&p_sem, &p_bit);
        p_hat = p_bit;
        hint = sol.x;
    }

    let (p_sem, p_bit_split) =
        best.ok_or(RsmaError::PointInfeasible { target: target_rate })?;

    // Re-verify the original nonconvex constraints with exact SINRs.
    let (sem_sinrs, _) = rsma_exact_sinrs(scn, &p_sem, &p_bit_split);
    if sem_sinrs.iter().any(|&s| s < gamma_lin * (1.0 - 1e-6)) {
        return Err(RsmaError::PointInfeasible { target: target_rate });
    }
    let bit_rate = exact_bit_rate(scn, &p_sem, &p_bit_split);
    let total_split: f64 = p_bit_split.iter().sum();
    let split_fractions = if total_split > 0.0 {
        split_fraction_profile(&p_bit_split)?
    } else {
        vec![0.0; m]
    };

    Ok(RsmaAllocation {
        p_sem,
        p_bit_split,
        bit_rate,
        split_fractions,
        report: SolveReport {
            objective_trace: trace,
            iterations,
            converged,
            tau: opts.tau_bps,
        },
    })
}

/// RSMA boundary point at the given target semantic rate, multi-started over
/// the deterministic initial-power scales.
pub fn sca_rsma(
    scn: &Scenario,
    target_rate: f64,
    opts: &SolverOptions,
) -> Result<RsmaAllocation, RsmaError> {
    if target_rate <= 0.0 {
        return Ok(silent_point(scn, opts.tau_bps));
    }
    if scn.n_sem() == 0 {
        return Err(RsmaError::PointInfeasible { target: target_rate });
    }
    let mut best: Option<RsmaAllocation> = None;
    for &scale in opts.scales() {
        match sca_rsma_from(scn, target_rate, scale, opts) {
            Ok(alloc) => {
                let better = best
                    .as_ref()
                    .map(|b| alloc.bit_rate > b.bit_rate)
                    .unwrap_or(true);
                if better {
                    best = Some(alloc);
                }
            }
            Err(RsmaError::PointInfeasible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(RsmaError::PointInfeasible { target: target_rate })
}

/// Result of the conventional two-bit-user rate-splitting baseline.
#[derive(Debug, Clone, Serialize)]
pub struct TwoBitBaseline {
    /// Maximum rate of the split user (bit/s).
    pub r1_max: f64,
    /// Fraction of the split user's power on its first-decoded stream.
    pub alpha: f64,
    pub p11: f64,
    pub p12: f64,
    pub p2: f64,
    pub report: SolveReport,
}

/// Two bit users, user 1 split into two streams decoded first and last,
/// user 2 in between at a guaranteed rate `r2_target` (bit/s). Maximizes
/// user 1's total rate with the same SCA machinery.
///
/// User 2's power enters only through its rate constraint, which an optimal
/// solution meets with equality, so it is eliminated before the solve:
/// `p2 = c (sigma^2 + p12 g1) / g2` with `c = 2^(r2/w) - 1`.
pub fn two_bit_user_baseline(
    g1: f64,
    g2: f64,
    p_max: f64,
    bandwidth_hz: f64,
    noise_w: f64,
    r2_target: f64,
    opts: &SolverOptions,
) -> Result<TwoBitBaseline, RsmaError> {
    if !(g1 > 0.0 && g2 > 0.0 && p_max > 0.0 && bandwidth_hz > 0.0 && noise_w > 0.0) {
        return Err(RsmaError::Domain("all baseline inputs must be positive".into()));
    }
    if r2_target < 0.0 {
        return Err(RsmaError::Domain("r2_target must be nonnegative".into()));
    }
    let w = bandwidth_hz;
    let sigma2 = noise_w;
    let c = (r2_target / w).exp2() - 1.0;
    if c * sigma2 > p_max * g2 * (1.0 + 1e-12) {
        return Err(RsmaError::PointInfeasible { target: r2_target });
    }

    if c <= 1e-15 {
        // User 2 silent: any split of user 1 achieves the single-user rate;
        // no split is needed, so all power rides the last-decoded stream.
        let r1 = w * (1.0 + p_max * g1 / sigma2).log2();
        return Ok(TwoBitBaseline {
            r1_max: r1,
            alpha: 0.0,
            p11: 0.0,
            p12: p_max,
            p2: 0.0,
            report: SolveReport {
                objective_trace: vec![r1],
                iterations: 0,
                converged: true,
                tau: opts.tau_bps,
            },
        });
    }

    // p12 cap from p2 <= P once p2 sits at its rate-equality value.
    let p12_hi = ((p_max * g2 / c - sigma2) / g1).clamp(0.0, p_max);

    // Variables: p11, p12, rho11, sigma11, rho12. The eliminated p2 keeps
    // sigma11 at least (1+c) sigma^2, which caps rho11 tightly.
    let n_vars = 5;
    let sigma11_lo = (1.0 + c) * sigma2;
    let sigma11_hi = (1.0 + c) * (sigma2 + g1 * p12_hi);
    let rho11_hi = p_max * g1 / sigma11_lo;
    let rho12_hi = p12_hi * g1 / sigma2;

    let build = |p11_hat: f64, sigma_hat: f64| -> ConvexSubproblem {
        let mut rows = Vec::with_capacity(4);
        // sigma11 >= (1+c)(sigma^2 + p12 g1) after eliminating p2.
        rows.push((vec![0.0, (1.0 + c) * g1, 0.0, -1.0, 0.0], -(1.0 + c) * sigma2));
        // Surrogate of rho11 <= p11 g1 / sigma11.
        rows.push((
            vec![
                -g1 / sigma_hat,
                0.0,
                1.0,
                p11_hat * g1 / (sigma_hat * sigma_hat),
                0.0,
            ],
            p11_hat * g1 / sigma_hat,
        ));
        // rho12 <= p12 g1 / sigma^2 (exact; the last stream sees only noise).
        rows.push((vec![0.0, -g1 / sigma2, 0.0, 0.0, 1.0], 0.0));
        // Split power budget.
        rows.push((vec![1.0, 1.0, 0.0, 0.0, 0.0], p_max));
        ConvexSubproblem {
            n_vars,
            log_terms: vec![(2, w), (4, w)],
            linear_constraints: rows,
            bounds: vec![
                (0.0, p_max),
                (0.0, p12_hi),
                (0.0, rho11_hi),
                (sigma11_lo.min(sigma11_hi), sigma11_hi),
                (0.0, rho12_hi),
            ],
        }
    };

    let exact = |p11: f64, p12: f64| -> (f64, f64, f64) {
        let p2 = c * (sigma2 + p12 * g1) / g2;
        let sigma11 = sigma2 + p12 * g1 + p2 * g2;
        let rho11 = p11 * g1 / sigma11;
        let rho12 = p12 * g1 / sigma2;
        let r1 = w * ((1.0 + rho11).log2() + (1.0 + rho12).log2());
        (r1, p2, sigma11)
    };

    let mut best: Option<TwoBitBaseline> = None;
    for &frac in &[0.5f64, 0.75, 1.0] {
        let p12_init = p12_hi * frac;
        let mut p11_hat = (p_max - p12_init).max(0.0);
        let (_, _, mut sigma_hat) = exact(p11_hat, p12_init);
        let mut hint = vec![
            p11_hat,
            p12_init,
            p11_hat * g1 / sigma_hat,
            sigma_hat,
            p12_init * g1 / sigma2,
        ];
        let mut trace: Vec<f64> = Vec::new();
        let mut best_point: Option<(f64, f64)> = None;
        let mut prev_t = 0.0;
        let mut converged = false;
        let mut iterations = 0;

        for iter in 0..opts.max_sca_iterations {
            let sp = build(p11_hat, sigma_hat);
            let sol = subsolver::solve_from(&sp, &opts.subsolver, Some(&hint))?;
            iterations = iter + 1;
            if sol.status != SubStatus::Optimal {
                if best_point.is_none() {
                    return Err(RsmaError::PointInfeasible { target: r2_target });
                }
                converged = sol.status == SubStatus::Infeasible;
                break;
            }
            let (p11, p12) = (sol.x[0], sol.x[1]);
            let (t_exact, _, sigma_exact) = exact(p11, p12);
            if t_exact < prev_t {
                converged = (t_exact - prev_t).abs() < opts.tau_bps;
                break;
            }
            trace.push(t_exact);
            best_point = Some((p11, p12));
            if (t_exact - prev_t).abs() < opts.tau_bps {
                converged = true;
                break;
            }
            prev_t = t_exact;
            p11_hat = p11;
            sigma_hat = sigma_exact;
            hint = sol.x;
        }

        let Some((p11, p12)) = best_point else {
            continue;
        };
        let (r1, p2, _) = exact(p11, p12);
        let total = p11 + p12;
        let alpha = if total > 0.0 { p11 / total } else { 0.0 };
        let candidate = TwoBitBaseline {
            r1_max: r1,
            alpha,
            p11,
            p12,
            p2,
            report: SolveReport {
                objective_trace: trace,
                iterations,
                converged,
                tau: opts.tau_bps,
            },
        };
        let better = best
            .as_ref()
            .map(|b| candidate.r1_max > b.r1_max)
            .unwrap_or(true);
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or(RsmaError::PointInfeasible { target: r2_target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantic::{LogisticParams, SemanticConfig};

    fn scenario(gain_bit: f64, gains: Vec<f64>) -> Scenario {
        Scenario::new_explicit(
            1e6,
            -140.0,
            0.1,
            gain_bit,
            gains,
            SemanticConfig::new(8, 1.0, 0.8).unwrap(),
            LogisticParams::new(0.22, 0.95, 0.5, 0.45, 8).unwrap(),
            0,
        )
        .unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn sinr_index_bookkeeping_last_stream_only() {
        // Only the last bit stream active: every semantic user hears it.
        let scn = scenario(3e-8, vec![2e-8, 1e-8]);
        let p_sem = [0.05, 0.06];
        let p_bit = [0.0, 0.0, 0.08];
        let (sem, bit) = rsma_exact_sinrs(&scn, &p_sem, &p_bit);
        let expected_s0 =
            0.05 * 2e-8 / (1e-11 + 0.06 * 1e-8 + 0.08 * 3e-8);
        assert!((sem[0] - expected_s0).abs() < 1e-12 * expected_s0);
        let expected_s1 = 0.06 * 1e-8 / (1e-11 + 0.08 * 3e-8);
        assert!((sem[1] - expected_s1).abs() < 1e-12 * expected_s1);
        // Last stream decodes free of interference.
        assert!((bit[2] - 0.08 * 3e-8 / 1e-11).abs() < 1e-12 * bit[2]);
    }

    #[test]
    fn sinr_degenerate_without_semantic_users() {
        let scn = Scenario::new_explicit(
            1e6,
            -140.0,
            0.1,
            3e-8,
            vec![],
            SemanticConfig::new(8, 1.0, 0.8).unwrap(),
            LogisticParams::new(0.22, 0.95, 0.5, 0.45, 8).unwrap(),
            0,
        )
        .unwrap();
        let (sem, bit) = rsma_exact_sinrs(&scn, &[], &[0.1]);
        assert!(sem.is_empty());
        assert!((bit[0] - 0.1 * 3e-8 / 1e-11).abs() < 1e-12 * bit[0]);
    }

    #[test]
    fn sinr_matches_resummation_oracle() {
        let scn = scenario(3e-8, vec![5e-8, 2e-8]);
        let p_sem = [0.03, 0.07];
        let p_bit = [0.02, 0.05, 0.03];
        let (sem, bit) = rsma_exact_sinrs(&scn, &p_sem, &p_bit);
        // Independent re-summation with 1-based paper indices.
        let sigma2 = 1e-11;
        for j in 1..=2usize {
            let mut interf = sigma2;
            for i in (j + 1)..=2 {
                interf += p_sem[i - 1] * scn.gains_sem[i - 1];
            }
            for l in (j + 1)..=3 {
                interf += p_bit[l - 1] * scn.gain_bit;
            }
            let oracle = p_sem[j - 1] * scn.gains_sem[j - 1] / interf;
            assert!((sem[j - 1] - oracle).abs() <= 1e-15 * oracle);
        }
        for k in 1..=3usize {
            let mut interf = sigma2;
            for i in k..=2 {
                interf += p_sem[i - 1] * scn.gains_sem[i - 1];
            }
            for l in (k + 1)..=3 {
                interf += p_bit[l - 1] * scn.gain_bit;
            }
            let oracle = p_bit[k - 1] * scn.gain_bit / interf;
            assert!((bit[k - 1] - oracle).abs() <= 1e-15 * oracle);
        }
    }

    #[test]
    fn zero_target_puts_all_power_on_last_stream() {
        let scn = scenario(3e-8, vec![2e-8]);
        let alloc = sca_rsma(&scn, 0.0, &opts()).unwrap();
        assert_eq!(alloc.p_bit_split, vec![0.0, 0.1]);
        assert!((alloc.bit_rate - scn.bit_rate_alone()).abs() < 1e-9);
        assert_eq!(alloc.split_fractions, vec![0.0, 1.0]);
    }

    #[test]
    fn single_user_matches_power_grid_oracle() {
        // 101^3 grid over (p_s, p_b1, p_b2).
        let scn = scenario(3.7e-8, vec![1.8e-8]);
        let target = 0.05e6;
        let alloc = sca_rsma(&scn, target, &opts()).unwrap();
        let gamma = scn.gamma_floor_linear(target).unwrap();
        let mut oracle = f64::NEG_INFINITY;
        let steps = 100;
        for a in 0..=steps {
            let p_s = 0.1 * a as f64 / steps as f64;
            for b in 0..=steps {
                let p1 = 0.1 * b as f64 / steps as f64;
                for d in 0..=steps {
                    let p2 = 0.1 * d as f64 / steps as f64;
                    if p1 + p2 > 0.1 {
                        continue;
                    }
                    let (sem, bit) = rsma_exact_sinrs(&scn, &[p_s], &[p1, p2]);
                    if sem[0] >= gamma {
                        let rate: f64 = bit
                            .iter()
                            .map(|&rho| 1e6 * (1.0 + rho).log2())
                            .sum();
                        oracle = oracle.max(rate);
                    }
                }
            }
        }
        assert!(
            alloc.bit_rate >= oracle * (1.0 - 1e-3),
            "sca {} vs grid {oracle}",
            alloc.bit_rate
        );
    }

    #[test]
    fn plateau_has_two_active_streams_with_constant_alpha() {
        let scn = scenario(3.7e-8, vec![1.1e-8]);
        let plateau = scn.plateau_edge();
        let mut alphas = Vec::new();
        for frac in [0.05, 0.3, 0.6, 0.9, 1.0] {
            let alloc = sca_rsma(&scn, plateau * frac, &opts()).unwrap();
            assert_eq!(alloc.active_splits(0.1), 2, "at S = {} x plateau", frac);
            alphas.push(alloc.split_fractions[0]);
        }
        let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
        assert!(mean > 0.0);
        for &a in &alphas {
            assert!(
                (a - mean).abs() / mean < 0.02,
                "alpha varies on the plateau: {alphas:?}"
            );
        }
    }

    #[test]
    fn trace_monotone_and_exact_feasibility() {
        let scn = scenario(3.7e-8, vec![2.5e-8, 1.2e-8]);
        for target in [0.02e6, 0.06e6, 0.1e6] {
            let Ok(alloc) = sca_rsma(&scn, target, &opts()) else {
                continue;
            };
            assert!(alloc.report.converged);
            for pair in alloc.report.objective_trace.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-12);
            }
            let gamma = scn.gamma_floor_linear(target).unwrap();
            let (sem, _) = rsma_exact_sinrs(&scn, &alloc.p_sem, &alloc.p_bit_split);
            for (j, &s) in sem.iter().enumerate() {
                assert!(s >= gamma * (1.0 - 1e-8), "user {j}");
            }
            let budget: f64 = alloc.p_bit_split.iter().sum();
            assert!(budget <= 0.1 + 1e-9);
            // Reported rate is the exact recomputation.
            let exact = exact_bit_rate(&scn, &alloc.p_sem, &alloc.p_bit_split);
            assert!((alloc.bit_rate - exact).abs() <= 1e-6 * exact.max(1.0));
        }
    }

    #[test]
    fn dominates_noma_across_sweep() {
        use crate::noma::noma_boundary_point;
        let scn = scenario(3.7e-8, vec![2.5e-8, 1.2e-8]);
        for i in 0..12 {
            let target = scn.rate_ceiling() * 0.95 * i as f64 / 11.0;
            let noma = noma_boundary_point(&scn, target, &opts());
            let rsma = sca_rsma(&scn, target, &opts());
            match (noma, rsma) {
                (Ok(n), Ok(r)) => assert!(
                    r.bit_rate >= n.bit_rate - 1e-6 * 1e6,
                    "S={target}: rsma {} < noma {}",
                    r.bit_rate,
                    n.bit_rate
                ),
                (Ok(n), Err(e)) => {
                    panic!("S={target}: noma feasible ({}) but rsma errored: {e}", n.bit_rate)
                }
                _ => {}
            }
        }
    }

    #[test]
    fn split_profile_trivia() {
        assert_eq!(split_fraction_profile(&[0.0, 0.1]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(
            split_fraction_profile(&[0.05, 0.05]).unwrap(),
            vec![0.5, 0.5]
        );
        assert!(matches!(
            split_fraction_profile(&[0.0, 0.0]),
            Err(RsmaError::Domain(_))
        ));
    }

    #[test]
    fn two_bit_baseline_zero_r2() {
        let b = two_bit_user_baseline(3e-8, 2e-8, 0.1, 1e6, 1e-11, 0.0, &opts()).unwrap();
        assert_eq!(b.alpha, 0.0);
        let expected = 1e6 * (1.0f64 + 0.1 * 3e-8 / 1e-11).log2();
        assert!((b.r1_max - expected).abs() < 1e-6);
    }

    #[test]
    fn two_bit_baseline_max_r2_forces_zero_stream2() {
        let (g1, g2) = (3e-8, 2e-8);
        let r2_max = 1e6 * (1.0f64 + 0.1 * g2 / 1e-11).log2();
        let b = two_bit_user_baseline(g1, g2, 0.1, 1e6, 1e-11, r2_max, &opts()).unwrap();
        assert!(b.p12 <= 1e-9, "p12={}", b.p12);
        assert!((b.alpha - 1.0).abs() < 1e-6);
        let expected = 1e6 * (1.0 + 0.1 * g1 / (1e-11 + 0.1 * g2)).log2();
        assert!((b.r1_max - expected).abs() / expected < 1e-6);
    }

    #[test]
    fn two_bit_baseline_unachievable_r2_rejected() {
        let r2_max = 1e6 * (1.0f64 + 0.1 * 2e-8 / 1e-11).log2();
        assert!(matches!(
            two_bit_user_baseline(3e-8, 2e-8, 0.1, 1e6, 1e-11, r2_max * 1.01, &opts()),
            Err(RsmaError::PointInfeasible { .. })
        ));
    }

    #[test]
    fn two_bit_baseline_mid_r2_matches_grid_and_closed_form() {
        let (g1, g2, p, w, s2) = (3e-8, 2e-8, 0.1, 1e6, 1e-11);
        let r2_max = w * (1.0f64 + p * g2 / s2).log2();
        let r2 = 0.5 * r2_max;
        let b = two_bit_user_baseline(g1, g2, p, w, s2, r2, &opts()).unwrap();
        assert!(b.alpha > 0.0 && b.alpha < 1.0, "alpha={}", b.alpha);

        // Closed form: p12 at its cap, p11 the rest, p2 at rate equality.
        let c = (r2 / w).exp2() - 1.0;
        let p12_star = ((p * g2 / c - s2) / g1).clamp(0.0, p);
        let r1_closed = w * (1.0 + g1 * (p + c * p12_star) / (s2 * (1.0 + c))).log2();
        assert!(
            (b.r1_max - r1_closed).abs() / r1_closed < 1e-6,
            "sca {} vs closed form {r1_closed}",
            b.r1_max
        );
        assert!((b.alpha - (p - p12_star) / p).abs() < 1e-5);

        // 201^3 grid oracle over (p11, p12, p2).
        let mut oracle = f64::NEG_INFINITY;
        let steps = 200;
        for a in 0..=steps {
            let p11 = p * a as f64 / steps as f64;
            for bb in 0..=steps {
                let p12 = p * bb as f64 / steps as f64;
                if p11 + p12 > p {
                    continue;
                }
                for d in 0..=steps {
                    let p2 = p * d as f64 / steps as f64;
                    if p2 * g2 < c * (s2 + p12 * g1) {
                        continue;
                    }
                    let rho11 = p11 * g1 / (s2 + p12 * g1 + p2 * g2);
                    let rho12 = p12 * g1 / s2;
                    let r1 = w * ((1.0 + rho11).log2() + (1.0 + rho12).log2());
                    oracle = oracle.max(r1);
                }
            }
        }
        assert!(
            b.r1_max >= oracle * (1.0 - 1e-3),
            "sca {} vs grid {oracle}",
            b.r1_max
        );
    }

    #[test]
    fn two_bit_alpha_non_decreasing_in_r2() {
        let (g1, g2, p, w, s2) = (3e-8, 2e-8, 0.1, 1e6, 1e-11);
        let r2_max = w * (1.0f64 + p * g2 / s2).log2();
        let mut prev = -1.0;
        for i in 0..20 {
            let r2 = 0.9 * r2_max * i as f64 / 19.0;
            let b = two_bit_user_baseline(g1, g2, p, w, s2, r2, &opts()).unwrap();
            assert!(
                b.alpha >= prev - 1e-6,
                "alpha dropped at step {i}: {} -> {}",
                prev,
                b.alpha
            );
            prev = b.alpha;
        }
    }
}
