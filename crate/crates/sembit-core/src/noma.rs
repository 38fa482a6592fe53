//! NOMA boundary points via successive convex approximation.
//!
//! All users share the band. The base station decodes the semantic users in
//! descending channel-gain order; the bit user is inserted after `q` of them,
//! and `q` is chosen by exhaustive search. For a fixed `q` the only nonconvex
//! constraint is the bit user's SINR definition, which is linearized at the
//! previous iterate and refreshed until the achieved bit rate stabilizes.
//!
//! Every returned allocation is re-verified against the exact (non-linearized)
//! SINR expressions, and the reported trace holds exact achieved rates, so
//! the linearization can never leak an optimistic result.

use crate::sca::{SolveReport, SolverOptions};
use crate::scenario::Scenario;
use crate::semantic::SemanticError;
use crate::subsolver::{self, ConvexSubproblem, SubStatus, SubsolverError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NomaError {
    /// No feasible allocation exists at this target rate (for this `q`, or
    /// for any `q` when raised by the boundary-point search).
    #[error("point infeasible at target rate {target} suts/s")]
    PointInfeasible { target: f64 },
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Subsolver(#[from] SubsolverError),
}

/// One NOMA boundary-point allocation.
#[derive(Debug, Clone, Serialize)]
pub struct NomaAllocation {
    /// Semantic user powers (W), sorted-gain order.
    pub p_sem: Vec<f64>,
    /// Bit user power (W).
    pub p_bit: f64,
    /// Number of semantic users decoded before the bit user.
    pub q: usize,
    /// Achieved bit rate (bit/s), recomputed from exact SINRs.
    pub bit_rate: f64,
    pub report: SolveReport,
}

/// Exact linear SINR of semantic user `j` (0-based, sorted-gain order) under
/// decoding position `q`: interference from users decoded later plus the bit
/// user when it is decoded after `j`.
pub fn noma_sinr_sem(scn: &Scenario, p_sem: &[f64], p_bit: f64, q: usize, j: usize) -> f64 {
    let sigma2 = scn.sigma2();
    let mut interference: f64 = (j + 1..scn.n_sem())
        .map(|i| p_sem[i] * scn.gains_sem[i])
        .sum();
    if j < q {
        interference += p_bit * scn.gain_bit;
    }
    p_sem[j] * scn.gains_sem[j] / (sigma2 + interference)
}

/// Exact linear SINR of the bit user under decoding position `q`.
pub fn noma_sinr_bit(scn: &Scenario, p_sem: &[f64], p_bit: f64, q: usize) -> f64 {
    let sigma2 = scn.sigma2();
    let interference: f64 = (q..scn.n_sem()).map(|i| p_sem[i] * scn.gains_sem[i]).sum();
    p_bit * scn.gain_bit / (sigma2 + interference)
}

/// Semantic powers meeting the SINR floor with equality, solved bottom-up
/// (weakest user first), given a bit-power guess; scaled and capped at `P`.
fn initial_semantic_powers(
    scn: &Scenario,
    gamma_lin: f64,
    q: usize,
    p_bit: f64,
    scale: f64,
) -> Vec<f64> {
    let n = scn.n_sem();
    let sigma2 = scn.sigma2();
    let mut p = vec![0.0; n];
    for j in (0..n).rev() {
        let mut interference: f64 = (j + 1..n).map(|i| p[i] * scn.gains_sem[i]).sum();
        if j < q {
            interference += p_bit * scn.gain_bit;
        }
        p[j] = gamma_lin * (sigma2 + interference) / scn.gains_sem[j];
    }
    for v in p.iter_mut() {
        *v = (*v * scale).min(scn.p_max_watt);
    }
    p
}

/// Noise plus the smallest interference semantic users `from..` can inflict:
/// their threshold-equality power stack ignoring the bit user, which every
/// feasible allocation dominates.
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

/// Largest bit power compatible with the SINR floors of the users decoded
/// before it (each of which hears the bit signal), ignoring the rest of
/// their interference. A valid bound; the true optimum is weakly smaller.
fn max_bit_power(scn: &Scenario, gamma_lin: f64, q: usize) -> f64 {
    let sigma2 = scn.sigma2();
    let mut hi = scn.p_max_watt;
    for j in 0..q {
        let cap = (scn.p_max_watt * scn.gains_sem[j] / gamma_lin - sigma2) / scn.gain_bit;
        hi = hi.min(cap.max(0.0));
    }
    hi
}

/// Builds the convex subproblem for fixed `q` and linearization point
/// `(p_bit_hat, sigma_hat)`. Variable layout: `p_sem[0..n]`, then `p_bit`,
/// `rho_bit`, `sigma_bit`. Bounds are kept as tight as cheap valid analysis
/// allows; sloppy boxes wreck the barrier's conditioning.
fn build_subproblem(
    scn: &Scenario,
    gamma_lin: f64,
    q: usize,
    p_bit_hat: f64,
    sigma_hat: f64,
) -> ConvexSubproblem {
    let n = scn.n_sem();
    let sigma2 = scn.sigma2();
    let g_b = scn.gain_bit;
    let p_max = scn.p_max_watt;
    let n_vars = n + 3;
    let idx_pb = n;
    let idx_rho = n + 1;
    let idx_sigma = n + 2;

    let mut rows = Vec::with_capacity(n + 2);

    // sigma_bit covers the exact interference the bit user sees.
    let mut cover = vec![0.0; n_vars];
    for i in q..n {
        cover[i] = scn.gains_sem[i];
    }
    cover[idx_sigma] = -1.0;
    rows.push((cover, -sigma2));

    // First-order surrogate of rho <= p_bit g_b / sigma_bit at the iterate.
    let mut surrogate = vec![0.0; n_vars];
    surrogate[idx_pb] = -g_b / sigma_hat;
    surrogate[idx_sigma] = p_bit_hat * g_b / (sigma_hat * sigma_hat);
    surrogate[idx_rho] = 1.0;
    rows.push((surrogate, p_bit_hat * g_b / sigma_hat));

    // Exact linear SINR floors of the semantic users.
    for j in 0..n {
        let mut row = vec![0.0; n_vars];
        row[j] = -scn.gains_sem[j];
        for i in j + 1..n {
            row[i] = gamma_lin * scn.gains_sem[i];
        }
        if j < q {
            row[idx_pb] = gamma_lin * g_b;
        }
        rows.push((row, -gamma_lin * sigma2));
    }

    let sigma_lo = min_tail_interference(scn, gamma_lin, q);
    let sigma_hi = sigma2 + (q..n).map(|i| p_max * scn.gains_sem[i]).sum::<f64>();
    let p_bit_hi = max_bit_power(scn, gamma_lin, q);
    let mut bounds = vec![(0.0, p_max); n];
    bounds.push((0.0, p_bit_hi));
    bounds.push((0.0, p_bit_hi * g_b / sigma_lo));
    bounds.push((sigma_lo.min(sigma_hi), sigma_hi));

    ConvexSubproblem {
        n_vars,
        log_terms: vec![(idx_rho, scn.bandwidth_hz)],
        linear_constraints: rows,
        bounds,
    }
}

/// Closed-form allocation when the semantic users are silent: full band and
/// full power to the bit user. Identical across all schemes.
fn silent_point(scn: &Scenario, q: usize, tau: f64) -> NomaAllocation {
    let bit_rate = scn.bit_rate_alone();
    NomaAllocation {
        p_sem: vec![0.0; scn.n_sem()],
        p_bit: scn.p_max_watt,
        q,
        bit_rate,
        report: SolveReport {
            objective_trace: vec![bit_rate],
            iterations: 0,
            converged: true,
            tau,
        },
    }
}

/// Runs the SCA loop for a fixed decoding position `q` from one initial
/// point (`init_scale` scales the threshold-equality semantic powers).
fn sca_noma_from(
    scn: &Scenario,
    target_rate: f64,
    q: usize,
    init_scale: f64,
    opts: &SolverOptions,
) -> Result<NomaAllocation, NomaError> {
    let n = scn.n_sem();
    let gamma_lin = scn.gamma_floor_linear(target_rate)?;
    let sigma2 = scn.sigma2();

    let mut p_bit_hat = 0.5 * scn.p_max_watt;
    let p_init = initial_semantic_powers(scn, gamma_lin, q, p_bit_hat, init_scale);
    let mut sigma_hat = sigma2
        + (q..n)
            .map(|i| p_init[i] * scn.gains_sem[i])
            .sum::<f64>();

    let mut hint: Vec<f64> = p_init
        .iter()
        .copied()
        .chain([p_bit_hat, p_bit_hat * scn.gain_bit / sigma_hat, sigma_hat])
        .collect();

    let mut trace: Vec<f64> = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None; // (p_sem, p_bit)
    let mut prev_t = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..opts.max_sca_iterations {
        let sp = build_subproblem(scn, gamma_lin, q, p_bit_hat, sigma_hat);
        let sol = subsolver::solve_from(&sp, &opts.subsolver, Some(&hint))?;
        iterations = iter + 1;
        match sol.status {
            SubStatus::Infeasible => {
                if best.is_none() {
                    return Err(NomaError::PointInfeasible { target: target_rate });
                }
                converged = true;
                break;
            }
            SubStatus::IterLimit => {
                if best.is_none() {
                    return Err(NomaError::PointInfeasible { target: target_rate });
                }
                break;
            }
            SubStatus::Optimal => {}
        }

        let p_sem = sol.x[..n].to_vec();
        let p_bit = sol.x[n];
        let rho_exact = noma_sinr_bit(scn, &p_sem, p_bit, q);
        let t_exact = scn.bandwidth_hz * (1.0 + rho_exact).log2();

        if t_exact < prev_t {
            // The surrogate stopped helping; keep the best exact iterate.
            converged = (t_exact - prev_t).abs() < opts.tau_bps;
            break;
        }
        trace.push(t_exact);
        best = Some((p_sem.clone(), p_bit));
        if (t_exact - prev_t).abs() < opts.tau_bps {
            converged = true;
            break;
        }
        prev_t = t_exact;
        p_bit_hat = p_bit;
        sigma_hat = sigma2
            + (q..n)
                .map(|i| p_sem[i] * scn.gains_sem[i])
                .sum::<f64>();
        hint = sol.x;
    }

    let (p_sem, p_bit) = best.ok_or(NomaError::PointInfeasible { target: target_rate })?;

    // Re-verify the original nonconvex constraints with exact SINRs.
    for j in 0..n {
        let sinr = noma_sinr_sem(scn, &p_sem, p_bit, q, j);
        if sinr < gamma_lin * (1.0 - 1e-6) {
            return Err(NomaError::PointInfeasible { target: target_rate });
        }
    }
    let bit_rate = scn.bandwidth_hz * (1.0 + noma_sinr_bit(scn, &p_sem, p_bit, q)).log2();

    Ok(NomaAllocation {
        p_sem,
        p_bit,
        q,
        bit_rate,
        report: SolveReport {
            objective_trace: trace,
            iterations,
            converged,
            tau: opts.tau_bps,
        },
    })
}

/// SCA for a fixed decoding position, multi-started over the deterministic
/// initial-power scales; the best exact bit rate wins.
pub fn sca_noma(
    scn: &Scenario,
    target_rate: f64,
    q: usize,
    opts: &SolverOptions,
) -> Result<NomaAllocation, NomaError> {
    assert!(q <= scn.n_sem(), "decoding position out of range");
    if target_rate <= 0.0 {
        return Ok(silent_point(scn, q, opts.tau_bps));
    }
    if scn.n_sem() == 0 {
        return Err(NomaError::PointInfeasible { target: target_rate });
    }
    let mut best: Option<NomaAllocation> = None;
    for &scale in opts.scales() {
        match sca_noma_from(scn, target_rate, q, scale, opts) {
            Ok(alloc) => {
                let better = best
                    .as_ref()
                    .map(|b| alloc.bit_rate > b.bit_rate)
                    .unwrap_or(true);
                if better {
                    best = Some(alloc);
                }
            }
            Err(NomaError::PointInfeasible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(NomaError::PointInfeasible { target: target_rate })
}

/// Boundary point: exhaustive search over the bit user's decoding position.
/// Ties break toward the smallest `q` (within 1e-9 relative).
pub fn noma_boundary_point(
    scn: &Scenario,
    target_rate: f64,
    opts: &SolverOptions,
) -> Result<NomaAllocation, NomaError> {
    if target_rate <= 0.0 {
        return Ok(silent_point(scn, 0, opts.tau_bps));
    }
    let mut best: Option<NomaAllocation> = None;
    for q in 0..=scn.n_sem() {
        match sca_noma(scn, target_rate, q, opts) {
            Ok(alloc) => {
                let better = match &best {
                    None => true,
                    Some(b) => alloc.bit_rate > b.bit_rate * (1.0 + 1e-9),
                };
                if better {
                    best = Some(alloc);
                }
            }
            Err(NomaError::PointInfeasible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(NomaError::PointInfeasible { target: target_rate })
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
    fn sinr_excludes_bit_power_once_it_is_cancelled() {
        // Single semantic user, q=0: the bit user is decoded first and
        // cancelled, so the semantic user never sees its power.
        let scn = scenario(3e-8, vec![2e-8]);
        let with_bit = noma_sinr_sem(&scn, &[0.05], 0.1, 0, 0);
        let without = noma_sinr_sem(&scn, &[0.05], 0.0, 0, 0);
        assert_eq!(with_bit, without);
        assert!((with_bit - 0.05 * 2e-8 / 1e-11).abs() < 1e-9 * with_bit);
    }

    #[test]
    fn sinr_includes_bit_power_while_it_is_undecoded() {
        // q=1: the semantic user is decoded first, while the bit signal is
        // still on the air.
        let scn = scenario(3e-8, vec![2e-8]);
        let sinr = noma_sinr_sem(&scn, &[0.05], 0.1, 1, 0);
        let expected = 0.05 * 2e-8 / (1e-11 + 0.1 * 3e-8);
        assert!((sinr - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn sinr_matches_resummation_oracle() {
        let scn = scenario(3e-8, vec![5e-8, 2e-8, 1e-8]);
        let p = [0.03, 0.05, 0.08];
        let p_bit = 0.07;
        for q in 0..=3 {
            for j in 0..3 {
                // Independent re-summation, 1-based index convention.
                let mut interf = 1e-11;
                for i in 0..3 {
                    if i > j {
                        interf += p[i] * scn.gains_sem[i];
                    }
                }
                if j + 1 <= q {
                    interf += p_bit * scn.gain_bit;
                }
                let oracle = p[j] * scn.gains_sem[j] / interf;
                let got = noma_sinr_sem(&scn, &p, p_bit, q, j);
                assert!(
                    (got - oracle).abs() <= 1e-15 * oracle,
                    "q={q} j={j}: {got} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn zero_target_uses_full_power_over_full_band() {
        let scn = scenario(3e-8, vec![2e-8]);
        let alloc = noma_boundary_point(&scn, 0.0, &opts()).unwrap();
        assert_eq!(alloc.p_sem, vec![0.0]);
        assert_eq!(alloc.p_bit, 0.1);
        assert!((alloc.bit_rate - scn.bit_rate_alone()).abs() < 1e-9);
    }

    #[test]
    fn single_user_q0_converges_in_two_iterations() {
        // q=0: the semantic user is decoded after the bit user and sees no
        // bit interference, so the constraint set is linear in the powers and
        // the first linearization is already exact at the optimum.
        let scn = scenario(3e-8, vec![2e-8]);
        let alloc = sca_noma(&scn, 0.05e6, 0, &opts()).unwrap();
        assert!(alloc.report.converged);
        assert!(
            alloc.report.iterations <= 2,
            "iterations={}",
            alloc.report.iterations
        );
    }

    #[test]
    fn single_user_matches_power_grid_oracle() {
        // 201 x 201 grid over (p_s, p_b) for each q; compare the best.
        let scn = scenario(3.7e-8, vec![1.8e-8]);
        let target = 0.05e6;
        let alloc = noma_boundary_point(&scn, target, &opts()).unwrap();

        let gamma = scn.gamma_floor_linear(target).unwrap();
        let mut oracle = f64::NEG_INFINITY;
        for q in 0..=1usize {
            for i in 0..=200 {
                for j in 0..=200 {
                    let p_s = 0.1 * i as f64 / 200.0;
                    let p_b = 0.1 * j as f64 / 200.0;
                    if noma_sinr_sem(&scn, &[p_s], p_b, q, 0) >= gamma {
                        let rate =
                            1e6 * (1.0 + noma_sinr_bit(&scn, &[p_s], p_b, q)).log2();
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
    fn boundary_point_beats_each_fixed_q() {
        let scn = scenario(3.7e-8, vec![1.8e-8]);
        let target = 0.04e6;
        let best = noma_boundary_point(&scn, target, &opts()).unwrap();
        for q in 0..=1 {
            if let Ok(alloc) = sca_noma(&scn, target, q, &opts()) {
                assert!(best.bit_rate >= alloc.bit_rate * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn two_user_coarse_grid_including_q() {
        let scn = scenario(3e-8, vec![2.5e-8, 1.2e-8]);
        let target = 0.03e6;
        let alloc = noma_boundary_point(&scn, target, &opts()).unwrap();
        let gamma = scn.gamma_floor_linear(target).unwrap();
        let mut oracle = f64::NEG_INFINITY;
        let steps = 60;
        for q in 0..=2usize {
            for a in 0..=steps {
                for b in 0..=steps {
                    for c in 0..=steps {
                        let p = [0.1 * a as f64 / steps as f64, 0.1 * b as f64 / steps as f64];
                        let p_b = 0.1 * c as f64 / steps as f64;
                        let ok = (0..2)
                            .all(|j| noma_sinr_sem(&scn, &p, p_b, q, j) >= gamma);
                        if ok {
                            let rate =
                                1e6 * (1.0 + noma_sinr_bit(&scn, &p, p_b, q)).log2();
                            oracle = oracle.max(rate);
                        }
                    }
                }
            }
        }
        // The coarse grid underestimates the optimum; SCA must not fall
        // below it by more than grid resolution effects.
        assert!(
            alloc.bit_rate >= oracle * (1.0 - 2e-3),
            "sca {} vs coarse grid {oracle}",
            alloc.bit_rate
        );
    }

    #[test]
    fn trace_is_monotone_and_allocation_feasible() {
        let scn = scenario(3.7e-8, vec![2.5e-8, 1.2e-8]);
        for target in [0.01e6, 0.05e6, 0.09e6] {
            let Ok(alloc) = noma_boundary_point(&scn, target, &opts()) else {
                continue;
            };
            assert!(alloc.report.converged);
            for pair in alloc.report.objective_trace.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-12);
            }
            let gamma = scn.gamma_floor_linear(target).unwrap();
            for j in 0..2 {
                let sinr = noma_sinr_sem(&scn, &alloc.p_sem, alloc.p_bit, alloc.q, j);
                assert!(sinr >= gamma * (1.0 - 1e-8), "user {j}: {sinr} < {gamma}");
            }
            // Reported rate equals the exact recomputation.
            let exact =
                1e6 * (1.0 + noma_sinr_bit(&scn, &alloc.p_sem, alloc.p_bit, alloc.q)).log2();
            assert!((alloc.bit_rate - exact).abs() <= 1e-9 * exact);
        }
    }

    #[test]
    fn matches_exact_one_dimensional_oracle() {
        // For fixed q the optimum is closed-form: minimal bottom-up semantic
        // powers at the largest bit power whose induced thresholds stay
        // within the power budget. Interference to the bit user does not
        // depend on p_bit, so the best p_bit is the largest feasible one.
        let scn = scenario(3.7e-8, vec![2.8e-8, 1.4e-8, 0.9e-8]);
        let target = 0.06e6;
        let gamma = scn.gamma_floor_linear(target).unwrap();
        let n = scn.n_sem();
        let mut oracle = f64::NEG_INFINITY;
        for q in 0..=n {
            // Bisection on p_bit: powers are increasing in p_bit.
            let feasible = |p_bit: f64| -> Option<f64> {
                let p = initial_semantic_powers(&scn, gamma, q, p_bit, 1.0);
                let ok = (0..n).all(|j| {
                    noma_sinr_sem(&scn, &p, p_bit, q, j) >= gamma * (1.0 - 1e-12)
                });
                ok.then(|| {
                    scn.bandwidth_hz * (1.0 + noma_sinr_bit(&scn, &p, p_bit, q)).log2()
                })
            };
            if feasible(0.0).is_none() {
                continue;
            }
            let (mut lo, mut hi) = (0.0f64, scn.p_max_watt);
            if feasible(hi).is_some() {
                lo = hi;
            } else {
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if feasible(mid).is_some() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            if let Some(rate) = feasible(lo) {
                oracle = oracle.max(rate);
            }
        }
        let alloc = noma_boundary_point(&scn, target, &opts()).unwrap();
        assert!(
            (alloc.bit_rate - oracle).abs() <= 1e-3 * oracle,
            "sca {} vs exact oracle {oracle}",
            alloc.bit_rate
        );
    }
}

