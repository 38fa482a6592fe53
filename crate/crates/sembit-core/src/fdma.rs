//! FDMA rate-region boundary points.
//!
//! In FDMA the problem of maximizing the bit rate at a fixed semantic rate
//! reduces to minimizing the total bandwidth handed to the semantic users:
//! each user transmits at full power (lowering power only inflates the
//! bandwidth it needs) and receives the unique bandwidth `w*` at which its
//! semantic rate meets the target exactly. Whatever band remains goes to the
//! bit user at full power.
//!
//! `w*` is found by bisection on `f(w) = (w/k) * i_per_l * sim(snr(w))`,
//! which is increasing on the admissible bracket `(0, w_h]`, where
//! `w_h = P g / (gamma_sem_lin N0)` is the widest band that still meets the
//! similarity floor at full power.

use crate::scenario::Scenario;
use crate::semantic::SemanticError;
use crate::units::{db_to_linear, linear_to_db};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdmaError {
    /// The similarity constraint cannot be met at the target rate even at
    /// full power over the widest admissible band.
    #[error("infeasible user: target {target} suts/s above full-power maximum {max}")]
    InfeasibleUser { target: f64, max: f64 },
    /// The semantic users alone need more than the available band.
    #[error("infeasible point: semantic users need {needed} Hz of {available} Hz")]
    InfeasiblePoint { needed: f64, available: f64 },
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Per-scheme decision variables of one FDMA boundary point.
#[derive(Debug, Clone, Serialize)]
pub struct FdmaAllocation {
    /// Bandwidth per semantic user (Hz), in sorted-gain order.
    pub w_sem: Vec<f64>,
    /// Bandwidth of the bit user (Hz).
    pub w_bit: f64,
    /// Transmit power per semantic user (W); full power at the optimum.
    pub p_sem: Vec<f64>,
    /// Transmit power of the bit user (W).
    pub p_bit: f64,
    /// Achieved bit rate (bit/s).
    pub bit_rate: f64,
}

/// Relative residual tolerance of the bandwidth bisection.
const ROOT_REL_TOL: f64 = 1e-9;

/// Semantic rate (suts/s) of one user over band `w` at power `p`.
fn semantic_rate_at(scn: &Scenario, gain: f64, p: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let snr_db = linear_to_db(p * gain / scn.noise_power(w));
    crate::semantic::semantic_rate(&scn.cfg, &scn.params, w, snr_db)
}

/// Minimal bandwidth at which a full-power semantic user with the given gain
/// reaches `target_rate`.
pub fn min_bandwidth_user(scn: &Scenario, gain: f64, target_rate: f64) -> Result<f64, FdmaError> {
    assert!(target_rate > 0.0, "use the S=0 special case for silent users");
    let gamma_sem_db = scn.params.gamma_sem(scn.cfg.s_th)?;
    let gamma_sem_lin = db_to_linear(gamma_sem_db);
    let n0 = scn.noise_power(1.0);
    let p = scn.p_max_watt;

    // Widest band that still satisfies the similarity floor at full power.
    let w_h = p * gain / (gamma_sem_lin * n0);
    let f_high = semantic_rate_at(scn, gain, p, w_h);
    if f_high < target_rate {
        return Err(FdmaError::InfeasibleUser {
            target: target_rate,
            max: f_high,
        });
    }

    // f is increasing on (0, w_h]; the lower bracket avoids the 0/0 SNR
    // singularity at w -> 0 where f extends continuously to 0.
    let mut lo = w_h * 1e-9;
    let mut hi = w_h;
    if semantic_rate_at(scn, gain, p, lo) >= target_rate {
        lo = w_h * 1e-18;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let f_mid = semantic_rate_at(scn, gain, p, mid);
        if (f_mid - target_rate).abs() <= ROOT_REL_TOL * target_rate {
            return Ok(mid);
        }
        if f_mid < target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundary point of the FDMA rate region at the given target semantic rate.
pub fn fdma_boundary_point(scn: &Scenario, target_rate: f64) -> Result<FdmaAllocation, FdmaError> {
    assert!(target_rate >= 0.0);
    let p = scn.p_max_watt;
    let n = scn.n_sem();

    let w_sem: Vec<f64> = if target_rate == 0.0 {
        // Silent semantic users: the bit user takes the whole band.
        vec![0.0; n]
    } else {
        scn.gains_sem
            .iter()
            .map(|&g| min_bandwidth_user(scn, g, target_rate))
            .collect::<Result<_, _>>()?
    };

    let total: f64 = w_sem.iter().sum();
    if total > scn.bandwidth_hz * (1.0 + 1e-9) {
        return Err(FdmaError::InfeasiblePoint {
            needed: total,
            available: scn.bandwidth_hz,
        });
    }
    let w_bit = (scn.bandwidth_hz - total).max(0.0);
    let bit_rate = if w_bit > 0.0 {
        w_bit * (1.0 + p * scn.gain_bit / scn.noise_power(w_bit)).log2()
    } else {
        0.0
    };
    Ok(FdmaAllocation {
        w_sem,
        w_bit,
        p_sem: vec![p; n],
        p_bit: p,
        bit_rate,
    })
}
