//! Shared scaffolding for the successive-convex-approximation loops.

use crate::subsolver::SolverSettings;
use serde::Serialize;

/// Deterministic multi-start scalings applied to the initial semantic powers.
pub const MULTISTART_SCALES: [f64; 3] = [1.0, 1.5, 2.0];

/// Options shared by the NOMA and RSMA solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Absolute convergence tolerance on the objective, in bit/s.
    pub tau_bps: f64,
    /// Cap on SCA iterations per start.
    pub max_sca_iterations: usize,
    /// Number of multi-start scales used (prefix of [`MULTISTART_SCALES`]).
    pub multi_start: usize,
    /// Settings of the inner convex subproblem solver.
    pub subsolver: SolverSettings,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tau_bps: 1.0,
            max_sca_iterations: 200,
            multi_start: MULTISTART_SCALES.len(),
            subsolver: SolverSettings::default(),
        }
    }
}

impl SolverOptions {
    pub fn scales(&self) -> &[f64] {
        let n = self.multi_start.clamp(1, MULTISTART_SCALES.len());
        &MULTISTART_SCALES[..n]
    }
}

/// Iterate trace and convergence diagnostics of one SCA run.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Exact achieved objective after each accepted iterate (bit/s).
    pub objective_trace: Vec<f64>,
    /// Number of subproblem solves performed.
    pub iterations: usize,
    /// Whether the `|t[n] - t[n-1]| < tau` stop fired.
    pub converged: bool,
    /// Tolerance the run used (bit/s).
    pub tau: f64,
}
