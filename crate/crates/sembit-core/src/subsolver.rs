//! Solver for the SCA convex subproblems: maximize a weighted sum of
//! `log2(1 + x_i)` terms over a polyhedron with box bounds.
//!
//! The realization is a log-barrier interior-point method with a phase-I
//! feasibility stage (minimize the maximum scaled constraint violation).
//! Problems are normalized internally: variables are mapped affinely onto
//! `[0, 1]` and constraint rows are scaled to unit infinity norm, so callers
//! may pass rows in raw physical units (powers in watts, gains around 1e-8)
//! without preconditioning.
//!
//! Fixed numerical recipe, for reproducibility:
//! - barrier parameter starts at 1 and grows by a factor of 20 per stage;
//! - Newton steps use backtracking line search (factor 0.5, Armijo 0.01)
//!   capped at 0.99 of the distance to the barrier boundary;
//! - a stage ends when the Newton decrement squared falls below 2e-11;
//! - phase II starts from the phase-I point, or from the supplied hint /
//!   box center (the box analytic center) shrunk 1% inward when it is
//!   already strictly feasible;
//! - when the objective has exactly one log term the stage objective is the
//!   plain linear `max x_i` (the problem is an LP in disguise), and the
//!   logarithm is applied only when reporting.
//!
//! Epigraph variables for the rate terms are eliminated before reaching this
//! module: `log2` is concave and increasing, so maximizing the sum directly
//! is equivalent and lower-dimensional.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubsolverError {
    #[error("invalid subproblem: {0}")]
    InvalidProblem(String),
}

/// Maximize `sum w_i * log2(1 + x_i)` subject to `a . x <= b` rows and
/// per-variable bounds.
#[derive(Debug, Clone)]
pub struct ConvexSubproblem {
    pub n_vars: usize,
    /// `(variable index, positive weight)` pairs.
    pub log_terms: Vec<(usize, f64)>,
    /// Rows `(coefficients, rhs)` meaning `a . x <= b`.
    pub linear_constraints: Vec<(Vec<f64>, f64)>,
    /// Inclusive `[lo, hi]` per variable; finite, `lo <= hi`.
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubStatus {
    Optimal,
    Infeasible,
    IterLimit,
}

#[derive(Debug, Clone)]
pub struct SubSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: SubStatus,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    /// Relative objective tolerance of the barrier loop.
    pub rel_obj_tol: f64,
    /// Scaled violation above which phase I declares infeasibility.
    pub feas_tol: f64,
    /// Cap on barrier stages before giving up with `IterLimit`.
    pub max_barrier_steps: usize,
    /// Cap on Newton iterations within one stage.
    pub max_newton_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rel_obj_tol: 1e-8,
            feas_tol: 1e-9,
            max_barrier_steps: 500,
            max_newton_steps: 60,
        }
    }
}

const BARRIER_GROWTH: f64 = 20.0;
const NEWTON_DECREMENT_TOL: f64 = 2e-11;

impl ConvexSubproblem {
    pub fn validate(&self) -> Result<(), SubsolverError> {
        if self.bounds.len() != self.n_vars {
            return Err(SubsolverError::InvalidProblem(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                self.n_vars
            )));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(SubsolverError::InvalidProblem(format!(
                    "bad bounds [{lo}, {hi}] for variable {i}"
                )));
            }
        }
        for &(idx, w) in &self.log_terms {
            if idx >= self.n_vars {
                return Err(SubsolverError::InvalidProblem(format!(
                    "log term index {idx} out of range"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(SubsolverError::InvalidProblem(format!(
                    "log term weight must be positive and finite, got {w}"
                )));
            }
            if self.bounds[idx].0 < 0.0 {
                return Err(SubsolverError::InvalidProblem(format!(
                    "log-term variable {idx} must have a nonnegative lower bound"
                )));
            }
        }
        for (r, (coeffs, rhs)) in self.linear_constraints.iter().enumerate() {
            if coeffs.len() != self.n_vars {
                return Err(SubsolverError::InvalidProblem(format!(
                    "row {r} has {} coefficients for {} variables",
                    coeffs.len(),
                    self.n_vars
                )));
            }
            if coeffs.iter().any(|c| !c.is_finite()) || !rhs.is_finite() {
                return Err(SubsolverError::InvalidProblem(format!(
                    "row {r} contains non-finite entries"
                )));
            }
        }
        Ok(())
    }

    /// Structured text dump for offline inspection of a subproblem.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n_vars = {}\n", self.n_vars));
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            out.push_str(&format!("bound x{i} in [{lo:e}, {hi:e}]\n"));
        }
        for &(idx, w) in &self.log_terms {
            out.push_str(&format!("objective += {w:e} * log2(1 + x{idx})\n"));
        }
        for (coeffs, rhs) in &self.linear_constraints {
            let lhs: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, c)| format!("{c:e}*x{i}"))
                .collect();
            out.push_str(&format!("row: {} <= {rhs:e}\n", lhs.join(" + ")));
        }
        out
    }
}

/// Maximum scaled constraint/bound violation of `x` (0 when feasible).
///
/// Rows are scaled by `max(||a||_inf, |b|)`, bounds by `max(|lo|, |hi|)`,
/// each floored at 1 when degenerate.
pub fn check_feasible(sp: &ConvexSubproblem, x: &[f64]) -> f64 {
    assert_eq!(x.len(), sp.n_vars, "point has wrong dimension");
    let mut worst = 0.0f64;
    for (coeffs, rhs) in &sp.linear_constraints {
        let lhs: f64 = coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        let raw = coeffs.iter().fold(rhs.abs(), |m, c| m.max(c.abs()));
        let scale = if raw <= 1e-300 { 1.0 } else { raw };
        worst = worst.max((lhs - rhs) / scale);
    }
    for (i, &(lo, hi)) in sp.bounds.iter().enumerate() {
        let scale = lo.abs().max(hi.abs());
        let scale = if scale == 0.0 { 1.0 } else { scale };
        worst = worst.max((lo - x[i]) / scale);
        worst = worst.max((x[i] - hi) / scale);
    }
    worst
}

/// Solves the subproblem starting from the box center.
pub fn solve(sp: &ConvexSubproblem, settings: &SolverSettings) -> Result<SubSolution, SubsolverError> {
    solve_from(sp, settings, None)
}

/// Solves the subproblem with an optional initial-point hint (in original
/// variable units). The hint only seeds the search; it need not be feasible.
pub fn solve_from(
    sp: &ConvexSubproblem,
    settings: &SolverSettings,
    hint: Option<&[f64]>,
) -> Result<SubSolution, SubsolverError> {
    sp.validate()?;
    let norm = Normalized::build(sp)?;

    if norm.free.is_empty() {
        // Everything is pinned by degenerate bounds.
        let x = norm.reconstruct(&DVector::zeros(0));
        let viol = check_feasible(sp, &x);
        let status = if viol <= 1e-8 {
            SubStatus::Optimal
        } else {
            SubStatus::Infeasible
        };
        return Ok(SubSolution {
            objective: norm.true_objective(&x),
            x,
            status,
            kkt_residual: 0.0,
        });
    }

    let u_hint = hint.map(|h| norm.to_unit(h));
    let start = match norm.feasible_start(settings, u_hint.as_ref()) {
        FeasibleStart::Point(u) => u,
        FeasibleStart::Infeasible => {
            let u = u_hint.unwrap_or_else(|| DVector::from_element(norm.free.len(), 0.5));
            let x = norm.reconstruct(&u);
            return Ok(SubSolution {
                objective: norm.true_objective(&x),
                x,
                status: SubStatus::Infeasible,
                kkt_residual: f64::INFINITY,
            });
        }
    };

    norm.barrier_minimize(sp, settings, start)
}

enum FeasibleStart {
    Point(DVector<f64>),
    Infeasible,
}

/// Objective in normalized coordinates.
enum Objective {
    /// No log terms over free variables: constant objective.
    Constant,
    /// Single log term: maximize the variable itself (LP fast path).
    Linear { col: usize },
    /// General case: `-sum w ln(1 + x(u)) / ln 2`, weights normalized.
    LogSum { terms: Vec<(usize, f64)> },
}

struct Normalized<'a> {
    sp: &'a ConvexSubproblem,
    /// Indices of non-fixed variables, in original order.
    free: Vec<usize>,
    lo: Vec<f64>,
    span: Vec<f64>,
    /// Normalized rows `c . u <= d` with unit infinity norm.
    rows: Vec<(DVector<f64>, f64)>,
    objective: Objective,
}

impl<'a> Normalized<'a> {
    fn build(sp: &'a ConvexSubproblem) -> Result<Self, SubsolverError> {
        let mut free = Vec::new();
        let mut col_of = vec![usize::MAX; sp.n_vars];
        let mut lo = Vec::new();
        let mut span = Vec::new();
        for (i, &(l, h)) in sp.bounds.iter().enumerate() {
            if h > l {
                col_of[i] = free.len();
                free.push(i);
                lo.push(l);
                span.push(h - l);
            }
        }

        let mut rows = Vec::new();
        for (coeffs, rhs) in &sp.linear_constraints {
            let mut c = DVector::zeros(free.len());
            let mut d = *rhs;
            for (i, &a) in coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let (l, h) = sp.bounds[i];
                if h > l {
                    c[col_of[i]] = a * (h - l);
                    d -= a * l;
                } else {
                    d -= a * l;
                }
            }
            let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale <= 1e-300 {
                if d < -1e-9 * rhs.abs().max(1.0) {
                    // Constant row violated regardless of the variables.
                    rows.push((DVector::zeros(free.len()), -1.0));
                }
                continue;
            }
            rows.push((c / scale, d / scale));
        }

        let mut terms = Vec::new();
        let mut weight_scale = 0.0f64;
        for &(idx, w) in &sp.log_terms {
            if col_of[idx] != usize::MAX {
                weight_scale = weight_scale.max(w);
                terms.push((col_of[idx], w));
            }
        }
        let objective = match terms.len() {
            0 => Objective::Constant,
            1 => Objective::Linear { col: terms[0].0 },
            _ => {
                let ws = weight_scale;
                Objective::LogSum {
                    terms: terms.into_iter().map(|(c, w)| (c, w / ws)).collect(),
                }
            }
        };

        Ok(Self {
            sp,
            free,
            lo,
            span,
            rows,
            objective,
        })
    }

    fn to_unit(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.free.len(),
            self.free.iter().enumerate().map(|(c, &i)| {
                ((x[i] - self.lo[c]) / self.span[c]).clamp(0.01, 0.99)
            }),
        )
    }

    fn reconstruct(&self, u: &DVector<f64>) -> Vec<f64> {
        let mut x: Vec<f64> = self.sp.bounds.iter().map(|&(l, _)| l).collect();
        for (c, &i) in self.free.iter().enumerate() {
            x[i] = self.lo[c] + self.span[c] * u[c];
        }
        x
    }

    fn true_objective(&self, x: &[f64]) -> f64 {
        self.sp
            .log_terms
            .iter()
            .map(|&(i, w)| w * (1.0 + x[i]).log2())
            .sum()
    }

    fn max_violation(&self, u: &DVector<f64>) -> f64 {
        self.rows
            .iter()
            .map(|(c, d)| c.dot(u) - d)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(f64::NEG_INFINITY)
    }

    /// Objective value, gradient and Hessian contribution (normalized units).
    fn objective_terms(&self, u: &DVector<f64>, grad: &mut DVector<f64>, hess: &mut DMatrix<f64>, t: f64) -> f64 {
        match &self.objective {
            Objective::Constant => 0.0,
            Objective::Linear { col } => {
                grad[*col] -= t;
                -u[*col]
            }
            Objective::LogSum { terms } => {
                let ln2 = std::f64::consts::LN_2;
                let mut value = 0.0;
                for &(c, w) in terms {
                    let x = self.lo[c] + self.span[c] * u[c];
                    value -= w * (1.0 + x).ln() / ln2;
                    grad[c] -= t * w * self.span[c] / (ln2 * (1.0 + x));
                    hess[(c, c)] += t * w * self.span[c] * self.span[c] / (ln2 * (1.0 + x) * (1.0 + x));
                }
                value
            }
        }
    }

    fn objective_value(&self, u: &DVector<f64>) -> f64 {
        match &self.objective {
            Objective::Constant => 0.0,
            Objective::Linear { col } => -u[*col],
            Objective::LogSum { terms } => {
                let ln2 = std::f64::consts::LN_2;
                terms
                    .iter()
                    .map(|&(c, w)| {
                        let x = self.lo[c] + self.span[c] * u[c];
                        -w * (1.0 + x).ln() / ln2
                    })
                    .sum()
            }
        }
    }

    /// Finds a strictly feasible point, running phase I when the hint or box
    /// center is not already comfortably interior.
    fn feasible_start(&self, settings: &SolverSettings, hint: Option<&DVector<f64>>) -> FeasibleStart {
        let n = self.free.len();
        let center = DVector::from_element(n, 0.5);
        let candidates: Vec<DVector<f64>> = match hint {
            Some(h) => vec![h.clone(), center.clone()],
            None => vec![center.clone()],
        };
        for cand in &candidates {
            if self.max_violation(cand) <= -1e-7 {
                return FeasibleStart::Point(cand.clone());
            }
        }

        // Phase I over (u, s): minimize s subject to rows relaxed by s.
        let mut u = candidates[0].clone();
        // Keep the start strictly inside the box.
        for v in u.iter_mut() {
            *v = v.clamp(0.01, 0.99);
        }
        let mut s = self.max_violation(&u).max(0.0) + 0.5;
        let m = (self.rows.len() + 2 * n) as f64;
        let mut t = 1.0;
        for _ in 0..settings.max_barrier_steps {
            // Newton iterations on phi = t*s - sum ln(slack) - box barrier.
            for _ in 0..settings.max_newton_steps {
                let dim = n + 1;
                let mut grad = DVector::zeros(dim);
                let mut hess = DMatrix::zeros(dim, dim);
                grad[n] = t;
                for (c, d) in &self.rows {
                    let slack = s + d - c.dot(&u);
                    let inv = 1.0 / slack;
                    for i in 0..n {
                        grad[i] += c[i] * inv;
                        for j in 0..n {
                            hess[(i, j)] += c[i] * c[j] * inv * inv;
                        }
                        hess[(i, n)] -= c[i] * inv * inv;
                        hess[(n, i)] -= c[i] * inv * inv;
                    }
                    grad[n] -= inv;
                    hess[(n, n)] += inv * inv;
                }
                for i in 0..n {
                    grad[i] += -1.0 / u[i] + 1.0 / (1.0 - u[i]);
                    hess[(i, i)] += 1.0 / (u[i] * u[i]) + 1.0 / ((1.0 - u[i]) * (1.0 - u[i]));
                }
                let Some(step) = newton_direction(&hess, &grad) else { break };
                let decrement_sq = -grad.dot(&step);
                if decrement_sq <= NEWTON_DECREMENT_TOL {
                    break;
                }
                let du = step.rows(0, n).into_owned();
                let ds = step[n];
                let mut alpha: f64 = 1.0;
                for (c, d) in &self.rows {
                    let slack = s + d - c.dot(&u);
                    let delta = c.dot(&du) - ds;
                    if delta > 0.0 {
                        alpha = alpha.min(slack / delta);
                    }
                }
                for i in 0..n {
                    if du[i] > 0.0 {
                        alpha = alpha.min((1.0 - u[i]) / du[i]);
                    } else if du[i] < 0.0 {
                        alpha = alpha.min(u[i] / -du[i]);
                    }
                }
                alpha = (0.99 * alpha).min(1.0);
                let phi = |uu: &DVector<f64>, ss: f64| -> f64 {
                    let mut val = t * ss;
                    for (c, d) in &self.rows {
                        let slack = ss + d - c.dot(uu);
                        if slack <= 0.0 {
                            return f64::INFINITY;
                        }
                        val -= slack.ln();
                    }
                    for i in 0..n {
                        if uu[i] <= 0.0 || uu[i] >= 1.0 {
                            return f64::INFINITY;
                        }
                        val -= uu[i].ln() + (1.0 - uu[i]).ln();
                    }
                    val
                };
                let phi0 = phi(&u, s);
                let slope = grad.dot(&step);
                let mut accepted = false;
                for _ in 0..50 {
                    let u_new = &u + alpha * &du;
                    let s_new = s + alpha * ds;
                    if phi(&u_new, s_new) <= phi0 + 0.01 * alpha * slope {
                        u = u_new;
                        s = s_new;
                        accepted = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            if self.max_violation(&u) <= -0.02 {
                break;
            }
            if m / t <= 1e-10 {
                break;
            }
            t *= BARRIER_GROWTH;
        }

        let violation = self.max_violation(&u);
        if violation > settings.feas_tol {
            return FeasibleStart::Infeasible;
        }
        FeasibleStart::Point(u)
    }

    /// Phase II: barrier minimization of the (negated) objective from a
    /// near-feasible point. Rows the start touches are relaxed just enough to
    /// make it strictly interior; the relaxation stays below the feasibility
    /// reporting tolerance.
    fn barrier_minimize(
        &self,
        sp: &ConvexSubproblem,
        settings: &SolverSettings,
        mut u: DVector<f64>,
    ) -> Result<SubSolution, SubsolverError> {
        let n = self.free.len();
        let mut rows = self.rows.clone();
        for (c, d) in rows.iter_mut() {
            let slack = *d - c.dot(&u);
            if slack <= 1e-12 {
                *d += (-slack).max(0.0) + 2e-12;
            }
        }
        for v in u.iter_mut() {
            *v = v.clamp(1e-9, 1.0 - 1e-9);
        }

        let m = (rows.len() + 2 * n) as f64;
        let mut t = 1.0;
        let mut stages = 0usize;
        loop {
            stages += 1;
            if stages > settings.max_barrier_steps {
                let x = self.reconstruct(&u);
                return Ok(SubSolution {
                    objective: self.true_objective(&x),
                    x,
                    status: SubStatus::IterLimit,
                    kkt_residual: f64::INFINITY,
                });
            }
            for _ in 0..settings.max_newton_steps {
                let mut grad = DVector::zeros(n);
                let mut hess = DMatrix::zeros(n, n);
                self.objective_terms(&u, &mut grad, &mut hess, t);
                for (c, d) in &rows {
                    let slack = *d - c.dot(&u);
                    let inv = 1.0 / slack;
                    for i in 0..n {
                        if c[i] == 0.0 {
                            continue;
                        }
                        grad[i] += c[i] * inv;
                        for j in 0..n {
                            if c[j] != 0.0 {
                                hess[(i, j)] += c[i] * c[j] * inv * inv;
                            }
                        }
                    }
                }
                for i in 0..n {
                    grad[i] += -1.0 / u[i] + 1.0 / (1.0 - u[i]);
                    hess[(i, i)] += 1.0 / (u[i] * u[i]) + 1.0 / ((1.0 - u[i]) * (1.0 - u[i]));
                }
                let Some(step) = newton_direction(&hess, &grad) else { break };
                let decrement_sq = -grad.dot(&step);
                if decrement_sq <= NEWTON_DECREMENT_TOL {
                    break;
                }
                let mut alpha: f64 = 1.0;
                for (c, d) in &rows {
                    let slack = *d - c.dot(&u);
                    let delta = c.dot(&step);
                    if delta > 0.0 {
                        alpha = alpha.min(slack / delta);
                    }
                }
                for i in 0..n {
                    if step[i] > 0.0 {
                        alpha = alpha.min((1.0 - u[i]) / step[i]);
                    } else if step[i] < 0.0 {
                        alpha = alpha.min(u[i] / -step[i]);
                    }
                }
                alpha = (0.99 * alpha).min(1.0);
                if decrement_sq <= 1e-9 {
                    // Quadratic-convergence region: the Armijo test drowns in
                    // rounding at large t, so take the capped step directly.
                    u += alpha * &step;
                    continue;
                }
                let phi = |uu: &DVector<f64>| -> f64 {
                    let mut val = t * self.objective_value(uu);
                    for (c, d) in &rows {
                        let slack = *d - c.dot(uu);
                        if slack <= 0.0 {
                            return f64::INFINITY;
                        }
                        val -= slack.ln();
                    }
                    for i in 0..n {
                        if uu[i] <= 0.0 || uu[i] >= 1.0 {
                            return f64::INFINITY;
                        }
                        val -= uu[i].ln() + (1.0 - uu[i]).ln();
                    }
                    val
                };
                let phi0 = phi(&u);
                let slope = grad.dot(&step);
                let mut accepted = false;
                for _ in 0..50 {
                    let u_new = &u + alpha * &step;
                    if phi(&u_new) <= phi0 + 0.01 * alpha * slope {
                        u = u_new;
                        accepted = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            let f = self.objective_value(&u);
            if m / t <= settings.rel_obj_tol * (1.0 + f.abs()) {
                break;
            }
            t *= BARRIER_GROWTH;
        }

        let x = self.reconstruct(&u);
        let violation = check_feasible(sp, &x);
        let kkt = self.kkt_residual(&rows, &u, t);
        let status = if violation <= 1e-8 && kkt <= 1e-6 {
            SubStatus::Optimal
        } else {
            SubStatus::IterLimit
        };
        Ok(SubSolution {
            objective: self.true_objective(&x),
            x,
            status,
            kkt_residual: kkt,
        })
    }

    /// KKT residual certificate at the final barrier point: multipliers for
    /// the near-active constraints are fitted by least squares (the raw
    /// barrier multipliers lose too many digits at large `t`), and the
    /// reported value folds in their complementarity slack and the barrier
    /// duality-gap bound `m/t`.
    fn kkt_residual(&self, rows: &[(DVector<f64>, f64)], u: &DVector<f64>, t: f64) -> f64 {
        let n = self.free.len();
        let mut grad_f = DVector::zeros(n);
        let mut scratch = DMatrix::zeros(n, n);
        self.objective_terms(u, &mut grad_f, &mut scratch, 1.0);
        let scale = grad_f.amax().max(1.0);

        // Columns of the active-constraint gradient matrix plus each
        // column's slack (for the complementarity term).
        let mut columns: Vec<(DVector<f64>, f64)> = Vec::new();
        for (c, d) in rows {
            let slack = *d - c.dot(u);
            if slack <= 1e-4 {
                columns.push((c.clone(), slack));
            }
        }
        for i in 0..n {
            if u[i] <= 1e-4 {
                let mut e = DVector::zeros(n);
                e[i] = -1.0;
                columns.push((e, u[i]));
            }
            if 1.0 - u[i] <= 1e-4 {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                columns.push((e, 1.0 - u[i]));
            }
        }

        let f = self.objective_value(u);
        let gap_term = (rows.len() + 2 * n) as f64 / (t * (1.0 + f.abs()));
        if columns.is_empty() {
            return (grad_f.amax() / scale).max(gap_term);
        }

        let cols: Vec<DVector<f64>> = columns.iter().map(|(c, _)| c.clone()).collect();
        let lambda = nonnegative_least_squares(&cols, &(-&grad_f));

        let mut residual = grad_f.clone();
        let mut complementarity = 0.0f64;
        for (i, (col, slack)) in columns.iter().enumerate() {
            residual += lambda[i] * col;
            complementarity = complementarity.max(lambda[i] * slack.max(0.0));
        }
        (residual.amax() / scale)
            .max(complementarity / (1.0 + f.abs()))
            .max(gap_term)
    }
}

/// Lawson-Hanson nonnegative least squares: minimizes `||A x - b||` over
/// `x >= 0`, with `A` given by columns. Problem sizes here are tiny.
fn nonnegative_least_squares(cols: &[DVector<f64>], b: &DVector<f64>) -> Vec<f64> {
    let k = cols.len();
    let mut x = vec![0.0f64; k];
    let mut passive: Vec<usize> = Vec::new();
    let mut residual = b.clone();
    let solve_passive = |passive: &[usize]| -> Option<Vec<f64>> {
        let p = passive.len();
        let mut ata = DMatrix::zeros(p, p);
        let mut atb = DVector::zeros(p);
        for (i, &ci) in passive.iter().enumerate() {
            atb[i] = cols[ci].dot(b);
            for (j, &cj) in passive.iter().enumerate() {
                ata[(i, j)] = cols[ci].dot(&cols[cj]);
            }
        }
        for i in 0..p {
            ata[(i, i)] += 1e-14 * ata[(i, i)].max(1.0);
        }
        ata.lu().solve(&atb).map(|z| z.iter().copied().collect())
    };

    for _ in 0..3 * k.max(1) {
        // Most negative gradient of the residual among free columns.
        let mut best = (0usize, 0.0f64);
        for i in 0..k {
            if passive.contains(&i) {
                continue;
            }
            let w = cols[i].dot(&residual);
            if w > best.1 {
                best = (i, w);
            }
        }
        if best.1 <= 1e-12 * b.amax().max(1.0) {
            break;
        }
        passive.push(best.0);

        loop {
            let Some(z) = solve_passive(&passive) else {
                passive.pop();
                break;
            };
            if z.iter().all(|&v| v > 0.0) {
                for (i, &ci) in passive.iter().enumerate() {
                    x[ci] = z[i];
                }
                break;
            }
            // Step toward z only as far as nonnegativity allows, then drop
            // the variables that hit zero.
            let mut alpha = f64::INFINITY;
            for (i, &ci) in passive.iter().enumerate() {
                if z[i] <= 0.0 {
                    let denom = x[ci] - z[i];
                    if denom > 0.0 {
                        alpha = alpha.min(x[ci] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            if !alpha.is_finite() {
                break;
            }
            for (i, &ci) in passive.iter().enumerate() {
                x[ci] += alpha * (z[i] - x[ci]);
            }
            passive.retain(|&ci| x[ci] > 0.0);
            if passive.is_empty() {
                break;
            }
        }

        residual = b.clone();
        for (i, xi) in x.iter().enumerate() {
            if *xi > 0.0 {
                residual -= *xi * &cols[i];
            }
        }
    }
    x
}

fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let mut h = hess.clone();
    let n = h.nrows();
    let mut ridge = 0.0;
    for _ in 0..6 {
        if ridge > 0.0 {
            for i in 0..n {
                h[(i, i)] = hess[(i, i)] + ridge;
            }
        }
        if let Some(chol) = h.clone().cholesky() {
            return Some(chol.solve(&(-grad)));
        }
        let max_diag = (0..n).fold(1e-12f64, |m, i| m.max(hess[(i, i)].abs()));
        ridge = if ridge == 0.0 { 1e-10 * max_diag } else { ridge * 100.0 };
    }
    None
}
