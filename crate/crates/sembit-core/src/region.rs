//! Rate-region sweeps, the time-sharing envelope, and the comparative
//! experiments (user-count and similarity-threshold sweeps).
//!
//! A boundary is traced by fixing a target semantic rate and maximizing the
//! bit rate, per scheme, over a sweep grid. Sweep points are independent and
//! evaluated in parallel; results are gathered in grid order, so output is
//! deterministic regardless of thread count.

use crate::fdma::{self, FdmaError};
use crate::noma::{self, NomaError};
use crate::rsma::{self, RsmaError};
use crate::sca::SolverOptions;
use crate::scenario::{PathLossModel, Scenario};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("region sweep error: {0}")]
    Sweep(String),
    #[error(transparent)]
    Fdma(#[from] FdmaError),
    #[error(transparent)]
    Noma(#[from] NomaError),
    #[error(transparent)]
    Rsma(#[from] RsmaError),
}

/// Multiple-access scheme of a boundary or sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Fdma,
    Noma,
    Rsma,
    Timeshare,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Scheme::Fdma => "fdma",
            Scheme::Noma => "noma",
            Scheme::Rsma => "rsma",
            Scheme::Timeshare => "timeshare",
        };
        write!(f, "{name}")
    }
}

/// One achievable (semantic rate, bit rate) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub s_rate: f64,
    pub b_rate: f64,
}

/// Swept boundary of one scheme: feasible points sorted by semantic rate.
#[derive(Debug, Clone, Serialize)]
pub struct RegionBoundary {
    pub scheme: Scheme,
    pub points: Vec<RatePoint>,
    /// Digest of the scenario the sweep ran on.
    pub scenario_digest: String,
    /// The full requested grid, including infeasible entries.
    pub s_grid: Vec<f64>,
}

impl RegionBoundary {
    /// Bit rate at semantic rate `s` by linear interpolation between swept
    /// points; `None` outside the feasible span.
    pub fn b_rate_at(&self, s: f64) -> Option<f64> {
        let pts = &self.points;
        if pts.is_empty() || s < pts[0].s_rate - 1e-9 || s > pts[pts.len() - 1].s_rate + 1e-9 {
            return None;
        }
        let mut prev = pts[0];
        if s <= prev.s_rate {
            return Some(prev.b_rate);
        }
        for &pt in &pts[1..] {
            if s <= pt.s_rate {
                let span = pt.s_rate - prev.s_rate;
                if span <= 0.0 {
                    return Some(pt.b_rate);
                }
                let f = (s - prev.s_rate) / span;
                return Some(prev.b_rate + f * (pt.b_rate - prev.b_rate));
            }
            prev = pt;
        }
        Some(pts[pts.len() - 1].b_rate)
    }

    /// Trapezoidal area under the boundary, a region-size statistic.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[1].s_rate - w[0].s_rate) * (w[0].b_rate + w[1].b_rate))
            .sum()
    }
}

/// One sweep evaluation, feasible or not; source of the region CSV rows.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub s_rate: f64,
    pub feasible: bool,
    pub bit_rate: Option<f64>,
    /// Bit user's decoding position (NOMA only).
    pub q: Option<usize>,
    /// Number of bit streams with non-negligible power (RSMA only).
    pub active_splits: Option<usize>,
    /// SCA iterations (NOMA/RSMA only).
    pub iterations: Option<usize>,
}

/// Boundary plus the per-point rows of one sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub boundary: RegionBoundary,
    pub rows: Vec<SweepRow>,
}

/// Default sweep grid: S = 0, an explicit near-zero point resolving the
/// rate cliff, log-spaced points up to the plateau edge, then linear points
/// across the shelf up to just below the ceiling.
pub fn default_s_grid(scn: &Scenario, n_points: usize) -> Vec<f64> {
    let n_points = n_points.max(8);
    let plateau = scn.plateau_edge();
    let ceiling = scn.rate_ceiling();
    let eps = 1e-4 * plateau;
    let n_log = (n_points - 2) / 2;
    let n_lin = n_points - 2 - n_log;

    let mut grid = Vec::with_capacity(n_points);
    grid.push(0.0);
    grid.push(eps);
    let ratio = (plateau / eps).powf(1.0 / n_log as f64);
    for i in 1..=n_log {
        let s = if i == n_log { plateau } else { eps * ratio.powi(i as i32) };
        grid.push(s);
    }
    let hi = 0.995 * ceiling;
    for i in 1..=n_lin {
        grid.push(plateau + (hi - plateau) * i as f64 / n_lin as f64);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

fn evaluate_point(scn: &Scenario, scheme: Scheme, s: f64, opts: &SolverOptions) -> SweepRow {
    match scheme {
        Scheme::Fdma => match fdma::fdma_boundary_point(scn, s) {
            Ok(alloc) => SweepRow {
                scheme,
                s_rate: s,
                feasible: true,
                bit_rate: Some(alloc.bit_rate),
                q: None,
                active_splits: None,
                iterations: None,
            },
            Err(_) => infeasible_row(scheme, s),
        },
        Scheme::Noma => match noma::noma_boundary_point(scn, s, opts) {
            Ok(alloc) => SweepRow {
                scheme,
                s_rate: s,
                feasible: true,
                bit_rate: Some(alloc.bit_rate),
                q: Some(alloc.q),
                active_splits: None,
                iterations: Some(alloc.report.iterations),
            },
            Err(_) => infeasible_row(scheme, s),
        },
        Scheme::Rsma => match rsma::sca_rsma(scn, s, opts) {
            Ok(alloc) => SweepRow {
                scheme,
                s_rate: s,
                feasible: true,
                bit_rate: Some(alloc.bit_rate),
                q: None,
                active_splits: Some(alloc.active_splits(scn.p_max_watt)),
                iterations: Some(alloc.report.iterations),
            },
            Err(_) => infeasible_row(scheme, s),
        },
        Scheme::Timeshare => unreachable!("timeshare boundaries come from timeshare_hull"),
    }
}

fn infeasible_row(scheme: Scheme, s: f64) -> SweepRow {
    SweepRow {
        scheme,
        s_rate: s,
        feasible: false,
        bit_rate: None,
        q: None,
        active_splits: None,
        iterations: None,
    }
}

/// Sweeps one scheme over the grid. `S = 0` is always included. Infeasible
/// grid points are recorded as such and truncate the boundary.
pub fn sweep_region(
    scn: &Scenario,
    scheme: Scheme,
    s_grid: &[f64],
    opts: &SolverOptions,
) -> Result<SweepOutcome, RegionError> {
    if scheme == Scheme::Timeshare {
        return Err(RegionError::Sweep(
            "timeshare boundaries are derived via timeshare_hull".into(),
        ));
    }
    let mut grid: Vec<f64> = s_grid.to_vec();
    if grid.iter().all(|&s| s != 0.0) {
        grid.push(0.0);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    if grid.iter().any(|&s| s < 0.0) {
        return Err(RegionError::Sweep("negative semantic rate in grid".into()));
    }

    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&s| evaluate_point(scn, scheme, s, opts))
        .collect();

    let points = rows
        .iter()
        .filter(|r| r.feasible)
        .map(|r| RatePoint {
            s_rate: r.s_rate,
            b_rate: r.bit_rate.unwrap(),
        })
        .collect();

    Ok(SweepOutcome {
        boundary: RegionBoundary {
            scheme,
            points,
            scenario_digest: scn.digest(),
            s_grid: grid,
        },
        rows,
    })
}

/// Upper concave envelope of the union of the boundaries' points plus the
/// axis intercepts: what time sharing between operating points achieves.
pub fn timeshare_hull(boundaries: &[RegionBoundary]) -> RegionBoundary {
    assert!(!boundaries.is_empty(), "need at least one boundary");
    let mut pts: Vec<RatePoint> = boundaries
        .iter()
        .flat_map(|b| b.points.iter().copied())
        .collect();
    let max_s = pts.iter().map(|p| p.s_rate).fold(0.0, f64::max);
    let max_b_at_0 = pts
        .iter()
        .filter(|p| p.s_rate == 0.0)
        .map(|p| p.b_rate)
        .fold(0.0, f64::max);
    pts.push(RatePoint { s_rate: 0.0, b_rate: max_b_at_0 });
    pts.push(RatePoint { s_rate: max_s, b_rate: 0.0 });

    pts.sort_by(|a, b| {
        a.s_rate
            .partial_cmp(&b.s_rate)
            .unwrap()
            .then(a.b_rate.partial_cmp(&b.b_rate).unwrap())
    });
    pts.dedup_by(|a, b| a.s_rate == b.s_rate && a.b_rate == b.b_rate);

    // Upper chain of the monotone-chain convex hull; collinear points drop.
    let mut hull: Vec<RatePoint> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.s_rate - a.s_rate) * (p.b_rate - a.b_rate)
                - (b.b_rate - a.b_rate) * (p.s_rate - a.s_rate);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        // Among points sharing an s-coordinate only the highest can be on
        // the upper chain.
        if let Some(last) = hull.last() {
            if last.s_rate == p.s_rate {
                if last.b_rate < p.b_rate {
                    hull.pop();
                } else {
                    continue;
                }
            }
        }
        hull.push(p);
    }

    RegionBoundary {
        scheme: Scheme::Timeshare,
        points: hull,
        scenario_digest: boundaries[0].scenario_digest.clone(),
        s_grid: boundaries[0].s_grid.clone(),
    }
}

/// One cell of the user-count experiment.
#[derive(Debug, Clone, Serialize)]
pub struct UserSweepRow {
    pub scheme: Scheme,
    pub n_sem: usize,
    pub s_rate: f64,
    pub feasible: bool,
    pub bit_rate: Option<f64>,
}

/// Bit rate per scheme per semantic-user count at a fixed semantic rate.
/// Channels are redrawn per count from the shared seed, so gain prefixes
/// agree across counts.
pub fn sweep_users(
    base: &Scenario,
    pl: &PathLossModel,
    n_values: &[usize],
    fixed_s: f64,
    opts: &SolverOptions,
) -> Result<Vec<UserSweepRow>, RegionError> {
    let cells: Vec<(usize, Scheme)> = n_values
        .iter()
        .flat_map(|&n| {
            [Scheme::Fdma, Scheme::Noma, Scheme::Rsma]
                .into_iter()
                .map(move |s| (n, s))
        })
        .collect();
    let rows: Vec<UserSweepRow> = cells
        .par_iter()
        .map(|&(n, scheme)| {
            let scn = Scenario::from_path_loss(
                base.bandwidth_hz,
                base.noise_psd_dbm_hz,
                base.p_max_watt,
                pl,
                n,
                base.cfg,
                base.params,
                base.seed,
            )
            .expect("base scenario validated");
            let row = evaluate_point(&scn, scheme, fixed_s, opts);
            UserSweepRow {
                scheme,
                n_sem: n,
                s_rate: fixed_s,
                feasible: row.feasible,
                bit_rate: row.bit_rate,
            }
        })
        .collect();
    Ok(rows)
}

/// Boundaries and improvement statistics at one similarity threshold.
#[derive(Debug, Clone)]
pub struct ThresholdEntry {
    pub s_th: f64,
    pub boundaries: Vec<RegionBoundary>,
    pub rows: Vec<SweepRow>,
    /// Relative RSMA-over-NOMA region-area improvement.
    pub improvement_area_rel: Option<f64>,
    /// Relative RSMA-over-NOMA bit-rate gap at the mid-plateau rate.
    pub improvement_gap_rel: Option<f64>,
}

/// Sweeps the regions at several similarity thresholds. Both candidate
/// improvement statistics are emitted since neither is canonical.
pub fn sweep_threshold(
    base: &Scenario,
    s_th_values: &[f64],
    n_points: usize,
    opts: &SolverOptions,
) -> Result<Vec<ThresholdEntry>, RegionError> {
    // One shared grid (union of the per-threshold defaults) so regions at
    // different thresholds can be compared pointwise without interpolation.
    let mut grid: Vec<f64> = Vec::new();
    for &s_th in s_th_values {
        let mut scn = base.clone();
        scn.cfg.s_th = s_th;
        scn.cfg
            .validate_against(&scn.params)
            .map_err(|e| RegionError::Sweep(format!("threshold {s_th}: {e}")))?;
        grid.extend(default_s_grid(&scn, n_points));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut entries = Vec::with_capacity(s_th_values.len());
    for &s_th in s_th_values {
        let mut scn = base.clone();
        scn.cfg.s_th = s_th;
        let mut boundaries = Vec::new();
        let mut rows = Vec::new();
        for scheme in [Scheme::Fdma, Scheme::Noma, Scheme::Rsma] {
            let outcome = sweep_region(&scn, scheme, &grid, opts)?;
            boundaries.push(outcome.boundary);
            rows.extend(outcome.rows);
        }
        let noma_b = &boundaries[1];
        let rsma_b = &boundaries[2];
        let improvement_area_rel = {
            let (an, ar) = (noma_b.area(), rsma_b.area());
            (an > 0.0).then(|| (ar - an) / an)
        };
        let mid = 0.5 * scn.plateau_edge();
        let improvement_gap_rel = match (noma_b.b_rate_at(mid), rsma_b.b_rate_at(mid)) {
            (Some(n), Some(r)) if n > 0.0 => Some((r - n) / n),
            _ => None,
        };
        entries.push(ThresholdEntry {
            s_th,
            boundaries,
            rows,
            improvement_area_rel,
            improvement_gap_rel,
        });
    }
    Ok(entries)
}
