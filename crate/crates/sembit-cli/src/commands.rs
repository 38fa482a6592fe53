//! Command implementations. Each writes one CSV (normative), one SVG
//! (best-effort), and a `run.json` metadata report into the output
//! directory, then returns its warning count (infeasible sweep points).

use crate::config::RunConfig;
use crate::plot::{write_line_plot, Series};
use crate::report::{
    fmt_opt, fmt_opt_usize, fmt_value, write_csv, write_run_json, RunReport, ASSUMPTION_NOTES,
    PRNG_NOTE,
};
use anyhow::{bail, Context, Result};
use sembit_core::region::{
    default_s_grid, sweep_region, sweep_threshold, sweep_users, timeshare_hull, RegionBoundary,
    Scheme, SweepRow,
};
use sembit_core::rsma::{sca_rsma, two_bit_user_baseline};
use sembit_core::scenario::Scenario;
use sembit_core::semantic::fit_logistic;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const REGION_CSV_HEADER: &str =
    "scheme,s_suts_per_s,bit_rate_bps,q,active_splits,iterations,feasible";

fn ensure_out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&cfg.output.dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn region_row(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.scheme,
        fmt_value(row.s_rate),
        fmt_opt(row.bit_rate),
        fmt_opt_usize(row.q),
        fmt_opt_usize(row.active_splits),
        fmt_opt_usize(row.iterations),
        row.feasible
    )
}

fn boundary_series(b: &RegionBoundary, dashed: bool) -> Series {
    Series {
        label: b.scheme.to_string(),
        points: b.points.iter().map(|p| (p.s_rate / 1e6, p.b_rate / 1e6)).collect(),
        dashed,
    }
}

#[derive(Serialize)]
struct RegionExtra {
    s_grid: Vec<f64>,
}

/// Sweeps the three schemes plus the time-sharing hull and writes
/// `region.csv`, `region.svg` and `run.json`.
pub fn cmd_region(cfg: &RunConfig) -> Result<usize> {
    let dir = ensure_out_dir(cfg)?;
    let scn = cfg.scenario()?;
    let opts = cfg.solver_options();
    let digest = cfg.digest();
    let grid = match &cfg.sweep.s_grid_suts {
        Some(grid) => grid.clone(),
        None => default_s_grid(&scn, cfg.sweep.n_points),
    };

    let mut rows: Vec<String> = Vec::new();
    let mut boundaries = Vec::new();
    let mut warnings = 0usize;
    for scheme in [Scheme::Fdma, Scheme::Noma, Scheme::Rsma] {
        let outcome = sweep_region(&scn, scheme, &grid, &opts)?;
        warnings += outcome.rows.iter().filter(|r| !r.feasible).count();
        rows.extend(outcome.rows.iter().map(region_row));
        boundaries.push(outcome.boundary);
    }
    let hull = timeshare_hull(&boundaries);
    for p in &hull.points {
        rows.push(format!(
            "{},{},{},,,,true",
            Scheme::Timeshare,
            fmt_value(p.s_rate),
            fmt_value(p.b_rate)
        ));
    }

    let csv_path = dir.join("region.csv");
    write_csv(&csv_path, &digest, REGION_CSV_HEADER, &rows)?;

    let mut outputs = vec![csv_path.display().to_string()];
    if cfg.output.svg {
        let svg_path = dir.join("region.svg");
        let mut series: Vec<Series> =
            boundaries.iter().map(|b| boundary_series(b, false)).collect();
        series.push(boundary_series(&hull, true));
        write_line_plot(
            &svg_path,
            "Achievable rate region",
            "semantic rate (Msuts/s)",
            "bit rate (Mbit/s)",
            &series,
            &digest,
        )?;
        outputs.push(svg_path.display().to_string());
    }

    write_run_json(
        &dir.join("run.json"),
        &RunReport {
            command: "region",
            config_digest: &digest,
            seed: cfg.scenario.seed,
            scenario_digest: &scn.digest(),
            warnings,
            outputs,
            assumption_notes: ASSUMPTION_NOTES.to_vec(),
            prng: PRNG_NOTE,
            extra: RegionExtra { s_grid: grid },
            resolved_config: cfg,
        },
    )?;
    Ok(warnings)
}

#[derive(Serialize)]
struct FitExtra {
    k: u32,
    a1: f64,
    a2: f64,
    c1_per_db: f64,
    c2: f64,
    mse: f64,
    iterations: usize,
    n_samples: usize,
}

/// Fits logistic parameters to a two-column `snr_db,similarity` CSV.
pub fn cmd_fit(cfg: &RunConfig, samples_csv: &Path, k: u32) -> Result<usize> {
    let dir = ensure_out_dir(cfg)?;
    let digest = cfg.digest();
    let text = std::fs::read_to_string(samples_csv)
        .with_context(|| format!("cannot read samples {}", samples_csv.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("samples file is empty")?;
    if header.trim() != "snr_db,similarity" {
        bail!("samples header must be `snr_db,similarity`, got `{header}`");
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
            bail!("line {} is not two comma-separated columns: `{line}`", i + 2);
        };
        let x: f64 = x.trim().parse().with_context(|| format!("bad snr on line {}", i + 2))?;
        let y: f64 = y
            .trim()
            .parse()
            .with_context(|| format!("bad similarity on line {}", i + 2))?;
        samples.push((x, y));
    }
    let fit = fit_logistic(&samples, k)?;

    let csv_path = dir.join("fit.csv");
    write_csv(
        &csv_path,
        &digest,
        "k,a1,a2,c1_per_db,c2,mse,iterations",
        &[format!(
            "{},{},{},{},{},{},{}",
            k,
            fmt_value(fit.params.a1),
            fmt_value(fit.params.a2),
            fmt_value(fit.params.c1),
            fmt_value(fit.params.c2),
            fmt_value(fit.mse),
            fit.iterations
        )],
    )?;

    let mut outputs = vec![csv_path.display().to_string()];
    if cfg.output.svg {
        let svg_path = dir.join("fit.svg");
        let curve: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
                let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
                let x = lo + (hi - lo) * i as f64 / 199.0;
                (x, fit.params.similarity(x))
            })
            .collect();
        write_line_plot(
            &svg_path,
            &format!("Logistic fit (k={k})"),
            "SNR (dB)",
            "sentence similarity",
            &[
                Series { label: "samples".into(), points: samples.clone(), dashed: true },
                Series { label: "fit".into(), points: curve, dashed: false },
            ],
            &digest,
        )?;
        outputs.push(svg_path.display().to_string());
    }

    let scn_digest = String::new();
    write_run_json(
        &dir.join("run.json"),
        &RunReport {
            command: "fit",
            config_digest: &digest,
            seed: cfg.scenario.seed,
            scenario_digest: &scn_digest,
            warnings: 0,
            outputs,
            assumption_notes: ASSUMPTION_NOTES.to_vec(),
            prng: PRNG_NOTE,
            extra: FitExtra {
                k,
                a1: fit.params.a1,
                a2: fit.params.a2,
                c1_per_db: fit.params.c1,
                c2: fit.params.c2,
                mse: fit.mse,
                iterations: fit.iterations,
                n_samples: samples.len(),
            },
            resolved_config: cfg,
        },
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct UsersExtra {
    fixed_s_suts: f64,
    n_values: Vec<usize>,
}

/// Bit rate per scheme per semantic-user count at the configured fixed
/// semantic rate.
pub fn cmd_sweep_users(cfg: &RunConfig) -> Result<usize> {
    let dir = ensure_out_dir(cfg)?;
    let scn = cfg.scenario()?;
    let pl = cfg.path_loss()?;
    if cfg.scenario.gain_bit.is_some() {
        bail!("sweep-users redraws channels per user count and needs path-loss generation, not explicit gains");
    }
    let opts = cfg.solver_options();
    let digest = cfg.digest();
    let rows_data = sweep_users(&scn, &pl, &cfg.sweep.n_users, cfg.sweep.fixed_s_suts, &opts)?;
    let warnings = rows_data.iter().filter(|r| !r.feasible).count();

    let rows: Vec<String> = rows_data
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.scheme,
                r.n_sem,
                fmt_value(r.s_rate),
                fmt_opt(r.bit_rate),
                r.feasible
            )
        })
        .collect();
    let csv_path = dir.join("users.csv");
    write_csv(
        &csv_path,
        &digest,
        "scheme,n_semantic_users,s_suts_per_s,bit_rate_bps,feasible",
        &rows,
    )?;

    let mut outputs = vec![csv_path.display().to_string()];
    if cfg.output.svg {
        let svg_path = dir.join("users.svg");
        let series: Vec<Series> = [Scheme::Fdma, Scheme::Noma, Scheme::Rsma]
            .into_iter()
            .map(|scheme| Series {
                label: scheme.to_string(),
                points: rows_data
                    .iter()
                    .filter(|r| r.scheme == scheme && r.feasible)
                    .map(|r| (r.n_sem as f64, r.bit_rate.unwrap() / 1e6))
                    .collect(),
                dashed: false,
            })
            .collect();
        write_line_plot(
            &svg_path,
            "Bit rate vs semantic user count",
            "semantic users",
            "bit rate (Mbit/s)",
            &series,
            &digest,
        )?;
        outputs.push(svg_path.display().to_string());
    }

    write_run_json(
        &dir.join("run.json"),
        &RunReport {
            command: "sweep-users",
            config_digest: &digest,
            seed: cfg.scenario.seed,
            scenario_digest: &scn.digest(),
            warnings,
            outputs,
            assumption_notes: ASSUMPTION_NOTES.to_vec(),
            prng: PRNG_NOTE,
            extra: UsersExtra {
                fixed_s_suts: cfg.sweep.fixed_s_suts,
                n_values: cfg.sweep.n_users.clone(),
            },
            resolved_config: cfg,
        },
    )?;
    Ok(warnings)
}

#[derive(Serialize)]
struct ThresholdImprovement {
    s_th: f64,
    rsma_over_noma_area_rel: Option<f64>,
    rsma_over_noma_gap_rel_at_mid_plateau: Option<f64>,
}

#[derive(Serialize)]
struct ThresholdExtra {
    improvements: Vec<ThresholdImprovement>,
}

/// Regions at several similarity thresholds, with the RSMA-over-NOMA
/// improvement statistics (both candidates) in the metadata.
pub fn cmd_sweep_threshold(cfg: &RunConfig) -> Result<usize> {
    let dir = ensure_out_dir(cfg)?;
    let scn = cfg.scenario()?;
    let opts = cfg.solver_options();
    let digest = cfg.digest();
    let entries = sweep_threshold(&scn, &cfg.sweep.s_th_values, cfg.sweep.n_points, &opts)?;

    let mut rows = Vec::new();
    let mut warnings = 0usize;
    let mut series = Vec::new();
    let mut improvements = Vec::new();
    for entry in &entries {
        warnings += entry.rows.iter().filter(|r| !r.feasible).count();
        for r in &entry.rows {
            rows.push(format!(
                "{},{},{},{},{}",
                fmt_value(entry.s_th),
                r.scheme,
                fmt_value(r.s_rate),
                fmt_opt(r.bit_rate),
                r.feasible
            ));
        }
        for b in &entry.boundaries {
            let mut s = boundary_series(b, b.scheme == Scheme::Fdma);
            s.label = format!("{} s_th={}", b.scheme, entry.s_th);
            series.push(s);
        }
        improvements.push(ThresholdImprovement {
            s_th: entry.s_th,
            rsma_over_noma_area_rel: entry.improvement_area_rel,
            rsma_over_noma_gap_rel_at_mid_plateau: entry.improvement_gap_rel,
        });
    }

    let csv_path = dir.join("thresholds.csv");
    write_csv(
        &csv_path,
        &digest,
        "s_th,scheme,s_suts_per_s,bit_rate_bps,feasible",
        &rows,
    )?;

    let mut outputs = vec![csv_path.display().to_string()];
    if cfg.output.svg {
        let svg_path = dir.join("thresholds.svg");
        write_line_plot(
            &svg_path,
            "Rate regions by similarity threshold",
            "semantic rate (Msuts/s)",
            "bit rate (Mbit/s)",
            &series,
            &digest,
        )?;
        outputs.push(svg_path.display().to_string());
    }

    write_run_json(
        &dir.join("run.json"),
        &RunReport {
            command: "sweep-threshold",
            config_digest: &digest,
            seed: cfg.scenario.seed,
            scenario_digest: &scn.digest(),
            warnings,
            outputs,
            assumption_notes: ASSUMPTION_NOTES.to_vec(),
            prng: PRNG_NOTE,
            extra: ThresholdExtra { improvements },
            resolved_config: cfg,
        },
    )?;
    Ok(warnings)
}

#[derive(Serialize)]
struct AlphaExtra {
    r2_points: usize,
    coexistence_points: usize,
}

/// Split-fraction experiments: the two-bit-user baseline (alpha vs the
/// guaranteed rate of user 2) and the coexistence case (alpha vs semantic
/// rate for one semantic user).
pub fn cmd_alpha(cfg: &RunConfig) -> Result<usize> {
    let dir = ensure_out_dir(cfg)?;
    let scn = cfg.scenario()?;
    let opts = cfg.solver_options();
    let digest = cfg.digest();
    if scn.n_sem() == 0 {
        bail!("alpha experiments need at least one semantic user");
    }

    let mut rows = Vec::new();
    let mut warnings = 0usize;

    // Two-bit-user baseline: user 1 = bit-user channel, user 2 = strongest
    // semantic channel.
    let (g1, g2) = (scn.gain_bit, scn.gains_sem[0]);
    let sigma2 = scn.sigma2();
    let r2_max = scn.bandwidth_hz * (1.0 + scn.p_max_watt * g2 / sigma2).log2();
    let mut two_bit_pts = Vec::new();
    for i in 0..cfg.sweep.r2_points {
        let r2 = 0.9 * r2_max * i as f64 / (cfg.sweep.r2_points - 1).max(1) as f64;
        match two_bit_user_baseline(
            g1,
            g2,
            scn.p_max_watt,
            scn.bandwidth_hz,
            sigma2,
            r2,
            &opts,
        ) {
            Ok(b) => {
                rows.push(format!(
                    "two_bit,{},,{},{}",
                    fmt_value(r2),
                    fmt_value(b.alpha),
                    fmt_value(b.r1_max)
                ));
                two_bit_pts.push((r2 / 1e6, b.alpha));
            }
            Err(_) => {
                warnings += 1;
                rows.push(format!("two_bit,{},,,", fmt_value(r2)));
            }
        }
    }

    // Coexistence case: one semantic user (the strongest) plus the bit user.
    let coex = Scenario::new_explicit(
        scn.bandwidth_hz,
        scn.noise_psd_dbm_hz,
        scn.p_max_watt,
        scn.gain_bit,
        vec![scn.gains_sem[0]],
        scn.cfg,
        scn.params,
        scn.seed,
    )
    .expect("reduced scenario is valid");
    let grid = default_s_grid(&coex, cfg.sweep.n_points);
    let mut coex_pts = Vec::new();
    for &s in &grid {
        match sca_rsma(&coex, s, &opts) {
            Ok(alloc) => {
                let alpha = alloc.split_fractions[0];
                rows.push(format!(
                    "coexistence,,{},{},{}",
                    fmt_value(s),
                    fmt_value(alpha),
                    fmt_value(alloc.bit_rate)
                ));
                coex_pts.push((s / 1e6, alpha));
            }
            Err(_) => {
                warnings += 1;
                rows.push(format!("coexistence,,{},,", fmt_value(s)));
            }
        }
    }

    let csv_path = dir.join("alpha.csv");
    write_csv(
        &csv_path,
        &digest,
        "kind,r2_bps,s_suts_per_s,alpha,rate_bps",
        &rows,
    )?;

    let mut outputs = vec![csv_path.display().to_string()];
    if cfg.output.svg {
        let svg_path = dir.join("alpha.svg");
        write_line_plot(
            &svg_path,
            "Split fraction of the first-decoded stream",
            "R2 or semantic rate (M/s)",
            "alpha",
            &[
                Series { label: "two-bit baseline".into(), points: two_bit_pts, dashed: false },
                Series { label: "coexistence".into(), points: coex_pts, dashed: true },
            ],
            &digest,
        )?;
        outputs.push(svg_path.display().to_string());
    }

    write_run_json(
        &dir.join("run.json"),
        &RunReport {
            command: "alpha",
            config_digest: &digest,
            seed: cfg.scenario.seed,
            scenario_digest: &scn.digest(),
            warnings,
            outputs,
            assumption_notes: ASSUMPTION_NOTES.to_vec(),
            prng: PRNG_NOTE,
            extra: AlphaExtra {
                r2_points: cfg.sweep.r2_points,
                coexistence_points: grid.len(),
            },
            resolved_config: cfg,
        },
    )?;
    Ok(warnings)
}
