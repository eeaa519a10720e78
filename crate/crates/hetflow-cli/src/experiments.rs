//! Experiment drivers: run the solver behind a config and write the data
//! artifacts into the output directory.
//!
//! Every experiment produces summary.json with a `checks` array, the table
//! of monitored invariants with their worst observed values. Data files are
//! deterministic; re-running the same config yields identical bytes.

use std::path::Path;

use hetflow_core::curve::{
    estimate_extinction_time, kappa_max_series, solve_curve, CurveRun, CurveTermination,
};
use hetflow_core::diagnostics::{self, GaussianFocus};
use hetflow_core::forcing::Forcing;
use hetflow_core::graph::{solve_graph, solve_weak, GraphRun, GraphTermination};
use hetflow_core::homog::{discontinuity_scan, effective_speed, eps_sweep, SpeedBranch};
use serde_json::json;

use crate::artifacts::{check, num, opt_num, write_csv, write_json};
use crate::config::{RunConfig, Spec};

/// Relative slack allowed on the exponential length caps; covers the
/// quadrature error of measuring length on a polygon.
const LENGTH_CAP_SLACK: f64 = 1e-2;
/// Tolerances on the Gaussian-density growth bounds (per step and over the
/// whole run).
const DENSITY_STEP_SLACK: f64 = 1e-3;
const DENSITY_INTEGRATED_SLACK: f64 = 1e-6;
/// Worst admissible increase of max |u_t| between samples when the forcing
/// is independent of the height.
const UT_MONOTONE_SLACK: f64 = 1e-8;
/// Bound on the weak residual of the finest mollified run.
const WEAK_RESIDUAL_BOUND: f64 = 1e-3;
/// Bound on the lattice almost-periodicity defect in homogenization sweeps.
const SHIFT_DEFECT_BOUND: f64 = 1e-9;

/// Execute the experiment and write everything except manifest.json (the
/// caller owns that, so a failure note can still be recorded). The error
/// string is a runtime failure: solver breakdown or an unwritable artifact.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, String> {
    match &cfg.spec {
        Spec::Curve {
            initial,
            field,
            solver,
            focus,
        } => run_curve(cfg, initial, field, solver, focus.as_ref(), out),
        Spec::Graph {
            initial,
            field,
            solver,
        } => run_graph(initial, field, solver, out),
        Spec::Weak {
            initial,
            field,
            deltas,
            solver,
            tests,
        } => run_weak(initial, field, deltas, solver, tests, out),
        Spec::Homogenize { field, sweep } => run_homogenize(field, sweep, out),
        Spec::Speed { field, slope } => run_speed(field, *slope, out),
        Spec::Scan { field, slopes } => run_scan(field, slopes, out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> String {
    format!("cannot write {}: {e}", path.display())
}

fn write_csv_at(
    out: &Path,
    name: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), String> {
    let path = out.join(name);
    write_csv(&path, header, rows).map_err(|e| io_err(&path, e))
}

fn write_summary(out: &Path, value: &serde_json::Value) -> Result<(), String> {
    let path = out.join("summary.json");
    write_json(&path, value).map_err(|e| io_err(&path, e))
}

/// Worst relative violation of L(t) <= L(0) e^{S^2 t / 2} over a sampled
/// length series.
fn length_cap_slack(series: &[(f64, f64)], sup_g: f64) -> f64 {
    let l0 = series[0].1;
    series
        .iter()
        .map(|&(t, l)| l / (l0 * (sup_g * sup_g * t / 2.0).exp()) - 1.0)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn run_curve(
    cfg: &RunConfig,
    initial: &hetflow_core::curve::Curve,
    field: &Forcing,
    solver: &hetflow_core::curve::CurveSolverConfig,
    focus: Option<&(f64, hetflow_core::Vec2)>,
    out: &Path,
) -> Result<serde_json::Value, String> {
    let run = solve_curve(initial, field, solver).map_err(|e| e.to_string())?;

    write_csv_at(
        out,
        "snapshots.csv",
        &["t", "node", "x", "y"],
        run.samples.iter().flat_map(|s| {
            let t = num(s.t);
            s.curve
                .points()
                .iter()
                .enumerate()
                .map(move |(i, p)| vec![t.clone(), i.to_string(), num(p.x), num(p.y)])
                .collect::<Vec<_>>()
        }),
    )?;

    let focus_struct = focus.map(|&(t_ext, center)| GaussianFocus { center, t_ext });
    let records: Vec<diagnostics::DiagnosticsRecord> = run
        .samples
        .iter()
        .map(|s| diagnostics::record(s.t, &s.curve, field, focus_struct.as_ref()))
        .collect();
    write_csv_at(
        out,
        "diagnostics.csv",
        &[
            "t",
            "length",
            "area",
            "kappa_max",
            "kappa_sq_integral",
            "kappa_abs_integral",
            "eta",
            "gaussian_density",
            "rescaled_density",
            "sup_g",
        ],
        records.iter().map(|r| {
            vec![
                num(r.t),
                num(r.length),
                opt_num(r.area),
                num(r.kappa_max),
                num(r.kappa_sq_integral),
                num(r.kappa_abs_integral),
                opt_num(r.eta),
                opt_num(r.gaussian_density),
                opt_num(r.rescaled_density),
                num(r.sup_g),
            ]
        }),
    )?;

    let sup_g = field.sup_norm();
    let lengths: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.length)).collect();
    let mut checks = vec![{
        let slack = length_cap_slack(&lengths, sup_g);
        check("length-cap", Some(slack), slack <= LENGTH_CAP_SLACK)
    }];

    // Time integral of the curvature dissipation against its budget
    // 2 (L(0) - L(T)) + 2 L(0) (e^{S^2 T / 2} - 1).
    let t_end = records.last().expect("runs keep at least one sample").t;
    let mut dissipated = 0.0;
    for pair in records.windows(2) {
        let dt = pair[1].t - pair[0].t;
        dissipated += 0.5 * dt * (pair[0].kappa_sq_integral + pair[1].kappa_sq_integral);
    }
    let l0 = lengths[0].1;
    let budget = 2.0 * (l0 - lengths.last().unwrap().1)
        + 2.0 * l0 * ((sup_g * sup_g * t_end / 2.0).exp() - 1.0);
    let budget_slack = dissipated / budget.max(1e-12) - 1.0;
    checks.push(check(
        "dissipation-budget",
        Some(budget_slack),
        budget_slack <= LENGTH_CAP_SLACK,
    ));

    let mut density_json = serde_json::Value::Null;
    if let Some(focus) = &focus_struct {
        let report =
            diagnostics::density_report(&run.samples, focus, sup_g).map_err(|e| e.to_string())?;
        write_csv_at(
            out,
            "density.csv",
            &["t", "tau", "z", "density", "rescaled"],
            report.entries.iter().map(|e| {
                vec![num(e.t), num(e.tau), num(e.z), num(e.density), num(e.rescaled)]
            }),
        )?;
        checks.push(check(
            "density-step",
            Some(report.worst_step_slack),
            report.worst_step_slack <= DENSITY_STEP_SLACK,
        ));
        checks.push(check(
            "density-integrated",
            Some(report.worst_integrated_slack),
            report.worst_integrated_slack <= DENSITY_INTEGRATED_SLACK,
        ));
        density_json = json!({
            "entries": report.entries.len(),
            "worst_step_slack": report.worst_step_slack,
            "worst_integrated_slack": report.worst_integrated_slack,
        });
    }

    let (termination, detail) = curve_termination_json(&run);
    let extinction = match run.termination {
        CurveTermination::CurvatureBlowup { .. } if run.samples.len() >= 4 => {
            match estimate_extinction_time(&kappa_max_series(&run)) {
                Ok(est) => json!({
                    "t_ext": est.t_ext,
                    "r_squared": est.fit.r_squared,
                    "samples_used": est.used,
                }),
                Err(_) => serde_json::Value::Null,
            }
        }
        _ => serde_json::Value::Null,
    };

    let summary = json!({
        "experiment": cfg.experiment,
        "termination": termination,
        "termination_detail": detail,
        "steps": run.steps,
        "samples": run.samples.len(),
        "final_time": t_end,
        "initial_length": l0,
        "final_length": lengths.last().unwrap().1,
        "final_kappa_max": records.last().unwrap().kappa_max,
        "extinction": extinction,
        "density": density_json,
        "checks": checks,
    });
    write_summary(out, &summary)?;
    Ok(summary)
}

fn curve_termination_json(run: &CurveRun) -> (&'static str, serde_json::Value) {
    match run.termination {
        CurveTermination::ReachedMaxTime => ("reached-max-time", serde_json::Value::Null),
        CurveTermination::CurvatureBlowup { t, max_kappa } => {
            ("curvature-blowup", json!({ "t": t, "max_kappa": max_kappa }))
        }
        CurveTermination::SegmentCollapse { t, min_segment } => {
            ("segment-collapse", json!({ "t": t, "min_segment": min_segment }))
        }
    }
}

fn graph_termination_json(run: &GraphRun) -> (&'static str, serde_json::Value) {
    match run.termination {
        GraphTermination::ReachedMaxTime => ("reached-max-time", serde_json::Value::Null),
        GraphTermination::SlopeBlowup { t, max_slope } => {
            ("slope-blowup", json!({ "t": t, "max_slope": max_slope }))
        }
    }
}

fn write_graph_snapshots(out: &Path, name: &str, run: &GraphRun) -> Result<(), String> {
    write_csv_at(
        out,
        name,
        &["t", "node", "x", "u"],
        run.samples.iter().flat_map(|s| {
            let t = num(s.t);
            let n = s.state.n() as f64;
            s.state
                .values()
                .iter()
                .enumerate()
                .map(move |(i, &u)| vec![t.clone(), i.to_string(), num(i as f64 / n), num(u)])
                .collect::<Vec<_>>()
        }),
    )
}

fn write_graph_diagnostics(out: &Path, run: &GraphRun) -> Result<(), String> {
    write_csv_at(
        out,
        "diagnostics.csv",
        &["t", "arclength", "energy", "cubic_area", "max_ut", "max_slope"],
        run.samples.iter().map(|s| {
            vec![
                num(s.t),
                num(s.record.arclength),
                num(s.record.energy),
                num(s.record.cubic_area),
                num(s.record.max_ut),
                num(s.record.max_slope),
            ]
        }),
    )
}

/// Checks shared by every graph run: the exponential arclength cap and,
/// for height-independent forcing, monotone decay of max |u_t|.
fn graph_checks(run: &GraphRun, field: &Forcing) -> Vec<serde_json::Value> {
    let lengths: Vec<(f64, f64)> = run
        .samples
        .iter()
        .map(|s| (s.t, s.record.arclength))
        .collect();
    let slack = length_cap_slack(&lengths, field.sup_norm());
    let mut checks = vec![check(
        "arclength-cap",
        Some(slack),
        slack <= LENGTH_CAP_SLACK,
    )];
    if !field.depends_on_y() {
        let worst = run
            .samples
            .windows(2)
            .map(|p| p[1].record.max_ut - p[0].record.max_ut)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst.is_finite() {
            checks.push(check("ut-monotone", Some(worst), worst <= UT_MONOTONE_SLACK));
        }
    }
    checks
}

fn run_graph(
    initial: &hetflow_core::graph::GraphState,
    field: &Forcing,
    solver: &hetflow_core::graph::GraphSolverConfig,
    out: &Path,
) -> Result<serde_json::Value, String> {
    let run = solve_graph(initial, field, solver).map_err(|e| e.to_string())?;
    write_graph_snapshots(out, "snapshots.csv", &run)?;
    write_graph_diagnostics(out, &run)?;

    // Worst energy identity residual over consecutive samples; first order
    // in the sampling interval, reported without a gate.
    let worst_energy_residual = run
        .samples
        .windows(2)
        .map(|p| {
            hetflow_core::graph::energy_identity_residual(&p[0], &p[1], field).abs()
        })
        .fold(0.0, f64::max);

    let (termination, detail) = graph_termination_json(&run);
    let last = run.samples.last().expect("runs keep at least one sample");
    let summary = json!({
        "experiment": "graph",
        "termination": termination,
        "termination_detail": detail,
        "steps": run.steps,
        "samples": run.samples.len(),
        "final_time": last.t,
        "final_arclength": last.record.arclength,
        "final_energy": last.record.energy,
        "final_max_slope": last.record.max_slope,
        "worst_energy_identity_residual": worst_energy_residual,
        "checks": graph_checks(&run, field),
    });
    write_summary(out, &summary)?;
    Ok(summary)
}

fn run_weak(
    initial: &hetflow_core::graph::GraphState,
    field: &Forcing,
    deltas: &[f64],
    solver: &hetflow_core::graph::GraphSolverConfig,
    tests: &[hetflow_core::graph::TestFunction],
    out: &Path,
) -> Result<serde_json::Value, String> {
    let report =
        solve_weak(initial, field, deltas, solver, tests).map_err(|e| e.to_string())?;

    write_csv_at(
        out,
        "gaps.csv",
        &["delta_coarse", "delta_fine", "sup_distance"],
        report
            .deltas
            .windows(2)
            .zip(report.sup_distances.iter())
            .map(|(pair, &d)| vec![num(pair[0]), num(pair[1]), num(d)]),
    )?;
    write_csv_at(
        out,
        "residuals.csv",
        &["test", "residual"],
        report
            .weak_residuals
            .iter()
            .enumerate()
            .map(|(i, &r)| vec![(i + 1).to_string(), num(r)]),
    )?;
    write_graph_snapshots(out, "snapshots.csv", &report.final_run)?;

    let last_gap = *report.sup_distances.last().expect("two or more deltas");
    let worst_residual = report
        .weak_residuals
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    let mut checks = vec![
        // solve_weak only returns once the gaps strictly decrease; the row
        // records the finest gap reached.
        check("cauchy-decreasing", Some(last_gap), true),
        check(
            "weak-residual",
            Some(worst_residual),
            worst_residual <= WEAK_RESIDUAL_BOUND,
        ),
    ];
    if let Some(v) = report.ut_monotonicity_violation {
        checks.push(check("ut-monotone", Some(v), v <= UT_MONOTONE_SLACK));
    }

    let (termination, detail) = graph_termination_json(&report.final_run);
    let summary = json!({
        "experiment": "weak",
        "deltas": report.deltas,
        "sup_distances": report.sup_distances,
        "weak_residuals": report.weak_residuals,
        "final_termination": termination,
        "final_termination_detail": detail,
        "checks": checks,
    });
    write_summary(out, &summary)?;
    Ok(summary)
}

fn run_homogenize(
    field: &Forcing,
    sweep_cfg: &hetflow_core::homog::EpsSweepConfig,
    out: &Path,
) -> Result<serde_json::Value, String> {
    let sweep = eps_sweep(field, sweep_cfg).map_err(|e| e.to_string())?;

    write_csv_at(
        out,
        "sweep.csv",
        &["m", "eps", "n", "sup_distance", "final_distance", "shift_defect"],
        sweep.rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                num(r.eps),
                r.n.to_string(),
                num(r.sup_distance),
                num(r.final_distance),
                num(r.shift_defect),
            ]
        }),
    )?;

    let worst_defect = sweep
        .rows
        .iter()
        .map(|r| r.shift_defect)
        .fold(f64::NEG_INFINITY, f64::max);
    let checks = vec![
        check("distances-decreasing", None, sweep.strictly_decreasing),
        check(
            "shift-defect",
            Some(worst_defect),
            worst_defect <= SHIFT_DEFECT_BOUND,
        ),
    ];

    let summary = json!({
        "experiment": "homogenize",
        "limit_mean": sweep.limit_mean,
        "rows": sweep.rows.len(),
        "final_sup_distance": sweep.rows.last().map(|r| r.sup_distance),
        "checks": checks,
    });
    write_summary(out, &summary)?;
    Ok(summary)
}

fn run_speed(
    field: &Forcing,
    slope: hetflow_core::forcing::Slope,
    out: &Path,
) -> Result<serde_json::Value, String> {
    let sp = effective_speed(field, slope).map_err(|e| e.to_string())?;

    write_csv_at(
        out,
        "averages.csv",
        &["s", "average"],
        sp.samples.iter().map(|&(s, g)| vec![num(s), num(g)]),
    )?;

    let branch = match sp.branch {
        SpeedBranch::Pinned => "pinned",
        SpeedBranch::HarmonicMean => "harmonic-mean",
        SpeedBranch::TorusMean => "torus-mean",
    };
    let summary = json!({
        "experiment": "effective-speed",
        "c": sp.c,
        "branch": branch,
        "pinned_at": sp.pinned_at,
        "min_abs_average": sp.min_abs_average,
        "checks": [],
    });
    write_summary(out, &summary)?;
    Ok(summary)
}

fn run_scan(
    field: &Forcing,
    slopes: &[hetflow_core::forcing::Slope],
    out: &Path,
) -> Result<serde_json::Value, String> {
    let rows = discontinuity_scan(field, slopes).map_err(|e| e.to_string())?;

    write_csv_at(
        out,
        "scan.csv",
        &["label", "alpha", "c", "pinned"],
        rows.iter().map(|r| {
            vec![
                r.label.clone(),
                num(r.alpha),
                num(r.c),
                r.pinned.to_string(),
            ]
        }),
    )?;

    let c_min = rows.iter().map(|r| r.c).fold(f64::INFINITY, f64::min);
    let c_max = rows.iter().map(|r| r.c).fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({
        "experiment": "discontinuity-scan",
        "rows": rows.len(),
        "c_min": c_min,
        "c_max": c_max,
        "checks": [],
    });
    write_summary(out, &summary)?;
    Ok(summary)
}
