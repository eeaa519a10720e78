//! Effective front speeds from directional averages of the forcing, wave
//! speed measurement on graph runs, and the epsilon sweep comparing the
//! oscillatory problem with its averaged limit.
//!
//! The speed of a front of slope alpha is governed by the line averages
//! G(s): zero anywhere on the period means the front pins (speed exactly
//! zero); a sign-definite average yields the harmonic mean 1/(int ds/G);
//! irrational slopes equidistribute and feel only the torus mean.

use crate::forcing::{Direction, Forcing, Slope};
use crate::graph::{solve_graph, GraphRun, GraphSolverConfig, GraphState};
use crate::util::{self, LinearFit};
use crate::{Error, Result};

/// Directional averages this close to zero count as exact zeros.
const PIN_TOL: f64 = 1e-8;
/// A minimum below this multiple of the pin tolerance without a sign change
/// cannot be classified as pinned or moving; it is reported as ambiguous.
const PIN_GUARD_FACTOR: f64 = 10.0;
/// Offsets sampled over one period when scanning the average for zeros.
const SPEED_SAMPLES: usize = 256;
/// Relative tolerance for the harmonic-mean quadrature.
const HARMONIC_TOL: f64 = 1e-10;
/// Evaluation cap for the harmonic-mean quadrature; piecewise-constant
/// averages converge only at first order, so the cap is generous.
const HARMONIC_MAX_POINTS: usize = 1 << 22;

/// Which formula produced an effective speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedBranch {
    /// The directional average vanishes somewhere: the front is trapped.
    Pinned,
    /// Sign-definite average: harmonic mean of G over the period.
    HarmonicMean,
    /// Irrational slope or direction: the equidistributed torus mean.
    TorusMean,
}

#[derive(Debug, Clone)]
pub struct EffectiveSpeed {
    pub c: f64,
    pub branch: SpeedBranch,
    /// Offset where the average vanishes, when pinning was detected from a
    /// grid zero or a sign change.
    pub pinned_at: Option<f64>,
    /// Smallest |G| seen on the sampling grid.
    pub min_abs_average: f64,
    /// The sampled (s, G(s)) table behind the decision.
    pub samples: Vec<(f64, f64)>,
}

/// Effective normal speed of fronts with the given slope.
pub fn effective_speed(field: &Forcing, slope: Slope) -> Result<EffectiveSpeed> {
    match slope {
        Slope::Irrational(_) => torus_branch(field),
        rational => from_average(&|s| field.slope_average(rational, s)),
    }
}

/// Effective speed for fronts normal to the given direction.
pub fn effective_speed_normal(field: &Forcing, dir: Direction) -> Result<EffectiveSpeed> {
    match dir {
        Direction::Irrational { .. } => torus_branch(field),
        lattice => from_average(&|s| field.normal_average(lattice, s)),
    }
}

fn torus_branch(field: &Forcing) -> Result<EffectiveSpeed> {
    let mean = field.mean()?;
    if mean.abs() <= PIN_TOL {
        return Ok(EffectiveSpeed {
            c: 0.0,
            branch: SpeedBranch::Pinned,
            pinned_at: None,
            min_abs_average: mean.abs(),
            samples: vec![(0.0, mean)],
        });
    }
    Ok(EffectiveSpeed {
        c: mean,
        branch: SpeedBranch::TorusMean,
        pinned_at: None,
        min_abs_average: mean.abs(),
        samples: vec![(0.0, mean)],
    })
}

fn from_average(g: &dyn Fn(f64) -> Result<f64>) -> Result<EffectiveSpeed> {
    let m = SPEED_SAMPLES;
    let mut samples = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let s = j as f64 / m as f64;
        samples.push((s, g(s)?));
    }
    let min_abs = samples
        .iter()
        .map(|&(_, v)| v.abs())
        .fold(f64::INFINITY, f64::min);

    // A zero on the grid pins directly.
    if let Some(&(s, _)) = samples.iter().find(|&&(_, v)| v.abs() <= PIN_TOL) {
        return Ok(pinned(s, min_abs, samples));
    }
    // A sign change pins after refining the crossing.
    for w in 0..m {
        let (s0, v0) = samples[w];
        let (s1, v1) = samples[w + 1];
        if v0.signum() != v1.signum() {
            let (mut lo, mut hi, mut vlo) = (s0, s1, v0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let vm = g(mid)?;
                if vm.abs() <= PIN_TOL || hi - lo < 1e-14 {
                    return Ok(pinned(mid, min_abs, samples));
                }
                if vm.signum() == vlo.signum() {
                    lo = mid;
                    vlo = vm;
                } else {
                    hi = mid;
                }
            }
            return Ok(pinned(0.5 * (lo + hi), min_abs, samples));
        }
    }
    // Sign-definite but grazing close to zero: refuse to decide.
    if min_abs < PIN_GUARD_FACTOR * PIN_TOL {
        return Err(Error::AmbiguousPinning { min_abs });
    }
    let inv_mean = adaptive_mean(&|s| Ok(1.0 / g(s)?), m, HARMONIC_TOL, HARMONIC_MAX_POINTS)?;
    Ok(EffectiveSpeed {
        c: 1.0 / inv_mean,
        branch: SpeedBranch::HarmonicMean,
        pinned_at: None,
        min_abs_average: min_abs,
        samples,
    })
}

fn pinned(s: f64, min_abs: f64, samples: Vec<(f64, f64)>) -> EffectiveSpeed {
    EffectiveSpeed {
        c: 0.0,
        branch: SpeedBranch::Pinned,
        pinned_at: Some(s),
        min_abs_average: min_abs,
        samples,
    }
}

/// Periodic trapezoid mean over [0,1) with point doubling; returns the best
/// value at the cap if the tolerance is not reached (piecewise-constant
/// integrands converge only at first order).
fn adaptive_mean(
    f: &dyn Fn(f64) -> Result<f64>,
    n0: usize,
    tol: f64,
    cap: usize,
) -> Result<f64> {
    let mut n = n0;
    let mut sum = 0.0;
    for j in 0..n {
        sum += f(j as f64 / n as f64)?;
    }
    let mut mean = sum / n as f64;
    while n < cap {
        let mut odd = 0.0;
        for j in 0..n {
            odd += f((2 * j + 1) as f64 / (2 * n) as f64)?;
        }
        let next = 0.5 * (mean + odd / n as f64);
        n *= 2;
        if (next - mean).abs() <= tol * (1.0 + next.abs()) {
            return Ok(next);
        }
        mean = next;
    }
    Ok(mean)
}

/// One row of the (slope, speed) table exhibiting the discontinuity of the
/// effective speed in the slope.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub label: String,
    pub alpha: f64,
    pub c: f64,
    pub pinned: bool,
}

/// Tabulate the effective speed over a list of tagged slopes.
pub fn discontinuity_scan(field: &Forcing, slopes: &[Slope]) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(slopes.len());
    for &slope in slopes {
        let sp = effective_speed(field, slope)?;
        let label = match slope {
            Slope::Rational { num, den } => format!("{num}/{den}"),
            Slope::Irrational(a) => format!("irrational {a}"),
        };
        rows.push(ScanRow {
            label,
            alpha: slope.value(),
            c: sp.c,
            pinned: sp.branch == SpeedBranch::Pinned,
        });
    }
    Ok(rows)
}

/// Wave speed extracted from the mean-height drift of a graph run.
#[derive(Debug, Clone)]
pub struct WaveSpeedMeasurement {
    /// Normal speed: drift rate divided by sqrt(1 + alpha^2).
    pub speed: f64,
    pub pinned: bool,
    /// Total mean-height displacement over the run.
    pub displacement: f64,
    /// The fit over the second half of the run; absent when pinned.
    pub fit: Option<LinearFit>,
}

/// Fit the mean height of the profile against time over the second half of
/// the run (the first half is warm-up). A total displacement below
/// `pin_threshold` counts as pinned and reports speed exactly zero.
pub fn measure_wave_speed(run: &GraphRun, pin_threshold: f64) -> Result<WaveSpeedMeasurement> {
    if run.samples.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "wave speed needs at least 4 samples, got {}",
            run.samples.len()
        )));
    }
    let height = |s: &GraphState| s.values().iter().sum::<f64>() / s.n() as f64;
    let heights: Vec<f64> = run.samples.iter().map(|s| height(&s.state)).collect();
    let displacement = heights[heights.len() - 1] - heights[0];
    if displacement.abs() < pin_threshold {
        return Ok(WaveSpeedMeasurement {
            speed: 0.0,
            pinned: true,
            displacement,
            fit: None,
        });
    }
    let t0 = run.samples[0].t;
    let t1 = run.samples[run.samples.len() - 1].t;
    let t_mid = 0.5 * (t0 + t1);
    let mut ts = Vec::new();
    let mut hs = Vec::new();
    for (s, h) in run.samples.iter().zip(&heights) {
        if s.t >= t_mid {
            ts.push(s.t);
            hs.push(*h);
        }
    }
    let fit = util::linear_fit(&ts, &hs).ok_or_else(|| {
        Error::InsufficientData("degenerate time grid in wave speed fit".into())
    })?;
    if fit.r_squared < 0.99 {
        return Err(Error::FitDegenerate {
            r_squared: fit.r_squared,
        });
    }
    let alpha = run.samples[0].state.offset();
    Ok(WaveSpeedMeasurement {
        speed: fit.slope / (1.0 + alpha * alpha).sqrt(),
        pinned: false,
        displacement,
        fit: Some(fit),
    })
}

/// Configuration of the epsilon sweep. Each cell count m solves the
/// oscillatory problem with forcing g(m x, m u) and the averaged problem
/// with the constant torus mean, on a grid of nodes_per_cell * m nodes when
/// the forcing oscillates in x (so every cell stays equally resolved), or
/// base_nodes otherwise.
#[derive(Debug, Clone)]
pub struct EpsSweepConfig {
    pub cells: Vec<u32>,
    pub nodes_per_cell: usize,
    pub base_nodes: usize,
    /// Winding offset of the initial profile.
    pub offset: f64,
    /// Fourier modes (k, cos amplitude, sin amplitude) of the initial profile.
    pub modes: Vec<(u32, f64, f64)>,
    pub solver: GraphSolverConfig,
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct EpsSweepRow {
    pub m: u32,
    pub eps: f64,
    pub n: usize,
    /// Sup over retained samples and nodes of |u_eps - u_limit|.
    pub sup_distance: f64,
    /// The same distance at the final sample only.
    pub final_distance: f64,
    /// Worst violation of the lattice almost-periodicity bound
    /// |u(x + k eps) - u(x)| <= (floor(L)+1) k eps over samples, aligned
    /// shifts k and nodes; <= 0 means the bound held everywhere.
    pub shift_defect: f64,
}

#[derive(Debug, Clone)]
pub struct EpsSweep {
    pub rows: Vec<EpsSweepRow>,
    /// Torus mean of the forcing, the coefficient of the averaged equation.
    pub limit_mean: f64,
    /// Whether sup_distance strictly decreases along the cell list.
    pub strictly_decreasing: bool,
}

/// Run the sweep: for each cell count, solve the oscillatory and the
/// averaged problem side by side and measure their distance. Rows run in
/// parallel under the jobs cap; results are deterministic regardless.
pub fn eps_sweep(field: &Forcing, cfg: &EpsSweepConfig) -> Result<EpsSweep> {
    if cfg.cells.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one cell count".into()));
    }
    if cfg.nodes_per_cell < 8 || cfg.base_nodes < 16 {
        return Err(Error::InvalidConfig(
            "sweep grids too coarse: need nodes_per_cell >= 8 and base_nodes >= 16".into(),
        ));
    }
    for &m in &cfg.cells {
        if m == 0 {
            return Err(Error::InvalidConfig("cell count must be positive".into()));
        }
        if !field.depends_on_x() && cfg.base_nodes % m as usize != 0 {
            return Err(Error::InvalidConfig(format!(
                "base_nodes {} must be divisible by the cell count {m} so lattice shifts stay grid aligned",
                cfg.base_nodes
            )));
        }
    }
    let limit_mean = field.mean()?;
    let limit_field = Forcing::constant(limit_mean);
    let results = util::parallel_map(cfg.jobs.max(1), cfg.cells.clone(), |m| {
        sweep_row(field, &limit_field, m, cfg)
    });
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance);
    Ok(EpsSweep {
        rows,
        limit_mean,
        strictly_decreasing,
    })
}

fn sweep_row(
    field: &Forcing,
    limit_field: &Forcing,
    m: u32,
    cfg: &EpsSweepConfig,
) -> Result<EpsSweepRow> {
    let eps = 1.0 / m as f64;
    let n = if field.depends_on_x() {
        cfg.nodes_per_cell * m as usize
    } else {
        cfg.base_nodes
    };
    let init = GraphState::fourier(cfg.offset, &cfg.modes, n);
    let lipschitz = init.slopes().iter().fold(0.0f64, |a, s| a.max(s.abs()));
    let bound_rate = lipschitz.floor() + 1.0;
    let osc = solve_graph(&init, &field.rescaled_cell(m), &cfg.solver)?;
    let lim = solve_graph(&init, limit_field, &cfg.solver)?;
    if osc.samples.len() != lim.samples.len() {
        return Err(Error::InsufficientData(format!(
            "oscillatory and averaged runs retained different sample counts ({} vs {})",
            osc.samples.len(),
            lim.samples.len()
        )));
    }
    let mut sup = 0.0f64;
    let mut fin = 0.0f64;
    let mut defect = f64::NEG_INFINITY;
    for (k, (a, b)) in osc.samples.iter().zip(&lim.samples).enumerate() {
        let mut gap = 0.0f64;
        for (ua, ub) in a.state.values().iter().zip(b.state.values()) {
            gap = gap.max((ua - ub).abs());
        }
        sup = sup.max(gap);
        if k + 1 == osc.samples.len() {
            fin = gap;
        }
        // Lattice almost-periodicity on grid-aligned shifts.
        for shift in 1..m as usize {
            let nodes = shift * n / m as usize;
            let bound = bound_rate * shift as f64 * eps;
            for i in 0..n {
                let d = (a.state.node((i + nodes) as isize) - a.state.values()[i]).abs();
                defect = defect.max(d - bound);
            }
        }
    }
    // A single cell has no nontrivial aligned shift; the bound is vacuous.
    if defect == f64::NEG_INFINITY {
        defect = 0.0;
    }
    Ok(EpsSweepRow {
        m,
        eps,
        n,
        sup_distance: sup,
        final_distance: fin,
        shift_defect: defect,
    })
}
