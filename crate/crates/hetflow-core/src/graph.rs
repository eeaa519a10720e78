//! Graph formulation of the forced flow: heights u(x, t) on the unit
//! x-period with a winding offset, obeying
//!
//! u_t = u_xx / (1 + u_x^2) + g(x, u) sqrt(1 + u_x^2).
//!
//! Boundary data is periodic-plus-linear, u(x + 1) = u(x) + offset, so a
//! state of mean slope alpha keeps that slope forever. The module also
//! carries the weak-solution machinery for merely bounded forcings: the
//! divergence form u_t = (arctan u_x)_x + g sqrt(1 + u_x^2) tested against
//! compactly supported space-time test functions, approximation through a
//! mollified forcing sequence, and the comparison principle check.

use crate::curve::{Curve, TimeStep};
use crate::forcing::Forcing;
use crate::geom::Vec2;
use crate::util::{bump01, bump01_deriv};
use crate::{Error, Result};

/// Height samples on the uniform grid x_i = i/N, plus the winding offset.
#[derive(Debug, Clone)]
pub struct GraphState {
    values: Vec<f64>,
    offset: f64,
}

impl GraphState {
    pub fn new(values: Vec<f64>, offset: f64) -> Result<GraphState> {
        if values.len() < 16 {
            return Err(Error::InvalidConfig(format!(
                "graph grids need at least 16 nodes, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidConfig(
                "graph heights and offset must be finite".into(),
            ));
        }
        Ok(GraphState { values, offset })
    }

    pub fn constant(c: f64, offset: f64, n: usize) -> GraphState {
        let values = (0..n).map(|i| c + offset * i as f64 / n as f64).collect();
        GraphState::new(values, offset).expect("constant state is valid")
    }

    pub fn linear(offset: f64, n: usize) -> GraphState {
        GraphState::constant(0.0, offset, n)
    }

    /// offset * x plus trigonometric modes (k, cos amplitude, sin
    /// amplitude) in 2 pi k x.
    pub fn fourier(offset: f64, modes: &[(u32, f64, f64)], n: usize) -> GraphState {
        let tau = std::f64::consts::TAU;
        let values = (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                let mut u = offset * x;
                for &(k, ac, bs) in modes {
                    u += ac * (tau * k as f64 * x).cos() + bs * (tau * k as f64 * x).sin();
                }
                u
            })
            .collect();
        GraphState::new(values, offset).expect("fourier state is valid")
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Height at node index with winding: u_{i+N} = u_i + offset.
    pub fn node(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        let k = i.div_euclid(n);
        self.values[i.rem_euclid(n) as usize] + self.offset * k as f64
    }

    /// Piecewise-linear interpolation at arbitrary x, respecting the
    /// winding offset across periods.
    pub fn eval_at(&self, x: f64) -> f64 {
        let n = self.values.len() as f64;
        let pos = x * n;
        let base = pos.floor();
        let frac = pos - base;
        let i = base as isize;
        self.node(i) * (1.0 - frac) + self.node(i + 1) * frac
    }

    /// Centered slope at each node.
    pub fn slopes(&self) -> Vec<f64> {
        let n = self.values.len();
        let dx = 1.0 / n as f64;
        (0..n)
            .map(|i| (self.node(i as isize + 1) - self.node(i as isize - 1)) / (2.0 * dx))
            .collect()
    }
}

/// Right side of the graph equation at every node.
pub fn graph_velocity(state: &GraphState, field: &Forcing) -> Vec<f64> {
    let n = state.values.len();
    let dx = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let um = state.node(i as isize - 1);
        let u0 = state.values[i];
        let up = state.node(i as isize + 1);
        let ux = (up - um) / (2.0 * dx);
        let uxx = (up - 2.0 * u0 + um) / (dx * dx);
        let m = (1.0 + ux * ux).sqrt();
        let x = i as f64 * dx;
        out.push(uxx / (m * m) + field.eval(x, u0) * m);
    }
    out
}

/// The arclength energy density integral: F(p) = p arctan p - log sqrt(1 +
/// p^2), with F'(p) = arctan p. Under the unforced flow the integral of
/// F(u_x) dissipates at rate integral of u_t^2.
pub fn energy_f(p: f64) -> f64 {
    p * p.atan() - 0.5 * (p * p).ln_1p()
}

/// Scalar diagnostics recorded at each retained sample.
#[derive(Debug, Clone, Copy)]
pub struct GraphRecord {
    /// Arclength over one x-period: integral of sqrt(1 + u_x^2).
    pub arclength: f64,
    /// Integral of F(u_x).
    pub energy: f64,
    /// Integral of (1 + u_x^2)^(3/2), the weight in curvature-flow
    /// quantities expressed in graph variables.
    pub cubic_area: f64,
    pub max_ut: f64,
    pub max_slope: f64,
}

pub fn graph_record(state: &GraphState, field: &Forcing) -> GraphRecord {
    let n = state.values.len();
    let dx = 1.0 / n as f64;
    let slopes = state.slopes();
    let vel = graph_velocity(state, field);
    let mut arclength = 0.0;
    let mut energy = 0.0;
    let mut cubic = 0.0;
    let mut max_slope = 0.0f64;
    for &p in &slopes {
        let m2 = 1.0 + p * p;
        arclength += m2.sqrt() * dx;
        energy += energy_f(p) * dx;
        cubic += m2.powf(1.5) * dx;
        max_slope = max_slope.max(p.abs());
    }
    let max_ut = vel.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    GraphRecord {
        arclength,
        energy,
        cubic_area: cubic,
        max_ut,
        max_slope,
    }
}

#[derive(Debug, Clone)]
pub struct GraphSolverConfig {
    pub time_step: TimeStep,
    pub max_time: f64,
    pub sample_interval: f64,
    /// Stop gracefully once max |u_x| reaches this threshold; the graph
    /// formulation has broken down by then.
    pub slope_stop: f64,
    pub max_steps: usize,
}

impl GraphSolverConfig {
    pub fn to_time(max_time: f64, sample_interval: f64) -> GraphSolverConfig {
        GraphSolverConfig {
            time_step: TimeStep::Cfl(0.25),
            max_time,
            sample_interval,
            slope_stop: 1e3,
            max_steps: 200_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "max_time must be positive and finite, got {}",
                self.max_time
            )));
        }
        if !(self.sample_interval > 0.0) {
            return Err(Error::InvalidConfig(
                "sample_interval must be positive".into(),
            ));
        }
        match self.time_step {
            TimeStep::Fixed(dt) if !(dt > 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "fixed dt must be positive, got {dt}"
                )))
            }
            TimeStep::Cfl(c) if !(c > 0.0 && c <= 0.5) => {
                return Err(Error::InvalidConfig(format!(
                    "cfl factor must lie in (0, 0.5], got {c}"
                )))
            }
            _ => {}
        }
        if !(self.slope_stop > 0.0) {
            return Err(Error::InvalidConfig("slope_stop must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GraphSample {
    pub t: f64,
    pub state: GraphState,
    pub record: GraphRecord,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphTermination {
    ReachedMaxTime,
    SlopeBlowup { t: f64, max_slope: f64 },
}

#[derive(Debug)]
pub struct GraphRun {
    pub samples: Vec<GraphSample>,
    pub termination: GraphTermination,
    pub steps: usize,
}

/// Heun time stepping for the graph equation, sampling at exact multiples of
/// the sample interval. The grid never moves, so the parabolic step bound
/// dt = c dx^2 is fixed for the whole run.
pub fn solve_graph(
    initial: &GraphState,
    field: &Forcing,
    cfg: &GraphSolverConfig,
) -> Result<GraphRun> {
    cfg.validate()?;
    let n = initial.n();
    let dx = 1.0 / n as f64;
    let dt_raw = match cfg.time_step {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Cfl(c) => c * dx * dx,
    };
    let mut state = initial.clone();
    let mut t = 0.0f64;
    let mut steps = 0usize;
    let mut samples = vec![GraphSample {
        t: 0.0,
        state: state.clone(),
        record: graph_record(&state, field),
    }];
    let mut next_sample = cfg.sample_interval;
    loop {
        let max_slope = state
            .slopes()
            .iter()
            .fold(0.0f64, |m, p| m.max(p.abs()));
        if max_slope >= cfg.slope_stop {
            if samples.last().map(|s| s.t) != Some(t) {
                samples.push(GraphSample {
                    t,
                    state: state.clone(),
                    record: graph_record(&state, field),
                });
            }
            return Ok(GraphRun {
                samples,
                termination: GraphTermination::SlopeBlowup { t, max_slope },
                steps,
            });
        }
        let next_t = next_sample.min(cfg.max_time);
        let clipped = t + dt_raw >= next_t;
        let dt = if clipped { next_t - t } else { dt_raw };
        if dt <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "time step collapsed to {dt:.3e} at t = {t:.6}"
            )));
        }

        let v1 = graph_velocity(&state, field);
        let pred_vals: Vec<f64> = state
            .values
            .iter()
            .zip(v1.iter())
            .map(|(u, v)| u + dt * v)
            .collect();
        let pred = GraphState {
            values: pred_vals,
            offset: state.offset,
        };
        let v2 = graph_velocity(&pred, field);
        let new_vals: Vec<f64> = state
            .values
            .iter()
            .zip(v1.iter().zip(v2.iter()))
            .map(|(u, (a, b))| u + 0.5 * dt * (a + b))
            .collect();
        if new_vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::GradientBlowup { t, max_slope });
        }
        state = GraphState {
            values: new_vals,
            offset: state.offset,
        };
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::InvalidConfig(format!(
                "step budget {} exhausted at t = {t:.6}",
                cfg.max_steps
            )));
        }

        if clipped {
            t = next_t;
            samples.push(GraphSample {
                t,
                state: state.clone(),
                record: graph_record(&state, field),
            });
            if t >= cfg.max_time {
                return Ok(GraphRun {
                    samples,
                    termination: GraphTermination::ReachedMaxTime,
                    steps,
                });
            }
            if (next_sample - t).abs() < f64::EPSILON * (1.0 + t) {
                next_sample += cfg.sample_interval;
            }
        } else {
            t += dt;
        }
    }
}

/// Embed a graph state as a periodic curve (x, u(x)) with period offset
/// (1, winding offset). The curve's left normal is the upward graph normal,
/// so the two solvers move the same interface.
pub fn embed_graph(state: &GraphState) -> Result<Curve> {
    let n = state.n();
    let pts = (0..n)
        .map(|i| Vec2::new(i as f64 / n as f64, state.values[i]))
        .collect();
    Curve::periodic(pts, Vec2::new(1.0, state.offset))
}

/// Sup distance between two runs over matching sample times.
pub fn sup_distance(a: &GraphRun, b: &GraphRun) -> Result<f64> {
    let k = a.samples.len().min(b.samples.len());
    if k == 0 {
        return Err(Error::InsufficientData("no samples to compare".into()));
    }
    let mut worst = 0.0f64;
    for j in 0..k {
        let (sa, sb) = (&a.samples[j], &b.samples[j]);
        if (sa.t - sb.t).abs() > 1e-12 * (1.0 + sa.t.abs()) {
            return Err(Error::InsufficientData(format!(
                "sample grids disagree at index {j}: t = {} vs {}",
                sa.t, sb.t
            )));
        }
        if sa.state.n() != sb.state.n() {
            return Err(Error::InsufficientData(
                "sup distance needs matching grids".into(),
            ));
        }
        for (u, v) in sa.state.values().iter().zip(sb.state.values().iter()) {
            worst = worst.max((u - v).abs());
        }
    }
    Ok(worst)
}

/// Residual of the discrete energy identity between two consecutive
/// samples: the forward difference of the energy over the sampling interval
/// minus the dissipation-production integral at the earlier sample,
///
/// d/dt integral F(u_x) = integral (-u_t^2 + g u_t sqrt(1 + u_x^2)).
///
/// Both sides are exact for the continuum flow; discretely the residual is
/// first order in the sampling interval.
pub fn energy_identity_residual(a: &GraphSample, b: &GraphSample, field: &Forcing) -> f64 {
    let h = b.t - a.t;
    let n = a.state.n();
    let dx = 1.0 / n as f64;
    let vel = graph_velocity(&a.state, field);
    let slopes = a.state.slopes();
    let mut rhs = 0.0;
    for i in 0..n {
        let m = (1.0 + slopes[i] * slopes[i]).sqrt();
        let x = i as f64 * dx;
        let g = field.eval(x, a.state.values()[i]);
        rhs += (-vel[i] * vel[i] + g * vel[i] * m) * dx;
    }
    (b.record.energy - a.record.energy) / h - rhs
}

/// Space-time test function phi(x, t) = (compact bump in t) x
/// (trigonometric polynomial in x), the pairing class for the weak form.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub t0: f64,
    pub t1: f64,
    pub const_term: f64,
    /// Modes (k, cos amplitude, sin amplitude) in 2 pi k x.
    pub modes: Vec<(u32, f64, f64)>,
}

impl TestFunction {
    pub fn space(&self, x: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let mut v = self.const_term;
        for &(k, ac, bs) in &self.modes {
            v += ac * (tau * k as f64 * x).cos() + bs * (tau * k as f64 * x).sin();
        }
        v
    }

    pub fn space_dx(&self, x: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let mut v = 0.0;
        for &(k, ac, bs) in &self.modes {
            let w = tau * k as f64;
            v += -ac * w * (w * x).sin() + bs * w * (w * x).cos();
        }
        v
    }

    pub fn time(&self, t: f64) -> f64 {
        bump01((t - self.t0) / (self.t1 - self.t0))
    }

    pub fn time_dt(&self, t: f64) -> f64 {
        bump01_deriv((t - self.t0) / (self.t1 - self.t0)) / (self.t1 - self.t0)
    }
}

/// Weak-form residual of a run against one test function:
///
/// R(phi) = integral over x, t of
///     -u phi_t + arctan(u_x) phi_x - g(x, u) sqrt(1 + u_x^2) phi.
///
/// Space quadrature is at cell midpoints, so a piecewise-constant forcing
/// whose breakpoints sit on grid nodes is sampled exactly; time quadrature
/// is the trapezoid rule over the retained samples, exact at the support
/// ends where phi vanishes.
pub fn weak_residual(run: &GraphRun, field: &Forcing, tf: &TestFunction) -> f64 {
    let samples = &run.samples;
    let mut total = 0.0;
    for k in 0..samples.len() {
        let t = samples[k].t;
        if t <= tf.t0 || t >= tf.t1 {
            continue;
        }
        let w_t = match (k > 0, k + 1 < samples.len()) {
            (true, true) => 0.5 * (samples[k + 1].t - samples[k - 1].t),
            (false, true) => 0.5 * (samples[k + 1].t - t),
            (true, false) => 0.5 * (t - samples[k - 1].t),
            _ => 0.0,
        };
        let state = &samples[k].state;
        let n = state.n();
        let dx = 1.0 / n as f64;
        let bump = tf.time(t);
        let bump_dt = tf.time_dt(t);
        let mut space = 0.0;
        for i in 0..n {
            let u0 = state.values()[i];
            let u1 = state.node(i as isize + 1);
            let um = 0.5 * (u0 + u1);
            let sx = (u1 - u0) / dx;
            let xm = (i as f64 + 0.5) * dx;
            let phi = tf.space(xm) * bump;
            let phi_t = tf.space(xm) * bump_dt;
            let phi_x = tf.space_dx(xm) * bump;
            let m = (1.0 + sx * sx).sqrt();
            space += (-um * phi_t + sx.atan() * phi_x - field.eval(xm, um) * m * phi) * dx;
        }
        total += w_t * space;
    }
    total
}

/// Report from a mollified approximation sequence.
#[derive(Debug)]
pub struct WeakSolveReport {
    pub deltas: Vec<f64>,
    /// Sup distance between consecutive runs in the sequence.
    pub sup_distances: Vec<f64>,
    /// Weak residuals of the final run against the supplied test functions,
    /// paired with the rough forcing itself.
    pub weak_residuals: Vec<f64>,
    /// For x-only forcings: the worst increase of max |u_t| between
    /// consecutive samples of any run in the sequence (None when the forcing
    /// depends on y). Nonpositive means the sup bound on u_t was monotone.
    pub ut_monotonicity_violation: Option<f64>,
    pub final_run: GraphRun,
}

/// Solve the graph flow for each mollified forcing g_delta in turn and
/// check that the solutions form a Cauchy sequence in sup distance. The
/// delta list must be strictly decreasing; the distances must be too,
/// otherwise a NotCauchy error reports them.
pub fn solve_weak(
    initial: &GraphState,
    field: &Forcing,
    deltas: &[f64],
    cfg: &GraphSolverConfig,
    tests: &[TestFunction],
) -> Result<WeakSolveReport> {
    if deltas.len() < 2 {
        return Err(Error::InvalidConfig(
            "mollified sequences need at least two widths".into(),
        ));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "mollifier widths must be strictly decreasing".into(),
        ));
    }
    let x_only = !field.depends_on_y();
    let mut prev: Option<GraphRun> = None;
    let mut distances = Vec::new();
    let mut worst_ut_increase = f64::NEG_INFINITY;
    for &delta in deltas {
        let g = field.mollify(delta)?;
        let run = solve_graph(initial, &g, cfg)?;
        for w in run.samples.windows(2) {
            worst_ut_increase = worst_ut_increase.max(w[1].record.max_ut - w[0].record.max_ut);
        }
        if let Some(p) = &prev {
            distances.push(sup_distance(p, &run)?);
        }
        prev = Some(run);
    }
    if distances.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::NotCauchy {
            distances: distances.clone(),
        });
    }
    let final_run = prev.unwrap();
    let weak_residuals = tests
        .iter()
        .map(|tf| weak_residual(&final_run, field, tf))
        .collect();
    Ok(WeakSolveReport {
        deltas: deltas.to_vec(),
        sup_distances: distances,
        weak_residuals,
        ut_monotonicity_violation: x_only.then_some(worst_ut_increase),
        final_run,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ComparisonReport {
    pub initial_gap: f64,
    /// Minimum over all steps and nodes of upper - lower.
    pub min_gap: f64,
    pub ok: bool,
}

/// Evolve an ordered pair of states under the same forcing and record the
/// worst gap. The continuum comparison principle keeps lower <= upper; the
/// discrete scheme preserves it up to rounding slack.
pub fn comparison_check(
    lower: &GraphState,
    upper: &GraphState,
    field: &Forcing,
    cfg: &GraphSolverConfig,
    slack: f64,
) -> Result<ComparisonReport> {
    if lower.n() != upper.n() {
        return Err(Error::InvalidConfig(
            "comparison needs matching grids".into(),
        ));
    }
    let initial_gap = lower
        .values()
        .iter()
        .zip(upper.values().iter())
        .map(|(a, b)| b - a)
        .fold(f64::INFINITY, f64::min);
    let run_lo = solve_graph(lower, field, cfg)?;
    let run_hi = solve_graph(upper, field, cfg)?;
    let k = run_lo.samples.len().min(run_hi.samples.len());
    let mut min_gap = initial_gap;
    for j in 0..k {
        for (a, b) in run_lo.samples[j]
            .state
            .values()
            .iter()
            .zip(run_hi.samples[j].state.values().iter())
        {
            min_gap = min_gap.min(b - a);
        }
    }
    Ok(ComparisonReport {
        initial_gap,
        min_gap,
        ok: min_gap >= -slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_winding_adds_the_offset() {
        let s = GraphState::linear(0.5, 16);
        assert!((s.node(16) - 0.5).abs() < 1e-15);
        assert!((s.node(-1) - (15.0 / 32.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn eval_at_interpolates_across_the_seam() {
        let s = GraphState::linear(1.0, 16);
        // u(x) = x everywhere, including beyond the period.
        for &x in &[0.0, 0.4, 0.96875, 1.25, -0.3] {
            assert!((s.eval_at(x) - x).abs() < 1e-14, "x={x}: {}", s.eval_at(x));
        }
    }

    #[test]
    fn energy_f_matches_its_derivative() {
        // F'(p) = arctan p, checked by central differences.
        for &p in &[0.0, 0.3, -1.2, 4.0] {
            let h = 1e-6;
            let d = (energy_f(p + h) - energy_f(p - h)) / (2.0 * h);
            assert!((d - p.atan()).abs() < 1e-8, "p={p}");
        }
    }

    #[test]
    fn embedded_graph_is_a_periodic_curve() {
        let s = GraphState::fourier(0.5, &[(1, 0.1, 0.0)], 32);
        let c = embed_graph(&s).unwrap();
        assert_eq!(c.n(), 32);
        assert_eq!(c.period(), Some(Vec2::new(1.0, 0.5)));
    }
}
