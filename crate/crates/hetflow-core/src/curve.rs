//! Closed and periodic polyline curves and the explicit solver for the
//! forced flow v = (kappa + g) nu.
//!
//! Curvature uses the second parameter difference dotted with the unit
//! normal, divided by the squared metric. The metric at a node is the mean
//! of the two adjacent chord lengths over the parameter spacing; with that
//! choice a uniformly sampled circle has discrete curvature exactly 1/R, so
//! stationarity and monotonicity statements can be tested at tight
//! tolerances instead of drowning in O(1/N^2) discretization bias.

use crate::forcing::Forcing;
use crate::geom::Vec2;
use crate::util::{linear_fit, LinearFit};
use crate::{Error, Result};

/// Polyline curve. Closed curves satisfy gamma_{i+N} = gamma_i and must be
/// oriented counterclockwise (positive signed area), which makes the left
/// normal point inward. Periodic curves satisfy gamma_{i+N} = gamma_i + p
/// for a fixed offset p with positive x-component; they embed graphs of
/// periodic-plus-linear height functions.
#[derive(Debug, Clone)]
pub struct Curve {
    points: Vec<Vec2>,
    period: Option<Vec2>,
}

impl Curve {
    pub fn closed(points: Vec<Vec2>) -> Result<Curve> {
        Self::validate_points(&points)?;
        let c = Curve { points, period: None };
        let area = c.signed_area().unwrap();
        if area <= 0.0 {
            return Err(Error::InvalidCurve(format!(
                "closed curves must wind counterclockwise (signed area {area:.3e}); \
                 reverse the node order"
            )));
        }
        Ok(c)
    }

    pub fn periodic(points: Vec<Vec2>, period: Vec2) -> Result<Curve> {
        Self::validate_points(&points)?;
        if !(period.x > 0.0) || !period.is_finite() {
            return Err(Error::InvalidCurve(format!(
                "periodic offset must have positive x-component, got ({}, {})",
                period.x, period.y
            )));
        }
        Ok(Curve {
            points,
            period: Some(period),
        })
    }

    fn validate_points(points: &[Vec2]) -> Result<()> {
        if points.len() < 8 {
            return Err(Error::InvalidCurve(format!(
                "need at least 8 nodes, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve("non-finite node coordinates".into()));
        }
        for i in 0..points.len() {
            let j = (i + 1) % points.len();
            if points[i].dist(points[j]) == 0.0 && j != 0 {
                return Err(Error::InvalidCurve(format!(
                    "repeated consecutive nodes at index {i}"
                )));
            }
        }
        Ok(())
    }

    /// Construct without validation; used by the solver on intermediate
    /// states that have already been checked for finiteness.
    fn raw(points: Vec<Vec2>, period: Option<Vec2>) -> Curve {
        Curve { points, period }
    }

    pub fn circle(center: Vec2, radius: f64, n: usize) -> Curve {
        assert!(radius > 0.0 && n >= 8);
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                center + Vec2::new(radius * t.cos(), radius * t.sin())
            })
            .collect();
        Curve::raw(pts, None)
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64, n: usize) -> Curve {
        assert!(a > 0.0 && b > 0.0 && n >= 8);
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                center + Vec2::new(a * t.cos(), b * t.sin())
            })
            .collect();
        Curve::raw(pts, None)
    }

    /// Circle of radius R modulated radially by Fourier modes
    /// (k, cos amplitude, sin amplitude): r(theta) = R (1 + sum a_k cos k
    /// theta + b_k sin k theta). Amplitudes must keep r positive.
    pub fn perturbed_circle(
        center: Vec2,
        radius: f64,
        modes: &[(u32, f64, f64)],
        n: usize,
    ) -> Curve {
        assert!(radius > 0.0 && n >= 8);
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let mut r = 1.0;
                for &(k, ac, bs) in modes {
                    r += ac * (k as f64 * t).cos() + bs * (k as f64 * t).sin();
                }
                assert!(r > 0.0, "radial perturbation reaches zero radius");
                center + Vec2::new(radius * r * t.cos(), radius * r * t.sin())
            })
            .collect();
        Curve::raw(pts, None)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn period(&self) -> Option<Vec2> {
        self.period
    }

    pub fn is_closed(&self) -> bool {
        self.period.is_none()
    }

    /// Node with index wrapping: closed curves repeat, periodic curves shift
    /// by the period offset per wrap.
    pub fn node(&self, i: isize) -> Vec2 {
        let n = self.points.len() as isize;
        let k = i.div_euclid(n);
        let r = i.rem_euclid(n) as usize;
        match self.period {
            None => self.points[r],
            Some(p) => self.points[r] + p * k as f64,
        }
    }

    /// Total polyline length: full loop for closed curves, one period for
    /// periodic ones.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].dist(self.node(i as isize + 1)))
            .sum()
    }

    pub fn min_segment(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].dist(self.node(i as isize + 1)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Shoelace area; positive for counterclockwise closed curves. None for
    /// periodic curves, where the notion does not apply.
    pub fn signed_area(&self) -> Option<f64> {
        if self.period.is_some() {
            return None;
        }
        let n = self.points.len();
        let mut acc = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            acc += p.cross(q);
        }
        Some(0.5 * acc)
    }

    /// Centroid of the enclosed region (closed curves only).
    pub fn area_centroid(&self) -> Option<Vec2> {
        let area = self.signed_area()?;
        if area == 0.0 {
            return None;
        }
        let n = self.points.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Some(Vec2::new(cx, cy) * (1.0 / (6.0 * area)))
    }

    /// Discrete Frenet data at every node.
    pub fn frenet(&self) -> FrenetData {
        let n = self.points.len();
        let dx = 1.0 / n as f64;
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        let mut metric = Vec::with_capacity(n);
        let mut dual_length = Vec::with_capacity(n);
        for i in 0..n {
            let prev = self.node(i as isize - 1);
            let cur = self.points[i];
            let next = self.node(i as isize + 1);
            let d_plus = next - cur;
            let d_minus = cur - prev;
            let m = (d_plus.norm() + d_minus.norm()) / (2.0 * dx);
            let tau = (next - prev)
                .normalized()
                .or_else(|| d_plus.normalized())
                .unwrap_or(Vec2::new(1.0, 0.0));
            let nu = tau.perp();
            let second = (next + prev - cur * 2.0) * (1.0 / (dx * dx));
            let kappa = second.dot(nu) / (m * m);
            tangent.push(tau);
            normal.push(nu);
            curvature.push(kappa);
            metric.push(m);
            dual_length.push(m * dx);
        }
        FrenetData {
            tangent,
            normal,
            curvature,
            metric,
            dual_length,
        }
    }
}

/// Per-node geometric data: unit tangent, unit left normal (inward for
/// counterclockwise closed curves), curvature, metric |gamma_x|, and the
/// arclength quadrature weight ds = metric / N.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub tangent: Vec<Vec2>,
    pub normal: Vec<Vec2>,
    pub curvature: Vec<f64>,
    pub metric: Vec<f64>,
    pub dual_length: Vec<f64>,
}

impl FrenetData {
    pub fn max_abs_curvature(&self) -> f64 {
        self.curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }
}

/// Time step rule: fixed dt, or the parabolic bound dt = c (min segment)^2
/// recomputed every step. The factor must lie in (0, 1/2]; 1/4 is the
/// default safety margin.
#[derive(Debug, Clone, Copy)]
pub enum TimeStep {
    Fixed(f64),
    Cfl(f64),
}

#[derive(Debug, Clone)]
pub struct CurveSolverConfig {
    pub time_step: TimeStep,
    pub max_time: f64,
    /// Cadence of retained samples; the solver lands on these times exactly.
    pub sample_interval: f64,
    /// Stop (gracefully) once max |kappa| reaches this threshold.
    pub kappa_stop: f64,
    /// Stop once some segment drops below this fraction of the initial
    /// average segment length L0/N.
    pub min_segment_factor: f64,
    pub max_steps: usize,
}

impl CurveSolverConfig {
    pub fn to_time(max_time: f64, sample_interval: f64) -> CurveSolverConfig {
        CurveSolverConfig {
            time_step: TimeStep::Cfl(0.25),
            max_time,
            sample_interval,
            kappa_stop: 1e3,
            min_segment_factor: 1e-6,
            max_steps: 20_000_000,
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
                return Err(Error::InvalidConfig(format!("fixed dt must be positive, got {dt}")))
            }
            TimeStep::Cfl(c) if !(c > 0.0 && c <= 0.5) => {
                return Err(Error::InvalidConfig(format!(
                    "cfl factor must lie in (0, 0.5], got {c}"
                )))
            }
            _ => {}
        }
        if !(self.kappa_stop > 0.0) {
            return Err(Error::InvalidConfig("kappa_stop must be positive".into()));
        }
        if !(self.min_segment_factor >= 0.0) {
            return Err(Error::InvalidConfig(
                "min_segment_factor must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CurveSample {
    pub t: f64,
    pub curve: Curve,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveTermination {
    ReachedMaxTime,
    CurvatureBlowup { t: f64, max_kappa: f64 },
    SegmentCollapse { t: f64, min_segment: f64 },
}

#[derive(Debug)]
pub struct CurveRun {
    pub samples: Vec<CurveSample>,
    pub termination: CurveTermination,
    pub steps: usize,
}

fn velocities(c: &Curve, f: &FrenetData, field: &Forcing) -> Vec<Vec2> {
    c.points()
        .iter()
        .zip(f.curvature.iter().zip(f.normal.iter()))
        .map(|(p, (k, nu))| *nu * (k + field.eval(p.x, p.y)))
        .collect()
}

/// Evolve a curve under v = (kappa + g) nu with Heun (explicit trapezoid)
/// stepping. Samples are taken at exact multiples of the sample interval;
/// curvature blowup and segment collapse end the run gracefully with the
/// final state recorded.
pub fn solve_curve(initial: &Curve, field: &Forcing, cfg: &CurveSolverConfig) -> Result<CurveRun> {
    cfg.validate()?;
    let n = initial.n();
    let seg_floor = cfg.min_segment_factor * initial.length() / n as f64;
    let mut cur = initial.clone();
    let mut t = 0.0f64;
    let mut steps = 0usize;
    let mut samples = vec![CurveSample {
        t: 0.0,
        curve: cur.clone(),
    }];
    let mut next_sample = cfg.sample_interval;
    loop {
        let f = cur.frenet();
        let kmax = f.max_abs_curvature();
        if kmax >= cfg.kappa_stop {
            push_final(&mut samples, t, &cur);
            return Ok(CurveRun {
                samples,
                termination: CurveTermination::CurvatureBlowup { t, max_kappa: kmax },
                steps,
            });
        }
        let min_seg = cur.min_segment();
        if min_seg <= seg_floor {
            push_final(&mut samples, t, &cur);
            return Ok(CurveRun {
                samples,
                termination: CurveTermination::SegmentCollapse { t, min_segment: min_seg },
                steps,
            });
        }
        let dt_raw = match cfg.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => c * min_seg * min_seg,
        };
        let next_t = next_sample.min(cfg.max_time);
        let clipped = t + dt_raw >= next_t;
        let dt = if clipped { next_t - t } else { dt_raw };
        if dt <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "time step collapsed to {dt:.3e} at t = {t:.6}"
            )));
        }

        let v1 = velocities(&cur, &f, field);
        let pred_pts: Vec<Vec2> = cur
            .points()
            .iter()
            .zip(v1.iter())
            .map(|(p, v)| *p + *v * dt)
            .collect();
        let pred = Curve::raw(pred_pts, cur.period());
        let f2 = pred.frenet();
        let v2 = velocities(&pred, &f2, field);
        let new_pts: Vec<Vec2> = cur
            .points()
            .iter()
            .zip(v1.iter().zip(v2.iter()))
            .map(|(p, (a, b))| *p + (*a + *b) * (0.5 * dt))
            .collect();
        if new_pts.iter().any(|p| !p.is_finite()) {
            return Err(Error::Blowup { t, max_kappa: kmax });
        }
        cur = Curve::raw(new_pts, cur.period());
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::InvalidConfig(format!(
                "step budget {} exhausted at t = {t:.6}",
                cfg.max_steps
            )));
        }

        if clipped {
            t = next_t;
            samples.push(CurveSample {
                t,
                curve: cur.clone(),
            });
            if t >= cfg.max_time {
                return Ok(CurveRun {
                    samples,
                    termination: CurveTermination::ReachedMaxTime,
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

fn push_final(samples: &mut Vec<CurveSample>, t: f64, cur: &Curve) {
    if samples.last().map(|s| s.t) != Some(t) {
        samples.push(CurveSample {
            t,
            curve: cur.clone(),
        });
    }
}

/// Max |kappa| at each retained sample, the input for extinction-time fits
/// and singularity classification.
pub fn kappa_max_series(run: &CurveRun) -> Vec<(f64, f64)> {
    run.samples
        .iter()
        .map(|s| (s.t, s.curve.frenet().max_abs_curvature()))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct EmbeddednessRatio {
    pub eta: f64,
    pub i: usize,
    pub j: usize,
}

/// Minimum over node pairs of chord length divided by the shorter arc
/// between them. A circle gives 2/pi (up to the polygon correction);
/// embedded curves stay bounded away from 0.
pub fn embeddedness_ratio(c: &Curve) -> Result<EmbeddednessRatio> {
    if !c.is_closed() {
        return Err(Error::InvalidCurve(
            "embeddedness ratio is defined for closed curves".into(),
        ));
    }
    let n = c.n();
    let mut arc = Vec::with_capacity(n + 1);
    arc.push(0.0);
    for i in 0..n {
        let d = c.points()[i].dist(c.node(i as isize + 1));
        arc.push(arc[i] + d);
    }
    let total = arc[n];
    let mut best = EmbeddednessRatio {
        eta: f64::INFINITY,
        i: 0,
        j: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            let chord = c.points()[i].dist(c.points()[j]);
            let along = arc[j] - arc[i];
            let a = along.min(total - along);
            if a <= 0.0 {
                continue;
            }
            let r = chord / a;
            if r < best.eta {
                best = EmbeddednessRatio { eta: r, i, j };
            }
        }
    }
    Ok(best)
}

/// First properly crossing pair of non-adjacent segments, if any.
pub fn self_intersects(c: &Curve) -> Option<(usize, usize)> {
    let n = c.n();
    let seg: Vec<(Vec2, Vec2)> = (0..n)
        .map(|i| (c.points()[i], c.node(i as isize + 1)))
        .collect();
    let ccw = |a: Vec2, b: Vec2, p: Vec2| (b - a).cross(p - a);
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = seg[i];
            let (p, q) = seg[j];
            // Bounding box reject before the orientation tests.
            if a.x.max(b.x) < p.x.min(q.x)
                || p.x.max(q.x) < a.x.min(b.x)
                || a.y.max(b.y) < p.y.min(q.y)
                || p.y.max(q.y) < a.y.min(b.y)
            {
                continue;
            }
            let d1 = ccw(a, b, p);
            let d2 = ccw(a, b, q);
            let d3 = ccw(p, q, a);
            let d4 = ccw(p, q, b);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Resample to m nodes equally spaced in arclength along the existing
/// polyline, starting from node 0.
pub fn resample_uniform(c: &Curve, m: usize) -> Curve {
    assert!(m >= 8);
    let n = c.n();
    let mut arc = Vec::with_capacity(n + 1);
    arc.push(0.0);
    for i in 0..n {
        arc.push(arc[i] + c.points()[i].dist(c.node(i as isize + 1)));
    }
    let total = arc[n];
    let mut pts = Vec::with_capacity(m);
    let mut seg = 0usize;
    for k in 0..m {
        let target = total * k as f64 / m as f64;
        while seg + 1 < n && arc[seg + 1] <= target {
            seg += 1;
        }
        let a = c.points()[seg];
        let b = c.node(seg as isize + 1);
        let len = arc[seg + 1] - arc[seg];
        let frac = if len > 0.0 { (target - arc[seg]) / len } else { 0.0 };
        pts.push(a + (b - a) * frac);
    }
    Curve::raw(pts, c.period())
}

#[derive(Debug, Clone)]
pub struct ExtinctionEstimate {
    pub t_ext: f64,
    pub fit: LinearFit,
    /// Number of trailing samples used in the fit.
    pub used: usize,
}

/// Estimate the extinction time from a (t, max |kappa|) series by fitting
/// 1/kappa^2 linearly in t and extrapolating to zero. Near a shrinking
/// extinction 1/kappa^2 ~ 2(T - t), so the root of the fit is T.
pub fn estimate_extinction_time(series: &[(f64, f64)]) -> Result<ExtinctionEstimate> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, k)| t.is_finite() && k.is_finite() && *k > 0.0)
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "extinction fit needs at least 3 curvature samples, got {}",
            pts.len()
        )));
    }
    let k_final = pts.last().unwrap().1;
    let mut sel: Vec<(f64, f64)> = pts
        .iter()
        .copied()
        .filter(|(_, k)| *k >= k_final / 10.0)
        .collect();
    if sel.len() < 5 {
        let take = pts.len().min(5);
        sel = pts[pts.len() - take..].to_vec();
    }
    let xs: Vec<f64> = sel.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = sel.iter().map(|p| 1.0 / (p.1 * p.1)).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| {
        Error::InsufficientData("degenerate time axis in extinction fit".into())
    })?;
    if fit.slope >= 0.0 || fit.r_squared < 0.99 {
        return Err(Error::FitDegenerate {
            r_squared: fit.r_squared,
        });
    }
    let t_ext = -fit.intercept / fit.slope;
    let t_last = xs.last().copied().unwrap();
    if !(t_ext > t_last) {
        return Err(Error::FitDegenerate {
            r_squared: fit.r_squared,
        });
    }
    Ok(ExtinctionEstimate {
        t_ext,
        fit,
        used: sel.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityType {
    TypeI,
    TypeII,
}

#[derive(Debug, Clone)]
pub struct SingularityClassification {
    pub kind: SingularityType,
    /// Log-log slope of kappa sqrt(T - t) against T - t.
    pub slope: f64,
    pub points: usize,
}

/// Classify the blowup rate: if kappa sqrt(T - t) stays bounded (log-log
/// slope above -0.1 over the final resolved decade of T - t) the blowup is
/// Type I; a persistent negative slope means faster than the parabolic rate,
/// Type II.
pub fn classify_singularity(
    series: &[(f64, f64)],
    t_ext: f64,
) -> Result<SingularityClassification> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter_map(|&(t, k)| {
            let tau = t_ext - t;
            (tau > 0.0 && k > 0.0 && k.is_finite()).then_some((tau, k))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "singularity classification needs at least 3 samples before t_ext, got {}",
            pts.len()
        )));
    }
    let tau_max = pts.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let tau_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    // Use the decade [d, 10 d] closest to the singularity that still holds
    // at least 5 samples; fall back to the whole series when sampling is too
    // sparse for any single decade.
    let mut chosen: Option<Vec<(f64, f64)>> = None;
    let mut k = 1i32;
    loop {
        let hi = tau_max * 10f64.powi(1 - k);
        let lo = tau_max * 10f64.powi(-k);
        if hi < tau_min {
            break;
        }
        let decade: Vec<(f64, f64)> = pts
            .iter()
            .copied()
            .filter(|(tau, _)| *tau >= lo && *tau <= hi)
            .collect();
        if decade.len() >= 5 {
            chosen = Some(decade);
        }
        k += 1;
        if k > 60 {
            break;
        }
    }
    let sel = chosen.unwrap_or_else(|| pts.clone());
    let xs: Vec<f64> = sel.iter().map(|(tau, _)| tau.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|(tau, k)| (k * tau.sqrt()).ln()).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| {
        Error::InsufficientData("degenerate scale axis in singularity fit".into())
    })?;
    let kind = if fit.slope >= -0.1 {
        SingularityType::TypeI
    } else {
        SingularityType::TypeII
    };
    Ok(SingularityClassification {
        kind,
        slope: fit.slope,
        points: sel.len(),
    })
}

#[derive(Debug, Clone)]
pub struct RescaledFrame {
    /// Rescaled time z = -log sqrt(t_ext - t).
    pub z: f64,
    pub t: f64,
    pub curve: Curve,
}

#[derive(Debug)]
pub struct Type1Rescaling {
    pub frames: Vec<RescaledFrame>,
    /// Max over frames and nodes of the rescaled distance to the center.
    pub sup_radius: f64,
    /// L2(ds) norm of kappa + <gamma, nu> per frame; zero exactly on the
    /// shrinking circle soliton.
    pub shrinker_residuals: Vec<f64>,
}

/// Parabolic (Type I) rescaling about a fixed center and extinction time:
/// gamma -> (gamma - center) / sqrt(2 (t_ext - t)). The shrinking circle of
/// extinction time t_ext maps to the static unit circle.
pub fn rescale_type1(samples: &[CurveSample], center: Vec2, t_ext: f64) -> Type1Rescaling {
    let mut frames = Vec::new();
    let mut residuals = Vec::new();
    let mut sup_radius = 0.0f64;
    for s in samples {
        let tau = t_ext - s.t;
        if tau <= 0.0 {
            continue;
        }
        let scale = 1.0 / (2.0 * tau).sqrt();
        let pts: Vec<Vec2> = s.curve.points().iter().map(|p| (*p - center) * scale).collect();
        let period = s.curve.period().map(|p| p * scale);
        let curve = Curve::raw(pts, period);
        for p in curve.points() {
            sup_radius = sup_radius.max(p.norm());
        }
        let f = curve.frenet();
        let mut acc = 0.0;
        for i in 0..curve.n() {
            let res = f.curvature[i] + curve.points()[i].dot(f.normal[i]);
            acc += res * res * f.dual_length[i];
        }
        residuals.push(acc.sqrt());
        frames.push(RescaledFrame {
            z: -tau.sqrt().ln(),
            t: s.t,
            curve,
        });
    }
    Type1Rescaling {
        frames,
        sup_radius,
        shrinker_residuals: residuals,
    }
}

#[derive(Debug)]
pub struct Type2Rescaling {
    /// (rescaled time, rescaled curve); times end at 0 for the final frame.
    pub frames: Vec<(f64, Curve)>,
    /// Curvature scale: max |kappa| of the final sample.
    pub k: f64,
    pub base_point: Vec2,
    /// Sup bound of the forcing seen by the rescaled flow: ||g|| / k.
    pub forcing_sup_rescaled: f64,
}

/// Curvature-normalized (Type II) rescaling about the final sample's
/// curvature peak: gamma -> k (gamma - base), t -> k^2 (t - t_final). The
/// final frame has max |kappa| = 1 and the forcing bound shrinks by 1/k.
pub fn rescale_type2(samples: &[CurveSample], field: &Forcing) -> Result<Type2Rescaling> {
    let last = samples.last().ok_or_else(|| {
        Error::InsufficientData("type II rescaling needs at least one sample".into())
    })?;
    let f = last.curve.frenet();
    let (mut i_star, mut kmax) = (0usize, 0.0f64);
    for (i, k) in f.curvature.iter().enumerate() {
        if k.abs() > kmax {
            kmax = k.abs();
            i_star = i;
        }
    }
    if kmax <= 0.0 {
        return Err(Error::InsufficientData(
            "final sample has no curvature peak to rescale about".into(),
        ));
    }
    let base = last.curve.points()[i_star];
    let frames = samples
        .iter()
        .map(|s| {
            let pts: Vec<Vec2> = s.curve.points().iter().map(|p| (*p - base) * kmax).collect();
            let period = s.curve.period().map(|p| p * kmax);
            (kmax * kmax * (s.t - last.t), Curve::raw(pts, period))
        })
        .collect();
    Ok(Type2Rescaling {
        frames,
        k: kmax,
        base_point: base,
        forcing_sup_rescaled: field.sup_norm() / kmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_wrapping_shifts_by_the_period() {
        let pts: Vec<Vec2> = (0..8).map(|i| Vec2::new(i as f64 / 8.0, 0.0)).collect();
        let c = Curve::periodic(pts, Vec2::new(1.0, 0.25)).unwrap();
        assert_eq!(c.node(8), Vec2::new(1.0, 0.25));
        assert_eq!(c.node(-1), Vec2::new(7.0 / 8.0 - 1.0, -0.25));
    }

    #[test]
    fn config_validation_catches_bad_steps() {
        let mut cfg = CurveSolverConfig::to_time(1.0, 0.1);
        cfg.time_step = TimeStep::Cfl(0.75);
        assert!(cfg.validate().is_err());
        cfg.time_step = TimeStep::Fixed(0.0);
        assert!(cfg.validate().is_err());
        cfg.time_step = TimeStep::Fixed(1e-3);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn resample_preserves_node_count_and_start() {
        let c = Curve::circle(Vec2::ZERO, 1.0, 64);
        let r = resample_uniform(&c, 48);
        assert_eq!(r.n(), 48);
        assert!(r.points()[0].dist(c.points()[0]) < 1e-14);
    }
}
