//! Scalar diagnostics for curve evolutions: integral norms of curvature,
//! the chord-arc ratio, Gaussian densities of the parabolic rescaling with
//! their growth bounds, local mass bounds, the embedded lifespan bound, and
//! discrete residuals of the pointwise evolution identities.

use crate::curve::{embeddedness_ratio, Curve, CurveSample};
use crate::forcing::Forcing;
use crate::geom::Vec2;
use crate::{Error, Result};
use std::f64::consts::{PI, SQRT_2};

/// Blowup point and time around which Gaussian densities are centred.
#[derive(Debug, Clone, Copy)]
pub struct GaussianFocus {
    pub center: Vec2,
    /// (Estimated) extinction time; densities are evaluated at tau = t_ext - t.
    pub t_ext: f64,
}

/// Scalar snapshot of a curve at one time.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub length: f64,
    /// Signed enclosed area; absent for periodic (non-closed) curves.
    pub area: Option<f64>,
    pub kappa_max: f64,
    /// Integral of kappa^2 ds.
    pub kappa_sq_integral: f64,
    /// Integral of |kappa| ds.
    pub kappa_abs_integral: f64,
    /// Chord-arc embeddedness ratio; absent for periodic curves.
    pub eta: Option<f64>,
    /// Gaussian density centred at the focus, when one is set and t < t_ext.
    pub gaussian_density: Option<f64>,
    /// sqrt(2 pi) times the density: the e^{-|p|^2/2}-weighted length of the
    /// curve rescaled by sqrt(2 tau) about the focus.
    pub rescaled_density: Option<f64>,
    pub sup_g: f64,
}

/// Build the full scalar record for one sample.
pub fn record(t: f64, curve: &Curve, field: &Forcing, focus: Option<&GaussianFocus>) -> DiagnosticsRecord {
    let f = curve.frenet();
    let mut kappa_sq = 0.0;
    let mut kappa_abs = 0.0;
    for i in 0..curve.n() {
        let k = f.curvature[i];
        kappa_sq += k * k * f.dual_length[i];
        kappa_abs += k.abs() * f.dual_length[i];
    }
    let eta = if curve.is_closed() {
        embeddedness_ratio(curve).ok().map(|e| e.eta)
    } else {
        None
    };
    let density = focus.and_then(|fc| {
        let tau = fc.t_ext - t;
        if tau > 0.0 {
            Some(gaussian_density(curve, fc.center, tau))
        } else {
            None
        }
    });
    DiagnosticsRecord {
        t,
        length: curve.length(),
        area: curve.signed_area(),
        kappa_max: f.max_abs_curvature(),
        kappa_sq_integral: kappa_sq,
        kappa_abs_integral: kappa_abs,
        eta,
        gaussian_density: density,
        rescaled_density: density.map(|d| (2.0 * PI).sqrt() * d),
        sup_g: field.sup_norm(),
    }
}

/// Gaussian density of the curve at backward time tau > 0:
/// the integral of e^{-|p - center|^2 / 4 tau} / sqrt(4 pi tau) ds.
pub fn gaussian_density(curve: &Curve, center: Vec2, tau: f64) -> f64 {
    assert!(tau > 0.0, "gaussian density needs tau > 0, got {tau}");
    let f = curve.frenet();
    let norm = 1.0 / (4.0 * PI * tau).sqrt();
    let mut total = 0.0;
    for i in 0..curve.n() {
        let d2 = curve.points()[i].dist(center).powi(2);
        total += (-d2 / (4.0 * tau)).exp() * f.dual_length[i];
    }
    total * norm
}

/// Arclength of the curve rescaled by sqrt(2 tau) about the center that lies
/// inside the ball of the given radius. Bounded by e^{radius^2/2} times the
/// rescaled weighted length sqrt(2 pi) * density.
pub fn local_rescaled_mass(curve: &Curve, center: Vec2, tau: f64, radius: f64) -> f64 {
    assert!(tau > 0.0, "rescaled mass needs tau > 0, got {tau}");
    let f = curve.frenet();
    let scale = 1.0 / (2.0 * tau).sqrt();
    let mut total = 0.0;
    for i in 0..curve.n() {
        if curve.points()[i].dist(center) * scale <= radius {
            total += f.dual_length[i] * scale;
        }
    }
    total
}

/// One point of the density-versus-rescaled-time series.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DensityEntry {
    pub t: f64,
    pub tau: f64,
    /// Rescaled time z = -log sqrt(tau).
    pub z: f64,
    pub density: f64,
    /// F(z) = sqrt(2 pi) * density.
    pub rescaled: f64,
}

/// Density series of a run together with the worst violations of the growth
/// bounds. Both slacks are relative; any value <= 0 means the bound held.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DensityReport {
    pub entries: Vec<DensityEntry>,
    /// Worst over consecutive samples of F(z2)/(F(z1) e^{sup_g^2 (tau1-tau2)/4}) - 1,
    /// the discrete form of F'(z) <= (sup_g^2/2) e^{-2z} F(z). With sup_g = 0
    /// this is plain monotonicity.
    pub worst_step_slack: f64,
    /// Worst over the series of F(z)/(F(z_first) e^{sup_g^2 tau_first/4}) - 1.
    pub worst_integrated_slack: f64,
}

/// Evaluate the density along a run and check the growth bounds against the
/// given forcing sup norm. Samples at or past the focus time are dropped;
/// at least two must remain.
pub fn density_report(
    samples: &[CurveSample],
    focus: &GaussianFocus,
    sup_g: f64,
) -> Result<DensityReport> {
    let mut entries = Vec::new();
    for s in samples {
        let tau = focus.t_ext - s.t;
        if tau <= 0.0 {
            continue;
        }
        let density = gaussian_density(&s.curve, focus.center, tau);
        entries.push(DensityEntry {
            t: s.t,
            tau,
            z: -tau.sqrt().ln(),
            density,
            rescaled: (2.0 * PI).sqrt() * density,
        });
    }
    if entries.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "density series needs at least 2 samples before t_ext, got {}",
            entries.len()
        )));
    }
    let tau0 = entries[0].tau;
    let f0 = entries[0].rescaled;
    let integrated_cap = f0 * (sup_g * sup_g * tau0 / 4.0).exp();
    let mut worst_step = f64::NEG_INFINITY;
    let mut worst_integrated = f64::NEG_INFINITY;
    for k in 0..entries.len() {
        worst_integrated = worst_integrated.max(entries[k].rescaled / integrated_cap - 1.0);
        if k > 0 {
            let a = &entries[k - 1];
            let b = &entries[k];
            let factor = (sup_g * sup_g * (a.tau - b.tau) / 4.0).exp();
            worst_step = worst_step.max(b.rescaled / (a.rescaled * factor) - 1.0);
        }
    }
    Ok(DensityReport {
        entries,
        worst_step_slack: worst_step,
        worst_integrated_slack: worst_integrated,
    })
}

/// Lower bound on the time an embedded curve stays embedded, from the
/// initial chord-arc ratio and the forcing sup norm:
/// 2 eta^2 / ((1 + 4 sqrt2/pi)^2 sup_g^2) with eta capped at sqrt2/2.
pub fn embedded_lifespan_bound(eta0: f64, sup_g: f64) -> f64 {
    let eta = eta0.min(SQRT_2 / 2.0);
    if sup_g == 0.0 {
        return f64::INFINITY;
    }
    2.0 * eta * eta / ((1.0 + 4.0 * SQRT_2 / PI).powi(2) * sup_g * sup_g)
}

fn check_pair(a: &CurveSample, b: &CurveSample) -> Result<f64> {
    if a.curve.n() != b.curve.n() {
        return Err(Error::InsufficientData(format!(
            "identity residual needs matching grids, got {} and {}",
            a.curve.n(),
            b.curve.n()
        )));
    }
    let h = b.t - a.t;
    if !(h > 0.0) {
        return Err(Error::InsufficientData(format!(
            "identity residual needs increasing times, got {} then {}",
            a.t, b.t
        )));
    }
    Ok(h)
}

/// Max-norm residual of the curvature evolution identity
/// kappa_t = (kappa+g)_ss + kappa^2 (kappa+g) between two samples of one
/// run, with kappa_t as the forward difference over the pair. First order
/// in the sample spacing on resolved curves.
pub fn curvature_identity_residual(
    a: &CurveSample,
    b: &CurveSample,
    field: &Forcing,
) -> Result<f64> {
    let h = check_pair(a, b)?;
    let n = a.curve.n();
    let dx = 1.0 / n as f64;
    let fa = a.curve.frenet();
    let fb = b.curve.frenet();
    // kappa + g at each node and at the periodic neighbours; g is evaluated
    // at the actual neighbour positions so that winding offsets of periodic
    // curves do not enter through the forcing.
    let fval = |i: isize| {
        let k = fa.curvature[i.rem_euclid(n as isize) as usize];
        let p = a.curve.node(i);
        k + field.eval(p.x, p.y)
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        let ii = i as isize;
        let fm = fval(ii - 1);
        let f0 = fval(ii);
        let fp = fval(ii + 1);
        let m = fa.metric[i];
        let m_x = (fa.metric[(i + 1) % n] - fa.metric[(i + n - 1) % n]) / (2.0 * dx);
        let f_xx = (fp + fm - 2.0 * f0) / (dx * dx);
        let f_x = (fp - fm) / (2.0 * dx);
        let f_ss = f_xx / (m * m) - f_x * m_x / (m * m * m);
        let k = fa.curvature[i];
        let rhs = f_ss + k * k * f0;
        let lhs = (fb.curvature[i] - fa.curvature[i]) / h;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Max-norm residual of the metric evolution identity
/// (log m)_t = -kappa (kappa + g) between two samples of one run.
pub fn metric_identity_residual(a: &CurveSample, b: &CurveSample, field: &Forcing) -> Result<f64> {
    let h = check_pair(a, b)?;
    let fa = a.curve.frenet();
    let fb = b.curve.frenet();
    let mut worst = 0.0f64;
    for i in 0..a.curve.n() {
        let p = a.curve.points()[i];
        let k = fa.curvature[i];
        let rhs = -k * (k + field.eval(p.x, p.y));
        let lhs = (fb.metric[i].ln() - fa.metric[i].ln()) / h;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
