//! Heterogeneous forcing fields g(x, y) on the unit torus.
//!
//! Three kinds of field share one interface: closure-backed smooth fields
//! with known sup norms, piecewise-constant profiles in x with exact
//! breakpoint bookkeeping, and mollified versions of either. Averages along
//! rational and irrational lines feed the effective-speed computations; the
//! mollifier is built so that sup norms contract exactly, not just up to
//! quadrature error.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::util::{
    bump_sym, periodic_mean_adaptive, torus_mean_adaptive, wrap_unit, BumpCdf,
};
use crate::{Error, Result};

/// Relative tolerance for adaptive quadrature of field averages.
pub(crate) const QUAD_TOL: f64 = 1e-11;

/// Slope of a line y = alpha x + s, tagged by arithmetic type. Rational
/// slopes are kept as reduced integer pairs so the exact line period (the
/// denominator) survives; an irrational tag requests torus equidistribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Rational { num: i64, den: i64 },
    Irrational(f64),
}

impl Slope {
    /// Reduced rational slope with positive denominator.
    pub fn rational(num: i64, den: i64) -> Result<Slope> {
        if den == 0 {
            return Err(Error::InvalidConfig("slope denominator is zero".into()));
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Ok(Slope::Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn irrational(alpha: f64) -> Slope {
        Slope::Irrational(alpha)
    }

    pub fn value(&self) -> f64 {
        match *self {
            Slope::Rational { num, den } => num as f64 / den as f64,
            Slope::Irrational(a) => a,
        }
    }
}

/// Direction vector for normal-line averages. A lattice direction is reduced
/// so the transverse line closes after one lattice period; an irrational
/// direction again requests the torus mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Lattice { x: i64, y: i64 },
    Irrational { x: f64, y: f64 },
}

impl Direction {
    pub fn lattice(x: i64, y: i64) -> Result<Direction> {
        if x == 0 && y == 0 {
            return Err(Error::InvalidConfig("direction vector is zero".into()));
        }
        let g = gcd(x.unsigned_abs(), y.unsigned_abs()) as i64;
        Ok(Direction::Lattice { x: x / g, y: y / g })
    }

    pub fn irrational(x: f64, y: f64) -> Direction {
        Direction::Irrational { x, y }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

#[derive(Clone)]
struct SmoothField {
    label: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// Exact sup norm when the family provides one.
    sup: Option<f64>,
    /// Lazily sampled sup bound for closure fields without an exact value.
    sampled_sup: Arc<OnceLock<f64>>,
    grad_sup: Option<f64>,
    hess_sup: Option<f64>,
    exact_mean: Option<f64>,
    x_dep: bool,
    y_dep: bool,
    /// Smallest length scale on which the field varies, in cell units.
    /// Quadrature starting resolutions are chosen against this.
    feature: f64,
}

#[derive(Clone)]
struct PiecewiseConstant {
    /// 0 = b_0 < b_1 < ... < b_m = 1; value v_i holds on [b_i, b_{i+1}).
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    fn eval(&self, x: f64) -> f64 {
        let xw = wrap_unit(x);
        let i = self.breaks[1..self.breaks.len() - 1].partition_point(|b| *b <= xw);
        self.values[i]
    }

    fn mean(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.values.len() {
            acc += self.values[i] * (self.breaks[i + 1] - self.breaks[i]);
        }
        acc
    }

    fn min_piece(&self) -> f64 {
        self.breaks
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone)]
struct MollifiedField {
    base: Arc<Forcing>,
    delta: f64,
}

#[derive(Clone)]
enum Kind {
    Smooth(SmoothField),
    Piecewise(PiecewiseConstant),
    Mollified(MollifiedField),
}

/// A 1-periodic forcing field on the plane.
///
/// All constructors produce fields with period 1 in each coordinate they
/// depend on; `eval` accepts arbitrary real arguments.
#[derive(Clone)]
pub struct Forcing {
    kind: Kind,
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Forcing({})", self.label())
    }
}

impl Forcing {
    /// The constant field g = c.
    pub fn constant(c: f64) -> Forcing {
        Forcing {
            kind: Kind::Smooth(SmoothField {
                label: format!("const({c})"),
                f: Arc::new(move |_, _| c),
                sup: Some(c.abs()),
                sampled_sup: Arc::new(OnceLock::new()),
                grad_sup: Some(0.0),
                hess_sup: Some(0.0),
                exact_mean: Some(c),
                x_dep: false,
                y_dep: false,
                feature: 1.0,
            }),
        }
    }

    /// g = a sin(2 pi x).
    pub fn sin_x(amplitude: f64) -> Forcing {
        let tau = std::f64::consts::TAU;
        Forcing {
            kind: Kind::Smooth(SmoothField {
                label: format!("{amplitude} sin(2 pi x)"),
                f: Arc::new(move |x, _| amplitude * (tau * x).sin()),
                sup: Some(amplitude.abs()),
                sampled_sup: Arc::new(OnceLock::new()),
                grad_sup: Some(tau * amplitude.abs()),
                hess_sup: Some(tau * tau * amplitude.abs()),
                exact_mean: Some(0.0),
                x_dep: true,
                y_dep: false,
                feature: 1.0,
            }),
        }
    }

    /// g = a sin(2 pi y).
    pub fn sin_y(amplitude: f64) -> Forcing {
        let tau = std::f64::consts::TAU;
        Forcing {
            kind: Kind::Smooth(SmoothField {
                label: format!("{amplitude} sin(2 pi y)"),
                f: Arc::new(move |_, y| amplitude * (tau * y).sin()),
                sup: Some(amplitude.abs()),
                sampled_sup: Arc::new(OnceLock::new()),
                grad_sup: Some(tau * amplitude.abs()),
                hess_sup: Some(tau * tau * amplitude.abs()),
                exact_mean: Some(0.0),
                x_dep: false,
                y_dep: true,
                feature: 1.0,
            }),
        }
    }

    /// g = c + a sin(2 pi y), the workhorse field for pinning studies: its
    /// line averages switch branches at rational versus irrational slopes.
    pub fn offset_sin(offset: f64, amplitude: f64) -> Forcing {
        let tau = std::f64::consts::TAU;
        Forcing {
            kind: Kind::Smooth(SmoothField {
                label: format!("{offset} + {amplitude} sin(2 pi y)"),
                f: Arc::new(move |_, y| offset + amplitude * (tau * y).sin()),
                sup: Some(offset.abs() + amplitude.abs()),
                sampled_sup: Arc::new(OnceLock::new()),
                grad_sup: Some(tau * amplitude.abs()),
                hess_sup: Some(tau * tau * amplitude.abs()),
                exact_mean: Some(offset),
                x_dep: false,
                y_dep: true,
                feature: 1.0,
            }),
        }
    }

    /// g = a sin(2 pi x) cos(2 pi y), a genuinely two-dimensional field with
    /// zero mean. The gradient norm peaks where one factor is 1 and the
    /// other's derivative is 1, giving sup |grad g| = 2 pi |a|; the Hessian
    /// eigenvalues are -(2 pi)^2 a (S +/- C), bounded by (2 pi)^2 |a|.
    pub fn product(amplitude: f64) -> Forcing {
        let tau = std::f64::consts::TAU;
        Forcing {
            kind: Kind::Smooth(SmoothField {
                label: format!("{amplitude} sin(2 pi x) cos(2 pi y)"),
                f: Arc::new(move |x, y| amplitude * (tau * x).sin() * (tau * y).cos()),
                sup: Some(amplitude.abs()),
                sampled_sup: Arc::new(OnceLock::new()),
                grad_sup: Some(tau * amplitude.abs()),
                hess_sup: Some(tau * tau * amplitude.abs()),
                exact_mean: Some(0.0),
                x_dep: true,
                y_dep: true,
                feature: 1.0,
            }),
        }
    }

    /// Piecewise-constant profile in x: value `values[i]` on
    /// [breaks[i], breaks[i+1]), right-continuous, independent of y.
    pub fn piecewise(breaks: Vec<f64>, values: Vec<f64>) -> Result<Forcing> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(Error::InvalidForcing(format!(
                "piecewise profile needs m+1 breakpoints for m values, got {} and {}",
                breaks.len(),
                values.len()
            )));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::InvalidForcing(
                "piecewise breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidForcing(
                "piecewise breakpoints must be strictly increasing".into(),
            ));
        }
        if breaks.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidForcing(
                "piecewise breakpoints and values must be finite".into(),
            ));
        }
        Ok(Forcing {
            kind: Kind::Piecewise(PiecewiseConstant { breaks, values }),
        })
    }

    /// Wrap a user closure. The closure must be 1-periodic in each coordinate
    /// it is declared to depend on; the declaration (`depends_x`,
    /// `depends_y`) routes averaging shortcuts, so an inaccurate one gives
    /// wrong line averages rather than a crash.
    pub fn from_fn(
        label: &str,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        depends_x: bool,
        depends_y: bool,
    ) -> Forcing {
        Forcing {
            kind: Kind::Smooth(SmoothField {
                label: label.to_string(),
                f: Arc::new(f),
                sup: None,
                sampled_sup: Arc::new(OnceLock::new()),
                grad_sup: None,
                hess_sup: None,
                exact_mean: None,
                x_dep: depends_x,
                y_dep: depends_y,
                feature: 1.0,
            }),
        }
    }

    /// The field g(m x, m y): the same cell pattern repeated m times per unit
    /// length, as seen by a solver working at cell size 1/m in macro
    /// coordinates. Piecewise profiles stay piecewise with exact breakpoints.
    pub fn rescaled_cell(&self, m: u32) -> Forcing {
        assert!(m >= 1, "cell refinement factor must be at least 1");
        let mf = m as f64;
        match &self.kind {
            Kind::Piecewise(pw) => {
                let mut breaks = Vec::with_capacity(pw.values.len() * m as usize + 1);
                let mut values = Vec::with_capacity(pw.values.len() * m as usize);
                for k in 0..m {
                    for i in 0..pw.values.len() {
                        breaks.push((pw.breaks[i] + k as f64) / mf);
                        values.push(pw.values[i]);
                    }
                }
                breaks.push(1.0);
                Forcing {
                    kind: Kind::Piecewise(PiecewiseConstant { breaks, values }),
                }
            }
            Kind::Smooth(sf) => {
                let f = sf.f.clone();
                Forcing {
                    kind: Kind::Smooth(SmoothField {
                        label: format!("{} @ 1/{m}", sf.label),
                        f: Arc::new(move |x, y| f(mf * x, mf * y)),
                        sup: sf.sup,
                        sampled_sup: Arc::new(OnceLock::new()),
                        grad_sup: sf.grad_sup.map(|g| g * mf),
                        hess_sup: sf.hess_sup.map(|h| h * mf * mf),
                        exact_mean: sf.exact_mean,
                        x_dep: sf.x_dep,
                        y_dep: sf.y_dep,
                        feature: sf.feature / mf,
                    }),
                }
            }
            Kind::Mollified(_) => {
                let base = self.clone();
                let deps = (self.depends_on_x(), self.depends_on_y());
                let feature = self.feature_scale() / mf;
                let mean = self.mean().ok();
                Forcing {
                    kind: Kind::Smooth(SmoothField {
                        label: format!("{} @ 1/{m}", self.label()),
                        f: Arc::new(move |x, y| base.eval(mf * x, mf * y)),
                        sup: Some(self.sup_norm()),
                        sampled_sup: Arc::new(OnceLock::new()),
                        grad_sup: None,
                        hess_sup: None,
                        exact_mean: mean,
                        x_dep: deps.0,
                        y_dep: deps.1,
                        feature,
                    }),
                }
            }
        }
    }

    /// Convolve with the normalized compact bump of support width `delta`.
    ///
    /// The result evaluates as a convex combination of base values, so
    /// `sup` can only contract and the torus mean is preserved. Piecewise
    /// profiles use exact per-piece mollifier masses from the tabulated bump
    /// antiderivative; smooth fields use normalized composite quadrature.
    pub fn mollify(&self, delta: f64) -> Result<Forcing> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::InvalidForcing(format!(
                "mollifier width must lie in (0, 0.5], got {delta}"
            )));
        }
        Ok(Forcing {
            kind: Kind::Mollified(MollifiedField {
                base: Arc::new(self.clone()),
                delta,
            }),
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            Kind::Smooth(sf) => (sf.f)(x, y),
            Kind::Piecewise(pw) => pw.eval(x),
            Kind::Mollified(mf) => mollified_eval(mf, x, y),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Smooth(sf) => sf.label.clone(),
            Kind::Piecewise(pw) => format!("piecewise[{}]", pw.values.len()),
            Kind::Mollified(mf) => format!("mollify({}, {})", mf.base.label(), mf.delta),
        }
    }

    pub fn depends_on_x(&self) -> bool {
        match &self.kind {
            Kind::Smooth(sf) => sf.x_dep,
            Kind::Piecewise(_) => true,
            Kind::Mollified(mf) => mf.base.depends_on_x(),
        }
    }

    pub fn depends_on_y(&self) -> bool {
        match &self.kind {
            Kind::Smooth(sf) => sf.y_dep,
            Kind::Piecewise(_) => false,
            Kind::Mollified(mf) => mf.base.depends_on_y(),
        }
    }

    /// Upper bound on |g|, exact for the named families and piecewise
    /// profiles. Mollification reports the base bound, which remains valid
    /// because convolution with a unit-mass kernel contracts sups.
    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            Kind::Smooth(sf) => sf.sup.unwrap_or_else(|| {
                *sf.sampled_sup
                    .get_or_init(|| sampled_sup(&sf.f, sf.x_dep, sf.y_dep))
            }),
            Kind::Piecewise(pw) => pw.values.iter().fold(0.0, |m, v| m.max(v.abs())),
            Kind::Mollified(mf) => mf.base.sup_norm(),
        }
    }

    /// Sup of |grad g| when known. Mollification inherits the base bound
    /// (convolution contracts derivative sups as well).
    pub fn gradient_sup(&self) -> Option<f64> {
        match &self.kind {
            Kind::Smooth(sf) => sf.grad_sup,
            Kind::Piecewise(_) => None,
            Kind::Mollified(mf) => mf.base.gradient_sup(),
        }
    }

    /// Sup of the Hessian operator norm when known.
    pub fn hessian_sup(&self) -> Option<f64> {
        match &self.kind {
            Kind::Smooth(sf) => sf.hess_sup,
            Kind::Piecewise(_) => None,
            Kind::Mollified(mf) => mf.base.hessian_sup(),
        }
    }

    /// Torus mean of the field. Exact for the named families and piecewise
    /// profiles; adaptive quadrature otherwise. Mollification preserves the
    /// mean identically, so the base value is returned.
    pub fn mean(&self) -> Result<f64> {
        match &self.kind {
            Kind::Smooth(sf) => {
                if let Some(m) = sf.exact_mean {
                    return Ok(m);
                }
                let n0 = quad_points(1.0, sf.feature);
                if sf.x_dep && sf.y_dep {
                    torus_mean_adaptive(|x, y| (sf.f)(x, y), n0, QUAD_TOL)
                } else if sf.x_dep {
                    periodic_mean_adaptive(|x| (sf.f)(x, 0.0), 1.0, n0, QUAD_TOL)
                } else if sf.y_dep {
                    periodic_mean_adaptive(|y| (sf.f)(0.0, y), 1.0, n0, QUAD_TOL)
                } else {
                    Ok((sf.f)(0.0, 0.0))
                }
            }
            Kind::Piecewise(pw) => Ok(pw.mean()),
            Kind::Mollified(mf) => mf.base.mean(),
        }
    }

    /// Smallest length scale of variation, used to seed quadrature grids.
    pub fn feature_scale(&self) -> f64 {
        match &self.kind {
            Kind::Smooth(sf) => sf.feature,
            Kind::Piecewise(pw) => pw.min_piece(),
            Kind::Mollified(mf) => mf.base.feature_scale().min(0.5 * mf.delta),
        }
    }

    /// Average of g along the line y = alpha x + s.
    ///
    /// A rational slope q/r gives a closed line of x-period r; the average is
    /// computed over exactly that period. An irrational slope equidistributes
    /// and returns the torus mean regardless of s.
    pub fn slope_average(&self, slope: Slope, s: f64) -> Result<f64> {
        match slope {
            Slope::Irrational(_) => self.mean(),
            Slope::Rational { num, den } => {
                if !self.depends_on_y() {
                    // The line sweeps x uniformly over full periods, so any
                    // non-vertical slope sees the plain x-average.
                    return self.mean();
                }
                if num == 0 && !self.depends_on_x() {
                    return Ok(self.eval(0.0, s));
                }
                let alpha = num as f64 / den as f64;
                let len = den as f64;
                let n0 = quad_points(len + num.abs() as f64, self.feature_scale());
                periodic_mean_adaptive(|x| self.eval(x, alpha * x + s), len, n0, QUAD_TOL)
            }
        }
    }

    /// Average of g along the line through s * p/|p| perpendicular to p.
    ///
    /// For a reduced lattice direction p the transverse line closes after
    /// length |p|; an irrational direction returns the torus mean.
    pub fn normal_average(&self, dir: Direction, s: f64) -> Result<f64> {
        match dir {
            Direction::Irrational { .. } => self.mean(),
            Direction::Lattice { x: p1, y: p2 } => {
                if !self.depends_on_y() {
                    if p2 == 0 {
                        // Transverse line is vertical: x frozen at s * p1.
                        return Ok(self.eval(p1 as f64 * s, 0.0));
                    }
                    // Any tilt sweeps x over full periods: exact mean.
                    return self.mean();
                }
                let len = ((p1 * p1 + p2 * p2) as f64).sqrt();
                let (bx, by) = (s * p1 as f64 / len, s * p2 as f64 / len);
                let (dx, dy) = (-(p2 as f64) / len, p1 as f64 / len);
                let n0 = quad_points(
                    len + (p1.abs() + p2.abs()) as f64,
                    self.feature_scale(),
                );
                periodic_mean_adaptive(
                    |t| self.eval(bx + t * dx, by + t * dy),
                    len,
                    n0,
                    QUAD_TOL,
                )
            }
        }
    }
}

/// Starting grid size for an adaptive mean over length `len` with features of
/// size `feature`: 32 points per feature, clamped to a sane range.
fn quad_points(len: f64, feature: f64) -> usize {
    let f = feature.max(1e-6);
    ((32.0 * len / f).ceil() as usize).clamp(64, 1 << 20)
}

/// Dense-sampling sup bound for closure fields: 2^16 points per active axis,
/// or a 512 x 512 grid for genuinely two-dimensional fields.
fn sampled_sup(f: &Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>, x_dep: bool, y_dep: bool) -> f64 {
    if x_dep && y_dep {
        let n = 512;
        let mut sup: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                sup = sup.max(f(i as f64 / n as f64, j as f64 / n as f64).abs());
            }
        }
        sup
    } else if x_dep || y_dep {
        let n = 1 << 16;
        let mut sup: f64 = 0.0;
        for i in 0..n {
            let t = i as f64 / n as f64;
            let (x, y) = if x_dep { (t, 0.0) } else { (0.0, t) };
            sup = sup.max(f(x, y).abs());
        }
        sup
    } else {
        f(0.0, 0.0).abs()
    }
}

fn mollified_eval(mf: &MollifiedField, x: f64, y: f64) -> f64 {
    match &mf.base.kind {
        Kind::Piecewise(pw) => mollified_piecewise_eval(pw, mf.delta, x),
        _ => {
            let xd = mf.base.depends_on_x();
            let yd = mf.base.depends_on_y();
            if xd && yd {
                mollified_tensor_eval(&mf.base, mf.delta, x, y)
            } else {
                mollified_line_eval(&mf.base, mf.delta, x, y, xd || !yd)
            }
        }
    }
}

/// Exact mollification of a piecewise profile: each piece contributes its
/// value times the mollifier mass over the piece, read off the tabulated bump
/// antiderivative. The weights telescope to exactly 1 and are nonnegative,
/// so the value is a true convex combination of piece values.
fn mollified_piecewise_eval(pw: &PiecewiseConstant, delta: f64, x: f64) -> f64 {
    let cdf = BumpCdf::shared();
    let r = 0.5 * delta;
    let xw = wrap_unit(x);
    let mut acc = 0.0;
    for k in -1i64..=1 {
        let shift = k as f64;
        for i in 0..pw.values.len() {
            let lo = pw.breaks[i] + shift;
            let hi = pw.breaks[i + 1] + shift;
            if hi <= xw - r || lo >= xw + r {
                continue;
            }
            let w = cdf.eval((xw - lo) / r) - cdf.eval((xw - hi) / r);
            acc += pw.values[i] * w;
        }
    }
    acc
}

/// One-dimensional mollification by normalized composite Simpson quadrature
/// across the bump support. Normalizing by the discrete weight sum makes the
/// result a convex combination of base values whatever the quadrature error:
/// constants are reproduced exactly and sups can only contract.
fn mollified_line_eval(base: &Forcing, delta: f64, x: f64, y: f64, along_x: bool) -> f64 {
    const NODES: usize = 129;
    let r = 0.5 * delta;
    let h = 2.0 * r / (NODES - 1) as f64;
    let mut wsum = 0.0;
    let mut acc = 0.0;
    for j in 0..NODES {
        let t = -r + j as f64 * h;
        let simpson = if j == 0 || j == NODES - 1 {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let w = simpson * bump_sym(t / r);
        let v = if along_x {
            base.eval(x - t, y)
        } else {
            base.eval(x, y - t)
        };
        wsum += w;
        acc += w * v;
    }
    acc / wsum
}

/// Two-dimensional mollification on a normalized tensor Simpson grid.
fn mollified_tensor_eval(base: &Forcing, delta: f64, x: f64, y: f64) -> f64 {
    const NODES: usize = 65;
    let r = 0.5 * delta;
    let h = 2.0 * r / (NODES - 1) as f64;
    let simpson = |j: usize| {
        if j == 0 || j == NODES - 1 {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut wsum = 0.0;
    let mut acc = 0.0;
    for j in 0..NODES {
        let t = -r + j as f64 * h;
        let wj = simpson(j) * bump_sym(t / r);
        if wj == 0.0 {
            continue;
        }
        for k in 0..NODES {
            let u = -r + k as f64 * h;
            let w = wj * simpson(k) * bump_sym(u / r);
            wsum += w;
            acc += w * base.eval(x - t, y - u);
        }
    }
    acc / wsum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_mollifier_weights_telescope_exactly() {
        // A two-piece profile with equal values is constant; the convex
        // combination must reproduce it to the last bit.
        let g = Forcing::piecewise(vec![0.0, 0.37, 1.0], vec![2.0, 2.0]).unwrap();
        let m = g.mollify(0.2).unwrap();
        for i in 0..101 {
            let x = i as f64 / 101.0;
            assert_eq!(m.eval(x, 0.0), 2.0, "weight sum drifted at x = {x}");
        }
    }

    #[test]
    fn mollified_piecewise_midpoint_between_values() {
        // Centered on a jump, the mollified value is the arithmetic mean of
        // the two sides by symmetry of the bump.
        let g = Forcing::piecewise(vec![0.0, 0.5, 1.0], vec![0.0, 1.0]).unwrap();
        let m = g.mollify(0.1).unwrap();
        assert!((m.eval(0.5, 0.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn gcd_reduction() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(7, 0), 7);
        assert_eq!(gcd(0, 0), 1);
    }

    #[test]
    fn rescaled_piecewise_has_m_copies() {
        let g = Forcing::piecewise(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        let fine = g.rescaled_cell(3);
        match &fine.kind {
            Kind::Piecewise(pw) => {
                assert_eq!(pw.values.len(), 6);
                assert_eq!(*pw.breaks.last().unwrap(), 1.0);
            }
            _ => panic!("rescaled piecewise field lost its exact breakpoints"),
        }
    }
}
