//! Shared numeric helpers: periodic quadrature, smooth bumps, least squares.

use crate::{Error, Result};

/// Wrap to the fundamental period [0, 1).
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    // x.floor() == x for negative-zero style edge cases can leave w == 1.0
    // after rounding of x - floor(x) when x is a tiny negative number.
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Mean of `f` over one period [0, len] of a periodic function, by the
/// periodic trapezoid rule with grid doubling until two successive levels
/// agree to `tol`. The starting resolution `n0` should already resolve the
/// integrand's finest features; doubling then confirms convergence.
pub fn periodic_mean_adaptive(
    f: impl Fn(f64) -> f64,
    len: f64,
    n0: usize,
    tol: f64,
) -> Result<f64> {
    const MAX_N: usize = 1 << 22;
    let mut n = n0.next_power_of_two().max(64);
    let mut prev = periodic_mean_fixed(&f, len, n);
    while n < MAX_N {
        n *= 2;
        let cur = periodic_mean_fixed(&f, len, n);
        if (cur - prev).abs() <= tol * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure(format!(
        "periodic mean did not settle to {tol:.1e} within {MAX_N} points"
    )))
}

/// Periodic trapezoid rule at fixed resolution: the plain sample mean.
pub fn periodic_mean_fixed(f: impl Fn(f64) -> f64, len: f64, n: usize) -> f64 {
    let h = len / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += f(i as f64 * h);
    }
    acc / n as f64
}

/// Mean of `f` over the unit torus, tensor trapezoid with grid doubling.
pub fn torus_mean_adaptive(f: impl Fn(f64, f64) -> f64, n0: usize, tol: f64) -> Result<f64> {
    const MAX_N: usize = 1 << 12;
    let mean_at = |n: usize| {
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = i as f64 * h;
            for j in 0..n {
                acc += f(x, j as f64 * h);
            }
        }
        acc / (n * n) as f64
    };
    let mut n = n0.next_power_of_two().max(32);
    let mut prev = mean_at(n);
    while n < MAX_N {
        n *= 2;
        let cur = mean_at(n);
        if (cur - prev).abs() <= tol * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure(format!(
        "torus mean did not settle to {tol:.1e} within {MAX_N}^2 points"
    )))
}

/// C-infinity bump on (-1, 1): exp(-1/(1-r^2)), zero outside. All
/// derivatives vanish at the endpoints, so composite quadrature across the
/// support converges superalgebraically.
pub fn bump_sym(r: f64) -> f64 {
    if r.abs() < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// C-infinity bump on (0, 1) with peak value 1 at s = 1/2:
/// exp(4 - 1/(s(1-s))). Used as the compactly supported time factor of
/// weak-form test functions.
pub fn bump01(s: f64) -> f64 {
    if s > 0.0 && s < 1.0 {
        (4.0 - 1.0 / (s * (1.0 - s))).exp()
    } else {
        0.0
    }
}

/// Derivative of [`bump01`]: the chain rule on the exponent gives
/// bump01(s) (1 - 2s) / (s (1 - s))^2, zero outside (0, 1).
pub fn bump01_deriv(s: f64) -> f64 {
    if s > 0.0 && s < 1.0 {
        let q = s * (1.0 - s);
        bump01(s) * (1.0 - 2.0 * s) / (q * q)
    } else {
        0.0
    }
}

/// Tabulated antiderivative of the normalized symmetric bump.
///
/// `eval(r)` returns the mass of the normalized bump on (-1, r], increasing
/// from 0 to 1. Lookups use linear interpolation of a dense monotone table,
/// so interpolated values stay monotone and inside [0, 1]; convex
/// combinations built from differences of these values can never overshoot
/// the data they average.
pub struct BumpCdf {
    table: Vec<f64>,
}

impl BumpCdf {
    /// Resolution of the CDF table. 1 << 16 intervals puts the linear
    /// interpolation error near 1e-10, far below every consumer tolerance.
    const INTERVALS: usize = 1 << 16;

    pub fn new() -> Self {
        let n = Self::INTERVALS;
        let h = 2.0 / n as f64;
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = -1.0 + i as f64 * h;
            // Per-interval Simpson; the integrand is C-infinity with all
            // derivatives vanishing at the support ends.
            let s = (bump_sym(a) + 4.0 * bump_sym(a + 0.5 * h) + bump_sym(a + h)) * (h / 6.0);
            acc += s;
            table.push(acc);
        }
        let total = acc;
        for v in &mut table {
            *v /= total;
        }
        BumpCdf { table }
    }

    /// Process-wide table, built on first use. The CDF is a fixed function,
    /// so every caller can share one instance.
    pub fn shared() -> &'static BumpCdf {
        static SHARED: std::sync::OnceLock<BumpCdf> = std::sync::OnceLock::new();
        SHARED.get_or_init(BumpCdf::new)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= -1.0 {
            return 0.0;
        }
        if r >= 1.0 {
            return 1.0;
        }
        let pos = (r + 1.0) * 0.5 * Self::INTERVALS as f64;
        let i = (pos as usize).min(Self::INTERVALS - 1);
        let frac = pos - i as f64;
        self.table[i] + (self.table[i + 1] - self.table[i]) * frac
    }
}

impl Default for BumpCdf {
    fn default() -> Self {
        Self::new()
    }
}

/// Ordinary least squares for y against x.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit a line through (x, y) samples. `None` if fewer than two samples or
/// the x values carry no variance.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // Residual sum of squares; for syy == 0 the horizontal line is exact.
    let r_squared = if syy > 0.0 {
        let ss_res = syy - slope * sxy;
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Deterministic parallel map: applies `f` to every item on up to `jobs`
/// worker threads and returns results in input order. `jobs <= 1` runs
/// inline.
pub fn parallel_map<T, R, F>(jobs: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let n = items.len();
    let work: Vec<std::sync::Mutex<Option<T>>> =
        items.into_iter().map(|t| std::sync::Mutex::new(Some(t))).collect();
    let slots: Vec<std::sync::Mutex<Option<R>>> = (0..n).map(|_| std::sync::Mutex::new(None)).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let item = work[i].lock().unwrap().take().unwrap();
                let r = f(item);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_unit_stays_in_range() {
        for &x in &[-3.7, -1.0, -1e-17, 0.0, 0.3, 1.0, 7.25] {
            let w = wrap_unit(x);
            assert!((0.0..1.0).contains(&w), "wrap_unit({x}) = {w}");
        }
        assert_eq!(wrap_unit(2.5), 0.5);
    }

    #[test]
    fn periodic_mean_is_spectral_on_trig() {
        let mean = periodic_mean_adaptive(|x| 2.0 + (2.0 * std::f64::consts::PI * x).sin(), 1.0, 64, 1e-13)
            .unwrap();
        assert!((mean - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bump_cdf_is_monotone_normalized() {
        let cdf = BumpCdf::new();
        assert_eq!(cdf.eval(-1.0), 0.0);
        assert_eq!(cdf.eval(1.0), 1.0);
        assert!((cdf.eval(0.0) - 0.5).abs() < 1e-12, "bump is even");
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = cdf.eval(-1.0 + 2.0 * i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.25 * x - 0.7).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 3.25).abs() < 1e-12);
        assert!((fit.intercept + 0.7).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn parallel_map_preserves_order() {
        let out = parallel_map(4, (0..100).collect::<Vec<_>>(), |i| i * i);
        let expect: Vec<_> = (0..100).map(|i| i * i).collect();
        assert_eq!(out, expect);
    }
}
