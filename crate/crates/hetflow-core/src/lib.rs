//! Numerical laboratory for curvature-driven motion of planar curves with a
//! bounded, periodically heterogeneous forcing term.
//!
//! The flow moves a curve with normal velocity `v = (kappa + g) nu`, where
//! `kappa` is the curvature, `nu` the inward unit normal, and `g` a bounded
//! forcing field that is 1-periodic in both plane coordinates. The crate
//! provides:
//!
//! * [`forcing`]: forcing fields (analytic families, x-dependent piecewise
//!   constants, mollifications) and their line/torus averages;
//! * [`curve`]: closed-polyline curves, Frenet data, and the explicit
//!   parametric solver with blowup detection and rescaling utilities;
//! * [`graph`]: the graph formulation `u_t = u_xx/(1+u_x^2) + g sqrt(1+u_x^2)`
//!   with periodic-plus-offset boundary data, weak-solution machinery for
//!   merely bounded forcings, and comparison checks;
//! * [`diagnostics`]: per-sample records (length, curvature norms,
//!   embeddedness ratio, Gaussian densities) and identity residuals;
//! * [`homog`]: effective front speeds of the oscillatory cell problem,
//!   wave-speed measurement, and the small-period sweep toward the
//!   homogenized limit.
//!
//! Everything is f64 and deterministic: the same inputs produce bit-identical
//! outputs, independent of thread count.

pub mod curve;
pub mod diagnostics;
mod error;
pub mod forcing;
pub mod geom;
pub mod graph;
pub mod homog;
pub mod util;

pub use error::Error;
pub use geom::Vec2;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
