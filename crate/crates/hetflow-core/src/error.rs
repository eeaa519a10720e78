use thiserror::Error;

/// Error taxonomy shared by the solvers and the averaging operations.
///
/// Solver blowup is *not* an error when it happens inside a full solve (the
/// run terminates with a recorded reason); the `Blowup`/`GradientBlowup`
/// variants are produced by single-step entry points and by solves that
/// cannot even take their first step.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A curve failed validation (too few nodes, wrong orientation,
    /// degenerate segments, non-finite coordinates).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// A forcing field failed validation (unsorted breakpoints, bad
    /// mollification width, ...).
    #[error("invalid forcing: {0}")]
    InvalidForcing(String),

    /// A solver or operation configuration failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Curvature exceeded the configured trigger or a segment collapsed.
    #[error("curvature blowup at t = {t}: max |kappa| = {max_kappa}")]
    Blowup { t: f64, max_kappa: f64 },

    /// Graph gradient exceeded the configured cap.
    #[error("gradient blowup at t = {t}: max |u_x| = {max_slope}")]
    GradientBlowup { t: f64, max_slope: f64 },

    /// An adaptive quadrature failed to reach its tolerance.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// The line average grazes zero (dips below the guard band without a
    /// sign change), so pinned/unpinned cannot be decided reliably.
    #[error("ambiguous pinning: min |G| = {min_abs} without sign change")]
    AmbiguousPinning { min_abs: f64 },

    /// Successive mollified solutions stopped contracting.
    #[error("mollified solutions are not a Cauchy sequence: distances {distances:?}")]
    NotCauchy { distances: Vec<f64> },

    /// A least-squares fit had too little structure to trust.
    #[error("degenerate fit: r^2 = {r_squared}")]
    FitDegenerate { r_squared: f64 },

    /// Not enough samples in the window an analysis needs.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
