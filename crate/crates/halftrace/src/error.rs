//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed problem data: degrees out of range, duplicate degrees, m = 0, ...
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A matrix that must be invertible is numerically singular.
    #[error("degenerate system: {0}")]
    Degenerate(String),

    /// The boundary matrix ℬ(ζ) was singular at a probe point of the growth scan.
    #[error("singular boundary matrix at sample ζ = {zeta}: |det| = {abs_det:.3e}")]
    SingularSample { zeta: String, abs_det: f64 },

    /// A resolvent evaluation landed too close to a zero of Δ.
    #[error("evaluation point too close to the spectrum: |Δ| = {abs_delta:.3e} (scale {scale:.3e})")]
    NearSpectrum { abs_delta: f64, scale: f64 },

    /// Adaptive quadrature exhausted its subdivision depth.
    #[error("quadrature failed to converge on [{lo}, {hi}]: est. error {err:.3e} > tol {tol:.3e}")]
    Quadrature { lo: f64, hi: f64, err: f64, tol: f64 },

    /// The ε-ladder of damped integrals did not settle under extrapolation.
    #[error("damping ladder diverged: successive extrapolants differ by {spread:.3e} (tol {tol:.3e})")]
    LadderDiverged { spread: f64, tol: f64 },

    /// Inverse iteration failed to produce an eigenvector.
    #[error("eigenvector iteration failed to converge for eigenvalue index {index}")]
    EigenNonConvergence { index: usize },

    /// The requested eigenvalue range extends beyond the trusted part of the grid spectrum.
    #[error("untrusted spectrum: {0}")]
    UntrustedSpectrum(String),

    /// Boundary family outside the discretization registry.
    #[error("unsupported boundary conditions: {0}")]
    UnsupportedBoundary(String),

    /// Too few samples or terms for the requested reduction.
    #[error("too few samples: {0}")]
    TooFewSamples(String),

    /// NaN or infinity where a finite number is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Config file rejected, with the offending 1-based line.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the CLI: 2 for configuration and usage
    /// problems, 3 for numerical non-convergence or degeneracy. Tolerance
    /// failures exit 1 without an `Error`.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec(_)
            | Error::UnsupportedBoundary(_)
            | Error::Config { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
