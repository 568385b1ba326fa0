//! Verification workbench for regularized first-trace identities of
//! self-adjoint operators `(−1)^m D^{2m} + Σ p_k D^k` on the half-line.
//!
//! The crate has three layers:
//!
//! * **Boundary-condition algebra** ([`bc_algebra`]): characteristic
//!   determinants Δ(ζ), their minors, the limit matrix 𝔹, the pairing
//!   matrix ℙ, and the trace identity Sp(ℙ𝔹) = m(2m−1)/2 − κ, all for
//!   normalized conditions `P_j(D)y(0) = 0` with distinct degrees k_j.
//! * **Resolvent-kernel analysis** ([`green_kernel`]): the diagonal of the
//!   unperturbed Green function, the Weyl arc integral λ^{1/2m}/π, and the
//!   damped boundary-layer integral ∫₀^∞ g(y) dy.
//! * **Spectral experiments** ([`spectral_solver`], [`trace_experiment`]):
//!   finite-difference discretizations of the operator and its rank-preserving
//!   perturbation, eigenvalue extraction, and the regularized sum
//!   Σ (μ_n − λ_n − c_n/π ∫q) compared against the closed form
//!   −ψ(0+)(m/2 − 1/4 − κ/2m).
//!
//! Numerical support (polynomials, adaptive quadrature, Richardson/Neville
//! extrapolation, piecewise-polynomial coefficients) lives in the small
//! utility modules. The `halftrace` binary wraps the experiment drivers in
//! [`runner`] behind `identities`, `green`, `trace`, and `report`.

pub mod bc_algebra;
pub mod config;
pub mod error;
pub mod extrapolate;
pub mod green_kernel;
pub mod piecewise;
pub mod poly;
pub mod quadrature;
pub mod runner;
pub mod spectral_solver;
pub mod tolerance;
pub mod trace_experiment;

pub use error::{Error, Result};
