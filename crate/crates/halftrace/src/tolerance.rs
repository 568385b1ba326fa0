//! Shared comparison tolerances.
//!
//! Exact-algebra checks (matrix identities, closed-form traces) compare with a
//! mixed absolute/relative test so unit-scale and large-κ quantities are
//! treated uniformly. Experiment-specific tolerances stay with the experiments.

use num_complex::Complex64;

/// Absolute floor for mixed comparisons.
pub const ATOL: f64 = 1e-12;
/// Relative factor for mixed comparisons.
pub const RTOL: f64 = 1e-9;

/// |a − b| ≤ ATOL + RTOL·max(|a|, |b|).
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ATOL + RTOL * a.abs().max(b.abs())
}

/// Mixed comparison for complex values, on the modulus of the difference.
pub fn close_c(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= ATOL + RTOL * a.norm().max(b.norm())
}

/// max |a_ij − b_ij| over two equally-shaped complex matrices stored row-major.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
