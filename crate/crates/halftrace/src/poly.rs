//! Dense complex polynomials with evaluation–interpolation support.
//!
//! Characteristic determinants are polynomials in ζ of degree ≤ κ. They are
//! recovered from point evaluations on a circle |ζ| = R: with n ≥ deg+1
//! equispaced samples the coefficients are an inverse DFT,
//! a_d = R^{−d}/n · Σ_t v_t ω^{−td}. Sampling on a circle of radius > 1 keeps
//! the high-degree coefficients well conditioned.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial Σ_d coeffs\[d\] ζ^d (ascending order).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    pub coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// Coefficient of ζ^d; zero beyond the stored length.
    pub fn coeff(&self, d: usize) -> Complex64 {
        self.coeffs.get(d).copied().unwrap_or(Complex64::ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::ZERO, |acc, &c| acc * z + c)
    }

    /// Largest magnitude among the coefficients (0 for the empty polynomial).
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree relative to the dominant coefficient: the largest d with
    /// |a_d| > rel_tol · max|a|. `None` when every coefficient is below the cut.
    pub fn degree_with_tol(&self, rel_tol: f64) -> Option<usize> {
        let cut = rel_tol * self.max_coeff_norm();
        self.coeffs.iter().rposition(|c| c.norm() > cut)
    }

    /// Recover a polynomial of degree < `values.len()` from its samples at
    /// ζ_t = radius·e^{2πit/n}, t = 0..n.
    pub fn interpolate_on_circle(radius: f64, values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::TooFewSamples("circle interpolation needs ≥ 1 node".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("circle interpolation samples".into()));
        }
        let mut coeffs = Vec::with_capacity(n);
        let mut r_pow = 1.0;
        for d in 0..n {
            let mut acc = Complex64::ZERO;
            for (t, &v) in values.iter().enumerate() {
                // ω^{−td} with ω = e^{2πi/n}
                let ang = -2.0 * std::f64::consts::PI * (t as f64) * (d as f64) / (n as f64);
                acc += v * Complex64::from_polar(1.0, ang);
            }
            coeffs.push(acc / (n as f64 * r_pow));
            r_pow *= radius;
        }
        Ok(Self { coeffs })
    }

    /// The n sample points used by [`interpolate_on_circle`](Self::interpolate_on_circle).
    pub fn circle_nodes(radius: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|t| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * t as f64 / n as f64))
            .collect()
    }
}
