//! Piecewise-polynomial functions on [0, ∞).
//!
//! Potentials and perturbations are given as polynomial pieces in the global
//! coordinate; outside every piece the function is zero. The last piece may
//! extend to infinity (confining potentials like x²); exact integrals are
//! only defined when the support is bounded.

use crate::error::{Error, Result};

/// One polynomial piece: Σ_j coeffs\[j\]·x^j on \[lo, hi).
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl PiecewisePoly {
    /// Validate and sort the pieces: each on \[lo, hi) with 0 ≤ lo < hi,
    /// pairwise disjoint; only the function's value is zero between pieces.
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            if !p.lo.is_finite() || p.lo < 0.0 {
                return Err(Error::InvalidSpec(format!("piece lower end must be finite and ≥ 0, got {}", p.lo)));
            }
            if !(p.hi > p.lo) {
                return Err(Error::InvalidSpec(format!("piece [{}, {}) is empty or reversed", p.lo, p.hi)));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("piece coefficients".into()));
            }
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::InvalidSpec(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(Self { pieces })
    }

    pub fn zero() -> Self {
        Self { pieces: Vec::new() }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, x: f64) -> f64 {
        for p in &self.pieces {
            if x >= p.lo && x < p.hi {
                return p.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
            }
        }
        0.0
    }

    /// Right limit at 0: the value of the piece whose interval starts at 0.
    pub fn value_at_zero_plus(&self) -> f64 {
        self.eval(0.0)
    }

    /// Supremum of the support; 0.0 when identically zero, ∞ when the last
    /// contributing piece is unbounded.
    pub fn support_end(&self) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.coeffs.iter().any(|&c| c != 0.0))
            .map(|p| p.hi)
            .fold(0.0, f64::max)
    }

    /// Pointwise sum, refined over the union of both breakpoint sets.
    pub fn add(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
            let mut coeffs = Vec::new();
            for src in [self, other] {
                if let Some(p) = src.pieces.iter().find(|p| mid >= p.lo && mid < p.hi) {
                    if coeffs.len() < p.coeffs.len() {
                        coeffs.resize(p.coeffs.len(), 0.0);
                    }
                    for (acc, &c) in coeffs.iter_mut().zip(&p.coeffs) {
                        *acc += c;
                    }
                }
            }
            if coeffs.iter().any(|&c| c != 0.0) {
                pieces.push(Piece { lo, hi, coeffs });
            }
        }
        PiecewisePoly::new(pieces)
    }

    /// Exact ∫₀^∞; fails when a piece with nonzero coefficients is unbounded.
    pub fn integral(&self) -> Result<f64> {
        let mut acc = 0.0;
        for p in &self.pieces {
            let nonzero = p.coeffs.iter().any(|&c| c != 0.0);
            if !nonzero {
                continue;
            }
            if !p.hi.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "integral over unbounded piece starting at {}",
                    p.lo
                )));
            }
            for (j, &c) in p.coeffs.iter().enumerate() {
                let k = (j + 1) as f64;
                acc += c * (p.hi.powi(j as i32 + 1) - p.lo.powi(j as i32 + 1)) / k;
            }
        }
        Ok(acc)
    }
}
