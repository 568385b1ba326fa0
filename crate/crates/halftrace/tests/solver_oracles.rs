//! Discrete spectra against independent references: the half-line oscillator
//! arithmetic progressions, transcendental beam frequencies found by
//! bisection, the h² convergence order, and the counting-function estimate.

use halftrace::piecewise::{Piece, PiecewisePoly};
use halftrace::spectral_solver::{
    assemble, weyl_count_estimate, OperatorModel, TrustPolicy,
};

fn x_squared() -> PiecewisePoly {
    PiecewisePoly::new(vec![Piece { lo: 0.0, hi: f64::INFINITY, coeffs: vec![0.0, 0.0, 1.0] }])
        .unwrap()
}

/// Half-line oscillator with condition y(0) = 0 keeps the odd Hermite levels
/// 4n − 1; with y'(0) = 0 the even ones 4n − 3.
#[test]
fn oscillator_levels_match_arithmetic_progression() {
    for (k, shift) in [(0usize, 1.0f64), (1, 3.0)] {
        let model = OperatorModel::new(1, vec![k], 12.0, 4000, x_squared(), Vec::new()).unwrap();
        let result = assemble(&model)
            .unwrap()
            .solve_trusted(TrustPolicy::HalfLine, 7)
            .unwrap();
        assert!(result.trusted >= 8, "K={{{k}}}: only {} trusted modes", result.trusted);
        for n in 1..=result.trusted {
            let exact = 4.0 * n as f64 - shift;
            let rel = (result.eigenvalues[n - 1] - exact).abs() / exact;
            assert!(rel <= 1e-4, "K={{{k}}} n={n}: rel error {rel:.2e}");
        }
    }
}

/// Bisection root of a bracketed monotone sign change.
fn root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0, "bracket [{lo}, {hi}] does not straddle a root");
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Uniform beam frequencies on [0, 1]: λ = t⁴ with t a root of the family's
/// transcendental equation. The far-end truncation is first order in h, so
/// the tolerance sits at 2h/X with margin.
#[test]
fn beam_frequencies_match_transcendental_roots() {
    type Fam = (&'static str, [usize; 2], fn(f64) -> f64, &'static [(f64, f64)]);
    let families: [Fam; 4] = [
        ("clamped", [0, 1], |t| t.cos() * t.cosh() - 1.0, &[(4.0, 5.5), (7.0, 8.5), (10.5, 11.5)]),
        ("free", [2, 3], |t| t.cos() * t.cosh() + 1.0, &[(1.5, 2.5), (4.0, 5.5), (7.0, 8.5)]),
        ("hinged", [0, 2], |t| t.tan() - t.tanh(), &[(3.8, 4.0), (7.0, 7.1)]),
        ("sliding", [1, 3], |t| t.tan() + t.tanh(), &[(2.0, 2.5), (5.4, 5.6)]),
    ];
    for (name, degrees, eq, brackets) in families {
        let model =
            OperatorModel::new(2, degrees.to_vec(), 1.0, 1200, PiecewisePoly::zero(), Vec::new())
                .unwrap();
        let (eigenvalues, _) = assemble(&model).unwrap().solve_lowest(brackets.len(), 7).unwrap();
        for (i, &(lo, hi)) in brackets.iter().enumerate() {
            let exact = root(eq, lo, hi).powi(4);
            let rel = (eigenvalues[i] - exact).abs() / exact;
            assert!(rel <= 5e-3, "{name} mode {}: rel error {rel:.2e}", i + 1);
        }
    }
}

/// Eigenvalue error drops by ~4x per grid doubling.
#[test]
fn grid_doubling_shows_second_order_convergence() {
    let mut errors = Vec::new();
    for n in [500usize, 1000, 2000] {
        let model = OperatorModel::new(1, vec![0], 12.0, n, x_squared(), Vec::new()).unwrap();
        let (lams, _) = assemble(&model).unwrap().solve_lowest(1, 7).unwrap();
        errors.push((lams[0] - 3.0).abs());
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((3.5..=4.5).contains(&ratio), "convergence ratio {ratio:.3} outside [3.5, 4.5]");
    }
}

/// The phase-space counting estimate matches the computed count below a level
/// well inside the trusted window.
#[test]
fn counting_estimate_matches_spectrum() {
    let model = OperatorModel::new(1, vec![0], 12.0, 4000, x_squared(), Vec::new()).unwrap();
    let result = assemble(&model)
        .unwrap()
        .solve_trusted(TrustPolicy::PairResolution, 7)
        .unwrap();
    let level = 100.0;
    let estimate = weyl_count_estimate(&model, level);
    let actual = result
        .eigenvalues
        .iter()
        .take(result.trusted)
        .filter(|&&lam| lam <= level)
        .count() as f64;
    assert!(
        (estimate - actual).abs() <= 2.0,
        "estimate {estimate:.1} vs computed count {actual}"
    );
}
