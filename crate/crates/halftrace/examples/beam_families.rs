//! Fourth-order beam spectra on a truncated box with zero potential. The far
//! end is clamped by truncation, so each left-end family reproduces the
//! classical beam frequencies: (root/X)⁴ for roots of the matching
//! transcendental equation.

use halftrace::piecewise::PiecewisePoly;
use halftrace::spectral_solver::{assemble, OperatorModel};

/// Bisection root of f on [lo, hi] with a sign change.
fn root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
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

fn main() -> halftrace::Result<()> {
    let x = 1.0f64;
    let cases: [(&str, Vec<usize>, Vec<f64>); 4] = [
        ("clamped", vec![0, 1], {
            let f = |t: f64| t.cos() * t.cosh() - 1.0;
            vec![root(f, 4.0, 5.5), root(f, 7.0, 8.5), root(f, 10.5, 11.5)]
        }),
        ("free", vec![2, 3], {
            let f = |t: f64| t.cos() * t.cosh() + 1.0;
            vec![root(f, 1.5, 2.5), root(f, 4.0, 5.5), root(f, 7.0, 8.5)]
        }),
        ("hinged", vec![0, 2], {
            let f = |t: f64| t.tan() - t.tanh();
            vec![root(f, 3.8, 4.0), root(f, 7.0, 7.1)]
        }),
        ("sliding", vec![1, 3], {
            let f = |t: f64| t.tan() + t.tanh();
            vec![root(f, 2.0, 2.5), root(f, 5.4, 5.6)]
        }),
    ];

    for (name, degrees, roots) in cases {
        let model =
            OperatorModel::new(2, degrees, x, 1200, PiecewisePoly::zero(), Vec::new())?;
        let disc = assemble(&model)?;
        let (lams, _) = disc.solve_lowest(roots.len(), 11)?;
        println!("{name} end (right end clamped by truncation):");
        for (lam, t) in lams.iter().zip(&roots) {
            let exact = (t / x).powi(4);
            println!("  computed {lam:<14.4} beam value {exact:<14.4} rel {:.2e}", (lam - exact).abs() / exact);
        }
    }
    Ok(())
}
