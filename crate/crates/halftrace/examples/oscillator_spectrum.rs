//! Assembles the half-line oscillator −D² + x² under both end conditions and
//! compares the grid spectrum with the exact ladders 4n−1 (Dirichlet) and
//! 4n−3 (Neumann), plus the counting estimate behind the trust window.

use halftrace::piecewise::{Piece, PiecewisePoly};
use halftrace::spectral_solver::{
    assemble, weyl_count_estimate, OperatorModel, TrustPolicy,
};

fn main() -> halftrace::Result<()> {
    let x2 = PiecewisePoly::new(vec![Piece {
        lo: 0.0,
        hi: f64::INFINITY,
        coeffs: vec![0.0, 0.0, 1.0],
    }])?;
    for (k, name, offset) in [(0usize, "Dirichlet", 3.0), (1, "Neumann", 1.0)] {
        let model = OperatorModel::new(1, vec![k], 12.0, 2000, x2.clone(), Vec::new())?;
        let disc = assemble(&model)?;
        let result = disc.solve_trusted(TrustPolicy::HalfLine, 7)?;

        println!("{name}: {} eigenvalues trusted", result.trusted);
        println!("  n   computed     exact      rel err");
        for n in [1usize, 2, 3, 10, 20] {
            let Some(&lam) = result.eigenvalues.get(n - 1) else { break };
            let exact = 4.0 * n as f64 + offset - 4.0;
            println!("  {n:<3} {lam:<12.6} {exact:<9} {:.2e}", (lam - exact).abs() / exact);
        }
        let top = result.eigenvalues[result.trusted - 1];
        let estimate = weyl_count_estimate(&model, top);
        println!("  counting estimate at the trust ceiling: {estimate:.1} vs {}", result.trusted);
    }
    Ok(())
}
