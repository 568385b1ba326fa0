//! End-to-end second-order trace check for −D² + x² under both end
//! conditions: the regularized sum Σ[μₙ − λₙ − (cₙ/π)∫q] is extrapolated and
//! compared against −ψ(0+)(1/4 − κ/2), by direct eigenvalue differences and
//! by the first-order route through the base eigenfunctions.

use halftrace::piecewise::{Piece, PiecewisePoly};
use halftrace::spectral_solver::{assemble, perturbed_model, OperatorModel, TrustPolicy};
use halftrace::trace_experiment::{
    default_nmax, ingest_perturbation, regularized_partial_sums, trace_via_spectral_function,
};

fn main() -> halftrace::Result<()> {
    let x2 = PiecewisePoly::new(vec![Piece {
        lo: 0.0,
        hi: f64::INFINITY,
        coeffs: vec![0.0, 0.0, 1.0],
    }])?;
    // q = (1 − x)² on [0, 1]: q(0+) = 1, ∫q = 1/3.
    let q = PiecewisePoly::new(vec![Piece { lo: 0.0, hi: 1.0, coeffs: vec![1.0, -2.0, 1.0] }])?;
    let pert = ingest_perturbation(q)?;

    for k in [0usize, 1] {
        let model = OperatorModel::new(1, vec![k], 10.0, 2500, x2.clone(), Vec::new())?;
        let disc = assemble(&model)?;
        let disc_q = assemble(&perturbed_model(&model, &pert.q)?)?;
        let lams = disc.solve_trusted(TrustPolicy::PairResolution, 3)?;
        let mus = disc_q.solve_trusted(TrustPolicy::PairResolution, 3)?;
        let nmax = default_nmax(&lams, &mus);

        let direct =
            regularized_partial_sums(&lams, &mus, &pert, model.m, &model.degrees, nmax)?;
        let ladder = lams.eigenvalues[..nmax].to_vec();
        let first_order =
            trace_via_spectral_function(&lams, &disc, &pert, &model.degrees, &ladder)?;

        println!("K = {{{k}}}: {} trusted pairs, {nmax} summed", lams.trusted.min(mus.trusted));
        for report in [&direct, &first_order] {
            println!(
                "  {:?}: extrapolated {:+.4} target {:+.4} (rel {:.3}, converged {})",
                report.route, report.extrapolated, report.rhs, report.rel_error, report.converged
            );
        }
    }
    Ok(())
}
