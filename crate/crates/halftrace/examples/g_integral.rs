//! Damped evaluation of the oscillatory boundary-layer integral ∫₀^∞ g(y)dy
//! for each registered family. The ε ladder shows the Abel regularization
//! converging onto −(πi/m)·Sp(ℙ𝔹), with rung errors shrinking monotonically.

use halftrace::bc_algebra::{build_frame, BoundarySpec, CharacteristicData};
use halftrace::green_kernel::{g_integral, DEFAULT_EPS_LADDER};
use halftrace::spectral_solver::REGISTRY;

fn main() -> halftrace::Result<()> {
    for &(m, degrees, name) in REGISTRY {
        let spec = BoundarySpec::one_term(m, degrees)?;
        let frame = build_frame(m, degrees)?;
        let data = CharacteristicData::build(&spec, &frame)?;
        let report = g_integral(&data, &DEFAULT_EPS_LADDER, 1e-2)?;

        println!("m = {m}, K = {degrees:?} ({name}):");
        for ((eps, value), err) in report.ladder.iter().zip(report.rung_errors()) {
            println!("  eps = {eps:<6} integral = {value:+.6}  |err| = {err:.3e}");
        }
        let rel = (report.extrapolated - report.closed).norm() / report.closed.norm().max(1e-12);
        println!("  extrapolated {:+.8}  target {:+.8}  rel {rel:.2e}", report.extrapolated, report.closed);
    }
    Ok(())
}
