//! Abel summation of the divergent alternating series Σ(−1)ⁿ(𝔹φₙ, φₙ):
//! partial values S(ρ) at a ladder of radii, extrapolated to ρ → 1, land on
//! the closed trace m(2m−1)/2 − κ.

use halftrace::bc_algebra::{abel_trace_pb, build_frame};

fn main() -> halftrace::Result<()> {
    let rhos = [0.9, 0.99, 0.999];
    for (m, degrees) in [
        (1usize, vec![0usize]),
        (1, vec![1]),
        (2, vec![0, 1]),
        (2, vec![0, 2]),
        (2, vec![1, 3]),
        (3, vec![0, 1, 2]),
        (3, vec![3, 4, 5]),
    ] {
        let frame = build_frame(m, &degrees)?;
        let report = abel_trace_pb(&frame, &degrees, &rhos)?;
        print!("m = {m}, K = {degrees:?}: ");
        for &(rho, s) in &report.partials {
            print!("S({rho}) = {s:+.6}  ");
        }
        println!("-> {:+.8} (closed {:+.1})", report.extrapolated, report.closed);
        assert!((report.extrapolated - report.closed).abs() < 1e-4);
    }
    Ok(())
}
