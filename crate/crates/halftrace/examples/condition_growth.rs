//! Scans ‖row r of ℬ(ζ)^{−1}‖·|ζ|^{k_r} along rays in the sector for growing
//! |ζ|. Bounded rows mean the frozen-ratio replacement of Δ_{αβ}/Δ is valid
//! for the family; a general multi-term spec is scanned for contrast.

use halftrace::bc_algebra::{build_frame, check_condition_a, BoundarySpec};
use halftrace::poly::ComplexPoly;
use num_complex::Complex64;

fn main() -> halftrace::Result<()> {
    let radii = [1.0, 4.0, 16.0, 64.0, 256.0];
    for (m, degrees) in
        [(1usize, vec![0usize]), (2, vec![0, 1]), (2, vec![1, 3]), (3, vec![3, 4, 5])]
    {
        let spec = BoundarySpec::one_term(m, &degrees)?;
        let frame = build_frame(m, &degrees)?;
        let report = check_condition_a(&spec, &frame, &radii, 24)?;
        println!(
            "m = {m}, K = {degrees:?}: bounded = {}, min |det B| = {:.3e}",
            report.bounded, report.min_abs_det
        );
        for (rho, worst) in report.radii.iter().zip(&report.normalized) {
            let cells: Vec<String> = worst.iter().map(|w| format!("{w:9.4}")).collect();
            println!("  |zeta| = {rho:>6}: {}", cells.join(" "));
        }
    }

    // y'(0) + y(0) = 0 alongside plain Dirichlet-type rows still satisfies
    // the growth bound; the lower-order tail is invisible at large |zeta|.
    let mixed = BoundarySpec::new(
        2,
        vec![
            ComplexPoly::new(vec![Complex64::ONE]),
            ComplexPoly::new(vec![Complex64::ONE, Complex64::ONE]),
        ],
    )?;
    let frame = build_frame(2, &mixed.degrees())?;
    let report = check_condition_a(&mixed, &frame, &radii, 24)?;
    println!("mixed spec {{1, D+1}}: bounded = {}", report.bounded);
    Ok(())
}
