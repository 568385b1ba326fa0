//! The kernel diagonal H₀(x, x, ζ^{2m}) for m = 1 Dirichlet against the
//! textbook half-line resolvent, then the decay of the finite-λ boundary
//! layer toward its frozen-ratio limit for higher-order families.

use halftrace::bc_algebra::{build_frame, BoundarySpec, CharacteristicData};
use halftrace::green_kernel::{boundary_layer_diag, h0_diag};
use halftrace::poly::ComplexPoly;
use num_complex::Complex64;

fn main() -> halftrace::Result<()> {
    // m = 1, K = {0}: H0(x, x) = (i/2ζ)(1 − e^{2ixζ}).
    let spec = BoundarySpec::one_term(1, &[0])?;
    let frame = build_frame(1, &[0])?;
    let data = CharacteristicData::build(&spec, &frame)?;
    println!("m = 1 Dirichlet diagonal vs closed form:");
    for (x, r, theta) in [(0.3, 2.0, 0.7), (1.0, 5.0, 1.2), (2.5, 11.0, 2.4)] {
        let zeta = Complex64::from_polar(r, theta);
        let computed = h0_diag(&data, x, zeta)?;
        let closed = Complex64::I / (2.0 * zeta)
            * (Complex64::ONE - (2.0 * Complex64::I * x * zeta).exp());
        let rel = (computed - closed).norm() / closed.norm();
        println!("  x = {x}, zeta = {r}e^{{{theta}i}}: {computed:+.6}  rel {rel:.2e}");
        assert!(rel < 1e-10);
    }

    // Exact-vs-limit boundary layer at x = 1, mid-sector, growing lambda.
    // One-term conditions make the ratios exactly homogeneous, so their
    // difference sits at roundoff; a lower-order tail inside a higher-degree
    // condition survives the determinant and makes the decay visible.
    println!("\nboundary layer, exact minus frozen-ratio limit at x = 1:");
    let mixed = BoundarySpec::new(
        2,
        vec![
            ComplexPoly::new(vec![Complex64::ONE]),
            ComplexPoly::new(vec![Complex64::ZERO, Complex64::ONE, Complex64::ONE]),
        ],
    )?;
    let one_term = BoundarySpec::one_term(2, &[0, 1])?;
    for (label, spec) in [("one-term {1, D}", one_term), ("mixed {1, D^2+D}", mixed)] {
        let frame = build_frame(2, &spec.degrees())?;
        let data = CharacteristicData::build(&spec, &frame)?;
        print!("  {label}:");
        for lambda in [1e2f64, 1e3, 1e4] {
            let r = lambda.powf(0.25);
            let zeta = Complex64::from_polar(r, 0.25 * std::f64::consts::PI);
            let exact = boundary_layer_diag(&data, 1.0, zeta, false)?;
            let limit = boundary_layer_diag(&data, 1.0, zeta, true)?;
            print!("  {:.3e}", (exact - limit).norm());
        }
        println!();
    }
    Ok(())
}
