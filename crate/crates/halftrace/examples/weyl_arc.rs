//! The free resolvent diagonal integrated over the spectral arc |τ| = λ
//! reproduces the Weyl counting scale λ^{1/2m}/π for every order.

use halftrace::green_kernel::{weyl_arc_integral, weyl_arc_value};

fn main() -> halftrace::Result<()> {
    println!("{:<3} {:>10} {:>14} {:>14} {:>10}", "m", "lambda", "arc integral", "lambda^(1/2m)/pi", "rel err");
    for m in 1..=4usize {
        for lambda in [1e2, 1e4, 1e6] {
            let computed = weyl_arc_integral(m, lambda)?;
            let target = weyl_arc_value(m, lambda);
            let rel = (computed - target).abs() / target;
            println!("{m:<3} {lambda:>10.0e} {computed:>14.8} {target:>14.8} {rel:>10.2e}");
            assert!(rel < 1e-6);
        }
    }
    Ok(())
}
