//! Sweeps every one-term boundary family for orders 2m = 2..8 and checks the
//! closed-form trace of ℙ𝔹, the involution 𝔹² = I, and the agreement of the
//! coefficient-ratio limit matrix with its Vandermonde closed form.

use halftrace::bc_algebra::{
    build_frame, closed_form_b, trace_pb, trace_pb_closed, BoundarySpec, CharacteristicData,
};
use itertools::Itertools;
use num_complex::Complex64;

fn main() -> halftrace::Result<()> {
    println!("{:<4} {:<14} {:>10} {:>10} {:>12} {:>12}", "m", "K", "Sp(PB)", "closed", "|B^2-I|", "|lim-closed|");
    for m in 1..=4usize {
        for degrees in (0..2 * m).combinations(m) {
            let spec = BoundarySpec::one_term(m, &degrees)?;
            let frame = build_frame(m, &degrees)?;
            let data = CharacteristicData::build(&spec, &frame)?;

            let t = trace_pb(&data)?;
            let closed = trace_pb_closed(m, &degrees);

            let b2 = &data.b_limit * &data.b_limit;
            let closed_b = closed_form_b(&frame, &degrees)?;
            let mut e_inv = 0.0f64;
            let mut e_lim = 0.0f64;
            for r in 0..m {
                for c in 0..m {
                    let id = if r == c { Complex64::ONE } else { Complex64::ZERO };
                    e_inv = e_inv.max((b2[(r, c)] - id).norm());
                    e_lim = e_lim.max((data.b_limit[(r, c)] - closed_b[(r, c)]).norm());
                }
            }
            assert!((t - closed).abs() < 1e-8 && e_inv < 1e-10 && e_lim < 1e-10);
            println!(
                "{:<4} {:<14} {:>10.4} {:>10.4} {:>12.2e} {:>12.2e}",
                m,
                format!("{degrees:?}"),
                t,
                closed,
                e_inv,
                e_lim
            );
        }
    }
    Ok(())
}
