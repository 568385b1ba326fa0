//! Structural invariants of the characteristic-determinant algebra under
//! randomized boundary conditions, plus the two summation cross-checks that
//! tie the limit matrix to independently computed quantities.

use halftrace::bc_algebra::{
    abel_trace_pb, build_frame, check_condition_a, delta_leading_closed, observed_degree,
    trace_pb, trace_pb_closed, BoundarySpec, CharacteristicData,
};
use halftrace::spectral_solver::REGISTRY;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Random lower-order tails never change the determinant's top degree,
    /// its leading coefficient, the involution, or the trace identity.
    #[test]
    fn perturbed_spec_preserves_structure(m in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut degrees = rand::seq::index::sample(&mut rng, 2 * m, m).into_vec();
        degrees.sort_unstable();
        let spec = BoundarySpec::random_perturbed(m, &degrees, &mut rng).unwrap();
        let frame = build_frame(m, &degrees).unwrap();
        let data = CharacteristicData::build(&spec, &frame).unwrap();
        let kappa = spec.kappa();

        prop_assert_eq!(observed_degree(&data.delta), Some(kappa));
        let closed = delta_leading_closed(&spec, &frame);
        let rel = (data.delta.coeff(kappa) - closed).norm() / closed.norm();
        prop_assert!(rel <= 1e-9, "leading coefficient off by rel {rel:.2e}");
        for a in 0..m {
            for b in 0..m {
                let d = observed_degree(data.delta_ab(a, b));
                prop_assert!(d.is_none_or(|d| d <= kappa), "delta_{a}{b} degree {d:?} > {kappa}");
            }
        }

        let b2 = &data.b_limit * &data.b_limit;
        for r in 0..m {
            for c in 0..m {
                let id = if r == c { Complex64::ONE } else { Complex64::ZERO };
                prop_assert!((b2[(r, c)] - id).norm() <= 1e-10);
            }
        }
        let t = trace_pb(&data).unwrap();
        prop_assert!((t - trace_pb_closed(m, &degrees)).abs() <= 1e-8);
    }
}

/// Abel summation of the alternating pair signatures reproduces the closed
/// trace along ρ → 1.
#[test]
fn abel_summation_reaches_closed_trace() {
    let rhos = [0.9, 0.99, 0.999];
    for (m, degrees) in [(1usize, vec![0usize]), (2, vec![0, 2]), (3, vec![1, 3, 5])] {
        let frame = build_frame(m, &degrees).unwrap();
        let report = abel_trace_pb(&frame, &degrees, &rhos).unwrap();
        let err = (report.extrapolated - report.closed).abs();
        assert!(err <= 1e-4, "m={m} K={degrees:?}: Abel error {err:.2e}");
        assert_eq!(report.partials.len(), rhos.len());
    }
}

/// The normalized determinant stays bounded away from zero along rays deep
/// into the sector for every registered family.
#[test]
fn registered_families_satisfy_growth_bound() {
    let radii = [1.0, 4.0, 16.0, 64.0, 256.0];
    for &(m, degrees, name) in REGISTRY {
        let spec = BoundarySpec::one_term(m, degrees).unwrap();
        let frame = build_frame(m, degrees).unwrap();
        let report = check_condition_a(&spec, &frame, &radii, 24).unwrap();
        assert!(report.bounded, "{name}: min normalized |det| {:.2e}", report.min_abs_det);
    }
}
