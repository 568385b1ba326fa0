//! Regularized spectral-shift sums and their closed-form target.
//!
//! For paired spectra {λ_n} (base) and {μ_n} (base plus a compactly
//! supported perturbation q), the regularized sum
//! 𝒮₁ = Σ_n [μ_n − λ_n − (c_n/π)·∫q] with c_n = λ_n^{1/2m} − λ_{n−1}^{1/2m}
//! converges to −q(0+)·(m/2 − 1/4 − κ/2m), κ the sum of the boundary-degree
//! set. Two routes compute the left side: direct eigenvalue differences, and
//! the first-order route through the base spectral function, where
//! μ_n − λ_n is replaced by the matrix element (qφ_n, φ_n). Their bulk
//! second-order corrections cancel pairwise, so the routes agree far inside
//! the trusted window.
//!
//! Finite data need tail acceleration: partial sums oscillate around the
//! limit, so the extrapolator Cesàro-averages a trailing window sized by the
//! oscillation period of the c_n sequence and applies one Richardson step
//! across a window doubling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::spectral_solver::{DiscreteOperator, SpectrumResult};

/// Relative errors are measured against max(|rhs|, REL_FLOOR) so that
/// near-zero targets do not inflate them.
pub const REL_FLOOR: f64 = 0.05;

/// Validated perturbation: compact support, analytic ∫q and q(0+).
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    pub q: PiecewisePoly,
    /// q(0+). Polynomial pieces are right-continuous, so this equals the
    /// Cesàro limit ψ(0+) of the running mean of q.
    pub psi0: f64,
    pub integral: f64,
    pub support_end: f64,
}

/// Check the perturbation hypotheses and extract the analytic scalars.
pub fn ingest_perturbation(q: PiecewisePoly) -> Result<PerturbationSpec> {
    let support_end = q.support_end();
    if !support_end.is_finite() {
        return Err(Error::InvalidSpec(
            "perturbation support must be bounded; the regularized sum is defined for \
             compactly supported q"
                .into(),
        ));
    }
    let integral = q.integral()?;
    let psi0 = q.value_at_zero_plus();
    Ok(PerturbationSpec { q, psi0, integral, support_end })
}

/// −ψ(0+)·(m/2 − 1/4 − κ/2m), κ = Σ degrees. Assumes a normalized degree set.
pub fn rhs_closed_form(m: usize, degrees: &[usize], psi0: f64) -> f64 {
    let kappa: usize = degrees.iter().sum();
    -psi0 * (m as f64 / 2.0 - 0.25 - kappa as f64 / (2.0 * m as f64))
}

/// c_1 = λ_1^{1/2m}, c_n = λ_n^{1/2m} − λ_{n−1}^{1/2m}. Requires an
/// ascending nonnegative spectrum; telescopes to λ_N^{1/2m}.
pub fn c_weights(lams: &[f64], m: usize) -> Result<Vec<f64>> {
    let p = 1.0 / (2.0 * m as f64);
    let mut prev_root = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(lams.len());
    for (n, &lam) in lams.iter().enumerate() {
        if !lam.is_finite() {
            return Err(Error::NonFinite(format!("eigenvalue {n}")));
        }
        if lam < 0.0 || lam < prev {
            return Err(Error::InvalidSpec(format!(
                "spectrum must be nonnegative and ascending, violated at index {n}: {lam}"
            )));
        }
        let root = lam.powf(p);
        out.push(root - prev_root);
        prev_root = root;
        prev = lam;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceRoute {
    EigenvalueSum,
    SpectralFunction,
}

/// One experiment's regularized sums and their comparison to the target.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub route: TraceRoute,
    pub c: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub extrapolated: f64,
    pub rhs: f64,
    /// |extrapolated − rhs| / max(|rhs|, [`REL_FLOOR`]).
    pub rel_error: f64,
    pub converged: bool,
    pub variation: f64,
    pub window: usize,
    pub period: usize,
    /// Indices n where |μ_n − λ_n| exceeds half the local base gap, i.e.
    /// where index pairing between the two spectra may have crossed.
    pub pairing_suspect: Vec<usize>,
}

/// Tail estimate of an oscillating partial-sum sequence.
#[derive(Debug, Clone, Copy)]
pub struct TailEstimate {
    pub value: f64,
    /// |mean over last W − mean over last 2W|.
    pub variation: f64,
    pub window: usize,
    pub period: usize,
    /// Window-to-window variation decreased toward the tail and the final
    /// variation is small against max(|value|, [`REL_FLOOR`]).
    pub converged: bool,
}

/// Dominant short oscillation period of the weights, from the candidate set
/// {2, 4, 6, 8}; ties and inconclusive data fall back to 2.
fn detect_period(c: &[f64], n_limit: usize) -> usize {
    let usable = c.len().min(n_limit);
    let mut scores = Vec::new();
    for p in [2usize, 4, 6, 8] {
        if 4 * p > usable {
            continue;
        }
        let s: f64 = (p..usable).map(|i| (c[i] - c[i - p]).abs()).sum();
        scores.push((p, s / (usable - p) as f64));
    }
    let Some(best) = scores.iter().map(|&(_, s)| s).min_by(f64::total_cmp) else {
        return 2;
    };
    scores
        .iter()
        .find(|&&(_, s)| s <= 1.1 * best + 1e-300)
        .map(|&(p, _)| p)
        .unwrap_or(2)
}

/// Cesàro window average with one Richardson step: windows of length W and
/// 2W (W a period multiple ≈ n/4) end at the last sample; the estimate is
/// 2·A_W − A_{2W}. Convergence compares |A_W − A_{2W}| against the coarser
/// |A_{2W} − A_{4W}|.
pub fn tail_extrapolate(partial_sums: &[f64], c: &[f64]) -> Result<TailEstimate> {
    let n = partial_sums.len();
    if n < 16 {
        return Err(Error::TooFewSamples(format!(
            "tail extrapolation needs at least 16 partial sums, got {n}"
        )));
    }
    if partial_sums.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("partial sums".into()));
    }
    let period = detect_period(c, n);
    let window = ((n / 4) / period).max(1) * period;
    let mean_last = |len: usize| -> f64 {
        partial_sums[n - len..].iter().sum::<f64>() / len as f64
    };
    let a1 = mean_last(window);
    let a2 = mean_last(2 * window);
    let a4 = mean_last((4 * window).min(n));
    let value = 2.0 * a1 - a2;
    let variation = (a1 - a2).abs();
    let coarse = (a2 - a4).abs();
    let converged = variation <= coarse + 1e-12 * value.abs().max(1.0)
        && variation <= 0.25 * value.abs().max(REL_FLOOR);
    Ok(TailEstimate { value, variation, window, period, converged })
}

fn finish_report(
    route: TraceRoute,
    c: Vec<f64>,
    partial_sums: Vec<f64>,
    tail: TailEstimate,
    rhs: f64,
    pairing_suspect: Vec<usize>,
) -> TraceReport {
    TraceReport {
        route,
        c,
        partial_sums,
        extrapolated: tail.value,
        rhs,
        rel_error: (tail.value - rhs).abs() / rhs.abs().max(REL_FLOOR),
        converged: tail.converged,
        variation: tail.variation,
        window: tail.window,
        period: tail.period,
        pairing_suspect,
    }
}

/// Both spectra must trust at least `nmax` eigenvalues each.
fn check_trust(lams: &SpectrumResult, mus: &SpectrumResult, nmax: usize) -> Result<()> {
    let avail = lams.trusted.min(mus.trusted);
    if nmax == 0 {
        return Err(Error::TooFewSamples("nmax must be positive".into()));
    }
    if nmax > avail {
        return Err(Error::UntrustedSpectrum(format!(
            "nmax = {nmax} exceeds the trusted pair count {avail}; raise the grid size N \
             or the box X"
        )));
    }
    Ok(())
}

/// Default number of pairs: the joint trusted count minus an edge margin.
pub fn default_nmax(lams: &SpectrumResult, mus: &SpectrumResult) -> usize {
    lams.trusted.min(mus.trusted).saturating_sub(5)
}

/// Direct route: partial_sums\[N\] = Σ_{n≤N} (μ_n − λ_n − c_n·∫q/π).
pub fn regularized_partial_sums(
    lams: &SpectrumResult,
    mus: &SpectrumResult,
    q: &PerturbationSpec,
    m: usize,
    degrees: &[usize],
    nmax: usize,
) -> Result<TraceReport> {
    check_trust(lams, mus, nmax)?;
    let base = &lams.eigenvalues[..nmax];
    let pert = &mus.eigenvalues[..nmax];
    if pert.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("perturbed eigenvalue".into()));
    }
    let c = c_weights(base, m)?;
    let weyl_scale = q.integral / std::f64::consts::PI;
    let mut partial_sums = Vec::with_capacity(nmax);
    let mut acc = 0.0;
    let mut pairing_suspect = Vec::new();
    for n in 0..nmax {
        acc += pert[n] - base[n] - c[n] * weyl_scale;
        partial_sums.push(acc);
        let gap_up = if n + 1 < lams.eigenvalues.len() {
            lams.eigenvalues[n + 1] - base[n]
        } else {
            f64::INFINITY
        };
        let gap_down = if n > 0 { base[n] - base[n - 1] } else { f64::INFINITY };
        if (pert[n] - base[n]).abs() > 0.5 * gap_up.min(gap_down) {
            pairing_suspect.push(n);
        }
    }
    let tail = tail_extrapolate(&partial_sums, &c)?;
    let rhs = rhs_closed_form(m, degrees, q.psi0);
    Ok(finish_report(TraceRoute::EigenvalueSum, c, partial_sums, tail, rhs, pairing_suspect))
}

/// Spectral-function route: μ_n − λ_n is replaced by the first-order matrix
/// element (qφ_n, φ_n) over the base eigenfunctions, so only the base solve
/// is consumed. `lambda_ladder` gives the cut values λ; the partial sum at a
/// cut covers all trusted λ_n ≤ λ.
pub fn trace_via_spectral_function(
    lams: &SpectrumResult,
    disc: &DiscreteOperator,
    q: &PerturbationSpec,
    degrees: &[usize],
    lambda_ladder: &[f64],
) -> Result<TraceReport> {
    let m = disc.model.m;
    if lams.trusted == 0 {
        return Err(Error::UntrustedSpectrum("no trusted eigenvalues".into()));
    }
    let ceiling = lams.eigenvalues[lams.trusted - 1];
    if let Some(bad) = lambda_ladder.iter().find(|&&l| l > ceiling || !l.is_finite()) {
        return Err(Error::UntrustedSpectrum(format!(
            "ladder value {bad} is above the trusted ceiling {ceiling}"
        )));
    }
    if lams.eigenfunctions.len() < lams.trusted {
        return Err(Error::InvalidSpec("base spectrum carries no eigenfunctions".into()));
    }
    // Matrix elements (qφ_n, φ_n) on the q-support only.
    let weights: Vec<(usize, f64)> = (0..disc.size)
        .filter_map(|r| {
            let x = disc.node_x(r);
            let qv = q.q.eval(x);
            (qv != 0.0).then_some((r, disc.h * disc.masses[r] * qv))
        })
        .collect();
    let qphi: Vec<f64> = lams.eigenfunctions[..lams.trusted]
        .iter()
        .map(|phi| weights.iter().map(|&(r, w)| w * phi[r] * phi[r]).sum())
        .collect();
    let exp = 1.0 / (2.0 * m as f64);
    let weyl_scale = q.integral / std::f64::consts::PI;
    let mut partial_sums = Vec::with_capacity(lambda_ladder.len());
    let mut max_count = 0usize;
    for &lam in lambda_ladder {
        let count = lams.eigenvalues[..lams.trusted].partition_point(|&l| l <= lam);
        max_count = max_count.max(count);
        let shift: f64 = qphi[..count].iter().sum();
        let telescoped = if count == 0 { 0.0 } else { lams.eigenvalues[count - 1].powf(exp) };
        partial_sums.push(shift - telescoped * weyl_scale);
    }
    let c = c_weights(&lams.eigenvalues[..max_count], m)?;
    let tail = tail_extrapolate(&partial_sums, &c)?;
    let rhs = rhs_closed_form(m, degrees, q.psi0);
    Ok(finish_report(TraceRoute::SpectralFunction, c, partial_sums, tail, rhs, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::Piece;

    fn bump() -> PerturbationSpec {
        let q = PiecewisePoly::new(vec![Piece { lo: 0.0, hi: 1.0, coeffs: vec![1.0, -2.0, 1.0] }])
            .unwrap();
        ingest_perturbation(q).unwrap()
    }

    fn synthetic_spectrum(lams: Vec<f64>) -> SpectrumResult {
        let trusted = lams.len();
        SpectrumResult { eigenvalues: lams, eigenfunctions: Vec::new(), trusted }
    }

    #[test]
    fn rhs_values_across_families() {
        assert_eq!(rhs_closed_form(1, &[0], 1.0), -0.25);
        assert_eq!(rhs_closed_form(1, &[1], 1.0), 0.25);
        assert_eq!(rhs_closed_form(2, &[0, 1], 1.0), -0.5);
        assert_eq!(rhs_closed_form(2, &[0, 2], 1.0), -0.25);
        assert_eq!(rhs_closed_form(2, &[1, 3], 1.0), 0.25);
        assert_eq!(rhs_closed_form(2, &[2, 3], 1.0), 0.5);
        assert_eq!(rhs_closed_form(3, &[0, 1, 2], 1.0), -0.75);
        assert_eq!(rhs_closed_form(3, &[3, 4, 5], 1.0), 0.75);
        // Scales linearly in ψ(0+).
        assert_eq!(rhs_closed_form(1, &[0], -2.0), 0.5);
    }

    #[test]
    fn ingest_extracts_analytic_scalars() {
        let p = bump();
        assert_eq!(p.psi0, 1.0);
        assert!((p.integral - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.support_end, 1.0);
        let unbounded = PiecewisePoly::new(vec![Piece {
            lo: 0.0,
            hi: f64::INFINITY,
            coeffs: vec![1.0],
        }])
        .unwrap();
        assert!(ingest_perturbation(unbounded).is_err());
    }

    #[test]
    fn weights_telescope() {
        let lams: Vec<f64> = (1..=40).map(|n| (n * n) as f64).collect();
        let c = c_weights(&lams, 1).unwrap();
        assert!(c.iter().all(|&v| v >= 0.0));
        let total: f64 = c.iter().sum();
        assert!((total - 40.0).abs() < 1e-12);
        assert!(c_weights(&[4.0, 1.0], 1).is_err());
        assert!(c_weights(&[-1.0, 4.0], 1).is_err());
    }

    #[test]
    fn zero_perturbation_gives_zero_report() {
        let lams = synthetic_spectrum((1..=30).map(|n| (n * n) as f64).collect());
        let zero = ingest_perturbation(PiecewisePoly::zero()).unwrap();
        let report = regularized_partial_sums(&lams, &lams, &zero, 1, &[0], 30).unwrap();
        assert!(report.partial_sums.iter().all(|&s| s == 0.0));
        assert_eq!(report.extrapolated, 0.0);
        assert_eq!(report.rhs, 0.0);
        assert_eq!(report.rel_error, 0.0);
        assert!(report.converged);
    }

    #[test]
    fn synthetic_drift_recovers_target() {
        // μ_n = λ_n + c_n·∫q/π + t_n with geometrically summable t_n:
        // the regularized partial sums converge to Σt_n.
        let base: Vec<f64> = (1..=60).map(|n| (n * n) as f64).collect();
        let q = bump();
        let c = c_weights(&base, 1).unwrap();
        let target = 0.37;
        let mut remaining = target;
        let mus: Vec<f64> = base
            .iter()
            .zip(&c)
            .map(|(&l, &cn)| {
                let t = 0.5 * remaining;
                remaining -= t;
                l + cn * q.integral / std::f64::consts::PI + t
            })
            .collect();
        let report = regularized_partial_sums(
            &synthetic_spectrum(base),
            &synthetic_spectrum(mus),
            &q,
            1,
            &[0],
            60,
        )
        .unwrap();
        assert!(
            (report.extrapolated - target).abs() < 1e-6,
            "extrapolated {}",
            report.extrapolated
        );
        assert!(report.converged);
        assert!(report.pairing_suspect.is_empty());
    }

    #[test]
    fn nmax_beyond_trust_rejected() {
        let mut lams = synthetic_spectrum((1..=20).map(|n| (n * n) as f64).collect());
        lams.trusted = 10;
        let mus = synthetic_spectrum((1..=20).map(|n| (n * n) as f64 + 0.1).collect());
        let q = bump();
        match regularized_partial_sums(&lams, &mus, &q, 1, &[0], 15) {
            Err(Error::UntrustedSpectrum(_)) => {}
            other => panic!("expected trust rejection, got {other:?}"),
        }
    }

    #[test]
    fn pairing_flag_trips_on_half_gap() {
        let base: Vec<f64> = (1..=30).map(|n| (n * n) as f64).collect();
        let mut mus = base.clone();
        // Push index 9 past half its local gap (gap ≈ 19 below, 21 above).
        mus[9] += 11.0;
        let q = bump();
        let report = regularized_partial_sums(
            &synthetic_spectrum(base),
            &synthetic_spectrum(mus),
            &q,
            1,
            &[0],
            30,
        )
        .unwrap();
        assert_eq!(report.pairing_suspect, vec![9]);
    }

    #[test]
    fn tail_handles_flat_and_alternating() {
        let c = vec![1.0; 40];
        let flat = vec![0.7; 40];
        let t = tail_extrapolate(&flat, &c).unwrap();
        assert!((t.value - 0.7).abs() < 1e-12);
        assert!(t.converged);
        let alternating: Vec<f64> =
            (0..40).map(|n| 0.3 + if n % 2 == 0 { 0.2 } else { -0.2 }).collect();
        let t = tail_extrapolate(&alternating, &c).unwrap();
        assert!((t.value - 0.3).abs() < 1e-12);
        assert_eq!(t.period % 2, 0);
        assert!(tail_extrapolate(&flat[..10], &c[..10]).is_err());
    }

    #[test]
    fn blowup_reports_not_converged() {
        // Exponential tail: the trailing window deviates more than the
        // coarser one, the signature of non-decreasing variation.
        let c = vec![1.0; 64];
        let wild: Vec<f64> = (0..64).map(|n| 1.5f64.powi(n)).collect();
        let t = tail_extrapolate(&wild, &c).unwrap();
        assert!(!t.converged);
    }

    #[test]
    fn period_detection_prefers_true_cycle() {
        // c with a strong 4-cycle; partial sums flat so only period matters.
        let c: Vec<f64> = (0..64).map(|n| [1.0, 2.0, 3.0, 2.0][n % 4]).collect();
        let flat = vec![1.0; 64];
        let t = tail_extrapolate(&flat, &c).unwrap();
        assert_eq!(t.period, 4);
    }
}
