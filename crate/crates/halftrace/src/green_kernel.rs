//! Resolvent diagonal and contour integrals for the unperturbed operator.
//!
//! For τ = ζ^{2m} with arg ζ ∈ [0, π/m), the diagonal of the Green function
//! splits into a free part and a boundary layer:
//!
//!   H₀(x, x, τ) = i/(2mζ^{2m−1}) · Σ_a z^a (1 − Σ_b e^{i(z^a+z^b)xζ} Δ_{ab}(ζ)/Δ(ζ)).
//!
//! Contour integration −(1/2πi)∮ · dτ over the arc τ = λe^{iφ} turns the free
//! part into the Weyl density λ^{1/2m}/π and the full diagonal into the
//! spectral function θ(x, x, λ). In the large-ζ limit the ratios Δ_{ab}/Δ
//! freeze to the limit matrix 𝔹, and the x-integrated boundary layer becomes
//! ∫₀^∞ g(y) dy = −(πi/m)·Sp(ℙ𝔹), evaluated here through an ε-damping
//! ladder with extrapolation.

use num_complex::Complex64;

use crate::bc_algebra::CharacteristicData;
use crate::error::{Error, Result};
use crate::extrapolate::neville_diagonal;
use crate::quadrature::{gauss15_rule, integrate, integrate_chunked};

/// Relative floor for |Δ(ζ)| before a resolvent evaluation is refused.
const DELTA_REL_FLOOR: f64 = 1e-10;

/// Default damping ladder for the boundary-layer integral.
pub const DEFAULT_EPS_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn require_sector(m: usize, zeta: Complex64) -> Result<()> {
    let arg = zeta.arg();
    let hi = std::f64::consts::PI / m as f64;
    if !(-1e-12..hi + 1e-12).contains(&arg) {
        return Err(Error::InvalidSpec(format!(
            "ζ = {zeta} outside the sector arg ∈ [0, π/{m}); arg = {arg:.6}"
        )));
    }
    Ok(())
}

/// Magnitude scale of Δ near |ζ|: max coefficient times max(1, |ζ|)^κ.
fn delta_scale(data: &CharacteristicData, zeta: Complex64) -> f64 {
    let kappa = data.spec.kappa() as i32;
    data.delta.max_coeff_norm() * zeta.norm().max(1.0).powi(kappa)
}

fn delta_checked(data: &CharacteristicData, zeta: Complex64) -> Result<Complex64> {
    let d = data.delta.eval(zeta);
    let scale = delta_scale(data, zeta);
    if d.norm() <= DELTA_REL_FLOOR * scale {
        return Err(Error::NearSpectrum { abs_delta: d.norm(), scale });
    }
    Ok(d)
}

/// Free-space part i/(2mζ^{2m−1}) · Σ_a z^a of the diagonal.
pub fn free_diag(data: &CharacteristicData, zeta: Complex64) -> Complex64 {
    let m = data.frame.m;
    let sum: Complex64 = (0..m as i64).map(|a| data.frame.zp(a)).sum();
    let pre = Complex64::I / (2.0 * m as f64 * zeta.powi(2 * m as i32 - 1));
    pre * sum
}

/// Boundary-layer part of the diagonal at x. With `use_limit` the frozen
/// ratios 𝔹_{ab} replace Δ_{ab}(ζ)/Δ(ζ); the difference decays in |ζ| for
/// conditions with a bounded inverse boundary matrix.
pub fn boundary_layer_diag(
    data: &CharacteristicData,
    x: f64,
    zeta: Complex64,
    use_limit: bool,
) -> Result<Complex64> {
    require_sector(data.frame.m, zeta)?;
    if !(x >= 0.0) {
        return Err(Error::InvalidSpec(format!("x must be ≥ 0, got {x}")));
    }
    let m = data.frame.m;
    let delta = if use_limit { Complex64::ONE } else { delta_checked(data, zeta)? };
    let mut sum = Complex64::ZERO;
    for a in 0..m {
        for b in 0..m {
            let ratio = if use_limit {
                data.b_limit[(a, b)]
            } else {
                data.delta_ab(a, b).eval(zeta) / delta
            };
            let expo = Complex64::I * (data.frame.zp(a as i64) + data.frame.zp(b as i64)) * x * zeta;
            sum += data.frame.zp(a as i64) * ratio * expo.exp();
        }
    }
    let pre = Complex64::I / (2.0 * m as f64 * zeta.powi(2 * m as i32 - 1));
    Ok(pre * sum)
}

/// Full diagonal H₀(x, x, ζ^{2m}).
pub fn h0_diag(data: &CharacteristicData, x: f64, zeta: Complex64) -> Result<Complex64> {
    Ok(free_diag(data, zeta) - boundary_layer_diag(data, x, zeta, false)?)
}

/// Closed-form Weyl arc value λ^{1/2m}/π.
pub fn weyl_arc_value(m: usize, lambda: f64) -> f64 {
    lambda.powf(1.0 / (2.0 * m as f64)) / std::f64::consts::PI
}

/// −(1/2πi)∮ (free diagonal) dτ over the arc τ = λe^{iφ}, computed
/// adaptively in the variable ζ = λ^{1/2m}e^{iθ}, θ ∈ [0, π/m].
pub fn weyl_arc_integral(m: usize, lambda: f64) -> Result<f64> {
    if m == 0 || !(lambda > 0.0) {
        return Err(Error::InvalidSpec(format!("need m ≥ 1 and λ > 0, got m = {m}, λ = {lambda}")));
    }
    let r = lambda.powf(1.0 / (2.0 * m as f64));
    let sum_z: Complex64 = (0..m as i64)
        .map(|a| Complex64::from_polar(1.0, std::f64::consts::PI * a as f64 / m as f64))
        .sum();
    // Free diagonal × dτ/dθ collapses to ζ·Σz^a/(2πi); no large ζ powers survive.
    let f = |theta: f64| {
        let zeta = Complex64::from_polar(r, theta);
        zeta * sum_z / (2.0 * std::f64::consts::PI * Complex64::I)
    };
    let v = integrate(&f, 0.0, std::f64::consts::PI / m as f64, 1e-12 * (1.0 + r))?;
    if v.im.abs() > 1e-8 * v.re.abs().max(1.0) {
        return Err(Error::Degenerate(format!("Weyl arc integral has imaginary part {:.3e}", v.im)));
    }
    Ok(v.re)
}

/// Spectral function θ(x, x, λ) = −(1/2πi)∮ H₀ dτ for each listed x.
///
/// One fixed composite Gauss sweep over the arc serves every x: the ratios
/// Δ_{ab}/Δ are shared per node, and the panel count follows the fastest
/// phase 2·x_max·λ^{1/2m} so each panel sees a bounded phase change.
pub fn spectral_diag_many(data: &CharacteristicData, xs: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let m = data.frame.m;
    if !(lambda > 0.0) {
        return Err(Error::InvalidSpec(format!("λ must be > 0, got {lambda}")));
    }
    if xs.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidSpec("sample points must be finite and ≥ 0".into()));
    }
    let r = lambda.powf(1.0 / (2.0 * m as f64));
    let x_max = xs.iter().copied().fold(0.0, f64::max);
    let theta_hi = std::f64::consts::PI / m as f64;
    let panels = 16 + (1.5 * x_max * r / m as f64).ceil() as usize;
    let (nodes, weights) = gauss15_rule();
    let mut acc = vec![Complex64::ZERO; xs.len()];
    let two_pi_i = 2.0 * std::f64::consts::PI * Complex64::I;
    let mut ratios = vec![Complex64::ZERO; m * m];
    for p in 0..panels {
        let lo = theta_hi * p as f64 / panels as f64;
        let hi = theta_hi * (p + 1) as f64 / panels as f64;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (&t, &w) in nodes.iter().zip(weights) {
            let theta = mid + half * t;
            let zeta = Complex64::from_polar(r, theta);
            let delta = delta_checked(data, zeta)?;
            for a in 0..m {
                for b in 0..m {
                    ratios[a * m + b] = data.delta_ab(a, b).eval(zeta) / delta;
                }
            }
            // −(1/2πi)·H₀·dτ/dθ = (ζ/2πi)·Σ_a z^a(1 − Σ_b e^{i(z^a+z^b)xζ}·ratio)
            let scale = w * half * zeta / two_pi_i;
            for (xi, &x) in xs.iter().enumerate() {
                let mut s = Complex64::ZERO;
                for a in 0..m {
                    let za = data.frame.zp(a as i64);
                    let mut inner = Complex64::ZERO;
                    for b in 0..m {
                        let expo =
                            Complex64::I * (za + data.frame.zp(b as i64)) * x * zeta;
                        inner += ratios[a * m + b] * expo.exp();
                    }
                    s += za * (Complex64::ONE - inner);
                }
                acc[xi] += scale * s;
            }
        }
    }
    let mut out = Vec::with_capacity(xs.len());
    for (xi, v) in acc.iter().enumerate() {
        if v.im.abs() > 1e-6 * (1.0 + v.re.abs()) {
            return Err(Error::Degenerate(format!(
                "spectral function at x = {} has imaginary part {:.3e}",
                xs[xi], v.im
            )));
        }
        out.push(v.re);
    }
    Ok(out)
}

/// Single-point convenience wrapper around [`spectral_diag_many`].
pub fn spectral_diag(data: &CharacteristicData, x: f64, lambda: f64) -> Result<f64> {
    Ok(spectral_diag_many(data, &[x], lambda)?[0])
}

/// Smallest |Δ| on the arc for λ, with the magnitude scale it should be
/// compared against. A ratio near zero means the contour grazes a resonance.
pub fn min_abs_delta_on_arc(data: &CharacteristicData, lambda: f64, samples: usize) -> (f64, f64) {
    let m = data.frame.m;
    let r = lambda.powf(1.0 / (2.0 * m as f64));
    let mut min_abs = f64::INFINITY;
    let mut scale_at_min = 1.0;
    for t in 0..samples.max(1) {
        let theta = std::f64::consts::PI / m as f64 * (t as f64 + 0.5) / samples.max(1) as f64;
        let zeta = Complex64::from_polar(r, theta);
        let d = data.delta.eval(zeta).norm();
        if d < min_abs {
            min_abs = d;
            scale_at_min = delta_scale(data, zeta);
        }
    }
    (min_abs, scale_at_min)
}

/// Boundary-layer profile g(y) = Σ_{ab} ℙ_{ba}𝔹_{ab}(e^{i(z^{a+1}+z^{b+1})y} − e^{i(z^a+z^b)y})/y.
///
/// Its improper integral over (0, ∞) equals −(πi/m)·Sp(ℙ𝔹).
#[derive(Debug, Clone)]
pub struct GFunction {
    /// (weight ℙ_{ba}𝔹_{ab}, shifted exponent, base exponent) per (a, b).
    terms: Vec<(Complex64, Complex64, Complex64)>,
    m: usize,
    kappa: usize,
}

impl GFunction {
    pub fn new(data: &CharacteristicData) -> Self {
        let m = data.frame.m;
        let mut terms = Vec::with_capacity(m * m);
        for a in 0..m as i64 {
            for b in 0..m as i64 {
                let w = data.p_mat[(b as usize, a as usize)] * data.b_limit[(a as usize, b as usize)];
                let e1 = Complex64::I * (data.frame.zp(a + 1) + data.frame.zp(b + 1));
                let e0 = Complex64::I * (data.frame.zp(a) + data.frame.zp(b));
                terms.push((w, e1, e0));
            }
        }
        Self { m, kappa: data.spec.kappa(), terms }
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        if y.abs() < 1e-4 {
            // (e^{e1 y} − e^{e0 y})/y to three terms; |e| ≤ 2 keeps the
            // truncation below 1e−12 at this threshold.
            for &(w, e1, e0) in &self.terms {
                let d1 = e1 - e0;
                let d2 = e1 * e1 - e0 * e0;
                let d3 = e1 * e1 * e1 - e0 * e0 * e0;
                acc += w * (d1 + d2 * y / 2.0 + d3 * y * y / 6.0);
            }
        } else {
            for &(w, e1, e0) in &self.terms {
                acc += w * ((e1 * y).exp() - (e0 * y).exp()) / y;
            }
        }
        acc
    }

    /// −(πi/m)·(m(2m−1)/2 − κ).
    pub fn closed_integral(&self) -> Complex64 {
        let sp = self.m as f64 * (2 * self.m - 1) as f64 / 2.0 - self.kappa as f64;
        Complex64::new(0.0, -std::f64::consts::PI / self.m as f64 * sp)
    }
}

/// One rung of the damping ladder together with its distance from the target.
#[derive(Debug, Clone)]
pub struct GIntegralReport {
    /// (ε, ∫₀^{40/ε} g(y)e^{−εy} dy) per rung, in input order.
    pub ladder: Vec<(f64, Complex64)>,
    /// Extrapolation tableau diagonal over the rungs.
    pub diagonals: Vec<Complex64>,
    pub extrapolated: Complex64,
    pub closed: Complex64,
}

impl GIntegralReport {
    /// |rung − closed| per rung.
    pub fn rung_errors(&self) -> Vec<f64> {
        self.ladder.iter().map(|&(_, v)| (v - self.closed).norm()).collect()
    }
}

/// Damped evaluation of ∫₀^∞ g with extrapolation ε → 0.
///
/// Each rung integrates to Y = 40/ε, where the damped tail is below 1e−17
/// relative to the leading 1/y envelope. The rungs feed a Neville tableau in
/// ε; the last two diagonal entries must agree within `tol`.
pub fn g_integral(data: &CharacteristicData, eps_ladder: &[f64], tol: f64) -> Result<GIntegralReport> {
    if eps_ladder.len() < 2 {
        return Err(Error::TooFewSamples("damping ladder needs ≥ 2 values of ε".into()));
    }
    if eps_ladder.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidSpec("damping parameters must be > 0".into()));
    }
    let g = GFunction::new(data);
    let mut ladder = Vec::with_capacity(eps_ladder.len());
    for &eps in eps_ladder {
        let f = |y: f64| g.eval(y) * (-eps * y).exp();
        let val = integrate_chunked(&f, 0.0, 40.0 / eps, 2.0, 1e-9)?;
        ladder.push((eps, val));
    }
    let hs: Vec<f64> = ladder.iter().map(|&(e, _)| e).collect();
    let vs: Vec<Complex64> = ladder.iter().map(|&(_, v)| v).collect();
    let diagonals = neville_diagonal(&hs, &vs)?;
    let extrapolated = *diagonals.last().unwrap();
    let spread = (diagonals[diagonals.len() - 1] - diagonals[diagonals.len() - 2]).norm();
    if spread > tol {
        return Err(Error::LadderDiverged { spread, tol });
    }
    Ok(GIntegralReport { ladder, diagonals, extrapolated, closed: g.closed_integral() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_algebra::{build_frame, BoundarySpec};
    use crate::poly::ComplexPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn data_one_term(m: usize, degrees: &[usize]) -> CharacteristicData {
        let spec = BoundarySpec::one_term(m, degrees).unwrap();
        let frame = build_frame(m, degrees).unwrap();
        CharacteristicData::build(&spec, &frame).unwrap()
    }

    #[test]
    fn h0_diag_m1_dirichlet_closed_form() {
        let data = data_one_term(1, &[0]);
        for (x, zeta) in [
            (0.3, c(2.0, 0.5)),
            (1.0, c(0.5, 1.5)),
            (2.5, c(3.0, 0.1)),
            (0.0, c(1.0, 1.0)),
        ] {
            let h = h0_diag(&data, x, zeta).unwrap();
            let closed = Complex64::I / (2.0 * zeta)
                * (Complex64::ONE - (2.0 * Complex64::I * x * zeta).exp());
            assert!((h - closed).norm() < 1e-12 * closed.norm().max(1.0), "x = {x}, ζ = {zeta}");
        }
    }

    #[test]
    fn h0_diag_rejects_wrong_sector() {
        let data = data_one_term(2, &[0, 1]);
        // arg ζ = 2.0 > π/2 for m = 2.
        assert!(h0_diag(&data, 0.5, Complex64::from_polar(1.0, 2.0)).is_err());
    }

    #[test]
    fn near_spectrum_detected() {
        // y'(0) − i·c·y(0) = 0 puts a zero of Δ at ζ = c on the sector edge.
        let spec = BoundarySpec::new(1, vec![ComplexPoly::new(vec![c(0.0, -3.0), c(1.0, 0.0)])]).unwrap();
        let frame = build_frame(1, &[1]).unwrap();
        let data = CharacteristicData::build(&spec, &frame).unwrap();
        match h0_diag(&data, 0.5, c(3.0, 0.0)) {
            Err(crate::Error::NearSpectrum { .. }) => {}
            other => panic!("expected NearSpectrum, got {other:?}"),
        }
        assert!(h0_diag(&data, 0.5, c(3.0, 1.5)).is_ok());
    }

    #[test]
    fn weyl_arc_matches_closed_form() {
        for (m, lambda) in [(1usize, 1e2), (2, 1e4), (3, 1e4), (4, 1e6)] {
            let v = weyl_arc_integral(m, lambda).unwrap();
            let closed = weyl_arc_value(m, lambda);
            assert!((v - closed).abs() < 1e-9 * closed, "m = {m}, λ = {lambda}: {v} vs {closed}");
        }
    }

    #[test]
    fn spectral_diag_m1_dirichlet_and_neumann() {
        let r: f64 = 5.0;
        let lambda = r * r;
        let dir = data_one_term(1, &[0]);
        let neu = data_one_term(1, &[1]);
        for x in [0.2, 0.7, 1.3] {
            let expect_dir = r / std::f64::consts::PI * (1.0 - (2.0 * x * r).sin() / (2.0 * x * r));
            let expect_neu = r / std::f64::consts::PI * (1.0 + (2.0 * x * r).sin() / (2.0 * x * r));
            let got_dir = spectral_diag(&dir, x, lambda).unwrap();
            let got_neu = spectral_diag(&neu, x, lambda).unwrap();
            assert!((got_dir - expect_dir).abs() < 1e-10 * expect_dir.abs().max(1.0), "x = {x}");
            assert!((got_neu - expect_neu).abs() < 1e-10 * expect_neu.abs().max(1.0), "x = {x}");
        }
        // Dirichlet boundary: the spectral density vanishes at x = 0.
        assert!(spectral_diag(&dir, 0.0, lambda).unwrap().abs() < 1e-12);
    }

    #[test]
    fn spectral_diag_many_matches_single() {
        let data = data_one_term(2, &[0, 2]);
        let xs = [0.1, 0.9, 2.0];
        let many = spectral_diag_many(&data, &xs, 37.0).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let single = spectral_diag(&data, x, 37.0).unwrap();
            assert!((many[i] - single).abs() < 1e-12 * single.abs().max(1.0));
        }
    }

    #[test]
    fn g_function_m1_dirichlet() {
        let data = data_one_term(1, &[0]);
        let g = GFunction::new(&data);
        for y in [0.5f64, 1.0, 3.7] {
            let expect = -Complex64::I * (2.0 * y).sin() / y;
            assert!((g.eval(y) - expect).norm() < 1e-13, "y = {y}");
        }
        // Small-y branch continues the same function.
        assert!((g.eval(1e-6) - c(0.0, -2.0)).norm() < 1e-10);
        assert!((g.closed_integral() - c(0.0, -std::f64::consts::FRAC_PI_2)).norm() < 1e-14);
    }

    #[test]
    fn g_integral_extrapolates_to_closed_value() {
        let data = data_one_term(1, &[0]);
        let report = g_integral(&data, &DEFAULT_EPS_LADDER, 1e-3).unwrap();
        let errs = report.rung_errors();
        for k in 1..errs.len() {
            assert!(errs[k] < errs[k - 1], "rung errors not decreasing: {errs:?}");
        }
        assert!(
            (report.extrapolated - report.closed).norm() < 1e-4,
            "extrapolated {} vs closed {}",
            report.extrapolated,
            report.closed
        );
    }

    #[test]
    fn g_integral_tight_tolerance_reports_divergence() {
        let data = data_one_term(1, &[0]);
        match g_integral(&data, &DEFAULT_EPS_LADDER, 1e-16) {
            Err(crate::Error::LadderDiverged { .. }) => {}
            other => panic!("expected LadderDiverged, got {other:?}"),
        }
    }

    #[test]
    fn one_term_boundary_layer_limit_is_exact() {
        let data = data_one_term(2, &[1, 3]);
        for zeta in [c(2.0, 0.5), c(5.0, 3.0)] {
            let exact = boundary_layer_diag(&data, 0.8, zeta, false).unwrap();
            let limit = boundary_layer_diag(&data, 0.8, zeta, true).unwrap();
            assert!((exact - limit).norm() < 1e-12 * exact.norm().max(1e-30));
        }
    }
}
