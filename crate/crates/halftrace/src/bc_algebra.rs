//! Boundary-condition algebra for `(−1)^m D^{2m} + …` on the half-line.
//!
//! Normalized conditions are P_j(D)y(0) = 0, j = 1..m, with distinct degrees
//! 0 ≤ k_1 < … < k_m ≤ 2m−1 and κ = Σ k_j. With z = e^{iπ/m}, the functions
//! e^{i z^ℓ ζ x}, ℓ = 0..m−1, span the decaying solutions of the free
//! equation for arg ζ ∈ [0, π/m), and the boundary matrix
//!
//!   ℬ(ζ)\[ℓ, j\] = P_j(i z^ℓ ζ)
//!
//! collects the conditions applied to them. Everything downstream is built
//! from Δ(ζ) = det ℬ(ζ) and its one-row substitutions Δ_{ab}(ζ):
//!
//! * Δ has exact degree κ with leading coefficient (Π_j a_j i^{k_j})·det 𝕎,
//!   where 𝕎 is the Vandermonde matrix on w_j = z^{k_j};
//! * the limit matrix 𝔹_{ab} = lim_{ζ→∞} Δ_{ab}/Δ is the ratio of the
//!   κ-coefficients and has the closed form 𝕎·diag((−1)^{k_j})·𝕎^{−1},
//!   so 𝔹² = I;
//! * the pairing matrix ℙ_{ba} = 1/(1 + z^{b−a}) satisfies ℙ + ℙᵀ = ones and
//!   Sp(ℙ𝔹) = m(2m−1)/2 − κ, which is the identity the rest of the crate
//!   leans on.
//!
//! The same trace arises as an Abel limit Σ (−1)^n ρ^n Sp(φ_nφ̄_nᵀ𝔹) with
//! φ_n = (1, z^n, …, z^{(m−1)n})ᵀ; [`abel_trace_pb`] verifies it numerically.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;

/// Largest supported order parameter m. The boundary algebra is exact in
/// principle for any m, but κ grows like m² and determinant interpolation
/// loses accuracy beyond this.
pub const MAX_M: usize = 12;

/// Sampling radius for determinant interpolation; > 1 keeps the κ-coefficient
/// well above roundoff relative to the low-order ones.
const NODE_RADIUS: f64 = 2.0;

/// Relative cutoff separating true determinant coefficients from
/// interpolation roundoff.
const COEFF_REL_TOL: f64 = 1e-8;

/// Boundary conditions P_j(D)y(0) = 0: polynomials in D, ascending
/// coefficients, strictly increasing degrees.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub m: usize,
    pub conditions: Vec<ComplexPoly>,
}

impl BoundarySpec {
    pub fn new(m: usize, conditions: Vec<ComplexPoly>) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidSpec(format!("order parameter m must be in 1..={MAX_M}, got {m}")));
        }
        if conditions.len() != m {
            return Err(Error::InvalidSpec(format!(
                "need exactly m = {m} boundary conditions, got {}",
                conditions.len()
            )));
        }
        let mut last: Option<usize> = None;
        for (j, p) in conditions.iter().enumerate() {
            let d = p
                .coeffs
                .iter()
                .rposition(|c| c.norm() > 0.0)
                .ok_or_else(|| Error::InvalidSpec(format!("condition {j} is the zero polynomial")))?;
            if d + 1 != p.coeffs.len() {
                return Err(Error::InvalidSpec(format!(
                    "condition {j} has zero leading coefficient; trim it to degree {d}"
                )));
            }
            if d > 2 * m - 1 {
                return Err(Error::InvalidSpec(format!(
                    "condition {j} has degree {d} > 2m−1 = {}",
                    2 * m - 1
                )));
            }
            if let Some(prev) = last {
                if d <= prev {
                    return Err(Error::InvalidSpec(format!(
                        "condition degrees must be strictly increasing, got {prev} then {d}"
                    )));
                }
            }
            last = Some(d);
        }
        Ok(Self { m, conditions })
    }

    /// One-term conditions D^{k_j} y(0) = 0.
    pub fn one_term(m: usize, degrees: &[usize]) -> Result<Self> {
        let conditions = degrees
            .iter()
            .map(|&k| {
                let mut c = vec![Complex64::ZERO; k + 1];
                c[k] = Complex64::ONE;
                ComplexPoly::new(c)
            })
            .collect();
        Self::new(m, conditions)
    }

    /// Unit-leading conditions D^{k_j} + (random lower-order part).
    pub fn random_perturbed<R: Rng>(m: usize, degrees: &[usize], rng: &mut R) -> Result<Self> {
        let conditions = degrees
            .iter()
            .map(|&k| {
                let mut c: Vec<Complex64> = (0..k)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                c.push(Complex64::ONE);
                ComplexPoly::new(c)
            })
            .collect();
        Self::new(m, conditions)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.conditions
            .iter()
            .map(|p| p.coeffs.len() - 1)
            .collect()
    }

    pub fn leading_coeffs(&self) -> Vec<Complex64> {
        self.conditions
            .iter()
            .map(|p| *p.coeffs.last().unwrap())
            .collect()
    }

    pub fn kappa(&self) -> usize {
        self.degrees().iter().sum()
    }
}

/// Root-of-unity frame: z = e^{iπ/m} and its powers, period 2m.
#[derive(Debug, Clone)]
pub struct Frame {
    pub m: usize,
    pub z: Complex64,
    zpow: Vec<Complex64>,
}

/// Validate (m, degrees) and build the frame of powers of z = e^{iπ/m}.
pub fn build_frame(m: usize, degrees: &[usize]) -> Result<Frame> {
    if m == 0 || m > MAX_M {
        return Err(Error::InvalidSpec(format!("order parameter m must be in 1..={MAX_M}, got {m}")));
    }
    if degrees.len() != m {
        return Err(Error::InvalidSpec(format!(
            "need m = {m} condition degrees, got {}",
            degrees.len()
        )));
    }
    for w in degrees.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidSpec(format!(
                "condition degrees must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&hi) = degrees.last() {
        if hi > 2 * m - 1 {
            return Err(Error::InvalidSpec(format!("condition degree {hi} > 2m−1 = {}", 2 * m - 1)));
        }
    }
    let zpow = (0..2 * m)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::PI * t as f64 / m as f64))
        .collect();
    Ok(Frame { m, z: Complex64::from_polar(1.0, std::f64::consts::PI / m as f64), zpow })
}

impl Frame {
    /// z^t for any integer t (period 2m, z^m = −1).
    pub fn zp(&self, t: i64) -> Complex64 {
        let p = 2 * self.m as i64;
        self.zpow[t.rem_euclid(p) as usize]
    }

    /// φ_n = (1, z^n, …, z^{(m−1)n})ᵀ.
    pub fn phi(&self, n: i64) -> Vec<Complex64> {
        (0..self.m as i64).map(|j| self.zp(j * n)).collect()
    }
}

/// ℬ(ζ)\[ℓ, j\] = P_j(i z^ℓ ζ), rows over the solution index ℓ = 0..m−1,
/// columns over the conditions.
pub fn boundary_matrix(spec: &BoundarySpec, frame: &Frame, zeta: Complex64) -> DMatrix<Complex64> {
    let m = spec.m;
    let i = Complex64::I;
    DMatrix::from_fn(m, m, |l, j| spec.conditions[j].eval(i * frame.zp(l as i64) * zeta))
}

/// det ℬ(ζ) as a polynomial, by evaluation at `num_nodes` points on the
/// circle |ζ| = 2 and inverse DFT. With `row_substitution = Some((a, b))`
/// row b is replaced by \[P_j(−i z^a ζ)\]_j before taking the determinant.
pub fn determinant_poly(
    spec: &BoundarySpec,
    frame: &Frame,
    row_substitution: Option<(usize, usize)>,
    num_nodes: usize,
) -> Result<ComplexPoly> {
    if let Some((a, b)) = row_substitution {
        if a >= spec.m || b >= spec.m {
            return Err(Error::InvalidSpec(format!(
                "substitution indices ({a}, {b}) out of range for m = {}",
                spec.m
            )));
        }
    }
    let nodes = ComplexPoly::circle_nodes(NODE_RADIUS, num_nodes);
    let mut values = Vec::with_capacity(num_nodes);
    for &zeta in &nodes {
        let mut mat = boundary_matrix(spec, frame, zeta);
        if let Some((a, b)) = row_substitution {
            for j in 0..spec.m {
                mat[(b, j)] = spec.conditions[j].eval(-Complex64::I * frame.zp(a as i64) * zeta);
            }
        }
        values.push(mat.determinant());
    }
    ComplexPoly::interpolate_on_circle(NODE_RADIUS, &values)
}

/// Vandermonde matrix 𝕎\[r, c\] = (z^{k_c})^r on the nodes w_j = z^{k_j}.
pub fn vandermonde_w(frame: &Frame, degrees: &[usize]) -> DMatrix<Complex64> {
    let m = degrees.len();
    DMatrix::from_fn(m, m, |r, c| frame.zp((degrees[c] * r) as i64))
}

/// det 𝕎 = Π_{c < c'} (w_{c'} − w_c), exact product form.
pub fn vandermonde_det(frame: &Frame, degrees: &[usize]) -> Complex64 {
    let mut det = Complex64::ONE;
    for c2 in 1..degrees.len() {
        for c1 in 0..c2 {
            det *= frame.zp(degrees[c2] as i64) - frame.zp(degrees[c1] as i64);
        }
    }
    det
}

/// Closed form of the leading (degree-κ) coefficient of Δ:
/// (Π_j a_j i^{k_j})·det 𝕎.
pub fn delta_leading_closed(spec: &BoundarySpec, frame: &Frame) -> Complex64 {
    let degrees = spec.degrees();
    let mut lead = vandermonde_det(frame, &degrees);
    for (a, k) in spec.leading_coeffs().into_iter().zip(&degrees) {
        lead *= a * Complex64::I.powu(*k as u32 % 4);
    }
    lead
}

/// Δ(ζ) with the leading coefficient cross-checked against its closed form.
pub fn delta_poly(spec: &BoundarySpec, frame: &Frame) -> Result<ComplexPoly> {
    let kappa = spec.kappa();
    let poly = determinant_poly(spec, frame, None, kappa + 1)?;
    let lead = poly.coeff(kappa);
    let closed = delta_leading_closed(spec, frame);
    if (lead - closed).norm() > 1e-6 * closed.norm() {
        return Err(Error::Degenerate(format!(
            "determinant leading coefficient {lead} disagrees with closed form {closed}"
        )));
    }
    Ok(poly)
}

/// Δ_{ab}(ζ): Δ with row b evaluated at −i z^a ζ instead of +i z^b ζ.
pub fn delta_ab_poly(spec: &BoundarySpec, frame: &Frame, a: usize, b: usize) -> Result<ComplexPoly> {
    determinant_poly(spec, frame, Some((a, b)), spec.kappa() + 1)
}

/// Limit matrix 𝔹\[a, b\] = lim Δ_{ab}/Δ, computed as the ratio of
/// κ-coefficients.
pub fn limit_matrix_b(spec: &BoundarySpec, frame: &Frame) -> Result<DMatrix<Complex64>> {
    let m = spec.m;
    let kappa = spec.kappa();
    let denom = delta_poly(spec, frame)?.coeff(kappa);
    let mut b_mat = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            b_mat[(a, b)] = delta_ab_poly(spec, frame, a, b)?.coeff(kappa) / denom;
        }
    }
    Ok(b_mat)
}

/// Closed form 𝔹 = 𝕎·diag((−1)^{k_j})·𝕎^{−1}. Independent of the
/// lower-order parts of the conditions, hence an involution: 𝔹² = I.
pub fn closed_form_b(frame: &Frame, degrees: &[usize]) -> Result<DMatrix<Complex64>> {
    let w = vandermonde_w(frame, degrees);
    let signs = DMatrix::from_fn(degrees.len(), degrees.len(), |r, c| {
        if r == c {
            Complex64::new(if degrees[r] % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let w_inv = w
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("Vandermonde matrix on z^{k_j} is singular".into()))?;
    Ok(w * signs * w_inv)
}

/// Pairing matrix ℙ\[b, a\] = 1/(1 + z^{b−a}). |b − a| < m keeps every
/// denominator away from zero; ℙ + ℙᵀ is the all-ones matrix.
pub fn p_matrix(frame: &Frame) -> DMatrix<Complex64> {
    let m = frame.m;
    DMatrix::from_fn(m, m, |b, a| Complex64::ONE / (Complex64::ONE + frame.zp(b as i64 - a as i64)))
}

/// Closed-form trace Sp(ℙ𝔹) = m(2m−1)/2 − κ.
pub fn trace_pb_closed(m: usize, degrees: &[usize]) -> f64 {
    let kappa: usize = degrees.iter().sum();
    m as f64 * (2 * m - 1) as f64 / 2.0 - kappa as f64
}

/// Everything downstream of a boundary spec that the kernel and experiment
/// layers reuse: Δ, its substitutions, 𝔹, and ℙ.
#[derive(Debug, Clone)]
pub struct CharacteristicData {
    pub spec: BoundarySpec,
    pub frame: Frame,
    pub delta: ComplexPoly,
    /// Row-major m×m grid of Δ_{ab}.
    pub delta_ab: Vec<ComplexPoly>,
    pub b_limit: DMatrix<Complex64>,
    pub p_mat: DMatrix<Complex64>,
}

impl CharacteristicData {
    pub fn build(spec: &BoundarySpec, frame: &Frame) -> Result<Self> {
        let m = spec.m;
        let kappa = spec.kappa();
        let delta = delta_poly(spec, frame)?;
        let denom = delta.coeff(kappa);
        let mut delta_ab = Vec::with_capacity(m * m);
        let mut b_limit = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let poly = delta_ab_poly(spec, frame, a, b)?;
                b_limit[(a, b)] = poly.coeff(kappa) / denom;
                delta_ab.push(poly);
            }
        }
        Ok(Self {
            spec: spec.clone(),
            frame: frame.clone(),
            delta,
            delta_ab,
            b_limit,
            p_mat: p_matrix(frame),
        })
    }

    pub fn delta_ab(&self, a: usize, b: usize) -> &ComplexPoly {
        &self.delta_ab[a * self.spec.m + b]
    }
}

/// Sp(ℙ𝔹) from assembled data. The product trace must be real; a residual
/// imaginary part above 1e−8 signals a broken assembly.
pub fn trace_pb(data: &CharacteristicData) -> Result<f64> {
    let t = (&data.p_mat * &data.b_limit).trace();
    if t.im.abs() > 1e-8 * t.re.abs().max(1.0) {
        return Err(Error::Degenerate(format!("trace of ℙ𝔹 has imaginary part {:.3e}", t.im)));
    }
    Ok(t.re)
}

/// (𝔹φ_n, φ_n) = Sp(φ_nφ̄_nᵀ𝔹), using the closed-form 𝔹.
pub fn sp_phi_b(frame: &Frame, degrees: &[usize], n: i64) -> Result<Complex64> {
    let b = closed_form_b(frame, degrees)?;
    let phi = frame.phi(n);
    let m = frame.m;
    let mut acc = Complex64::ZERO;
    for a in 0..m {
        for bb in 0..m {
            acc += b[(a, bb)] * phi[bb] * phi[a].conj();
        }
    }
    Ok(acc)
}

/// Predicted value of (𝔹φ_n, φ_n): (−1)^n m when n mod 2m is a condition
/// degree, (−1)^{n+1} m otherwise.
pub fn lemma_sign(m: usize, degrees: &[usize], n: i64) -> f64 {
    let r = n.rem_euclid(2 * m as i64) as usize;
    let parity = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if degrees.contains(&r) {
        parity * m as f64
    } else {
        -parity * m as f64
    }
}

/// Abel evaluation of Sp(ℙ𝔹): partial values S(ρ) = Σ_n (−ρ)^n (𝔹φ_n, φ_n)
/// for each ρ, then Neville extrapolation in (1 − ρ) → 0.
#[derive(Debug, Clone)]
pub struct AbelReport {
    /// (ρ, S(ρ)) pairs in input order.
    pub partials: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub closed: f64,
}

pub fn abel_trace_pb(frame: &Frame, degrees: &[usize], rhos: &[f64]) -> Result<AbelReport> {
    if rhos.is_empty() || rhos.iter().any(|&r| !(0.0 < r && r < 1.0)) {
        return Err(Error::InvalidSpec("Abel radii must lie in (0, 1)".into()));
    }
    let m = frame.m;
    // (𝔹φ_n, φ_n) is 2m-periodic in n; the signs are exact ±m, so use them.
    let mut table = Vec::with_capacity(2 * m);
    for n in 0..2 * m as i64 {
        let direct = sp_phi_b(frame, degrees, n)?;
        let predicted = lemma_sign(m, degrees, n);
        if (direct - Complex64::new(predicted, 0.0)).norm() > 1e-8 * m as f64 {
            return Err(Error::Degenerate(format!(
                "pair signature at n = {n}: computed {direct}, predicted {predicted}"
            )));
        }
        table.push(predicted);
    }
    let mut partials = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let mut s = 0.0;
        let mut weight = 1.0;
        let mut n = 0usize;
        while weight > 1e-16 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * weight * table[n % (2 * m)];
            weight *= rho;
            n += 1;
        }
        partials.push((rho, s));
    }
    let hs: Vec<f64> = partials.iter().map(|&(rho, _)| 1.0 - rho).collect();
    let vs: Vec<f64> = partials.iter().map(|&(_, s)| s).collect();
    let extrapolated = crate::extrapolate::neville_to_zero(&hs, &vs)?;
    Ok(AbelReport { partials, extrapolated, closed: trace_pb_closed(m, degrees) })
}

/// Growth scan of ℬ^{−1} along rays in the sector arg ζ ∈ (0, π/m).
///
/// Row r of ℬ^{−1} must decay like |ζ|^{−k_r}; the scan records
/// max_j |ℬ^{−1}\[r, j\]|·|ζ|^{k_r} per radius and flags unbounded growth.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    /// normalized\[radius index\]\[condition index\]: worst normalized inverse
    /// row entry over the sampled rays.
    pub normalized: Vec<Vec<f64>>,
    pub min_abs_det: f64,
    pub bounded: bool,
}

pub fn check_condition_a(
    spec: &BoundarySpec,
    frame: &Frame,
    radii: &[f64],
    rays: usize,
) -> Result<GrowthReport> {
    if radii.len() < 2 || rays == 0 {
        return Err(Error::TooFewSamples("growth scan needs ≥ 2 radii and ≥ 1 ray".into()));
    }
    let m = spec.m;
    let degrees = spec.degrees();
    let mut normalized = Vec::with_capacity(radii.len());
    let mut min_abs_det = f64::INFINITY;
    for &rho in radii {
        let mut worst = vec![0.0f64; m];
        for ray in 0..rays {
            let theta = std::f64::consts::PI * (ray as f64 + 0.5) / (m * rays) as f64;
            let zeta = Complex64::from_polar(rho, theta);
            let mat = boundary_matrix(spec, frame, zeta);
            let det = mat.determinant();
            // Hadamard bound keeps the singularity test scale-free.
            let scale: f64 = (0..m)
                .map(|l| mat.row(l).iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt())
                .product();
            min_abs_det = min_abs_det.min(det.norm());
            if det.norm() <= 1e-12 * scale {
                return Err(Error::SingularSample { zeta: format!("{zeta}"), abs_det: det.norm() });
            }
            let inv = mat
                .try_inverse()
                .ok_or(Error::SingularSample { zeta: format!("{zeta}"), abs_det: det.norm() })?;
            for (r, w) in worst.iter_mut().enumerate() {
                let row_max = inv.row(r).iter().map(|e| e.norm()).fold(0.0, f64::max);
                *w = w.max(row_max * rho.powi(degrees[r] as i32));
            }
        }
        normalized.push(worst);
    }
    let first = &normalized[0];
    let last = &normalized[normalized.len() - 1];
    let bounded = first.iter().zip(last).all(|(&f, &l)| l <= 2.0 * f.max(1e-14));
    Ok(GrowthReport { radii: radii.to_vec(), normalized, min_abs_det, bounded })
}

/// Degree filter used when checking interpolated determinant degrees.
pub fn observed_degree(poly: &ComplexPoly) -> Option<usize> {
    poly.degree_with_tol(COEFF_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_term(m: usize, degrees: &[usize]) -> (BoundarySpec, Frame) {
        let spec = BoundarySpec::one_term(m, degrees).unwrap();
        let frame = build_frame(m, degrees).unwrap();
        (spec, frame)
    }

    #[test]
    fn frame_validation() {
        assert!(build_frame(0, &[]).is_err());
        assert!(build_frame(13, &(0..13).collect::<Vec<_>>()).is_err());
        assert!(build_frame(2, &[1, 1]).is_err());
        assert!(build_frame(2, &[0, 4]).is_err());
        assert!(build_frame(2, &[0]).is_err());
        let f = build_frame(3, &[0, 1, 2]).unwrap();
        assert!((f.zp(3) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((f.zp(-1) - f.zp(5)).norm() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        // Zero condition, zero leading coefficient, decreasing degrees.
        assert!(BoundarySpec::new(1, vec![ComplexPoly::new(vec![Complex64::ZERO])]).is_err());
        assert!(BoundarySpec::new(
            1,
            vec![ComplexPoly::new(vec![Complex64::ONE, Complex64::ZERO])]
        )
        .is_err());
        assert!(BoundarySpec::one_term(2, &[1, 0]).is_err());
        assert!(BoundarySpec::one_term(2, &[0, 1]).is_ok());
    }

    #[test]
    fn boundary_matrix_m2_03() {
        // m = 2, degrees {0, 3}, ζ = 1: rows ℓ = 0, 1 over conditions {1, D³}.
        let (spec, frame) = one_term(2, &[0, 3]);
        let b = boundary_matrix(&spec, &frame, Complex64::ONE);
        assert!((b[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((b[(0, 1)] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((b[(1, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((b[(1, 1)] - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn delta_m2_01_matches_hand_value() {
        // Δ(ζ) = −(1+i)ζ for conditions {y(0) = 0, y'(0) = 0}.
        let (spec, frame) = one_term(2, &[0, 1]);
        let delta = delta_poly(&spec, &frame).unwrap();
        assert_eq!(observed_degree(&delta), Some(1));
        assert!((delta.coeff(1) - c(-1.0, -1.0)).norm() < 1e-12);
        assert!(delta.coeff(0).norm() < 1e-12);
    }

    #[test]
    fn limit_matrix_m2_01_matches_hand_value() {
        let (spec, frame) = one_term(2, &[0, 1]);
        let b = limit_matrix_b(&spec, &frame).unwrap();
        let expect = [
            [c(0.0, -1.0), c(1.0, 1.0)],
            [c(1.0, -1.0), c(0.0, 1.0)],
        ];
        for a in 0..2 {
            for bb in 0..2 {
                assert!(
                    (b[(a, bb)] - expect[a][bb]).norm() < 1e-10,
                    "entry ({a}, {bb}): {} vs {}",
                    b[(a, bb)],
                    expect[a][bb]
                );
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_limit_and_is_involution() {
        for (m, degrees) in [
            (1usize, vec![0usize]),
            (1, vec![1]),
            (2, vec![0, 1]),
            (2, vec![0, 3]),
            (2, vec![1, 2]),
            (3, vec![0, 2, 4]),
            (3, vec![1, 3, 5]),
        ] {
            let (spec, frame) = one_term(m, &degrees);
            let limit = limit_matrix_b(&spec, &frame).unwrap();
            let closed = closed_form_b(&frame, &degrees).unwrap();
            let diff = tolerance::max_abs_diff(limit.as_slice(), closed.as_slice());
            assert!(diff < 1e-10, "m = {m}, K = {degrees:?}: limit vs closed {diff:.2e}");
            let sq = &closed * &closed;
            let eye = DMatrix::<Complex64>::identity(m, m);
            let invol = tolerance::max_abs_diff(sq.as_slice(), eye.as_slice());
            assert!(invol < 1e-12, "m = {m}, K = {degrees:?}: 𝔹² − I = {invol:.2e}");
        }
    }

    #[test]
    fn pairing_matrix_m2() {
        let frame = build_frame(2, &[0, 1]).unwrap();
        let p = p_matrix(&frame);
        assert!((p[(0, 0)] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((p[(0, 1)] - c(0.5, 0.5)).norm() < 1e-14);
        assert!((p[(1, 0)] - c(0.5, -0.5)).norm() < 1e-14);
        assert!((p[(1, 1)] - c(0.5, 0.0)).norm() < 1e-14);
        // ℙ + ℙᵀ = ones.
        let sum = &p + p.transpose();
        for e in sum.iter() {
            assert!((e - Complex64::ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn trace_identity_small_cases() {
        for (m, degrees) in [(1usize, vec![0usize]), (1, vec![1]), (2, vec![0, 1]), (2, vec![0, 3]), (3, vec![0, 1, 2])]
        {
            let (spec, frame) = one_term(m, &degrees);
            let data = CharacteristicData::build(&spec, &frame).unwrap();
            let t = trace_pb(&data).unwrap();
            let closed = trace_pb_closed(m, &degrees);
            assert!((t - closed).abs() < 1e-10, "m = {m}, K = {degrees:?}: {t} vs {closed}");
        }
    }

    #[test]
    fn pair_signature_m2() {
        let frame = build_frame(2, &[0, 1]).unwrap();
        for (n, expect) in [(0i64, 2.0), (1, -2.0), (2, -2.0), (3, 2.0), (4, 2.0)] {
            let v = sp_phi_b(&frame, &[0, 1], n).unwrap();
            assert!((v - c(expect, 0.0)).norm() < 1e-12, "n = {n}: {v}");
            assert_eq!(lemma_sign(2, &[0, 1], n), expect);
        }
    }

    #[test]
    fn abel_sum_reaches_closed_trace() {
        let frame = build_frame(1, &[0]).unwrap();
        let rhos = [0.9, 0.95, 0.975, 0.9875];
        let report = abel_trace_pb(&frame, &[0], &rhos).unwrap();
        // S(ρ) = 1/(1+ρ) here, so the partials are known exactly.
        for &(rho, s) in &report.partials {
            assert!((s - 1.0 / (1.0 + rho)).abs() < 1e-12);
        }
        assert!((report.extrapolated - 0.5).abs() < 1e-6);
        assert_eq!(report.closed, 0.5);
    }

    #[test]
    fn perturbed_spec_keeps_leading_structure() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let degrees = [0usize, 2, 5];
        let spec = BoundarySpec::random_perturbed(3, &degrees, &mut rng).unwrap();
        let frame = build_frame(3, &degrees).unwrap();
        let delta = delta_poly(&spec, &frame).unwrap();
        assert_eq!(observed_degree(&delta), Some(spec.kappa()));
        let limit = limit_matrix_b(&spec, &frame).unwrap();
        let closed = closed_form_b(&frame, &degrees).unwrap();
        let diff = tolerance::max_abs_diff(limit.as_slice(), closed.as_slice());
        assert!(diff < 1e-9, "perturbed limit vs closed: {diff:.2e}");
    }

    #[test]
    fn growth_scan_bounded_for_one_term() {
        let (spec, frame) = one_term(2, &[0, 3]);
        let report =
            check_condition_a(&spec, &frame, &[1e2, 1e3, 1e4], 5).unwrap();
        assert!(report.bounded, "normalized rows: {:?}", report.normalized);
        assert!(report.min_abs_det > 0.0);
    }

    #[test]
    fn growth_scan_input_checks() {
        let (spec, frame) = one_term(1, &[0]);
        assert!(check_condition_a(&spec, &frame, &[10.0], 3).is_err());
        assert!(check_condition_a(&spec, &frame, &[10.0, 100.0], 0).is_err());
    }
}
