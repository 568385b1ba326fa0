//! Symmetric banded eigensolver: Sturm-count bisection for the lowest
//! eigenvalues and banded-LU inverse iteration for their eigenvectors.
//!
//! The discretized operators are symmetric with m superdiagonals and reach
//! n ≈ 4000, where a dense solve is two orders of magnitude more work than
//! needed. Bisection on the inertia of A − σI (negative pivots of an
//! unpivoted LDLᵀ, by Sylvester's law) costs O(n·b²) per probe and is
//! immune to clustering; inverse iteration with a partially pivoted banded
//! LU recovers each eigenvector in O(n·b²).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Pivot clamp for the unpivoted factorization; matches the smallest value
/// whose reciprocal stays finite with headroom.
fn pivmin() -> f64 {
    f64::MIN_POSITIVE / f64::EPSILON
}

/// Symmetric banded matrix. `bands[d][i]` holds A\[i\]\[i+d\] for
/// d = 0..=half_bandwidth.
#[derive(Debug, Clone)]
pub struct SymBanded {
    pub n: usize,
    pub half_bandwidth: usize,
    bands: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        let bands = (0..=half_bandwidth).map(|d| vec![0.0; n.saturating_sub(d)]).collect();
        Self { n, half_bandwidth, bands }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.half_bandwidth {
            0.0
        } else {
            self.bands[d][lo]
        }
    }

    /// Set A\[i\]\[j\] and its mirror.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.half_bandwidth, "entry ({i}, {j}) outside bandwidth {}", self.half_bandwidth);
        self.bands[d][lo] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = self.bands[0][i] * v[i];
            for d in 1..=self.half_bandwidth {
                if i + d < self.n {
                    acc += self.bands[d][i] * v[i + d];
                }
                if i >= d {
                    acc += self.bands[d][i - d] * v[i - d];
                }
            }
            out[i] = acc;
        }
        out
    }

    /// Gershgorin bounds (lo, hi) containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut radius = 0.0;
            for d in 1..=self.half_bandwidth {
                if i + d < self.n {
                    radius += self.bands[d][i].abs();
                }
                if i >= d {
                    radius += self.bands[d][i - d].abs();
                }
            }
            lo = lo.min(self.bands[0][i] - radius);
            hi = hi.max(self.bands[0][i] + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`: negative pivots of the
    /// unpivoted LDLᵀ of A − σI, with near-zero pivots clamped negative.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let b = self.half_bandwidth;
        let n = self.n;
        // Working copy of the upper triangle, shifted.
        let mut w: Vec<Vec<f64>> = self.bands.clone();
        for x in w[0].iter_mut() {
            *x -= sigma;
        }
        let clamp = pivmin();
        let mut count = 0;
        for i in 0..n {
            let mut d = w[0][i];
            if d.abs() < clamp {
                d = -clamp;
            }
            if d < 0.0 {
                count += 1;
            }
            let reach = b.min(n - 1 - i);
            for r in 1..=reach {
                let l = w[r][i] / d;
                for c in r..=reach {
                    // A[i+r][i+c] −= (A[i+r][i]/d)·A[i][i+c]
                    w[c - r][i + r] -= l * w[c][i];
                }
            }
        }
        count
    }

    /// The `count` smallest eigenvalues, ascending, by bisection.
    pub fn lowest_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count > self.n {
            return Err(Error::InvalidSpec(format!(
                "requested {count} eigenvalues from an n = {} matrix",
                self.n
            )));
        }
        let (g_lo, g_hi) = self.gershgorin();
        let scale = g_hi.abs().max(g_lo.abs()).max(1.0);
        let mut out = Vec::with_capacity(count);
        let mut warm_lo = g_lo;
        for k in 0..count {
            // Invariant: sturm_count(lo) ≤ k < sturm_count(hi).
            let mut lo = warm_lo;
            let mut hi = g_hi + scale * 1e-12;
            for _ in 0..200 {
                if hi - lo <= 1e-13 * scale {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if self.sturm_count(mid) <= k {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let lam = 0.5 * (lo + hi);
            out.push(lam);
            // λ_{k+1} ≥ λ_k: restart the next bracket at the current root.
            warm_lo = lo;
        }
        Ok(out)
    }

    /// Eigenvector for `lambda` by inverse iteration; `index` only labels the
    /// error and seeds the start vector.
    fn inverse_iteration(&self, lambda: f64, index: usize, seed: u64) -> Result<Vec<f64>> {
        let n = self.n;
        let (g_lo, g_hi) = self.gershgorin();
        let scale = (g_hi - g_lo).abs().max(g_hi.abs()).max(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e3779b97f4a7c15));
        // Tiny shifts off the Ritz value keep the factorization solvable
        // without moving the dominant eigendirection.
        for attempt in 0..4 {
            let shift = lambda + scale * 1e-13 * attempt as f64;
            let lu = BandedLu::factor(self, shift);
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            normalize(&mut v);
            for _ in 0..30 {
                let mut w = v.clone();
                lu.solve(&mut w);
                let norm = normalize(&mut w);
                v = w;
                // Growth of 1/(n·eps·scale) means the shift is within
                // roundoff of an eigenvalue and v spans its eigenvector.
                if norm > 1.0 / (n as f64 * f64::EPSILON * scale) {
                    break;
                }
            }
            let av = self.matvec(&v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(a, x)| (a - lambda * x) * (a - lambda * x))
                .sum::<f64>()
                .sqrt();
            if res <= 1e-8 * scale {
                return Ok(v);
            }
        }
        Err(Error::EigenNonConvergence { index })
    }

    /// Lowest `count` eigenpairs. Eigenvectors are unit, orthogonalized
    /// inside near-degenerate clusters, largest component positive.
    /// Eigenvalues are Rayleigh-quotient polished: bisection stops at an
    /// absolute 1e−13·‖A‖, which for stiff discretizations is coarser than
    /// the spectral gaps of interest, while vᵀAv is accurate to ‖r‖²/gap.
    pub fn lowest_eigenpairs(&self, count: usize, seed: u64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let lams = self.lowest_eigenvalues(count)?;
        let (g_lo, g_hi) = self.gershgorin();
        let scale = (g_hi - g_lo).abs().max(1.0);
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
        let mut cluster_start = 0;
        for k in 0..count {
            if k > 0 && (lams[k] - lams[k - 1]).abs() > 1e-8 * scale {
                cluster_start = k;
            }
            let mut v = self.inverse_iteration(lams[k], k, seed)?;
            for (_, prev) in &pairs[cluster_start..k] {
                let dot: f64 = prev.iter().zip(&v).map(|(p, x)| p * x).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= dot * p;
                }
            }
            if normalize(&mut v) < 1e-6 {
                return Err(Error::EigenNonConvergence { index: k });
            }
            fix_sign(&mut v);
            let rq: f64 = self.matvec(&v).iter().zip(&v).map(|(a, x)| a * x).sum();
            pairs.push((rq, v));
        }
        // Polish can reorder values inside a cluster.
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pairs.into_iter().unzip())
    }

    /// Dense copy for small-matrix cross-checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Partially pivoted LU of A − σI in LAPACK general-band layout:
/// column j lives at ab\[j·ldab ..\], entry (i, j) at offset kl+ku+i−j, with
/// kl = ku = bandwidth and kl extra rows for pivoting fill-in.
struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    fn factor(a: &SymBanded, sigma: f64) -> Self {
        let n = a.n;
        let kl = a.half_bandwidth;
        let ku = a.half_bandwidth;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        for j in 0..n {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl).min(n - 1);
            for i in lo..=hi {
                let mut v = a.get(i, j);
                if i == j {
                    v -= sigma;
                }
                ab[j * ldab + (kl + ku + i - j)] = v;
            }
        }
        let mut ipiv = vec![0usize; n];
        let clamp = pivmin();
        for j in 0..n {
            let row_hi = (j + kl).min(n - 1);
            let mut best = j;
            let mut best_abs = ab[j * ldab + (kl + ku)].abs();
            for i in j + 1..=row_hi {
                let v = ab[j * ldab + (kl + ku + i - j)].abs();
                if v > best_abs {
                    best_abs = v;
                    best = i;
                }
            }
            ipiv[j] = best;
            let col_hi = (j + kl + ku).min(n - 1);
            if best != j {
                for c in j..=col_hi {
                    ab.swap(c * ldab + (kl + ku + j - c), c * ldab + (kl + ku + best - c));
                }
            }
            let mut piv = ab[j * ldab + (kl + ku)];
            if piv.abs() < clamp {
                // Inverse iteration wants a solvable system even at an exact
                // eigenvalue; a clamped pivot perturbs within roundoff.
                piv = if piv >= 0.0 { clamp } else { -clamp };
                ab[j * ldab + (kl + ku)] = piv;
            }
            for i in j + 1..=row_hi {
                let l = ab[j * ldab + (kl + ku + i - j)] / piv;
                ab[j * ldab + (kl + ku + i - j)] = l;
                for c in j + 1..=col_hi {
                    ab[c * ldab + (kl + ku + i - c)] -= l * ab[c * ldab + (kl + ku + j - c)];
                }
            }
        }
        Self { n, kl, ku, ldab, ab, ipiv }
    }

    fn solve(&self, b: &mut [f64]) {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        for j in 0..n {
            b.swap(j, self.ipiv[j]);
            let row_hi = (j + kl).min(n - 1);
            let bj = b[j];
            for i in j + 1..=row_hi {
                b[i] -= self.ab[j * ldab + (kl + ku + i - j)] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[j * ldab + (kl + ku)];
            let bj = b[j];
            let row_lo = j.saturating_sub(kl + ku);
            for i in row_lo..j {
                b[i] -= self.ab[j * ldab + (kl + ku + i - j)] * bj;
            }
        }
    }
}
