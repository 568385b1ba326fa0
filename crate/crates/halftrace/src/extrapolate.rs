//! Extrapolation helpers: Neville tableau to h = 0 and oscillation-averaged
//! tail estimates for slowly converging partial sums.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Neville extrapolation of (h_i, v_i) to h = 0, complex values.
///
/// Returns the tableau diagonal: entry k is the extrapolant built from the
/// first k+1 points. The final entry uses all points. Callers that only need
/// the limit take `.last()`; ladder-convergence checks compare the last two
/// entries.
pub fn neville_diagonal(hs: &[f64], vs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = hs.len();
    if n == 0 || vs.len() != n {
        return Err(Error::TooFewSamples(format!(
            "neville needs matching nonempty inputs, got {} nodes and {} values",
            n,
            vs.len()
        )));
    }
    for (i, &h) in hs.iter().enumerate() {
        for &h2 in &hs[i + 1..] {
            if (h - h2).abs() < 1e-300 {
                return Err(Error::Degenerate(format!("repeated extrapolation node h = {h}")));
            }
        }
    }
    let mut tableau = vs.to_vec();
    let mut diag = vec![tableau[0]];
    for k in 1..n {
        // After this pass tableau[i] holds the degree-k interpolant through
        // points i−k..=i evaluated at 0.
        for i in (k..n).rev() {
            let num = tableau[i] * hs[i - k] - tableau[i - 1] * hs[i];
            tableau[i] = num / (hs[i - k] - hs[i]);
        }
        diag.push(tableau[k]);
    }
    Ok(diag)
}

/// Real-valued wrapper around [`neville_diagonal`].
pub fn neville_to_zero(hs: &[f64], vs: &[f64]) -> Result<f64> {
    let cvs: Vec<Complex64> = vs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(neville_diagonal(hs, &cvs)?.last().unwrap().re)
}

/// Tail estimate of an oscillating, slowly drifting sequence.
#[derive(Debug, Clone, Copy)]
pub struct WindowEstimate {
    /// Drift-corrected limit estimate 2·A_short − A_long.
    pub value: f64,
    /// |A_short − A_long|, an uncertainty scale for `value`.
    pub variation: f64,
    /// Averaging window length W actually used.
    pub window: usize,
}

/// Average out a period-p oscillation and first-order drift from the tail of
/// `values`.
///
/// W is the largest multiple of `period` not exceeding max(period, N/3);
/// A_short and A_long are the means over the last W and last 2W entries, and
/// the returned value is the Richardson combination 2·A_short − A_long, which
/// cancels a drift linear in the window position.
pub fn window_average(values: &[f64], period: usize) -> Result<WindowEstimate> {
    let n = values.len();
    if period == 0 {
        return Err(Error::InvalidSpec("window period must be ≥ 1".into()));
    }
    let w = ((n / 3).max(period) / period) * period;
    if n < 2 * w || w == 0 {
        return Err(Error::TooFewSamples(format!(
            "window average needs ≥ 2·period = {} values, got {n}",
            2 * period
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("window average input".into()));
    }
    let mean = |slice: &[f64]| slice.iter().sum::<f64>() / slice.len() as f64;
    let a_short = mean(&values[n - w..]);
    let a_long = mean(&values[n - 2 * w..]);
    Ok(WindowEstimate {
        value: 2.0 * a_short - a_long,
        variation: (a_short - a_long).abs(),
        window: w,
    })
}
