//! Line-oriented config files.
//!
//! One `key = value` pair per line, `#` starts a comment, repeated keys form
//! tables (pieces, conditions). Three file kinds share the format:
//!
//! Model (`m`, `K` or `condition` lines, `X`, `N`, `potential` pieces,
//! optional `lower` terms):
//! ```text
//! m = 1
//! K = 0
//! X = 12
//! N = 4000
//! potential = 0 inf 0 0 1      # x² on [0, ∞)
//! lower = 2 : 0 4 -1           # optional p·D² term, piece [0, 4)
//! ```
//!
//! Perturbation (`piece` lines only):
//! ```text
//! piece = 0 1 1 -2 1           # (1 − x)² on [0, 1)
//! ```
//!
//! Boundary spec for the algebra commands (`m`, `condition` coefficient
//! vectors ascending in degree; multi-term polynomials allowed here):
//! ```text
//! m = 2
//! condition = 1                # y(0) = 0
//! condition = 0.5 0 0 1        # y'''(0) + 0.5·y(0) = 0
//! ```

use num_complex::Complex64;

use crate::bc_algebra::BoundarySpec;
use crate::error::{Error, Result};
use crate::piecewise::{Piece, PiecewisePoly};
use crate::poly::ComplexPoly;
use crate::spectral_solver::{LowerTerm, OperatorModel};

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

/// (line number, key, value) triples, comments and blanks stripped.
fn parse_lines(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(config_err(line, format!("expected `key = value`, got {content:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(config_err(line, "empty key or value"));
        }
        out.push((line, key.to_string(), value.to_string()));
    }
    Ok(out)
}

fn parse_f64(line: usize, token: &str) -> Result<f64> {
    if token.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    token
        .parse()
        .map_err(|_| config_err(line, format!("expected a number, got {token:?}")))
}

fn parse_usize(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| config_err(line, format!("expected a nonnegative integer, got {token:?}")))
}

fn parse_piece(line: usize, value: &str) -> Result<Piece> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    if tokens.len() < 3 {
        return Err(config_err(line, "piece needs `lo hi c0 [c1 ...]`"));
    }
    let lo = parse_f64(line, tokens[0])?;
    let hi = parse_f64(line, tokens[1])?;
    let coeffs = tokens[2..]
        .iter()
        .map(|t| parse_f64(line, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Piece { lo, hi, coeffs })
}

/// Degree of a one-term condition coefficient vector; multi-term vectors are
/// rejected here because only one-term families have a registered grid
/// discretization (the algebra commands accept general polynomials).
fn one_term_degree(line: usize, coeffs: &[f64]) -> Result<usize> {
    let nonzero: Vec<usize> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(d, &c)| (c != 0.0).then_some(d))
        .collect();
    match nonzero.as_slice() {
        [] => Err(config_err(line, "condition has no nonzero coefficient")),
        [d] => Ok(*d),
        _ => Err(config_err(
            line,
            "multi-term boundary polynomial: the numerical path supports only one-term \
             conditions D^k y(0) = 0 from the registered self-adjoint families; use the \
             algebra commands (identities, green) for general polynomials",
        )),
    }
}

struct ScalarSlot<T> {
    key: &'static str,
    value: Option<T>,
}

impl<T> ScalarSlot<T> {
    fn new(key: &'static str) -> Self {
        Self { key, value: None }
    }

    fn set(&mut self, line: usize, value: T) -> Result<()> {
        if self.value.is_some() {
            return Err(config_err(line, format!("duplicate key `{}`", self.key)));
        }
        self.value = Some(value);
        Ok(())
    }

    fn required(self) -> Result<T> {
        self.value
            .ok_or_else(|| config_err(0, format!("missing required key `{}`", self.key)))
    }
}

/// Parse a model config into an assembly-ready operator description.
pub fn parse_model_config(text: &str) -> Result<OperatorModel> {
    let mut m = ScalarSlot::new("m");
    let mut x_max = ScalarSlot::new("X");
    let mut n = ScalarSlot::new("N");
    let mut k_set: Option<(usize, Vec<usize>)> = None;
    let mut condition_degrees: Vec<usize> = Vec::new();
    let mut potential_pieces: Vec<Piece> = Vec::new();
    let mut lower_pieces: Vec<(usize, Vec<Piece>)> = Vec::new();
    for (line, key, value) in parse_lines(text)? {
        match key.as_str() {
            "m" => m.set(line, parse_usize(line, &value)?)?,
            "X" => x_max.set(line, parse_f64(line, &value)?)?,
            "N" => n.set(line, parse_usize(line, &value)?)?,
            "K" => {
                if k_set.is_some() {
                    return Err(config_err(line, "duplicate key `K`"));
                }
                let degrees = value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| parse_usize(line, t))
                    .collect::<Result<Vec<_>>>()?;
                k_set = Some((line, degrees));
            }
            "condition" => {
                let tokens: Vec<&str> = value.split_whitespace().collect();
                let coeffs = tokens
                    .iter()
                    .map(|t| parse_f64(line, t))
                    .collect::<Result<Vec<_>>>()?;
                condition_degrees.push(one_term_degree(line, &coeffs)?);
            }
            "potential" => potential_pieces.push(parse_piece(line, &value)?),
            "lower" => {
                let (order_part, piece_part) = match value.split_once(':') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => value
                        .split_once(char::is_whitespace)
                        .map(|(a, b)| (a.trim(), b.trim()))
                        .ok_or_else(|| config_err(line, "lower needs `k : lo hi c0 [c1 ...]`"))?,
                };
                let order = parse_usize(line, order_part)?;
                let piece = parse_piece(line, piece_part)?;
                match lower_pieces.iter_mut().find(|(o, _)| *o == order) {
                    Some((_, pieces)) => pieces.push(piece),
                    None => lower_pieces.push((order, vec![piece])),
                }
            }
            other => return Err(config_err(line, format!("unknown model key `{other}`"))),
        }
    }
    let degrees = match (k_set, condition_degrees.is_empty()) {
        (Some((line, _)), false) => {
            return Err(config_err(line, "give either `K` or `condition` lines, not both"));
        }
        (Some((_, k)), true) => k,
        (None, false) => {
            let mut d = condition_degrees;
            d.sort_unstable();
            d
        }
        (None, true) => return Err(config_err(0, "missing boundary conditions: `K` or `condition` lines")),
    };
    let lower_terms = lower_pieces
        .into_iter()
        .map(|(order, pieces)| {
            Ok(LowerTerm { order, coefficient: PiecewisePoly::new(pieces)? })
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorModel::new(
        m.required()?,
        degrees,
        x_max.required()?,
        n.required()?,
        PiecewisePoly::new(potential_pieces)?,
        lower_terms,
    )
}

/// Parse a perturbation config: `piece` lines only.
pub fn parse_perturbation_config(text: &str) -> Result<PiecewisePoly> {
    let mut pieces = Vec::new();
    for (line, key, value) in parse_lines(text)? {
        match key.as_str() {
            "piece" => pieces.push(parse_piece(line, &value)?),
            other => return Err(config_err(line, format!("unknown perturbation key `{other}`"))),
        }
    }
    PiecewisePoly::new(pieces)
}

/// Parse a boundary spec for the algebra commands: `m` plus `condition`
/// coefficient vectors, ascending degree, general polynomials allowed.
pub fn parse_boundary_config(text: &str) -> Result<BoundarySpec> {
    let mut m = ScalarSlot::new("m");
    let mut conditions: Vec<ComplexPoly> = Vec::new();
    for (line, key, value) in parse_lines(text)? {
        match key.as_str() {
            "m" => m.set(line, parse_usize(line, &value)?)?,
            "condition" => {
                let coeffs = value
                    .split_whitespace()
                    .map(|t| parse_f64(line, t).map(|re| Complex64::new(re, 0.0)))
                    .collect::<Result<Vec<_>>>()?;
                conditions.push(ComplexPoly::new(coeffs));
            }
            other => return Err(config_err(line, format!("unknown boundary key `{other}`"))),
        }
    }
    BoundarySpec::new(m.required()?, conditions)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OSCILLATOR: &str = "\
# half-line oscillator, Dirichlet
m = 1
K = 0
X = 12
N = 4000
potential = 0 inf 0 0 1
";

    #[test]
    fn model_roundtrip() {
        let model = parse_model_config(OSCILLATOR).unwrap();
        assert_eq!(model.m, 1);
        assert_eq!(model.degrees, vec![0]);
        assert_eq!(model.n, 4000);
        assert!((model.potential.eval(3.0) - 9.0).abs() < 1e-15);
        assert!(model.lower_terms.is_empty());
    }

    #[test]
    fn one_term_conditions_accepted_in_model() {
        let text = "m = 2\ncondition = 0 0 1\ncondition = 1\nX = 8\nN = 1500\n";
        let model = parse_model_config(text).unwrap();
        assert_eq!(model.degrees, vec![0, 2]);
    }

    #[test]
    fn multi_term_condition_rejected_for_models() {
        let text = "m = 1\ncondition = 0.5 1\nX = 12\nN = 4000\n";
        match parse_model_config(text) {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("one-term"), "{msg}");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn lower_terms_grouped_by_order() {
        let text = "m = 2\nK = 0,1\nX = 8\nN = 1500\nlower = 2 : 0 1 -1\nlower = 2 : 2 3 -0.5\n";
        let model = parse_model_config(text).unwrap();
        assert_eq!(model.lower_terms.len(), 1);
        assert_eq!(model.lower_terms[0].order, 2);
        assert_eq!(model.lower_terms[0].coefficient.pieces().len(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "m = 1\nK = 0\nX = twelve\nN = 100\n";
        match parse_model_config(text) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let dup = "m = 1\nm = 2\nK = 0\nX = 1\nN = 100\n";
        match parse_model_config(dup) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_model_config("m = 1\nX = 1\nN = 100\n") {
            Err(Error::Config { msg, .. }) => assert!(msg.contains("boundary")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perturbation_and_boundary_files() {
        let q = parse_perturbation_config("piece = 0 1 1 -2 1\n").unwrap();
        assert_eq!(q.value_at_zero_plus(), 1.0);
        let spec = parse_boundary_config("m = 2\ncondition = 1\ncondition = 0.5 0 0 1\n").unwrap();
        assert_eq!(spec.degrees(), vec![0, 3]);
        assert!(parse_boundary_config("m = 2\ncondition = 1\n").is_err());
    }
}
