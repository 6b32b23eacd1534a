//! Sparse multivariate polynomials used as drift and diffusion coefficient
//! maps.

use crate::error::{Error, Result};

/// One monomial: `coeff * prod_i x_i^exponents[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

impl Term {
    pub fn new(exponents: Vec<u32>, coeff: f64) -> Self {
        Term { exponents, coeff }
    }
}

/// A polynomial over `input_dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    input_dim: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(input_dim: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != input_dim {
                return Err(Error::Dimension {
                    context: "polynomial term exponents",
                    expected: input_dim,
                    actual: t.exponents.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::invalid("coeff", "coefficient must be finite"));
            }
        }
        Ok(Polynomial { input_dim, terms })
    }

    pub fn zero(input_dim: usize) -> Self {
        Polynomial {
            input_dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(input_dim: usize, c: f64) -> Self {
        Polynomial {
            input_dim,
            terms: vec![Term::new(vec![0; input_dim], c)],
        }
    }

    /// Univariate polynomial from coefficients in ascending degree.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(d, &c)| Term::new(vec![d as u32], c))
            .collect();
        Polynomial {
            input_dim: 1,
            terms,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Evaluates at `x`; `x.len()` must equal `input_dim`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim);
        let mut sum = 0.0;
        for t in &self.terms {
            let mut v = t.coeff;
            for (xi, &e) in x.iter().zip(&t.exponents) {
                v *= powi(*xi, e);
            }
            sum += v;
        }
        sum
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Polynomial {
        debug_assert!(var < self.input_dim);
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[var] > 0)
            .map(|t| {
                let mut exponents = t.exponents.clone();
                exponents[var] -= 1;
                Term::new(exponents, t.coeff * f64::from(t.exponents[var]))
            })
            .collect();
        Polynomial { input_dim: self.input_dim, terms }
    }
}

#[inline]
fn powi(x: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => x.powi(e as i32),
    }
}

/// A matrix of polynomials sharing one input dimension: maps a state vector
/// to `rows x cols` outputs (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialMap {
    input_dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolynomialMap {
    pub fn new(input_dim: usize, rows: usize, cols: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension {
                context: "polynomial map entries",
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        for p in &entries {
            if p.input_dim != input_dim {
                return Err(Error::Dimension {
                    context: "polynomial map entry input",
                    expected: input_dim,
                    actual: p.input_dim,
                });
            }
        }
        Ok(PolynomialMap {
            input_dim,
            rows,
            cols,
            entries,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &Polynomial {
        &self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    /// Evaluates all entries into `out` (row-major, length `rows * cols`).
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension {
                context: "polynomial map input",
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        if out.len() != self.entries.len() {
            return Err(Error::Dimension {
                context: "polynomial map output",
                expected: self.entries.len(),
                actual: out.len(),
            });
        }
        for (o, p) in out.iter_mut().zip(&self.entries) {
            *o = p.eval(x);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_eval() {
        // 1 - 2x + 0.5x^2 at x = 3: 1 - 6 + 4.5 = -0.5
        let p = Polynomial::univariate(&[1.0, -2.0, 0.5]);
        assert!((p.eval(&[3.0]) + 0.5).abs() < 1e-15);
        assert_eq!(Polynomial::zero(1).eval(&[7.0]), 0.0);
        assert_eq!(Polynomial::constant(2, 4.0).eval(&[1.0, 9.0]), 4.0);
    }

    #[test]
    fn multivariate_eval() {
        // x*y^2 + 2x at (2, 3): 18 + 4 = 22
        let p = Polynomial::new(
            2,
            vec![
                Term::new(vec![1, 2], 1.0),
                Term::new(vec![1, 0], 2.0),
            ],
        )
        .unwrap();
        assert_eq!(p.eval(&[2.0, 3.0]), 22.0);
    }

    #[test]
    fn partial_derivative() {
        // d/dx (x y^2 + 2x + y) = y^2 + 2; d/dy = 2xy + 1
        let p = Polynomial::new(
            2,
            vec![
                Term::new(vec![1, 2], 1.0),
                Term::new(vec![1, 0], 2.0),
                Term::new(vec![0, 1], 1.0),
            ],
        )
        .unwrap();
        assert_eq!(p.partial(0).eval(&[2.0, 3.0]), 11.0);
        assert_eq!(p.partial(1).eval(&[2.0, 3.0]), 13.0);
        assert_eq!(Polynomial::constant(1, 5.0).partial(0).eval(&[9.0]), 0.0);
    }

    #[test]
    fn exponent_length_must_match_input_dim() {
        let bad = Polynomial::new(2, vec![Term::new(vec![1], 1.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn map_shape_checks() {
        let p = Polynomial::univariate(&[0.0, 1.0]);
        assert!(PolynomialMap::new(1, 2, 1, vec![p.clone()]).is_err());
        let map = PolynomialMap::new(1, 2, 1, vec![p.clone(), p]).unwrap();
        let mut out = [0.0; 2];
        map.eval_into(&[5.0], &mut out).unwrap();
        assert_eq!(out, [5.0, 5.0]);
        assert!(map.eval_into(&[5.0, 6.0], &mut out).is_err());
        let mut short = [0.0; 1];
        assert!(map.eval_into(&[5.0], &mut short).is_err());
    }
}
