//! Sparse multivariate polynomials over the complex numbers.
//!
//! These are the elements of the entire-function model: finite maps from
//! multi-indices to coefficients, with exact (up to f64 rounding)
//! arithmetic. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

/// Exponent vector of a monomial; the length always equals the number of
/// variables of the polynomial owning it.
pub type MultiIndex = Vec<u32>;

/// A sparse polynomial in `vars` complex variables.
#[derive(Clone, PartialEq)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Poly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        Poly::constant(vars, ONE)
    }

    pub fn constant(vars: usize, c: Complex64) -> Self {
        let mut p = Poly::zero(vars);
        if c != ZERO {
            p.terms.insert(vec![0; vars], c);
        }
        p
    }

    /// The coordinate polynomial `z_i` (0-based).
    pub fn variable(vars: usize, i: usize) -> Self {
        assert!(i < vars, "variable index out of range");
        let mut alpha = vec![0; vars];
        alpha[i] = 1;
        Poly::monomial(alpha, ONE)
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let mut p = Poly::zero(alpha.len());
        if c != ZERO {
            p.terms.insert(alpha, c);
        }
        p
    }

    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Self {
        let mut p = Poly::zero(vars);
        for (alpha, c) in terms {
            assert_eq!(alpha.len(), vars, "multi-index arity mismatch");
            p.add_term(&alpha, c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or(ZERO)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, alpha: &[u32], c: Complex64) {
        if c == ZERO {
            return;
        }
        match self.terms.get_mut(alpha) {
            Some(entry) => {
                *entry += c;
                if *entry == ZERO {
                    self.terms.remove(alpha);
                }
            }
            None => {
                self.terms.insert(alpha.to_vec(), c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha, *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        if c == ZERO {
            return Poly::zero(self.vars);
        }
        Poly {
            vars: self.vars,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    /// Exact product by coefficient convolution.
    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut out = Poly::zero(self.vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let sum: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(&sum, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.vars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars, "evaluation point arity mismatch");
        let mut acc = ZERO;
        for (alpha, c) in &self.terms {
            let mut m = *c;
            for (i, &e) in alpha.iter().enumerate() {
                if e > 0 {
                    m *= point[i].powu(e);
                }
            }
            acc += m;
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        assert!(i < self.vars, "variable index out of range");
        let mut out = Poly::zero(self.vars);
        for (alpha, c) in &self.terms {
            if alpha[i] == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[i] -= 1;
            out.add_term(&beta, c * Complex64::new(alpha[i] as f64, 0.0));
        }
        out
    }

    /// Drop every term of total degree greater than `degree`.
    pub fn truncate(&self, degree: u32) -> Poly {
        Poly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.iter().sum::<u32>() <= degree)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// Substitute `z_i -> z_i + shift_i`, expanding binomially. The result
    /// is the Taylor expansion of the polynomial around `shift`.
    pub fn taylor_shift(&self, shift: &[Complex64]) -> Poly {
        assert_eq!(shift.len(), self.vars, "shift arity mismatch");
        let mut out = Poly::zero(self.vars);
        for (alpha, c) in &self.terms {
            let mut expanded = Poly::constant(self.vars, *c);
            for (i, &e) in alpha.iter().enumerate() {
                let factor = Poly::variable(self.vars, i).add(&Poly::constant(self.vars, shift[i]));
                expanded = expanded.mul(&factor.pow(e));
            }
            out = out.add(&expanded);
        }
        out
    }

    /// Gradient at a point.
    pub fn gradient_at(&self, point: &[Complex64]) -> Vec<Complex64> {
        (0..self.vars).map(|i| self.derivative(i).eval(point)).collect()
    }

    /// Largest coefficient magnitude difference between two polynomials.
    pub fn max_coeff_distance(&self, other: &Poly) -> f64 {
        let mut d: f64 = 0.0;
        for (alpha, c) in &self.terms {
            d = d.max((c - other.coefficient(alpha)).norm());
        }
        for (alpha, c) in &other.terms {
            d = d.max((c - self.coefficient(alpha)).norm());
        }
        d
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.4}{:+.4}i)", c.re, c.im)?;
            for (i, &e) in alpha.iter().enumerate() {
                if e == 1 {
                    write!(f, "*z{}", i + 1)?;
                } else if e > 1 {
                    write!(f, "*z{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn difference_of_squares() {
        let z = Poly::variable(1, 0);
        let a = Poly::one(1).add(&z);
        let b = Poly::one(1).sub(&z);
        let expected = Poly::one(1).sub(&z.mul(&z));
        assert_eq!(a.mul(&b), expected);
    }

    #[test]
    fn unit_is_neutral() {
        let z = Poly::variable(1, 0);
        let a = z.mul(&z).scale(c(3.0)).add(&Poly::one(1));
        assert_eq!(a.mul(&Poly::one(1)), a);
    }

    #[test]
    fn no_stored_zeros_after_cancellation() {
        let z = Poly::variable(1, 0);
        let s = z.add(&z.scale(c(-1.0)));
        assert!(s.is_zero());
        assert_eq!(s.num_terms(), 0);
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let z1 = Poly::variable(2, 0);
        let z2 = Poly::variable(2, 1);
        let p = z1.mul(&z1).add(&z1.mul(&z2).scale(c(2.0))).add(&z2.pow(3));
        let shift = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.2)];
        let shifted = p.taylor_shift(&shift);
        let pt = [Complex64::new(0.2, -0.1), Complex64::new(0.4, 0.7)];
        let direct = p.eval(&[pt[0] + shift[0], pt[1] + shift[1]]);
        let via = shifted.eval(&pt);
        assert!((direct - via).norm() < 1e-12);
    }

    #[test]
    fn derivative_power_rule() {
        let z = Poly::variable(1, 0);
        let p = z.pow(3);
        assert_eq!(p.derivative(0), z.mul(&z).scale(c(3.0)));
    }
}
