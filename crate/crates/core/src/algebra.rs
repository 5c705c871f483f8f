//! The three computable model algebras and their elements.
//!
//! * `Entire`: the dense polynomial subalgebra of entire functions on
//!   complex n-space, with exact sparse arithmetic.
//! * `Matrix`: the full matrix algebra with the operator norm.
//! * `Function`: complex k-tuples under the pointwise product; a finite
//!   brute-force oracle for all commutative constructions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{AmError, Result};
use crate::poly::Poly;
use crate::seminorm::Seminorm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Entire { vars: usize },
    Matrix { size: usize },
    Function { points: usize },
}

impl Model {
    pub fn check_same(self, other: Model) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(AmError::ModelMismatch { left: self, right: other })
        }
    }
}

/// An element of one of the model algebras.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Entire(Poly),
    Matrix(DMatrix<Complex64>),
    Function(Vec<Complex64>),
}

impl Element {
    pub fn model(&self) -> Model {
        match self {
            Element::Entire(p) => Model::Entire { vars: p.vars() },
            Element::Matrix(m) => Model::Matrix { size: m.nrows() },
            Element::Function(v) => Model::Function { points: v.len() },
        }
    }

    pub fn unit(model: Model) -> Element {
        match model {
            Model::Entire { vars } => Element::Entire(Poly::one(vars)),
            Model::Matrix { size } => Element::Matrix(DMatrix::identity(size, size)),
            Model::Function { points } => {
                Element::Function(vec![Complex64::new(1.0, 0.0); points])
            }
        }
    }

    pub fn zero(model: Model) -> Element {
        match model {
            Model::Entire { vars } => Element::Entire(Poly::zero(vars)),
            Model::Matrix { size } => Element::Matrix(DMatrix::zeros(size, size)),
            Model::Function { points } => {
                Element::Function(vec![Complex64::new(0.0, 0.0); points])
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Entire(p) => p.is_zero(),
            Element::Matrix(m) => m.iter().all(|c| *c == Complex64::new(0.0, 0.0)),
            Element::Function(v) => v.iter().all(|c| *c == Complex64::new(0.0, 0.0)),
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.model().check_same(other.model())?;
        Ok(match (self, other) {
            (Element::Entire(a), Element::Entire(b)) => Element::Entire(a.mul(b)),
            (Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a * b),
            (Element::Function(a), Element::Function(b)) => {
                Element::Function(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            _ => unreachable!("models already checked equal"),
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.model().check_same(other.model())?;
        Ok(match (self, other) {
            (Element::Entire(a), Element::Entire(b)) => Element::Entire(a.add(b)),
            (Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a + b),
            (Element::Function(a), Element::Function(b)) => {
                Element::Function(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => unreachable!("models already checked equal"),
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Element {
        match self {
            Element::Entire(p) => Element::Entire(p.scale(c)),
            Element::Matrix(m) => Element::Matrix(m.map(|x| x * c)),
            Element::Function(v) => Element::Function(v.iter().map(|x| x * c).collect()),
        }
    }

    pub fn as_poly(&self) -> Result<&Poly> {
        match self {
            Element::Entire(p) => Ok(p),
            _ => Err(AmError::InvalidArgument("expected an entire-model element".into())),
        }
    }

    pub fn as_matrix(&self) -> Result<&DMatrix<Complex64>> {
        match self {
            Element::Matrix(m) => Ok(m),
            _ => Err(AmError::InvalidArgument("expected a matrix-model element".into())),
        }
    }

    pub fn as_tuple(&self) -> Result<&[Complex64]> {
        match self {
            Element::Function(v) => Ok(v),
            _ => Err(AmError::InvalidArgument("expected a function-model element".into())),
        }
    }
}

/// A continuous character of a commutative model algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Character {
    /// Evaluation at a point of complex n-space (entire model).
    Point(Vec<Complex64>),
    /// Coordinate projection of a k-tuple (function model).
    Coordinate { index: usize, points: usize },
}

impl Character {
    pub fn model(&self) -> Model {
        match self {
            Character::Point(w) => Model::Entire { vars: w.len() },
            Character::Coordinate { points, .. } => Model::Function { points: *points },
        }
    }

    pub fn eval(&self, a: &Element) -> Result<Complex64> {
        self.model().check_same(a.model())?;
        Ok(match (self, a) {
            (Character::Point(w), Element::Entire(p)) => p.eval(w),
            (Character::Coordinate { index, .. }, Element::Function(v)) => v[*index],
            _ => unreachable!("models already checked equal"),
        })
    }

    /// The Gelfand transform of `a` evaluated at this character.
    pub fn gelfand(&self, a: &Element) -> Result<Complex64> {
        self.eval(a)
    }
}

/// Spectrum sample and spectral radius of an element.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Finite spectrum, available on the matrix and function models.
    pub spectrum: Option<Vec<Complex64>>,
    /// max |lambda| over the computed spectrum.
    pub radius: f64,
}

/// Exact spectral data on the finite-spectrum models. The entire model has
/// no finite spectrum; use [`spectral_radius`] there.
pub fn spectral_data(a: &Element) -> Result<SpectralData> {
    match a {
        Element::Matrix(m) => {
            let ev = m
                .clone()
                .eigenvalues()
                .ok_or_else(|| AmError::InvalidArgument("eigenvalue iteration failed".into()))?;
            let spectrum: Vec<Complex64> = ev.iter().copied().collect();
            let radius = spectrum.iter().map(|l| l.norm()).fold(0.0, f64::max);
            Ok(SpectralData { spectrum: Some(spectrum), radius })
        }
        Element::Function(v) => {
            let radius = v.iter().map(|l| l.norm()).fold(0.0, f64::max);
            Ok(SpectralData { spectrum: Some(v.clone()), radius })
        }
        Element::Entire(_) => Err(AmError::Unsupported(
            "finite spectrum is only defined on the matrix and function models".into(),
        )),
    }
}

/// K-th iterate of the spectral-radius limit formula along repeated
/// squaring: p(a^(2^K))^(1/2^K), computed with running renormalisation so
/// intermediate norms never overflow.
pub fn spectral_radius(a: &Element, p: &Seminorm, iterations: u32) -> Result<f64> {
    if iterations < 1 {
        return Err(AmError::InvalidArgument("iteration count must be >= 1".into()));
    }
    p.model().check_same(a.model())?;
    let start = p.eval(a)?;
    if start == 0.0 {
        return Ok(0.0);
    }
    // Invariant: a^(2^i) = exp(log_scale) * current, with p(current) = 1.
    let mut current = a.scale(Complex64::new(1.0 / start, 0.0));
    let mut log_scale = start.ln();
    for _ in 0..iterations {
        let sq = current.mul(&current)?;
        let m = p.eval(&sq)?;
        if m == 0.0 {
            return Ok(0.0);
        }
        current = sq.scale(Complex64::new(1.0 / m, 0.0));
        log_scale = 2.0 * log_scale + m.ln();
    }
    Ok((log_scale / f64::powi(2.0, iterations as i32)).exp())
}

/// For a nonzero element of a commutative model, search an evaluation grid
/// for a character that does not vanish on it. On the entire model the grid
/// exceeds the degree in every variable, so a miss is impossible for a
/// nonzero polynomial.
pub fn semisimplicity_witness(a: &Element) -> Result<Option<Character>> {
    match a {
        Element::Entire(pl) => {
            if pl.is_zero() {
                return Ok(None);
            }
            let n = pl.vars();
            let d = pl.degree() as usize + 1;
            let mut idx = vec![0usize; n];
            loop {
                let w: Vec<Complex64> = idx
                    .iter()
                    .map(|&i| Complex64::new(1.0 + i as f64 * 0.5, 0.0))
                    .collect();
                if pl.eval(&w).norm() > 0.0 {
                    return Ok(Some(Character::Point(w)));
                }
                let mut carry = 0;
                loop {
                    idx[carry] += 1;
                    if idx[carry] < d {
                        break;
                    }
                    idx[carry] = 0;
                    carry += 1;
                    if carry == n {
                        return Ok(None);
                    }
                }
            }
        }
        Element::Function(v) => Ok(v
            .iter()
            .position(|c| c.norm() > 0.0)
            .map(|index| Character::Coordinate { index, points: v.len() })),
        Element::Matrix(_) => Err(AmError::Unsupported(
            "characters are only defined on the commutative models".into(),
        )),
    }
}
