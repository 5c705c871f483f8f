//! States, pure states and spectral states of the quotient Banach
//! algebras, with the quantitative norm comparisons that make the
//! pure-state spectral functor work.
//!
//! A functional f is a state of the quotient by p when its dual norm
//! equals its value at the unit; normalised states carry f(1) = 1. Pure
//! states are produced constructively per model (vector states, point
//! masses, characters) and certified extreme only through sampled
//! midpoint tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::algebra::{spectral_data, Element, Model};
use crate::error::{AmError, Result};
use crate::poly::MultiIndex;
use crate::seminorm::{monomial_weight, Seminorm, SeminormKind};

/// Absolute tolerance of the state condition.
pub const STATE_TOL: f64 = 1e-9;

/// A continuous linear functional on a model algebra.
#[derive(Clone, Debug)]
pub enum Functional {
    /// Evaluation at a point of complex n-space (a character of the
    /// entire model).
    Evaluation(Vec<Complex64>),
    /// Finite coefficient-dual vector on the entire model:
    /// f(sum c_alpha z^alpha) = sum f_alpha c_alpha.
    CoefficientDual { vars: usize, entries: Vec<(MultiIndex, Complex64)> },
    /// Trace pairing a -> tr(F a) on the matrix model.
    MatrixPairing(DMatrix<Complex64>),
    /// Weighted sum a -> sum w_i a_i on the function model.
    WeightTuple(Vec<Complex64>),
    /// A scalar multiple of another functional.
    Scaled { factor: Complex64, inner: Box<Functional> },
}

impl Functional {
    pub fn model(&self) -> Model {
        match self {
            Functional::Evaluation(w) => Model::Entire { vars: w.len() },
            Functional::CoefficientDual { vars, .. } => Model::Entire { vars: *vars },
            Functional::MatrixPairing(f) => Model::Matrix { size: f.nrows() },
            Functional::WeightTuple(w) => Model::Function { points: w.len() },
            Functional::Scaled { inner, .. } => inner.model(),
        }
    }

    pub fn apply(&self, a: &Element) -> Result<Complex64> {
        self.model().check_same(a.model())?;
        Ok(match (self, a) {
            (Functional::Evaluation(w), Element::Entire(p)) => p.eval(w),
            (Functional::CoefficientDual { entries, .. }, Element::Entire(p)) => entries
                .iter()
                .map(|(alpha, f)| f * p.coefficient(alpha))
                .sum(),
            (Functional::MatrixPairing(f), Element::Matrix(m)) => (f * m).trace(),
            (Functional::WeightTuple(w), Element::Function(v)) => {
                w.iter().zip(v).map(|(wi, vi)| wi * vi).sum()
            }
            (Functional::Scaled { factor, inner }, _) => factor * inner.apply(a)?,
            _ => unreachable!("models already checked equal"),
        })
    }

    pub fn unit_value(&self) -> Result<Complex64> {
        self.apply(&Element::unit(self.model()))
    }

    /// Vector state a -> x* a x of the matrix model, as the trace pairing
    /// with the rank-one projector on x.
    pub fn vector_state(x: &DVector<Complex64>) -> Functional {
        let xn = x.normalize();
        Functional::MatrixPairing(&xn * xn.adjoint())
    }

    /// The normalised trace of the matrix model.
    pub fn normalized_trace(size: usize) -> Functional {
        Functional::MatrixPairing(
            DMatrix::identity(size, size).map(|c: Complex64| c / size as f64),
        )
    }

    /// The point mass at coordinate i of the function model.
    pub fn point_mass(points: usize, index: usize) -> Functional {
        let mut w = vec![Complex64::new(0.0, 0.0); points];
        w[index] = Complex64::new(1.0, 0.0);
        Functional::WeightTuple(w)
    }

    pub fn scale(&self, c: Complex64) -> Functional {
        match self {
            Functional::CoefficientDual { vars, entries } => Functional::CoefficientDual {
                vars: *vars,
                entries: entries.iter().map(|(a, f)| (a.clone(), f * c)).collect(),
            },
            Functional::MatrixPairing(f) => Functional::MatrixPairing(f.map(|x| x * c)),
            Functional::WeightTuple(w) => {
                Functional::WeightTuple(w.iter().map(|x| x * c).collect())
            }
            other => Functional::Scaled { factor: c, inner: Box::new(other.clone()) },
        }
    }
}

/// Outcome of a dual-norm computation against a fixed seminorm.
#[derive(Clone, Debug, PartialEq)]
pub enum DualNorm {
    Finite(f64),
    /// The seminorm vanishes on a direction carrying functional mass.
    Unbounded { direction: String },
}

impl DualNorm {
    pub fn finite(&self) -> Option<f64> {
        match self {
            DualNorm::Finite(v) => Some(*v),
            DualNorm::Unbounded { .. } => None,
        }
    }
}

/// Exact dual norm of a functional with respect to a parametric seminorm.
///
/// * entire model, weights r: the dual of the weighted coefficient-sum
///   norm is the weighted sup over monomial directions, truncated at the
///   given total degree;
/// * matrix model: trace norm of the pairing matrix divided by the scale;
/// * function model: weighted absolute sum over the seminorm's subset.
pub fn dual_norm(f: &Functional, p: &Seminorm, degree: u32) -> Result<DualNorm> {
    f.model().check_same(p.model())?;
    match (f, p.kind()) {
        (Functional::Evaluation(w), SeminormKind::EntireWeights(r)) => {
            // sup over monomials of |w^alpha| / r^alpha with |alpha| <= degree:
            // the per-variable ratios multiply, so the sup is attained by
            // loading everything on the largest ratio.
            let mut worst: f64 = 1.0; // alpha = 0 contributes 1
            let mut bad_dir = None;
            for (i, (wi, ri)) in w.iter().zip(r).enumerate() {
                if *ri == 0.0 {
                    if wi.norm() > 0.0 {
                        bad_dir = Some(i);
                    }
                    continue;
                }
                worst = worst.max(wi.norm() / ri);
            }
            if let Some(i) = bad_dir {
                return Ok(DualNorm::Unbounded { direction: format!("z{}", i + 1) });
            }
            Ok(DualNorm::Finite(worst.powi(degree as i32).max(1.0)))
        }
        (Functional::CoefficientDual { entries, .. }, SeminormKind::EntireWeights(r)) => {
            let mut sup: f64 = 0.0;
            for (alpha, fa) in entries {
                if alpha.iter().sum::<u32>() > degree || fa.norm() == 0.0 {
                    continue;
                }
                let weight = monomial_weight(r, alpha);
                if weight == 0.0 {
                    return Ok(DualNorm::Unbounded { direction: format!("monomial {:?}", alpha) });
                }
                sup = sup.max(fa.norm() / weight);
            }
            Ok(DualNorm::Finite(sup))
        }
        (Functional::MatrixPairing(fm), SeminormKind::MatrixScale { scale, .. }) => {
            let trace_norm: f64 = fm.clone().svd(false, false).singular_values.iter().sum();
            Ok(DualNorm::Finite(trace_norm / scale))
        }
        (Functional::WeightTuple(w), SeminormKind::FunctionSubset { subset, .. }) => {
            for (i, wi) in w.iter().enumerate() {
                if wi.norm() > 0.0 && !subset.contains(&i) {
                    return Ok(DualNorm::Unbounded { direction: format!("coordinate {}", i + 1) });
                }
            }
            Ok(DualNorm::Finite(subset.iter().map(|i| w[*i].norm()).sum()))
        }
        (Functional::Scaled { factor, inner }, _) => Ok(match dual_norm(inner, p, degree)? {
            DualNorm::Finite(v) => DualNorm::Finite(factor.norm() * v),
            unbounded => unbounded,
        }),
        (_, SeminormKind::Zero(_)) => {
            // Only the zero functional is bounded against the zero seminorm.
            let probe = f.unit_value()?;
            if probe.norm() == 0.0 {
                Ok(DualNorm::Finite(0.0))
            } else {
                Ok(DualNorm::Unbounded { direction: "unit".into() })
            }
        }
        _ => Err(AmError::Unsupported(
            "dual norms are computed against parametric seminorms only".into(),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ternary {
    Yes,
    No,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct StateVerdict {
    pub dual_norm: DualNorm,
    pub unit_value: Complex64,
    pub is_state: bool,
    pub is_pure: Ternary,
    pub is_spectral: Ternary,
}

/// State verdict with tolerance [`STATE_TOL`]: dual norm equal to f(1)
/// and f(1) = 1.
pub fn is_state(f: &Functional, p: &Seminorm, degree: u32) -> Result<StateVerdict> {
    let dn = dual_norm(f, p, degree)?;
    let unit_value = f.unit_value()?;
    let is_state = match dn {
        DualNorm::Finite(v) => {
            (v - unit_value.re).abs() <= STATE_TOL && (unit_value - Complex64::new(1.0, 0.0)).norm() <= STATE_TOL
        }
        DualNorm::Unbounded { .. } => false,
    };
    Ok(StateVerdict {
        dual_norm: dn,
        unit_value,
        is_state,
        is_pure: Ternary::Undetermined,
        is_spectral: Ternary::Undetermined,
    })
}

/// Constructive pure states adapted to the seminorm's model: vector states
/// from random unit vectors, point masses on the seminorm's subset,
/// characters inside the weight polydisc.
pub fn pure_states_sample(p: &Seminorm, count: usize, seed: u64) -> Result<Vec<Functional>> {
    if count < 1 {
        return Err(AmError::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match p.kind() {
        SeminormKind::MatrixScale { size, .. } => Ok((0..count)
            .map(|_| {
                let x = DVector::from_fn(*size, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                Functional::vector_state(&x)
            })
            .collect()),
        SeminormKind::FunctionSubset { points, subset } => {
            let base: Vec<usize> = subset.iter().copied().collect();
            if base.is_empty() {
                return Err(AmError::InvalidArgument(
                    "the zero subset seminorm carries no states".into(),
                ));
            }
            Ok((0..count.min(base.len()))
                .map(|j| Functional::point_mass(*points, base[j]))
                .collect())
        }
        SeminormKind::EntireWeights(r) => Ok((0..count)
            .map(|_| {
                let w: Vec<Complex64> = r
                    .iter()
                    .map(|ri| {
                        let rad = ri * rng.gen_range(0.0f64..1.0).sqrt();
                        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                        Complex64::from_polar(rad, phase)
                    })
                    .collect();
                Functional::Evaluation(w)
            })
            .collect()),
        _ => Err(AmError::Unsupported(
            "pure-state sampling needs a parametric seminorm".into(),
        )),
    }
}

/// Sampled extremality certificate: search candidate pairs (g, h) for a
/// decomposition f = (g + h)/2 with g != h, comparing on probe elements.
/// Returns true when no decomposition is found.
pub fn midpoint_extremality_probe(
    f: &Functional,
    candidates: &[Functional],
    probes: &[Element],
) -> Result<bool> {
    let differ = |a: &Functional, b: &Functional| -> Result<bool> {
        for e in probes {
            if (a.apply(e)? - b.apply(e)?).norm() > 1e-9 {
                return Ok(true);
            }
        }
        Ok(false)
    };
    for (i, g) in candidates.iter().enumerate() {
        for h in &candidates[i..] {
            if !differ(g, h)? {
                continue;
            }
            let mut is_midpoint = true;
            for e in probes {
                let mid = (g.apply(e)? + h.apply(e)?) / 2.0;
                if (f.apply(e)? - mid).norm() > 1e-9 {
                    is_midpoint = false;
                    break;
                }
            }
            if is_midpoint {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Numerical radius of a matrix: the sup of |x* a x| over unit vectors,
/// computed as the max over an angle grid of the top eigenvalue of the
/// rotated Hermitian parts. Nondecreasing under grid refinement.
pub fn numerical_radius(a: &DMatrix<Complex64>, grid: usize) -> Result<f64> {
    if grid < 8 {
        return Err(AmError::InvalidArgument("angle grid must have >= 8 points".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for k in 0..grid {
        let theta = std::f64::consts::TAU * k as f64 / grid as f64;
        let phase = Complex64::from_polar(1.0, theta);
        let h = (a.map(|x| x * phase) + a.adjoint().map(|x| x * phase.conj())).scale(0.5);
        let eig = h.symmetric_eigen();
        best = best.max(eig.eigenvalues.max());
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct NormStateReport {
    /// sup over the sampled state space of |f(a)|.
    pub state_sup: f64,
    /// Whether the sup is exact (matrix model) or a sampled lower bound.
    pub state_sup_exact: bool,
    pub seminorm_value: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// The two-sided comparison between a seminorm and its state-space sup:
/// state_sup <= p(a) <= e * state_sup. On the matrix model the state sup
/// is the numerical radius and the bound is asserted; elsewhere the
/// sampled sup only certifies the lower inequality.
pub fn bohnenblust_karlin_check(a: &Element, p: &Seminorm, seed: u64) -> Result<NormStateReport> {
    if a.is_zero() {
        return Err(AmError::InvalidArgument("the zero element is excluded".into()));
    }
    p.model().check_same(a.model())?;
    let pa = p.eval(a)?;
    let (state_sup, exact) = match a {
        Element::Matrix(m) => (numerical_radius(m, 256)?, true),
        _ => {
            let states = pure_states_sample(p, 200, seed)?;
            let mut sup: f64 = 0.0;
            for f in &states {
                sup = sup.max(f.apply(a)?.norm());
            }
            (sup, false)
        }
    };
    let e = std::f64::consts::E;
    let lower_ok = state_sup <= pa * (1.0 + 1e-9) + 1e-12;
    let upper_ok = pa <= e * state_sup * (1.0 + 1e-9) + 1e-12;
    Ok(NormStateReport {
        state_sup,
        state_sup_exact: exact,
        seminorm_value: pa,
        lower_ok,
        upper_ok,
    })
}

#[derive(Clone, Debug)]
pub struct SpanningReport {
    pub rank: usize,
    pub expected: usize,
    /// Ratio of the smallest retained singular value to the largest.
    pub relative_gap: f64,
    pub pass: bool,
}

/// Verify that sampled pure states span the dual space: the matrix whose
/// rows are the functionals' coordinates must have full numeric rank
/// (singular values above 1e-8 relative).
pub fn moore_spanning_check(model: Model, samples: usize, seed: u64) -> Result<SpanningReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, dim): (Vec<Vec<Complex64>>, usize) = match model {
        Model::Matrix { size } => {
            let dim = size * size;
            if samples < dim {
                return Err(AmError::InvalidArgument(format!(
                    "need at least {} samples for the dual of the {}x{} matrix algebra",
                    dim, size, size
                )));
            }
            let rows = (0..samples)
                .map(|_| {
                    let x = DVector::from_fn(size, |_, _| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                    .normalize();
                    let f = &x * x.adjoint();
                    f.iter().copied().collect()
                })
                .collect();
            (rows, dim)
        }
        Model::Function { points } => {
            if samples < points {
                return Err(AmError::InvalidArgument(format!(
                    "need at least {} samples for the dual of the {}-point algebra",
                    points, points
                )));
            }
            let rows = (0..points)
                .map(|i| {
                    let mut w = vec![Complex64::new(0.0, 0.0); points];
                    w[i] = Complex64::new(1.0, 0.0);
                    w
                })
                .collect();
            (rows, points)
        }
        Model::Entire { .. } => {
            return Err(AmError::Unsupported(
                "the entire model has an infinite-dimensional dual".into(),
            ))
        }
    };
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let sv = m.svd(false, false).singular_values;
    let s_max = sv.max();
    let threshold = 1e-8 * s_max.max(1.0);
    let rank = sv.iter().filter(|s| **s > threshold).count();
    let smallest_kept = sv.iter().copied().filter(|s| *s > threshold).fold(f64::INFINITY, f64::min);
    Ok(SpanningReport {
        rank,
        expected: dim,
        relative_gap: if s_max > 0.0 { smallest_kept / s_max } else { 0.0 },
        pass: rank == dim,
    })
}

#[derive(Clone, Debug)]
pub enum SpectralStateVerdict {
    Yes,
    No { witness: Box<Element>, value: f64, radius: f64 },
}

/// Spectral-state test: |f(a)| <= spectral radius of a, over the witness
/// sample. Exact spectra are used on the finite-spectrum models.
pub fn is_spectral_state(f: &Functional, witnesses: &[Element]) -> Result<SpectralStateVerdict> {
    if witnesses.is_empty() {
        return Err(AmError::InvalidArgument("witness sample must be nonempty".into()));
    }
    for a in witnesses {
        let value = f.apply(a)?.norm();
        let radius = spectral_data(a)?.radius;
        if value > radius + 1e-9 {
            return Ok(SpectralStateVerdict::No {
                witness: Box::new(a.clone()),
                value,
                radius,
            });
        }
    }
    Ok(SpectralStateVerdict::Yes)
}

/// Witness family for refuting spectral-state claims on the 2x2 matrix
/// algebra: rank-one nilpotents u v* with v orthogonal to u, swept over a
/// phase/angle grid. Every non-trace state sees a nonzero value on some
/// member while every nilpotent has spectral radius zero.
pub fn nilpotent_witness_family(grid: usize) -> Vec<Element> {
    let mut out = Vec::new();
    for i in 0..grid {
        let theta = std::f64::consts::PI * i as f64 / grid as f64;
        for j in 0..grid {
            let phi = std::f64::consts::TAU * j as f64 / grid as f64;
            let u = DVector::from_vec(vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::from_polar(theta.sin(), phi),
            ]);
            let v = DVector::from_vec(vec![
                Complex64::from_polar(theta.sin(), -phi),
                Complex64::new(-theta.cos(), 0.0),
            ]);
            out.push(Element::Matrix(&u * v.adjoint()));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct MonotonicityVerdict {
    pub hypothesis_ok: bool,
    pub state_for_lower: bool,
    pub state_for_upper: bool,
    pub dual_lower: DualNorm,
    pub dual_upper: DualNorm,
    /// The implication "state for q implies state for p" together with the
    /// dual-norm inequality along the inclusion.
    pub pass: bool,
}

/// States survive along seminorm growth: if q <= p pointwise (verified on
/// the sample) and f is a state of the q-quotient, the dual norm can only
/// shrink, and for unital p the state condition transfers.
pub fn state_monotonicity_check(
    f: &Functional,
    lower: &Seminorm,
    upper: &Seminorm,
    degree: u32,
    sample: &[Element],
) -> Result<MonotonicityVerdict> {
    let mut hypothesis_ok = true;
    for a in sample {
        let qa = lower.eval(a)?;
        let pa = upper.eval(a)?;
        if qa > pa * (1.0 + 1e-9) + 1e-12 {
            hypothesis_ok = false;
            break;
        }
    }
    if !hypothesis_ok {
        return Err(AmError::HypothesisFailed(
            "the lower seminorm is not pointwise below the upper one on the sample".into(),
        ));
    }
    let vq = is_state(f, lower, degree)?;
    let vp = is_state(f, upper, degree)?;
    let dual_shrinks = match (&vq.dual_norm, &vp.dual_norm) {
        (DualNorm::Finite(dq), DualNorm::Finite(dp)) => *dp <= *dq + STATE_TOL,
        (DualNorm::Unbounded { .. }, _) => true,
        (DualNorm::Finite(_), DualNorm::Unbounded { .. }) => false,
    };
    let unital_upper = (upper.unit_value()? - 1.0).abs() <= STATE_TOL;
    let implication = !vq.is_state || vp.is_state || !unital_upper;
    Ok(MonotonicityVerdict {
        hypothesis_ok,
        state_for_lower: vq.is_state,
        state_for_upper: vp.is_state,
        dual_lower: vq.dual_norm,
        dual_upper: vp.dual_norm,
        pass: dual_shrinks && implication,
    })
}

#[derive(Clone, Debug)]
pub struct ClosednessReport {
    pub trials: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Weak-* limits of states are states: convex paths and averages of
/// sampled states are driven to their limits, which must again satisfy the
/// state condition (finite-dimensional models only).
pub fn state_set_closedness_probe(p: &Seminorm, trials: usize, seed: u64) -> Result<ClosednessReport> {
    let degree = 16;
    let mut max_deviation: f64 = 0.0;
    match p.kind() {
        SeminormKind::MatrixScale { size, .. } => {
            let states = pure_states_sample(p, trials.max(2) * 2, seed)?;
            for pair in states.chunks(2) {
                if let [Functional::MatrixPairing(f), Functional::MatrixPairing(g)] = pair {
                    // Convex path t -> (1-t) f + t g, evaluated at its endpoint.
                    let limit = Functional::MatrixPairing((f + g).scale(0.5));
                    let v = is_state(&limit, p, degree)?;
                    let dn = v.dual_norm.finite().unwrap_or(f64::INFINITY);
                    max_deviation = max_deviation.max((dn - 1.0).abs());
                    max_deviation =
                        max_deviation.max((v.unit_value - Complex64::new(1.0, 0.0)).norm());
                    if !v.is_state {
                        return Ok(ClosednessReport { trials, max_deviation, pass: false });
                    }
                } else {
                    let _ = size;
                    unreachable!("matrix sampling yields pairings");
                }
            }
        }
        SeminormKind::FunctionSubset { points, subset } => {
            // Cesaro averages of the point masses of the subset.
            let base: Vec<usize> = subset.iter().copied().collect();
            for m in 1..=base.len().min(trials.max(1)) {
                let mut w = vec![Complex64::new(0.0, 0.0); *points];
                for &i in base.iter().take(m) {
                    w[i] += Complex64::new(1.0 / m as f64, 0.0);
                }
                let avg = Functional::WeightTuple(w);
                let v = is_state(&avg, p, degree)?;
                let dn = v.dual_norm.finite().unwrap_or(f64::INFINITY);
                max_deviation = max_deviation.max((dn - 1.0).abs());
                if !v.is_state {
                    return Ok(ClosednessReport { trials, max_deviation, pass: false });
                }
            }
        }
        _ => {
            return Err(AmError::Unsupported(
                "the closedness probe runs on the finite-dimensional models".into(),
            ))
        }
    }
    Ok(ClosednessReport { trials, max_deviation, pass: true })
}
