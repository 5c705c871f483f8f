//! The directed family of submultiplicative seminorms, its order and
//! lattice operations, quotient Banach algebras and connecting maps.
//!
//! Lattice operations are computed relative to a declared chart of
//! parametric seminorms; the full saturated family is uncountable and is
//! probed only through generic (black-box) members with sampled verdicts.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{Element, Model};
use crate::error::{AmError, Result};
use crate::poly::Poly;

/// Relative tolerance used for all norm comparisons.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone)]
pub enum SeminormKind {
    /// Weighted coefficient-sum seminorm on the entire model:
    /// p_r(f) = sum_alpha |c_alpha| r^alpha, with weights r_i >= 0.
    /// All-positive weights give a norm; a zero weight is the admitted
    /// degenerate boundary member.
    EntireWeights(Vec<f64>),
    /// q_S(f) = max over i in S of |f_i| on the function model.
    FunctionSubset { points: usize, subset: BTreeSet<usize> },
    /// c times the operator norm on the matrix model, c >= 1. Unital only
    /// for c = 1; larger scales are admitted for order experiments the way
    /// the zero seminorm is admitted for convenience.
    MatrixScale { size: usize, scale: f64 },
    /// The zero seminorm (the empty-supremum convention).
    Zero(Model),
    /// Pointwise maximum of two seminorms.
    Join(Box<Seminorm>, Box<Seminorm>),
    /// Black-box seminorm known only through evaluation.
    Generic {
        model: Model,
        name: String,
        eval: Arc<dyn Fn(&Element) -> f64 + Send + Sync>,
    },
}

#[derive(Clone)]
pub struct Seminorm {
    kind: SeminormKind,
}

impl fmt::Debug for Seminorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SeminormKind::EntireWeights(r) => write!(f, "p_r{:?}", r),
            SeminormKind::FunctionSubset { subset, .. } => write!(f, "q_S{:?}", subset),
            SeminormKind::MatrixScale { scale, .. } => write!(f, "{}*opnorm", scale),
            SeminormKind::Zero(_) => write!(f, "0"),
            SeminormKind::Join(a, b) => write!(f, "({:?} v {:?})", a, b),
            SeminormKind::Generic { name, .. } => write!(f, "generic[{}]", name),
        }
    }
}

impl PartialEq for Seminorm {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (SeminormKind::EntireWeights(a), SeminormKind::EntireWeights(b)) => a == b,
            (
                SeminormKind::FunctionSubset { points: ka, subset: sa },
                SeminormKind::FunctionSubset { points: kb, subset: sb },
            ) => ka == kb && sa == sb,
            (
                SeminormKind::MatrixScale { size: na, scale: ca },
                SeminormKind::MatrixScale { size: nb, scale: cb },
            ) => na == nb && ca == cb,
            (SeminormKind::Zero(a), SeminormKind::Zero(b)) => a == b,
            (SeminormKind::Join(a1, a2), SeminormKind::Join(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}

impl Seminorm {
    pub fn entire_weights(weights: impl Into<Vec<f64>>) -> Seminorm {
        let weights = weights.into();
        assert!(weights.iter().all(|r| *r >= 0.0), "weights must be nonnegative");
        Seminorm { kind: SeminormKind::EntireWeights(weights) }
    }

    pub fn function_subset(points: usize, subset: impl IntoIterator<Item = usize>) -> Seminorm {
        let subset: BTreeSet<usize> = subset.into_iter().collect();
        assert!(subset.iter().all(|i| *i < points), "subset index out of range");
        Seminorm { kind: SeminormKind::FunctionSubset { points, subset } }
    }

    pub fn matrix_scale(size: usize, scale: f64) -> Seminorm {
        assert!(scale > 0.0, "scale must be positive");
        Seminorm { kind: SeminormKind::MatrixScale { size, scale } }
    }

    pub fn zero(model: Model) -> Seminorm {
        Seminorm { kind: SeminormKind::Zero(model) }
    }

    pub fn generic(
        model: Model,
        name: impl Into<String>,
        eval: impl Fn(&Element) -> f64 + Send + Sync + 'static,
    ) -> Seminorm {
        Seminorm {
            kind: SeminormKind::Generic { model, name: name.into(), eval: Arc::new(eval) },
        }
    }

    pub fn kind(&self) -> &SeminormKind {
        &self.kind
    }

    pub fn model(&self) -> Model {
        match &self.kind {
            SeminormKind::EntireWeights(r) => Model::Entire { vars: r.len() },
            SeminormKind::FunctionSubset { points, .. } => Model::Function { points: *points },
            SeminormKind::MatrixScale { size, .. } => Model::Matrix { size: *size },
            SeminormKind::Zero(m) => *m,
            SeminormKind::Join(a, _) => a.model(),
            SeminormKind::Generic { model, .. } => *model,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.kind {
            SeminormKind::EntireWeights(r) => Some(r),
            _ => None,
        }
    }

    pub fn subset(&self) -> Option<&BTreeSet<usize>> {
        match &self.kind {
            SeminormKind::FunctionSubset { subset, .. } => Some(subset),
            _ => None,
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match &self.kind {
            SeminormKind::MatrixScale { scale, .. } => Some(*scale),
            _ => None,
        }
    }

    pub fn is_zero_seminorm(&self) -> bool {
        matches!(self.kind, SeminormKind::Zero(_))
    }

    pub fn eval(&self, a: &Element) -> Result<f64> {
        self.model().check_same(a.model())?;
        Ok(match (&self.kind, a) {
            (SeminormKind::EntireWeights(r), Element::Entire(p)) => weighted_coeff_sum(p, r),
            (SeminormKind::FunctionSubset { subset, .. }, Element::Function(v)) => subset
                .iter()
                .map(|i| v[*i].norm())
                .fold(0.0, f64::max),
            (SeminormKind::MatrixScale { scale, .. }, Element::Matrix(m)) => {
                scale * m.clone().svd(false, false).singular_values.max()
            }
            (SeminormKind::Zero(_), _) => 0.0,
            (SeminormKind::Join(p, q), _) => p.eval(a)?.max(q.eval(a)?),
            (SeminormKind::Generic { eval, .. }, _) => eval(a),
            _ => unreachable!("models already checked equal"),
        })
    }

    /// Unitality probe: value at the algebra unit.
    pub fn unit_value(&self) -> Result<f64> {
        self.eval(&Element::unit(self.model()))
    }
}

/// Weight of a monomial: product of r_i^alpha_i with the convention
/// 0^0 = 1 (IEEE powi already follows it).
pub fn monomial_weight(r: &[f64], alpha: &[u32]) -> f64 {
    r.iter().zip(alpha).map(|(ri, a)| ri.powi(*a as i32)).product()
}

fn weighted_coeff_sum(p: &Poly, r: &[f64]) -> f64 {
    p.terms()
        .map(|(alpha, c)| c.norm() * monomial_weight(r, alpha))
        .sum()
}

/// Verdict of the order relation "p is dominated by q", i.e. p <= C q.
#[derive(Clone, Debug)]
pub enum DominationVerdict {
    Yes { constant: f64 },
    No { witness: Element, ratio: f64 },
    Unknown,
}

impl DominationVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, DominationVerdict::Yes { .. })
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            DominationVerdict::Yes { constant } => Some(*constant),
            _ => None,
        }
    }
}

/// Decide p <= C q. Exact on parametric kinds; sampled three-valued on
/// generic ones (a black-box evaluation can refute but never prove
/// domination).
pub fn dominates(p: &Seminorm, q: &Seminorm) -> DominationVerdict {
    if p.model() != q.model() {
        return DominationVerdict::Unknown;
    }
    match (&p.kind, &q.kind) {
        (SeminormKind::Zero(_), _) => DominationVerdict::Yes { constant: 1.0 },
        (SeminormKind::EntireWeights(r), SeminormKind::EntireWeights(s)) => {
            match r.iter().zip(s.iter()).position(|(ri, si)| ri > si) {
                None => DominationVerdict::Yes { constant: 1.0 },
                Some(j) => {
                    // Monomial powers of z_j make the ratio p/q exceed any
                    // candidate constant; exhibit one past 1e9.
                    let (witness, ratio) = diverging_monomial_witness(r, s, j);
                    DominationVerdict::No { witness, ratio }
                }
            }
        }
        (
            SeminormKind::FunctionSubset { points, subset: s },
            SeminormKind::FunctionSubset { subset: t, .. },
        ) => {
            if s.is_subset(t) {
                DominationVerdict::Yes { constant: 1.0 }
            } else {
                let i = *s.difference(t).next().expect("nonempty difference");
                let mut v = vec![Complex64::new(0.0, 0.0); *points];
                v[i] = Complex64::new(1.0, 0.0);
                DominationVerdict::No { witness: Element::Function(v), ratio: f64::INFINITY }
            }
        }
        (
            SeminormKind::MatrixScale { scale: c, .. },
            SeminormKind::MatrixScale { scale: d, .. },
        ) => DominationVerdict::Yes { constant: c / d },
        (SeminormKind::Join(p1, p2), _) => {
            // max(p1,p2) <= C q iff both factors are dominated.
            match (dominates(p1, q), dominates(p2, q)) {
                (DominationVerdict::Yes { constant: c1 }, DominationVerdict::Yes { constant: c2 }) => {
                    DominationVerdict::Yes { constant: c1.max(c2) }
                }
                (DominationVerdict::No { witness, ratio }, _)
                | (_, DominationVerdict::No { witness, ratio }) => {
                    DominationVerdict::No { witness, ratio }
                }
                _ => DominationVerdict::Unknown,
            }
        }
        (_, SeminormKind::Join(q1, q2)) => {
            // p <= C max(q1,q2) follows from domination by either factor.
            if let DominationVerdict::Yes { constant } = dominates(p, q1) {
                return DominationVerdict::Yes { constant };
            }
            if let DominationVerdict::Yes { constant } = dominates(p, q2) {
                return DominationVerdict::Yes { constant };
            }
            DominationVerdict::Unknown
        }
        _ => sampled_domination(p, q),
    }
}

fn diverging_monomial_witness(r: &[f64], s: &[f64], j: usize) -> (Element, f64) {
    let n = r.len();
    let base = r[j] / s[j].max(f64::MIN_POSITIVE);
    let k = if s[j] == 0.0 {
        1
    } else {
        (9.0 / base.log10()).ceil().max(1.0) as u32
    };
    let mut alpha = vec![0u32; n];
    alpha[j] = k;
    let witness = Element::Entire(Poly::monomial(alpha.clone(), Complex64::new(1.0, 0.0)));
    let ratio = if s[j] == 0.0 {
        f64::INFINITY
    } else {
        monomial_weight(r, &alpha) / monomial_weight(s, &alpha)
    };
    (witness, ratio)
}

/// Black-box domination probe over a fixed element sample.
fn sampled_domination(p: &Seminorm, q: &Seminorm) -> DominationVerdict {
    let sample = probe_elements(p.model());
    for a in &sample {
        let pv = p.eval(a).unwrap_or(f64::NAN);
        let qv = q.eval(a).unwrap_or(f64::NAN);
        if qv == 0.0 && pv > 0.0 {
            return DominationVerdict::No { witness: a.clone(), ratio: f64::INFINITY };
        }
    }
    DominationVerdict::Unknown
}

fn probe_elements(model: Model) -> Vec<Element> {
    match model {
        Model::Entire { vars } => {
            let mut out = vec![Element::unit(model)];
            for i in 0..vars {
                let z = Poly::variable(vars, i);
                out.push(Element::Entire(z.clone()));
                out.push(Element::Entire(z.mul(&z)));
                out.push(Element::Entire(z.mul(&z).add(&Poly::one(vars))));
            }
            out
        }
        Model::Function { points } => {
            let mut out = vec![Element::unit(model)];
            for i in 0..points {
                let mut v = vec![Complex64::new(0.0, 0.0); points];
                v[i] = Complex64::new(1.0, 0.0);
                out.push(Element::Function(v));
            }
            out
        }
        Model::Matrix { size } => {
            let mut out = vec![Element::unit(model)];
            let mut m = nalgebra::DMatrix::zeros(size, size);
            if size > 1 {
                m[(0, 1)] = Complex64::new(1.0, 0.0);
            } else {
                m[(0, 0)] = Complex64::new(1.0, 0.0);
            }
            out.push(Element::Matrix(m));
            out
        }
    }
}

/// Pointwise maximum, canonicalised inside each parametric family where the
/// result is again a family member.
pub fn join(p: &Seminorm, q: &Seminorm) -> Result<Seminorm> {
    p.model().check_same(q.model())?;
    Ok(match (&p.kind, &q.kind) {
        (SeminormKind::Zero(_), _) => q.clone(),
        (_, SeminormKind::Zero(_)) => p.clone(),
        (SeminormKind::FunctionSubset { points, subset: s }, SeminormKind::FunctionSubset { subset: t, .. }) => {
            Seminorm::function_subset(*points, s.union(t).copied())
        }
        (SeminormKind::MatrixScale { size, scale: c }, SeminormKind::MatrixScale { scale: d, .. }) => {
            Seminorm::matrix_scale(*size, c.max(*d))
        }
        (SeminormKind::EntireWeights(r), SeminormKind::EntireWeights(s)) => {
            if r.iter().zip(s).all(|(a, b)| a >= b) {
                p.clone()
            } else if r.iter().zip(s).all(|(a, b)| a <= b) {
                q.clone()
            } else {
                // Incomparable weights: the pointwise max is not itself a
                // weighted-sum seminorm; keep it structural.
                Seminorm { kind: SeminormKind::Join(Box::new(p.clone()), Box::new(q.clone())) }
            }
        }
        _ => Seminorm { kind: SeminormKind::Join(Box::new(p.clone()), Box::new(q.clone())) },
    })
}

/// How trustworthy a computed meet is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeetQuality {
    /// Provably the lattice meet.
    Exact,
    /// The chart-family representative; agreement with the lattice meet is
    /// an open question for the multivariate entire chart.
    ChartRelative,
    /// A documented inner approximation (a lower bound only).
    LowerBound,
}

#[derive(Clone, Debug)]
pub struct Meet {
    pub seminorm: Seminorm,
    pub quality: MeetQuality,
}

/// Chart-relative meet: componentwise-min weights, subset intersection,
/// minimum scale. Generic kinds fall back to the zero seminorm, the
/// universal lower bound under the empty-supremum convention.
pub fn meet(p: &Seminorm, q: &Seminorm) -> Result<Meet> {
    p.model().check_same(q.model())?;
    Ok(match (&p.kind, &q.kind) {
        (SeminormKind::Zero(m), _) | (_, SeminormKind::Zero(m)) => {
            Meet { seminorm: Seminorm::zero(*m), quality: MeetQuality::Exact }
        }
        (SeminormKind::EntireWeights(r), SeminormKind::EntireWeights(s)) => {
            let t: Vec<f64> = r.iter().zip(s).map(|(a, b)| a.min(*b)).collect();
            let quality = if r.len() <= 1 { MeetQuality::Exact } else { MeetQuality::ChartRelative };
            Meet { seminorm: Seminorm::entire_weights(t), quality }
        }
        (SeminormKind::FunctionSubset { points, subset: s }, SeminormKind::FunctionSubset { subset: t, .. }) => {
            Meet {
                seminorm: Seminorm::function_subset(*points, s.intersection(t).copied()),
                quality: MeetQuality::Exact,
            }
        }
        (SeminormKind::MatrixScale { size, scale: c }, SeminormKind::MatrixScale { scale: d, .. }) => {
            Meet { seminorm: Seminorm::matrix_scale(*size, c.min(*d)), quality: MeetQuality::Exact }
        }
        _ => Meet { seminorm: Seminorm::zero(p.model()), quality: MeetQuality::LowerBound },
    })
}

/// Pointwise supremum of a finite family, guarded by a sampled bound check
/// q <= C * bound for every member. An observed violation rejects the
/// family with the witness.
pub fn sup_family(
    family: &[Seminorm],
    bound: &Seminorm,
    constant: f64,
    sample: &[Element],
) -> Result<Seminorm> {
    for q in family {
        q.model().check_same(bound.model())?;
        for a in sample {
            let qv = q.eval(a)?;
            let bv = bound.eval(a)?;
            if qv > constant * bv + NORM_TOL * qv.max(1.0) {
                return Err(AmError::NotDominated(format!(
                    "family member {:?} exceeds {} * bound on witness {:?}: {} > {}",
                    q,
                    constant,
                    a,
                    qv,
                    constant * bv
                )));
            }
        }
    }
    match family {
        [] => Ok(Seminorm::zero(bound.model())),
        [single] => Ok(single.clone()),
        [first, rest @ ..] => {
            let mut acc = first.clone();
            for q in rest {
                acc = join(&acc, q)?;
            }
            Ok(acc)
        }
    }
}

/// A declared working subfamily of the seminorm lattice.
#[derive(Clone, Debug)]
pub struct SeminormChart {
    pub model: Model,
    pub members: ChartMembers,
    pub directed: bool,
    pub meet_closed: bool,
}

#[derive(Clone, Debug)]
pub enum ChartMembers {
    Finite(Vec<Seminorm>),
    /// All weighted-sum seminorms with strictly positive weights.
    EntireWeightFamily { vars: usize },
    /// All nonempty-subset max seminorms.
    FunctionSubsetFamily { points: usize },
    /// All scaled operator norms with scale >= 1.
    MatrixScaleFamily { size: usize },
}

impl SeminormChart {
    pub fn entire(vars: usize) -> SeminormChart {
        SeminormChart {
            model: Model::Entire { vars },
            members: ChartMembers::EntireWeightFamily { vars },
            directed: true,
            meet_closed: true,
        }
    }

    pub fn function(points: usize) -> SeminormChart {
        SeminormChart {
            model: Model::Function { points },
            members: ChartMembers::FunctionSubsetFamily { points },
            directed: true,
            meet_closed: true,
        }
    }

    pub fn matrix(size: usize) -> SeminormChart {
        SeminormChart {
            model: Model::Matrix { size },
            members: ChartMembers::MatrixScaleFamily { size },
            directed: true,
            meet_closed: true,
        }
    }

    pub fn finite(model: Model, members: Vec<Seminorm>, directed: bool, meet_closed: bool) -> SeminormChart {
        SeminormChart { model, members: ChartMembers::Finite(members), directed, meet_closed }
    }

    pub fn contains(&self, p: &Seminorm) -> bool {
        match (&self.members, p.kind()) {
            (ChartMembers::Finite(list), _) => list.iter().any(|m| m == p),
            (ChartMembers::EntireWeightFamily { vars }, SeminormKind::EntireWeights(r)) => {
                r.len() == *vars && r.iter().all(|x| *x > 0.0)
            }
            (ChartMembers::FunctionSubsetFamily { points }, SeminormKind::FunctionSubset { points: k, subset }) => {
                k == points && !subset.is_empty()
            }
            (ChartMembers::MatrixScaleFamily { .. }, SeminormKind::MatrixScale { scale, .. }) => {
                *scale >= 1.0
            }
            _ => false,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Seminorm {
        match &self.members {
            ChartMembers::Finite(list) => list[rng.gen_range(0..list.len())].clone(),
            ChartMembers::EntireWeightFamily { vars } => {
                let weights: Vec<f64> =
                    (0..*vars).map(|_| f64::exp(rng.gen_range(-1.5..1.5))).collect();
                Seminorm::entire_weights(weights)
            }
            ChartMembers::FunctionSubsetFamily { points } => loop {
                let subset: BTreeSet<usize> =
                    (0..*points).filter(|_| rng.gen_bool(0.5)).collect();
                if !subset.is_empty() {
                    return Seminorm::function_subset(*points, subset);
                }
            },
            ChartMembers::MatrixScaleFamily { size } => {
                Seminorm::matrix_scale(*size, rng.gen_range(1.0..4.0))
            }
        }
    }

    /// A chart member dominating both arguments, when the family provides
    /// one (componentwise max weights, subset union, max scale).
    pub fn upper_bound(&self, p: &Seminorm, q: &Seminorm) -> Option<Seminorm> {
        match (&self.members, p.kind(), q.kind()) {
            (ChartMembers::EntireWeightFamily { .. }, SeminormKind::EntireWeights(r), SeminormKind::EntireWeights(s)) => {
                Some(Seminorm::entire_weights(
                    r.iter().zip(s).map(|(a, b)| a.max(*b)).collect::<Vec<_>>(),
                ))
            }
            (ChartMembers::FunctionSubsetFamily { points }, SeminormKind::FunctionSubset { subset: s, .. }, SeminormKind::FunctionSubset { subset: t, .. }) => {
                Some(Seminorm::function_subset(*points, s.union(t).copied()))
            }
            (ChartMembers::MatrixScaleFamily { size }, SeminormKind::MatrixScale { scale: c, .. }, SeminormKind::MatrixScale { scale: d, .. }) => {
                Some(Seminorm::matrix_scale(*size, c.max(*d)))
            }
            (ChartMembers::Finite(list), _, _) => list
                .iter()
                .find(|m| dominates(p, m).is_yes() && dominates(q, m).is_yes())
                .cloned(),
            _ => None,
        }
    }

    /// Enumerate the family where it is finite (all nonempty subsets for
    /// the function chart with few points).
    pub fn enumerate(&self) -> Option<Vec<Seminorm>> {
        match &self.members {
            ChartMembers::Finite(list) => Some(list.clone()),
            ChartMembers::FunctionSubsetFamily { points } if *points <= 16 => {
                let mut out = Vec::new();
                for mask in 1u32..(1 << points) {
                    let subset: BTreeSet<usize> =
                        (0..*points).filter(|i| mask >> i & 1 == 1).collect();
                    out.push(Seminorm::function_subset(*points, subset));
                }
                Some(out)
            }
            _ => None,
        }
    }
}

/// Description of the null space of a seminorm.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelDesc {
    Trivial,
    /// Tuples vanishing on the given coordinates (function model).
    VanishingOn(BTreeSet<usize>),
}

/// The Banach-algebra quotient by the null space of a seminorm, represented
/// through truncated coefficient vectors and the induced norm.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra {
    pub seminorm: Seminorm,
    pub truncation_degree: u32,
    pub kernel: KernelDesc,
}

impl QuotientAlgebra {
    pub fn kernel_contains(&self, a: &Element) -> Result<bool> {
        Ok(self.seminorm.eval(a)? == 0.0)
    }

    /// Canonical representative of the class of `a`.
    pub fn project(&self, a: &Element) -> Result<Element> {
        self.seminorm.model().check_same(a.model())?;
        Ok(match (a, &self.kernel) {
            (Element::Entire(p), _) => Element::Entire(p.truncate(self.truncation_degree)),
            (Element::Function(v), KernelDesc::VanishingOn(support)) => {
                // Zero out the coordinates the seminorm cannot see.
                let kept: Vec<Complex64> = v
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if support.contains(&i) { *c } else { Complex64::new(0.0, 0.0) })
                    .collect();
                Element::Function(kept)
            }
            _ => a.clone(),
        })
    }

    pub fn norm(&self, a: &Element) -> Result<f64> {
        self.seminorm.eval(&self.project(a)?)
    }

    /// Dimension of the representative space, when finite.
    pub fn dimension(&self) -> Option<usize> {
        match (&self.seminorm.model(), &self.kernel) {
            (Model::Function { .. }, KernelDesc::VanishingOn(s)) => Some(s.len()),
            (Model::Entire { vars }, _) => {
                // Degree-bounded polynomials in `vars` variables.
                let d = self.truncation_degree as usize;
                Some(binomial(d + vars, *vars))
            }
            (Model::Matrix { size }, _) => Some(size * size),
            _ => None,
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let mut out = 1usize;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Build the quotient algebra of a seminorm. The zero seminorm is excluded:
/// it is admitted into the order for convenience but generates no quotient.
pub fn quotient_algebra(p: &Seminorm, truncation_degree: u32) -> Result<QuotientAlgebra> {
    let kernel = match p.kind() {
        SeminormKind::Zero(_) => {
            return Err(AmError::InvalidArgument(
                "the zero seminorm does not generate a quotient algebra".into(),
            ))
        }
        SeminormKind::FunctionSubset { subset, .. } => KernelDesc::VanishingOn(subset.clone()),
        SeminormKind::EntireWeights(r) if r.iter().all(|x| *x > 0.0) => KernelDesc::Trivial,
        SeminormKind::EntireWeights(_) => {
            return Err(AmError::Unsupported(
                "quotients of degenerate-weight seminorms are out of scope".into(),
            ))
        }
        _ => KernelDesc::Trivial,
    };
    Ok(QuotientAlgebra { seminorm: p.clone(), truncation_degree, kernel })
}

/// The canonical Banach-algebra morphism between quotients of comparable
/// seminorms; the identity on coefficients, with the norm bound recorded.
#[derive(Clone, Debug)]
pub struct ConnectingMap {
    /// Target seminorm p (the smaller one).
    pub target: Seminorm,
    /// Source seminorm q with p dominated by q.
    pub source: Seminorm,
    /// Constant with target <= constant * source.
    pub constant: f64,
}

impl ConnectingMap {
    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.source.model().check_same(a.model())?;
        Ok(a.clone())
    }

    /// Compose with a map out of a further quotient: (p<-q) after (q<-s).
    pub fn compose(&self, inner: &ConnectingMap) -> Result<ConnectingMap> {
        if self.source != inner.target {
            return Err(AmError::InvalidArgument(
                "connecting maps do not share the middle seminorm".into(),
            ));
        }
        Ok(ConnectingMap {
            target: self.target.clone(),
            source: inner.source.clone(),
            constant: self.constant * inner.constant,
        })
    }
}

pub fn connecting_map(p: &Seminorm, q: &Seminorm) -> Result<ConnectingMap> {
    match dominates(p, q) {
        DominationVerdict::Yes { constant } => {
            Ok(ConnectingMap { target: p.clone(), source: q.clone(), constant })
        }
        DominationVerdict::No { witness, ratio } => Err(AmError::NotDominated(format!(
            "{:?} is not dominated by {:?}; witness {:?} with ratio {}",
            p, q, witness, ratio
        ))),
        DominationVerdict::Unknown => Err(AmError::NotDominated(format!(
            "domination of {:?} by {:?} could not be certified",
            p, q
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct DensityReport {
    pub samples: usize,
    pub max_distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Density of the canonical image in each quotient: every truncated
/// representative is itself a polynomial (or tuple), so the approximation
/// distance is identically zero. The report records it.
pub fn mittag_leffler_density_check(
    p: &Seminorm,
    truncation_degree: u32,
    tolerance: f64,
    sample: &[Element],
) -> Result<DensityReport> {
    if tolerance <= 0.0 {
        return Err(AmError::InvalidArgument("tolerance must be positive".into()));
    }
    let quotient = quotient_algebra(p, truncation_degree)?;
    let mut max_distance: f64 = 0.0;
    for a in sample {
        let rep = quotient.project(a)?;
        // The approximant is the representative itself.
        let dist = p.eval(&rep.sub(&rep)?)?;
        max_distance = max_distance.max(dist);
    }
    Ok(DensityReport {
        samples: sample.len(),
        max_distance,
        tolerance,
        pass: max_distance <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn weighted_sum_evaluation() {
        // p_{r=2}(1 + 3 z^2) = 1 + 3 * 4 = 13, against term-by-term summation.
        let z = Poly::variable(1, 0);
        let a = Element::Entire(Poly::one(1).add(&z.mul(&z).scale(c(3.0))));
        let p = Seminorm::entire_weights([2.0]);
        let direct = 1.0 * 2f64.powi(0) + 3.0 * 2f64.powi(2);
        assert_eq!(p.eval(&a).unwrap(), direct);
        assert_eq!(direct, 13.0);
        assert_eq!(p.unit_value().unwrap(), 1.0);
    }

    #[test]
    fn subset_max_evaluation() {
        let a = Element::Function(vec![c(5.0), c(9.0), c(2.0)]);
        let q = Seminorm::function_subset(3, [0, 2]);
        // Brute-force max over the subset {1,3} in 1-based labels.
        assert_eq!(q.eval(&a).unwrap(), 5.0);
        assert_eq!(q.unit_value().unwrap(), 1.0);
    }

    #[test]
    fn domination_on_weights() {
        let p1 = Seminorm::entire_weights([1.0]);
        let p2 = Seminorm::entire_weights([2.0]);
        assert!(matches!(dominates(&p1, &p2), DominationVerdict::Yes { constant } if constant == 1.0));
        assert!(dominates(&p1, &p1).is_yes());
        match dominates(&p2, &p1) {
            DominationVerdict::No { witness, ratio } => {
                assert!(ratio > 1e8);
                assert!(p2.eval(&witness).unwrap() > 1e8 * p1.eval(&witness).unwrap() / 10.0);
            }
            v => panic!("expected refusal, got {:?}", v),
        }
    }

    #[test]
    fn domination_on_subsets() {
        let qs = Seminorm::function_subset(3, [0, 1]);
        let qt = Seminorm::function_subset(3, [1]);
        match dominates(&qs, &qt) {
            DominationVerdict::No { witness, .. } => {
                // Witness is the indicator of a point of S \ T.
                let v = witness.as_tuple().unwrap();
                assert_eq!(v[0], c(1.0));
                assert_eq!(qt.eval(&witness).unwrap(), 0.0);
            }
            v => panic!("expected refusal, got {:?}", v),
        }
        assert!(dominates(&qt, &qs).is_yes());
    }

    #[test]
    fn join_evaluations() {
        let p1 = Seminorm::entire_weights([1.0]);
        let p2 = Seminorm::entire_weights([2.0]);
        let j = join(&p1, &p2).unwrap();
        let z = Element::Entire(Poly::variable(1, 0));
        assert_eq!(j.eval(&z).unwrap(), 2.0);
        // Idempotence.
        let jj = join(&p1, &p1).unwrap();
        assert_eq!(jj.eval(&z).unwrap(), p1.eval(&z).unwrap());

        // Subset joins agree with the union seminorm on a grid.
        let qs = Seminorm::function_subset(3, [0]);
        let qt = Seminorm::function_subset(3, [1, 2]);
        let ju = join(&qs, &qt).unwrap();
        let qu = Seminorm::function_subset(3, [0, 1, 2]);
        for x in [-2.0, 0.0, 1.0] {
            for y in [-1.0, 0.5] {
                for z in [0.0, 3.0] {
                    let a = Element::Function(vec![c(x), c(y), c(z)]);
                    assert_eq!(ju.eval(&a).unwrap(), qu.eval(&a).unwrap());
                }
            }
        }
    }

    #[test]
    fn meet_representatives() {
        let p = Seminorm::entire_weights([1.0, 2.0]);
        let q = Seminorm::entire_weights([2.0, 1.0]);
        let m = meet(&p, &q).unwrap();
        assert_eq!(m.seminorm.weights().unwrap(), &[1.0, 1.0]);
        assert_eq!(m.quality, MeetQuality::ChartRelative);

        let qs = Seminorm::function_subset(3, [0, 1]);
        let qt = Seminorm::function_subset(3, [1, 2]);
        let ms = meet(&qs, &qt).unwrap();
        assert_eq!(ms.seminorm.subset().unwrap().iter().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(ms.quality, MeetQuality::Exact);

        let mm = meet(&p, &p).unwrap();
        assert_eq!(mm.seminorm, p);
    }

    #[test]
    fn sup_family_behaviour() {
        let p1 = Seminorm::entire_weights([1.0]);
        let p15 = Seminorm::entire_weights([1.5]);
        let bound = Seminorm::entire_weights([2.0]);
        let sample: Vec<Element> = (0..6)
            .map(|k| Element::Entire(Poly::monomial(vec![k], c(1.0))))
            .collect();
        let s = sup_family(&[p1.clone(), p15.clone()], &bound, 1.0, &sample).unwrap();
        // Equals the larger member on monomials.
        for a in &sample {
            assert_eq!(s.eval(a).unwrap(), p15.eval(a).unwrap());
        }
        // Empty family is the zero seminorm.
        let empty = sup_family(&[], &bound, 1.0, &sample).unwrap();
        assert!(empty.is_zero_seminorm());
        // Singleton is itself.
        let single = sup_family(&[p1.clone()], &p1, 1.0, &sample).unwrap();
        assert_eq!(single, p1);
        // Unbounded family rejected with a witness.
        let big = Seminorm::entire_weights([4.0]);
        assert!(sup_family(&[big], &bound, 1.0, &sample).is_err());
    }

    #[test]
    fn quotient_kernels() {
        let q = Seminorm::function_subset(3, [0]);
        let alg = quotient_algebra(&q, 0).unwrap();
        assert_eq!(alg.kernel, KernelDesc::VanishingOn([0].into_iter().collect()));
        let a = Element::Function(vec![c(0.0), c(5.0), c(7.0)]);
        assert!(alg.kernel_contains(&a).unwrap());
        assert_eq!(alg.dimension(), Some(1));

        let p = Seminorm::entire_weights([1.0]);
        let palg = quotient_algebra(&p, 4).unwrap();
        assert_eq!(palg.kernel, KernelDesc::Trivial);
        // Degree-0 truncation leaves the constants.
        let zalg = quotient_algebra(&p, 0).unwrap();
        let z = Element::Entire(Poly::variable(1, 0).add(&Poly::one(1)));
        assert_eq!(zalg.project(&z).unwrap(), Element::Entire(Poly::one(1)));
        assert_eq!(zalg.dimension(), Some(1));

        assert!(quotient_algebra(&Seminorm::zero(Model::Entire { vars: 1 }), 2).is_err());
    }

    #[test]
    fn quotient_norm_is_seminorm_below_truncation() {
        let p = Seminorm::entire_weights([1.5]);
        let alg = quotient_algebra(&p, 6).unwrap();
        let z = Poly::variable(1, 0);
        let a = Element::Entire(z.pow(3).scale(c(2.0)).add(&Poly::one(1)));
        assert_eq!(alg.norm(&a).unwrap(), p.eval(&a).unwrap());
    }

    #[test]
    fn connecting_maps_compose() {
        let p1 = Seminorm::entire_weights([1.0]);
        let p2 = Seminorm::entire_weights([2.0]);
        let p3 = Seminorm::entire_weights([3.0]);
        let m12 = connecting_map(&p1, &p2).unwrap();
        let m23 = connecting_map(&p2, &p3).unwrap();
        let m13 = m12.compose(&m23).unwrap();
        assert_eq!(m13.target, p1);
        assert_eq!(m13.source, p3);
        // Identity on coefficients; reflexive case has constant 1.
        let z = Element::Entire(Poly::variable(1, 0));
        assert_eq!(m12.apply(&z).unwrap(), z);
        let mpp = connecting_map(&p1, &p1).unwrap();
        assert_eq!(mpp.constant, 1.0);
        // Rejected with witness when domination fails.
        assert!(connecting_map(&p2, &p1).is_err());
    }

    #[test]
    fn mittag_leffler_distance_zero() {
        let p = Seminorm::entire_weights([1.0]);
        let sample: Vec<Element> = (0..50)
            .map(|k| Element::Entire(Poly::monomial(vec![k % 8], c(1.0 + k as f64))))
            .collect();
        let report = mittag_leffler_density_check(&p, 8, 1e-9, &sample).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_distance, 0.0);

        let q = Seminorm::function_subset(2, [0, 1]);
        let fsample = vec![Element::Function(vec![c(1.0), c(-2.0)])];
        let freport = mittag_leffler_density_check(&q, 0, 1e-9, &fsample).unwrap();
        assert_eq!(freport.max_distance, 0.0);
    }
}
