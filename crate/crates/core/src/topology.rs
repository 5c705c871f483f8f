//! Minimal seminorms, full and A-convex subsets, strict domination and
//! the basis topology of unions along strictly increasing chains.
//!
//! Strict domination is decided by a compactness criterion at a finite
//! horizon: the connecting map between weight quotients is diagonal on
//! monomials with ratios (r/R)^alpha, and the tail suprema must decay to
//! zero. On the finite-dimensional models every bounded map is compact.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::algebra::Element;
use crate::error::{AmError, Result};
use crate::functor::{Carrier, CarrierPoint, FunctorTag, MarkedSet, SpectralFunctorInstance};
use crate::seminorm::{dominates, join, meet, Seminorm, SeminormKind};

/// Result of the minimal-seminorm construction at a carrier point.
#[derive(Clone, Debug)]
pub struct MinimalSeminormResult {
    pub point: CarrierPoint,
    pub seminorm: Seminorm,
    /// Sampled chart members strictly below the minimum, each certified to
    /// exclude the point.
    pub certificate: Vec<(Seminorm, bool)>,
    /// Whether the minimum lies on the boundary of the chart family
    /// (degenerate zero weight).
    pub boundary: bool,
}

/// The unique chart member minimal for containing the point in its marked
/// set: the weight vector of coordinate moduli for evaluation characters,
/// the singleton subset for coordinate characters, the unit scale for
/// vector states.
pub fn minimal_seminorm(
    inst: &SpectralFunctorInstance,
    point: &CarrierPoint,
) -> Result<MinimalSeminormResult> {
    match (point, inst.tag) {
        (CarrierPoint::Point(w), _) => {
            let radii: Vec<f64> = w.iter().map(|wi| wi.norm()).collect();
            let p = Seminorm::entire_weights(radii.clone());
            let boundary = radii.iter().any(|r| *r == 0.0);
            // Certificate: shrinking any positive coordinate excludes the
            // point from the marked polydisc.
            let mut certificate = Vec::new();
            for (j, rj) in radii.iter().enumerate() {
                if *rj > 0.0 {
                    let mut shrunk = radii.clone();
                    shrunk[j] = rj * 0.9;
                    let below = Seminorm::entire_weights(shrunk);
                    let excluded = !inst.marked_set(&below)?.contains(point);
                    certificate.push((below, excluded));
                }
            }
            Ok(MinimalSeminormResult { point: point.clone(), seminorm: p, certificate, boundary })
        }
        (CarrierPoint::Index(i), _) => {
            let points = match inst.model {
                crate::algebra::Model::Function { points } => points,
                m => {
                    return Err(AmError::InvalidArgument(format!(
                        "coordinate characters live on the function model, not {:?}",
                        m
                    )))
                }
            };
            let p = Seminorm::function_subset(points, [*i]);
            // Every smaller chart member is the empty subset, which is
            // outside the chart; the certificate is empty.
            Ok(MinimalSeminormResult {
                point: point.clone(),
                seminorm: p,
                certificate: Vec::new(),
                boundary: false,
            })
        }
        (CarrierPoint::StateVector(x), FunctorTag::PureState) => {
            let size = x.len();
            Ok(MinimalSeminormResult {
                point: point.clone(),
                seminorm: Seminorm::matrix_scale(size, 1.0),
                certificate: Vec::new(),
                boundary: false,
            })
        }
        _ => Err(AmError::Unsupported("no minimal seminorm for this carrier point".into())),
    }
}

#[derive(Clone, Debug)]
pub struct ChainInfimumReport {
    pub additivity_deviation: f64,
    pub submultiplicativity_ok: bool,
}

/// Pointwise infimum of a finite totally ordered family: the bottom
/// member. The report verifies the splitting identity
/// inf(q(a) + q(b)) = inf q(a) + inf q(b) and submultiplicativity on the
/// sampled pairs.
pub fn chain_infimum(
    family: &[Seminorm],
    pairs: &[(Element, Element)],
) -> Result<(Seminorm, ChainInfimumReport)> {
    if family.is_empty() {
        return Err(AmError::InvalidArgument("the chain must be nonempty".into()));
    }
    // Verify the total order on the sample and find the bottom.
    let mut bottom = 0usize;
    for i in 1..family.len() {
        let le = pairwise_le(&family[i], &family[bottom], pairs)?;
        let ge = pairwise_le(&family[bottom], &family[i], pairs)?;
        if !le && !ge {
            return Err(AmError::HypothesisFailed(format!(
                "chain members {:?} and {:?} are incomparable on the sample",
                family[i], family[bottom]
            )));
        }
        if le {
            bottom = i;
        }
    }
    let inf = family[bottom].clone();
    let mut additivity_deviation: f64 = 0.0;
    let mut submultiplicativity_ok = true;
    for (a, b) in pairs {
        let inf_sum = family
            .iter()
            .map(|q| Ok(q.eval(a)? + q.eval(b)?))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let sum_inf = inf.eval(a)? + inf.eval(b)?;
        additivity_deviation = additivity_deviation.max((inf_sum - sum_inf).abs());
        let ab = a.mul(b)?;
        if inf.eval(&ab)? > inf.eval(a)? * inf.eval(b)? * (1.0 + 1e-9) + 1e-12 {
            submultiplicativity_ok = false;
        }
    }
    Ok((inf, ChainInfimumReport { additivity_deviation, submultiplicativity_ok }))
}

fn pairwise_le(p: &Seminorm, q: &Seminorm, pairs: &[(Element, Element)]) -> Result<bool> {
    for (a, b) in pairs {
        for e in [a, b] {
            if p.eval(e)? > q.eval(e)? * (1.0 + 1e-9) + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Finite description of a subset of the carrier.
#[derive(Clone)]
pub struct SubsetRep {
    pub carrier: Carrier,
    pub kind: SubsetKind,
}

#[derive(Clone)]
pub enum SubsetKind {
    /// Finite point list on the function carrier.
    Points(BTreeSet<usize>),
    /// Finite union of closed polydiscs on the entire carrier.
    DiscUnion(Vec<Vec<f64>>),
    /// Black-box membership with a sampling box.
    Predicate {
        name: String,
        bound: Vec<f64>,
        test: Arc<dyn Fn(&CarrierPoint) -> bool + Send + Sync>,
    },
    All,
    Empty,
}

impl std::fmt::Debug for SubsetRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            SubsetKind::Points(s) => write!(f, "points{:?}", s),
            SubsetKind::DiscUnion(d) => write!(f, "discs{:?}", d),
            SubsetKind::Predicate { name, .. } => write!(f, "predicate[{}]", name),
            SubsetKind::All => write!(f, "all"),
            SubsetKind::Empty => write!(f, "empty"),
        }
    }
}

impl SubsetRep {
    pub fn contains(&self, m: &CarrierPoint) -> bool {
        match (&self.kind, m) {
            (SubsetKind::Points(s), CarrierPoint::Index(i)) => s.contains(i),
            (SubsetKind::DiscUnion(discs), CarrierPoint::Point(w)) => discs
                .iter()
                .any(|r| w.iter().zip(r).all(|(wi, ri)| wi.norm() <= ri * (1.0 + 1e-12))),
            (SubsetKind::Predicate { test, .. }, _) => test(m),
            (SubsetKind::All, _) => true,
            (SubsetKind::Empty, _) => false,
            _ => false,
        }
    }

    /// Sample a member point, or None when the set is (observably) empty.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Option<CarrierPoint> {
        match &self.kind {
            SubsetKind::Points(s) => {
                if s.is_empty() {
                    return None;
                }
                let items: Vec<usize> = s.iter().copied().collect();
                Some(CarrierPoint::Index(items[rng.gen_range(0..items.len())]))
            }
            SubsetKind::DiscUnion(discs) => {
                if discs.is_empty() {
                    return None;
                }
                let r = &discs[rng.gen_range(0..discs.len())];
                Some(CarrierPoint::Point(
                    r.iter()
                        .map(|ri| {
                            Complex64::from_polar(
                                ri * rng.gen_range(0.0f64..1.0).sqrt(),
                                rng.gen_range(0.0..std::f64::consts::TAU),
                            )
                        })
                        .collect(),
                ))
            }
            SubsetKind::Predicate { bound, test, .. } => {
                for _ in 0..256 {
                    let w: Vec<Complex64> = bound
                        .iter()
                        .map(|b| {
                            Complex64::from_polar(
                                rng.gen_range(0.0..*b),
                                rng.gen_range(0.0..std::f64::consts::TAU),
                            )
                        })
                        .collect();
                    let pt = CarrierPoint::Point(w);
                    if test(&pt) {
                        return Some(pt);
                    }
                }
                None
            }
            SubsetKind::All => Some(self.carrier.sample_point(rng, 2.0)),
            SubsetKind::Empty => None,
        }
    }

    pub fn points(carrier_points: usize, s: impl IntoIterator<Item = usize>) -> SubsetRep {
        SubsetRep {
            carrier: Carrier::FunctionPoints(carrier_points),
            kind: SubsetKind::Points(s.into_iter().collect()),
        }
    }

    pub fn disc_union(vars: usize, discs: Vec<Vec<f64>>) -> SubsetRep {
        SubsetRep { carrier: Carrier::EntireCharacters(vars), kind: SubsetKind::DiscUnion(discs) }
    }

    pub fn all(carrier: Carrier) -> SubsetRep {
        SubsetRep { carrier, kind: SubsetKind::All }
    }

    pub fn empty(carrier: Carrier) -> SubsetRep {
        SubsetRep { carrier, kind: SubsetKind::Empty }
    }

    pub fn predicate(
        carrier: Carrier,
        name: impl Into<String>,
        bound: Vec<f64>,
        test: impl Fn(&CarrierPoint) -> bool + Send + Sync + 'static,
    ) -> SubsetRep {
        SubsetRep {
            carrier,
            kind: SubsetKind::Predicate { name: name.into(), bound, test: Arc::new(test) },
        }
    }
}

/// The full hull O(N): the union of the minimal marked sets of sampled
/// members. On the entire carrier this is a union of closed polydiscs with
/// the sampled coordinate moduli as radii (dominated radii pruned).
pub fn full_closure(
    inst: &SpectralFunctorInstance,
    n: &SubsetRep,
    budget: usize,
    seed: u64,
) -> Result<SubsetRep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &n.kind {
        SubsetKind::Points(_) | SubsetKind::Empty | SubsetKind::All => Ok(n.clone()),
        SubsetKind::DiscUnion(discs) => Ok(SubsetRep {
            carrier: n.carrier,
            kind: SubsetKind::DiscUnion(prune_dominated(discs.clone())),
        }),
        SubsetKind::Predicate { .. } => {
            let mut radii: Vec<Vec<f64>> = Vec::new();
            for _ in 0..budget {
                if let Some(pt) = n.sample_point(&mut rng) {
                    let min = minimal_seminorm(inst, &pt)?;
                    if let Some(w) = min.seminorm.weights() {
                        radii.push(w.to_vec());
                    }
                }
            }
            Ok(SubsetRep {
                carrier: n.carrier,
                kind: SubsetKind::DiscUnion(prune_dominated(radii)),
            })
        }
    }
}

fn prune_dominated(mut discs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    discs.sort_by(|a, b| {
        b.iter()
            .sum::<f64>()
            .partial_cmp(&a.iter().sum::<f64>())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for d in discs {
        if !kept
            .iter()
            .any(|k| d.iter().zip(k).all(|(x, y)| x <= y))
        {
            kept.push(d);
        }
    }
    kept
}

#[derive(Clone, Debug)]
pub struct FullnessVerdict {
    pub full: bool,
    pub witness: Option<CarrierPoint>,
}

/// Fullness: the minimal marked set of every member stays inside. Sampled
/// member points have their minimal polydiscs probed for escape points.
pub fn is_full(
    inst: &SpectralFunctorInstance,
    n: &SubsetRep,
    budget: usize,
    seed: u64,
) -> Result<FullnessVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &n.kind {
        SubsetKind::All | SubsetKind::Empty => Ok(FullnessVerdict { full: true, witness: None }),
        SubsetKind::Points(_) => {
            // Minimal sets of coordinate characters are singletons.
            Ok(FullnessVerdict { full: true, witness: None })
        }
        _ => {
            for _ in 0..budget {
                let Some(m) = n.sample_point(&mut rng) else { break };
                let min = minimal_seminorm(inst, &m)?;
                let marked = inst.marked_set(&min.seminorm)?;
                // Probe the minimal marked set for points outside N.
                if let MarkedSet::Polydisc(radii) = &marked {
                    for _ in 0..16 {
                        let probe = CarrierPoint::Point(
                            radii
                                .iter()
                                .map(|ri| {
                                    Complex64::from_polar(
                                        ri * rng.gen_range(0.0f64..1.0),
                                        rng.gen_range(0.0..std::f64::consts::TAU),
                                    )
                                })
                                .collect(),
                        );
                        if !n.contains(&probe) {
                            return Ok(FullnessVerdict { full: false, witness: Some(probe) });
                        }
                    }
                }
            }
            Ok(FullnessVerdict { full: true, witness: None })
        }
    }
}

/// The seminorms whose marked sets sit inside N.
#[derive(Clone)]
pub enum SeminormRegion {
    Finite(Vec<Seminorm>),
    /// Weight vectors passing the containment test, sampled inside the cap.
    EntireRegion {
        vars: usize,
        cap: Vec<f64>,
        member: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
    },
}

impl std::fmt::Debug for SeminormRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeminormRegion::Finite(v) => write!(f, "finite({} members)", v.len()),
            SeminormRegion::EntireRegion { cap, .. } => write!(f, "weights-below{:?}", cap),
        }
    }
}

impl SeminormRegion {
    pub fn contains(&self, p: &Seminorm) -> bool {
        match self {
            SeminormRegion::Finite(list) => list.iter().any(|q| q == p),
            SeminormRegion::EntireRegion { member, .. } => {
                p.weights().map(|w| member(w)).unwrap_or(false)
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Option<Seminorm> {
        match self {
            SeminormRegion::Finite(list) => {
                if list.is_empty() {
                    None
                } else {
                    Some(list[rng.gen_range(0..list.len())].clone())
                }
            }
            SeminormRegion::EntireRegion { vars, cap, member } => {
                for _ in 0..256 {
                    let w: Vec<f64> = cap
                        .iter()
                        .map(|c| rng.gen_range(0.0..*c).max(1e-6))
                        .collect();
                    if w.len() == *vars && member(&w) {
                        return Some(Seminorm::entire_weights(w));
                    }
                }
                None
            }
        }
    }

    pub fn is_empty_sampled(&self, rng: &mut impl Rng) -> bool {
        self.sample(rng).is_none()
    }
}

/// Compute the seminorms of N: chart members with marked set inside N.
/// Exhaustive on the function chart, containment-tested by polydisc
/// sampling on the entire chart.
pub fn seminorms_of(
    inst: &SpectralFunctorInstance,
    n: &SubsetRep,
    budget: usize,
    seed: u64,
) -> Result<SeminormRegion> {
    match (&inst.model, &n.kind) {
        (crate::algebra::Model::Function { points }, _) => {
            let k = *points;
            let mut out = Vec::new();
            for mask in 1u32..(1 << k) {
                let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                let all_in = subset.iter().all(|i| n.contains(&CarrierPoint::Index(*i)));
                if all_in {
                    out.push(Seminorm::function_subset(k, subset));
                }
            }
            Ok(SeminormRegion::Finite(out))
        }
        (crate::algebra::Model::Entire { vars }, kind) => {
            let vars = *vars;
            let cap: Vec<f64> = match kind {
                SubsetKind::DiscUnion(discs) => (0..vars)
                    .map(|i| {
                        discs
                            .iter()
                            .map(|d| d[i])
                            .fold(0.0, f64::max)
                            .max(1e-9)
                    })
                    .collect(),
                SubsetKind::Predicate { bound, .. } => bound.clone(),
                SubsetKind::All => vec![8.0; vars],
                SubsetKind::Empty => {
                    return Ok(SeminormRegion::Finite(Vec::new()));
                }
                SubsetKind::Points(_) => {
                    return Err(AmError::InvalidArgument(
                        "point lists live on the function carrier".into(),
                    ))
                }
            };
            let n_owned = n.clone();
            let seed_base = seed;
            let budget = budget.max(32);
            let all = matches!(kind, SubsetKind::All);
            Ok(SeminormRegion::EntireRegion {
                vars,
                cap,
                member: Arc::new(move |w: &[f64]| {
                    if all {
                        return true;
                    }
                    // Containment of the closed polydisc: boundary grid
                    // plus random interior points.
                    let mut rng = ChaCha8Rng::seed_from_u64(seed_base ^ hash_weights(w));
                    let corner = CarrierPoint::Point(
                        w.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
                    );
                    if !n_owned.contains(&corner) {
                        return false;
                    }
                    for _ in 0..budget {
                        let pt = CarrierPoint::Point(
                            w.iter()
                                .map(|ri| {
                                    Complex64::from_polar(
                                        ri * rng.gen_range(0.0f64..1.0),
                                        rng.gen_range(0.0..std::f64::consts::TAU),
                                    )
                                })
                                .collect(),
                        );
                        if !n_owned.contains(&pt) {
                            return false;
                        }
                    }
                    true
                }),
            })
        }
        (crate::algebra::Model::Matrix { size }, kind) => {
            // Every marked set is the whole carrier, so only N = M admits
            // seminorms.
            let out = if matches!(kind, SubsetKind::All) {
                vec![Seminorm::matrix_scale(*size, 1.0), Seminorm::matrix_scale(*size, 2.0)]
            } else {
                Vec::new()
            };
            Ok(SeminormRegion::Finite(out))
        }
    }
}

fn hash_weights(w: &[f64]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for x in w {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

#[derive(Clone, Debug)]
pub struct AConvexityVerdict {
    pub a_convex: bool,
    pub witness_pair: Option<(Seminorm, Seminorm)>,
}

/// A-convexity: the seminorms of N form a directed family, i.e. joins of
/// members stay members. Verified on sampled pairs, with the join's marked
/// set probed for containment in N.
pub fn is_a_convex(
    inst: &SpectralFunctorInstance,
    n: &SubsetRep,
    budget: usize,
    seed: u64,
) -> Result<AConvexityVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = seminorms_of(inst, n, 32, seed ^ 0x5eed)?;
    for _ in 0..budget {
        let (Some(p1), Some(p2)) = (region.sample(&mut rng), region.sample(&mut rng)) else {
            break;
        };
        let j = join(&p1, &p2)?;
        let marked = inst.marked_set(&j)?;
        // Probe the join's marked set for escape from N.
        for _ in 0..16 {
            let probe = sample_marked(&marked, &mut rng);
            if let Some(pt) = probe {
                if !n.contains(&pt) {
                    return Ok(AConvexityVerdict { a_convex: false, witness_pair: Some((p1, p2)) });
                }
            }
        }
    }
    Ok(AConvexityVerdict { a_convex: true, witness_pair: None })
}

fn sample_marked(marked: &MarkedSet, rng: &mut impl Rng) -> Option<CarrierPoint> {
    match marked {
        MarkedSet::Subset { subset, .. } => {
            let items: Vec<usize> = subset.iter().copied().collect();
            if items.is_empty() {
                None
            } else {
                Some(CarrierPoint::Index(items[rng.gen_range(0..items.len())]))
            }
        }
        MarkedSet::Polydisc(r) => {
            if r.iter().any(|x| *x < 0.0) {
                return None;
            }
            Some(CarrierPoint::Point(
                r.iter()
                    .map(|ri| {
                        Complex64::from_polar(
                            ri * rng.gen_range(0.0f64..1.0),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect(),
            ))
        }
        MarkedSet::JoinPolydisc(fams) => {
            // Sample inside one factor; every factor sits inside the join
            // region.
            let r = &fams[rng.gen_range(0..fams.len())];
            Some(CarrierPoint::Point(
                r.iter()
                    .map(|ri| {
                        Complex64::from_polar(
                            ri * rng.gen_range(0.0f64..1.0),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect(),
            ))
        }
        MarkedSet::AllStates { size } => {
            let raw: Vec<Complex64> = (0..*size)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            Some(CarrierPoint::StateVector(raw.into_iter().map(|c| c / norm).collect()))
        }
    }
}

/// Evidence for compactness of the connecting map between two weight
/// quotients: the diagonal ratio tails, with the verdict.
#[derive(Clone, Debug)]
pub struct StrictDominationWitness {
    pub lower: Seminorm,
    pub upper: Seminorm,
    pub strict: bool,
    /// max over |alpha| = d of (r/R)^alpha for d = 0..horizon; empty on
    /// the finite-dimensional models where compactness is automatic.
    pub tail: Vec<f64>,
}

/// Decide strict domination p < q: domination plus compactness of the
/// connecting map. On the entire chart the criterion is strict
/// componentwise weight decrease, witnessed by the decaying ratio tails;
/// on the finite-dimensional models domination suffices.
pub fn strictly_dominates(p: &Seminorm, q: &Seminorm, horizon: u32) -> Result<StrictDominationWitness> {
    if !dominates(p, q).is_yes() {
        return Err(AmError::NotDominated(format!("{:?} is not dominated by {:?}", p, q)));
    }
    match (p.kind(), q.kind()) {
        (SeminormKind::EntireWeights(r), SeminormKind::EntireWeights(s)) => {
            let worst_ratio = r
                .iter()
                .zip(s)
                .map(|(ri, si)| if *si == 0.0 { 1.0 } else { ri / si })
                .fold(0.0, f64::max);
            let tail: Vec<f64> = (0..=horizon).map(|d| worst_ratio.powi(d as i32)).collect();
            let strict = worst_ratio < 1.0;
            Ok(StrictDominationWitness { lower: p.clone(), upper: q.clone(), strict, tail })
        }
        _ => {
            // Finite-dimensional quotients: every bounded map is compact.
            Ok(StrictDominationWitness {
                lower: p.clone(),
                upper: q.clone(),
                strict: true,
                tail: Vec::new(),
            })
        }
    }
}

/// A strictly increasing chain: a finite prefix plus an optional cofinal
/// successor rule describing the infinite tail.
#[derive(Clone, Debug)]
pub struct Chain {
    pub members: Vec<Seminorm>,
    pub tail: ChainTail,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChainTail {
    /// No successor rule; the chain is the finite prefix.
    None,
    /// Weights grow without bound: r -> factor * r with factor > 1.
    Unbounded { factor: f64 },
    /// Weights approach the limit from strictly below:
    /// r -> limit - rate * (limit - r) with rate in (0, 1).
    OpenLimit { limit: Vec<f64>, rate: f64 },
}

impl Chain {
    pub fn finite(members: Vec<Seminorm>) -> Chain {
        Chain { members, tail: ChainTail::None }
    }

    pub fn unbounded(members: Vec<Seminorm>, factor: f64) -> Chain {
        Chain { members, tail: ChainTail::Unbounded { factor } }
    }

    pub fn open_limit(members: Vec<Seminorm>, limit: Vec<f64>, rate: f64) -> Chain {
        Chain { members, tail: ChainTail::OpenLimit { limit, rate } }
    }

    pub fn model(&self) -> Option<crate::algebra::Model> {
        self.members.first().map(|p| p.model())
    }

    /// Apply the successor rule to the last member.
    pub fn successor(&self, p: &Seminorm) -> Option<Seminorm> {
        let w = p.weights()?;
        match &self.tail {
            ChainTail::None => None,
            ChainTail::Unbounded { factor } => Some(Seminorm::entire_weights(
                w.iter().map(|x| x * factor).collect::<Vec<_>>(),
            )),
            ChainTail::OpenLimit { limit, rate } => Some(Seminorm::entire_weights(
                w.iter()
                    .zip(limit)
                    .map(|(x, l)| l - rate * (l - x))
                    .collect::<Vec<_>>(),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StrictChainVerdict {
    pub strictly_increasing: bool,
    pub witness: Option<String>,
}

/// Every member must be strictly dominated by another member (or by the
/// successor-rule extension).
pub fn is_strictly_increasing(chain: &Chain, horizon: u32) -> Result<StrictChainVerdict> {
    if chain.members.is_empty() {
        return Ok(StrictChainVerdict {
            strictly_increasing: false,
            witness: Some("empty chain".into()),
        });
    }
    for (i, p) in chain.members.iter().enumerate() {
        // Candidate strict upper bounds: later members, then the successor.
        let mut found = false;
        for q in chain.members.iter().skip(i) {
            if let Ok(w) = strictly_dominates(p, q, horizon) {
                if w.strict {
                    found = true;
                    break;
                }
            }
        }
        if !found {
            if let Some(succ) = chain.successor(chain.members.last().expect("nonempty")) {
                if let Ok(w) = strictly_dominates(p, &succ, horizon) {
                    if w.strict {
                        found = true;
                    }
                }
            }
        }
        if !found {
            return Ok(StrictChainVerdict {
                strictly_increasing: false,
                witness: Some(format!("{:?} has no strict successor", p)),
            });
        }
    }
    // Sanity of the open-limit rule: members must stay strictly below the
    // limit so successors keep increasing.
    if let ChainTail::OpenLimit { limit, rate } = &chain.tail {
        if !(0.0..1.0).contains(rate) {
            return Ok(StrictChainVerdict {
                strictly_increasing: false,
                witness: Some("approach rate must lie in (0,1)".into()),
            });
        }
        for p in &chain.members {
            if let Some(w) = p.weights() {
                if w.iter().zip(limit).any(|(x, l)| x >= l) {
                    return Ok(StrictChainVerdict {
                        strictly_increasing: false,
                        witness: Some(format!("{:?} is not strictly below the limit", p)),
                    });
                }
            }
        }
    }
    Ok(StrictChainVerdict { strictly_increasing: true, witness: None })
}

/// Chart-level Schwartz verdict: every member of the family is strictly
/// dominated by some member.
pub fn is_schwartz(chart: &crate::seminorm::SeminormChart, horizon: u32) -> bool {
    use crate::seminorm::ChartMembers;
    match &chart.members {
        ChartMembers::EntireWeightFamily { .. } => true, // p_r < p_{2r}
        ChartMembers::FunctionSubsetFamily { .. } | ChartMembers::MatrixScaleFamily { .. } => true,
        ChartMembers::Finite(list) => list.iter().all(|p| {
            list.iter().any(|q| {
                strictly_dominates(p, q, horizon)
                    .map(|w| w.strict)
                    .unwrap_or(false)
            })
        }),
    }
}

/// A basis open: the union of the marked sets along a strictly increasing
/// chain.
#[derive(Clone, Debug)]
pub struct BasisOpen {
    pub chain: Chain,
}

impl BasisOpen {
    pub fn contains(&self, m: &CarrierPoint) -> bool {
        // A prefix member containing the point suffices.
        for p in &self.chain.members {
            let inside = match (p.kind(), m) {
                (SeminormKind::EntireWeights(r), CarrierPoint::Point(w)) => {
                    w.iter().zip(r).all(|(wi, ri)| wi.norm() <= ri * (1.0 + 1e-12))
                }
                (SeminormKind::FunctionSubset { subset, .. }, CarrierPoint::Index(i)) => {
                    subset.contains(i)
                }
                (SeminormKind::MatrixScale { .. }, CarrierPoint::StateVector(_)) => true,
                _ => false,
            };
            if inside {
                return true;
            }
        }
        // Otherwise the tail decides.
        match (&self.chain.tail, m) {
            (ChainTail::Unbounded { .. }, CarrierPoint::Point(_)) => true,
            (ChainTail::OpenLimit { limit, .. }, CarrierPoint::Point(w)) => {
                w.iter().zip(limit).all(|(wi, li)| wi.norm() < *li)
            }
            _ => false,
        }
    }

    /// The open set as a subset description (membership predicate).
    pub fn to_subset(&self, carrier: Carrier) -> SubsetRep {
        let me = self.clone();
        let bound = match &self.chain.tail {
            ChainTail::OpenLimit { limit, .. } => limit.clone(),
            _ => self
                .chain
                .members
                .last()
                .and_then(|p| p.weights().map(|w| w.iter().map(|x| x * 2.0).collect()))
                .unwrap_or_default(),
        };
        SubsetRep::predicate(carrier, "basis-open", bound, move |pt| me.contains(pt))
    }
}

/// Build a basis open from a chain, validating strict increase.
pub fn basis_open(chain: Chain, horizon: u32) -> Result<BasisOpen> {
    let verdict = is_strictly_increasing(&chain, horizon)?;
    if !verdict.strictly_increasing {
        return Err(AmError::InvalidArgument(format!(
            "the chain is not strictly increasing: {}",
            verdict.witness.unwrap_or_default()
        )));
    }
    Ok(BasisOpen { chain })
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    pub sampled_points: usize,
    pub disagreements: usize,
    pub meet_chain_strictly_increasing: bool,
}

/// Intersect basis opens through the meet chain: the k-th member of the
/// intersection chain is the chart meet of the k-th members (chains are
/// extended cofinally by their successor rules). Membership equality with
/// the pointwise intersection is verified on a sample.
pub fn intersect_basis_opens(
    opens: &[BasisOpen],
    horizon: u32,
    sample_budget: usize,
    seed: u64,
) -> Result<(BasisOpen, IntersectionReport)> {
    if opens.is_empty() {
        return Err(AmError::InvalidArgument("nothing to intersect".into()));
    }
    if opens.len() == 1 {
        return Ok((
            opens[0].clone(),
            IntersectionReport {
                sampled_points: 0,
                disagreements: 0,
                meet_chain_strictly_increasing: true,
            },
        ));
    }
    let len = opens.iter().map(|o| o.chain.members.len()).max().unwrap_or(0);
    // Extend every chain to the common length using its successor rule.
    let mut extended: Vec<Vec<Seminorm>> = Vec::new();
    for o in opens {
        let mut members = o.chain.members.clone();
        while members.len() < len {
            let last = members.last().expect("nonempty chain").clone();
            match o.chain.successor(&last) {
                Some(next) => members.push(next),
                None => break,
            }
        }
        extended.push(members);
    }
    let mut meet_members = Vec::new();
    for k in 0..len {
        let mut acc: Option<Seminorm> = None;
        for ext in &extended {
            let p = ext.get(k).or_else(|| ext.last()).expect("nonempty");
            acc = Some(match acc {
                None => p.clone(),
                Some(prev) => meet(&prev, p)?.seminorm,
            });
        }
        meet_members.push(acc.expect("nonempty"));
    }
    // Combine the tails.
    let mut tail = ChainTail::Unbounded { factor: 2.0 };
    let mut limit_acc: Option<Vec<f64>> = None;
    let mut rate_acc = 0.5f64;
    let mut any_none = false;
    let mut all_unbounded = true;
    for o in opens {
        match &o.chain.tail {
            ChainTail::None => {
                any_none = true;
                all_unbounded = false;
            }
            ChainTail::Unbounded { .. } => {}
            ChainTail::OpenLimit { limit, rate } => {
                all_unbounded = false;
                rate_acc = rate_acc.max(*rate);
                limit_acc = Some(match limit_acc {
                    None => limit.clone(),
                    Some(prev) => prev.iter().zip(limit).map(|(a, b)| a.min(*b)).collect(),
                });
            }
        }
    }
    if any_none {
        tail = ChainTail::None;
    } else if !all_unbounded {
        if let Some(limit) = limit_acc {
            tail = ChainTail::OpenLimit { limit, rate: rate_acc };
        }
    }
    let chain = Chain { members: meet_members, tail };
    let verdict = is_strictly_increasing(&chain, horizon)?;
    let open = BasisOpen { chain };
    // Sampled membership equality.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreements = 0usize;
    let hint = match opens[0].chain.model() {
        Some(crate::algebra::Model::Entire { .. }) => {
            let mut h: f64 = 1.0;
            for o in opens {
                if let ChainTail::OpenLimit { limit, .. } = &o.chain.tail {
                    h = h.max(limit.iter().copied().fold(0.0, f64::max));
                }
                for p in &o.chain.members {
                    if let Some(w) = p.weights() {
                        h = h.max(w.iter().copied().fold(0.0, f64::max));
                    }
                }
            }
            h * 1.3
        }
        _ => 2.0,
    };
    let carrier = match opens[0].chain.model() {
        Some(crate::algebra::Model::Entire { vars }) => Carrier::EntireCharacters(vars),
        Some(crate::algebra::Model::Function { points }) => Carrier::FunctionPoints(points),
        Some(crate::algebra::Model::Matrix { size }) => Carrier::MatrixStates(size),
        None => return Err(AmError::InvalidArgument("chains carry no members".into())),
    };
    for _ in 0..sample_budget {
        let pt = carrier.sample_point(&mut rng, hint);
        let lhs = open.contains(&pt);
        let rhs = opens.iter().all(|o| o.contains(&pt));
        if lhs != rhs {
            disagreements += 1;
        }
    }
    Ok((
        open,
        IntersectionReport {
            sampled_points: sample_budget,
            disagreements,
            meet_chain_strictly_increasing: verdict.strictly_increasing,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seminorm::SeminormChart;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gelfand1() -> SpectralFunctorInstance {
        SpectralFunctorInstance::gelfand(SeminormChart::entire(1)).unwrap()
    }

    #[test]
    fn minimal_seminorm_examples() {
        let inst = gelfand1();
        let m = minimal_seminorm(&inst, &CarrierPoint::Point(vec![c(0.5, 0.0)])).unwrap();
        assert_eq!(m.seminorm.weights().unwrap(), &[0.5]);
        assert!(m.certificate.iter().all(|(_, excluded)| *excluded));
        assert!(!m.boundary);

        // Degenerate boundary at the origin.
        let m0 = minimal_seminorm(&inst, &CarrierPoint::Point(vec![c(0.0, 0.0)])).unwrap();
        assert_eq!(m0.seminorm.weights().unwrap(), &[0.0]);
        assert!(m0.boundary);

        let instf = SpectralFunctorInstance::gelfand(SeminormChart::function(3)).unwrap();
        let mf = minimal_seminorm(&instf, &CarrierPoint::Index(1)).unwrap();
        assert_eq!(
            mf.seminorm.subset().unwrap().iter().copied().collect::<Vec<_>>(),
            vec![1]
        );
    }

    #[test]
    fn minimality_against_chart_members() {
        // Any chart member containing the point dominates the minimum
        // pointwise on monomials.
        let inst = gelfand1();
        let w = c(0.7, 0.3);
        let min = minimal_seminorm(&inst, &CarrierPoint::Point(vec![w])).unwrap();
        for r in [0.8, 1.0, 2.5] {
            let p = Seminorm::entire_weights([r]);
            if r >= w.norm() {
                for k in 0..8u32 {
                    let mono = Element::Entire(crate::poly::Poly::monomial(vec![k], c(1.0, 0.0)));
                    assert!(min.seminorm.eval(&mono).unwrap() <= p.eval(&mono).unwrap() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn chain_infimum_bottom_and_identity() {
        let family = vec![
            Seminorm::entire_weights([1.0]),
            Seminorm::entire_weights([0.5]),
            Seminorm::entire_weights([0.25]),
        ];
        let z = Element::Entire(crate::poly::Poly::variable(1, 0));
        let one = Element::unit(crate::algebra::Model::Entire { vars: 1 });
        let pairs = vec![(z.clone(), one.clone()), (z.clone(), z.clone())];
        let (inf, report) = chain_infimum(&family, &pairs).unwrap();
        assert_eq!(inf.weights().unwrap(), &[0.25]);
        assert_eq!(inf.eval(&z).unwrap(), 0.25);
        assert!(report.additivity_deviation < 1e-9);
        assert!(report.submultiplicativity_ok);

        // Singleton chain.
        let (single, _) = chain_infimum(&family[..1], &pairs).unwrap();
        assert_eq!(single.weights().unwrap(), &[1.0]);

        // Incomparable members are rejected.
        let bad = vec![
            Seminorm::entire_weights([1.0, 2.0]),
            Seminorm::entire_weights([2.0, 1.0]),
        ];
        let z1 = Element::Entire(crate::poly::Poly::variable(2, 0));
        let z2 = Element::Entire(crate::poly::Poly::variable(2, 1));
        assert!(chain_infimum(&bad, &[(z1, z2)]).is_err());
    }

    #[test]
    fn fullness_examples() {
        let inst = gelfand1();
        // Closed unit disc is full.
        let disc = SubsetRep::disc_union(1, vec![vec![1.0]]);
        assert!(is_full(&inst, &disc, 64, 5).unwrap().full);
        // The annulus misses small points of the minimal discs.
        let annulus = SubsetRep::predicate(
            Carrier::EntireCharacters(1),
            "annulus",
            vec![1.0],
            |pt| match pt {
                CarrierPoint::Point(w) => {
                    let r = w[0].norm();
                    (0.5..=1.0).contains(&r)
                }
                _ => false,
            },
        );
        let verdict = is_full(&inst, &annulus, 64, 5).unwrap();
        assert!(!verdict.full);
        if let Some(CarrierPoint::Point(w)) = verdict.witness {
            assert!(w[0].norm() < 0.5);
        } else {
            panic!("expected an interior witness");
        }
        // The whole carrier is trivially full.
        assert!(is_full(&inst, &SubsetRep::all(Carrier::EntireCharacters(1)), 16, 5).unwrap().full);
        // Function-model points are already full.
        let instf = SpectralFunctorInstance::gelfand(SeminormChart::function(4)).unwrap();
        let pts = SubsetRep::points(4, [0, 2]);
        assert!(is_full(&instf, &pts, 16, 5).unwrap().full);
    }

    #[test]
    fn full_closure_builds_disc_hull() {
        let inst = gelfand1();
        let n = SubsetRep::predicate(
            Carrier::EntireCharacters(1),
            "single point",
            vec![1.01],
            |pt| match pt {
                CarrierPoint::Point(w) => (w[0].norm() - 1.0).abs() < 0.2,
                _ => false,
            },
        );
        let hull = full_closure(&inst, &n, 128, 6).unwrap();
        // The hull must contain interior points below the sampled shell.
        assert!(hull.contains(&CarrierPoint::Point(vec![c(0.3, 0.0)])));
        // Empty stays empty.
        let e = full_closure(&inst, &SubsetRep::empty(Carrier::EntireCharacters(1)), 16, 6).unwrap();
        assert!(matches!(e.kind, SubsetKind::Empty));
    }

    #[test]
    fn seminorm_region_of_disc() {
        let inst = gelfand1();
        let disc = SubsetRep::disc_union(1, vec![vec![1.0]]);
        let region = seminorms_of(&inst, &disc, 64, 7).unwrap();
        assert!(region.contains(&Seminorm::entire_weights([0.7])));
        assert!(region.contains(&Seminorm::entire_weights([1.0])));
        assert!(!region.contains(&Seminorm::entire_weights([1.2])));

        // Function model: subsets of N exactly.
        let instf = SpectralFunctorInstance::gelfand(SeminormChart::function(4)).unwrap();
        let n = SubsetRep::points(4, [0, 1]);
        match seminorms_of(&instf, &n, 0, 7).unwrap() {
            SeminormRegion::Finite(list) => {
                assert_eq!(list.len(), 3); // {0}, {1}, {0,1}
            }
            r => panic!("expected a finite region, got {:?}", r),
        }
        // Empty set admits no chart seminorms.
        match seminorms_of(&inst, &SubsetRep::empty(Carrier::EntireCharacters(1)), 0, 7).unwrap() {
            SeminormRegion::Finite(list) => assert!(list.is_empty()),
            SeminormRegion::EntireRegion { .. } => panic!("expected empty finite region"),
        }
    }

    #[test]
    fn a_convexity_examples() {
        let inst = gelfand1();
        // Nested discs: A-convex.
        let nested = SubsetRep::disc_union(1, vec![vec![2.0], vec![1.0]]);
        assert!(is_a_convex(&inst, &nested, 32, 8).unwrap().a_convex);
        // Marked sets themselves are full and A-convex.
        let mp = SubsetRep::disc_union(1, vec![vec![1.5]]);
        assert!(is_full(&inst, &mp, 32, 8).unwrap().full);
        assert!(is_a_convex(&inst, &mp, 32, 8).unwrap().a_convex);
        // Function model: N = {0, 1} with all subsets.
        let instf = SpectralFunctorInstance::gelfand(SeminormChart::function(3)).unwrap();
        let n = SubsetRep::points(3, [0, 1]);
        assert!(is_a_convex(&instf, &n, 32, 8).unwrap().a_convex);
    }

    #[test]
    fn strict_domination_criterion() {
        // r=1 against R=2: ratio tails 2^-d decay to zero.
        let p = Seminorm::entire_weights([1.0]);
        let q = Seminorm::entire_weights([2.0]);
        let w = strictly_dominates(&p, &q, 16).unwrap();
        assert!(w.strict);
        assert!(w.tail.windows(2).all(|t| t[1] <= t[0]));
        assert!(w.tail.last().unwrap() < &1e-4);

        // Identity embedding is not compact.
        let wi = strictly_dominates(&p, &p, 16).unwrap();
        assert!(!wi.strict);
        assert!(wi.tail.iter().all(|t| *t == 1.0));

        // Directional counterexample: r=(1,1), R=(2,1).
        let r2 = Seminorm::entire_weights([1.0, 1.0]);
        let s2 = Seminorm::entire_weights([2.0, 1.0]);
        let wd = strictly_dominates(&r2, &s2, 16).unwrap();
        assert!(!wd.strict);
        assert!(wd.tail.iter().all(|t| *t == 1.0));

        // Non-domination is rejected.
        assert!(strictly_dominates(&q, &p, 16).is_err());

        // Finite model: compactness is automatic.
        let qs = Seminorm::function_subset(3, [0]);
        let qt = Seminorm::function_subset(3, [0, 1]);
        assert!(strictly_dominates(&qs, &qt, 16).unwrap().strict);
        assert!(strictly_dominates(&qs, &qs, 16).unwrap().strict);
    }

    #[test]
    fn strictly_increasing_chains() {
        // Finite prefix with the shift rule is strictly increasing.
        let members: Vec<Seminorm> =
            (1..=5).map(|k| Seminorm::entire_weights([k as f64])).collect();
        let chain = Chain::unbounded(members, 2.0);
        assert!(is_strictly_increasing(&chain, 32).unwrap().strictly_increasing);

        // A finite singleton has no strict successor.
        let single = Chain::finite(vec![Seminorm::entire_weights([1.0])]);
        assert!(!is_strictly_increasing(&single, 32).unwrap().strictly_increasing);

        // Function chains are strictly increasing outright.
        let fchain = Chain::finite(vec![
            Seminorm::function_subset(3, [0]),
            Seminorm::function_subset(3, [0, 1]),
        ]);
        assert!(is_strictly_increasing(&fchain, 32).unwrap().strictly_increasing);

        // Schwartz verdicts.
        assert!(is_schwartz(&SeminormChart::entire(1), 16));
        assert!(is_schwartz(&SeminormChart::function(4), 16));
    }

    #[test]
    fn basis_open_membership() {
        // Chain approaching radius 1 from below: the open unit disc.
        let chain = Chain::open_limit(
            vec![Seminorm::entire_weights([0.5]), Seminorm::entire_weights([0.75])],
            vec![1.0],
            0.5,
        );
        let u = basis_open(chain, 16).unwrap();
        assert!(u.contains(&CarrierPoint::Point(vec![c(0.9, 0.0)])));
        assert!(u.contains(&CarrierPoint::Point(vec![c(0.999, 0.0)])));
        assert!(!u.contains(&CarrierPoint::Point(vec![c(1.0, 0.0)])));

        // Unbounded chain covers everything.
        let all = basis_open(
            Chain::unbounded(vec![Seminorm::entire_weights([1.0])], 2.0),
            16,
        )
        .unwrap();
        assert!(all.contains(&CarrierPoint::Point(vec![c(1e6, 0.0)])));

        // Non-strict chains are rejected.
        assert!(basis_open(Chain::finite(vec![Seminorm::entire_weights([1.0])]), 16).is_err());
    }

    #[test]
    fn intersection_of_basis_opens() {
        // Discs opening to radii 1 and 2: the intersection is the open
        // unit disc, realised by the meet chain.
        let u1 = basis_open(
            Chain::open_limit(vec![Seminorm::entire_weights([0.5])], vec![1.0], 0.5),
            16,
        )
        .unwrap();
        let u2 = basis_open(
            Chain::open_limit(vec![Seminorm::entire_weights([0.6])], vec![2.0], 0.5),
            16,
        )
        .unwrap();
        let (inter, report) = intersect_basis_opens(&[u1.clone(), u2], 16, 800, 11).unwrap();
        assert_eq!(report.disagreements, 0);
        assert!(report.meet_chain_strictly_increasing);
        assert!(inter.contains(&CarrierPoint::Point(vec![c(0.99, 0.0)])));
        assert!(!inter.contains(&CarrierPoint::Point(vec![c(1.01, 0.0)])));

        // Intersecting with the whole space leaves the open unchanged on
        // a sample.
        let total = basis_open(
            Chain::unbounded(vec![Seminorm::entire_weights([1.0])], 2.0),
            16,
        )
        .unwrap();
        let (same, rep2) = intersect_basis_opens(&[u1.clone(), total], 16, 800, 12).unwrap();
        assert_eq!(rep2.disagreements, 0);
        for pt in [c(0.2, 0.1), c(0.95, 0.0), c(1.5, 0.0)] {
            assert_eq!(
                same.contains(&CarrierPoint::Point(vec![pt])),
                u1.contains(&CarrierPoint::Point(vec![pt]))
            );
        }

        // Function-model chains intersect exactly.
        let f1 = basis_open(
            Chain::finite(vec![
                Seminorm::function_subset(4, [0]),
                Seminorm::function_subset(4, [0, 1, 2]),
            ]),
            16,
        )
        .unwrap();
        let f2 = basis_open(
            Chain::finite(vec![Seminorm::function_subset(4, [1, 2, 3])]),
            16,
        )
        .unwrap();
        let (finter, frep) = intersect_basis_opens(&[f1, f2], 16, 64, 13).unwrap();
        assert_eq!(frep.disagreements, 0);
        assert!(finter.contains(&CarrierPoint::Index(1)));
        assert!(finter.contains(&CarrierPoint::Index(2)));
        assert!(!finter.contains(&CarrierPoint::Index(0)));
        assert!(!finter.contains(&CarrierPoint::Index(3)));
    }
}
