//! Diagonalization witnesses over finite enumerated families and finite
//! carriers with a permutation action.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gtrelations::{family_property, FamilyProperty};
use crate::sequences::{epd_pointwise_max, pair_decode, pair_encode, EpdFun, UpSet};
use crate::unions::{cyclic_action, orbit_relation, random_coarsening, FinEqRel};

// ---------------------------------------------------------------------------
// Carrier

/// A finite set `[0, N)` acted on by permutations `γ_0 = id, γ_1, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CarrierRepr", into = "CarrierRepr")]
pub struct Carrier {
    size: usize,
    action: Vec<Vec<usize>>,
    transversal: Option<Vec<usize>>,
    chain: Option<Vec<FinEqRel>>,
    orbits: FinEqRel,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarrierRepr {
    size: usize,
    action: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transversal: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chain: Option<Vec<FinEqRel>>,
}

impl TryFrom<CarrierRepr> for Carrier {
    type Error = Error;

    fn try_from(r: CarrierRepr) -> Result<Self> {
        Carrier::new(r.size, r.action, r.transversal, r.chain)
    }
}

impl From<Carrier> for CarrierRepr {
    fn from(c: Carrier) -> Self {
        CarrierRepr { size: c.size, action: c.action, transversal: c.transversal, chain: c.chain }
    }
}

impl Carrier {
    pub fn new(
        size: usize,
        action: Vec<Vec<usize>>,
        transversal: Option<Vec<usize>>,
        chain: Option<Vec<FinEqRel>>,
    ) -> Result<Self> {
        if action.is_empty() {
            return Err(Error::Invalid("action needs at least the identity".into()));
        }
        for (i, g) in action.iter().enumerate() {
            let mut seen = vec![false; size];
            if g.len() != size || !g.iter().all(|&y| y < size && !std::mem::replace(&mut seen[y], true)) {
                return Err(Error::Invalid(format!("γ_{i} is not a permutation of [0, {size})")));
            }
        }
        if action[0].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(Error::Invalid("γ_0 must be the identity".into()));
        }
        let orbits = orbit_relation(size, &action);
        if let Some(t) = &transversal {
            let mut hit = vec![0usize; orbits.block_count()];
            for &x in t {
                if x >= size {
                    return Err(Error::Invalid(format!("transversal point {x} outside carrier")));
                }
                hit[orbits.block(x)] += 1;
            }
            if hit.iter().any(|&c| c != 1) {
                return Err(Error::Invalid("transversal must meet every orbit exactly once".into()));
            }
        }
        if let Some(ch) = &chain {
            let last = ch.last().ok_or_else(|| Error::Invalid("empty chain".into()))?;
            for w in ch.windows(2) {
                if !w[0].refines(&w[1])? {
                    return Err(Error::Invalid("chain is not increasing".into()));
                }
            }
            if *last != orbits {
                return Err(Error::Invalid("chain union differs from the orbit relation".into()));
            }
        }
        Ok(Carrier { size, action, transversal, chain, orbits })
    }

    /// `n` points, trivial action.
    pub fn discrete(n: usize) -> Self {
        Carrier::new(n, vec![(0..n).collect()], Some((0..n).collect()), Some(vec![FinEqRel::discrete(n)]))
            .expect("valid")
    }

    /// Orbits given by `rel`, cyclic action, least-element transversal and a
    /// random chain of `levels` relations ending in `rel`.
    pub fn random_for<R: Rng + ?Sized>(rng: &mut R, rel: &FinEqRel, levels: usize) -> Self {
        let action = cyclic_action(rng, rel);
        let transversal = rel.classes().iter().map(|c| c[0]).collect();
        let mut chain = vec![];
        let mut cur = FinEqRel::discrete(rel.size());
        for _ in 1..levels.max(1) {
            // Coarsen inside `rel` only.
            let step = random_coarsening(rng, &cur, 0.5).meet(rel).expect("same carrier");
            cur = cur.join(&step).expect("same carrier");
            chain.push(cur.clone());
        }
        chain.push(rel.clone());
        Carrier::new(rel.size(), action, Some(transversal), Some(chain)).expect("valid by construction")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Number of permutations `G`.
    pub fn group_size(&self) -> usize {
        self.action.len()
    }

    /// `γ_i x`.
    pub fn apply(&self, i: usize, x: usize) -> usize {
        self.action[i][x]
    }

    pub fn orbits(&self) -> &FinEqRel {
        &self.orbits
    }

    pub fn transversal(&self) -> Option<&[usize]> {
        self.transversal.as_deref()
    }

    pub fn chain(&self) -> Option<&[FinEqRel]> {
        self.chain.as_deref()
    }

    /// σ(x): the transversal point in the orbit of `x`.
    pub fn sigma(&self, x: usize) -> Result<usize> {
        let t = self.transversal.as_ref().ok_or(Error::MissingTransversal)?;
        Ok(*t.iter().find(|&&s| self.orbits.related(s, x)).expect("transversal meets every orbit"))
    }

    /// Chain level `F_n`, the last level standing in beyond the chain.
    pub fn chain_level(&self, n: usize) -> Result<&FinEqRel> {
        let ch = self.chain.as_ref().ok_or(Error::MissingChain)?;
        Ok(&ch[n.min(ch.len() - 1)])
    }

    /// Least `n` with `x F_n y`.
    pub fn merge_level(&self, x: usize, y: usize) -> Result<Option<usize>> {
        let ch = self.chain.as_ref().ok_or(Error::MissingChain)?;
        Ok(ch.iter().position(|f| f.related(x, y)))
    }
}

// ---------------------------------------------------------------------------
// PointMap

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomClass {
    /// Literally constant on orbits.
    Exact,
    /// Orbit-mates get almost equal values.
    Eqstar,
    None,
}

/// Values that can be compared up to almost equality.
pub trait PointValue: Clone + PartialEq {
    fn almost_eq(&self, other: &Self) -> bool;
}

impl PointValue for UpSet {
    fn almost_eq(&self, other: &Self) -> bool {
        self.is_almost_equal(other)
    }
}

impl PointValue for EpdFun {
    fn almost_eq(&self, other: &Self) -> bool {
        self.is_almost_equal(other)
    }
}

impl PointValue for u64 {
    fn almost_eq(&self, _: &Self) -> bool {
        true
    }
}

impl<T: PointValue> PointValue for Vec<T> {
    fn almost_eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.almost_eq(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point<T> {
    pub id: usize,
    pub value: T,
}

/// An assignment of a value to each carrier point, with a declared
/// homomorphism class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointMapRepr<T>", into = "PointMapRepr<T>")]
#[serde(bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de>"))]
pub struct PointMap<T> {
    values: Vec<T>,
    class: HomClass,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointMapRepr<T> {
    points: Vec<Point<T>>,
    class: HomClass,
}

impl<T> TryFrom<PointMapRepr<T>> for PointMap<T> {
    type Error = Error;

    fn try_from(mut r: PointMapRepr<T>) -> Result<Self> {
        r.points.sort_by_key(|p| p.id);
        if r.points.iter().enumerate().any(|(i, p)| p.id != i) {
            return Err(Error::Invalid("point ids must be exactly 0..N".into()));
        }
        Ok(PointMap { values: r.points.into_iter().map(|p| p.value).collect(), class: r.class })
    }
}

impl<T> From<PointMap<T>> for PointMapRepr<T> {
    fn from(m: PointMap<T>) -> Self {
        PointMapRepr {
            points: m.values.into_iter().enumerate().map(|(id, value)| Point { id, value }).collect(),
            class: m.class,
        }
    }
}

impl<T> PointMap<T> {
    pub fn new(values: Vec<T>, class: HomClass) -> Self {
        PointMap { values, class }
    }

    pub fn get(&self, x: usize) -> &T {
        &self.values[x]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn class(&self) -> HomClass {
        self.class
    }

    fn check_carrier(&self, carrier: &Carrier) -> Result<()> {
        if self.len() != carrier.size() {
            return Err(Error::CarrierMismatch { left: carrier.size(), right: self.len() });
        }
        Ok(())
    }
}

impl<T: PointValue> PointMap<T> {
    /// Every pair `(x, γ_i x)` satisfies `pred`.
    fn orbit_pairs_satisfy(&self, carrier: &Carrier, pred: impl Fn(&T, &T) -> bool) -> bool {
        (0..carrier.size()).all(|x| {
            (0..carrier.group_size()).all(|i| pred(self.get(x), self.get(carrier.apply(i, x))))
        })
    }

    pub fn is_exact_invariant(&self, carrier: &Carrier) -> bool {
        self.orbit_pairs_satisfy(carrier, |a, b| a == b)
    }

    /// The declared class holds against the action.
    pub fn verify_class(&self, carrier: &Carrier) -> Result<bool> {
        self.check_carrier(carrier)?;
        Ok(match self.class {
            HomClass::Exact => self.is_exact_invariant(carrier),
            HomClass::Eqstar => self.orbit_pairs_satisfy(carrier, T::almost_eq),
            HomClass::None => true,
        })
    }
}

// ---------------------------------------------------------------------------
// Bounds

/// `β(n) = max_{k ≤ min(n, K-1)} α_k(n)`.
pub fn bound_family(family: &[EpdFun]) -> Result<EpdFun> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    let tail = rest.iter().fold(first.clone(), |acc, g| epd_pointwise_max(&acc, g));
    let prefix: Vec<u64> = (0..family.len() - 1)
        .map(|n| family[..=n].iter().map(|a| a.eval(n as u64)).max().unwrap())
        .collect();
    Ok(EpdFun::splice(&prefix, &tail))
}

/// ψ(x) = bound of `φ(γ_0 σx), …, φ(γ_{G-1} σx)`: constant on orbits and
/// almost above every value in the orbit.
pub fn invariant_bound(carrier: &Carrier, phi: &PointMap<EpdFun>) -> Result<PointMap<EpdFun>> {
    phi.check_carrier(carrier)?;
    let values = (0..carrier.size())
        .map(|x| {
            let s = carrier.sigma(x)?;
            let translates: Vec<EpdFun> =
                (0..carrier.group_size()).map(|i| phi.get(carrier.apply(i, s)).clone()).collect();
            bound_family(&translates)
        })
        .collect::<Result<_>>()?;
    Ok(PointMap::new(values, HomClass::Exact))
}

// ---------------------------------------------------------------------------
// Filter escape

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Keep,
    Complement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterEscape {
    /// `chain[n]` is `B_n ∩ A_n` or `B_n ∖ A_n`, with `B_0 = ω`.
    pub chain: Vec<UpSet>,
    pub sides: Vec<Side>,
    pub escape: Vec<u64>,
}

impl FilterEscape {
    fn level(&self, m: usize) -> UpSet {
        self.chain.get(m.min(self.chain.len().saturating_sub(1))).cloned().unwrap_or_else(UpSet::omega)
    }

    /// Nesting, side containments, and escape elements from index `n` on
    /// lying in `chain[n]`.
    pub fn verify(&self, family: &[UpSet]) -> bool {
        if self.chain.len() != family.len() || self.sides.len() != family.len() {
            return false;
        }
        let mut prev = UpSet::omega();
        for (n, (b, a)) in self.chain.iter().zip(family).enumerate() {
            let side_ok = match self.sides[n] {
                Side::Keep => b.difference(a).is_empty(),
                Side::Complement => b.intersect(a).is_empty(),
            };
            if !side_ok || !b.difference(&prev).is_empty() || b.is_finite() {
                return false;
            }
            if !self.escape[n.min(self.escape.len())..].iter().all(|&e| b.contains(e)) {
                return false;
            }
            prev = b.clone();
        }
        let distinct: HashSet<u64> = self.escape.iter().copied().collect();
        distinct.len() == self.escape.len()
    }
}

pub fn filter_escape(family: &[UpSet], steps: usize) -> Result<FilterEscape> {
    if let Some(index) = family.iter().position(UpSet::is_finite) {
        return Err(Error::FiniteMember { index });
    }
    let mut chain = vec![];
    let mut sides = vec![];
    let mut b = UpSet::omega();
    for a in family {
        let keep = b.intersect(a);
        let (next, side) = if keep.is_infinite() { (keep, Side::Keep) } else { (b.difference(a), Side::Complement) };
        assert!(next.is_infinite(), "an infinite set meets a set or its complement infinitely");
        chain.push(next.clone());
        sides.push(side);
        b = next;
    }
    let mut out = FilterEscape { chain, sides, escape: vec![] };
    let mut used = BTreeSet::new();
    for m in 0..steps {
        let e = out.level(m).min_excluding(&used).expect("levels are infinite");
        used.insert(e);
        out.escape.push(e);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pseudo-intersections synchronized along a chain

/// Same members up to enumeration.
fn same_members(a: &[UpSet], b: &[UpSet]) -> bool {
    a.iter().collect::<BTreeSet<_>>() == b.iter().collect::<BTreeSet<_>>()
}

/// `a_0(x) = min φ(x)(0)`, `a_{n+1}(x) = min[⋂_{i≤n} φ(x)(i) ∖ {a_i(y) : i ≤ n, y F_n x}]`.
/// Members past the end of a family repeat the full intersection.
pub fn pseudo_intersection_sync(
    carrier: &Carrier,
    phi: &PointMap<Vec<UpSet>>,
    steps: usize,
) -> Result<PointMap<Vec<u64>>> {
    phi.check_carrier(carrier)?;
    carrier.chain_level(0)?;
    for x in 0..carrier.size() {
        let fam = phi.get(x);
        if fam.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if !family_property(FamilyProperty::Centered, fam)? {
            return Err(Error::PhiViolation {
                phi: FamilyProperty::Centered,
                detail: format!("family at point {x}"),
            });
        }
        for i in 0..carrier.group_size() {
            if !same_members(fam, phi.get(carrier.apply(i, x))) {
                return Err(Error::Precondition(format!(
                    "points {x} and {} see different families",
                    carrier.apply(i, x)
                )));
            }
        }
    }
    let intersections: Vec<Vec<UpSet>> = phi
        .values()
        .iter()
        .map(|fam| {
            fam.iter()
                .scan(UpSet::omega(), |acc, a| {
                    *acc = acc.intersect(a);
                    Some(acc.clone())
                })
                .collect()
        })
        .collect();
    let meet = |x: usize, n: usize| &intersections[x][n.min(intersections[x].len() - 1)];

    let mut seqs: Vec<Vec<u64>> = vec![vec![]; carrier.size()];
    if steps == 0 {
        return Ok(PointMap::new(seqs, HomClass::None));
    }
    for (x, s) in seqs.iter_mut().enumerate() {
        s.push(meet(x, 0).next_member(0).expect("centered"));
    }
    for n in 0..steps - 1 {
        let level = carrier.chain_level(n)?;
        let mut excluded: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); level.block_count()];
        for (y, s) in seqs.iter().enumerate() {
            excluded[level.block(y)].extend(s.iter().copied());
        }
        let next: Vec<u64> = (0..carrier.size())
            .map(|x| meet(x, n).min_excluding(&excluded[level.block(x)]).expect("centered"))
            .collect();
        for (s, v) in seqs.iter_mut().zip(next) {
            s.push(v);
        }
    }
    Ok(PointMap::new(seqs, HomClass::None))
}

/// Index from which `pseudo_intersection_sync` sequences of orbit-mates
/// coincide: past both the merge level and the family length.
pub fn sync_agreement_index(carrier: &Carrier, phi: &PointMap<Vec<UpSet>>, x: usize, y: usize) -> Result<Option<usize>> {
    Ok(carrier
        .merge_level(x, y)?
        .map(|m| m.max(phi.get(x).len().saturating_sub(1)).max(phi.get(y).len().saturating_sub(1)) + 1))
}

// ---------------------------------------------------------------------------
// Smooth witnesses

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothSplit {
    /// `α_0, α_1, …` per point.
    pub psi: PointMap<Vec<u64>>,
    /// `φ'_0, φ'_1, …` per point.
    pub refinements: PointMap<Vec<UpSet>>,
    /// Side taken at each member of `φ(σx)`.
    pub sides: PointMap<Vec<Side>>,
}

pub fn smooth_split_witness(carrier: &Carrier, phi: &PointMap<Vec<UpSet>>, steps: usize) -> Result<SmoothSplit> {
    phi.check_carrier(carrier)?;
    let mut psi = vec![];
    let mut refinements = vec![];
    let mut sides = vec![];
    for x in 0..carrier.size() {
        let fam = phi.get(carrier.sigma(x)?);
        if fam.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some(index) = fam.iter().position(UpSet::is_finite) {
            return Err(Error::FiniteMember { index });
        }
        let mut levels = vec![fam[0].clone()];
        let mut side = vec![Side::Keep];
        for a in &fam[1..] {
            let prev = levels.last().unwrap();
            let keep = a.intersect(prev);
            if keep.is_infinite() {
                levels.push(keep);
                side.push(Side::Keep);
            } else {
                levels.push(prev.difference(a));
                side.push(Side::Complement);
            }
        }
        let mut used = BTreeSet::new();
        let alphas: Vec<u64> = (0..steps)
            .map(|n| {
                let v = levels[n.min(levels.len() - 1)].min_excluding(&used).expect("levels are infinite");
                used.insert(v);
                v
            })
            .collect();
        psi.push(alphas);
        refinements.push(levels);
        sides.push(side);
    }
    Ok(SmoothSplit {
        psi: PointMap::new(psi, HomClass::Exact),
        refinements: PointMap::new(refinements, HomClass::Exact),
        sides: PointMap::new(sides, HomClass::Exact),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSide {
    /// `v ⊆* x`.
    Left,
    /// `v ⊆* x^c`.
    Right,
}

pub fn split_side(v: &UpSet, x: &UpSet) -> Result<SplitSide> {
    if v.is_finite() {
        return Err(Error::FiniteSet("v must be infinite"));
    }
    match (v.is_almost_subset_of(x), v.is_almost_subset_of(&x.complement())) {
        (true, false) => Ok(SplitSide::Left),
        (false, true) => Ok(SplitSide::Right),
        (false, false) => Err(Error::Precondition("v splits x: neither side is almost contained".into())),
        (true, true) => unreachable!("an infinite set is almost inside at most one of x, x^c"),
    }
}

// ---------------------------------------------------------------------------
// Conversions between point-to-function and point-to-family forms

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Spread,
    Collapse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiForm {
    Single(PointMap<EpdFun>),
    Family(PointMap<Vec<EpdFun>>),
}

/// `φ'(x) = [φ(γ_0 x), …, φ(γ_{G-1} x)]`; index `n` reads `n mod G`.
pub fn spread(carrier: &Carrier, phi: &PointMap<EpdFun>) -> Result<PointMap<Vec<EpdFun>>> {
    phi.check_carrier(carrier)?;
    let values = (0..carrier.size())
        .map(|x| (0..carrier.group_size()).map(|i| phi.get(carrier.apply(i, x)).clone()).collect())
        .collect();
    Ok(PointMap::new(values, HomClass::None))
}

/// `φ(x)(n) = max_{k≤n} φ'(x)(k)(n)`.
pub fn collapse(phi: &PointMap<Vec<EpdFun>>) -> Result<PointMap<EpdFun>> {
    let values = phi.values().iter().map(|fam| bound_family(fam)).collect::<Result<_>>()?;
    Ok(PointMap::new(values, HomClass::None))
}

pub fn phi_conversions(direction: Direction, carrier: &Carrier, input: &PhiForm) -> Result<PhiForm> {
    match (direction, input) {
        (Direction::Spread, PhiForm::Single(p)) => spread(carrier, p).map(PhiForm::Family),
        (Direction::Collapse, PhiForm::Family(p)) => {
            p.check_carrier(carrier)?;
            collapse(p).map(PhiForm::Single)
        }
        (Direction::Spread, PhiForm::Family(_)) => Err(Error::Shape("spread expects point-to-function input".into())),
        (Direction::Collapse, PhiForm::Single(_)) => Err(Error::Shape("collapse expects point-to-family input".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    Identity,
    Transversal,
    /// `γ_k x` for the least `k` with `γ_k x ∈ B`.
    LeastIndexInto(Vec<usize>),
}

fn select(carrier: &Carrier, selector: &Selector, x: usize) -> Result<usize> {
    match selector {
        Selector::Identity => Ok(x),
        Selector::Transversal => carrier.sigma(x),
        Selector::LeastIndexInto(b) => (0..carrier.group_size())
            .map(|k| carrier.apply(k, x))
            .find(|y| b.contains(y))
            .ok_or_else(|| Error::Precondition(format!("no translate of point {x} lies in B"))),
    }
}

/// `φ̃(x)(n) = φ(γ_{n₀} sel(x))(n₁)` with `(n₀, n₁) = pair_decode(n)`, indices
/// reduced modulo `G` and the family length, for `n ≤ pair_encode(G-1, L-1)`.
pub fn spread_homomorphism<T: Clone>(
    carrier: &Carrier,
    phi: &PointMap<Vec<T>>,
    selector: &Selector,
) -> Result<PointMap<Vec<T>>> {
    phi.check_carrier(carrier)?;
    let g = carrier.group_size() as u64;
    let longest = phi.values().iter().map(Vec::len).max().unwrap_or(0) as u64;
    if phi.values().iter().any(Vec::is_empty) {
        return Err(Error::EmptyFamily);
    }
    let top = pair_encode(g - 1, longest - 1);
    let values = (0..carrier.size())
        .map(|x| {
            let s = select(carrier, selector, x)?;
            Ok((0..=top)
                .map(|n| {
                    let (n0, n1) = pair_decode(n);
                    let fam = phi.get(carrier.apply((n0 % g) as usize, s));
                    fam[(n1 % fam.len() as u64) as usize].clone()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(PointMap::new(values, HomClass::None))
}
