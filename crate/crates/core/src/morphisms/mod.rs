//! Galois-Tukey morphisms between relations.
//!
//! A morphism from 𝑨 to 𝑩 is a pair `ξ_-: B_- → A_-`, `ξ_+: A_+ → B_+` with
//! `ξ_-(b) A a ⟹ b B ξ_+(a)`. It transports dominating families of 𝑨 to
//! dominating families of 𝑩, so an implication `x → y` between properties
//! is carried by a morphism *from* the relation of `y` *to* that of `x`.

mod independence;
mod lambda;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gtrelations::{family_property, is_dominating_for, relation_eval, FamilyProperty, Label};
use crate::sample::{self, Bounds};
use crate::sequences::{Element, Space, UpSet};

pub use independence::{
    boolean_combinations, independence_extension, BooleanCombination, IndependenceVerdict,
};
pub use lambda::{
    gap_interval_in, interval_split_witness, lambda_coalesce, IntervalSplit, Lambda,
    DEFAULT_HORIZON,
};

pub type ElementMap = Arc<dyn Fn(&Element) -> Result<Element> + Send + Sync>;

#[derive(Clone)]
pub struct Morphism {
    pub name: String,
    /// 𝑨: ξ_- lands in its challenges, ξ_+ reads its responses.
    pub source: Label,
    /// 𝑩: ξ_- reads its challenges, ξ_+ lands in its responses.
    pub target: Label,
    xi_minus: ElementMap,
    xi_plus: ElementMap,
    pub phi_transport_note: String,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("phi_transport_note", &self.phi_transport_note)
            .finish_non_exhaustive()
    }
}

impl Morphism {
    pub fn new(
        name: impl Into<String>,
        source: Label,
        target: Label,
        xi_minus: impl Fn(&Element) -> Result<Element> + Send + Sync + 'static,
        xi_plus: impl Fn(&Element) -> Result<Element> + Send + Sync + 'static,
        phi_transport_note: impl Into<String>,
    ) -> Self {
        Morphism {
            name: name.into(),
            source,
            target,
            xi_minus: Arc::new(xi_minus),
            xi_plus: Arc::new(xi_plus),
            phi_transport_note: phi_transport_note.into(),
        }
    }

    pub fn identity(label: Label) -> Self {
        Morphism::new(
            format!("id_{label}"),
            label,
            label,
            |b| Ok(b.clone()),
            |a| Ok(a.clone()),
            "identity",
        )
    }

    pub fn xi_minus(&self, b: &Element) -> Result<Element> {
        (self.xi_minus)(b)
    }

    pub fn xi_plus(&self, a: &Element) -> Result<Element> {
        (self.xi_plus)(a)
    }

    /// Space of the challenges ξ_- accepts (B_-).
    pub fn challenge_space(&self) -> Space {
        self.target.relation().challenge_space
    }

    /// Space of the responses ξ_+ accepts (A_+).
    pub fn response_space(&self) -> Space {
        self.source.relation().response_space
    }
}

/// Named morphisms backing the arrows of the implication diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrow {
    PToA,
    BToD,
    RToU,
    PToT,
    PToBStub,
}

impl Arrow {
    pub const ALL: [Arrow; 5] = [Arrow::PToA, Arrow::BToD, Arrow::RToU, Arrow::PToT, Arrow::PToBStub];

    pub fn as_str(self) -> &'static str {
        match self {
            Arrow::PToA => "p_to_a",
            Arrow::BToD => "b_to_d",
            Arrow::RToU => "r_to_u",
            Arrow::PToT => "p_to_t",
            Arrow::PToBStub => "p_to_b_stub",
        }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arrow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Arrow::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown arrow {s:?}")))
    }
}

fn complement(a: &Element) -> Result<Element> {
    Ok(Element::Set(a.as_set()?.complement()))
}

fn successor(g: &Element) -> Result<Element> {
    Ok(Element::Fun(g.as_fun()?.shift(1)))
}

fn checked_identity(space: Space) -> impl Fn(&Element) -> Result<Element> + Send + Sync {
    move |e: &Element| {
        if e.space() != space {
            return Err(Error::TypeMismatch { expected: space, found: e.space() });
        }
        Ok(e.clone())
    }
}

pub fn builtin_morphism(arrow: Arrow) -> Morphism {
    match arrow {
        Arrow::PToA => Morphism::new(
            arrow.as_str(),
            Label::A,
            Label::P,
            checked_identity(Space::Set),
            complement,
            "almost disjoint family of coinfinite sets -> complements with the finite intersection property",
        ),
        Arrow::BToD => Morphism::new(
            arrow.as_str(),
            Label::D,
            Label::B,
            successor,
            checked_identity(Space::Fun),
            "no family property on either side",
        ),
        Arrow::RToU => Morphism::new(
            arrow.as_str(),
            Label::U,
            Label::R,
            checked_identity(Space::Set),
            checked_identity(Space::Set),
            "centered -> unrestricted; the predicates coincide",
        ),
        Arrow::PToT => Morphism::new(
            arrow.as_str(),
            Label::T,
            Label::P,
            checked_identity(Space::Set),
            checked_identity(Space::Set),
            "every tower is centered",
        ),
        Arrow::PToBStub => Morphism::new(
            arrow.as_str(),
            Label::B,
            Label::P,
            |_| Err(Error::NotImplemented("p_to_b xi_minus: construction not available")),
            |_| Err(Error::NotImplemented("p_to_b xi_plus: construction not available")),
            "contract only: image of xi_plus centered, and A ⊆* xi_plus(f) implies f ≤* xi_minus(A)",
        ),
    }
}

/// Deliberately wrong morphisms used to show the checkers find violations.
pub mod broken {
    use super::*;

    /// b_to_d without the +1 shift.
    pub fn unshifted_b_to_d() -> Morphism {
        Morphism::new(
            "broken_b_to_d",
            Label::D,
            Label::B,
            checked_identity(Space::Fun),
            checked_identity(Space::Fun),
            "broken",
        )
    }

    /// p_to_a shape whose ξ_- reads the bit at 0, so it is not =*-invariant.
    pub fn zero_bit_p_to_a() -> Morphism {
        Morphism::new(
            "broken_invariance_p_to_a",
            Label::A,
            Label::P,
            |b| {
                let s = b.as_set()?;
                Ok(Element::Set(if s.contains(0) { s.clone() } else { s.complement() }))
            },
            complement,
            "broken",
        )
    }

    /// Morphism from p to a with identity components; the law fails on
    /// disjoint pairs.
    pub fn identity_p_to_a() -> Morphism {
        Morphism::new(
            "broken_identity_p_to_a",
            Label::P,
            Label::A,
            checked_identity(Space::Set),
            checked_identity(Space::Set),
            "broken",
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub samples_run: usize,
    pub violations: Vec<(Element, Element)>,
    pub passed: bool,
}

impl CheckReport {
    fn from_violations(samples_run: usize, mut violations: Vec<(Element, Element)>) -> Self {
        violations.sort();
        violations.dedup();
        let passed = violations.is_empty();
        CheckReport { samples_run, violations, passed }
    }

    pub fn merge(mut self, other: CheckReport) -> Self {
        self.samples_run += other.samples_run;
        self.violations.extend(other.violations);
        Self::from_violations(self.samples_run, self.violations)
    }
}

/// Tests `ξ_-(b) A a ⟹ b B ξ_+(a)` on every `(b, a)` in the product.
pub fn morphism_law_check(
    m: &Morphism,
    challenges: &[Element],
    responses: &[Element],
) -> Result<CheckReport> {
    let pulled: Vec<Element> = challenges.iter().map(|b| m.xi_minus(b)).collect::<Result<_>>()?;
    let pushed: Vec<Element> = responses.iter().map(|a| m.xi_plus(a)).collect::<Result<_>>()?;
    let mut violations = vec![];
    for (b, xb) in challenges.iter().zip(&pulled) {
        for (a, xa) in responses.iter().zip(&pushed) {
            if relation_eval(m.source, xb, a)? && !relation_eval(m.target, b, xa)? {
                violations.push((b.clone(), a.clone()));
            }
        }
    }
    Ok(CheckReport::from_violations(challenges.len() * responses.len(), violations))
}

/// For each seed `b` and `mutations` random finite modifications `b'`,
/// checks `ξ_-(b) =* ξ_-(b')`. Violations are reported as `(b, b')`.
pub fn invariance_check<R: Rng + ?Sized>(
    m: &Morphism,
    seeds: &[Element],
    mutations: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    let bounds = Bounds::default();
    let mut violations = vec![];
    for b in seeds {
        let image = m.xi_minus(b)?;
        for _ in 0..mutations {
            let b2 = sample::mutate_element(rng, b, bounds);
            if !image.is_almost_equal(&m.xi_minus(&b2)?)? {
                violations.push((b.clone(), b2));
            }
        }
    }
    Ok(CheckReport::from_violations(seeds.len() * mutations, violations))
}

/// `m1: 𝑨 → 𝑩` and `m2: 𝑩 → 𝑪` give `𝑨 → 𝑪`.
pub fn compose(m1: &Morphism, m2: &Morphism) -> Result<Morphism> {
    if m1.target != m2.source {
        return Err(Error::LabelMismatch { left: m1.target, right: m2.source });
    }
    let (m1_minus, m2_minus) = (m1.xi_minus.clone(), m2.xi_minus.clone());
    let (m1_plus, m2_plus) = (m1.xi_plus.clone(), m2.xi_plus.clone());
    Ok(Morphism {
        name: format!("{}∘{}", m2.name, m1.name),
        source: m1.source,
        target: m2.target,
        xi_minus: Arc::new(move |c| m1_minus(&m2_minus(c)?)),
        xi_plus: Arc::new(move |a| m2_plus(&m1_plus(a)?)),
        phi_transport_note: format!("{}; {}", m1.phi_transport_note, m2.phi_transport_note),
    })
}

/// Random element of `space`; set challenges are drawn infinite.
pub fn sample_element<R: Rng + ?Sized>(rng: &mut R, space: Space, challenge: bool) -> Element {
    let b = Bounds::default();
    match space {
        Space::Fun => Element::Fun(sample::random_epd(rng, b)),
        Space::Set if challenge => Element::Set(sample::random_infinite_upset(rng, b)),
        Space::Set => Element::Set(sample::random_upset(rng, b)),
    }
}

/// Runs the law check on independent 10×10 batches until at least
/// `pairs` pairs have been evaluated.
pub fn sampled_law_check<R: Rng + ?Sized>(m: &Morphism, pairs: usize, rng: &mut R) -> Result<CheckReport> {
    const SIDE: usize = 10;
    let mut report = CheckReport::from_violations(0, vec![]);
    while report.samples_run < pairs {
        let bs: Vec<Element> =
            (0..SIDE).map(|_| sample_element(rng, m.challenge_space(), true)).collect();
        let as_: Vec<Element> =
            (0..SIDE).map(|_| sample_element(rng, m.response_space(), false)).collect();
        report = report.merge(morphism_law_check(m, &bs, &as_)?);
    }
    Ok(report)
}

/// Runs the invariance check on `seeds` random challenges with
/// `mutations` modifications each.
pub fn sampled_invariance_check<R: Rng + ?Sized>(
    m: &Morphism,
    seeds: usize,
    mutations: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    let bs: Vec<Element> = (0..seeds).map(|_| sample_element(rng, m.challenge_space(), true)).collect();
    invariance_check(m, &bs, mutations, rng)
}

/// Both sides of the dominating-family transport for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transport {
    /// `family` dominates `ξ_-(challenges)` in 𝑨.
    pub source_dominates: bool,
    /// `ξ_+(family)` dominates `challenges` in 𝑩.
    pub target_dominates: bool,
}

impl Transport {
    pub fn holds(&self) -> bool {
        !self.source_dominates || self.target_dominates
    }
}

pub fn transport_dominating(
    m: &Morphism,
    family: &[Element],
    challenges: &[Element],
) -> Result<Transport> {
    let pulled: Vec<Element> = challenges.iter().map(|c| m.xi_minus(c)).collect::<Result<_>>()?;
    let pushed: Vec<Element> = family.iter().map(|y| m.xi_plus(y)).collect::<Result<_>>()?;
    Ok(Transport {
        source_dominates: is_dominating_for(m.source, family, &pulled)?,
        target_dominates: is_dominating_for(m.target, &pushed, challenges)?,
    })
}

/// Φ-transport of `p_to_a` at desk scale: for an almost disjoint family of
/// infinite coinfinite sets, the complements of any subfamily that leaves
/// out at least one member are centered.
pub fn complements_centered(family: &[UpSet]) -> Result<bool> {
    if !family_property(FamilyProperty::AlmostDisjoint, family)? {
        return Err(Error::PhiViolation {
            phi: FamilyProperty::AlmostDisjoint,
            detail: "input family is not almost disjoint".into(),
        });
    }
    if family.len() < 2 {
        return Ok(true);
    }
    for skip in 0..family.len() {
        let complements: Vec<UpSet> = family
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, a)| a.complement())
            .collect();
        if !family_property(FamilyProperty::Centered, &complements)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::EpdFun;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(a: UpSet) -> Element {
        Element::Set(a)
    }

    fn f(g: EpdFun) -> Element {
        Element::Fun(g)
    }

    #[test]
    fn p_to_a_law_examples() {
        let m = builtin_morphism(Arrow::PToA);
        let r = morphism_law_check(&m, &[s(UpSet::evens())], &[s(UpSet::evens())]).unwrap();
        assert!(r.passed);
        let r = morphism_law_check(&m, &[s(UpSet::evens())], &[s(UpSet::odds())]).unwrap();
        assert!(r.passed);
        let r = morphism_law_check(
            &m,
            &[s(UpSet::evens()), s(UpSet::multiples(4))],
            &[s(UpSet::evens()), s(UpSet::odds()), s(UpSet::multiples(4))],
        )
        .unwrap();
        assert_eq!(r.samples_run, 6);
        assert!(r.passed);
    }

    #[test]
    fn b_to_d_law_examples() {
        let m = builtin_morphism(Arrow::BToD);
        let r = morphism_law_check(&m, &[f(EpdFun::constant(3))], &[f(EpdFun::identity())]).unwrap();
        assert!(r.passed);
        let consts: Vec<Element> = (0..5).map(|k| f(EpdFun::constant(k))).collect();
        let r = morphism_law_check(&m, &consts, &[f(EpdFun::identity()), f(EpdFun::constant(9))])
            .unwrap();
        assert!(r.passed);
    }

    #[test]
    fn unshifted_b_to_d_is_caught() {
        let m = broken::unshifted_b_to_d();
        let id = f(EpdFun::identity());
        let r = morphism_law_check(&m, &[id.clone()], &[id.clone()]).unwrap();
        assert_eq!(r.violations, vec![(id.clone(), id)]);
        assert!(!r.passed);
    }

    #[test]
    fn invariance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for arrow in [Arrow::PToA, Arrow::BToD] {
            let r = sampled_invariance_check(&builtin_morphism(arrow), 20, 10, &mut rng).unwrap();
            assert!(r.passed, "{arrow}");
        }
        let m = broken::zero_bit_p_to_a();
        let odds = UpSet::odds();
        let image = m.xi_minus(&s(odds.clone())).unwrap();
        let image2 = m.xi_minus(&s(odds.flip(&[0]))).unwrap();
        assert!(!image.is_almost_equal(&image2).unwrap());
        let r = invariance_check(&m, &[s(odds)], 50, &mut rng).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn stub_raises_not_implemented() {
        let m = builtin_morphism(Arrow::PToBStub);
        let r = morphism_law_check(&m, &[s(UpSet::evens())], &[f(EpdFun::identity())]);
        assert!(matches!(r, Err(Error::NotImplemented(_))));
        assert!(matches!(m.xi_plus(&f(EpdFun::identity())), Err(Error::NotImplemented(_))));
    }

    #[test]
    fn composition() {
        let m = builtin_morphism(Arrow::BToD);
        let c = compose(&m, &Morphism::identity(Label::B)).unwrap();
        for g in [EpdFun::constant(2), EpdFun::linear(3, 1)] {
            assert_eq!(c.xi_minus(&f(g.clone())).unwrap(), m.xi_minus(&f(g.clone())).unwrap());
            assert_eq!(c.xi_plus(&f(g.clone())).unwrap(), m.xi_plus(&f(g)).unwrap());
        }
        // t -> p followed by a broken p -> a
        let c = compose(&builtin_morphism(Arrow::PToT), &broken::identity_p_to_a()).unwrap();
        assert_eq!((c.source, c.target), (Label::T, Label::A));
        let r = morphism_law_check(&c, &[s(UpSet::evens())], &[s(UpSet::odds())]).unwrap();
        assert!(!r.passed);
        let e = compose(&builtin_morphism(Arrow::PToA), &builtin_morphism(Arrow::RToU));
        assert!(matches!(e, Err(Error::LabelMismatch { .. })));
    }

    #[test]
    fn p_to_a_transports_almost_disjoint_to_centered() {
        let fam = vec![UpSet::multiples(4), UpSet::residues(4, &[1]), UpSet::residues(4, &[2])];
        assert!(complements_centered(&fam).unwrap());
        assert!(complements_centered(&[UpSet::evens(), UpSet::odds()]).unwrap());
        assert!(complements_centered(&[UpSet::evens(), UpSet::multiples(4)]).is_err());
    }

    #[test]
    fn arrows_parse() {
        for a in Arrow::ALL {
            assert_eq!(a.as_str().parse::<Arrow>().unwrap(), a);
        }
        assert!("q_to_r".parse::<Arrow>().is_err());
    }
}
