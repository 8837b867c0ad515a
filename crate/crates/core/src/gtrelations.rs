//! Challenge/response relations for the nine properties b, d, s, r, p, t,
//! a, i, u, the family properties Φ that relativize them, and the witness
//! clause each property asks of a map ψ.
//!
//! Every relation is oriented so that ψ witnesses property x against a
//! family F exactly when `¬A(ψ, y)` for every `y ∈ F`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{Element, EpdFun, Space, UpSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    B,
    D,
    S,
    R,
    P,
    T,
    A,
    I,
    U,
}

impl Label {
    pub const ALL: [Label; 9] =
        [Label::B, Label::D, Label::S, Label::R, Label::P, Label::T, Label::A, Label::I, Label::U];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::B => "b",
            Label::D => "d",
            Label::S => "s",
            Label::R => "r",
            Label::P => "p",
            Label::T => "t",
            Label::A => "a",
            Label::I => "i",
            Label::U => "u",
        }
    }

    pub fn relation(self) -> GtRelation {
        GtRelation::of(self)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown relation label {s:?}")))
    }
}

/// Property Φ a response family must have before a witness is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyProperty {
    Centered,
    Tower,
    AlmostDisjoint,
    Independent,
    None,
}

impl FamilyProperty {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyProperty::Centered => "centered",
            FamilyProperty::Tower => "tower",
            FamilyProperty::AlmostDisjoint => "almost_disjoint",
            FamilyProperty::Independent => "independent",
            FamilyProperty::None => "none",
        }
    }
}

impl fmt::Display for FamilyProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            FamilyProperty::Centered,
            FamilyProperty::Tower,
            FamilyProperty::AlmostDisjoint,
            FamilyProperty::Independent,
            FamilyProperty::None,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| Error::Invalid(format!("unknown family property {s:?}")))
    }
}

/// A relation triple `(A_-, A_+, A)` together with its family property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtRelation {
    pub label: Label,
    pub challenge_space: Space,
    pub response_space: Space,
    pub phi: FamilyProperty,
}

impl GtRelation {
    pub fn of(label: Label) -> Self {
        let (space, phi) = match label {
            Label::B | Label::D => (Space::Fun, FamilyProperty::None),
            Label::S | Label::R => (Space::Set, FamilyProperty::None),
            Label::P | Label::U => (Space::Set, FamilyProperty::Centered),
            Label::T => (Space::Set, FamilyProperty::Tower),
            Label::A => (Space::Set, FamilyProperty::AlmostDisjoint),
            Label::I => (Space::Set, FamilyProperty::Independent),
        };
        GtRelation { label, challenge_space: space, response_space: space, phi }
    }

    /// `A(challenge, response)`.
    pub fn holds(&self, challenge: &Element, response: &Element) -> Result<bool> {
        relation_eval(self.label, challenge, response)
    }
}

fn expect_space(e: &Element, want: Space) -> Result<()> {
    if e.space() == want {
        Ok(())
    } else {
        Err(Error::TypeMismatch { expected: want, found: e.space() })
    }
}

/// Evaluates the dominating predicate `A(challenge, response)`:
///
/// | label | `A(ψ, y)` |
/// |---|---|
/// | b | `y ≰* ψ` |
/// | d | `ψ ≤* y` |
/// | s | `y` splits `ψ` |
/// | r, u | `ψ` does not split `y` |
/// | p, t | `ψ ⊄* y` |
/// | a | `ψ ∩ y` infinite |
pub fn relation_eval(label: Label, challenge: &Element, response: &Element) -> Result<bool> {
    let rel = GtRelation::of(label);
    if label == Label::I {
        return Err(Error::NotBinary(label));
    }
    expect_space(challenge, rel.challenge_space)?;
    expect_space(response, rel.response_space)?;
    Ok(match rel.challenge_space {
        Space::Fun => {
            let (psi, y) = (challenge.as_fun()?, response.as_fun()?);
            match label {
                Label::B => !y.is_eventually_le(psi),
                Label::D => psi.is_eventually_le(y),
                _ => unreachable!(),
            }
        }
        Space::Set => {
            let (psi, y) = (challenge.as_set()?, response.as_set()?);
            match label {
                Label::S => y.splits(psi),
                Label::R | Label::U => !psi.splits(y),
                Label::P | Label::T => !psi.is_almost_subset_of(y),
                Label::A => psi.intersect(y).is_infinite(),
                _ => unreachable!(),
            }
        }
    })
}

fn require_infinite(family: &[UpSet]) -> Result<()> {
    match family.iter().position(|a| a.is_finite()) {
        Some(index) => Err(Error::FiniteMember { index }),
        None => Ok(()),
    }
}

/// Direction in which a finite ⊆*-chain is listed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainOrientation {
    /// Each member is ⊆* the next.
    Increasing,
    /// Each member is ⊇* the next.
    Decreasing,
    /// A chain, but not listed in chain order.
    Unsorted,
}

/// Outcome of the tower check on a finite family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerReport {
    pub is_chain: bool,
    /// Indices of the members in ⊆*-increasing order, when a chain.
    pub increasing_order: Option<Vec<usize>>,
    pub orientation: Option<ChainOrientation>,
}

/// Members pairwise ⊆*-comparable and pairwise not =*.
pub fn tower_report(family: &[UpSet]) -> Result<TowerReport> {
    require_infinite(family)?;
    let n = family.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&family[i], &family[j]);
            if a.is_almost_equal(b) || !(a.is_almost_subset_of(b) || b.is_almost_subset_of(a)) {
                return Ok(TowerReport { is_chain: false, increasing_order: None, orientation: None });
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        if family[i].is_almost_subset_of(&family[j]) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let orientation = if order.iter().copied().eq(0..n) {
        ChainOrientation::Increasing
    } else if order.iter().copied().eq((0..n).rev()) {
        ChainOrientation::Decreasing
    } else {
        ChainOrientation::Unsorted
    };
    Ok(TowerReport { is_chain: true, increasing_order: Some(order), orientation: Some(orientation) })
}

/// Every full sign pattern over the family yields an infinite set.
fn independent_pattern_failure(family: &[UpSet]) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = family.len();
    (0u64..1 << n).find_map(|mask| {
        let mut acc = UpSet::omega();
        let (mut pos, mut neg) = (vec![], vec![]);
        for (i, a) in family.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = acc.intersect(a);
                pos.push(i);
            } else {
                acc = acc.difference(a);
                neg.push(i);
            }
        }
        acc.is_finite().then_some((pos, neg))
    })
}

pub fn family_property(tag: FamilyProperty, family: &[UpSet]) -> Result<bool> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    match tag {
        FamilyProperty::None => Ok(true),
        FamilyProperty::Centered => {
            require_infinite(family)?;
            let meet = family.iter().skip(1).fold(family[0].clone(), |acc, a| acc.intersect(a));
            Ok(meet.is_infinite())
        }
        FamilyProperty::Tower => Ok(tower_report(family)?.is_chain),
        FamilyProperty::AlmostDisjoint => Ok((0..family.len()).all(|i| {
            (i + 1..family.len()).all(|j| family[i].intersect(&family[j]).is_finite())
        })),
        FamilyProperty::Independent => {
            require_infinite(family)?;
            Ok(independent_pattern_failure(family).is_none())
        }
    }
}

/// Why a candidate witness fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Offense {
    /// `A(ψ, family[index])` holds.
    Member { index: usize },
    /// A Boolean combination of `family ∪ {ψ}` is finite. `candidate_positive`
    /// tells whether ψ enters positively or through its complement.
    Combination { positive: Vec<usize>, negative: Vec<usize>, candidate_positive: bool },
    /// ψ is literally one of the members.
    EqualsMember { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessVerdict {
    pub valid: bool,
    pub offense: Option<Offense>,
}

impl WitnessVerdict {
    fn ok() -> Self {
        WitnessVerdict { valid: true, offense: None }
    }

    fn fail(offense: Offense) -> Self {
        WitnessVerdict { valid: false, offense: Some(offense) }
    }
}

fn sets_of(family: &[Element]) -> Result<Vec<UpSet>> {
    family.iter().map(|e| e.as_set().cloned()).collect()
}

/// Checks that ψ witnesses property `label` against `family`.
pub fn witness_valid(label: Label, psi: &Element, family: &[Element]) -> Result<WitnessVerdict> {
    let rel = GtRelation::of(label);
    expect_space(psi, rel.challenge_space)?;
    for y in family {
        expect_space(y, rel.response_space)?;
    }
    if let Element::Set(s) = psi {
        if s.is_finite() {
            return Err(Error::FiniteSet("witness must be an infinite set"));
        }
    }
    if rel.phi != FamilyProperty::None && !family.is_empty() {
        let sets = sets_of(family)?;
        if !family_property(rel.phi, &sets)? {
            return Err(Error::PhiViolation {
                phi: rel.phi,
                detail: format!("response family for {label} fails {}", rel.phi),
            });
        }
    }
    if label == Label::I {
        return independence_witness(psi.as_set()?, &sets_of(family)?);
    }
    for (index, y) in family.iter().enumerate() {
        if relation_eval(label, psi, y)? {
            return Ok(WitnessVerdict::fail(Offense::Member { index }));
        }
    }
    Ok(WitnessVerdict::ok())
}

/// ψ extends the independent family and is none of its members.
pub(crate) fn independence_witness(psi: &UpSet, family: &[UpSet]) -> Result<WitnessVerdict> {
    if let Some(index) = family.iter().position(|a| a == psi) {
        return Ok(WitnessVerdict::fail(Offense::EqualsMember { index }));
    }
    let mut extended = family.to_vec();
    extended.push(psi.clone());
    let k = family.len();
    Ok(match independent_pattern_failure(&extended) {
        None => WitnessVerdict::ok(),
        Some((pos, neg)) => {
            let candidate_positive = pos.contains(&k);
            WitnessVerdict::fail(Offense::Combination {
                positive: pos.into_iter().filter(|&i| i != k).collect(),
                negative: neg.into_iter().filter(|&i| i != k).collect(),
                candidate_positive,
            })
        }
    })
}

/// Every listed challenge is answered by some member: `∀c ∃y A(c, y)`.
pub fn is_dominating_for(label: Label, family: &[Element], challenges: &[Element]) -> Result<bool> {
    for c in challenges {
        let mut answered = false;
        for y in family {
            if relation_eval(label, c, y)? {
                answered = true;
                break;
            }
        }
        if !answered {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience constructors for function-valued elements.
pub fn fun(f: EpdFun) -> Element {
    Element::Fun(f)
}

pub fn set(a: UpSet) -> Element {
    Element::Set(a)
}
