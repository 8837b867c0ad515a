use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gtrelations::{family_property, independence_witness, FamilyProperty, Offense};
use crate::sequences::UpSet;

/// `⋂_{i∈P} A_i ∩ ⋂_{j∈N} A_j^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanCombination {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    pub set: UpSet,
    pub finite: bool,
}

fn indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Every combination over disjoint `P`, `N` with `P ∪ N` nonempty. Ordered
/// by the mask of `P ∪ N`, then by `P` descending, so `[A]` gives `[A, A^c]`.
pub fn boolean_combinations(family: &[UpSet]) -> Vec<BooleanCombination> {
    assert!(family.len() < 64, "family too large to enumerate");
    let mut out = vec![];
    for union in 1u64..1 << family.len() {
        let mut pos = union;
        loop {
            let neg = union & !pos;
            let mut set = UpSet::omega();
            for i in indices(pos) {
                set = set.intersect(&family[i]);
            }
            for i in indices(neg) {
                set = set.difference(&family[i]);
            }
            out.push(BooleanCombination {
                positive: indices(pos),
                negative: indices(neg),
                finite: set.is_finite(),
                set,
            });
            if pos == 0 {
                break;
            }
            pos = (pos - 1) & union;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub valid: bool,
    /// `family ∪ {candidate}` is independent and candidate is new.
    pub direct: bool,
    /// Candidate splits ω and every infinite combination of the family.
    pub splits_all: bool,
    pub offense: Option<Offense>,
}

impl IndependenceVerdict {
    pub fn criteria_agree(&self) -> bool {
        self.direct == self.splits_all
    }
}

pub fn independence_extension(family: &[UpSet], candidate: &UpSet) -> Result<IndependenceVerdict> {
    if !family.is_empty() && !family_property(FamilyProperty::Independent, family)? {
        return Err(Error::PhiViolation {
            phi: FamilyProperty::Independent,
            detail: "input family is not independent".into(),
        });
    }
    let direct = independence_witness(candidate, family)?;
    let splits_all = candidate.splits(&UpSet::omega())
        && boolean_combinations(family)
            .iter()
            .filter(|c| !c.finite)
            .all(|c| candidate.splits(&c.set));
    Ok(IndependenceVerdict {
        valid: direct.valid,
        direct: direct.valid,
        splits_all,
        offense: direct.offense,
    })
}
