use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::diagonal::bound_family;
use crate::error::{Error, Result};
use crate::sequences::{gap_cover_function, EpdFun, UpSet};

pub const DEFAULT_HORIZON: usize = 256;

/// Stops the simulation once an endpoint passes this value.
const VALUE_CAP: u64 = 1 << 40;

/// The endpoint sequence `j_0 < j_1 < …` of λ(f).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lambda {
    /// `j_0..=j_stages`, always computed explicitly.
    pub endpoints: Vec<u64>,
    /// Exact form when the endpoints were certified eventually periodic.
    pub periodic: Option<EpdFun>,
    /// Number of stages simulated; beyond it a prefix result says nothing.
    pub stages: usize,
}

impl Lambda {
    pub fn endpoint(&self, i: usize) -> Option<u64> {
        match &self.periodic {
            Some(e) => Some(e.eval(i as u64)),
            None => self.endpoints.get(i).copied(),
        }
    }

    /// Endpoints `j_0..j_{count}`, or fewer if only a prefix is known.
    pub fn endpoints_upto(&self, count: usize) -> Vec<u64> {
        match &self.periodic {
            Some(e) => e.values(count + 1),
            None => self.endpoints.iter().copied().take(count + 1).collect(),
        }
    }
}

/// `f(n) > n` for every n.
fn check_admissible(f: &EpdFun, index: usize) -> Result<()> {
    let p = f.period_len() as i128;
    if f.rise() < p {
        return Err(Error::Precondition(format!(
            "carrier member {index}: f(n) <= n for large n"
        )));
    }
    let span = (f.head_len() + f.period_len()) as u64;
    if let Some(n) = (0..span).find(|&n| f.eval(n) <= n) {
        return Err(Error::Precondition(format!("carrier member {index}: f({n}) <= {n}")));
    }
    Ok(())
}

/// Some `[n, f(n))` lies inside `[lo, hi)`.
pub fn gap_interval_in(f: &EpdFun, lo: u64, hi: u64) -> bool {
    f.min_from(lo) <= hi
}

pub fn lambda_coalesce(f: &EpdFun, carrier: &[EpdFun]) -> Result<Lambda> {
    lambda_coalesce_with_horizon(f, carrier, DEFAULT_HORIZON)
}

/// Builds λ(f) over the enumerated carrier, with `g F_i h` iff `g` and `h`
/// are the same member, or both sit among the first `i` members and agree
/// from index `i` on. Starts from `j_0 = 0`.
pub fn lambda_coalesce_with_horizon(f: &EpdFun, carrier: &[EpdFun], horizon: usize) -> Result<Lambda> {
    let f_idx = carrier
        .iter()
        .position(|g| g == f)
        .ok_or_else(|| Error::Precondition("f is not in the carrier".into()))?;

    // Only f's =*-class can ever be F_i-related to f.
    let class: Vec<(usize, u64)> = carrier
        .iter()
        .enumerate()
        .filter_map(|(i, g)| f.agreement_index(g).map(|a| (i, a)))
        .collect();
    for &(i, _) in &class {
        check_admissible(&carrier[i], i)?;
    }
    let me = class.iter().position(|&(i, _)| i == f_idx).expect("f agrees with itself");
    let agree: Vec<Vec<u64>> = class
        .iter()
        .map(|&(i, _)| {
            class
                .iter()
                .map(|&(k, _)| carrier[i].agreement_index(&carrier[k]).expect("same class"))
                .collect()
        })
        .collect();
    let related = |a: usize, b: usize, stage: u64| {
        a == b || (class[a].0 < stage as usize && class[b].0 < stage as usize && agree[a][b] <= stage)
    };

    // From this stage on, f's class is merged and j_{i+1} = min_{n ≥ j_i} f(n).
    let settled = if class.len() == 1 {
        0
    } else {
        class
            .iter()
            .map(|&(i, a)| (i as u64 + 1).max(a))
            .max()
            .unwrap_or(0)
            + 1
    };
    let slope_one = f.rise() == f.period_len() as i128;
    let (h, p) = (f.head_len() as u64, f.period_len() as u64);

    let mut j = vec![0u64; class.len()];
    let mut endpoints = vec![0u64];
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut periodic = None;
    for stage in 0..horizon as u64 {
        let k: Vec<u64> = class.iter().zip(&j).map(|(&(i, _), &ji)| carrier[i].min_from(ji)).collect();
        j = (0..class.len())
            .map(|a| (0..class.len()).filter(|&b| related(a, b, stage)).map(|b| k[b]).max().unwrap())
            .collect();
        endpoints.push(j[me]);

        let i = endpoints.len() - 1;
        if slope_one && i as u64 >= settled && j[me] >= h {
            let residue = (j[me] - h) % p;
            if let Some(&a) = seen.get(&residue) {
                let deltas = endpoints[a..=i].windows(2).map(|w| (w[1] - w[0]) as i64).collect();
                periodic = Some(EpdFun::new(endpoints[..a].to_vec(), endpoints[a], deltas)?);
                break;
            }
            seen.insert(residue, i);
        }
        if j.iter().any(|&v| v > VALUE_CAP) {
            break;
        }
    }
    let stages = endpoints.len() - 1;
    Ok(Lambda { endpoints, periodic, stages })
}

/// Output of the interval-splitting pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSplit {
    /// Common bound β of the members' gap-cover functions.
    pub bound: EpdFun,
    pub lambda: Lambda,
    /// The union of odd-indexed intervals, when λ is eventually periodic.
    pub witness: Option<UpSet>,
    /// First interval index from which every interval meets every member.
    pub certified_from: usize,
}

impl IntervalSplit {
    /// Membership in the union of odd-indexed intervals `[λ(2i+1), λ(2i+2))`.
    pub fn contains(&self, n: u64) -> Option<bool> {
        if let Some(w) = &self.witness {
            return Some(w.contains(n));
        }
        let e = &self.lambda.endpoints;
        let i = e.partition_point(|&x| x <= n);
        (i < e.len()).then_some(i >= 1 && (i - 1) % 2 == 1)
    }

    /// Interval indices whose endpoints are known, capped at `limit`.
    pub fn checked_intervals(&self, limit: usize) -> std::ops::Range<usize> {
        let known = self.lambda.endpoints_upto(limit).len().saturating_sub(1);
        self.certified_from.min(known)..known
    }

    /// Every interval from `certified_from` on (up to `limit`) contains a
    /// point of every member.
    pub fn interval_certificate(&self, family: &[UpSet], limit: usize) -> bool {
        let e = self.lambda.endpoints_upto(limit);
        self.checked_intervals(limit).all(|i| {
            family
                .iter()
                .all(|a| a.next_member(e[i]).is_some_and(|m| m < e[i + 1]))
        })
    }

    /// Certificate check, plus an exact splitting check when the witness is
    /// ultimately periodic.
    pub fn verify(&self, family: &[UpSet]) -> bool {
        let limit = self.certified_from + 64;
        if self.checked_intervals(limit).is_empty() || !self.interval_certificate(family, limit) {
            return false;
        }
        match &self.witness {
            Some(w) => family.iter().all(|a| w.splits(a)),
            None => true,
        }
    }
}

/// Union of the odd-indexed intervals of a periodic λ, as an ultimately
/// periodic set.
fn odd_interval_union(lambda: &EpdFun) -> Result<UpSet> {
    let s = lambda.head_len();
    let q = lambda.period_len();
    let big_q = if q % 2 == 0 { q } else { 2 * q };
    let e = lambda.values(s + big_q + 1);
    let mut bits = vec![false; e[s + big_q] as usize];
    for i in (1..s + big_q).step_by(2) {
        for b in &mut bits[e[i] as usize..e[i + 1] as usize] {
            *b = true;
        }
    }
    let period = bits.split_off(e[s] as usize);
    UpSet::new(bits, period)
}

pub fn interval_split_witness(family: &[UpSet]) -> Result<IntervalSplit> {
    if let Some(index) = family.iter().position(UpSet::is_finite) {
        return Err(Error::FiniteMember { index });
    }
    let gaps = family.iter().map(gap_cover_function).collect::<Result<Vec<_>>>()?;
    let bound = bound_family(&gaps)?;
    let lambda = lambda_coalesce(&bound, std::slice::from_ref(&bound))?;
    let witness = lambda.periodic.as_ref().map(odd_interval_union).transpose()?;
    let threshold = family.len() as u64 - 1;
    let certified_from = (0..)
        .find(|&i| lambda.endpoint(i).is_none_or(|v| v >= threshold))
        .unwrap();
    Ok(IntervalSplit { bound, lambda, witness, certified_from })
}
