//! Exact representations of ultimately periodic subsets of ω and of
//! functions ω → ω with eventually periodic differences.
//!
//! Every "eventual" relation between two such objects (almost containment,
//! almost equality, eventual domination, splitting) is decided exactly by
//! looking at one aligned window past both heads. All values are kept in
//! canonical form (minimal period, minimal head) so that structural
//! equality coincides with pointwise equality.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Smallest `d` dividing `block.len()` such that `block` is `len / d` copies
/// of its first `d` entries.
fn primitive_period<T: PartialEq>(block: &[T]) -> usize {
    let p = block.len();
    (1..=p)
        .find(|&d| p % d == 0 && (d..p).all(|i| block[i] == block[i - d]))
        .unwrap_or(p)
}

// ---------------------------------------------------------------------------
// UpSet
// ---------------------------------------------------------------------------

/// An ultimately periodic subset of ω: `n` is a member iff `head[n]` for
/// `n < head.len()`, else `period[(n - head.len()) % period.len()]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "UpSetRepr", into = "UpSetRepr")]
pub struct UpSet {
    head: Vec<bool>,
    period: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpSetRepr {
    head: Vec<u8>,
    period: Vec<u8>,
}

fn bits_from_repr(raw: &[u8]) -> Result<Vec<bool>> {
    raw.iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Invalid(format!("bit value {other} is not 0 or 1"))),
        })
        .collect()
}

impl TryFrom<UpSetRepr> for UpSet {
    type Error = Error;

    fn try_from(raw: UpSetRepr) -> Result<Self> {
        UpSet::new(bits_from_repr(&raw.head)?, bits_from_repr(&raw.period)?)
    }
}

impl From<UpSet> for UpSetRepr {
    fn from(set: UpSet) -> Self {
        UpSetRepr {
            head: set.head.iter().map(|&b| b as u8).collect(),
            period: set.period.iter().map(|&b| b as u8).collect(),
        }
    }
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Debug for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", bit_string(&self.head), bit_string(&self.period))
    }
}

impl fmt::Display for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl UpSet {
    /// Builds a set from a head block and a nonempty period block, then
    /// canonicalizes.
    pub fn new(head: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Invalid("UPSet period must be nonempty".into()));
        }
        Ok(Self::canonical(head, period))
    }

    fn canonical(mut head: Vec<bool>, mut period: Vec<bool>) -> Self {
        let d = primitive_period(&period);
        period.truncate(d);
        while let Some(&last) = head.last() {
            if last != period[period.len() - 1] {
                break;
            }
            head.pop();
            period.rotate_right(1);
        }
        UpSet { head, period }
    }

    pub fn omega() -> Self {
        UpSet { head: vec![], period: vec![true] }
    }

    pub fn empty() -> Self {
        UpSet { head: vec![], period: vec![false] }
    }

    /// `{n : n mod modulus ∈ residues}`.
    pub fn residues(modulus: usize, residues: &[usize]) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let mut period = vec![false; modulus];
        for &r in residues {
            period[r % modulus] = true;
        }
        Self::canonical(vec![], period)
    }

    /// Multiples of `k` (including 0).
    pub fn multiples(k: usize) -> Self {
        Self::residues(k, &[0])
    }

    pub fn evens() -> Self {
        Self::multiples(2)
    }

    pub fn odds() -> Self {
        Self::residues(2, &[1])
    }

    pub fn finite(elements: &[u64]) -> Self {
        let len = elements.iter().map(|&e| e as usize + 1).max().unwrap_or(0);
        let mut head = vec![false; len];
        for &e in elements {
            head[e as usize] = true;
        }
        Self::canonical(head, vec![false])
    }

    pub fn head(&self) -> &[bool] {
        &self.head
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn contains(&self, n: u64) -> bool {
        let n = n as usize;
        let h = self.head.len();
        if n < h {
            self.head[n]
        } else {
            self.period[(n - h) % self.period.len()]
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.period.iter().any(|&b| b)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && !self.head.iter().any(|&b| b)
    }

    /// Membership bits for `[0, len)`.
    pub fn prefix(&self, len: usize) -> Vec<bool> {
        (0..len as u64).map(|n| self.contains(n)).collect()
    }

    /// Least member `>= n`, if any.
    pub fn next_member(&self, n: u64) -> Option<u64> {
        let h = self.head.len() as u64;
        let p = self.period.len() as u64;
        // Past the head one full period decides everything.
        let limit = n.max(h) + p;
        (n..limit).find(|&k| self.contains(k))
    }

    /// Members in increasing order (infinite iterator for infinite sets).
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let mut next = self.next_member(0);
        std::iter::from_fn(move || {
            let cur = next?;
            next = self.next_member(cur + 1);
            Some(cur)
        })
    }

    /// Least member not in `excluded`. `None` only when the set is exhausted.
    pub fn min_excluding(&self, excluded: &std::collections::BTreeSet<u64>) -> Option<u64> {
        let mut n = 0;
        loop {
            let m = self.next_member(n)?;
            if !excluded.contains(&m) {
                return Some(m);
            }
            n = m + 1;
        }
    }

    fn combine(&self, other: &UpSet, op: impl Fn(bool, bool) -> bool) -> UpSet {
        let h = self.head.len().max(other.head.len());
        let l = lcm(self.period.len(), other.period.len());
        let bit = |n: usize| op(self.contains(n as u64), other.contains(n as u64));
        let head = (0..h).map(bit).collect();
        let period = (h..h + l).map(bit).collect();
        Self::canonical(head, period)
    }

    pub fn complement(&self) -> UpSet {
        UpSet {
            head: self.head.iter().map(|&b| !b).collect(),
            period: self.period.iter().map(|&b| !b).collect(),
        }
    }

    pub fn intersect(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a != b)
    }

    /// Toggles membership of each listed point.
    pub fn flip(&self, points: &[u64]) -> UpSet {
        let top = points.iter().map(|&n| n as usize + 1).max().unwrap_or(0);
        let h = self.head.len().max(top);
        let mut head: Vec<bool> = self.prefix(h);
        for &n in points {
            head[n as usize] = !head[n as usize];
        }
        let period = (h..h + self.period.len()).map(|n| self.contains(n as u64)).collect();
        Self::canonical(head, period)
    }

    pub fn is_almost_subset_of(&self, other: &UpSet) -> bool {
        self.difference(other).is_finite()
    }

    pub fn is_almost_equal(&self, other: &UpSet) -> bool {
        self.symmetric_difference(other).is_finite()
    }

    /// `self` splits `other`: both `self ∩ other` and `selfᶜ ∩ other` are infinite.
    pub fn splits(&self, other: &UpSet) -> bool {
        self.intersect(other).is_infinite() && other.difference(self).is_infinite()
    }
}

/// Boolean operations accepted by [`up_boolean`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolOp {
    Complement,
    Intersect,
    Union,
    Difference,
}

pub fn up_boolean(op: BoolOp, a: &UpSet, b: Option<&UpSet>) -> Result<UpSet> {
    match (op, b) {
        (BoolOp::Complement, None) => Ok(a.complement()),
        (BoolOp::Complement, Some(_)) => {
            Err(Error::Precondition("complement takes one operand".into()))
        }
        (_, None) => Err(Error::Precondition(format!("{op:?} takes two operands"))),
        (BoolOp::Intersect, Some(b)) => Ok(a.intersect(b)),
        (BoolOp::Union, Some(b)) => Ok(a.union(b)),
        (BoolOp::Difference, Some(b)) => Ok(a.difference(b)),
    }
}

pub fn up_is_infinite(a: &UpSet) -> bool {
    a.is_infinite()
}

// ---------------------------------------------------------------------------
// EpdFun
// ---------------------------------------------------------------------------

/// A function ω → ω with eventually periodic differences:
/// `f(n) = head[n]` for `n < h`, and
/// `f(h + k) = base + Σ_{j<k} deltas[j mod p]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "EpdFunRepr", into = "EpdFunRepr")]
pub struct EpdFun {
    head: Vec<u64>,
    base: u64,
    deltas: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpdFunRepr {
    head: Vec<u64>,
    base: u64,
    deltas: Vec<i64>,
}

impl TryFrom<EpdFunRepr> for EpdFun {
    type Error = Error;

    fn try_from(raw: EpdFunRepr) -> Result<Self> {
        EpdFun::new(raw.head, raw.base, raw.deltas)
    }
}

impl From<EpdFun> for EpdFunRepr {
    fn from(f: EpdFun) -> Self {
        EpdFunRepr { head: f.head, base: f.base, deltas: f.deltas }
    }
}

impl fmt::Debug for EpdFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{}{:+?}", self.head, self.base, self.deltas)
    }
}

impl fmt::Display for EpdFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl EpdFun {
    pub fn new(head: Vec<u64>, base: u64, deltas: Vec<i64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::Invalid("EPDFun deltas must be nonempty".into()));
        }
        let rise: i128 = deltas.iter().map(|&d| d as i128).sum();
        if rise < 0 {
            return Err(Error::Invalid(format!("EPDFun per-period sum {rise} is negative")));
        }
        // With a nonnegative rise, the first period holds the minimum of the tail.
        let mut acc = base as i128;
        for &d in &deltas[..deltas.len() - 1] {
            acc += d as i128;
            if acc < 0 {
                return Err(Error::Invalid("EPDFun takes a negative value".into()));
            }
        }
        Ok(Self::canonical(head, base, deltas))
    }

    fn canonical(mut head: Vec<u64>, mut base: u64, mut deltas: Vec<i64>) -> Self {
        let d = primitive_period(&deltas);
        deltas.truncate(d);
        while let Some(&last) = head.last() {
            if last as i128 + deltas[deltas.len() - 1] as i128 != base as i128 {
                break;
            }
            head.pop();
            base = last;
            deltas.rotate_right(1);
        }
        EpdFun { head, base, deltas }
    }

    /// Canonical function agreeing with `values` on `[0, start + period]`
    /// whose differences repeat with the given period from `start` on.
    pub(crate) fn from_window(values: &[u64], start: usize, period: usize) -> Self {
        debug_assert!(values.len() > start + period);
        let deltas = (start..start + period)
            .map(|i| (values[i + 1] as i128 - values[i] as i128) as i64)
            .collect();
        Self::canonical(values[..start].to_vec(), values[start], deltas)
    }

    pub fn constant(c: u64) -> Self {
        EpdFun { head: vec![], base: c, deltas: vec![0] }
    }

    pub fn identity() -> Self {
        Self::linear(1, 0)
    }

    /// `n ↦ slope·n + offset`.
    pub fn linear(slope: u64, offset: u64) -> Self {
        EpdFun { head: vec![], base: offset, deltas: vec![slope as i64] }
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn deltas(&self) -> &[i64] {
        &self.deltas
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    pub fn period_len(&self) -> usize {
        self.deltas.len()
    }

    /// Sum of one delta period.
    pub fn rise(&self) -> i128 {
        self.deltas.iter().map(|&d| d as i128).sum()
    }

    pub fn eval(&self, n: u64) -> u64 {
        let n = n as usize;
        let h = self.head.len();
        if n < h {
            return self.head[n];
        }
        let p = self.deltas.len();
        let k = n - h;
        let (q, r) = (k / p, k % p);
        let partial: i128 = self.deltas[..r].iter().map(|&d| d as i128).sum();
        let v = self.base as i128 + q as i128 * self.rise() + partial;
        u64::try_from(v).expect("EPDFun values are nonnegative")
    }

    pub fn values(&self, len: usize) -> Vec<u64> {
        (0..len as u64).map(|n| self.eval(n)).collect()
    }

    /// Function equal to `prefix` on `[0, prefix.len())` and to `tail` after.
    pub fn splice(prefix: &[u64], tail: &EpdFun) -> EpdFun {
        let start = prefix.len().max(tail.head.len());
        let p = tail.deltas.len();
        let mut values = prefix.to_vec();
        values.extend((prefix.len()..=start + p).map(|n| tail.eval(n as u64)));
        Self::from_window(&values, start, p)
    }

    /// Replaces finitely many values.
    pub fn with_values(&self, changes: &[(u64, u64)]) -> EpdFun {
        let top = changes.iter().map(|&(n, _)| n as usize + 1).max().unwrap_or(0);
        let mut prefix = self.values(top);
        for &(n, v) in changes {
            prefix[n as usize] = v;
        }
        Self::splice(&prefix, self)
    }

    /// `n ↦ f(n) + c`.
    pub fn shift(&self, c: u64) -> EpdFun {
        EpdFun {
            head: self.head.iter().map(|&v| v + c).collect(),
            base: self.base + c,
            deltas: self.deltas.clone(),
        }
    }

    /// Least value of `f` on `[from, ∞)`.
    pub fn min_from(&self, from: u64) -> u64 {
        // f(n + p) = f(n) + rise >= f(n) past the head.
        let end = from.max(self.head.len() as u64) + self.deltas.len() as u64;
        (from..end).map(|n| self.eval(n)).min().expect("nonempty range")
    }

    /// Decides `f(n) <= g(n)` for all but finitely many `n`.
    pub fn is_eventually_le(&self, other: &EpdFun) -> bool {
        compare_tails(self, other).le
    }

    pub fn is_almost_equal(&self, other: &EpdFun) -> bool {
        compare_tails(self, other).eq
    }

    /// Least `n0` with `f(n) = g(n)` for every `n >= n0`, when `f =* g`.
    pub fn agreement_index(&self, other: &EpdFun) -> Option<u64> {
        if !self.is_almost_equal(other) {
            return None;
        }
        let w = Window::of_funs(self, other);
        let mut n0 = w.start as u64;
        while n0 > 0 && self.eval(n0 - 1) == other.eval(n0 - 1) {
            n0 -= 1;
        }
        Some(n0)
    }
}

/// Aligned comparison window: `[start, start + len)` lies past both heads and
/// `len` is a common multiple of both periods.
#[derive(Clone, Copy, Debug)]
struct Window {
    start: usize,
    len: usize,
}

impl Window {
    fn of_sets(a: &UpSet, b: &UpSet) -> Self {
        Window { start: a.head_len().max(b.head_len()), len: lcm(a.period_len(), b.period_len()) }
    }

    fn of_funs(f: &EpdFun, g: &EpdFun) -> Self {
        Window { start: f.head_len().max(g.head_len()), len: lcm(f.period_len(), g.period_len()) }
    }
}

struct TailComparison {
    le: bool,
    eq: bool,
    window: Window,
}

fn compare_tails(f: &EpdFun, g: &EpdFun) -> TailComparison {
    let window = Window::of_funs(f, g);
    let rise_f = f.rise() * (window.len / f.period_len()) as i128;
    let rise_g = g.rise() * (window.len / g.period_len()) as i128;
    let span = window.start as u64..(window.start + window.len) as u64;
    let (le, eq) = match rise_f.cmp(&rise_g) {
        Ordering::Less => (true, false),
        Ordering::Greater => (false, false),
        Ordering::Equal => {
            let le = span.clone().all(|n| f.eval(n) <= g.eval(n));
            let eq = span.clone().all(|n| f.eval(n) == g.eval(n));
            (le, eq)
        }
    };
    TailComparison { le, eq, window }
}

// ---------------------------------------------------------------------------
// Almost-relations
// ---------------------------------------------------------------------------

/// Which space an element lives in: `ω^ω` or `P(ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Fun,
    Set,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Fun => "fun",
            Space::Set => "set",
        })
    }
}

/// A point of `P(ω)` or `ω^ω` in the decidable fragment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Fun(EpdFun),
    Set(UpSet),
}

impl Element {
    pub fn space(&self) -> Space {
        match self {
            Element::Fun(_) => Space::Fun,
            Element::Set(_) => Space::Set,
        }
    }

    pub fn as_set(&self) -> Result<&UpSet> {
        match self {
            Element::Set(s) => Ok(s),
            Element::Fun(_) => Err(Error::TypeMismatch { expected: Space::Set, found: Space::Fun }),
        }
    }

    pub fn as_fun(&self) -> Result<&EpdFun> {
        match self {
            Element::Fun(f) => Ok(f),
            Element::Set(_) => Err(Error::TypeMismatch { expected: Space::Fun, found: Space::Set }),
        }
    }

    /// Almost equality in the element's own space.
    pub fn is_almost_equal(&self, other: &Element) -> Result<bool> {
        match (self, other) {
            (Element::Set(a), Element::Set(b)) => Ok(a.is_almost_equal(b)),
            (Element::Fun(f), Element::Fun(g)) => Ok(f.is_almost_equal(g)),
            _ => Err(Error::TypeMismatch { expected: self.space(), found: other.space() }),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Fun(x) => write!(f, "{x}"),
            Element::Set(x) => write!(f, "{x}"),
        }
    }
}

impl From<UpSet> for Element {
    fn from(s: UpSet) -> Self {
        Element::Set(s)
    }
}

impl From<EpdFun> for Element {
    fn from(f: EpdFun) -> Self {
        Element::Fun(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlmostKind {
    SubseteqStar,
    SetEqStar,
    LeqStar,
    FunEqStar,
    Splits,
}

impl AlmostKind {
    pub fn operand_space(self) -> Space {
        match self {
            AlmostKind::LeqStar | AlmostKind::FunEqStar => Space::Fun,
            _ => Space::Set,
        }
    }
}

/// Outcome of an almost-relation decision. The relation is determined by
/// the operands on `[stabilization, stabilization + window)`; past that
/// point set relations repeat with period `window`, and function
/// differences change by a constant every `window` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostVerdict {
    pub value: bool,
    pub stabilization: u64,
    pub window: u64,
}

pub fn subseteq_star(a: &UpSet, b: &UpSet) -> AlmostVerdict {
    set_verdict(a.is_almost_subset_of(b), Window::of_sets(a, b))
}

pub fn set_eq_star(a: &UpSet, b: &UpSet) -> AlmostVerdict {
    set_verdict(a.is_almost_equal(b), Window::of_sets(a, b))
}

/// `a` splits `b`.
pub fn splits(a: &UpSet, b: &UpSet) -> AlmostVerdict {
    set_verdict(a.splits(b), Window::of_sets(a, b))
}

pub fn leq_star(f: &EpdFun, g: &EpdFun) -> AlmostVerdict {
    let c = compare_tails(f, g);
    fun_verdict(c.le, c.window)
}

pub fn fun_eq_star(f: &EpdFun, g: &EpdFun) -> AlmostVerdict {
    let c = compare_tails(f, g);
    fun_verdict(c.eq, c.window)
}

fn set_verdict(value: bool, w: Window) -> AlmostVerdict {
    AlmostVerdict { value, stabilization: w.start as u64, window: w.len as u64 }
}

fn fun_verdict(value: bool, w: Window) -> AlmostVerdict {
    AlmostVerdict { value, stabilization: w.start as u64, window: w.len as u64 }
}

pub fn almost_compare(kind: AlmostKind, lhs: &Element, rhs: &Element) -> Result<AlmostVerdict> {
    let want = kind.operand_space();
    for side in [lhs, rhs] {
        if side.space() != want {
            return Err(Error::TypeMismatch { expected: want, found: side.space() });
        }
    }
    Ok(match (kind, lhs, rhs) {
        (AlmostKind::SubseteqStar, Element::Set(a), Element::Set(b)) => subseteq_star(a, b),
        (AlmostKind::SetEqStar, Element::Set(a), Element::Set(b)) => set_eq_star(a, b),
        (AlmostKind::Splits, Element::Set(a), Element::Set(b)) => splits(a, b),
        (AlmostKind::LeqStar, Element::Fun(f), Element::Fun(g)) => leq_star(f, g),
        (AlmostKind::FunEqStar, Element::Fun(f), Element::Fun(g)) => fun_eq_star(f, g),
        _ => unreachable!("operand spaces checked above"),
    })
}

// ---------------------------------------------------------------------------
// Functions derived from sets
// ---------------------------------------------------------------------------

/// τ(A): `k ↦` the k-th element of `A`.
pub fn increasing_enumeration(a: &UpSet) -> Result<EpdFun> {
    if a.is_finite() {
        return Err(Error::FiniteSet("increasing enumeration needs an infinite set"));
    }
    let h = a.head_len() as u64;
    let p = a.period_len() as u64;
    let in_head: Vec<u64> = (0..h).filter(|&n| a.contains(n)).collect();
    let cycle: Vec<u64> = (h..h + p).filter(|&n| a.contains(n)).collect();
    let mut deltas: Vec<i64> = cycle.windows(2).map(|w| (w[1] - w[0]) as i64).collect();
    deltas.push((cycle[0] + p - cycle[cycle.len() - 1]) as i64);
    Ok(EpdFun::canonical(in_head, cycle[0], deltas))
}

/// `n ↦ 1 + min{a ∈ A : a >= n}`, the least `f` with `[n, f(n)) ∩ A ≠ ∅`.
pub fn gap_cover_function(a: &UpSet) -> Result<EpdFun> {
    if a.is_finite() {
        return Err(Error::FiniteSet("gap cover needs an infinite set"));
    }
    let h = a.head_len();
    let p = a.period_len();
    let values: Vec<u64> = (0..=h + p)
        .map(|n| a.next_member(n as u64).expect("infinite set") + 1)
        .collect();
    Ok(EpdFun::from_window(&values, h, p))
}

/// Pointwise maximum of two functions.
pub fn epd_pointwise_max(f: &EpdFun, g: &EpdFun) -> EpdFun {
    let w = Window::of_funs(f, g);
    let rise_f = f.rise() * (w.len / f.period_len()) as i128;
    let rise_g = g.rise() * (w.len / g.period_len()) as i128;
    let start = match rise_f.cmp(&rise_g) {
        Ordering::Equal => w.start,
        ord => {
            // The faster function gains `gain` per window; find the first
            // window start past which it dominates for good.
            let (fast, slow) = if ord == Ordering::Greater { (f, g) } else { (g, f) };
            let gain = (rise_f - rise_g).abs();
            let deficit = (w.start..w.start + w.len)
                .map(|n| slow.eval(n as u64) as i128 - fast.eval(n as u64) as i128)
                .max()
                .unwrap_or(0);
            let windows = if deficit <= 0 { 0 } else { (deficit + gain - 1) / gain };
            w.start + windows as usize * w.len
        }
    };
    let values: Vec<u64> =
        (0..=start + w.len).map(|n| f.eval(n as u64).max(g.eval(n as u64))).collect();
    EpdFun::from_window(&values, start, w.len)
}

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

/// Cantor pairing `⟨n0, n1⟩ = (n0 + n1)(n0 + n1 + 1)/2 + n1`.
pub fn pair_encode(n0: u64, n1: u64) -> u64 {
    let s = n0 + n1;
    s * (s + 1) / 2 + n1
}

pub fn pair_decode(n: u64) -> (u64, u64) {
    // Largest w with w(w+1)/2 <= n.
    let mut w = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > n {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= n {
        w += 1;
    }
    let n1 = n - w * (w + 1) / 2;
    (w - n1, n1)
}
