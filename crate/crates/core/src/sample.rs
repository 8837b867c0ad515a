//! Seeded random generators for sets, functions and their finite mutations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sequences::{Element, EpdFun, UpSet};

/// Deterministic generator used by every seeded check.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size limits for random instances.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub max_head: usize,
    pub max_period: usize,
    pub max_value: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_head: 8, max_period: 8, max_value: 12 }
    }
}

pub fn random_upset<R: Rng + ?Sized>(rng: &mut R, b: Bounds) -> UpSet {
    let h = rng.gen_range(0..=b.max_head);
    let p = rng.gen_range(1..=b.max_period);
    let head = (0..h).map(|_| rng.gen_bool(0.5)).collect();
    let period = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    UpSet::new(head, period).expect("nonempty period")
}

/// Random set with a member in every period block.
pub fn random_infinite_upset<R: Rng + ?Sized>(rng: &mut R, b: Bounds) -> UpSet {
    loop {
        let a = random_upset(rng, b);
        if a.is_infinite() {
            return a;
        }
    }
}

/// Random infinite, coinfinite set.
pub fn random_splittable_upset<R: Rng + ?Sized>(rng: &mut R, b: Bounds) -> UpSet {
    loop {
        let a = random_infinite_upset(rng, b);
        if a.complement().is_infinite() {
            return a;
        }
    }
}

pub fn random_epd<R: Rng + ?Sized>(rng: &mut R, b: Bounds) -> EpdFun {
    let v = b.max_value as i64;
    let h = rng.gen_range(0..=b.max_head);
    let p = rng.gen_range(1..=b.max_period);
    let head = (0..h).map(|_| rng.gen_range(0..=b.max_value)).collect();
    let mut deltas: Vec<i64> = (0..p).map(|_| rng.gen_range(-v..=v)).collect();
    let rise: i64 = deltas.iter().sum();
    if rise < 0 {
        deltas[p - 1] -= rise;
    }
    let mut base = rng.gen_range(0..=b.max_value) as i64;
    let mut acc = 0;
    let mut lowest = 0;
    for d in &deltas[..p - 1] {
        acc += d;
        lowest = lowest.min(acc);
    }
    if base + lowest < 0 {
        base = -lowest;
    }
    EpdFun::new(head, base as u64, deltas).expect("valid by construction")
}

/// Flips up to `max_flips` membership bits below `horizon`.
pub fn mutate_upset<R: Rng + ?Sized>(rng: &mut R, a: &UpSet, max_flips: usize, horizon: u64) -> UpSet {
    let k = rng.gen_range(1..=max_flips.max(1));
    let points: Vec<u64> = (0..k).map(|_| rng.gen_range(0..horizon.max(1))).collect();
    let mut distinct = points.clone();
    distinct.sort_unstable();
    distinct.dedup();
    a.flip(&distinct)
}

/// Overwrites up to `max_changes` values below `horizon`.
pub fn mutate_epd<R: Rng + ?Sized>(
    rng: &mut R,
    f: &EpdFun,
    max_changes: usize,
    horizon: u64,
    max_value: u64,
) -> EpdFun {
    let k = rng.gen_range(1..=max_changes.max(1));
    let changes: Vec<(u64, u64)> =
        (0..k).map(|_| (rng.gen_range(0..horizon.max(1)), rng.gen_range(0..=max_value))).collect();
    f.with_values(&changes)
}

pub fn mutate_element<R: Rng + ?Sized>(rng: &mut R, e: &Element, b: Bounds) -> Element {
    let horizon = (b.max_head + 2 * b.max_period) as u64;
    match e {
        Element::Set(a) => Element::Set(mutate_upset(rng, a, 4, horizon)),
        Element::Fun(f) => Element::Fun(mutate_epd(rng, f, 4, horizon, b.max_value * 2)),
    }
}
