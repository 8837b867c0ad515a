use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gtlab_core::diagonal::{bound_family, split_side, SplitSide};
use gtlab_core::gtrelations::{
    family_property, is_dominating_for, relation_eval, witness_valid, FamilyProperty, Label,
};
use gtlab_core::morphisms::{
    boolean_combinations, builtin_morphism, compose, gap_interval_in, independence_extension,
    lambda_coalesce, morphism_law_check, sample_element, Arrow, Morphism,
};
use gtlab_core::sample::{mutate_element, Bounds};
use gtlab_core::sequences::{
    epd_pointwise_max, gap_cover_function, increasing_enumeration, pair_decode, pair_encode,
    up_boolean, BoolOp,
};
use gtlab_core::unions::{
    cyclic_action, exhaustion_check, orbit_max_phi0, F_chain_report, FinEqRel, Grid,
};
use gtlab_core::{Element, EpdFun, UpSet};

#[derive(Clone, Debug)]
struct RawSet {
    head: Vec<bool>,
    period: Vec<bool>,
}

impl RawSet {
    fn contains(&self, n: usize) -> bool {
        if n < self.head.len() {
            self.head[n]
        } else {
            self.period[(n - self.head.len()) % self.period.len()]
        }
    }

    fn build(&self) -> UpSet {
        UpSet::new(self.head.clone(), self.period.clone()).unwrap()
    }
}

fn raw_set() -> impl Strategy<Value = RawSet> {
    (prop::collection::vec(any::<bool>(), 0..6), prop::collection::vec(any::<bool>(), 1..6))
        .prop_map(|(head, period)| RawSet { head, period })
}

fn upset() -> impl Strategy<Value = UpSet> {
    raw_set().prop_map(|r| r.build())
}

fn infinite_upset() -> impl Strategy<Value = UpSet> {
    upset().prop_filter("infinite", UpSet::is_infinite)
}

fn epd() -> impl Strategy<Value = EpdFun> {
    (
        prop::collection::vec(0u64..12, 0..5),
        0u64..12,
        prop::collection::vec(-4i64..6, 1..5),
    )
        .prop_filter_map("valid", |(h, b, d)| EpdFun::new(h, b, d).ok())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const BINARY: [Label; 8] = [Label::B, Label::D, Label::S, Label::R, Label::P, Label::T, Label::A, Label::U];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn boolean_ops_agree_with_bits(a in raw_set(), b in raw_set()) {
        let (sa, sb) = (a.build(), b.build());
        let span = a.head.len() + b.head.len() + 3 * a.period.len() * b.period.len();
        let ops: [(BoolOp, fn(bool, bool) -> bool); 3] = [
            (BoolOp::Intersect, |x, y| x && y),
            (BoolOp::Union, |x, y| x || y),
            (BoolOp::Difference, |x, y| x && !y),
        ];
        for (op, f) in ops {
            let c = up_boolean(op, &sa, Some(&sb)).unwrap();
            for n in 0..span {
                prop_assert_eq!(c.contains(n as u64), f(a.contains(n), b.contains(n)));
            }
        }
        let c = up_boolean(BoolOp::Complement, &sa, None).unwrap();
        for n in 0..span {
            prop_assert_eq!(c.contains(n as u64), !a.contains(n));
        }
    }

    #[test]
    fn de_morgan(a in upset(), b in upset()) {
        prop_assert_eq!(a.intersect(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
    }

    #[test]
    fn enumeration_lists_members_in_order(a in infinite_upset()) {
        let tau = increasing_enumeration(&a).unwrap();
        let values = tau.values(40);
        prop_assert!(values.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(values.iter().all(|&v| a.contains(v)));
        let members: Vec<u64> = a.members().take(40).collect();
        prop_assert_eq!(values, members);
    }

    #[test]
    fn pointwise_max_laws(f in epd(), g in epd(), h in epd()) {
        let fg = epd_pointwise_max(&f, &g);
        prop_assert_eq!(&fg, &epd_pointwise_max(&g, &f));
        prop_assert_eq!(epd_pointwise_max(&f, &f), f.clone());
        prop_assert_eq!(epd_pointwise_max(&fg, &h), epd_pointwise_max(&f, &epd_pointwise_max(&g, &h)));
        for n in 0..60 {
            prop_assert_eq!(fg.eval(n), f.eval(n).max(g.eval(n)));
        }
    }

    #[test]
    fn gap_cover_meets_set(a in infinite_upset()) {
        let g = gap_cover_function(&a).unwrap();
        for n in 0..50u64 {
            prop_assert!((n..g.eval(n)).any(|m| a.contains(m)));
        }
    }

    #[test]
    fn pairing_round_trips(n0 in 0u64..5000, n1 in 0u64..5000) {
        prop_assert_eq!(pair_decode(pair_encode(n0, n1)), (n0, n1));
    }

    #[test]
    fn json_round_trips(a in upset(), f in epd()) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<UpSet>(&s).unwrap(), a);
        let s = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<EpdFun>(&s).unwrap(), f);
    }

    #[test]
    fn relations_ignore_finite_changes(
        label_idx in 0usize..8,
        seed in any::<u64>(),
    ) {
        let label = BINARY[label_idx];
        let mut r = rng(seed);
        let rel = label.relation();
        let c = sample_element(&mut r, rel.challenge_space, true);
        let y = sample_element(&mut r, rel.response_space, false);
        let base = relation_eval(label, &c, &y).unwrap();
        let b = Bounds::default();
        for _ in 0..4 {
            let c2 = mutate_element(&mut r, &c, b);
            let y2 = mutate_element(&mut r, &y, b);
            prop_assert_eq!(relation_eval(label, &c2, &y).unwrap(), base);
            prop_assert_eq!(relation_eval(label, &c, &y2).unwrap(), base);
        }
    }

    #[test]
    fn witness_matches_relation(label_idx in 0usize..8, seed in any::<u64>()) {
        let label = BINARY[label_idx];
        let mut r = rng(seed);
        let rel = label.relation();
        let psi = sample_element(&mut r, rel.challenge_space, true);
        let family: Vec<Element> = (0..3).map(|_| sample_element(&mut r, rel.response_space, false)).collect();
        match witness_valid(label, &psi, &family) {
            Ok(v) => {
                let none = family.iter().all(|y| !relation_eval(label, &psi, y).unwrap());
                prop_assert_eq!(v.valid, none);
            }
            Err(gtlab_core::Error::PhiViolation { .. }) | Err(gtlab_core::Error::FiniteMember { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn towers_are_centered(sets in prop::collection::vec(infinite_upset(), 1..4)) {
        if family_property(FamilyProperty::Tower, &sets).unwrap() {
            prop_assert!(family_property(FamilyProperty::Centered, &sets).unwrap());
        }
        let mut chain = vec![sets[0].clone()];
        for s in &sets[1..] {
            let next = chain.last().unwrap().intersect(s);
            if next.is_infinite() && !next.is_almost_equal(chain.last().unwrap()) {
                chain.push(next);
            }
        }
        prop_assert!(family_property(FamilyProperty::Tower, &chain).unwrap());
    }

    #[test]
    fn domination_is_monotone(label_idx in 0usize..8, seed in any::<u64>()) {
        let label = BINARY[label_idx];
        let mut r = rng(seed);
        let rel = label.relation();
        let family: Vec<Element> = (0..3).map(|_| sample_element(&mut r, rel.response_space, false)).collect();
        let challenges: Vec<Element> = (0..3).map(|_| sample_element(&mut r, rel.challenge_space, true)).collect();
        let extra = sample_element(&mut r, rel.response_space, false);
        if is_dominating_for(label, &family, &challenges).unwrap() {
            let mut bigger = family.clone();
            bigger.push(extra);
            prop_assert!(is_dominating_for(label, &bigger, &challenges).unwrap());
        }
    }

    #[test]
    fn composition_with_identities_keeps_law(arrow_idx in 0usize..4, seed in any::<u64>()) {
        let arrow = [Arrow::PToA, Arrow::BToD, Arrow::RToU, Arrow::PToT][arrow_idx];
        let m = builtin_morphism(arrow);
        let mut r = rng(seed);
        for c in [
            compose(&Morphism::identity(m.source), &m).unwrap(),
            compose(&m, &Morphism::identity(m.target)).unwrap(),
        ] {
            let bs: Vec<Element> = (0..4).map(|_| sample_element(&mut r, c.challenge_space(), true)).collect();
            let as_: Vec<Element> = (0..4).map(|_| sample_element(&mut r, c.response_space(), false)).collect();
            prop_assert!(morphism_law_check(&c, &bs, &as_).unwrap().passed);
            for b in &bs {
                prop_assert_eq!(c.xi_minus(b).unwrap(), m.xi_minus(b).unwrap());
            }
        }
    }

    #[test]
    fn independence_criteria_agree(
        family in prop::collection::vec(upset(), 0..5),
        candidate in upset(),
    ) {
        if family.is_empty() || family_property(FamilyProperty::Independent, &family).unwrap_or(false) {
            let v = independence_extension(&family, &candidate).unwrap();
            prop_assert!(v.criteria_agree(), "{:?}", v);
        }
    }

    #[test]
    fn combinations_cover_all_sign_patterns(family in prop::collection::vec(upset(), 1..4)) {
        let combos = boolean_combinations(&family);
        let k = family.len() as u32;
        prop_assert_eq!(combos.len(), 3usize.pow(k) - 1);
        for c in &combos {
            for n in 0..40u64 {
                let expect = c.positive.iter().all(|&i| family[i].contains(n))
                    && c.negative.iter().all(|&i| !family[i].contains(n));
                prop_assert_eq!(c.set.contains(n), expect);
            }
            prop_assert_eq!(c.finite, c.set.is_finite());
        }
    }

    #[test]
    fn lambda_intervals_contain_gaps(f in epd(), lift in 1u64..4) {
        // Make f admissible: n + lift + max(f - n, 0).
        let g = EpdFun::new(
            (0..f.head_len() as u64).map(|n| f.eval(n).max(n) + lift).collect(),
            f.eval(f.head_len() as u64).max(f.head_len() as u64) + lift,
            f.deltas().iter().map(|&d| d.max(1)).collect(),
        );
        if let Ok(g) = g {
            if (0..64).all(|n| g.eval(n) > n) {
                let l = lambda_coalesce(&g, std::slice::from_ref(&g)).unwrap();
                for w in l.endpoints.windows(2) {
                    prop_assert!(w[0] < w[1]);
                    prop_assert!(gap_interval_in(&g, w[0], w[1]));
                    prop_assert!((w[0]..w[1]).any(|n| g.eval(n) <= w[1]));
                }
            }
        }
    }

    #[test]
    fn bound_dominates_members(family in prop::collection::vec(epd(), 1..6)) {
        let b = bound_family(&family).unwrap();
        for a in &family {
            prop_assert!(a.is_eventually_le(&b));
        }
        for n in 0..40u64 {
            let k = (n as usize).min(family.len() - 1);
            prop_assert_eq!(b.eval(n), family[..=k].iter().map(|a| a.eval(n)).max().unwrap());
        }
    }

    #[test]
    fn split_side_flips_with_complement(v in infinite_upset(), x in upset()) {
        if let Ok(side) = split_side(&v, &x) {
            let flipped = split_side(&v, &x.complement()).unwrap();
            prop_assert_ne!(side, flipped);
            prop_assert_eq!(side == SplitSide::Left, v.is_almost_subset_of(&x));
        }
    }

    #[test]
    fn partition_lattice(a in prop::collection::vec(0usize..4, 1..10), seed in any::<u64>()) {
        let p = FinEqRel::from(a.clone());
        let mut r = rng(seed);
        let q = FinEqRel::from(a.iter().map(|_| rand::Rng::gen_range(&mut r, 0..3)).collect::<Vec<usize>>());
        let meet = p.meet(&q).unwrap();
        let join = p.join(&q).unwrap();
        prop_assert!(meet.refines(&p).unwrap() && meet.refines(&q).unwrap());
        prop_assert!(p.refines(&join).unwrap() && q.refines(&join).unwrap());
        prop_assert_eq!(p.refines(&q).unwrap(), p.meet(&q).unwrap() == p);
        for x in 0..p.size() {
            for y in 0..p.size() {
                prop_assert_eq!(meet.related(x, y), p.related(x, y) && q.related(x, y));
            }
        }
    }

    #[test]
    fn grid_pipeline_on_random_grids(seed in any::<u64>(), n in 1usize..24, rows in 1usize..5, cols in 1usize..5) {
        let mut r = rng(seed);
        let g = Grid::random(&mut r, n, rows, cols);
        let action = cyclic_action(&mut r, g.top());
        let psi = orbit_max_phi0(&g, &action);
        prop_assert!(F_chain_report(&g, &psi).unwrap().holds());
        let v: Vec<usize> = (0..rows).map(|_| rand::Rng::gen_range(&mut r, 0..cols)).collect();
        let rep = exhaustion_check(&g, &v).unwrap();
        prop_assert_eq!(rep.union_covers, rep.eventually);
        prop_assert_eq!(rep.passed, rep.first_violation.is_none());
    }
}
