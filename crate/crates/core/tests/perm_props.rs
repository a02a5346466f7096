use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use forge_core::perm::{coset_intersection, Coset, CosetSide, GroupElement, Perm, PermGroup, VoltageSet};
use num_bigint::BigUint;
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

fn element(n: usize) -> impl Strategy<Value = GroupElement> {
    (perm(n), any::<bool>()).prop_map(|(p, s)| GroupElement::new(p, s))
}

/// Closure under multiplication by generators, breadth first.
fn closure(n: usize, gens: &[GroupElement]) -> BTreeSet<(Vec<u32>, bool)> {
    let key = |g: &GroupElement| (g.perm.images().to_vec(), g.s);
    let id = GroupElement::identity(n);
    let mut seen = BTreeSet::from([key(&id)]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let k = g.then(h);
            if seen.insert(key(&k)) {
                queue.push_back(k);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn then_is_associative(a in perm(9), b in perm(9), c in perm(9)) {
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
    }

    #[test]
    fn inverse_cancels(a in element(9)) {
        prop_assert!(a.then(&a.inverse()).is_identity());
        prop_assert!(a.inverse().then(&a).is_identity());
    }

    #[test]
    fn right_action(a in perm(9), b in perm(9), x in 0usize..9) {
        prop_assert_eq!(a.then(&b).image(x), b.image(a.image(x)));
    }

    #[test]
    fn extended_embedding_is_a_homomorphism(a in element(7), b in element(7)) {
        let ab = a.then(&b);
        prop_assert_eq!(a.to_extended().then(&b.to_extended()), ab.to_extended());
        prop_assert_eq!(GroupElement::from_extended(&ab.to_extended()), ab);
    }

    #[test]
    fn order_and_membership_match_closure(gens in prop::collection::vec(element(5), 1..4), probe in element(5)) {
        let g = PermGroup::new(5, gens.clone()).unwrap();
        let all = closure(5, &gens);
        prop_assert_eq!(g.order(), BigUint::from(all.len()));
        prop_assert_eq!(g.contains(&probe), all.contains(&(probe.perm.images().to_vec(), probe.s)));
        prop_assert_eq!(g.has_s_elements(), all.iter().any(|e| e.1));
    }

    #[test]
    fn coset_sides_agree(gens in prop::collection::vec(element(5), 1..3), rep in element(5), probe in element(5)) {
        let h = Arc::new(PermGroup::new(5, gens).unwrap());
        let left = Coset::new(rep.clone(), h.clone(), CosetSide::SubgroupFirst);
        let right = left.to_rep_first();
        prop_assert_eq!(left.contains(&probe), right.contains(&probe));
        prop_assert!(left.same_set(&right));
        let naive = h.elements(1000).unwrap().iter().any(|x| x.then(&rep) == probe);
        prop_assert_eq!(left.contains(&probe), naive);
    }

    #[test]
    fn intersection_matches_brute_force(
        ga in prop::collection::vec(element(5), 1..3),
        gb in prop::collection::vec(element(5), 1..3),
        ra in element(5),
        rb in element(5),
    ) {
        let a = VoltageSet::Coset(Coset::new(ra, Arc::new(PermGroup::new(5, ga).unwrap()), CosetSide::RepFirst));
        let b = VoltageSet::Coset(Coset::new(rb, Arc::new(PermGroup::new(5, gb).unwrap()), CosetSide::RepFirst));
        let (c, _) = coset_intersection(&a, &b, 1 << 12).unwrap();
        let ea = a.as_coset().unwrap().elements(1 << 12).unwrap();
        let expected: Vec<&GroupElement> = ea.iter().filter(|g| b.contains(g)).collect();
        prop_assert_eq!(c.size(), BigUint::from(expected.len()));
        for g in expected {
            prop_assert!(c.contains(g));
        }
    }
}

#[test]
fn perm_from_images_rejects_non_bijections() {
    assert!(Perm::from_images(vec![0, 0, 1]).is_err());
    assert!(Perm::from_images(vec![0, 3]).is_err());
}

#[test]
fn symmetric_group_orders() {
    for n in 2..=9usize {
        let cycle = Perm::from_fn(n, |i| (i + 1) % n).unwrap();
        let swap = Perm::from_fn(n, |i| match i { 0 => 1, 1 => 0, _ => i }).unwrap();
        let g = PermGroup::new(n, vec![GroupElement::from_perm(cycle), GroupElement::from_perm(swap)]).unwrap();
        let fact: u64 = (1..=n as u64).product();
        assert_eq!(g.order(), BigUint::from(fact));
    }
}
