//! Property tests for the permutation substrate: parsing round-trips,
//! group laws, and stabilizer chains checked against exhaustive closure.

use std::collections::BTreeSet;

use cubefree::perm::{PermGroup, Permutation};
use proptest::prelude::*;

fn arb_perm(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|im| Permutation::from_images(im).unwrap())
}

/// Exhaustive closure of a generating set, independent of stabilizer
/// chains.
fn brute_closure(gens: &[Permutation], degree: usize) -> BTreeSet<Permutation> {
    let mut set = BTreeSet::new();
    set.insert(Permutation::identity(degree));
    let mut frontier = vec![Permutation::identity(degree)];
    while let Some(e) = frontier.pop() {
        for g in gens {
            let n = e.compose(g);
            if set.insert(n.clone()) {
                frontier.push(n);
            }
        }
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(g in arb_perm(9)) {
        let text = g.to_string();
        let back = Permutation::parse(&text, 9).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn group_laws(a in arb_perm(8), b in arb_perm(8), c in arb_perm(8)) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert_eq!(a.inverse().inverse(), a.clone());
        // x^(ab) = (x^a)^b pointwise
        for x in 0..8u32 {
            prop_assert_eq!(a.compose(&b).image(x), b.image(a.image(x)));
        }
    }

    #[test]
    fn conjugation_identities(a in arb_perm(8), h in arb_perm(8)) {
        prop_assert_eq!(a.conjugated_by(&h), h.inverse().compose(&a).compose(&h));
        prop_assert_eq!(a.conjugated_by(&h).order(), a.order());
    }

    #[test]
    fn power_consistency(a in arb_perm(10)) {
        let n = a.order() as i64;
        prop_assert!(a.pow(n).is_identity());
        prop_assert_eq!(a.pow(-1), a.inverse());
        prop_assert_eq!(a.pow(3), a.compose(&a).compose(&a));
        prop_assert_eq!(a.pow(n - 1), a.inverse());
    }

    #[test]
    fn chain_order_matches_exhaustive_closure(
        a in arb_perm(6),
        b in arb_perm(6),
    ) {
        let gens = vec![a, b];
        let brute = brute_closure(&gens, 6);
        prop_assert!(brute.len() <= 720);
        let g = PermGroup::new(6, gens).unwrap();
        prop_assert_eq!(g.order(), brute.len() as u128);
        // spot-check membership and exact word re-evaluation
        for e in brute.iter().take(40) {
            prop_assert!(g.contains(e));
            let w = g.decompose(e).unwrap();
            prop_assert_eq!(&g.evaluate_word(&w), e);
        }
    }

    #[test]
    fn contains_closed_under_products(a in arb_perm(6), b in arb_perm(6)) {
        let g = PermGroup::new(6, vec![a.clone(), b.clone()]).unwrap();
        prop_assert!(g.contains(&a.compose(&b)));
        prop_assert!(g.contains(&a.compose(&b).compose(&a.inverse())));
        prop_assert!(g.contains(&Permutation::commutator(&a, &b)));
    }
}
