use proptest::prelude::*;
use proptest::sample::{select, subsequence};

use subrack_core::cycle_forms::p_nilpotent_from_lattice;
use subrack_core::invariants::{center_atoms, class_size_frequency};
use subrack_core::lattice::DEFAULT_CAP;
use subrack_core::nilpotence::nilpotence_class_from_lattice;
use subrack_core::oracle::{prime_divisors, Oracle};
use subrack_core::{catalog, catalog_up_to, ElemSet, FiniteGroup, ModeChoice, Rack, SubrackLattice, CATALOG};

fn small_names() -> Vec<&'static str> {
    CATALOG.iter().copied().filter(|n| catalog(n).unwrap().order() <= 16).collect()
}

fn perm() -> impl Strategy<Value = Vec<usize>> {
    Just((0..5).collect::<Vec<usize>>()).prop_shuffle()
}

/// A subgroup of S5 of order at most 24, from one or two generators.
fn permutation_group() -> impl Strategy<Value = FiniteGroup> {
    prop::collection::vec(perm(), 1..=2).prop_filter_map("order too large", |gens| {
        FiniteGroup::from_permutations("H", 5, &gens, 24).ok()
    })
}

/// `g` with its non-identity elements renamed by a random permutation.
fn relabeled(g: &FiniteGroup, shuffle: &[usize]) -> FiniteGroup {
    let n = g.order();
    let mut to = vec![0usize];
    to.extend(shuffle.iter().map(|&i| i + 1));
    let mut from = vec![0; n];
    for (i, &t) in to.iter().enumerate() {
        from[t] = i;
    }
    FiniteGroup::from_fn("relabeled", n, |a, b| to[g.mul(from[a], from[b])]).unwrap()
}

fn subset(n: usize) -> impl Strategy<Value = ElemSet> {
    subsequence((0..n).collect::<Vec<_>>(), 0..=n).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_a_closure_operator(
        (name, s, t) in select(small_names()).prop_flat_map(|name| {
            let n = catalog(name).unwrap().order();
            (Just(name), subset(n), subset(n))
        })
    ) {
        let g = catalog(name).unwrap();
        let l = SubrackLattice::implicit(&g).unwrap();
        prop_assert!(l.rack().is_subrack(l.generated(s)));
        let (s, t) = (l.generated(s), l.generated(t));
        let cs = l.closure(s).unwrap();
        prop_assert!(s.is_subset(cs));
        prop_assert_eq!(l.closure(cs).unwrap(), cs);
        prop_assert!(l.closure(s & t).unwrap().is_subset(cs & l.closure(t).unwrap()));
        prop_assert!(l.closure(s).is_ok_and(|c| l.rack().is_subrack(c)));
    }

    #[test]
    fn explicit_and_implicit_joins_agree(
        (name, s, t) in select(small_names()).prop_filter("explicit size", |n| catalog(n).unwrap().order() <= 12)
            .prop_flat_map(|name| {
                let n = catalog(name).unwrap().order();
                (Just(name), subset(n), subset(n))
            })
    ) {
        let g = catalog(name).unwrap();
        let e = SubrackLattice::explicit(&g).unwrap();
        let i = e.to_implicit();
        let (s, t) = (e.generated(s), e.generated(t));
        prop_assert!(e.is_element(s) && e.is_element(t));
        prop_assert_eq!(e.join(s, t), i.join(s, t));
        prop_assert_eq!(e.meet(s, t), s & t);
        prop_assert!(e.is_element(s & t));
    }

    #[test]
    fn permutation_groups_match_oracle(g in permutation_group()) {
        let r = Rack::conjugation(&g).unwrap();
        prop_assert!(r.check_axioms().is_ok());
        let l = SubrackLattice::of_group(&g, ModeChoice::Auto, DEFAULT_CAP).unwrap();
        let o = Oracle::new(&g).unwrap();
        prop_assert_eq!(center_atoms(&l), o.center());
        prop_assert_eq!(nilpotence_class_from_lattice(&l, &g, 0).unwrap().verdict, o.nilpotence());
        for p in prime_divisors(g.order()) {
            if let Some(v) = p_nilpotent_from_lattice(p, &l, &g, 0).unwrap().verdict {
                prop_assert_eq!(v, o.has_normal_p_complement(p).unwrap());
            }
        }
    }

    #[test]
    fn relabeling_preserves_invariants(
        (name, shuffle) in select(small_names()).prop_flat_map(|name| {
            let n = catalog(name).unwrap().order();
            (Just(name), Just((0..n - 1).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let g = catalog(name).unwrap();
        let h = relabeled(&g, &shuffle);
        let lg = SubrackLattice::implicit(&g).unwrap();
        let lh = SubrackLattice::implicit(&h).unwrap();
        prop_assert_eq!(class_size_frequency(&lg), class_size_frequency(&lh));
        prop_assert_eq!(center_atoms(&lg).len(), center_atoms(&lh).len());
        prop_assert_eq!(
            nilpotence_class_from_lattice(&lg, &g, 0).unwrap().verdict,
            nilpotence_class_from_lattice(&lh, &h, 3).unwrap().verdict
        );
    }
}

#[test]
fn catalog_lattices_are_bounded() {
    for g in catalog_up_to(24) {
        let l = SubrackLattice::of_group(&g, ModeChoice::Auto, DEFAULT_CAP).unwrap();
        assert_eq!(l.top(), g.all(), "{}", g.name());
        assert!(l.bottom().is_empty());
        assert_eq!(l.atoms().len(), g.order());
        let classes = g.conjugacy_classes().class_sets();
        assert_eq!(l.coatoms().len(), classes.len());
        for c in l.coatoms() {
            assert!(classes.contains(&ElemSet(g.all().0 & !c.0)), "{}", g.name());
        }
    }
}
