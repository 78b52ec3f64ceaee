//! Property tests against the brute-force references in `common`.

mod common;

use addcomb::io::{format_set, parse_set};
use addcomb::{
    diff_set, dp1_level, dp2_level, energy_exact, energy_oracle, energy_with, translate_intersect, DiffTable, Elem,
    EnergyPath, FiniteSet, GroupSpec,
};
use common::{energy, rep_counts, sub};
use num_rational::Ratio;
use proptest::prelude::*;

fn group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        (1u32..=12).prop_map(|n| GroupSpec::f2n(n).unwrap()),
        (0usize..3, 1u32..=3).prop_map(|(i, n)| GroupSpec::fpn([3, 5, 7][i], n).unwrap()),
        (1u64..=500).prop_map(|m| GroupSpec::zmod(m).unwrap()),
        Just(GroupSpec::Zint),
    ]
}

fn elem_in(g: GroupSpec) -> BoxedStrategy<Elem> {
    match g.order() {
        Some(o) => (0..o as i64).prop_map(Elem).boxed(),
        None => (-5000i64..5000).prop_map(Elem).boxed(),
    }
}

fn set_in(g: GroupSpec, max: usize) -> impl Strategy<Value = FiniteSet> {
    prop::collection::vec(elem_in(g), 1..=max).prop_map(move |v| FiniteSet::new(g, v).unwrap())
}

fn any_set(max: usize) -> impl Strategy<Value = FiniteSet> {
    group().prop_flat_map(move |g| set_in(g, max))
}

fn set_and_elem(max: usize) -> impl Strategy<Value = (FiniteSet, Elem)> {
    group().prop_flat_map(move |g| (set_in(g, max), elem_in(g)))
}

fn big_group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        (1u32..=63).prop_map(|n| GroupSpec::f2n(n).unwrap()),
        (0usize..4, 1u32..=20).prop_map(|(i, n)| GroupSpec::fpn([3, 5, 7, 101][i], n.min(9)).unwrap()),
        (1u64..=u64::MAX >> 1).prop_map(|m| GroupSpec::zmod(m).unwrap()),
    ]
}

fn raw_elem(g: GroupSpec, raw: u64) -> Elem {
    Elem((raw % g.order().unwrap()) as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn group_laws(g in big_group(), x in any::<u64>(), y in any::<u64>(), z in any::<u64>()) {
        let (x, y, z) = (raw_elem(g, x), raw_elem(g, y), raw_elem(g, z));
        let add = |a, b| g.add(a, b).unwrap();
        prop_assert_eq!(add(add(x, y), z), add(x, add(y, z)));
        prop_assert_eq!(add(x, y), add(y, x));
        prop_assert_eq!(add(x, g.identity()), x);
        prop_assert_eq!(add(x, g.neg(x).unwrap()), g.identity());
        let d = g.sub(x, y).unwrap();
        prop_assert_eq!(d.0 as i128, sub(g, x, y));
        prop_assert_eq!(add(d, y), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exact_energy_matches_brute_force(a in any_set(40)) {
        let (q, cube) = energy(&a);
        let exact = energy_exact(&a).unwrap();
        prop_assert_eq!((exact.quadruples, exact.cube), (q, cube));
        prop_assert_eq!(energy_with(&a, EnergyPath::Counting).unwrap(), exact);
        prop_assert_eq!(energy_oracle(&a, 64).unwrap(), exact);
    }

    #[test]
    fn energy_and_differences_are_translation_invariant((a, c) in set_and_elem(30)) {
        let moved = a.translate(c).unwrap();
        prop_assert_eq!(energy_exact(&moved).unwrap(), energy_exact(&a).unwrap());
        prop_assert_eq!(diff_set(&moved, &moved).unwrap(), diff_set(&a, &a).unwrap());
    }

    #[test]
    fn diff_table_matches_pair_counts(a in any_set(40)) {
        let g = a.group();
        let table = DiffTable::build(&a).unwrap();
        let reference = rep_counts(&a);
        prop_assert_eq!(table.support().len(), reference.len());
        let n = a.len() as u64;
        prop_assert_eq!(table.counts().iter().sum::<u64>(), n * n);
        prop_assert_eq!(table.count(g.identity()), n);
        for (t, c) in table.iter() {
            prop_assert_eq!(reference[&sub(g, t, g.identity())], c);
            prop_assert_eq!(table.count(g.neg(t).unwrap()), c);
        }
        prop_assert_eq!(table.support_set(), diff_set(&a, &a).unwrap());
    }

    #[test]
    fn slices_have_size_r((a, t) in set_and_elem(30)) {
        // |A ∩ (A + t)| = r(t); for t = a - a' this is |(a - a' + A) ∩ A|.
        let table = DiffTable::build(&a).unwrap();
        let slice = translate_intersect(&a, t).unwrap();
        prop_assert_eq!(slice.len() as u64, table.count(t));
        for x in slice.elems() {
            prop_assert!(a.contains(*x));
            prop_assert!(a.contains(a.group().sub(*x, t).unwrap()));
        }
    }

    #[test]
    fn set_files_round_trip(a in any_set(30)) {
        let text = format_set(&a);
        prop_assert_eq!(parse_set(&text, None).unwrap(), a.clone());
        prop_assert_eq!(parse_set(&text, Some(a.group())).unwrap(), a);
    }

    #[test]
    fn dyadic_members_lie_in_their_window(raw in prop::collection::vec((1u64..1_000_000, 1u64..20), 1..200)) {
        let values: Vec<Ratio<u64>> = raw.iter().map(|&(p, q)| Ratio::new(p, q)).collect();
        let level = dp1_level(&values).unwrap();
        let max = values.iter().max().unwrap();
        for (i, v) in values.iter().enumerate() {
            // max/2^{j+1} < v ≤ max/2^j  ⟺  v·2^j ≤ max < v·2^{j+1}
            let scaled = |k: u32| Ratio::new(*v.numer() as u128 * (1u128 << k), *v.denom() as u128);
            let m = Ratio::new(*max.numer() as u128, *max.denom() as u128);
            let inside = scaled(level.index) <= m && m < scaled(level.index + 1);
            prop_assert_eq!(inside, level.members.contains(&i));
        }

        let ints: Vec<u64> = raw.iter().map(|&(p, q)| p % (q * 50)).collect();
        prop_assume!(ints.iter().any(|&v| v > 0));
        let level = dp2_level(&ints).unwrap();
        let max = *ints.iter().max().unwrap() as u128;
        for (i, &v) in ints.iter().enumerate() {
            let v = v as u128;
            let inside = v > 0 && v << level.index <= max && max < v << (level.index + 1);
            prop_assert_eq!(inside, level.members.contains(&i));
        }
    }
}
