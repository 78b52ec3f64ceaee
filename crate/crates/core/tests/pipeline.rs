//! Pipeline-level invariants, checked against brute-force counts.

mod common;

use std::collections::HashSet;

use addcomb::report::{to_csv, to_json, CSV_HEADER};
use addcomb::{
    gen_gap, run_pipeline, CandidateLabel, Elem, FiniteSet, GapSpec, GroupSpec, PipelineConfig, PipelineReport,
};
use common::{energy, rep_counts, sub};
use num_rational::Ratio;
use proptest::prelude::*;

fn small_config() -> PipelineConfig {
    PipelineConfig { slice_cap: 64, ..PipelineConfig::default() }
}

fn check_report(a: &FiniteSet, r: &PipelineReport) -> Result<(), TestCaseError> {
    let g = a.group();
    let counts = rep_counts(a);
    let diffs: HashSet<i128> = counts.keys().copied().collect();
    prop_assert_eq!(r.set_size, a.len() as u64);
    prop_assert_eq!(r.diff_size, diffs.len() as u64);
    prop_assert_eq!(r.k, Ratio::new(diffs.len() as u64, a.len() as u64));
    let (q, c) = energy(a);
    prop_assert_eq!((r.energy_set.quadruples, r.energy_set.cube), (q, c));

    for cert in &r.certificates {
        let s = &cert.candidate;
        prop_assert_eq!(cert.size, s.len() as u64);
        prop_assert!(s.elems().iter().all(|&x| diffs.contains(&sub(g, x, g.identity()))), "{} escapes A-A", cert.label);
        prop_assert_eq!((cert.energy.quadruples, cert.energy.cube), energy(s));
        let floor_ok = s.len() as f64 >= r.size_floor.min_size;
        prop_assert_eq!(cert.meets_size_floor, floor_ok);
        if let CandidateLabel::ASlice(_) = cert.label {
            // a translate of A[t], whose size is r(t) for some t
            prop_assert!(counts.values().any(|&v| v == s.len() as u64));
        }
    }
    let chosen = &r.chosen;
    prop_assert!(chosen.meets_size_floor);
    prop_assert_eq!(&r.certificates[r.chosen_index].label, &chosen.label);
    for cert in r.certificates.iter().filter(|c| c.meets_size_floor) {
        // chosen energy is maximal among candidates above the floor
        prop_assert!(cert.energy.quadruples * chosen.energy.cube <= chosen.energy.quadruples * cert.energy.cube);
    }
    let json: serde_json::Value = serde_json::from_str(&to_json(r).unwrap()).unwrap();
    prop_assert_eq!(json["schema"].as_u64(), Some(1));
    prop_assert!(json["timing"]["total_ms"].is_number());
    let csv = to_csv(r);
    prop_assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    prop_assert_eq!(csv.lines().count(), r.certificates.len() + 1);
    Ok(())
}

fn set_strategy() -> impl Strategy<Value = FiniteSet> {
    let f2 = prop::collection::vec(0i64..256, 1..40)
        .prop_map(|v| FiniteSet::new(GroupSpec::f2n(8).unwrap(), v.into_iter().map(Elem)).unwrap());
    let zmod = prop::collection::vec(0i64..211, 1..40)
        .prop_map(|v| FiniteSet::new(GroupSpec::zmod(211).unwrap(), v.into_iter().map(Elem)).unwrap());
    let z = prop::collection::vec(-300i64..300, 1..30)
        .prop_map(|v| FiniteSet::new(GroupSpec::Zint, v.into_iter().map(Elem)).unwrap());
    let f3 = prop::collection::vec(0i64..243, 1..40)
        .prop_map(|v| FiniteSet::new(GroupSpec::fpn(3, 5).unwrap(), v.into_iter().map(Elem)).unwrap());
    prop_oneof![f2, zmod, z, f3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_are_exact_subsets_of_differences(a in set_strategy()) {
        let r = run_pipeline(&a, &small_config()).unwrap();
        check_report(&a, &r)?;
    }
}

#[test]
fn gap_has_product_difference_set() {
    let gap = gen_gap(&GapSpec { base: 0, steps: vec![1, 100], lengths: vec![5, 5] }).unwrap();
    assert!(gap.proper);
    let r = run_pipeline(&gap.set, &PipelineConfig::default()).unwrap();
    assert_eq!(r.k, Ratio::new(81, 25));
    check_report(&gap.set, &r).unwrap();
    assert!(r.chosen.meets_theorem);
}

#[test]
fn subgroup_is_degenerate() {
    let g = GroupSpec::zmod(30).unwrap();
    let a = FiniteSet::new(g, [2, 7, 12, 17, 22, 27].map(Elem)).unwrap();
    let r = run_pipeline(&a, &PipelineConfig::default()).unwrap();
    assert!(r.degenerate);
    assert_eq!(r.certificates.len(), 1);
    assert!(r.chosen.energy.is_one());
    check_report(&a, &r).unwrap();
}

#[test]
fn singleton_and_pair_inputs() {
    for elems in [vec![7], vec![0, 1], vec![-4, 9]] {
        let a = FiniteSet::new(GroupSpec::Zint, elems.into_iter().map(Elem)).unwrap();
        let r = run_pipeline(&a, &PipelineConfig::default()).unwrap();
        check_report(&a, &r).unwrap();
    }
}

#[test]
fn invalid_config_is_rejected() {
    let a = FiniteSet::new(GroupSpec::Zint, [0, 1, 3].map(Elem)).unwrap();
    let bad = PipelineConfig { slice_cap: 0, ..PipelineConfig::default() };
    assert!(run_pipeline(&a, &bad).is_err());
    let bad = PipelineConfig { eps: Ratio::new(1, 0x7fff_ffff), ..PipelineConfig::default() };
    assert!(run_pipeline(&a, &bad).is_err());
}
