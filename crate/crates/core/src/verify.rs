//! Seeded property suites: exact energy against the oracle, the dyadic and
//! invariance inequalities, and pipeline-level invariants.

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dyadic::{cs2_holds, cs2_lhs, dp1_level, dp2_admissible_mass, dp2_level, invariance_energy_bound};
use crate::error::Result;
use crate::extract::{run_pipeline, PipelineConfig, PipelineReport};
use crate::generators::{gen_gap, gen_r_plus_h, rng, GapSpec, RPlusHSpec};
use crate::group::{Elem, GroupSpec};
use crate::report::to_json_without_timing;
use crate::set::{
    dense_window, diff_set, energy_oracle, energy_with, translate_heavy_set, DiffTable, EnergyPath, FiniteSet,
    ORACLE_CAP,
};

/// Outcome of one named property over many trials.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: u64,
    pub failures: u64,
    /// The first failing input.
    pub counterexample: Option<serde_json::Value>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult { name: name.to_string(), trials: 0, failures: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> serde_json::Value) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }
}

pub fn set_json(s: &FiniteSet) -> serde_json::Value {
    let g = s.group();
    serde_json::json!({
        "group": g.to_string(),
        "elements": s.elems().iter().map(|&e| g.format_elem(e)).collect::<Vec<_>>(),
    })
}

/// A random group of modest order, cycling through the four variants.
pub fn random_group(rng: &mut ChaCha8Rng, variant: usize) -> GroupSpec {
    match variant % 4 {
        0 => GroupSpec::f2n(rng.gen_range(1..=10)).unwrap(),
        1 => {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let n = match p {
                3 => rng.gen_range(1..=6),
                5 => rng.gen_range(1..=4),
                _ => rng.gen_range(1..=3),
            };
            GroupSpec::fpn(p, n).unwrap()
        }
        2 => GroupSpec::zmod(rng.gen_range(1..=300)).unwrap(),
        _ => GroupSpec::Zint,
    }
}

/// A uniform random subset of size `1..=max_size` (integers drawn from a window).
pub fn random_set(rng: &mut ChaCha8Rng, group: GroupSpec, max_size: usize) -> FiniteSet {
    match group.order() {
        Some(order) => {
            let size = rng.gen_range(1..=max_size.min(order as usize));
            let picks = index::sample(rng, order as usize, size);
            FiniteSet::new(group, picks.into_iter().map(|i| Elem(i as i64))).unwrap()
        }
        None => {
            let size = rng.gen_range(1..=max_size);
            let span: i64 = [20, 1_000, 1 << 40][rng.gen_range(0..3)];
            let elems: Vec<Elem> = (0..size).map(|_| Elem(rng.gen_range(-span..=span))).collect();
            FiniteSet::new(group, elems).unwrap()
        }
    }
}

/// Exact energy, the dense route and the oracle agree; `1/K ≤ E ≤ 1`;
/// `Σ r = |A|²`, `r(0) = |A|`, `r(t) = r(-t)`.
pub fn suite_oracle(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut rng = rng(seed);
    let mut agree = CheckResult::new("energy_exact == energy_oracle (and dense path when available)");
    let mut bounds = CheckResult::new("1/K_diff <= E(A) <= 1");
    let mut identities = CheckResult::new("sum r = |A|^2, r(0) = |A|, r(t) = r(-t)");
    for variant in 0..4 {
        for _ in 0..trials {
            let g = random_group(&mut rng, variant);
            let a = random_set(&mut rng, g, 30);
            let exact = energy_with(&a, EnergyPath::Counting)?;
            let oracle = energy_oracle(&a, ORACLE_CAP)?;
            let auto = energy_with(&a, EnergyPath::Auto)?;
            let dense_ok = match dense_window(&a) {
                Some(_) => energy_with(&a, EnergyPath::Dense)? == exact,
                None => true,
            };
            agree.record(exact == oracle && auto == exact && dense_ok, || set_json(&a));

            let table = DiffTable::build(&a)?;
            let n = a.len() as u128;
            let d = table.support().len() as u128;
            // Q ≥ |A|⁴ / |A - A| and Q ≤ |A|³
            bounds.record(exact.quadruples * d >= n.pow(4) && exact.quadruples <= n.pow(3), || set_json(&a));

            let total: u128 = table.counts().iter().map(|&c| c as u128).sum();
            let mut ok = total == n * n && table.count(g.identity()) as u128 == n;
            for (t, c) in table.iter() {
                ok &= table.count(g.neg(t)?) == c;
            }
            identities.record(ok, || set_json(&a));
        }
    }
    Ok(SuiteReport { suite: "oracle".into(), seed, checks: vec![agree, bounds, identities] })
}

/// DP1/DP2 guarantees on random value maps, plus the CS2 and invariance
/// inequalities on random `B2 ⊆ F_2^10`.
pub fn suite_lemmas(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut rng = rng(seed);
    let mut dp1 = CheckResult::new("DP1 cardinality guarantee and level windows");
    let mut dp2 = CheckResult::new("DP2 cardinality guarantee, admissible index and mass bound");
    for _ in 0..trials {
        let len = rng.gen_range(1..=256);
        let scale: u64 = [4, 1_000, 1 << 30][rng.gen_range(0..3)];
        let values: Vec<Ratio<u64>> =
            (0..len).map(|_| Ratio::new(rng.gen_range(1..=scale), rng.gen_range(1..=16))).collect();
        let level = dp1_level(&values)?;
        let windows = level.members.iter().all(|&i| within(values[i], level.lower(), level.upper()));
        dp1.record(level.dp1_guarantee_holds() && windows, || {
            serde_json::json!(values.iter().map(|v| v.to_string()).collect::<Vec<_>>())
        });

        let mut ints: Vec<u64> =
            (0..len).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..=scale) }).collect();
        if ints.iter().all(|&v| v == 0) {
            ints[0] = 1;
        }
        let level = dp2_level(&ints)?;
        let windows = level.members.iter().all(|&i| within(Ratio::from_integer(ints[i]), level.lower(), level.upper()));
        // admissible mass ≥ (θ/2)·max·|S| = total / 2
        let total: u128 = ints.iter().map(|&v| v as u128).sum();
        let mass_ok = 2 * dp2_admissible_mass(&ints)? >= total;
        dp2.record(level.dp2_guarantee_holds() && windows && mass_ok, || serde_json::json!(ints));
    }

    let mut cs2 = CheckResult::new("CS2 inequality");
    let mut energy = CheckResult::new("energy invariance bound");
    let g = GroupSpec::f2n(10).unwrap();
    let instances = trials.clamp(1, 200);
    for i in 0..instances {
        let size = rng.gen_range(20..=60);
        let b2 = FiniteSet::new(g, index::sample(&mut rng, 1024, size).into_iter().map(|x| Elem(x as i64)))?;
        let rho = [Ratio::new(1, 8), Ratio::new(1, 4), Ratio::new(1, 2), Ratio::from_integer(1)][i as usize % 4];
        let heavy = translate_heavy_set(&b2, rho)?;
        let k = rng.gen_range(1..=heavy.len());
        let b1 = FiniteSet::new(g, index::sample(&mut rng, heavy.len(), k).into_iter().map(|j| heavy.elems()[j]))?;
        let witness = || serde_json::json!({ "b1": set_json(&b1), "b2": set_json(&b2), "rho": rho.to_string() });
        cs2.record(cs2_holds(cs2_lhs(&b1, &b2)?, rho, b1.len(), b2.len()), witness);
        let report = invariance_energy_bound(&b1, &b2, rho)?;
        energy.record(report.hypothesis_ok && report.inequality_holds, witness);
    }
    Ok(SuiteReport { suite: "lemmas".into(), seed, checks: vec![dp1, dp2, cs2, energy] })
}

fn within(v: Ratio<u64>, lower: Ratio<u128>, upper: Ratio<u128>) -> bool {
    let v = Ratio::new(*v.numer() as u128, *v.denom() as u128);
    lower < v && v <= upper
}

/// A small mixed corpus for pipeline checks.
pub fn pipeline_corpus(seed: u64, count: u64) -> Vec<FiniteSet> {
    let mut rng = rng(seed);
    let mut out = vec![
        FiniteSet::new(GroupSpec::Zint, [0, 1, 3].map(Elem)).unwrap(),
        gen_gap(&GapSpec { base: 0, steps: vec![1, 100], lengths: vec![5, 5] }).unwrap().set,
    ];
    for i in 0..count {
        let set = match i % 3 {
            0 => gen_r_plus_h(&RPlusHSpec { n: 12, dh: 4, r: rng.gen_range(2..=12), seed: rng.gen() }).unwrap(),
            1 => {
                let g = random_group(&mut rng, i as usize / 3);
                random_set(&mut rng, g, 40)
            }
            _ => {
                let g = GroupSpec::zmod(rng.gen_range(50..=400)).unwrap();
                random_set(&mut rng, g, 60)
            }
        };
        out.push(set);
    }
    out
}

/// Checks one report against the structural invariants the pipeline promises.
pub fn pipeline_invariants(a: &FiniteSet, report: &PipelineReport) -> Result<Vec<(&'static str, bool)>> {
    let diff = diff_set(a, a)?;
    let subset = report.certificates.iter().all(|c| c.candidate.is_subset(&diff) && c.size == c.candidate.len() as u64);
    let n = a.len() as u64;
    let beta = report.slices.iter().all(|s| {
        s.spread
            .is_none_or(|sp| sp >= n && sp <= report.diff_size && s.beta.is_some_and(|b| b > -1e-9 && b < 1.0 + 1e-9))
    });
    let refinement = report.refinement.as_ref().is_none_or(|r| r.threshold_ok && r.single_bin_ok);
    let best = report
        .certificates
        .iter()
        .filter(|c| c.meets_size_floor)
        .all(|c| c.rank_cmp(&report.chosen) != std::cmp::Ordering::Greater);
    Ok(vec![
        ("every candidate is a subset of A - A", subset),
        ("0 <= beta(t) <= 1 on every measured slice", beta),
        ("T is heavy and spans one dyadic spread bin", refinement),
        ("chosen dominates every candidate above the size floor", best && report.chosen.meets_size_floor),
    ])
}

/// Determinism, subset, β-range, refinement and choice invariants over a corpus.
pub fn suite_pipeline(trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut determinism = CheckResult::new("identical reports (excluding timing) across runs");
    let mut named: Vec<CheckResult> = Vec::new();
    let config = PipelineConfig { seed, slice_cap: 512, ..PipelineConfig::default() };
    for a in pipeline_corpus(seed, trials) {
        let first = run_pipeline(&a, &config)?;
        let second = run_pipeline(&a, &config)?;
        determinism.record(to_json_without_timing(&first)? == to_json_without_timing(&second)?, || set_json(&a));
        for (i, (name, ok)) in pipeline_invariants(&a, &first)?.into_iter().enumerate() {
            if named.len() <= i {
                named.push(CheckResult::new(name));
            }
            named[i].record(ok, || set_json(&a));
        }
    }
    let mut checks = vec![determinism];
    checks.extend(named);
    Ok(SuiteReport { suite: "pipeline".into(), seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_few_trials() {
        assert!(suite_oracle(5, 1).unwrap().passed());
        assert!(suite_lemmas(20, 1).unwrap().passed());
        assert!(suite_pipeline(3, 1).unwrap().passed());
    }

    #[test]
    fn random_sets_respect_bounds() {
        let mut r = rng(9);
        for v in 0..40 {
            let g = random_group(&mut r, v);
            let a = random_set(&mut r, g, 30);
            assert!(!a.is_empty() && a.len() <= 30);
            assert!(a.elems().iter().all(|&e| g.is_valid(e)));
        }
    }
}
