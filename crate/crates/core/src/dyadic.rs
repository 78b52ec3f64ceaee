//! Dyadic pigeonholing and the energy-invariance bound.
//!
//! Level `j` of a value map `f` with maximum `M` is
//! `{s : M / 2^{j+1} < f(s) ≤ M / 2^j}`. [`dp1_level`] picks the level with
//! the most members, [`dp2_level`] the admissible level carrying the most mass;
//! both break ties toward the smaller index.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{CheckedAdd, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{big, log2_upper, ratio_f64};
use crate::report::{ser_big_ratio, ser_ratio};
use crate::set::{energy_from_table, is_heavy, DiffTable, EnergyReport, FiniteSet};

/// A selected pigeonhole level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicLevel {
    pub index: u32,
    /// The maximum `‖f‖∞` of the whole map.
    #[serde(serialize_with = "ser_ratio")]
    pub max: Ratio<u64>,
    /// Positions (into the input slice) of the level's members, ascending.
    #[serde(skip)]
    pub members: Vec<usize>,
    pub member_count: usize,
    /// `Σ f` over the members; `None` if the exact sum overflows.
    #[serde(serialize_with = "ser_opt_ratio_u128")]
    pub mass: Option<Ratio<u128>>,
    /// `min/max` for DP1, `mean/max` for DP2.
    #[serde(serialize_with = "ser_ratio_u128")]
    pub theta: Ratio<u128>,
    pub domain_size: usize,
}

fn ser_opt_ratio_u128<S: serde::Serializer>(r: &Option<Ratio<u128>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_ratio_u128(r, s),
        None => s.serialize_none(),
    }
}

fn ser_ratio_u128<S: serde::Serializer>(r: &Ratio<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    ser_big_ratio(&Ratio::new_raw(big(*r.numer()), big(*r.denom())), s)
}

impl DyadicLevel {
    /// Exclusive lower bound `max / 2^{index+1}`.
    pub fn lower(&self) -> Ratio<u128> {
        Ratio::new(*self.max.numer() as u128, (*self.max.denom() as u128) << (self.index + 1))
    }

    /// Inclusive upper bound `max / 2^index`.
    pub fn upper(&self) -> Ratio<u128> {
        Ratio::new(*self.max.numer() as u128, (*self.max.denom() as u128) << self.index)
    }

    /// `|members| ≥ |S| / (1 - log2 θ)` and `2^index ≤ 1/θ`.
    pub fn dp1_guarantee_holds(&self) -> bool {
        let (tn, td) = (big(*self.theta.numer()), big(*self.theta.denom()));
        if big(1u32) << self.index as usize > Ratio::new(td.clone(), tn.clone()).to_integer() {
            return false;
        }
        // 1 - log2 θ = 1 + log2(1/θ), bounded above.
        let l = log2_upper(&td, &tn);
        let one_plus = Ratio::from_integer(big(1u32)) + l;
        Ratio::from_integer(big(self.member_count)) * one_plus >= Ratio::from_integer(big(self.domain_size))
    }

    /// `index ≤ log2(2/θ)` and `|members| ≥ 2^{index-1} θ / log2(4/θ) · |S|`.
    pub fn dp2_guarantee_holds(&self) -> bool {
        let (tn, td) = (big(*self.theta.numer()), big(*self.theta.denom()));
        // 2^index ≤ 2/θ  ⟺  2^index · tn ≤ 2 · td
        if (big(1u32) << self.index as usize) * &tn > big(2u32) * &td {
            return false;
        }
        let l = log2_upper(&(big(4u32) * &td), &tn);
        // |members| · L ≥ 2^index · θ · |S| / 2
        let lhs = Ratio::from_integer(big(self.member_count)) * l * big(2u32);
        let rhs = Ratio::new(big(self.domain_size) * (big(1u32) << self.index as usize) * tn, td);
        lhs >= rhs
    }
}

/// Dyadic level of `value` relative to `max`: the `j` with `max/2^{j+1} < value ≤ max/2^j`.
fn level_of(value: Ratio<u64>, max: Ratio<u64>) -> u32 {
    // value / max = a / b ≤ 1; want the largest j with a · 2^j ≤ b.
    let a = *value.numer() as u128 * *max.denom() as u128;
    let b = *max.numer() as u128 * *value.denom() as u128;
    debug_assert!(a > 0 && a <= b);
    let j = a.leading_zeros() - b.leading_zeros();
    if (a << j) > b {
        j - 1
    } else {
        j
    }
}

fn sum_u128(values: impl Iterator<Item = (Ratio<u64>, u64)>) -> Result<Ratio<u128>> {
    let mut acc = Ratio::<u128>::zero();
    for (v, w) in values {
        let term = Ratio::new(*v.numer() as u128 * w as u128, *v.denom() as u128);
        acc = acc.checked_add(&term).ok_or_else(|| Error::OutOfRange("dyadic mass overflows u128".into()))?;
    }
    Ok(acc)
}

/// DP1: strictly positive values; returns the level with the most members.
pub fn dp1_level(values: &[Ratio<u64>]) -> Result<DyadicLevel> {
    dp1_level_weighted(values, &vec![1; values.len()])
}

/// DP1 over a multiset: entry `i` occurs `weights[i]` times.
pub fn dp1_level_weighted(values: &[Ratio<u64>], weights: &[u64]) -> Result<DyadicLevel> {
    check_weights(values.len(), weights)?;
    if values.iter().any(|v| v.numer().is_zero()) {
        return Err(Error::DyadicInput("strictly positive values"));
    }
    let max = *values.iter().max().unwrap();
    let min = *values.iter().min().unwrap();
    let levels: Vec<u32> = values.iter().map(|&v| level_of(v, max)).collect();
    let top = *levels.iter().max().unwrap() as usize;
    let mut sizes = vec![0u128; top + 1];
    for (&j, &w) in levels.iter().zip(weights) {
        sizes[j as usize] += w as u128;
    }
    let best = (0..=top).max_by(|&x, &y| sizes[x].cmp(&sizes[y]).then(y.cmp(&x))).unwrap() as u32;
    let members: Vec<usize> = (0..values.len()).filter(|&i| levels[i] == best).collect();
    let mass = sum_u128(members.iter().map(|&i| (values[i], weights[i]))).ok();
    let theta = Ratio::new(*min.numer() as u128 * *max.denom() as u128, *max.numer() as u128 * *min.denom() as u128);
    Ok(DyadicLevel {
        index: best,
        max,
        member_count: sizes[best as usize] as usize,
        members,
        mass,
        theta,
        domain_size: weights.iter().map(|&w| w as usize).sum(),
    })
}

fn check_weights(len: usize, weights: &[u64]) -> Result<()> {
    if len == 0 {
        return Err(Error::DyadicInput("a nonempty domain"));
    }
    if weights.len() != len || weights.contains(&0) {
        return Err(Error::DyadicInput("one positive weight per value"));
    }
    Ok(())
}

/// DP2: nonnegative integer values, not all zero; among indices
/// `≤ ⌊log2(2/θ)⌋` returns the level of largest mass.
pub fn dp2_level(values: &[u64]) -> Result<DyadicLevel> {
    dp2_level_weighted(values, &vec![1; values.len()])
}

/// DP2 over a multiset: entry `i` occurs `weights[i]` times.
pub fn dp2_level_weighted(values: &[u64], weights: &[u64]) -> Result<DyadicLevel> {
    check_weights(values.len(), weights)?;
    let max = *values.iter().max().unwrap();
    if max == 0 {
        return Err(Error::DyadicInput("a value map that is not identically zero"));
    }
    let count: u128 = weights.iter().map(|&w| w as u128).sum();
    let total: u128 = values.iter().zip(weights).map(|(&v, &w)| v as u128 * w as u128).sum();
    let theta = Ratio::new(total, count * max as u128);
    // largest k with 2^k ≤ 2/θ = 2·|S|·max / total
    let cap_num = 2 * count * max as u128;
    let mut kmax = 0u32;
    while kmax < 126 && total.checked_shl(kmax + 1).is_some_and(|x| x >> (kmax + 1) == total && x <= cap_num) {
        kmax += 1;
    }
    let maxr = Ratio::from_integer(max);
    let mut masses = vec![0u128; kmax as usize + 1];
    let mut sizes = vec![0u128; kmax as usize + 1];
    let mut levels = vec![u32::MAX; values.len()];
    for (i, (&v, &w)) in values.iter().zip(weights).enumerate() {
        if v == 0 {
            continue;
        }
        let j = level_of(Ratio::from_integer(v), maxr);
        levels[i] = j;
        if j <= kmax {
            masses[j as usize] += v as u128 * w as u128;
            sizes[j as usize] += w as u128;
        }
    }
    let best = (0..=kmax as usize).max_by(|&x, &y| masses[x].cmp(&masses[y]).then(y.cmp(&x))).unwrap() as u32;
    let members: Vec<usize> = (0..values.len()).filter(|&i| levels[i] == best).collect();
    Ok(DyadicLevel {
        index: best,
        max: maxr,
        member_count: sizes[best as usize] as usize,
        members,
        mass: Some(Ratio::from_integer(masses[best as usize])),
        theta,
        domain_size: count as usize,
    })
}

/// Total mass over all admissible DP2 indices (`≤ ⌊log2(2/θ)⌋`).
pub fn dp2_admissible_mass(values: &[u64]) -> Result<u128> {
    let level = dp2_level(values)?;
    let (tn, td) = (*level.theta.numer(), *level.theta.denom());
    let max = *level.max.numer();
    Ok(values
        .iter()
        .filter(|&&v| v > 0)
        .filter(|&&v| {
            let j = level_of(Ratio::from_integer(v), Ratio::from_integer(max));
            (1u128 << j.min(127)) * tn <= 2 * td
        })
        .map(|&v| v as u128)
        .sum())
}

/// Outcome of checking the energy-invariance bound for one `(B1, B2, ρ)`.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceBoundReport {
    #[serde(serialize_with = "ser_ratio")]
    pub rho: Ratio<u64>,
    /// Upper bound on `L = log2(4/ρ²)`.
    #[serde(serialize_with = "ser_big_ratio")]
    pub log_term: Ratio<BigUint>,
    /// `ρ⁴ / (16 L²) · |B1| / (|B2| · E(B2))`.
    pub bound: f64,
    /// `E(B1)`.
    pub actual: f64,
    pub b1_size: usize,
    pub b2_size: usize,
    pub b1_energy: EnergyReport,
    pub b2_energy: EnergyReport,
    /// `B1 ⊆ {z : |(z + B2) ∩ B2| ≥ ρ|B2|}`.
    pub hypothesis_ok: bool,
    /// `E(B1) · E(B2) · |B2| ≥ ρ⁴|B1| / (16 L²)`, decided exactly.
    pub inequality_holds: bool,
}

impl InvarianceBoundReport {
    /// The guarantee: when the hypothesis holds, the inequality must too.
    pub fn consistent(&self) -> bool {
        !self.hypothesis_ok || self.inequality_holds
    }
}

fn check_rho(rho: Ratio<u64>) -> Result<()> {
    if rho.numer().is_zero() || rho > Ratio::from_integer(1) {
        return Err(Error::OutOfRange(format!("rho = {rho} must lie in (0, 1]")));
    }
    Ok(())
}

/// Checks the invariance bound for explicit sets. A violated hypothesis is
/// reported in the result, not raised.
pub fn invariance_energy_bound(b1: &FiniteSet, b2: &FiniteSet, rho: Ratio<u64>) -> Result<InvarianceBoundReport> {
    check_rho(rho)?;
    b1.require_nonempty()?;
    if b1.group() != b2.group() {
        return Err(Error::GroupMismatch(b1.group(), b2.group()));
    }
    let t1 = DiffTable::build(b1)?;
    let t2 = DiffTable::build(b2)?;
    let hypothesis_ok = b1.elems().iter().all(|&z| is_heavy(&t2, z, rho));
    Ok(invariance_from_parts(energy_from_table(&t1), b1.len(), energy_from_table(&t2), b2.len(), rho, hypothesis_ok))
}

/// Same check from precomputed energies and a hypothesis verdict.
pub fn invariance_from_parts(
    b1_energy: EnergyReport,
    b1_size: usize,
    b2_energy: EnergyReport,
    b2_size: usize,
    rho: Ratio<u64>,
    hypothesis_ok: bool,
) -> InvarianceBoundReport {
    let (a, b) = (big(*rho.numer()), big(*rho.denom()));
    // L = log2(4/ρ²) = log2(4b² / a²)
    let log_term = log2_upper(&(big(4u32) * &b * &b), &(&a * &a));
    let (ln, ld) = (log_term.numer().clone(), log_term.denom().clone());
    // Multiply E1·E2·|B2| ≥ ρ⁴|B1|/(16L²) through by C1·C2·b⁴·16·ln²:
    //   16 · ln² · Q1 · Q2 · |B2| · b⁴ ≥ a⁴ · |B1| · C1 · C2 · ld²
    let lhs = big(16u32) * &ln * &ln * big(b1_energy.quadruples) * big(b2_energy.quadruples) * big(b2_size) * b.pow(4);
    let rhs = a.pow(4) * big(b1_size) * big(b1_energy.cube) * big(b2_energy.cube) * &ld * &ld;
    let rho_f = *rho.numer() as f64 / *rho.denom() as f64;
    let l = ratio_f64(&log_term);
    let bound = rho_f.powi(4) / (16.0 * l * l) * b1_size as f64 / (b2_size as f64 * b2_energy.value());
    InvarianceBoundReport {
        rho,
        log_term,
        bound,
        actual: b1_energy.value(),
        b1_size,
        b2_size,
        b1_energy,
        b2_energy,
        hypothesis_ok,
        inequality_holds: lhs >= rhs,
    }
}

/// `Σ_{b, b' ∈ B1} |(b + B2) ∩ (b' + B2) ∩ B2|`, computed as `Σ_{x ∈ B2} c(x)²`
/// with `c(x) = #{b ∈ B1 : x - b ∈ B2}`.
pub fn cs2_lhs(b1: &FiniteSet, b2: &FiniteSet) -> Result<u128> {
    let g = b1.group();
    let mut total = 0u128;
    for &x in b2.elems() {
        let mut c = 0u128;
        for &b in b1.elems() {
            match g.sub_valid(x, b) {
                Ok(y) if b2.contains(y) => c += 1,
                Ok(_) | Err(Error::Overflow) => {}
                Err(e) => return Err(e),
            }
        }
        total += c * c;
    }
    Ok(total)
}

/// `LHS ≥ ρ² |B1|² |B2|`.
pub fn cs2_holds(lhs: u128, rho: Ratio<u64>, b1_size: usize, b2_size: usize) -> bool {
    let (a, b) = (big(*rho.numer()), big(*rho.denom()));
    big(lhs) * b.pow(2) >= a.pow(2) * big(b1_size).pow(2) * big(b2_size)
}

pub(crate) fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Elem, GroupSpec};

    fn ints(v: &[u64]) -> Vec<Ratio<u64>> {
        v.iter().map(|&x| Ratio::from_integer(x)).collect()
    }

    #[test]
    fn level_boundaries() {
        let m = Ratio::from_integer(8);
        assert_eq!(level_of(Ratio::from_integer(8), m), 0);
        assert_eq!(level_of(Ratio::from_integer(5), m), 0);
        assert_eq!(level_of(Ratio::from_integer(4), m), 1);
        assert_eq!(level_of(Ratio::from_integer(1), m), 3);
        assert_eq!(level_of(Ratio::new(1, 3), m), 4);
        assert_eq!(level_of(Ratio::new(7, 3), Ratio::new(7, 3)), 0);
    }

    #[test]
    fn dp1_examples() {
        let l = dp1_level(&ints(&[6, 6, 6])).unwrap();
        assert_eq!((l.index, l.members.clone()), (0, vec![0, 1, 2]));
        let l = dp1_level(&ints(&[8, 8, 5, 1])).unwrap();
        assert_eq!((l.index, l.members.clone()), (0, vec![0, 1, 2]));
        assert_eq!(l.theta, Ratio::new(1, 8));
        assert!(l.dp1_guarantee_holds());
        let l = dp1_level(&ints(&[4, 4, 2, 2])).unwrap();
        assert_eq!((l.index, l.member_count), (0, 2));
        assert!(l.dp1_guarantee_holds());
    }

    #[test]
    fn dp1_errors() {
        assert!(dp1_level(&[]).is_err());
        assert!(dp1_level(&ints(&[3, 0])).is_err());
    }

    #[test]
    fn dp2_examples() {
        let l = dp2_level(&[5, 5, 5]).unwrap();
        assert_eq!((l.index, l.member_count), (0, 3));
        assert_eq!(l.theta, Ratio::from_integer(1));
        let l = dp2_level(&[8, 1, 1, 0]).unwrap();
        assert_eq!(l.theta, Ratio::new(5, 16));
        assert_eq!((l.index, l.members.clone()), (0, vec![0]));
        assert_eq!(l.mass, Some(Ratio::from_integer(8)));
        assert!(l.dp2_guarantee_holds());
        let l = dp2_level(&[4, 4, 0, 0]).unwrap();
        assert_eq!(l.theta, Ratio::new(1, 2));
        assert_eq!((l.index, l.member_count), (0, 2));
        assert!(l.dp2_guarantee_holds());
        assert!(dp2_level(&[0, 0]).is_err());
        assert!(dp2_level(&[]).is_err());
    }

    #[test]
    fn dp2_excludes_inadmissible_levels() {
        // θ = 104/2624, so k ≤ 5; the 1s sit at level 6 and must not be chosen.
        let mut v = vec![1u64; 40];
        v.push(64);
        let l = dp2_level(&v).unwrap();
        assert_eq!(l.index, 0);
        assert!(l.dp2_guarantee_holds());
        assert!((1u128 << l.index) * *l.theta.numer() <= 2 * *l.theta.denom());
    }

    #[test]
    fn dp2_total_mass_lower_bound() {
        let v = [8u64, 1, 1, 0];
        // (θ/2)·max·|S| = (5/32)·8·4 = 5
        assert!(dp2_admissible_mass(&v).unwrap() >= 5);
    }

    #[test]
    fn invariance_examples() {
        let g = GroupSpec::f2n(6).unwrap();
        let h = FiniteSet::new(g, (0..8).map(Elem)).unwrap();
        let r = invariance_energy_bound(&h, &h, Ratio::from_integer(1)).unwrap();
        assert!(r.hypothesis_ok && r.inequality_holds);
        assert_eq!(r.log_term, Ratio::from_integer(big(2u32)));
        assert!((r.bound - 1.0 / 64.0).abs() < 1e-15);
        assert_eq!(r.actual, 1.0);

        let b2 = FiniteSet::new(g, [Elem(1), Elem(6), Elem(13), Elem(40), Elem(41)]).unwrap();
        let id = FiniteSet::new(g, [Elem(0)]).unwrap();
        let r = invariance_energy_bound(&id, &b2, Ratio::from_integer(1)).unwrap();
        assert!(r.hypothesis_ok && r.inequality_holds && r.actual == 1.0);
    }

    #[test]
    fn invariance_reports_violated_hypothesis() {
        let z = |v: &[i64]| FiniteSet::new(GroupSpec::Zint, v.iter().map(|&x| Elem(x))).unwrap();
        let r = invariance_energy_bound(&z(&[0, 1]), &z(&[0, 1, 3]), Ratio::new(2, 3)).unwrap();
        assert!(!r.hypothesis_ok);
        assert!(r.consistent());
        assert!(invariance_energy_bound(&z(&[0]), &z(&[0, 1]), Ratio::new(0, 1)).is_err());
    }

    #[test]
    fn cs2_on_subgroup() {
        let g = GroupSpec::f2n(5).unwrap();
        let h = FiniteSet::new(g, (0..4).map(Elem)).unwrap();
        // every translate by an element of H is H itself: Σ = |H|² · |H|
        assert_eq!(cs2_lhs(&h, &h).unwrap(), 64);
        assert!(cs2_holds(64, Ratio::from_integer(1), 4, 4));
    }
}
