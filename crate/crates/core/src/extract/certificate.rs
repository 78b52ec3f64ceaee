use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::universe::Universe;
use crate::error::{Error, Result};
use crate::exact::{big, energy_at_least_k_power, log_base, size_at_least};
use crate::group::Elem;
use crate::set::{energy_exact, EnergyReport, FiniteSet};

/// Which construction produced a candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateLabel {
    A,
    AMinusA,
    /// The slice `A[t]`, with `t` in the group's text form.
    ASlice(String),
    XLargeBeta,
    XSmallBeta,
}

impl fmt::Display for CandidateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateLabel::A => f.write_str("A"),
            CandidateLabel::AMinusA => f.write_str("A_minus_A"),
            CandidateLabel::ASlice(t) => write!(f, "A_slice({t})"),
            CandidateLabel::XLargeBeta => f.write_str("X_large_beta"),
            CandidateLabel::XSmallBeta => f.write_str("X_small_beta"),
        }
    }
}

impl Serialize for CandidateLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `K`, `ε` and the size floor every candidate is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremScale {
    pub set_size: u64,
    pub diff_size: u64,
    /// `K = |A - A| / |A|` in lowest terms.
    pub k: Ratio<u64>,
    pub eps: Ratio<u64>,
    pub c_max: u32,
}

impl TheoremScale {
    pub fn new(set_size: u64, diff_size: u64, eps: Ratio<u64>, c_max: u32) -> Result<Self> {
        if set_size == 0 || diff_size < set_size {
            return Err(Error::OutOfRange(format!("|A| = {set_size}, |A - A| = {diff_size}")));
        }
        Ok(TheoremScale { set_size, diff_size, k: Ratio::new(diff_size, set_size), eps, c_max })
    }

    pub fn k_f64(&self) -> f64 {
        *self.k.numer() as f64 / *self.k.denom() as f64
    }

    /// `E ≥ K^{-exponent}` for a possibly negative rational exponent.
    pub fn energy_at_least(&self, e: &EnergyReport, exponent: Ratio<i64>) -> bool {
        let (kn, kd) = (*self.k.numer(), *self.k.denom());
        if exponent >= Ratio::zero() {
            let ex = Ratio::new(*exponent.numer() as u64, *exponent.denom() as u64);
            energy_at_least_k_power(e.quadruples, e.cube, kn, kd, ex)
        } else {
            // E ≥ K^{a/b}  ⟺  Q^b · N^a ≥ C^b · D^a
            let (a, b) = ((-*exponent.numer()) as u32, *exponent.denom() as u32);
            big(e.quadruples).pow(b) * big(kd).pow(a) >= big(e.cube).pow(b) * big(kn).pow(a)
        }
    }

    /// `1 - ε`, the exponent of the theorem's energy threshold.
    pub fn theorem_exponent(&self) -> Ratio<i64> {
        Ratio::one() - to_signed(self.eps)
    }

    pub fn meets_theorem(&self, e: &EnergyReport) -> bool {
        self.energy_at_least(e, self.theorem_exponent())
    }

    /// `|S| ≥ max(min(2, |A|), K^{-C}|A|)`.
    pub fn meets_size_floor(&self, size: u64) -> bool {
        size >= self.set_size.min(2) && size_at_least(size, self.set_size, *self.k.numer(), *self.k.denom(), self.c_max)
    }

    pub fn min_size(&self) -> f64 {
        let scaled = self.set_size as f64 * self.k_f64().powi(-(self.c_max as i32));
        scaled.max(self.set_size.min(2) as f64)
    }

    /// `log_K(|A| / size)`.
    pub fn e_size(&self, size: u64) -> f64 {
        log_base(self.set_size as f64 / size as f64, self.k_f64())
    }

    /// `-log_K E`.
    pub fn e_energy(&self, e: &EnergyReport) -> f64 {
        if e.is_one() {
            return 0.0;
        }
        let k = self.k_f64();
        if (k - 1.0).abs() < f64::EPSILON {
            return 0.0;
        }
        ((e.cube as f64).ln() - (e.quadruples as f64).ln()) / k.ln()
    }
}

pub(crate) fn to_signed(r: Ratio<u64>) -> Ratio<i64> {
    Ratio::new(*r.numer() as i64, *r.denom() as i64)
}

/// A candidate `A' ⊆ A - A` with its exact size and energy.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateCertificate {
    pub label: CandidateLabel,
    pub size: u64,
    pub energy: EnergyReport,
    pub e_size: f64,
    pub e_energy: f64,
    /// `E ≥ K^{-(1-ε)}`, decided exactly.
    pub meets_theorem: bool,
    pub meets_size_floor: bool,
    /// Element added to the raw construction to place it inside `A - A`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
    #[serde(skip)]
    pub candidate: FiniteSet,
}

impl CandidateCertificate {
    pub(crate) fn from_parts(
        label: CandidateLabel,
        candidate: FiniteSet,
        energy: EnergyReport,
        scale: &TheoremScale,
    ) -> Self {
        let size = candidate.len() as u64;
        CandidateCertificate {
            label,
            size,
            e_size: scale.e_size(size),
            e_energy: scale.e_energy(&energy),
            meets_theorem: scale.meets_theorem(&energy),
            meets_size_floor: scale.meets_size_floor(size),
            energy,
            offset: None,
            candidate,
        }
    }

    /// Energy first, then size; `Equal` leaves the earlier candidate in front.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        let lhs = big(self.energy.quadruples) * big(other.energy.cube);
        let rhs = big(other.energy.quadruples) * big(self.energy.cube);
        lhs.cmp(&rhs).then(self.size.cmp(&other.size))
    }
}

/// Certifies `candidate` against `diff = A - A`, computing its energy.
pub fn evaluate_candidate(
    label: CandidateLabel,
    candidate: FiniteSet,
    diff: &FiniteSet,
    scale: &TheoremScale,
) -> Result<CandidateCertificate> {
    candidate.require_nonempty()?;
    if !candidate.is_subset(diff) {
        return Err(Error::Internal(format!("candidate {label} is not a subset of A - A")));
    }
    let energy = energy_exact(&candidate)?;
    Ok(CandidateCertificate::from_parts(label, candidate, energy, scale))
}

/// Certifies with an energy computed elsewhere; the subset check runs against `U`.
pub(crate) fn certify(
    label: CandidateLabel,
    candidate: FiniteSet,
    energy: EnergyReport,
    universe: &Universe<'_>,
    scale: &TheoremScale,
) -> Result<CandidateCertificate> {
    candidate.require_nonempty()?;
    if candidate.elems().iter().any(|&x| universe.position(x).is_none()) {
        return Err(Error::Internal(format!("candidate {label} is not a subset of A - A")));
    }
    Ok(CandidateCertificate::from_parts(label, candidate, energy, scale))
}

/// Translates `elems` (sorted, nonempty) by `-min`, which lands any subset of `A` inside `A - A`.
pub(crate) fn shift_into_differences(universe: &Universe<'_>, elems: &[Elem]) -> Result<(FiniteSet, String)> {
    let g = universe.group;
    let base = *elems.first().ok_or(Error::EmptySet)?;
    let shifted = elems.iter().map(|&x| g.sub_valid(x, base)).collect::<Result<Vec<_>>>()?;
    let offset = g.format_elem(g.neg_valid(base)?);
    let set = FiniteSet::new(g, shifted)?;
    Ok((set, offset))
}

/// Index of the best certificate meeting the size floor; earlier wins ties.
pub(crate) fn choose(certs: &[CandidateCertificate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in certs.iter().enumerate() {
        if !c.meets_size_floor {
            continue;
        }
        match best {
            Some(b) if c.rank_cmp(&certs[b]) != Ordering::Greater => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::set::diff_set;

    fn z(v: &[i64]) -> FiniteSet {
        FiniteSet::new(GroupSpec::Zint, v.iter().map(|&x| Elem(x))).unwrap()
    }

    #[test]
    fn interval_difference_set_meets_threshold() {
        let a = z(&[0, 1, 3]);
        let d = diff_set(&a, &a).unwrap();
        let scale = TheoremScale::new(3, 7, Ratio::new(1, 37), 8).unwrap();
        assert_eq!(scale.k, Ratio::new(7, 3));
        let cert = evaluate_candidate(CandidateLabel::AMinusA, d.clone(), &d, &scale).unwrap();
        assert_eq!((cert.energy.quadruples, cert.energy.cube), (231, 343));
        assert!(cert.meets_theorem);
        assert!(cert.meets_size_floor);
        assert!(cert.e_size < 0.0);
    }

    #[test]
    fn singleton_and_coset() {
        let d = z(&[-3, -2, -1, 0, 1, 2, 3]);
        let scale = TheoremScale::new(3, 7, Ratio::new(1, 37), 8).unwrap();
        let single = evaluate_candidate(CandidateLabel::ASlice("1".into()), z(&[1]), &d, &scale).unwrap();
        assert!(single.energy.is_one());
        assert_eq!(single.e_energy, 0.0);
        assert!((single.e_size - 3f64.ln() / (7.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!(!single.meets_size_floor);
        let outside = evaluate_candidate(CandidateLabel::A, z(&[9]), &d, &scale);
        assert!(matches!(outside, Err(Error::Internal(_))));
    }

    #[test]
    fn negative_exponents() {
        let scale = TheoremScale::new(3, 7, Ratio::new(3, 4), 8).unwrap();
        let one = EnergyReport { quadruples: 1, cube: 1 };
        // 1 - 2ε = -1/2: E ≥ K^{1/2} fails for K > 1 even at E = 1.
        assert!(!scale.energy_at_least(&one, Ratio::new(-1, 2)));
        let flat = TheoremScale::new(3, 3, Ratio::new(3, 4), 8).unwrap();
        assert!(flat.energy_at_least(&one, Ratio::new(-1, 2)));
    }

    #[test]
    fn ranking_prefers_energy_then_size_then_order() {
        let scale = TheoremScale::new(3, 7, Ratio::new(1, 37), 8).unwrap();
        let mk = |label, q, s: &[i64]| {
            let set = z(s);
            let energy = EnergyReport::new(q, set.len());
            CandidateCertificate::from_parts(label, set, energy, &scale)
        };
        let certs = vec![
            mk(CandidateLabel::AMinusA, 231, &[-3, -2, -1, 0, 1, 2, 3]),
            mk(CandidateLabel::A, 15, &[0, 1, 3]),
            mk(CandidateLabel::ASlice("1".into()), 1, &[1]),
            mk(CandidateLabel::XLargeBeta, 6, &[0, 1]),
            mk(CandidateLabel::XSmallBeta, 6, &[0, 2]),
        ];
        // The singleton is below the floor; {0,1} and {0,2} tie and the earlier one wins.
        assert_eq!(choose(&certs), Some(3));
        assert_eq!(choose(&certs[..3]), Some(0));
    }
}
