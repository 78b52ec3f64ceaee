use num_rational::Ratio;
use serde::Serialize;

use super::certificate::{certify, CandidateCertificate, CandidateLabel, TheoremScale};
use super::refine::Refinement;
use super::universe::{Stamp, Universe};
use crate::dyadic::{dp2_level_weighted, invariance_from_parts, DyadicLevel, InvarianceBoundReport};
use crate::error::{Error, Result};
use crate::exact::log_base;
use crate::par;
use crate::report::ser_ratio;
use crate::set::{energy_exact, energy_from_table, is_heavy, DiffTable};

#[derive(Debug, Clone, Serialize)]
pub struct LargeBetaSummary {
    /// DP2 level of `N(x) = #{t ∈ T : x ∈ A[t] - A}` over `A - A`.
    pub level: DyadicLevel,
    pub x_size: u64,
    /// `log_K(|A - A| / |X|)`.
    pub alpha: f64,
    /// `min_{x ∈ X} N(x) / |A - A|`.
    #[serde(serialize_with = "ser_ratio")]
    pub rho: Ratio<u64>,
    /// Invariance bound with `B1 = X`, `B2 = A - A`.
    pub invariance: InvarianceBoundReport,
}

pub(crate) fn large_beta_candidate(
    u: &Universe<'_>,
    diff_table: &DiffTable,
    refinement: &Refinement,
    scale: &TheoremScale,
) -> Result<(LargeBetaSummary, CandidateCertificate)> {
    let lists: Vec<Result<Vec<u32>>> = par::map_with(
        &refinement.t_reps,
        || Stamp::new(u.coset_count),
        |stamp, reps| u.difference_cosets(reps, &u.reps, stamp),
    );
    let mut coverage = vec![0u64; u.coset_count];
    for list in lists {
        for c in list? {
            coverage[c as usize] += 1;
        }
    }
    if coverage.iter().all(|&c| c == 0) {
        return Err(Error::Internal("no difference is covered by any slice of T".into()));
    }

    let plen = u.period_len();
    let level = dp2_level_weighted(&coverage, &vec![plen; u.coset_count])?;
    let mut keep = vec![false; u.coset_count];
    for &c in &level.members {
        keep[c] = true;
    }
    let x = u.collect_cosets(&keep);
    let min_cover = level.members.iter().map(|&c| coverage[c]).min().unwrap_or(0);
    let d = u.d();
    let rho = Ratio::new(min_cover, d);

    let x_energy = energy_exact(&x)?;
    let hypothesis_ok = x.elems().iter().all(|&e| is_heavy(diff_table, e, rho));
    let invariance =
        invariance_from_parts(x_energy, x.len(), energy_from_table(diff_table), d as usize, rho, hypothesis_ok);
    let summary = LargeBetaSummary {
        x_size: x.len() as u64,
        alpha: log_base(d as f64 / x.len() as f64, scale.k_f64()),
        level,
        rho,
        invariance,
    };
    let cert = certify(CandidateLabel::XLargeBeta, x, x_energy, u, scale)?;
    Ok((summary, cert))
}
