use num_rational::Ratio;
use serde::Serialize;

use super::certificate::{certify, shift_into_differences, CandidateCertificate, CandidateLabel, TheoremScale};
use super::refine::Refinement;
use super::universe::Universe;
use super::PipelineConfig;
use crate::dyadic::{
    dp1_level, dp1_level_weighted, dp2_level_weighted, invariance_from_parts, DyadicLevel, InvarianceBoundReport,
};
use crate::error::{Error, Result};
use crate::exact::log_base;
use crate::group::Elem;
use crate::par;
use crate::report::ser_ratio;
use crate::set::{energy_exact, energy_from_table, is_heavy, DiffTable, EnergyReport};

#[derive(Debug, Clone, Serialize)]
pub struct SmallSliceStats {
    pub t: String,
    pub slice_size: u64,
    /// Pair enumeration exceeded the pair cap.
    pub skipped: bool,
    /// `|G₁(t)|`, pairs in the DP2 level of `(a, a') ↦ r_A(a - a')`.
    pub g1_size: Option<u64>,
    /// `log_K(|A[t]|² / |G₁(t)|)`.
    pub alpha_t: Option<f64>,
    pub in_t_prime: bool,
    /// `|G'(t)|`, pairs of `G₁(t)` whose difference is popular inside the slice.
    pub g_prime_size: Option<u64>,
    /// `|G(t)|`.
    pub g_size: Option<u64>,
    /// `|-(G(t))|`, distinct differences over `G(t)`.
    pub diff_count: Option<u64>,
    /// `log_K(|A[t]| / c)` for `c` the top of the DP1 level of within-slice counts.
    pub gamma_t: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallBetaX {
    /// DP2 level of `g(x) = #{t ∈ T' : x ∈ -(G(t))}` over `X'`.
    pub level: DyadicLevel,
    pub x_prime_size: u64,
    pub x_size: u64,
    /// `log_K(|A - A| / c)` for `c` the top of the level.
    pub eta: f64,
    /// `min_{x ∈ X} g(x) / |A - A|`.
    #[serde(serialize_with = "ser_ratio")]
    pub rho_diff: Ratio<u64>,
    /// Invariance bound with `B1 = X`, `B2 = A - A`.
    pub invariance_diff: InvarianceBoundReport,
    /// `min_{x ∈ X} r_A(x) / |A|`.
    #[serde(serialize_with = "ser_ratio")]
    pub rho_set: Ratio<u64>,
    /// Invariance bound with `B1 = X`, `B2 = A`.
    pub invariance_set: InvarianceBoundReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallBetaSummary {
    pub processed: u64,
    pub skipped: u64,
    /// DP1 level of `|G₁(t)| / |A[t]|²` over the processed slices.
    pub alpha_level: Option<DyadicLevel>,
    pub alpha: Option<f64>,
    pub t_prime_size: u64,
    pub slices: Vec<SmallSliceStats>,
    pub x: Option<SmallBetaX>,
}

pub(crate) struct SmallBetaOutput {
    pub summary: SmallBetaSummary,
    pub slice_certificates: Vec<CandidateCertificate>,
    pub x_certificate: Option<CandidateCertificate>,
}

/// Differences inside one slice, grouped by `P`-coset: every pair `(a, a')`
/// of coset representatives of `A[t]` contributes to the coset of `a - a'`.
struct SliceProfile {
    cosets: Vec<u32>,
    /// Representative pairs per coset.
    pairs: Vec<u64>,
    /// `r_A` on the coset.
    value: Vec<u64>,
}

/// First-pass result for one slice: `(|G1|, α_t, |G1| / |A[t]|²)`.
type FirstPass = (u64, f64, Ratio<u64>);

fn profile(u: &Universe<'_>, reps: &[Elem], scratch: &mut [u32]) -> Result<SliceProfile> {
    let mut cosets = Vec::new();
    let mut pairs: Vec<u64> = Vec::new();
    let mut value = Vec::new();
    for &a in reps {
        for &b in reps {
            let pos = u.diff_position(a, b)?;
            let c = u.coset[pos];
            let slot = &mut scratch[c as usize];
            if *slot == u32::MAX {
                *slot = cosets.len() as u32;
                cosets.push(c);
                pairs.push(0);
                value.push(u.r_at(pos));
            }
            pairs[*slot as usize] += 1;
        }
    }
    for &c in &cosets {
        scratch[c as usize] = u32::MAX;
    }
    Ok(SliceProfile { cosets, pairs, value })
}

/// `G₁(t)`: the DP2 level of pair values, weighted by pair multiplicity.
fn g1_level(p: &SliceProfile, plen: u64) -> Result<DyadicLevel> {
    let weights: Vec<u64> = p.pairs.iter().map(|&k| k * plen * plen).collect();
    dp2_level_weighted(&p.value, &weights)
}

struct SecondPass {
    g_prime_size: u64,
    g_size: u64,
    gamma_t: f64,
    minus_g: Vec<u32>,
    energy: EnergyReport,
}

fn second_pass(u: &Universe<'_>, p: &SliceProfile, slice_size: u64, scale: &TheoremScale) -> Result<SecondPass> {
    let plen = u.period_len();
    let g1 = g1_level(p, plen)?;
    let g1_size = g1.member_count as u64;
    let minus_g1 = g1.members.len() as u64 * plen;
    // c(x) = |(A[t])[x]| = |P| · (representative pairs in the coset of x)
    let quadruples: u128 = p.pairs.iter().map(|&k| (k as u128).pow(2)).sum::<u128>() * (plen as u128).pow(3);
    let energy = EnergyReport::new(quadruples, slice_size as usize);

    let g_prime: Vec<usize> = g1
        .members
        .iter()
        .copied()
        .filter(|&i| p.pairs[i] as u128 * plen as u128 * 2 * minus_g1 as u128 >= g1_size as u128)
        .collect();
    if g_prime.is_empty() {
        return Err(Error::Internal("popular-difference refinement came out empty".into()));
    }
    let g_prime_size: u64 = g_prime.iter().map(|&i| p.pairs[i] * plen * plen).sum();
    let values: Vec<Ratio<u64>> = g_prime.iter().map(|&i| Ratio::from_integer(p.pairs[i] * plen)).collect();
    let weights: Vec<u64> = g_prime.iter().map(|&i| p.pairs[i] * plen * plen).collect();
    let level = dp1_level_weighted(&values, &weights)?;
    let top = crate::dyadic::ratio_to_f64(&level.upper());
    Ok(SecondPass {
        g_prime_size,
        g_size: level.member_count as u64,
        gamma_t: log_base(slice_size as f64 / top, scale.k_f64()),
        minus_g: level.members.iter().map(|&m| p.cosets[g_prime[m]]).collect(),
        energy,
    })
}

pub(crate) fn small_beta_chain(
    u: &Universe<'_>,
    diff_table: &DiffTable,
    refinement: &Refinement,
    scale: &TheoremScale,
    cfg: &PipelineConfig,
) -> Result<SmallBetaOutput> {
    let plen = u.period_len();
    let t = &refinement.result.t;
    let reps = &refinement.t_reps;
    let positions: Vec<usize> = (0..t.len()).collect();

    let first: Vec<Result<Option<FirstPass>>> = par::map_with(
        &positions,
        || vec![u32::MAX; u.coset_count],
        |scratch, &j| {
            let m = reps[j].len() as u64;
            if m * m > cfg.pair_cap {
                return Ok(None);
            }
            let p = profile(u, &reps[j], scratch)?;
            let g1 = g1_level(&p, plen)?;
            let s = m * plen;
            let g1_size = g1.member_count as u64;
            let alpha_t = log_base((s * s) as f64 / g1_size as f64, scale.k_f64());
            Ok(Some((g1_size, alpha_t, Ratio::new(g1_size, s * s))))
        },
    );

    let mut slices = Vec::with_capacity(t.len());
    let mut processed = Vec::new();
    let mut ratios = Vec::new();
    for (j, res) in first.into_iter().enumerate() {
        let res = res?;
        let slice_size = reps[j].len() as u64 * plen;
        if let Some((_, _, ratio)) = res {
            processed.push(j);
            ratios.push(ratio);
        }
        slices.push(SmallSliceStats {
            t: u.group.format_elem(t[j]),
            slice_size,
            skipped: res.is_none(),
            g1_size: res.map(|r| r.0),
            alpha_t: res.map(|r| r.1),
            in_t_prime: false,
            g_prime_size: None,
            g_size: None,
            diff_count: None,
            gamma_t: None,
        });
    }
    let skipped = (t.len() - processed.len()) as u64;

    let mut summary = SmallBetaSummary {
        processed: processed.len() as u64,
        skipped,
        alpha_level: None,
        alpha: None,
        t_prime_size: 0,
        slices,
        x: None,
    };
    if processed.is_empty() {
        return Ok(SmallBetaOutput { summary, slice_certificates: Vec::new(), x_certificate: None });
    }

    let alpha_level = dp1_level(&ratios)?;
    let t_prime: Vec<usize> = alpha_level.members.iter().map(|&m| processed[m]).collect();
    summary.alpha = Some(log_base(1.0 / crate::dyadic::ratio_to_f64(&alpha_level.upper()), scale.k_f64()));
    summary.alpha_level = Some(alpha_level);
    summary.t_prime_size = t_prime.len() as u64;

    let second: Vec<Result<SecondPass>> = par::map_with(
        &t_prime,
        || vec![u32::MAX; u.coset_count],
        |scratch, &j| {
            let p = profile(u, &reps[j], scratch)?;
            second_pass(u, &p, reps[j].len() as u64 * plen, scale)
        },
    );

    let mut slice_certificates = Vec::with_capacity(t_prime.len());
    let mut g = vec![0u64; u.coset_count];
    for (&j, res) in t_prime.iter().zip(second) {
        let pass = res?;
        for &c in &pass.minus_g {
            g[c as usize] += 1;
        }
        let stats = &mut summary.slices[j];
        stats.in_t_prime = true;
        stats.g_prime_size = Some(pass.g_prime_size);
        stats.g_size = Some(pass.g_size);
        stats.diff_count = Some(pass.minus_g.len() as u64 * plen);
        stats.gamma_t = Some(pass.gamma_t);

        let elems = u.expand(&reps[j])?;
        let (candidate, offset) = shift_into_differences(u, &elems)?;
        let label = CandidateLabel::ASlice(u.group.format_elem(t[j]));
        let mut cert = certify(label, candidate, pass.energy, u, scale)?;
        cert.offset = Some(offset);
        slice_certificates.push(cert);
    }

    let x_prime: Vec<usize> = (0..u.coset_count).filter(|&c| g[c] > 0).collect();
    let values: Vec<u64> = x_prime.iter().map(|&c| g[c]).collect();
    let level = dp2_level_weighted(&values, &vec![plen; values.len()])?;
    let mut keep = vec![false; u.coset_count];
    for &m in &level.members {
        keep[x_prime[m]] = true;
    }
    let x = u.collect_cosets(&keep);
    let d = u.d();
    let min_g = level.members.iter().map(|&m| values[m]).min().unwrap_or(0);
    let rho_diff = Ratio::new(min_g, d);
    let min_r = x
        .elems()
        .iter()
        .map(|&e| u.position(e).map(|i| u.r_at(i)))
        .min()
        .flatten()
        .ok_or_else(|| Error::Internal("empty small-beta X".into()))?;
    let rho_set = Ratio::new(min_r, u.n());

    let x_energy = energy_exact(&x)?;
    let hyp_diff = x.elems().iter().all(|&e| is_heavy(diff_table, e, rho_diff));
    let hyp_set = x.elems().iter().all(|&e| is_heavy(&u.table, e, rho_set));
    let invariance_diff =
        invariance_from_parts(x_energy, x.len(), energy_from_table(diff_table), d as usize, rho_diff, hyp_diff);
    let invariance_set =
        invariance_from_parts(x_energy, x.len(), energy_from_table(&u.table), u.n() as usize, rho_set, hyp_set);
    let top = crate::dyadic::ratio_to_f64(&level.upper());
    summary.x = Some(SmallBetaX {
        x_prime_size: x_prime.len() as u64 * plen,
        x_size: x.len() as u64,
        eta: log_base(d as f64 / top, scale.k_f64()),
        level,
        rho_diff,
        invariance_diff,
        rho_set,
        invariance_set,
    });
    let x_certificate = Some(certify(CandidateLabel::XSmallBeta, x, x_energy, u, scale)?);
    Ok(SmallBetaOutput { summary, slice_certificates, x_certificate })
}
