use num_rational::Ratio;
use rand::seq::index;
use serde::Serialize;

use super::certificate::TheoremScale;
use super::universe::{Stamp, Universe};
use super::PipelineConfig;
use crate::dyadic::{dp1_level, DyadicLevel};
use crate::error::{Error, Result};
use crate::exact::log_base;
use crate::generators::rng;
use crate::group::Elem;
use crate::par;

/// Per-slice statistics for a sampled heavy `t`.
#[derive(Debug, Clone, Serialize)]
pub struct SliceStats {
    #[serde(skip)]
    pub elem: Elem,
    /// `t` in the group's text form.
    pub t: String,
    /// `|A[t]| = r(t)`.
    pub slice_size: u64,
    /// `|A[t] - A|`; `None` when the pair cap skipped the slice.
    pub spread: Option<u64>,
    /// `log_K(spread / |A|)`.
    pub beta: Option<f64>,
    pub in_t: bool,
}

/// The refined slice family `T` with its common spread exponent.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementResult {
    /// Number of `t` with `r(t) ≥ |A| / 2K`.
    pub heavy_count: u64,
    pub sampled_count: u64,
    pub skipped_count: u64,
    pub level: Option<DyadicLevel>,
    #[serde(skip)]
    pub t: Vec<Elem>,
    pub t_size: u64,
    /// `log_K` of the geometric mean of the extreme spreads in `T`, over `|A|`.
    pub beta: Option<f64>,
    pub spread_min: Option<u64>,
    pub spread_max: Option<u64>,
    /// Every `t ∈ T` has `r(t) ≥ |A| / 2K`, checked exactly.
    pub threshold_ok: bool,
    /// `max spread < 2 · min spread` over `T`.
    pub single_bin_ok: bool,
    /// `|T| / |A - A|`, scaled up by the sampling ratio when sampled.
    pub t_fraction: f64,
    /// `K^{-ε}`.
    pub t_target: f64,
    pub t_fraction_meets_target: bool,
    pub t_below_two: bool,
    /// `β ≥ 1/2 + 7ε/4`.
    pub large_case: Option<bool>,
    /// `β < 7/12 - 4ε/3`.
    pub small_case: Option<bool>,
}

pub(crate) struct Refinement {
    pub result: RefinementResult,
    pub slices: Vec<SliceStats>,
    /// Coset representatives of `A[t]` for each `t ∈ T`, aligned with `result.t`.
    pub t_reps: Vec<Vec<Elem>>,
}

/// `r(t) · 2K ≥ |A|`, i.e. `r(t) · 2|A - A| ≥ |A|²`.
pub(crate) fn is_refinement_heavy(r: u64, n: u64, d: u64) -> bool {
    r as u128 * 2 * d as u128 >= n as u128 * n as u128
}

pub(crate) fn first_refinement(u: &Universe<'_>, scale: &TheoremScale, cfg: &PipelineConfig) -> Result<Refinement> {
    let (n, d) = (u.n(), u.d());
    let heavy: Vec<usize> = (0..u.elems().len()).filter(|&i| is_refinement_heavy(u.r_at(i), n, d)).collect();
    let sampled: Vec<usize> = if heavy.len() > cfg.slice_cap {
        let mut picks = index::sample(&mut rng(cfg.seed), heavy.len(), cfg.slice_cap).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|i| heavy[i]).collect()
    } else {
        heavy.clone()
    };

    let plen = u.period_len();
    let rep_count = u.reps.len() as u64;
    let spreads: Vec<Result<(Vec<Elem>, Option<u64>)>> = par::map_with(
        &sampled,
        || Stamp::new(u.coset_count),
        |stamp, &i| {
            let t = u.elems()[i];
            let reps = u.slice_reps(t)?;
            if reps.len() as u64 * plen != u.r_at(i) {
                return Err(Error::Internal(format!("slice size mismatch at t = {}", u.group.format_elem(t))));
            }
            if reps.len() as u64 * rep_count > cfg.pair_cap {
                return Ok((reps, None));
            }
            let spread = u.difference_cosets(&reps, &u.reps, stamp)?.len() as u64 * plen;
            if spread < n || spread > d {
                return Err(Error::Internal(format!("spread {spread} outside [{n}, {d}]")));
            }
            Ok((reps, Some(spread)))
        },
    );

    let k = scale.k_f64();
    let mut slices = Vec::with_capacity(sampled.len());
    let mut all_reps = Vec::with_capacity(sampled.len());
    for (&i, res) in sampled.iter().zip(spreads) {
        let (reps, spread) = res?;
        let t = u.elems()[i];
        slices.push(SliceStats {
            elem: t,
            t: u.group.format_elem(t),
            slice_size: u.r_at(i),
            spread,
            beta: spread.map(|s| log_base(s as f64 / n as f64, k)),
            in_t: false,
        });
        all_reps.push(reps);
    }

    let measured: Vec<usize> = (0..slices.len()).filter(|&j| slices[j].spread.is_some()).collect();
    let skipped_count = (slices.len() - measured.len()) as u64;
    let level = if measured.is_empty() {
        None
    } else {
        let values: Vec<Ratio<u64>> =
            measured.iter().map(|&j| Ratio::from_integer(slices[j].spread.unwrap())).collect();
        Some(dp1_level(&values)?)
    };

    let mut t = Vec::new();
    let mut t_reps = Vec::new();
    if let Some(level) = &level {
        for &m in &level.members {
            let j = measured[m];
            slices[j].in_t = true;
            t.push(slices[j].elem);
            t_reps.push(std::mem::take(&mut all_reps[j]));
        }
    }

    let spreads_in_t: Vec<u64> = slices.iter().filter(|s| s.in_t).filter_map(|s| s.spread).collect();
    let spread_min = spreads_in_t.iter().copied().min();
    let spread_max = spreads_in_t.iter().copied().max();
    let beta = match (spread_min, spread_max) {
        (Some(lo), Some(hi)) => Some(log_base((lo as f64 * hi as f64).sqrt() / n as f64, k)),
        _ => None,
    };
    let threshold_ok = slices.iter().filter(|s| s.in_t).all(|s| is_refinement_heavy(s.slice_size, n, d));
    let single_bin_ok = match (spread_min, spread_max) {
        (Some(lo), Some(hi)) => hi < 2 * lo,
        _ => true,
    };

    let scale_up = if sampled.is_empty() { 0.0 } else { heavy.len() as f64 / sampled.len() as f64 };
    let t_fraction = t.len() as f64 * scale_up / d as f64;
    let eps = *cfg.eps.numer() as f64 / *cfg.eps.denom() as f64;
    let t_target = k.powf(-eps);
    let large_case = beta.map(|b| b >= 0.5 + 1.75 * eps);
    let small_case = beta.map(|b| b < 7.0 / 12.0 - 4.0 / 3.0 * eps);

    let result = RefinementResult {
        heavy_count: heavy.len() as u64,
        sampled_count: sampled.len() as u64,
        skipped_count,
        level,
        t_size: t.len() as u64,
        t_below_two: t.len() < 2,
        t,
        beta,
        spread_min,
        spread_max,
        threshold_ok,
        single_bin_ok,
        t_fraction,
        t_target,
        t_fraction_meets_target: t_fraction >= t_target,
        large_case,
        small_case,
    };
    Ok(Refinement { result, slices, t_reps })
}
