//! Exact comparisons for the inequalities the pipeline asserts.
//!
//! Logarithms cannot be rational, so wherever one enters a guarantee we use a
//! rational *upper* bound on it. Every log sits in a denominator of the
//! guaranteed quantity, so this only ever rounds thresholds down.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest denominator accepted for ε; the threshold check raises to this power.
pub const MAX_EPS_DENOM: u64 = 10_000;

pub fn big(x: impl Into<BigUint>) -> BigUint {
    x.into()
}

fn approx_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 60 {
        return x.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 60;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.log2() + shift as f64
}

/// Rational upper bound on `log2(num / den)` for `num ≥ den ≥ 1`.
///
/// Exact whenever `num / den` is a power of two.
pub fn log2_upper(num: &BigUint, den: &BigUint) -> Ratio<BigUint> {
    assert!(!den.is_zero() && num >= den, "log2_upper needs num >= den >= 1");
    let (q, rem) = num.div_rem(den);
    if rem.is_zero() && (&q & (&q - 1u32)).is_zero() {
        return Ratio::from_integer(BigUint::from(q.bits() - 1));
    }
    let approx = approx_log2(num) - approx_log2(den);
    let padded = approx + 1e-9 * (1.0 + approx.abs());
    let scale = 1u64 << 32;
    let numer = (padded * scale as f64).ceil().max(0.0) as u64;
    Ratio::new(BigUint::from(numer), BigUint::from(scale))
}

/// `E ≥ K^{-exponent}` for `E = quadruples / cube`, `K = k_num / k_den ≥ 1`,
/// `exponent = a/b ∈ [0, 1]`; decided as `Q^b · D^a ≥ C^b · N^a`.
pub fn energy_at_least_k_power(quadruples: u128, cube: u128, k_num: u64, k_den: u64, exponent: Ratio<u64>) -> bool {
    let (a, b) = (*exponent.numer() as u32, *exponent.denom() as u32);
    let lhs = big(quadruples).pow(b) * big(k_num).pow(a);
    let rhs = big(cube).pow(b) * big(k_den).pow(a);
    lhs >= rhs
}

/// `size ≥ K^{-c} · base` for `K = k_num / k_den`.
pub fn size_at_least(size: u64, base: u64, k_num: u64, k_den: u64, c: u32) -> bool {
    big(size) * big(k_num).pow(c) >= big(base) * big(k_den).pow(c)
}

/// Parses `p/q`, an integer, or a finite decimal into a rational in `[0, 1)`.
pub fn parse_eps(text: &str) -> Result<Ratio<u64>> {
    let text = text.trim();
    let bad = || Error::Parse(format!("cannot read epsilon {text:?}"));
    let r = if let Some((p, q)) = text.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ratio::new(p, q)
    } else if let Some((whole, frac)) = text.split_once('.') {
        if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Ratio::new(whole * den + frac, den)
    } else {
        Ratio::from_integer(text.parse().map_err(|_| bad())?)
    };
    check_eps(r)?;
    Ok(r)
}

pub fn check_eps(eps: Ratio<u64>) -> Result<()> {
    if eps >= Ratio::one() {
        return Err(Error::OutOfRange(format!("epsilon {eps} must be below 1")));
    }
    if *eps.denom() > MAX_EPS_DENOM {
        return Err(Error::OutOfRange(format!("epsilon denominator {} exceeds {MAX_EPS_DENOM}", eps.denom())));
    }
    Ok(())
}

pub fn ratio_f64(r: &Ratio<BigUint>) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// `ln(x) / ln(k)`, reported as 0 for the degenerate base `k = 1`.
pub fn log_base(x: f64, k: f64) -> f64 {
    if (k - 1.0).abs() < f64::EPSILON {
        0.0
    } else {
        x.ln() / k.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> Ratio<BigUint> {
        Ratio::new(big(n), big(d))
    }

    #[test]
    fn log2_exact_on_powers_of_two() {
        assert_eq!(log2_upper(&big(4u32), &big(1u32)), r(2, 1));
        assert_eq!(log2_upper(&big(256u32), &big(1u32)), r(8, 1));
        assert_eq!(log2_upper(&big(12u32), &big(3u32)), r(2, 1));
        assert_eq!(log2_upper(&big(5u32), &big(5u32)), r(0, 1));
    }

    #[test]
    fn log2_upper_bounds_from_above() {
        for (n, d) in [(3u64, 1u64), (64, 5), (1_000_003, 7), (u64::MAX, 3)] {
            let ub = ratio_f64(&log2_upper(&big(n), &big(d)));
            let truth = (n as f64).log2() - (d as f64).log2();
            assert!(ub >= truth && ub - truth < 1e-6, "{n}/{d}: {ub} vs {truth}");
        }
        // log2 3 = 1.5849625007...
        assert!(log2_upper(&big(3u32), &big(1u32)) > r(15_849_625_007, 10_000_000_000));
    }

    #[test]
    fn theorem_threshold_for_the_interval_example() {
        // E(A - A) = 231/343, K = 7/3, threshold (7/3)^{-36/37} ≈ 0.438.
        assert!(energy_at_least_k_power(231, 343, 7, 3, Ratio::new(36, 37)));
        // 0.43 sits just below the threshold, 0.44 just above.
        assert!(!energy_at_least_k_power(43, 100, 7, 3, Ratio::new(36, 37)));
        assert!(energy_at_least_k_power(44, 100, 7, 3, Ratio::new(36, 37)));
        assert!(energy_at_least_k_power(1, 1, 1, 1, Ratio::new(36, 37)));
    }

    #[test]
    fn size_floor() {
        // 3 · (3/7)^8 ≈ 0.0035
        assert!(size_at_least(1, 3, 7, 3, 8));
        assert!(!size_at_least(1, 300_000, 7, 3, 8));
    }

    #[test]
    fn eps_parsing() {
        assert_eq!(parse_eps("1/37").unwrap(), Ratio::new(1, 37));
        assert_eq!(parse_eps("0.025").unwrap(), Ratio::new(1, 40));
        assert_eq!(parse_eps("0").unwrap(), Ratio::from_integer(0));
        assert!(parse_eps("1").is_err());
        assert!(parse_eps("1/0").is_err());
        assert!(parse_eps("1/100001").is_err());
        assert!(parse_eps("abc").is_err());
    }
}
