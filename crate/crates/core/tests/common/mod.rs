//! Brute-force references written independently of the library's arithmetic.
#![allow(dead_code)]

use std::collections::HashMap;

use addcomb::{Elem, FiniteSet, GroupSpec};
use num_bigint::BigUint;

/// `a - b` as a plain integer key, computed from the group definition.
pub fn sub(g: GroupSpec, a: Elem, b: Elem) -> i128 {
    let (a, b) = (a.0 as i128, b.0 as i128);
    match g {
        GroupSpec::F2n { .. } => a ^ b,
        GroupSpec::Zmod { m } => (a - b).rem_euclid(m as i128),
        GroupSpec::Zint => a - b,
        GroupSpec::Fpn { p, n } => {
            let p = p as i128;
            let (mut x, mut y, mut out, mut w) = (a, b, 0i128, 1i128);
            for _ in 0..n {
                out += (x % p - y % p).rem_euclid(p) * w;
                x /= p;
                y /= p;
                w *= p;
            }
            out
        }
    }
}

/// Representation counts `r(t)` by enumerating ordered pairs.
pub fn rep_counts(a: &FiniteSet) -> HashMap<i128, u64> {
    let g = a.group();
    let mut r = HashMap::new();
    for &x in a.elems() {
        for &y in a.elems() {
            *r.entry(sub(g, x, y)).or_insert(0) += 1;
        }
    }
    r
}

/// `(Q, |A|³)` with `Q = Σ r(t)²`.
pub fn energy(a: &FiniteSet) -> (u128, u128) {
    let q = rep_counts(a).values().map(|&c| (c as u128).pow(2)).sum();
    (q, (a.len() as u128).pow(3))
}

pub fn big(x: impl Into<BigUint>) -> BigUint {
    x.into()
}

/// `|A - A|` in `F_2^n` through a bitmap over the whole group.
pub fn f2_diff_size(a: &FiniteSet, n: u32) -> u64 {
    let mut seen = vec![0u64; (1usize << n).div_ceil(64)];
    let mut count = 0;
    for &x in a.elems() {
        for &y in a.elems() {
            let t = (x.0 ^ y.0) as usize;
            let (w, bit) = (t / 64, 1u64 << (t % 64));
            if seen[w] & bit == 0 {
                seen[w] |= bit;
                count += 1;
            }
        }
    }
    count
}

/// A lower bound on `log2(num/den)` (for `num ≥ den > 0`) as `(value, 2^frac_bits)`,
/// accurate to within `2^-(frac_bits - 2)`.
pub fn log2_lower(num: &BigUint, den: &BigUint, frac_bits: u32) -> (BigUint, BigUint) {
    assert!(num >= den);
    const F: u64 = 160;
    let one = BigUint::from(1u32) << F;
    let two = &one << 1u32;
    let mut int_part = 0u64;
    while den << (int_part + 1) as usize <= *num {
        int_part += 1;
    }
    // y = num / (den · 2^int_part) in [1, 2), fixed point rounded down.
    let mut y = (num << F as usize) / (den << int_part as usize);
    let mut frac = BigUint::from(0u32);
    for _ in 0..frac_bits {
        y = (&y * &y) >> F as usize;
        frac <<= 1u32;
        if y >= two {
            frac += 1u32;
            y >>= 1u32;
        }
    }
    let scale = BigUint::from(1u32) << frac_bits as usize;
    (BigUint::from(int_part) * &scale + frac, scale)
}

/// Deterministic xorshift stream, so the corpus does not depend on library RNG code.
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range(&mut self, lo: u64, hi_inclusive: u64) -> u64 {
        lo + self.below(hi_inclusive - lo + 1)
    }
}

/// `k` distinct values from `0..n`.
pub fn sample_distinct(s: &mut Stream, n: u64, k: usize) -> Vec<u64> {
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < k {
        picked.insert(s.below(n));
    }
    picked.into_iter().collect()
}

/// A random group of modest order for variant `0..4`.
pub fn random_group(s: &mut Stream, variant: usize) -> GroupSpec {
    match variant {
        0 => GroupSpec::f2n(s.range(1, 10) as u32).unwrap(),
        1 => {
            let p = [3u64, 5, 7][s.below(3) as usize];
            let max_n = match p {
                3 => 6,
                5 => 4,
                _ => 3,
            };
            GroupSpec::fpn(p, s.range(1, max_n) as u32).unwrap()
        }
        2 => GroupSpec::zmod(s.range(1, 300)).unwrap(),
        _ => GroupSpec::Zint,
    }
}

pub fn random_set(s: &mut Stream, g: GroupSpec, max_size: usize) -> FiniteSet {
    match g.order() {
        Some(order) => {
            let k = s.range(1, (max_size as u64).min(order)) as usize;
            FiniteSet::new(g, sample_distinct(s, order, k).into_iter().map(|x| Elem(x as i64))).unwrap()
        }
        None => {
            let k = s.range(1, max_size as u64) as usize;
            let span = [20u64, 1000, 1 << 40][s.below(3) as usize];
            let elems = (0..k).map(|_| Elem(s.range(0, 2 * span) as i64 - span as i64));
            FiniteSet::new(g, elems.collect::<Vec<_>>()).unwrap()
        }
    }
}
