//! Dense autocorrelation `r = 1_A ⋆ 1_{-A}` by fast transforms.
//!
//! F_2^n uses an integer Walsh–Hadamard transform in wrapping `u64`
//! arithmetic: every true intermediate is an integer combination, the final
//! values `2^n · r(t)` are below `2^64`, so the result is exact with no
//! rounding. The other finite groups (and bounded windows of Z) go through a
//! complex DFT along each base-p axis; results are rounded to the nearest
//! integer and the residual is required to stay below 1/4.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{FiniteSet, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};

/// Counts `r(t)` laid out densely; slot `i` holds the count of `Elem(i + offset)`.
pub(crate) struct DenseCounts {
    pub offset: i64,
    pub counts: Vec<u64>,
}

/// Table size the dense path would allocate for `a`, if it applies at all.
pub(crate) fn dense_window(a: &FiniteSet) -> Option<u64> {
    match a.group() {
        GroupSpec::Zint => {
            let (lo, hi) = (a.min()?.0, a.elems().last()?.0);
            let span = (hi as i128 - lo as i128) as u128;
            let len = 2 * span + 1;
            (len <= DENSE_LIMIT as u128).then_some(len as u64)
        }
        g => g.order().filter(|&o| o <= DENSE_LIMIT),
    }
}

pub(crate) fn autocorrelation(a: &FiniteSet) -> Result<Option<DenseCounts>> {
    if a.is_empty() || dense_window(a).is_none() {
        return Ok(None);
    }
    let counts = match a.group() {
        GroupSpec::F2n { n } => DenseCounts { offset: 0, counts: walsh_hadamard_autocorrelation(a.elems(), n) },
        GroupSpec::Fpn { p, n } => DenseCounts { offset: 0, counts: dft_autocorrelation(a.elems(), p as usize, n)? },
        GroupSpec::Zmod { m } => DenseCounts { offset: 0, counts: dft_autocorrelation(a.elems(), m as usize, 1)? },
        GroupSpec::Zint => {
            let lo = a.min().unwrap().0;
            let span = (a.elems().last().unwrap().0 - lo) as usize;
            let len = 2 * span + 1;
            let shifted: Vec<Elem> = a.elems().iter().map(|e| Elem(e.0 - lo)).collect();
            let cyclic = dft_autocorrelation(&shifted, len, 1)?;
            // Lag t lives in slot t mod len; unroll to -span..=span.
            let counts = (0..len).map(|i| cyclic[(i + len - span) % len]).collect();
            DenseCounts { offset: -(span as i64), counts }
        }
    };
    Ok(Some(counts))
}

fn wht_in_place(data: &mut [u64]) {
    let mut h = 1;
    while h < data.len() {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u.wrapping_add(v);
                *y = u.wrapping_sub(v);
            }
        }
        h *= 2;
    }
}

fn walsh_hadamard_autocorrelation(elems: &[Elem], n: u32) -> Vec<u64> {
    let mut data = vec![0u64; 1usize << n];
    for e in elems {
        data[e.0 as usize] = 1;
    }
    wht_in_place(&mut data);
    for x in data.iter_mut() {
        *x = x.wrapping_mul(*x);
    }
    wht_in_place(&mut data);
    for x in data.iter_mut() {
        *x >>= n;
    }
    data
}

/// Autocorrelation over `(Z/p)^n` laid out with axis `i` at stride `p^i`.
fn dft_autocorrelation(elems: &[Elem], p: usize, n: u32) -> Result<Vec<u64>> {
    let len = p.pow(n);
    let mut data = vec![Complex::new(0.0f64, 0.0); len];
    for e in elems {
        data[e.0 as usize].re = 1.0;
    }
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(p);
    let inverse = planner.plan_fft_inverse(p);
    transform_axes(&mut data, p, n, &*forward);
    for x in data.iter_mut() {
        *x = Complex::new(x.norm_sqr(), 0.0);
    }
    transform_axes(&mut data, p, n, &*inverse);
    let scale = len as f64;
    let mut worst = 0.0f64;
    let counts = data
        .iter()
        .map(|x| {
            let v = x.re / scale;
            let rounded = v.round();
            worst = worst.max((v - rounded).abs()).max((x.im / scale).abs());
            rounded.max(0.0) as u64
        })
        .collect();
    if worst >= 0.25 {
        return Err(Error::TransformPrecision { residual: worst });
    }
    Ok(counts)
}

fn transform_axes(data: &mut [Complex<f64>], p: usize, n: u32, fft: &dyn rustfft::Fft<f64>) {
    if n == 1 {
        fft.process(data);
        return;
    }
    let mut line = vec![Complex::new(0.0, 0.0); p];
    let mut stride = 1usize;
    for _ in 0..n {
        let block = stride * p;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, slot) in line.iter().enumerate() {
                    data[base + j * stride] = *slot;
                }
            }
        }
        stride = block;
    }
}
