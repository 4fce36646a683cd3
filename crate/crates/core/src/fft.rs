//! Iterative radix-2 FFT for power-of-two lengths, plus a multi-axis driver
//! for fields on d-dimensional grids.
//!
//! Power-of-two lengths only: plans are trivial, results are bit-reproducible
//! across runs, and every grid in this crate is constructed that way.
//! Convention: `forward` computes `F[k] = sum_j x[j] exp(-2*pi*i*j*k/n)`
//! (unscaled); `inverse` carries the `1/n` factor, so `inverse(forward(x)) = x`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Returns true when `n` is a power of two (and at least 1).
#[inline]
pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

fn twiddles(n: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    let step = sign * 2.0 * core::f64::consts::PI / n as f64;
    (0..n / 2)
        .map(|k| {
            let a = step * k as f64;
            Complex64::new(a.cos(), a.sin())
        })
        .collect()
}

fn bit_reverse_permute(data: &mut [Complex64]) {
    let n = data.len();
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            data.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
}

fn transform(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    assert!(is_power_of_two(n), "fft length must be a power of two");
    if n == 1 {
        return;
    }
    let tw = twiddles(n, inverse);
    bit_reverse_permute(data);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = tw[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// In-place forward DFT (unscaled).
pub fn forward(data: &mut [Complex64]) {
    transform(data, false);
}

/// In-place inverse DFT (scaled by `1/n`).
pub fn inverse(data: &mut [Complex64]) {
    transform(data, true);
}

/// Maps an FFT bin index to its signed frequency index in `[-n/2, n/2)`.
#[inline]
pub fn signed_bin(bin: usize, n: usize) -> i64 {
    if bin <= n / 2 - 1 || n == 1 {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

/// Maps a signed frequency index in `[-n/2, n/2)` back to the FFT bin.
#[inline]
pub fn bin_of_signed(k: i64, n: usize) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (k + n as i64) as usize
    }
}

/// In-place multi-axis DFT on a row-major array of shape `shape`
/// (axis 0 slowest). Each axis length must be a power of two.
pub fn forward_nd(shape: &[usize], data: &mut [Complex64]) {
    transform_nd(shape, data, false);
}

/// In-place multi-axis inverse DFT; carries the full `1/total` scale.
pub fn inverse_nd(shape: &[usize], data: &mut [Complex64]) {
    transform_nd(shape, data, true);
}

fn transform_nd(shape: &[usize], data: &mut [Complex64], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(total, data.len(), "shape does not match data length");
    let ndim = shape.len();
    // stride of the contiguous (last) axis is 1
    let mut line = vec![Complex64::new(0.0, 0.0); *shape.iter().max().unwrap_or(&1)];
    for axis in 0..ndim {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let stride: usize = shape[axis + 1..].iter().product();
        let n_lines = total / n;
        for l in 0..n_lines {
            // decompose the line index into (outer, inner) around the axis
            let outer = l / stride;
            let inner = l % stride;
            let base = outer * stride * n + inner;
            for j in 0..n {
                line[j] = data[base + j * stride];
            }
            transform(&mut line[..n], inverse);
            for j in 0..n {
                data[base + j * stride] = line[j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let a = -2.0 * core::f64::consts::PI * (j * k % n) as f64 / n as f64;
                    acc += v * Complex64::new(a.cos(), a.sin());
                }
                acc
            })
            .collect()
    }

    fn random_signal(n: usize, seed: u64) -> Vec<Complex64> {
        use crate::rng::SeededRng;
        let mut rng = SeededRng::new(seed);
        (0..n)
            .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[1usize, 2, 4, 8, 64, 256] {
            let x = random_signal(n, 7 + n as u64);
            let mut y = x.clone();
            forward(&mut y);
            let want = naive_dft(&x);
            for (a, b) in y.iter().zip(want.iter()) {
                assert!((a - b).norm() < 1e-9 * (n as f64), "n={n}");
            }
        }
    }

    #[test]
    fn roundtrip_identity() {
        let x = random_signal(1024, 3);
        let mut y = x.clone();
        forward(&mut y);
        inverse(&mut y);
        let max_err = x
            .iter()
            .zip(y.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-12);
    }

    #[test]
    fn parseval() {
        let x = random_signal(4096, 11);
        let mut y = x.clone();
        forward(&mut y);
        let lhs: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / 4096.0;
        assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn nd_roundtrip_and_mode() {
        let shape = [8usize, 16, 4];
        let total: usize = shape.iter().product();
        let x = random_signal(total, 5);
        let mut y = x.clone();
        forward_nd(&shape, &mut y);
        inverse_nd(&shape, &mut y);
        for (a, b) in x.iter().zip(y.iter()) {
            assert!((a - b).norm() < 1e-12);
        }

        // a pure mode concentrates on a single bin
        let (k0, k1, k2) = (3usize, 5, 1);
        let mut z: Vec<Complex64> = Vec::with_capacity(total);
        for i0 in 0..shape[0] {
            for i1 in 0..shape[1] {
                for i2 in 0..shape[2] {
                    let phase = 2.0
                        * core::f64::consts::PI
                        * (k0 as f64 * i0 as f64 / shape[0] as f64
                            + k1 as f64 * i1 as f64 / shape[1] as f64
                            + k2 as f64 * i2 as f64 / shape[2] as f64);
                    z.push(Complex64::new(phase.cos(), phase.sin()));
                }
            }
        }
        forward_nd(&shape, &mut z);
        let idx = (k0 * shape[1] + k1) * shape[2] + k2;
        assert!((z[idx].re - total as f64).abs() < 1e-9);
        let off: f64 = z
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-8);
    }

    #[test]
    fn signed_bin_roundtrip() {
        let n = 16;
        for bin in 0..n {
            let k = signed_bin(bin, n);
            assert!((-8..8).contains(&k));
            assert_eq!(bin_of_signed(k, n), bin);
        }
    }
}
