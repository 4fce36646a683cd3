//! Numerical kernels for spectral-multiplier experiments: partition-of-unity
//! families, FFT band decompositions, multiplier-norm classes, Fourier
//! multiplier operators on discrete tori, and Poisson-kernel integral
//! estimates.
//!
//! The crate is `no_std`-compatible (with `alloc`); all IO, file formats and
//! the experiment CLI live in the companion `mlab` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod fft;
pub mod fit;
pub mod func;
pub mod norms;
pub mod operators;
pub mod partition;
pub mod poisson;
pub mod quad;
pub mod rng;
pub mod transform;

pub use num_complex::Complex64;

/// The weight ⟨t⟩ = 1 + |t| used throughout growth estimates.
#[inline]
pub fn bracket(t: f64) -> f64 {
    1.0 + t.abs()
}

/// Pairwise (tree) summation. Deterministic reduction order and better
/// rounding behaviour than a running sum on long inputs.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Pairwise summation of complex values.
pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
        }
    }
}
