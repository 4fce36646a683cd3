//! The rotated Poisson kernel family and its quantitative estimates: the
//! weighted kernel integral C4, the gradient and analytic-family integrals C2
//! and C3 with their angle scaling, the Hormander-type difference integral,
//! and the Dini-modulus bound assembled from them.
//!
//! All integrals are adaptive Gauss-Kronrod with panels split exactly at the
//! near-singular radii r^2 = 1 +- (pi/2 - |theta|) and at r = 2, so no panel
//! straddles the region where the imaginary part takes over from the real
//! part.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::fit::{self, FitError, LineFit};
use crate::quad::{self, QuadError};

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error("time parameter must be positive, got {0}")]
    BadTime(f64),
    #[error("rotation angle must satisfy |theta| < pi/2, got {0}")]
    BadTheta(f64),
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("delta must lie in [0, 1), got {0}")]
    BadDelta(f64),
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("need Re s = 1, got {0}")]
    BadAnalyticParameter(f64),
    #[error("need c > d - 1 for convergence, got c = {c}, d = {d}")]
    BadDecayExponent { c: f64, d: usize },
    #[error("finiteness condition eps (c - d - 1) < 1 violated: {0}")]
    FinitenessViolated(f64),
    #[error("inputs to the Dini bound must be positive")]
    NonPositiveInput,
    #[error("tail bound {bound:.3e} exceeds tolerance at the truncation cap")]
    TailTooLarge { bound: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Parameters of the rotated kernel `p_{t, theta}` in dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelParams {
    pub t: f64,
    pub theta: f64,
    pub dim: usize,
    /// Multiply by the mass-normalizing constant Gamma((d+1)/2) / pi^((d+1)/2).
    pub normalized: bool,
}

impl KernelParams {
    pub fn new(t: f64, theta: f64, dim: usize, normalized: bool) -> Result<Self, PoissonError> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(PoissonError::BadTime(t));
        }
        if !(theta.abs() < core::f64::consts::FRAC_PI_2) {
            return Err(PoissonError::BadTheta(theta));
        }
        if dim == 0 {
            return Err(PoissonError::BadDimension(dim));
        }
        Ok(Self {
            t,
            theta,
            dim,
            normalized,
        })
    }

    /// Angle margin pi/2 - |theta|.
    pub fn gap(&self) -> f64 {
        core::f64::consts::FRAC_PI_2 - self.theta.abs()
    }
}

/// Gamma(m/2) for integer m >= 1, through the half-integer recurrence.
fn gamma_half(m: u32) -> f64 {
    assert!(m >= 1);
    let mut value = if m % 2 == 0 {
        1.0 // Gamma(1)
    } else {
        core::f64::consts::PI.sqrt() // Gamma(1/2)
    };
    let mut arg = if m % 2 == 0 { 2u32 } else { 1u32 };
    while arg < m {
        value *= arg as f64 / 2.0;
        arg += 2;
    }
    value
}

/// Surface area of the unit sphere in R^d.
pub fn sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * core::f64::consts::PI.powf(d / 2.0) / gamma_half(dim as u32)
}

/// Mass-normalizing constant of the Poisson kernel in R^d.
pub fn normalizing_constant(dim: usize) -> f64 {
    gamma_half(dim as u32 + 1) / core::f64::consts::PI.powf((dim as f64 + 1.0) / 2.0)
}

/// The rotated Poisson kernel
/// `e^{i theta} t / ((e^{i theta} t)^2 + |x|^2)^{(d+1)/2}`.
pub fn poisson_kernel(x: &[f64], params: &KernelParams) -> Complex64 {
    let r2: f64 = x.iter().take(params.dim).map(|v| v * v).sum();
    let v = poisson_kernel_radial(r2.sqrt(), params.t, params.theta, params.dim);
    if params.normalized {
        v * normalizing_constant(params.dim)
    } else {
        v
    }
}

/// Kernel value at radius `r` (no normalization flag applied).
fn poisson_kernel_radial(r: f64, t: f64, theta: f64, dim: usize) -> Complex64 {
    let rot_t = Complex64::from_polar(t, theta);
    let denom = rot_t * rot_t + r * r;
    let a = (dim as f64 + 1.0) / 2.0;
    rot_t / denom.powf(a)
}

/// |e^{2 i theta} + r^2|.
fn abs_p(r: f64, theta: f64) -> f64 {
    let re = (2.0 * theta).cos() + r * r;
    let im = (2.0 * theta).sin();
    re.hypot(im)
}

/// Radii where the integrands switch between real-dominated and
/// imaginary-dominated behaviour, plus the paper's split at 2.
fn region_splits(theta: f64) -> Vec<f64> {
    let g = core::f64::consts::FRAC_PI_2 - theta.abs();
    let mut pts = alloc::vec![0.0f64];
    if 1.0 - g > 0.0 {
        pts.push((1.0 - g).sqrt());
    }
    if 1.0 + g < 4.0 {
        pts.push((1.0 + g).sqrt());
    }
    pts.push(2.0);
    pts
}

const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_MAX_PANELS: usize = 20_000;

/// Radial integral over [0, 2] with region splits plus the decaying tail over
/// [2, inf), times the sphere area.
fn radial_integral<F: Fn(f64) -> f64 + Copy>(
    integrand: F,
    theta: f64,
    dim: usize,
) -> Result<f64, PoissonError> {
    let splits = region_splits(theta);
    let head = quad::integrate_with_splits(integrand, &splits, 1e-12, QUAD_REL_TOL, QUAD_MAX_PANELS)?;
    let tail = quad::integrate_decaying_tail(
        integrand,
        2.0,
        1e-12 + QUAD_REL_TOL * head.value.abs(),
        QUAD_REL_TOL,
        QUAD_MAX_PANELS,
    )?;
    Ok(sphere_area(dim) * (head.value + tail.value))
}

/// The weighted kernel integral
/// `int |Phi(x)| (1 + |x|)^delta dx`, `Phi = |p_{1, theta}|`, computed as a
/// radial integral split at the paper's region boundaries.
pub fn c4_integral(theta: f64, dim: usize, delta: f64) -> Result<f64, PoissonError> {
    if !(theta.abs() < core::f64::consts::FRAC_PI_2) {
        return Err(PoissonError::BadTheta(theta));
    }
    if dim == 0 {
        return Err(PoissonError::BadDimension(dim));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(PoissonError::BadDelta(delta));
    }
    let a = (dim as f64 + 1.0) / 2.0;
    let integrand = move |r: f64| {
        abs_p(r, theta).powf(-a) * (1.0 + r).powf(delta) * r.powi(dim as i32 - 1)
    };
    radial_integral(integrand, theta, dim)
}

/// The two pieces of the gradient integral `int |grad Phi^{(s)}|`, dominated
/// as in the analytic-family estimate: the `|Im s|` term carrying the
/// near-singular factor `|P|^{-1}` and the angle-independent decay term.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct C2Parts {
    pub total: f64,
    pub oscillatory: f64,
    pub decay: f64,
}

/// `C2(s)` for `Re s = 1`: the gradient integral of the analytic family at
/// the upper edge of the strip.
pub fn c2_integral(s: Complex64, theta: f64, dim: usize, c: f64) -> Result<C2Parts, PoissonError> {
    if (s.re - 1.0).abs() > 1e-12 {
        return Err(PoissonError::BadAnalyticParameter(s.re));
    }
    if !(theta.abs() < core::f64::consts::FRAC_PI_2) {
        return Err(PoissonError::BadTheta(theta));
    }
    if dim == 0 {
        return Err(PoissonError::BadDimension(dim));
    }
    if !(c > dim as f64 - 1.0) {
        return Err(PoissonError::BadDecayExponent { c, d: dim });
    }
    let d = dim as i32;
    let im = s.im.abs();
    let oscillatory = if im == 0.0 {
        0.0
    } else {
        let integrand =
            move |r: f64| r.powi(d) * (1.0 + r).powf(-c) / abs_p(r, theta);
        im * radial_integral(integrand, theta, dim)?
    };
    let modulus = s.norm();
    let decay_integrand = move |r: f64| r.powi(d - 1) * (1.0 + r).powf(-c - 1.0);
    let decay = modulus * radial_integral(decay_integrand, theta, dim)?;
    Ok(C2Parts {
        total: oscillatory + decay,
        oscillatory,
        decay,
    })
}

/// `C3(-eps)`: the analytic-family integral at the lower edge of the strip,
/// `int |P(r)|^{-a(1+eps)} (1 + r)^{c eps} r^{d-1} dr` times the sphere area,
/// split at r = 2 as in the estimate.
pub fn c3_integral(epsilon: f64, theta: f64, dim: usize, c: f64) -> Result<f64, PoissonError> {
    if !(epsilon > 0.0) {
        return Err(PoissonError::BadEpsilon(epsilon));
    }
    if !(theta.abs() < core::f64::consts::FRAC_PI_2) {
        return Err(PoissonError::BadTheta(theta));
    }
    if dim == 0 {
        return Err(PoissonError::BadDimension(dim));
    }
    let finiteness = epsilon * (c - dim as f64 - 1.0);
    if finiteness >= 1.0 {
        return Err(PoissonError::FinitenessViolated(finiteness));
    }
    let a = (dim as f64 + 1.0) / 2.0;
    let integrand = move |r: f64| {
        abs_p(r, theta).powf(-a * (1.0 + epsilon))
            * (1.0 + r).powf(c * epsilon)
            * r.powi(dim as i32 - 1)
    };
    radial_integral(integrand, theta, dim)
}

/// Truncated Hormander difference integral and its analytic tail bound.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HormanderResult {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation_radius: f64,
}

/// `int_{|x| >= 2 |y|} | p_{2^k t, theta}(x - y) - p_{2^k t, theta}(x) | dx`
/// for dimensions 1 to 3, with the outer truncation chosen so the analytic
/// tail bound stays below `1e-6` of the value.
pub fn hormander_integral(
    y: &[f64],
    params: &KernelParams,
    k: i32,
) -> Result<HormanderResult, PoissonError> {
    let dim = params.dim;
    if !(1..=3).contains(&dim) {
        return Err(PoissonError::BadDimension(dim));
    }
    let y_norm = y.iter().take(dim).map(|v| v * v).sum::<f64>().sqrt();
    if y_norm == 0.0 {
        return Ok(HormanderResult {
            value: 0.0,
            tail_bound: 0.0,
            truncation_radius: 0.0,
        });
    }
    let tau = (k as f64).exp2() * params.t;
    let theta = params.theta;

    // |p(x - y) - p(x)| depends only on |x|, |y| and the angle between; put y
    // on the first axis
    let diff_at = move |r: f64, cos_angle: f64| -> f64 {
        let shifted_r2 = r * r + y_norm * y_norm - 2.0 * r * y_norm * cos_angle;
        let a = poisson_kernel_radial(shifted_r2.max(0.0).sqrt(), tau, theta, dim);
        let b = poisson_kernel_radial(r, tau, theta, dim);
        (a - b).norm()
    };

    // tail: |p(x-y) - p(x)| <= |y| sup |grad p| <= |y| (d+1) tau 2^((d+3)/2) |x|^(-d-2)
    // for |x| >= sqrt(2) tau, so the remainder beyond R is bounded explicitly
    let tail_bound_beyond = move |radius: f64| -> f64 {
        let c = (dim as f64 + 1.0) * tau * (2.0f64).powf((dim as f64 + 3.0) / 2.0);
        sphere_area(dim) * y_norm * c * radius.powi(-2) / 2.0
    };

    let angular = move |r: f64| -> Result<f64, PoissonError> {
        match dim {
            1 => Ok(diff_at(r, 1.0) + diff_at(r, -1.0)),
            2 => {
                // periodic trapezoid in the angle, doubled until stable
                let mut m = 32usize;
                let mut prev = f64::NAN;
                loop {
                    let mut acc = 0.0;
                    for j in 0..m {
                        let phi = core::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                        acc += diff_at(r, phi.cos());
                    }
                    let val = 2.0 * r * acc * core::f64::consts::PI / m as f64;
                    if (val - prev).abs() <= 1e-9 * val.abs().max(1e-12) || m >= 4096 {
                        return Ok(val);
                    }
                    prev = val;
                    m *= 2;
                }
            }
            _ => {
                // d = 3: substitute u = cos(angle)
                let inner = quad::integrate(
                    move |u: f64| diff_at(r, u),
                    -1.0,
                    1.0,
                    1e-12,
                    1e-9,
                    2000,
                )?;
                Ok(2.0 * core::f64::consts::PI * r * r * inner.value)
            }
        }
    };

    let lower = 2.0 * y_norm;
    let mut radius = (64.0 * y_norm).max(64.0 * tau).max(lower * 2.0);
    for _ in 0..12 {
        // split around the kernel scale where the integrand peaks
        let mut splits = alloc::vec![lower];
        for s in [4.0 * y_norm, tau, 4.0 * tau, 16.0 * tau] {
            if s > lower && s < radius {
                splits.push(s);
            }
        }
        splits.push(radius);
        splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        splits.dedup();
        let mut value = 0.0;
        let mut quad_err = 0.0;
        for w in splits.windows(2) {
            // a failed angular integration poisons the cell with NaN
            let res = quad::integrate(
                |r| angular(r).unwrap_or(f64::NAN),
                w[0],
                w[1],
                1e-12,
                QUAD_REL_TOL,
                QUAD_MAX_PANELS,
            )?;
            if !res.value.is_finite() {
                return Err(PoissonError::Quad(QuadError::NotConverged {
                    achieved: f64::NAN,
                    requested: QUAD_REL_TOL,
                }));
            }
            value += res.value;
            quad_err += res.abs_error;
        }
        let bound = tail_bound_beyond(radius);
        if bound <= 1e-6 * value.max(1e-12) {
            return Ok(HormanderResult {
                value,
                tail_bound: bound + quad_err,
                truncation_radius: radius,
            });
        }
        radius *= 4.0;
    }
    Err(PoissonError::TailTooLarge {
        bound: tail_bound_beyond(radius),
    })
}

/// The assembled Dini-modulus bound
/// `(C4 + C3^(1-v) C2^v) / beta` with `v = eps/(1+eps)` and
/// `beta = min(eps/(1+eps), delta)`.
pub fn dini_bound(
    c4: f64,
    c3: f64,
    c2: f64,
    epsilon: f64,
    delta: f64,
) -> Result<f64, PoissonError> {
    if !(c4 > 0.0 && c3 > 0.0 && c2 > 0.0) {
        return Err(PoissonError::NonPositiveInput);
    }
    if !(epsilon > 0.0) {
        return Err(PoissonError::BadEpsilon(epsilon));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PoissonError::BadDelta(delta));
    }
    let v = epsilon / (1.0 + epsilon);
    let beta = v.min(delta);
    Ok((c4 + c3.powf(1.0 - v) * c2.powf(v)) / beta)
}

/// Least squares of `log(quantity)` against `log(pi/2 - |theta|)`.
pub fn theta_scaling_fit(pairs: &[(f64, f64)]) -> Result<LineFit, PoissonError> {
    let transformed: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(theta, q)| (core::f64::consts::FRAC_PI_2 - theta.abs(), q))
        .collect();
    Ok(fit::log_log_fit(&transformed)?)
}

/// The standard sweep grid `theta_j = pi/2 - 2^-j`, `j = j_min ..= j_max`.
pub fn theta_sweep(j_min: u32, j_max: u32) -> Vec<f64> {
    (j_min..=j_max)
        .map(|j| core::f64::consts::FRAC_PI_2 - (-(j as f64)).exp2())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_point_values() {
        let p1 = KernelParams::new(1.0, 0.0, 1, false).unwrap();
        assert!((poisson_kernel(&[0.0], &p1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let p2 = KernelParams::new(2.0, 0.0, 1, false).unwrap();
        assert!((poisson_kernel(&[0.0], &p2) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn kernel_parameter_validation() {
        assert!(KernelParams::new(0.0, 0.0, 1, false).is_err());
        assert!(KernelParams::new(1.0, 1.6, 1, false).is_err());
        assert!(KernelParams::new(1.0, 0.0, 0, false).is_err());
    }

    #[test]
    fn normalized_kernel_has_unit_mass_1d() {
        let p = KernelParams::new(1.0, 0.0, 1, true).unwrap();
        let f = |x: f64| poisson_kernel(&[x], &p).re;
        let head = quad::integrate(f, 0.0, 8.0, 1e-12, 1e-10, 4000).unwrap();
        let tail = quad::integrate_decaying_tail(f, 8.0, 1e-12, 1e-10, 4000).unwrap();
        let mass = 2.0 * (head.value + tail.value);
        assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
    }

    #[test]
    fn dilation_identity() {
        let d = 2;
        for &(t, theta) in &[(0.5, 0.3), (2.0, -1.2), (7.0, 1.5)] {
            let pt = KernelParams::new(t, theta, d, false).unwrap();
            let p1 = KernelParams::new(1.0, theta, d, false).unwrap();
            for &x in &[0.0, 0.7, 3.0, 40.0] {
                let lhs = poisson_kernel(&[x, 0.4 * x], &pt);
                let rhs = poisson_kernel(&[x / t, 0.4 * x / t], &p1) * t.powi(-(d as i32));
                assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * core::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * core::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn c4_closed_form_anchors() {
        // theta = 0, delta = 0: pi in d = 1 and pi^2 in d = 3
        let v1 = c4_integral(0.0, 1, 0.0).unwrap();
        assert!(
            (v1 - core::f64::consts::PI).abs() < 1e-6,
            "d=1 anchor {v1}"
        );
        let v3 = c4_integral(0.0, 3, 0.0).unwrap();
        assert!(
            (v3 - core::f64::consts::PI * core::f64::consts::PI).abs() < 1e-6,
            "d=3 anchor {v3}"
        );
    }

    #[test]
    fn c4_monotone_in_angle() {
        for d in 1..=3 {
            let mut prev = 0.0;
            for theta in theta_sweep(1, 6) {
                let v = c4_integral(theta, d, 0.5).unwrap();
                assert!(v > prev, "d={d}: C4 not increasing toward pi/2");
                prev = v;
            }
        }
    }

    #[test]
    fn c4_rejects_bad_parameters() {
        assert!(c4_integral(1.6, 1, 0.0).is_err());
        assert!(c4_integral(0.0, 1, 1.0).is_err());
        assert!(c4_integral(0.0, 0, 0.5).is_err());
    }

    #[test]
    fn c2_structure() {
        // Im s = 0 kills the oscillatory part exactly
        let parts = c2_integral(Complex64::new(1.0, 0.0), 0.7, 2, 2.5).unwrap();
        assert_eq!(parts.oscillatory, 0.0);
        assert!(parts.decay > 0.0);

        // the decay part carries no angle dependence
        let a = c2_integral(Complex64::new(1.0, 1.0), 0.3, 2, 2.5).unwrap();
        let b = c2_integral(Complex64::new(1.0, 1.0), 1.4, 2, 2.5).unwrap();
        assert!((a.decay - b.decay).abs() < 1e-10 * a.decay);
        assert!(b.oscillatory > a.oscillatory);

        assert!(c2_integral(Complex64::new(0.5, 1.0), 0.3, 2, 2.5).is_err());
        assert!(c2_integral(Complex64::new(1.0, 1.0), 0.3, 2, 0.5).is_err());
    }

    #[test]
    fn c3_limits_to_c4() {
        // eps -> 0 recovers the unweighted kernel integral at delta = 0
        let c3 = c3_integral(1e-6, 0.0, 2, 2.5).unwrap();
        let c4 = c4_integral(0.0, 2, 0.0).unwrap();
        assert!((c3 - c4).abs() < 1e-4 * c4, "c3 {c3} vs c4 {c4}");
    }

    #[test]
    fn c3_outer_tail_uniformly_bounded() {
        // beyond r = 2 the integrand is dominated by the angle-free majorant
        // with |P(r)| >= r^2 - 1, so the tail is finite uniformly in theta
        let a = 1.5 * 1.1;
        let tail = |theta: f64| -> f64 {
            let f = move |r: f64| abs_p(r, theta).powf(-a) * (1.0 + r).powf(0.25) * r;
            quad::integrate_decaying_tail(f, 2.0, 1e-12, 1e-10, 4000)
                .unwrap()
                .value
        };
        let majorant = {
            let f = move |r: f64| (r * r - 1.0).powf(-a) * (1.0 + r).powf(0.25) * r;
            quad::integrate_decaying_tail(f, 2.0, 1e-12, 1e-10, 4000)
                .unwrap()
                .value
        };
        assert!(majorant.is_finite());
        for theta in theta_sweep(1, 8) {
            let t = tail(theta);
            assert!(t.is_finite() && t > 0.0);
            assert!(t <= majorant * (1.0 + 1e-9), "theta {theta}: {t} > {majorant}");
        }
    }

    #[test]
    fn c3_finiteness_condition() {
        // eps (c - d - 1) >= 1 must be rejected
        assert!(c3_integral(0.5, 0.0, 1, 4.5).is_err());
        assert!(c3_integral(0.5, 0.0, 1, 3.9).is_ok());
    }

    #[test]
    fn hormander_zero_displacement() {
        let p = KernelParams::new(1.0, 0.5, 1, false).unwrap();
        let r = hormander_integral(&[0.0], &p, 3).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn hormander_scale_shift_identity() {
        // value at (y, k) equals value at (2^-k y, 0)
        let p = KernelParams::new(1.0, 0.9, 1, false).unwrap();
        for &k in &[-2i32, 1, 3] {
            let a = hormander_integral(&[1.0], &p, k).unwrap();
            let b = hormander_integral(&[(-(k as f64)).exp2()], &p, 0).unwrap();
            assert!(
                (a.value - b.value).abs() < 1e-6 * b.value.max(1e-12),
                "k={k}: {} vs {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn hormander_2d_runs_and_is_positive() {
        let p = KernelParams::new(1.0, 1.2, 2, false).unwrap();
        let r = hormander_integral(&[1.0, 0.0], &p, 0).unwrap();
        assert!(r.value > 0.0);
        assert!(r.tail_bound < 1e-4 * r.value);
    }

    #[test]
    fn dini_bound_formula() {
        // all constants 1, eps = 1, delta = 1/2: v = 1/2, beta = 1/2 -> 4
        let v = dini_bound(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!((v - 4.0).abs() < 1e-14);

        // monotone in each constant
        let base = dini_bound(2.0, 3.0, 4.0, 0.2, 0.5).unwrap();
        assert!(dini_bound(2.5, 3.0, 4.0, 0.2, 0.5).unwrap() > base);
        assert!(dini_bound(2.0, 3.5, 4.0, 0.2, 0.5).unwrap() > base);
        assert!(dini_bound(2.0, 3.0, 4.5, 0.2, 0.5).unwrap() > base);

        assert!(dini_bound(0.0, 1.0, 1.0, 0.2, 0.5).is_err());
    }

    #[test]
    fn theta_fit_recovers_exact_power_law() {
        let thetas = theta_sweep(2, 10);
        let pairs: Vec<(f64, f64)> = thetas
            .iter()
            .map(|&th| {
                let g = core::f64::consts::FRAC_PI_2 - th;
                (th, 3.0 * g.powf(-0.75))
            })
            .collect();
        let fit = theta_scaling_fit(&pairs).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);

        let flat: Vec<(f64, f64)> = thetas.iter().map(|&th| (th, 2.0)).collect();
        assert!(theta_scaling_fit(&flat).unwrap().slope.abs() < 1e-13);
    }

    #[test]
    fn kernel_semigroup_property_at_theta_zero() {
        // p_t * p_s = p_{t+s} for the normalized kernel on the line
        let pt = KernelParams::new(1.0, 0.0, 1, true).unwrap();
        let ps = KernelParams::new(1.5, 0.0, 1, true).unwrap();
        let pts = KernelParams::new(2.5, 0.0, 1, true).unwrap();
        for &x in &[0.0, 0.8, 3.0] {
            let f = |y: f64| {
                (poisson_kernel(&[x - y], &pt) * poisson_kernel(&[y], &ps)).re
            };
            let head = quad::integrate(f, -60.0, 60.0, 1e-12, 1e-9, 8000).unwrap();
            let tail_r = quad::integrate_decaying_tail(f, 60.0, 1e-12, 1e-8, 4000).unwrap();
            let g = |y: f64| f(-y);
            let tail_l = quad::integrate_decaying_tail(g, 60.0, 1e-12, 1e-8, 4000).unwrap();
            let conv = head.value + tail_r.value + tail_l.value;
            let want = poisson_kernel(&[x], &pts).re;
            assert!(
                (conv - want).abs() < 1e-4 * want,
                "x={x}: conv {conv} vs {want}"
            );
        }
    }
}
