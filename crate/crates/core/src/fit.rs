//! Least-squares fits used by the sweep experiments: every scaling claim is
//! reduced to the slope of a straight line on log-log axes.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("abscissae are degenerate (zero variance)")]
    DegenerateAbscissae,
    #[error("values must be positive for a log fit (value {0} at index {1})")]
    NonPositiveValue(f64, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit, FitError> {
    if x.len() < 2 || x.len() != y.len() {
        return Err(FitError::TooFewPoints {
            needed: 2,
            got: x.len().min(y.len()),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y.iter()) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(FitError::DegenerateAbscissae);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// OLS of `ln(value)` on `ln(abscissa)`; both must be positive.
pub fn log_log_fit(pairs: &[(f64, f64)]) -> Result<LineFit, FitError> {
    if pairs.len() < 4 {
        return Err(FitError::TooFewPoints {
            needed: 4,
            got: pairs.len(),
        });
    }
    let mut xs = Vec::with_capacity(pairs.len());
    let mut ys = Vec::with_capacity(pairs.len());
    for (i, &(a, v)) in pairs.iter().enumerate() {
        if a <= 0.0 || !a.is_finite() {
            return Err(FitError::NonPositiveValue(a, i));
        }
        if v <= 0.0 || !v.is_finite() {
            return Err(FitError::NonPositiveValue(v, i));
        }
        xs.push(a.ln());
        ys.push(v.ln());
    }
    ols(&xs, &ys)
}

/// OLS of `ln(value)` on `ln(1 + |t|)`: the growth-exponent fit of the
/// t-sweeps.
pub fn fit_growth_exponent(pairs: &[(f64, f64)]) -> Result<LineFit, FitError> {
    let transformed: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(t, v)| (crate::bracket(t), v))
        .collect();
    log_log_fit(&transformed)
}
