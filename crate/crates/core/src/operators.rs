//! Fourier multiplier operators on discrete d-dimensional tori: the half
//! Laplacian symbol, spectral multipliers f(A), semigroups and wave families,
//! certified lower bounds for L^p -> L^p operator norms, Gaussian-sum and
//! square-function norms, and gamma-bound estimators.
//!
//! Operator p-norms for p != 2 are NP-hard in general; every estimate here is
//! a lower bound with an attaining certificate field. At p = 2 the pure-mode
//! candidates make the bound exact (Plancherel).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::fft;
use crate::func::{EvalError, FuncExpr};
use crate::rng::SeededRng;

/// Grids above this total point count are rejected; keeps every experiment at
/// desk scale.
pub const MAX_TOTAL_POINTS: usize = 1 << 24;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("points per axis {0} is not a power of two >= 2")]
    BadAxisLength(usize),
    #[error("period must be positive, got {0}")]
    BadPeriod(f64),
    #[error("grid has {total} points, cap is {cap}")]
    GridTooLarge { total: usize, cap: usize },
    #[error("value length {got} does not match grid size {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("fields live on different grids")]
    MismatchedGrids,
    #[error("exponent must satisfy p >= 1, got {0}")]
    BadExponent(f64),
    #[error("exponent must lie in (1, inf) for the ascent, got {0}")]
    ExponentNotAscendable(f64),
    #[error("symbol must be real and nonnegative (bin {bin}: {re}+{im}i)")]
    SymbolNotNonnegativeReal { bin: usize, re: f64, im: f64 },
    #[error("multiplier function undefined at symbol value {value} (bin {bin}): {source}")]
    MultiplierUndefined {
        bin: usize,
        value: f64,
        source: EvalError,
    },
    #[error("empty operator family")]
    EmptyFamily,
    #[error("empty field list")]
    EmptyFields,
    #[error("field is zero (or zero after mean removal)")]
    ZeroField,
    #[error("lambda {re}+{im}i lies inside the closed sector of angle {theta}")]
    LambdaInSector { re: f64, im: f64, theta: f64 },
    #[error("rotation angle must satisfy |theta| < pi/2, got {0}")]
    BadTheta(f64),
    #[error("time parameter must be positive, got {0}")]
    BadTime(f64),
    #[error("need beta >= alpha > 0, got alpha {alpha}, beta {beta}")]
    BadWaveOrders { alpha: f64, beta: f64 },
    #[error("dyadic family [2^{k_min}, 2^{k_max}] does not cover the symbol range [{lo:.3e}, {hi:.3e}]")]
    FamilyCoverage {
        k_min: i32,
        k_max: i32,
        lo: f64,
        hi: f64,
    },
    #[error("need at least {needed} Monte Carlo {what}, got {got}")]
    BudgetTooSmall {
        what: &'static str,
        needed: usize,
        got: usize,
    },
}

/// Discrete d-dimensional torus: `n_per_axis` points per axis (a power of
/// two) over physical period `period`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusGrid {
    dim: usize,
    n_per_axis: usize,
    period: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n_per_axis: usize, period: f64) -> Result<Self, OperatorError> {
        if !(1..=3).contains(&dim) {
            return Err(OperatorError::BadDimension(dim));
        }
        if n_per_axis < 2 || !fft::is_power_of_two(n_per_axis) {
            return Err(OperatorError::BadAxisLength(n_per_axis));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(OperatorError::BadPeriod(period));
        }
        let total = n_per_axis.pow(dim as u32);
        if total > MAX_TOTAL_POINTS {
            return Err(OperatorError::GridTooLarge {
                total,
                cap: MAX_TOTAL_POINTS,
            });
        }
        Ok(Self {
            dim,
            n_per_axis,
            period,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn total_points(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn mesh(&self) -> f64 {
        self.period / self.n_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.mesh().powi(self.dim as i32)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n_per_axis; self.dim]
    }

    /// Signed frequency indices of a flat bin, axis 0 slowest.
    pub fn bin_to_signed(&self, mut bin: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        for axis in (0..self.dim).rev() {
            let k = bin % self.n_per_axis;
            bin /= self.n_per_axis;
            out[axis] = fft::signed_bin(k, self.n_per_axis);
        }
        out
    }

    /// Frequency vector (2 pi / L) * k of a flat bin.
    pub fn frequency(&self, bin: usize) -> [f64; 3] {
        let scale = 2.0 * core::f64::consts::PI / self.period;
        let signed = self.bin_to_signed(bin);
        [
            signed[0] as f64 * scale,
            signed[1] as f64 * scale,
            signed[2] as f64 * scale,
        ]
    }

    /// Physical coordinates of a flat grid point index.
    pub fn coordinates(&self, mut idx: usize) -> [f64; 3] {
        let h = self.mesh();
        let mut out = [0.0f64; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = (idx % self.n_per_axis) as f64 * h;
            idx /= self.n_per_axis;
        }
        out
    }

    /// Flat bin of signed frequency indices.
    pub fn signed_to_bin(&self, k: &[i64]) -> usize {
        let mut bin = 0usize;
        for axis in 0..self.dim {
            bin = bin * self.n_per_axis + fft::bin_of_signed(k[axis], self.n_per_axis);
        }
        bin
    }
}

/// Complex field on a torus grid (row-major, axis 0 slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn from_values(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self, OperatorError> {
        if values.len() != grid.total_points() {
            return Err(OperatorError::ShapeMismatch {
                got: values.len(),
                want: grid.total_points(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zero(grid: TorusGrid) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.total_points()],
            grid,
        }
    }

    /// Point mass at flat index `idx`.
    pub fn delta(grid: TorusGrid, idx: usize) -> Self {
        let mut f = Self::zero(grid);
        f.values[idx] = Complex64::new(1.0, 0.0);
        f
    }

    /// The pure mode `exp(i xi . x)` for the signed frequency indices `k`.
    pub fn pure_mode(grid: TorusGrid, k: &[i64]) -> Self {
        let n = grid.n_per_axis as i64;
        let total = grid.total_points();
        let mut values = Vec::with_capacity(total);
        for idx in 0..total {
            let mut phase = 0.0f64;
            let mut rem = idx;
            for axis in (0..grid.dim).rev() {
                let j = (rem % grid.n_per_axis) as i64;
                rem /= grid.n_per_axis;
                phase += 2.0 * core::f64::consts::PI * (k[axis] * j) as f64 / n as f64;
            }
            values.push(Complex64::new(phase.cos(), phase.sin()));
        }
        Self { grid, values }
    }

    /// Complex Gaussian white noise.
    pub fn random_normal(grid: TorusGrid, rng: &mut SeededRng) -> Self {
        let values = (0..grid.total_points())
            .map(|_| rng.complex_normal())
            .collect();
        Self { grid, values }
    }

    /// Gaussian envelope of width `sigma` centred mid-grid, modulated to the
    /// signed frequency `k`.
    pub fn modulated_gaussian(grid: TorusGrid, sigma: f64, k: &[i64]) -> Self {
        let mode = Self::pure_mode(grid, k);
        let center = grid.period / 2.0;
        let mut values = mode.values;
        for (idx, v) in values.iter_mut().enumerate() {
            let x = grid.coordinates(idx);
            let mut d2 = 0.0;
            for x_axis in x.iter().take(grid.dim) {
                // nearest periodic image
                let mut d = (x_axis - center).abs();
                d = d.min(grid.period - d);
                d2 += d * d;
            }
            *v *= (-d2 / (2.0 * sigma * sigma)).exp();
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Removes the zero-frequency component.
    pub fn project_mean_zero(&self) -> Self {
        let total = self.values.len() as f64;
        let mean = crate::pairwise_sum_complex(&self.values) / total;
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v - mean).collect(),
        }
    }
}

/// Discrete L^p norm with cell-volume weight; `p = f64::INFINITY` gives the
/// max norm.
pub fn lp_norm(field: &GridField, p: f64) -> Result<f64, OperatorError> {
    if p.is_infinite() && p > 0.0 {
        return Ok(field.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(OperatorError::BadExponent(p));
    }
    let powers: Vec<f64> = field.values.iter().map(|v| v.norm().powf(p)).collect();
    let sum = crate::pairwise_sum(&powers) * field.grid.cell_volume();
    Ok(sum.powf(1.0 / p))
}

/// A Fourier multiplier operator given by its symbol on the frequency
/// lattice. Composition of operators is the pointwise product of symbols.
#[derive(Debug, Clone)]
pub struct SymbolOperator {
    grid: TorusGrid,
    symbol: Vec<Complex64>,
    label: String,
}

/// What to do where the base symbol vanishes (the zero frequency for the half
/// Laplacian) when the multiplier function is not defined there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Evaluate the function at the symbol value and fail if undefined.
    Evaluate,
    /// Set the multiplier to zero on bins with vanishing base symbol,
    /// restricting the calculus to the mean-zero subspace.
    Annihilate,
}

/// Which discretization of |xi| the half-Laplacian symbol uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LaplacianVariant {
    /// |xi| evaluated at lattice frequencies.
    Continuum,
    /// sqrt(sum (2/h)^2 sin^2(xi h / 2)): the five-point stencil symbol.
    Discrete,
}

impl SymbolOperator {
    pub fn from_symbol(
        grid: TorusGrid,
        symbol: Vec<Complex64>,
        label: String,
    ) -> Result<Self, OperatorError> {
        if symbol.len() != grid.total_points() {
            return Err(OperatorError::ShapeMismatch {
                got: symbol.len(),
                want: grid.total_points(),
            });
        }
        Ok(Self {
            grid,
            symbol,
            label,
        })
    }

    pub fn identity(grid: TorusGrid) -> Self {
        Self {
            symbol: vec![Complex64::new(1.0, 0.0); grid.total_points()],
            grid,
            label: String::from("identity"),
        }
    }

    /// The square root of minus the Laplacian.
    pub fn laplacian_halfpower(grid: TorusGrid, variant: LaplacianVariant) -> Self {
        let h = grid.mesh();
        let total = grid.total_points();
        let mut symbol = Vec::with_capacity(total);
        for bin in 0..total {
            let xi = grid.frequency(bin);
            let v = match variant {
                LaplacianVariant::Continuum => {
                    let mut s = 0.0;
                    for x in xi.iter().take(grid.dim) {
                        s += x * x;
                    }
                    s.sqrt()
                }
                LaplacianVariant::Discrete => {
                    let mut s = 0.0;
                    for x in xi.iter().take(grid.dim) {
                        let t = (2.0 / h) * (x * h / 2.0).sin();
                        s += t * t;
                    }
                    s.sqrt()
                }
            };
            symbol.push(Complex64::new(v, 0.0));
        }
        Self {
            grid,
            symbol,
            label: match variant {
                LaplacianVariant::Continuum => String::from("half_laplacian"),
                LaplacianVariant::Discrete => String::from("half_laplacian_discrete"),
            },
        }
    }

    /// The spectral multiplier f(A): evaluates `f` on the symbol of `base`.
    pub fn from_spectral_function(
        f: &FuncExpr,
        base: &SymbolOperator,
        zero_mode: ZeroModePolicy,
        label: String,
    ) -> Result<Self, OperatorError> {
        let mut symbol = Vec::with_capacity(base.symbol.len());
        for (bin, s) in base.symbol.iter().enumerate() {
            if zero_mode == ZeroModePolicy::Annihilate && s.norm_sqr() == 0.0 {
                symbol.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let v = f
                .eval(*s)
                .map_err(|source| OperatorError::MultiplierUndefined {
                    bin,
                    value: s.re,
                    source,
                })?;
            symbol.push(v);
        }
        Ok(Self {
            grid: base.grid,
            symbol,
            label,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Requires the symbol to be real and nonnegative (the 0-sectorial
    /// setting) and returns the real values.
    pub fn nonnegative_real_symbol(&self) -> Result<Vec<f64>, OperatorError> {
        let mut out = Vec::with_capacity(self.symbol.len());
        for (bin, s) in self.symbol.iter().enumerate() {
            if s.im.abs() > 1e-12 * (1.0 + s.re.abs()) || s.re < 0.0 {
                return Err(OperatorError::SymbolNotNonnegativeReal {
                    bin,
                    re: s.re,
                    im: s.im,
                });
            }
            out.push(s.re);
        }
        Ok(out)
    }

    /// Applies the operator: FFT, pointwise symbol product, inverse FFT.
    pub fn apply(&self, g: &GridField) -> Result<GridField, OperatorError> {
        if g.grid != self.grid {
            return Err(OperatorError::MismatchedGrids);
        }
        let shape = self.grid.shape();
        let mut buf = g.values.clone();
        fft::forward_nd(&shape, &mut buf);
        for (v, m) in buf.iter_mut().zip(self.symbol.iter()) {
            *v *= *m;
        }
        fft::inverse_nd(&shape, &mut buf);
        Ok(GridField {
            grid: self.grid,
            values: buf,
        })
    }

    /// Pointwise symbol product (operator composition).
    pub fn compose(&self, other: &SymbolOperator) -> Result<SymbolOperator, OperatorError> {
        if other.grid != self.grid {
            return Err(OperatorError::MismatchedGrids);
        }
        let symbol = self
            .symbol
            .iter()
            .zip(other.symbol.iter())
            .map(|(a, b)| a * b)
            .collect();
        Ok(SymbolOperator {
            grid: self.grid,
            symbol,
            label: alloc::format!("{}*{}", self.label, other.label),
        })
    }

    /// L^2 adjoint: the conjugate symbol.
    pub fn adjoint(&self) -> SymbolOperator {
        SymbolOperator {
            grid: self.grid,
            symbol: self.symbol.iter().map(|s| s.conj()).collect(),
            label: alloc::format!("{}^*", self.label),
        }
    }

    /// Max of |symbol| and its flat bin.
    pub fn sup_abs_symbol(&self) -> (f64, usize) {
        let mut best = 0.0;
        let mut arg = 0;
        for (bin, s) in self.symbol.iter().enumerate() {
            let v = s.norm();
            if v > best {
                best = v;
                arg = bin;
            }
        }
        (best, arg)
    }
}

/// Applies the spectral multiplier f(A) to a field.
pub fn apply_multiplier(
    f: &FuncExpr,
    a: &SymbolOperator,
    g: &GridField,
    zero_mode: ZeroModePolicy,
) -> Result<GridField, OperatorError> {
    let op = SymbolOperator::from_spectral_function(f, a, zero_mode, String::from("f(A)"))?;
    op.apply(g)
}

/// Budget for the p-norm lower-bound search.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpNormBudget {
    pub max_iters: usize,
    pub tol: f64,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for OpNormBudget {
    fn default() -> Self {
        Self {
            max_iters: 60,
            tol: 1e-9,
            random_starts: 4,
            seed: 0x6d6c6162,
        }
    }
}

/// A certified lower bound on an operator p-norm.
#[derive(Debug, Clone)]
pub struct OpNormEstimate {
    pub lower_bound: f64,
    pub certificate: GridField,
    pub converged: bool,
    pub iterations: usize,
}

fn dual_signed_power(v: &[Complex64], q: f64) -> Vec<Complex64> {
    // |v|^(q-1) * phase(v)
    v.iter()
        .map(|z| {
            let m = z.norm();
            if m == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (z / m) * m.powf(q - 1.0)
            }
        })
        .collect()
}

fn ratio_for(
    op: &SymbolOperator,
    x: &GridField,
    p: f64,
) -> Result<Option<(f64, GridField)>, OperatorError> {
    let nx = lp_norm(x, p)?;
    if nx == 0.0 || !nx.is_finite() {
        return Ok(None);
    }
    let y = op.apply(x)?;
    let ny = lp_norm(&y, p)?;
    Ok(Some((ny / nx, x.clone())))
}

/// Lower bound on `||T||_{p->p}` from a structured test family (pure modes,
/// point masses, modulated Gaussians, kernel columns, random fields) followed
/// by a dual-exponent fixed-point ascent from the best candidate. Returns the
/// best iterate with `converged = false` when the ascent hits the iteration
/// cap while still improving.
pub fn opnorm_estimate(
    op: &SymbolOperator,
    p: f64,
    budget: &OpNormBudget,
) -> Result<OpNormEstimate, OperatorError> {
    if !(p > 1.0) || p.is_infinite() {
        return Err(OperatorError::ExponentNotAscendable(p));
    }
    let grid = op.grid;
    let mut rng = SeededRng::new(budget.seed);
    let mut best: Option<(f64, GridField)> = None;

    let consider = |cand: Option<(f64, GridField)>, best: &mut Option<(f64, GridField)>| {
        if let Some((r, x)) = cand {
            if r.is_finite() && best.as_ref().map_or(true, |(b, _)| r > *b) {
                *best = Some((r, x));
            }
        }
    };

    // pure modes at the strongest symbol bins (exact at p = 2)
    let mut top_bins: Vec<(f64, usize)> = Vec::new();
    for (bin, s) in op.symbol.iter().enumerate() {
        let v = s.norm();
        if top_bins.len() < 5 {
            top_bins.push((v, bin));
            top_bins.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
        } else if v > top_bins[4].0 {
            top_bins[4] = (v, bin);
            top_bins.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
        }
    }
    for &(_, bin) in &top_bins {
        let k = grid.bin_to_signed(bin);
        let mode = GridField::pure_mode(grid, &k[..grid.dim]);
        consider(ratio_for(op, &mode, p)?, &mut best);
        // modulated Gaussians around the same frequency
        for denom in [8.0, 32.0] {
            let g = GridField::modulated_gaussian(grid, grid.period / denom, &k[..grid.dim]);
            consider(ratio_for(op, &g, p)?, &mut best);
        }
    }

    // point mass and the kernel column it produces
    let delta = GridField::delta(grid, grid.total_points() / 2);
    consider(ratio_for(op, &delta, p)?, &mut best);
    let kernel = op.apply(&delta)?;
    consider(ratio_for(op, &kernel, p)?, &mut best);

    for _ in 0..budget.random_starts {
        let x = GridField::random_normal(grid, &mut rng);
        consider(ratio_for(op, &x, p)?, &mut best);
    }

    let (mut best_ratio, mut best_x) = best.ok_or(OperatorError::ZeroField)?;

    // dual-exponent ascent (power iteration through the p and p' dual maps)
    let q = p / (p - 1.0);
    let adjoint = op.adjoint();
    let mut x = best_x.clone();
    let mut converged = false;
    let mut iterations = 0usize;
    for it in 0..budget.max_iters {
        iterations = it + 1;
        let y = op.apply(&x)?;
        let w = GridField {
            grid,
            values: dual_signed_power(&y.values, p),
        };
        let z = adjoint.apply(&w)?;
        let x_next = GridField {
            grid,
            values: dual_signed_power(&z.values, q),
        };
        match ratio_for(op, &x_next, p)? {
            Some((r, xn)) => {
                let gain = r - best_ratio;
                if r > best_ratio {
                    best_ratio = r;
                    best_x = xn.clone();
                }
                x = xn;
                if gain.abs() <= budget.tol * best_ratio.max(1e-300) {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = true; // landed in the kernel of T; keep the best
                break;
            }
        }
    }
    Ok(OpNormEstimate {
        lower_bound: best_ratio,
        certificate: best_x,
        converged,
        iterations,
    })
}

/// `|| (sum_k |x_k|^2)^(1/2) ||_p` of a finite field family.
pub fn square_function_norm(fields: &[GridField], p: f64) -> Result<f64, OperatorError> {
    let first = fields.first().ok_or(OperatorError::EmptyFields)?;
    let grid = first.grid;
    for f in fields {
        if f.grid != grid {
            return Err(OperatorError::MismatchedGrids);
        }
    }
    let mut agg = vec![0.0f64; grid.total_points()];
    for f in fields {
        for (a, v) in agg.iter_mut().zip(f.values.iter()) {
            *a += v.norm_sqr();
        }
    }
    let sq = GridField {
        grid,
        values: agg
            .into_iter()
            .map(|s| Complex64::new(s.sqrt(), 0.0))
            .collect(),
    };
    lp_norm(&sq, p)
}

/// Monte Carlo estimate of the Gaussian-sum norm
/// `(E || sum_k g_k x_k ||_p^2)^(1/2)` with real standard normal weights.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianSumEstimate {
    pub norm: f64,
    pub norm_stderr: f64,
    pub mean_square: f64,
    pub mean_square_stderr: f64,
    pub samples: usize,
}

pub fn gaussian_sum_norm(
    fields: &[GridField],
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<GaussianSumEstimate, OperatorError> {
    let first = fields.first().ok_or(OperatorError::EmptyFields)?;
    let grid = first.grid;
    for f in fields {
        if f.grid != grid {
            return Err(OperatorError::MismatchedGrids);
        }
    }
    if samples < 100 {
        return Err(OperatorError::BudgetTooSmall {
            what: "samples",
            needed: 100,
            got: samples,
        });
    }
    let mut rng = SeededRng::new(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let total = grid.total_points();
    let mut acc = vec![Complex64::new(0.0, 0.0); total];
    for _ in 0..samples {
        for v in acc.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for f in fields {
            let g = rng.standard_normal();
            for (a, v) in acc.iter_mut().zip(f.values.iter()) {
                *a += g * v;
            }
        }
        let field = GridField {
            grid,
            values: core::mem::take(&mut acc),
        };
        let nm = lp_norm(&field, p)?;
        acc = field.values;
        let y = nm * nm;
        sum += y;
        sum_sq += y * y;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let mean_stderr = (var / n).sqrt();
    let norm = mean.sqrt();
    // delta method for the square root
    let norm_stderr = if norm > 0.0 {
        mean_stderr / (2.0 * norm)
    } else {
        mean_stderr.sqrt()
    };
    Ok(GaussianSumEstimate {
        norm,
        norm_stderr,
        mean_square: mean,
        mean_square_stderr: mean_stderr,
        samples,
    })
}

/// A finite family of multiplier operators on a shared grid.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    members: Vec<SymbolOperator>,
}

impl OperatorFamily {
    pub fn new(members: Vec<SymbolOperator>) -> Result<Self, OperatorError> {
        let first = members.first().ok_or(OperatorError::EmptyFamily)?;
        let grid = first.grid;
        for m in &members {
            if m.grid != grid {
                return Err(OperatorError::MismatchedGrids);
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[SymbolOperator] {
        &self.members
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.members[0].grid
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Which random-sum norm the gamma estimator compares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    /// Square-function ratios (the L^p equivalence route).
    SquareFunction,
    /// Genuine Gaussian-sum ratios with this many Monte Carlo samples.
    GaussianSum { samples: usize },
}

#[derive(Debug, Clone)]
pub struct GammaEstimate {
    pub lower_bound: f64,
    /// Standard error of the best trial's ratio (zero in square-function
    /// mode, where ratios are deterministic).
    pub stderr: f64,
    pub trials: usize,
}

/// Lower estimate of the gamma-bound of a family: the best ratio of random
/// sums over sampled finite selections, seeded inputs, and the per-member
/// certificates of the p-norm ascent. Any finite computation only ever
/// certifies a lower bound.
pub fn gamma_bound_estimate(
    family: &OperatorFamily,
    p: f64,
    trials: usize,
    seed: u64,
    mode: GammaMode,
    opnorm_budget: &OpNormBudget,
) -> Result<GammaEstimate, OperatorError> {
    if trials < 10 {
        return Err(OperatorError::BudgetTooSmall {
            what: "trials",
            needed: 10,
            got: trials,
        });
    }
    let grid = *family.grid();
    let mut rng = SeededRng::new(seed);
    let mut best = 0.0f64;
    let mut best_stderr = 0.0f64;
    let mut used = 0usize;

    let ratio_of = |ops: &[&SymbolOperator],
                    xs: &[GridField],
                    trial_seed: u64|
     -> Result<Option<(f64, f64)>, OperatorError> {
        let mut images = Vec::with_capacity(ops.len());
        for (op, x) in ops.iter().zip(xs.iter()) {
            images.push(op.apply(x)?);
        }
        match mode {
            GammaMode::SquareFunction => {
                let den = square_function_norm(xs, p)?;
                if den == 0.0 {
                    return Ok(None);
                }
                let num = square_function_norm(&images, p)?;
                Ok(Some((num / den, 0.0)))
            }
            GammaMode::GaussianSum { samples } => {
                let den = gaussian_sum_norm(xs, p, samples, trial_seed)?;
                if den.norm == 0.0 {
                    return Ok(None);
                }
                let num = gaussian_sum_norm(&images, p, samples, trial_seed ^ 0x9e3779b9)?;
                let r = num.norm / den.norm;
                // first-order error propagation for the ratio
                let rel =
                    (num.norm_stderr / num.norm.max(1e-300)).hypot(den.norm_stderr / den.norm);
                Ok(Some((r, r * rel)))
            }
        }
    };

    // singleton selections with the p-norm certificates: gamma >= sup ||T||
    for member in family.members() {
        let est = opnorm_estimate(member, p, opnorm_budget)?;
        used += 1;
        if let Some((r, se)) = ratio_of(&[member], &[est.certificate], seed ^ used as u64)? {
            if r > best {
                best = r;
                best_stderr = se;
            }
        }
    }

    // random finite selections with random inputs
    let max_sel = family.len().min(8).max(1);
    for t in 0..trials {
        let count = 1 + rng.below(max_sel);
        let ops: Vec<&SymbolOperator> = (0..count)
            .map(|_| &family.members()[rng.below(family.len())])
            .collect();
        let xs: Vec<GridField> = (0..count)
            .map(|_| GridField::random_normal(grid, &mut rng))
            .collect();
        used += 1;
        if let Some((r, se)) = ratio_of(&ops, &xs, seed ^ (t as u64).wrapping_mul(0x517cc1b7))? {
            if r > best {
                best = r;
                best_stderr = se;
            }
        }
    }
    Ok(GammaEstimate {
        lower_bound: best,
        stderr: best_stderr,
        trials: used,
    })
}

/// Square-function ratio of the dyadic decomposition of `x` through the
/// functional calculus of `a`. The zero-frequency mode is projected out (the
/// calculus lives on the mean-zero subspace).
pub fn paley_littlewood_ratio(
    a: &SymbolOperator,
    family: &crate::partition::PartitionFamily,
    x: &GridField,
    p: f64,
) -> Result<f64, OperatorError> {
    let symbol = a.nonnegative_real_symbol()?;
    let (k_min, k_max) = family.index_range();
    // coverage of the nonzero symbol range
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &s in &symbol {
        if s > 0.0 {
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    if lo < (k_min as f64).exp2() || hi > (k_max as f64).exp2() {
        return Err(OperatorError::FamilyCoverage {
            k_min,
            k_max,
            lo,
            hi,
        });
    }
    let x0 = x.project_mean_zero();
    let den = lp_norm(&x0, p)?;
    if den == 0.0 {
        return Err(OperatorError::ZeroField);
    }
    let shape = a.grid.shape();
    let mut spectrum = x0.values.clone();
    fft::forward_nd(&shape, &mut spectrum);
    let mut fields = Vec::new();
    for band in family.indices() {
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .zip(symbol.iter())
            .map(|(c, &s)| c * family.eval(band, s))
            .collect();
        fft::inverse_nd(&shape, &mut buf);
        fields.push(GridField {
            grid: a.grid,
            values: buf,
        });
    }
    let num = square_function_norm(&fields, p)?;
    Ok(num / den)
}

/// Report of a resolvent-bound sweep.
#[derive(Debug, Clone)]
pub struct ResolventReport {
    pub max_value: f64,
    pub per_lambda: Vec<(Complex64, f64)>,
}

/// `sup || lambda (lambda - A)^{-1} ||` over sample points outside the closed
/// sector of angle `theta`. Exact at p = 2 (Plancherel), a certified lower
/// bound otherwise.
pub fn resolvent_check(
    a: &SymbolOperator,
    theta: f64,
    lambdas: &[Complex64],
    p: f64,
    budget: &OpNormBudget,
) -> Result<ResolventReport, OperatorError> {
    let symbol = a.nonnegative_real_symbol()?;
    let mut per_lambda = Vec::with_capacity(lambdas.len());
    let mut max_value = 0.0f64;
    for &lam in lambdas {
        if lam.arg().abs() <= theta {
            return Err(OperatorError::LambdaInSector {
                re: lam.re,
                im: lam.im,
                theta,
            });
        }
        let value = if p == 2.0 {
            symbol
                .iter()
                .map(|&s| (lam / (lam - s)).norm())
                .fold(0.0, f64::max)
        } else {
            let resolvent_symbol: Vec<Complex64> = symbol.iter().map(|&s| lam / (lam - s)).collect();
            let op = SymbolOperator::from_symbol(
                a.grid,
                resolvent_symbol,
                alloc::format!("lambda(lambda-A)^-1 @ {lam}"),
            )?;
            opnorm_estimate(&op, p, budget)?.lower_bound
        };
        max_value = max_value.max(value);
        per_lambda.push((lam, value));
    }
    Ok(ResolventReport {
        max_value,
        per_lambda,
    })
}

/// The rotated semigroup member `exp(-e^{i theta} t A)`.
pub fn semigroup_operator(
    a: &SymbolOperator,
    t: f64,
    theta: f64,
) -> Result<SymbolOperator, OperatorError> {
    if !(theta.abs() < core::f64::consts::FRAC_PI_2) {
        return Err(OperatorError::BadTheta(theta));
    }
    if !(t > 0.0) {
        return Err(OperatorError::BadTime(t));
    }
    let symbol = a.nonnegative_real_symbol()?;
    let rot = Complex64::new(0.0, theta).exp();
    let out = symbol.iter().map(|&s| (-rot * t * s).exp()).collect();
    SymbolOperator::from_symbol(a.grid, out, alloc::format!("exp(-e^(i {theta}) {t} A)"))
}

/// The regularized wave family `(1 + 2^k A)^{-beta} e^{i t 2^k A}` over the
/// scale range.
pub fn wave_family(
    a: &SymbolOperator,
    alpha: f64,
    beta: f64,
    t: f64,
    k_range: (i32, i32),
) -> Result<OperatorFamily, OperatorError> {
    if !(alpha > 0.0 && beta >= alpha) {
        return Err(OperatorError::BadWaveOrders { alpha, beta });
    }
    let symbol = a.nonnegative_real_symbol()?;
    let mut members = Vec::new();
    for k in k_range.0..=k_range.1 {
        let scale = (k as f64).exp2();
        let out: Vec<Complex64> = symbol
            .iter()
            .map(|&s| {
                let u = scale * s;
                let decay = (1.0 + u).powf(-beta);
                decay * Complex64::new(0.0, t * u).exp()
            })
            .collect();
        members.push(SymbolOperator::from_symbol(
            a.grid,
            out,
            alloc::format!("(1+2^{k} A)^(-{beta}) e^(i {t} 2^{k} A)"),
        )?);
    }
    OperatorFamily::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::builtins;
    use crate::partition::PartitionFamily;

    fn grid1d(n: usize, period: f64) -> TorusGrid {
        TorusGrid::new(1, n, period).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TorusGrid::new(4, 16, 1.0).is_err());
        assert!(TorusGrid::new(1, 17, 1.0).is_err());
        assert!(TorusGrid::new(3, 1024, 1.0).is_err()); // over the cap
        let g = TorusGrid::new(2, 16, 4.0).unwrap();
        assert_eq!(g.total_points(), 256);
        assert_eq!(g.cell_volume(), 0.0625);
    }

    #[test]
    fn halfpower_symbol_values() {
        let g = grid1d(16, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        // frequencies are the integers on this grid
        assert_eq!(a.symbol()[0], Complex64::new(0.0, 0.0));
        assert!((a.symbol()[3].re - 3.0).abs() < 1e-12);
        assert!((a.symbol()[13].re - 3.0).abs() < 1e-12); // signed bin -3
    }

    #[test]
    fn discrete_symbol_matches_continuum_at_low_modes() {
        let g = grid1d(512, 2.0 * core::f64::consts::PI);
        let c = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        let d = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Discrete);
        let h = g.mesh();
        for bin in 0..g.total_points() {
            let xi = g.frequency(bin)[0].abs();
            if xi > 0.0 && xi * h <= 0.1 {
                let rel = (d.symbol()[bin].re - c.symbol()[bin].re).abs() / c.symbol()[bin].re;
                assert!(rel < 1e-3, "bin {bin}: rel {rel}");
            }
        }
    }

    #[test]
    fn identity_multiplier_is_identity() {
        let g = grid1d(64, 8.0);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        let one = FuncExpr::constant(Complex64::new(1.0, 0.0));
        let mut rng = SeededRng::new(3);
        let x = GridField::random_normal(g, &mut rng);
        let y = apply_multiplier(&one, &a, &x, ZeroModePolicy::Evaluate).unwrap();
        for (u, v) in x.values().iter().zip(y.values().iter()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn multiplier_undefined_at_zero_is_reported() {
        let g = grid1d(32, 4.0);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        // x^i is undefined at the vanishing symbol value
        let f = builtins::power(Complex64::new(0.0, 1.0));
        let err = SymbolOperator::from_spectral_function(
            &f,
            &a,
            ZeroModePolicy::Evaluate,
            String::from("f(A)"),
        )
        .unwrap_err();
        assert!(matches!(err, OperatorError::MultiplierUndefined { .. }));
        // the mean-zero policy sidesteps it
        assert!(SymbolOperator::from_spectral_function(
            &f,
            &a,
            ZeroModePolicy::Annihilate,
            String::from("f(A)")
        )
        .is_ok());
    }

    #[test]
    fn composition_matches_symbol_product() {
        let g = grid1d(64, 8.0);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        let sq = FuncExpr::parse("x^2").unwrap();
        let lin = FuncExpr::identity();
        let mut rng = SeededRng::new(5);
        let x = GridField::random_normal(g, &mut rng);
        // f(A) with f = x^2 equals applying A twice
        let via_sq = apply_multiplier(&sq, &a, &x, ZeroModePolicy::Evaluate).unwrap();
        let once = apply_multiplier(&lin, &a, &x, ZeroModePolicy::Evaluate).unwrap();
        let twice = apply_multiplier(&lin, &a, &once, ZeroModePolicy::Evaluate).unwrap();
        let worst = via_sq
            .values()
            .iter()
            .zip(twice.values().iter())
            .map(|(u, v)| (u - v).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10);
    }

    #[test]
    fn lp_norm_values() {
        let g = grid1d(16, 4.0); // h = 0.25
        let delta = GridField::delta(g, 3);
        assert!((lp_norm(&delta, 1.0).unwrap() - 0.25).abs() < 1e-15);

        let ones = GridField::from_values(g, vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let want = 4.0f64.powf(1.0 / p); // L^{d/p}
            assert!((lp_norm(&ones, p).unwrap() - want).abs() < 1e-12);
        }
        assert!((lp_norm(&ones, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!(lp_norm(&ones, 0.5).is_err());
    }

    #[test]
    fn holder_consistency_on_random_field() {
        let g = grid1d(128, 8.0);
        let mut rng = SeededRng::new(17);
        let x = GridField::random_normal(g, &mut rng);
        let n1 = lp_norm(&x, 1.0).unwrap();
        let n2 = lp_norm(&x, 2.0).unwrap();
        let ninf = lp_norm(&x, f64::INFINITY).unwrap();
        // ||x||_2^2 <= ||x||_1 ||x||_inf (discrete weights included)
        assert!(n2 * n2 <= n1 * ninf * (1.0 + 1e-12));
    }

    #[test]
    fn opnorm_identity_and_p2_exactness() {
        let g = grid1d(64, 8.0);
        let id = SymbolOperator::identity(g);
        for p in [1.5, 2.0, 3.0] {
            let est = opnorm_estimate(&id, p, &OpNormBudget::default()).unwrap();
            assert!((est.lower_bound - 1.0).abs() < 1e-9, "p={p}");
        }

        let mut rng = SeededRng::new(11);
        for trial in 0..5 {
            let symbol: Vec<Complex64> = (0..64)
                .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
                .collect();
            let sup = symbol.iter().map(|s| s.norm()).fold(0.0, f64::max);
            let op = SymbolOperator::from_symbol(g, symbol, String::from("rand")).unwrap();
            let est = opnorm_estimate(&op, 2.0, &OpNormBudget::default()).unwrap();
            assert!(
                (est.lower_bound - sup).abs() < 1e-6 * sup.max(1.0),
                "trial {trial}: est {} sup {sup}",
                est.lower_bound
            );
        }
    }

    #[test]
    fn opnorm_duality_consistency() {
        // for these symmetric real-symbol models the p and p' norms coincide
        let g = grid1d(64, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        let f = builtins::f_alpha(0.5, 2.0).unwrap();
        let op = SymbolOperator::from_spectral_function(
            &f,
            &a,
            ZeroModePolicy::Evaluate,
            String::from("f(A)"),
        )
        .unwrap();
        let ep = opnorm_estimate(&op, 3.0, &OpNormBudget::default()).unwrap();
        let eq = opnorm_estimate(&op, 1.5, &OpNormBudget::default()).unwrap();
        let rel = (ep.lower_bound - eq.lower_bound).abs() / ep.lower_bound.max(eq.lower_bound);
        assert!(
            rel < 0.02,
            "p bound {} vs p' bound {}",
            ep.lower_bound,
            eq.lower_bound
        );
    }

    #[test]
    fn square_function_basics() {
        let g = grid1d(32, 4.0);
        let mut rng = SeededRng::new(7);
        let x = GridField::random_normal(g, &mut rng);
        let single = square_function_norm(core::slice::from_ref(&x), 3.0).unwrap();
        assert!((single - lp_norm(&x, 3.0).unwrap()).abs() < 1e-12);

        // k copies scale by sqrt(k)
        let copies = vec![x.clone(); 4];
        let quad = square_function_norm(&copies, 3.0).unwrap();
        assert!((quad - 2.0 * single).abs() < 1e-12);

        // Pythagoras for disjoint supports at p = 2
        let mut a = GridField::zero(g);
        let mut b = GridField::zero(g);
        a.values[2] = Complex64::new(2.0, 1.0);
        b.values[20] = Complex64::new(0.0, -3.0);
        let sq = square_function_norm(&[a.clone(), b.clone()], 2.0).unwrap();
        let want = (lp_norm(&a, 2.0).unwrap().powi(2) + lp_norm(&b, 2.0).unwrap().powi(2)).sqrt();
        assert!((sq - want).abs() < 1e-12);
    }

    #[test]
    fn gaussian_sum_single_field_recovers_lp() {
        let g = grid1d(32, 4.0);
        let mut rng = SeededRng::new(23);
        let x = GridField::random_normal(g, &mut rng);
        let est = gaussian_sum_norm(core::slice::from_ref(&x), 4.0, 2000, 99).unwrap();
        let want = lp_norm(&x, 4.0).unwrap();
        assert!(
            (est.norm - want).abs() <= 3.0 * est.norm_stderr,
            "est {} +- {} vs {}",
            est.norm,
            est.norm_stderr,
            want
        );
    }

    #[test]
    fn gaussian_sum_p2_second_moment() {
        let g = grid1d(32, 4.0);
        let mut rng = SeededRng::new(29);
        let fields: Vec<GridField> = (0..6)
            .map(|_| GridField::random_normal(g, &mut rng))
            .collect();
        let est = gaussian_sum_norm(&fields, 2.0, 4000, 17).unwrap();
        let want: f64 = fields
            .iter()
            .map(|f| lp_norm(f, 2.0).unwrap().powi(2))
            .sum();
        assert!(
            (est.mean_square - want).abs() <= 3.0 * est.mean_square_stderr,
            "mean square {} +- {} vs {}",
            est.mean_square,
            est.mean_square_stderr,
            want
        );
    }

    #[test]
    fn gaussian_sum_is_deterministic_under_seed() {
        let g = grid1d(16, 2.0);
        let mut rng = SeededRng::new(31);
        let fields: Vec<GridField> = (0..3)
            .map(|_| GridField::random_normal(g, &mut rng))
            .collect();
        let a = gaussian_sum_norm(&fields, 4.0, 500, 42).unwrap();
        let b = gaussian_sum_norm(&fields, 4.0, 500, 42).unwrap();
        assert_eq!(a.norm.to_bits(), b.norm.to_bits());
    }

    #[test]
    fn gamma_of_identity_family_is_one() {
        let g = grid1d(32, 4.0);
        let fam = OperatorFamily::new(vec![SymbolOperator::identity(g)]).unwrap();
        let est = gamma_bound_estimate(
            &fam,
            2.0,
            10,
            7,
            GammaMode::SquareFunction,
            &OpNormBudget::default(),
        )
        .unwrap();
        assert!((est.lower_bound - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_contraction_family_bounded_by_one() {
        // {c I : |c| <= 1}: the contraction principle puts the bound at 1
        let g = grid1d(32, 4.0);
        let mut rng = SeededRng::new(3);
        let members: Vec<SymbolOperator> = (0..6)
            .map(|i| {
                let c = Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5) * 1.4;
                let c = if c.norm() > 1.0 { c / c.norm() } else { c };
                SymbolOperator::from_symbol(g, vec![c; 32], alloc::format!("c{i} I")).unwrap()
            })
            .collect();
        let fam = OperatorFamily::new(members).unwrap();
        for mode in [
            GammaMode::SquareFunction,
            GammaMode::GaussianSum { samples: 400 },
        ] {
            let est =
                gamma_bound_estimate(&fam, 4.0, 20, 11, mode, &OpNormBudget::default()).unwrap();
            assert!(
                est.lower_bound <= 1.0 + 3.0 * est.stderr + 1e-9,
                "mode {mode:?}: {} +- {}",
                est.lower_bound,
                est.stderr
            );
        }
    }

    #[test]
    fn gamma_p2_equals_sup_norm() {
        let g = grid1d(64, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        let members: Vec<SymbolOperator> = [0.5f64, 1.0, 2.0]
            .iter()
            .map(|&t| semigroup_operator(&a, t, 0.3).unwrap())
            .collect();
        let sup = members
            .iter()
            .map(|m| m.sup_abs_symbol().0)
            .fold(0.0f64, f64::max);
        let fam = OperatorFamily::new(members).unwrap();
        let est = gamma_bound_estimate(
            &fam,
            2.0,
            10,
            5,
            GammaMode::SquareFunction,
            &OpNormBudget::default(),
        )
        .unwrap();
        assert!(
            (est.lower_bound - sup).abs() < 1e-3 * sup.max(1.0),
            "gamma {} vs sup {}",
            est.lower_bound,
            sup
        );
    }

    #[test]
    fn paley_littlewood_p2_band() {
        let g = grid1d(256, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        // symbol values: integers 1..128; family covering them
        let fam = PartitionFamily::dyadic(-2, 9).unwrap();
        // input concentrated where one window is 1: at the exact power 2^3
        // the neighbouring windows vanish
        let x = GridField::pure_mode(g, &[8]);
        let r = paley_littlewood_ratio(&a, &fam, &x, 2.0).unwrap();
        assert!((r - 1.0).abs() < 1e-9, "ratio {r}");

        let mut rng = SeededRng::new(37);
        for _ in 0..10 {
            let x = GridField::random_normal(g, &mut rng);
            let r = paley_littlewood_ratio(&a, &fam, &x, 2.0).unwrap();
            assert!(
                r >= (0.5f64).sqrt() - 1e-9 && r <= 1.0 + 1e-9,
                "p2 ratio {r} outside [2^-1/2, 1]"
            );
        }
    }

    #[test]
    fn paley_littlewood_coverage_check() {
        let g = grid1d(256, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        let narrow = PartitionFamily::dyadic(0, 3).unwrap();
        let x = GridField::pure_mode(g, &[8]);
        assert!(matches!(
            paley_littlewood_ratio(&a, &narrow, &x, 2.0),
            Err(OperatorError::FamilyCoverage { .. })
        ));
    }

    #[test]
    fn resolvent_bounds() {
        let g = grid1d(4096, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        // negative real lambda: |lambda/(lambda - s)| <= 1
        let rep = resolvent_check(
            &a,
            0.5,
            &[Complex64::new(-3.0, 0.0)],
            2.0,
            &OpNormBudget::default(),
        )
        .unwrap();
        assert!(rep.max_value <= 1.0 + 1e-12);

        // purely imaginary lambda: sup_s |lambda|/|lambda - s| -> 1
        let rep = resolvent_check(
            &a,
            0.5,
            &[Complex64::new(0.0, 700.0)],
            2.0,
            &OpNormBudget::default(),
        )
        .unwrap();
        assert!((rep.max_value - 1.0).abs() < 1e-6, "got {}", rep.max_value);

        // the closed-form geometry oracle off the pi/4 sector
        let theta = core::f64::consts::FRAC_PI_4;
        let lam = Complex64::from_polar(900.0, 3.0 * core::f64::consts::FRAC_PI_8);
        let rep = resolvent_check(&a, theta, &[lam], 2.0, &OpNormBudget::default()).unwrap();
        let dist = if lam.re > 0.0 { lam.im.abs() } else { lam.norm() };
        let want = lam.norm() / dist;
        assert!(
            (rep.max_value - want).abs() < 1e-6 * want,
            "got {} want {want}",
            rep.max_value
        );

        // samples inside the sector are rejected
        assert!(matches!(
            resolvent_check(
                &a,
                0.5,
                &[Complex64::new(1.0, 0.1)],
                2.0,
                &OpNormBudget::default()
            ),
            Err(OperatorError::LambdaInSector { .. })
        ));
    }

    #[test]
    fn semigroup_identities() {
        let g = grid1d(128, 16.0);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        // t -> 0: symbol deviation from 1 vanishes
        let tiny = semigroup_operator(&a, 1e-12, 0.0).unwrap();
        let dev = tiny
            .symbol()
            .iter()
            .map(|s| (s - Complex64::new(1.0, 0.0)).norm())
            .fold(0.0f64, f64::max);
        assert!(dev < 1e-9);

        // semigroup property S(t) S(s) = S(t+s)
        let s1 = semigroup_operator(&a, 0.7, 0.0).unwrap();
        let s2 = semigroup_operator(&a, 1.1, 0.0).unwrap();
        let s12 = semigroup_operator(&a, 1.8, 0.0).unwrap();
        let composed = s1.compose(&s2).unwrap();
        let worst = composed
            .symbol()
            .iter()
            .zip(s12.symbol().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12);

        assert!(semigroup_operator(&a, 1.0, 1.6).is_err());
        assert!(semigroup_operator(&a, -1.0, 0.0).is_err());
    }

    #[test]
    fn wave_family_p2_flatness() {
        let g = grid1d(256, 2.0 * core::f64::consts::PI);
        let a = SymbolOperator::laplacian_halfpower(g, LaplacianVariant::Continuum);
        // t = 0, k = 0 member is (1+A)^(-beta) with p=2 norm 1 (sup at s=0)
        let fam = wave_family(&a, 0.6, 0.6, 0.0, (0, 0)).unwrap();
        assert!((fam.members()[0].sup_abs_symbol().0 - 1.0).abs() < 1e-12);

        for t in [1.0, 8.0, 64.0] {
            let fam = wave_family(&a, 0.6, 0.6, t, (-4, 4)).unwrap();
            for m in fam.members() {
                // unimodular phase times a contraction: p = 2 norm stays 1
                assert!(m.sup_abs_symbol().0 <= 1.0 + 1e-12);
                assert!((m.sup_abs_symbol().0 - 1.0).abs() < 1e-9);
            }
        }
        assert!(wave_family(&a, 0.6, 0.5, 1.0, (0, 1)).is_err());
    }

    #[test]
    fn mean_zero_projection() {
        let g = grid1d(32, 4.0);
        let mut rng = SeededRng::new(41);
        let x = GridField::random_normal(g, &mut rng);
        let y = x.project_mean_zero();
        let mean: Complex64 = crate::pairwise_sum_complex(y.values()) / y.values().len() as f64;
        assert!(mean.norm() < 1e-13);
    }
}
