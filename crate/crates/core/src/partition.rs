//! The three partition-of-unity families: equidistant translates, dyadic
//! dilates, and the two-sided dyadic Fourier family, all generated from one
//! mother window.
//!
//! Mother window: the standard bump b(x) = exp(-1/(1-x^2)) divided by its
//! integer-shift periodization. The periodization is a locally finite sum
//! (at most two shifts meet any point), so the partition identity
//! `sum_n w(x - n) = 1` holds up to floating-point rounding, not up to a
//! truncation error.

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::func::{Domain, Expr, FuncExpr, FuncKind};

#[derive(Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("empty index range [{0}, {1}]")]
    EmptyRange(i32, i32),
    #[error("dyadic Fourier family needs n_abs_max >= 2, got {0}")]
    RangeTooSmall(i32),
    #[error("index {index} outside family range [{n_min}, {n_max}]")]
    IndexOutOfRange { index: i32, n_min: i32, n_max: i32 },
    #[error("widened window at {index} needs neighbours inside [{n_min}, {n_max}]")]
    WidenNeedsNeighbours { index: i32, n_min: i32, n_max: i32 },
}

/// Which of the paper's three families this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PartitionKind {
    Equidistant,
    Dyadic,
    DyadicFourier,
}

/// Window profile. `Standard` is the bump; `Squared` uses the squared bump,
/// giving a second compliant family for partition-independence experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WindowProfile {
    #[default]
    Standard,
    Squared,
}

fn raw_bump(x: f64, profile: WindowProfile) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let b = (-1.0 / (1.0 - x * x)).exp();
    match profile {
        WindowProfile::Standard => b,
        WindowProfile::Squared => b * b,
    }
}

/// Periodization of the bump over integer shifts; only the shifts with
/// |x - n| < 1 contribute.
fn periodized_bump(x: f64, profile: WindowProfile) -> f64 {
    let base = x.floor();
    let mut s = 0.0;
    for k in -1..=1 {
        s += raw_bump(x - (base + k as f64), profile);
    }
    s
}

/// The equidistant mother window: supp in [-1, 1], values in [0, 1],
/// sum of integer translates identically 1.
pub fn mother_window(x: f64, profile: WindowProfile) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    // rounding in the periodized sum can land a hair above 1
    (raw_bump(x, profile) / periodized_bump(x, profile)).min(1.0)
}

/// An indexed family of smooth windows.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartitionFamily {
    kind: PartitionKind,
    n_min: i32,
    n_max: i32,
    profile: WindowProfile,
}

impl PartitionFamily {
    /// Windows w_n(x) = w(x - n), n in [n_min, n_max].
    pub fn equidistant(n_min: i32, n_max: i32) -> Result<Self, PartitionError> {
        if n_min > n_max {
            return Err(PartitionError::EmptyRange(n_min, n_max));
        }
        Ok(Self {
            kind: PartitionKind::Equidistant,
            n_min,
            n_max,
            profile: WindowProfile::Standard,
        })
    }

    /// Windows w_n(t) = w0(2^-n t) with supp w0 in [1/2, 2], obtained from the
    /// equidistant mother through t -> log2 t.
    pub fn dyadic(n_min: i32, n_max: i32) -> Result<Self, PartitionError> {
        if n_min > n_max {
            return Err(PartitionError::EmptyRange(n_min, n_max));
        }
        Ok(Self {
            kind: PartitionKind::Dyadic,
            n_min,
            n_max,
            profile: WindowProfile::Standard,
        })
    }

    /// Two-sided family psi_n, |n| <= n_abs_max: psi_1 the dyadic mother,
    /// psi_n = psi_1(2^(1-n) .) for n >= 2, mirror rule for n <= -1, and
    /// psi_0 the symmetric remainder filling [-1, 1].
    pub fn dyadic_fourier(n_abs_max: i32) -> Result<Self, PartitionError> {
        if n_abs_max < 2 {
            return Err(PartitionError::RangeTooSmall(n_abs_max));
        }
        Ok(Self {
            kind: PartitionKind::DyadicFourier,
            n_min: -n_abs_max,
            n_max: n_abs_max,
            profile: WindowProfile::Standard,
        })
    }

    pub fn with_profile(mut self, profile: WindowProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn index_range(&self) -> (i32, i32) {
        (self.n_min, self.n_max)
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.n_min..=self.n_max
    }

    pub fn profile(&self) -> WindowProfile {
        self.profile
    }

    fn check_index(&self, n: i32) -> Result<(), PartitionError> {
        if n < self.n_min || n > self.n_max {
            return Err(PartitionError::IndexOutOfRange {
                index: n,
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        Ok(())
    }

    /// Window value; exactly 0 outside the declared support.
    pub fn eval(&self, n: i32, x: f64) -> f64 {
        match self.kind {
            PartitionKind::Equidistant => mother_window(x - n as f64, self.profile),
            PartitionKind::Dyadic => {
                if x <= 0.0 {
                    0.0
                } else {
                    mother_window(x.log2() - n as f64, self.profile)
                }
            }
            PartitionKind::DyadicFourier => self.eval_fourier(n, x),
        }
    }

    fn eval_fourier(&self, n: i32, x: f64) -> f64 {
        if n >= 1 {
            if x <= 0.0 {
                0.0
            } else {
                // psi_n = psi_1(2^(1-n) .), psi_1 the dyadic mother at scale 0
                mother_window(x.log2() - (n - 1) as f64, self.profile)
            }
        } else if n <= -1 {
            self.eval_fourier(-n, -x)
        } else {
            // psi_0: symmetric remainder 1 - sum_{|n| >= 1} psi_n, which
            // reduces to the dyadic tail below scale 0
            let a = x.abs();
            if a >= 1.0 {
                return 0.0;
            }
            if a == 0.0 {
                return 1.0;
            }
            let y = a.log2(); // < 0 here
            let mut s = 0.0;
            // contributions psi_1(2^j a) for j >= 1, i.e. mother(y + j); only
            // j with |y + j| < 1 contribute
            let lo = (-y - 1.0).ceil().max(1.0) as i64;
            let hi = (-y + 1.0).floor() as i64;
            for j in lo..=hi {
                s += mother_window(y + j as f64, self.profile);
            }
            s.min(1.0)
        }
    }

    /// Declared support interval of window n (open interval; the window is
    /// exactly zero outside).
    pub fn support(&self, n: i32) -> (f64, f64) {
        match self.kind {
            PartitionKind::Equidistant => ((n - 1) as f64, (n + 1) as f64),
            PartitionKind::Dyadic => (exp2_i(n - 1), exp2_i(n + 1)),
            PartitionKind::DyadicFourier => {
                if n >= 1 {
                    (exp2_i(n - 2), exp2_i(n))
                } else if n <= -1 {
                    (-exp2_i(-n), -exp2_i(-n - 2))
                } else {
                    (-1.0, 1.0)
                }
            }
        }
    }

    /// Sum of all windows in the family at `x`.
    pub fn sum_at(&self, x: f64) -> f64 {
        self.indices().map(|n| self.eval(n, x)).sum()
    }

    /// The widened window from the paper, w~_n = w_{n-1} + w_n + w_{n+1}.
    /// Requires both neighbours inside the index range.
    pub fn widen(&self, n: i32) -> Result<Window<'_>, PartitionError> {
        self.check_index(n)?;
        if n - 1 < self.n_min || n + 1 > self.n_max {
            return Err(PartitionError::WidenNeedsNeighbours {
                index: n,
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        Ok(Window {
            family: self,
            index: n,
            widened: true,
        })
    }

    /// A single window as an evaluable handle.
    pub fn window(&self, n: i32) -> Result<Window<'_>, PartitionError> {
        self.check_index(n)?;
        Ok(Window {
            family: self,
            index: n,
            widened: false,
        })
    }

    /// The mother window as a symbolic expression (independent evaluation
    /// path used by oracles and report embedding).
    pub fn base_window_expr(&self) -> FuncExpr {
        use alloc::sync::Arc;
        let b = |shift: f64| {
            Expr::Bump(Arc::new(Expr::Sub(
                Arc::new(Expr::Var),
                Arc::new(Expr::Const(Complex64::new(shift, 0.0))),
            )))
        };
        let num = b(0.0);
        let den = Expr::Add(
            Arc::new(Expr::Add(Arc::new(b(-1.0)), Arc::new(b(0.0)))),
            Arc::new(b(1.0)),
        );
        let mother = Expr::Div(Arc::new(num), Arc::new(den));
        let root = match self.kind {
            PartitionKind::Equidistant => mother,
            // mother(log2 x) for the dyadic families
            _ => {
                let log2x = Expr::Div(
                    Arc::new(Expr::Log(Arc::new(Expr::Var))),
                    Arc::new(Expr::Const(Complex64::new(core::f64::consts::LN_2, 0.0))),
                );
                crate::func::substitute_public(&mother, &log2x)
            }
        };
        FuncExpr::from_root(
            root,
            match self.kind {
                PartitionKind::Equidistant => Domain::RealLine,
                _ => Domain::PositiveHalfLine,
            },
            FuncKind::Builtin {
                name: String::from("mother_window"),
                params: Vec::new(),
            },
        )
    }

    /// JSON-free descriptor sufficient to reconstruct bit-identical windows.
    pub fn descriptor(&self) -> FamilyDescriptor {
        FamilyDescriptor {
            kind: self.kind,
            n_min: self.n_min,
            n_max: self.n_max,
            profile: self.profile,
        }
    }
}

fn exp2_i(n: i32) -> f64 {
    (n as f64).exp2()
}

/// Serializable family descriptor (kind, range, window profile).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FamilyDescriptor {
    pub kind: PartitionKind,
    pub n_min: i32,
    pub n_max: i32,
    pub profile: WindowProfile,
}

impl FamilyDescriptor {
    pub fn build(&self) -> Result<PartitionFamily, PartitionError> {
        let fam = match self.kind {
            PartitionKind::Equidistant => PartitionFamily::equidistant(self.n_min, self.n_max)?,
            PartitionKind::Dyadic => PartitionFamily::dyadic(self.n_min, self.n_max)?,
            PartitionKind::DyadicFourier => PartitionFamily::dyadic_fourier(self.n_max)?,
        };
        Ok(fam.with_profile(self.profile))
    }
}

/// A window (plain or widened) borrowed from its family.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    family: &'a PartitionFamily,
    index: i32,
    widened: bool,
}

impl Window<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        if self.widened {
            self.family.eval(self.index - 1, x)
                + self.family.eval(self.index, x)
                + self.family.eval(self.index + 1, x)
        } else {
            self.family.eval(self.index, x)
        }
    }

    pub fn index(&self) -> i32 {
        self.index
    }
}
