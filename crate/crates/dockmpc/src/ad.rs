//! Forward-mode automatic differentiation on first-order dual numbers.
//!
//! Every evaluator in this crate (dynamics rollout, coupling residuals, cost
//! terms, constraint rows) is written once, generically over [`Scalar`], and
//! instantiated at `f64` for plain evaluation and at [`Dual`] for exact
//! directional derivatives. Gradients and Jacobians are assembled by seeding
//! one coordinate per pass, so they are exact up to floating-point rounding
//! and bit-reproducible across runs.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic interface shared by `f64` and [`Dual`].
///
/// Mixed `T ∘ f64` operator bounds let generic code combine decision
/// variables with plain parameters without wrapping every constant.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Real part; derivative information is discarded.
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tanh(self) -> Self;
    /// Four-quadrant arctangent; `self` is the ordinate (`y.atan2(x)`).
    fn atan2(self, x: Self) -> Self;
    /// |x|, with derivative `sign(x)` and the subgradient 0 at x = 0.
    fn abs(self) -> Self;
    /// max(0, x), with derivative 0 on the inactive branch and at x = 0.
    fn max_zero(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn max_zero(self) -> Self {
        if self > 0.0 {
            self
        } else {
            0.0
        }
    }
}

/// First-order dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    #[inline]
    pub fn constant(re: f64) -> Self {
        Dual { re, eps: 0.0 }
    }

    /// Seeds the variable with unit derivative.
    #[inline]
    pub fn variable(re: f64) -> Self {
        Dual { re, eps: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re + rhs.re,
            eps: self.eps + rhs.eps,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re - rhs.re,
            eps: self.eps - rhs.eps,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re * rhs.re,
            eps: self.eps * rhs.re + self.re * rhs.eps,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re / rhs.re,
            eps: (self.eps * rhs.re - self.re * rhs.eps) / (rhs.re * rhs.re),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual {
            re: -self.re,
            eps: -self.eps,
        }
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, rhs: f64) -> Dual {
        Dual {
            re: self.re + rhs,
            eps: self.eps,
        }
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, rhs: f64) -> Dual {
        Dual {
            re: self.re - rhs,
            eps: self.eps,
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, rhs: f64) -> Dual {
        Dual {
            re: self.re * rhs,
            eps: self.eps * rhs,
        }
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, rhs: f64) -> Dual {
        Dual {
            re: self.re / rhs,
            eps: self.eps / rhs,
        }
    }
}

impl Scalar for Dual {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }

    #[inline]
    fn value(self) -> f64 {
        self.re
    }

    #[inline]
    fn sin(self) -> Self {
        Dual {
            re: self.re.sin(),
            eps: self.re.cos() * self.eps,
        }
    }

    #[inline]
    fn cos(self) -> Self {
        Dual {
            re: self.re.cos(),
            eps: -self.re.sin() * self.eps,
        }
    }

    #[inline]
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        Dual {
            re: t,
            eps: (1.0 - t * t) * self.eps,
        }
    }

    #[inline]
    fn atan2(self, x: Self) -> Self {
        let (y, x_) = (self.re, x.re);
        let denom = x_ * x_ + y * y;
        Dual {
            re: y.atan2(x_),
            // The origin is a genuine singularity; a zero derivative there
            // (like `abs` at 0) keeps iterates that graze it recoverable
            // instead of poisoning the whole gradient with NaN.
            eps: if denom > 0.0 {
                (x_ * self.eps - y * x.eps) / denom
            } else {
                0.0
            },
        }
    }

    #[inline]
    fn abs(self) -> Self {
        if self.re > 0.0 {
            self
        } else if self.re < 0.0 {
            -self
        } else {
            Dual {
                re: 0.0,
                eps: 0.0,
            }
        }
    }

    #[inline]
    fn max_zero(self) -> Self {
        if self.re > 0.0 {
            self
        } else {
            Dual {
                re: 0.0,
                eps: 0.0,
            }
        }
    }
}

/// Evaluates `f` and its full gradient by one forward pass per coordinate.
///
/// The returned value is the plain evaluation of `f` at `x` (taken from the
/// first pass); the gradient entry `i` is the ε-part of pass `i`.
pub fn value_and_gradient<F>(x: &[f64], mut f: F) -> (f64, Vec<f64>)
where
    F: FnMut(&[Dual]) -> Dual,
{
    let n = x.len();
    let mut seeded: Vec<Dual> = x.iter().map(|&v| Dual::constant(v)).collect();
    let mut grad = vec![0.0; n];
    let mut value = 0.0;
    for i in 0..n {
        seeded[i].eps = 1.0;
        let out = f(&seeded);
        seeded[i].eps = 0.0;
        if i == 0 {
            value = out.re;
        }
        grad[i] = out.eps;
    }
    if n == 0 {
        value = f(&seeded).re;
    }
    (value, grad)
}
