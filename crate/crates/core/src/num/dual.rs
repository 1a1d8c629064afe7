//! Forward-mode dual numbers.
//!
//! The flux functions, boundary-state maps and shock sensor are written
//! generically over [`Scalar`]; evaluating them on [`Dual`] values yields the
//! exact derivatives the Jacobian assembly needs, without hand-coded flux
//! Jacobians. `f64` implements the same trait for plain residual evaluation.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value plus `N` derivative lanes.
#[derive(Clone, Copy, Debug)]
pub struct Dual<const N: usize> {
    pub val: f64,
    pub der: [f64; N],
}

impl<const N: usize> Dual<N> {
    #[inline]
    pub fn constant(val: f64) -> Self {
        Dual { val, der: [0.0; N] }
    }

    /// Independent variable seeded on lane `lane`.
    #[inline]
    pub fn variable(val: f64, lane: usize) -> Self {
        let mut der = [0.0; N];
        der[lane] = 1.0;
        Dual { val, der }
    }
}

/// Scalar abstraction implemented by `f64` and [`Dual`].
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Primal value (derivative lanes dropped).
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powf(self, e: f64) -> Self;
    /// Multiply by a plain constant.
    fn scale(self, c: f64) -> Self;
    fn max(self, other: Self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    #[inline]
    fn scale(self, c: f64) -> Self {
        self * c
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
}

impl<const N: usize> Scalar for Dual<N> {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dual::constant(x)
    }
    #[inline]
    fn value(self) -> f64 {
        self.val
    }
    #[inline]
    fn sqrt(self) -> Self {
        let r = self.val.sqrt();
        let f = 0.5 / r;
        let mut der = self.der;
        for d in der.iter_mut() {
            *d *= f;
        }
        Dual { val: r, der }
    }
    #[inline]
    fn abs(self) -> Self {
        // subgradient sign(0) = 0 at the kink
        let s = if self.val > 0.0 {
            1.0
        } else if self.val < 0.0 {
            -1.0
        } else {
            0.0
        };
        let mut der = self.der;
        for d in der.iter_mut() {
            *d *= s;
        }
        Dual {
            val: self.val.abs(),
            der,
        }
    }
    #[inline]
    fn powf(self, e: f64) -> Self {
        let v = self.val.powf(e);
        let f = e * self.val.powf(e - 1.0);
        let mut der = self.der;
        for d in der.iter_mut() {
            *d *= f;
        }
        Dual { val: v, der }
    }
    #[inline]
    fn scale(self, c: f64) -> Self {
        let mut der = self.der;
        for d in der.iter_mut() {
            *d *= c;
        }
        Dual {
            val: self.val * c,
            der,
        }
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        if self.val >= other.val {
            self
        } else {
            other
        }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut der = self.der;
        for (d, r) in der.iter_mut().zip(rhs.der.iter()) {
            *d += r;
        }
        Dual {
            val: self.val + rhs.val,
            der,
        }
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut der = self.der;
        for (d, r) in der.iter_mut().zip(rhs.der.iter()) {
            *d -= r;
        }
        Dual {
            val: self.val - rhs.val,
            der,
        }
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut der = [0.0; N];
        for i in 0..N {
            der[i] = self.der[i] * rhs.val + self.val * rhs.der[i];
        }
        Dual {
            val: self.val * rhs.val,
            der,
        }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.val;
        let v = self.val * inv;
        let mut der = [0.0; N];
        for i in 0..N {
            der[i] = (self.der[i] - v * rhs.der[i]) * inv;
        }
        Dual { val: v, der }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let mut der = self.der;
        for d in der.iter_mut() {
            *d = -*d;
        }
        Dual {
            val: -self.val,
            der,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D3 = Dual<3>;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1.0);
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn arithmetic_derivatives_match_finite_differences() {
        let g = |x: f64| (x * x + 3.0 * x).sqrt() / (x + 2.0);
        let x0 = 1.7;
        let x = D3::variable(x0, 0);
        let y = (x * x + x.scale(3.0)).sqrt() / (x + D3::constant(2.0));
        assert!((y.val - g(x0)).abs() < 1e-14);
        assert!((y.der[0] - fd(g, x0)).abs() < 1e-8);
        assert_eq!(y.der[1], 0.0);
    }

    #[test]
    fn powf_and_abs() {
        let x = D3::variable(2.0, 1);
        let y = x.powf(1.5);
        assert!((y.der[1] - 1.5 * 2.0_f64.powf(0.5)).abs() < 1e-12);

        let z = (-x).abs();
        assert!((z.val - 2.0).abs() < 1e-15);
        assert!((z.der[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn max_picks_branch_derivative() {
        let a = D3::variable(1.0, 0);
        let b = D3::variable(2.0, 1);
        let m = a.max(b);
        assert_eq!(m.val, 2.0);
        assert_eq!(m.der, [0.0, 1.0, 0.0]);
    }
}
