//! Second-order forward-mode duals: value, first and second derivative along
//! one input direction.
//!
//! `Dual2<Var>` nests forward mode inside reverse mode, which is how residual
//! losses get exact parameter gradients through `u_xx`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2<T> {
    pub v: T,
    pub d: T,
    pub dd: T,
}

/// Second-order forward dual over `f64`.
pub type SecondOrderDual = Dual2<f64>;

impl<T: Scalar> Dual2<T> {
    pub fn new(v: T, d: T, dd: T) -> Self {
        Dual2 { v, d, dd }
    }

    /// The seeded input coordinate: derivative one, curvature zero.
    pub fn variable(v: T) -> Self {
        Dual2 {
            v,
            d: T::from_f64(1.0),
            dd: T::zero(),
        }
    }

    pub fn constant(v: T) -> Self {
        Dual2 {
            v,
            d: T::zero(),
            dd: T::zero(),
        }
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    #[inline]
    fn chain(self, f: T, df: T, d2f: T) -> Self {
        Dual2 {
            v: f,
            d: df * self.d,
            dd: d2f * self.d * self.d + df * self.dd,
        }
    }
}

impl<T: Scalar> Add for Dual2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual2::new(self.v + rhs.v, self.d + rhs.d, self.dd + rhs.dd)
    }
}

impl<T: Scalar> Sub for Dual2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual2::new(self.v - rhs.v, self.d - rhs.d, self.dd - rhs.dd)
    }
}

impl<T: Scalar> Mul for Dual2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual2::new(
            self.v * rhs.v,
            self.d * rhs.v + self.v * rhs.d,
            self.dd * rhs.v + (self.d * rhs.d) * 2.0 + self.v * rhs.dd,
        )
    }
}

impl<T: Scalar> Div for Dual2<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // a / b = a * (1/b)
        let inv = T::from_f64(1.0) / rhs.v;
        let inv2 = inv * inv;
        let recip = rhs.chain(inv, -inv2, inv2 * inv * 2.0);
        self * recip
    }
}

impl<T: Scalar> Neg for Dual2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual2::new(-self.v, -self.d, -self.dd)
    }
}

impl<T: Scalar> Add<f64> for Dual2<T> {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Dual2::new(self.v + rhs, self.d, self.dd)
    }
}

impl<T: Scalar> Sub<f64> for Dual2<T> {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        Dual2::new(self.v - rhs, self.d, self.dd)
    }
}

impl<T: Scalar> Mul<f64> for Dual2<T> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Dual2::new(self.v * rhs, self.d * rhs, self.dd * rhs)
    }
}

impl<T: Scalar> Scalar for Dual2<T> {
    fn from_f64(v: f64) -> Self {
        Dual2::constant(T::from_f64(v))
    }

    fn value(&self) -> f64 {
        self.v.value()
    }

    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let s = -(t * t) + 1.0;
        self.chain(t, s, t * s * -2.0)
    }

    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
}
