use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the generic (oracle) network code.
///
/// Implemented for `f64`, reverse-mode [`Var`](super::tape::Var) and the
/// second-order forward dual [`Dual2`](super::dual::Dual2), so the same
/// function body can be evaluated plainly, differentiated in its
/// parameters, in its inputs, or both at once.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn tanh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
}
