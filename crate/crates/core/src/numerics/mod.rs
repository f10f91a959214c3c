//! Numerical building blocks: dense matrices, random streams, automatic
//! differentiation, a symmetric eigensolver and a direct DFT.

pub mod dft;
pub mod dual;
pub mod eigen;
pub mod fdcheck;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod tape;

pub use dft::{dft_magnitude, dft_real};
pub use dual::{Dual2, SecondOrderDual};
pub use eigen::{sym_eig, sym_eigvals, EigenSystem};
pub use fdcheck::{central_difference, finite_diff_check};
pub use linalg::{Matrix, Vector};
pub use rng::RngStream;
pub use scalar::Scalar;
pub use tape::{Tape, Var};

use crate::error::{Error, Result};

/// A scalar function `f(x, θ)` written once and evaluated over any
/// [`Scalar`] type.
pub trait ParametricFn {
    fn n_params(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn eval<S: Scalar>(&self, theta: &[S], x: &[S]) -> S;
}

fn check_lengths<F: ParametricFn + ?Sized>(f: &F, theta: usize, x: usize) -> Result<()> {
    if theta != f.n_params() {
        return Err(Error::Shape(format!(
            "expected {} parameters, got {theta}",
            f.n_params()
        )));
    }
    if x != f.input_dim() {
        return Err(Error::Shape(format!(
            "expected input of dimension {}, got {x}",
            f.input_dim()
        )));
    }
    Ok(())
}

/// `∂f/∂θ` at `x` by reverse mode.
pub fn grad_params<F: ParametricFn + ?Sized>(f: &F, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_lengths(f, theta.len(), x.len())?;
    let (value, grad) = gradient_of(theta, |th| {
        let xs: Vec<Var<'_>> = x.iter().map(|&v| Var::constant(v)).collect();
        f.eval(th, &xs)
    });
    if !value.is_finite() {
        return Err(Error::NumericalOverflow {
            location: "network output".into(),
        });
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::NumericalOverflow {
            location: format!("gradient entry {i}"),
        });
    }
    Ok(grad)
}

/// Value and gradient of an arbitrary reverse-mode computation over `θ`.
pub fn gradient_of<F>(theta: &[f64], f: F) -> (f64, Vec<f64>)
where
    F: for<'t> Fn(&[Var<'t>]) -> Var<'t>,
{
    let tape = Tape::with_capacity(1 << 12);
    let vars = tape.vars(theta);
    let out = f(&vars);
    (out.value(), tape.gradient(out, &vars))
}

/// `(f, ∂f/∂x_c, ∂²f/∂x_c²)` with θ held fixed.
pub fn input_derivatives<F: ParametricFn + ?Sized>(
    f: &F,
    theta: &[f64],
    x: &[f64],
    coord: usize,
) -> Result<(f64, f64, f64)> {
    check_lengths(f, theta.len(), x.len())?;
    let th: Vec<Dual2<f64>> = theta.iter().map(|&t| Dual2::constant(t)).collect();
    let j = input_jet(f, &th, x, coord)?;
    if !(j.v.is_finite() && j.d.is_finite() && j.dd.is_finite()) {
        return Err(Error::NumericalOverflow {
            location: "input derivatives".into(),
        });
    }
    Ok((j.v, j.d, j.dd))
}

/// The second-order jet of `f` along input `coord`, with θ of any scalar
/// type. With `S = Var` the jet components are differentiable in θ.
pub fn input_jet<F: ParametricFn + ?Sized, S: Scalar>(
    f: &F,
    theta: &[Dual2<S>],
    x: &[f64],
    coord: usize,
) -> Result<Dual2<S>> {
    if coord >= x.len() {
        return Err(Error::Index {
            index: coord,
            len: x.len(),
        });
    }
    let xs: Vec<Dual2<S>> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == coord {
                Dual2::variable(S::from_f64(v))
            } else {
                Dual2::constant(S::from_f64(v))
            }
        })
        .collect();
    Ok(f.eval(theta, &xs))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Linear;
    impl ParametricFn for Linear {
        fn n_params(&self) -> usize {
            2
        }
        fn input_dim(&self) -> usize {
            2
        }
        fn eval<S: Scalar>(&self, th: &[S], x: &[S]) -> S {
            th[0] * x[0] + th[1] * x[1]
        }
    }

    struct Constant;
    impl ParametricFn for Constant {
        fn n_params(&self) -> usize {
            3
        }
        fn input_dim(&self) -> usize {
            1
        }
        fn eval<S: Scalar>(&self, _th: &[S], _x: &[S]) -> S {
            S::from_f64(2.5)
        }
    }

    struct Square;
    impl ParametricFn for Square {
        fn n_params(&self) -> usize {
            0
        }
        fn input_dim(&self) -> usize {
            1
        }
        fn eval<S: Scalar>(&self, _th: &[S], x: &[S]) -> S {
            x[0] * x[0]
        }
    }

    #[test]
    fn linear_gradient_is_input() {
        assert_eq!(grad_params(&Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn constant_has_zero_gradient() {
        assert_eq!(grad_params(&Constant, &[1.0, 2.0, 3.0], &[0.1]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn square_jet() {
        assert_eq!(input_derivatives(&Square, &[], &[3.0], 0).unwrap(), (9.0, 6.0, 2.0));
    }

    #[test]
    fn coord_out_of_range() {
        assert!(matches!(
            input_derivatives(&Square, &[], &[3.0], 1),
            Err(Error::Index { index: 1, len: 1 })
        ));
    }

    #[test]
    fn length_mismatch_is_error() {
        assert!(grad_params(&Linear, &[1.0], &[3.0, 4.0]).is_err());
    }
}
