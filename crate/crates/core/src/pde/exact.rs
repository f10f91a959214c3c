//! Closed-form solutions, written over [`Scalar`] so input derivatives come
//! from dual numbers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::networks::{Channel, Jet, JetSpec};
use crate::numerics::{Dual2, Scalar};

/// Heat diffusivity `1/(500π)²`.
pub const HEAT_KAPPA: f64 = 1.0 / (500.0 * PI * 500.0 * PI);
/// Squared wave speed.
pub const WAVE_C2: f64 = 100.0;

/// `u(x) = sin(2πx) + 0.1 sin(50πx)`
pub fn poisson_exact<S: Scalar>(x: S) -> S {
    (x * (2.0 * PI)).sin() + (x * (50.0 * PI)).sin() * 0.1
}

/// `f = Δu = −4π² sin(2πx) − 250π² sin(50πx)`
pub fn poisson_source(x: &[f64]) -> f64 {
    let x = x[0];
    -4.0 * PI * PI * (2.0 * PI * x).sin() - 250.0 * PI * PI * (50.0 * PI * x).sin()
}

/// `u(x, t) = e^{−t} sin(500πx)`
pub fn heat_exact<S: Scalar>(x: S, t: S) -> S {
    (-t).exp() * (x * (500.0 * PI)).sin()
}

/// `u(x, 0) = sin(500πx)`
pub fn heat_initial(x: &[f64]) -> f64 {
    (500.0 * PI * x[0]).sin()
}

/// `u(x, t) = sin(πx) cos(10πt) + sin(2πx) cos(20πt)`
pub fn wave_exact<S: Scalar>(x: S, t: S) -> S {
    (x * PI).sin() * (t * (10.0 * PI)).cos() + (x * (2.0 * PI)).sin() * (t * (20.0 * PI)).cos()
}

/// Boundary and initial displacement data of the wave problem.
pub fn wave_boundary(x: &[f64]) -> f64 {
    wave_exact(x[0], x[1])
}

/// Zero data.
pub fn zero(_x: &[f64]) -> f64 {
    0.0
}

/// Exact solution of a benchmark with a closed form, at a point given in
/// network coordinates.
pub fn exact_value<S: Scalar>(benchmark: super::Benchmark, x: &[S]) -> Option<S> {
    use super::Benchmark::*;
    match benchmark {
        Poisson1d => Some(poisson_exact(x[0])),
        Heat1d => Some(heat_exact(x[0], x[1])),
        Wave1d => Some(wave_exact(x[0], x[1])),
        GrayScott2d => None,
    }
}

/// The exact solution's channels at `points`, laid out like a network jet,
/// with derivatives taken by second-order forward duals.
pub fn exact_jet(benchmark: super::Benchmark, points: &[f64], spec: &JetSpec) -> Result<Jet> {
    let d = spec.input_dim();
    if d == 0 || points.len() % d != 0 {
        return Err(Error::Shape("points do not match the jet input dimension".into()));
    }
    let n = points.len() / d;
    let channels = spec.channels();
    let mut data = vec![0.0; channels.len() * n];
    let missing = || Error::Parameter(format!("{} has no closed-form solution", benchmark.id()));
    for p in 0..n {
        let x = &points[p * d..(p + 1) * d];
        for (k, &ch) in channels.iter().enumerate() {
            data[k * n + p] = match ch {
                Channel::Value => exact_value(benchmark, x).ok_or_else(missing)?,
                Channel::D1(c) | Channel::D2(c) => {
                    let xs: Vec<Dual2<f64>> = x
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| {
                            if i == c {
                                Dual2::variable(v)
                            } else {
                                Dual2::constant(v)
                            }
                        })
                        .collect();
                    let u = exact_value(benchmark, &xs).ok_or_else(missing)?;
                    if matches!(ch, Channel::D1(_)) {
                        u.d
                    } else {
                        u.dd
                    }
                }
            };
        }
    }
    Jet::from_data(spec, n, 1, data)
}
