//! Training dynamics of a model linearized around its initialization:
//! under gradient flow on `½‖f − Y‖²` with a fixed kernel `K`,
//! `f(t) = (I − e^{−Kt}) Y` when started from zero.

use crate::error::{Error, Result};
use crate::numerics::linalg::dot;

use super::kernel::KernelEigenSystem;

fn check(sys: &KernelEigenSystem, y: &[f64], t: f64) -> Result<()> {
    if y.len() != sys.len() {
        return Err(Error::Shape(format!(
            "targets have length {}, kernel is {}x{}",
            y.len(),
            sys.len(),
            sys.len()
        )));
    }
    if t < 0.0 {
        return Err(Error::Parameter(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

/// `(I − Q e^{−Λt} Qᵀ) Y`.
pub fn linearized_dynamics(sys: &KernelEigenSystem, y: &[f64], t: f64) -> Result<Vec<f64>> {
    let modes = error_mode_decomposition(sys, y, t)?;
    Ok(y.iter()
        .zip(&modes.reconstruction)
        .map(|(a, e)| a - e)
        .collect())
}

/// Training error `e^{−Kt} Y` split into eigen-modes.
#[derive(Clone, Debug)]
pub struct ErrorModes {
    /// `e^{−λᵢt} qᵢᵀY`
    pub coefficients: Vec<f64>,
    /// `Σᵢ coefficientᵢ qᵢ`
    pub reconstruction: Vec<f64>,
}

pub fn error_mode_decomposition(sys: &KernelEigenSystem, y: &[f64], t: f64) -> Result<ErrorModes> {
    check(sys, y, t)?;
    let n = sys.len();
    let coefficients: Vec<f64> = (0..n)
        .map(|i| {
            let q = sys.vector(i);
            // Clamp tiny negative round-off so modes never grow.
            (-sys.values[i].max(0.0) * t).exp() * dot(&q, y)
        })
        .collect();
    let mut reconstruction = vec![0.0; n];
    for (i, c) in coefficients.iter().enumerate() {
        for (r, v) in reconstruction.iter_mut().enumerate() {
            *v += c * sys.vectors.get(r, i);
        }
    }
    Ok(ErrorModes {
        coefficients,
        reconstruction,
    })
}
