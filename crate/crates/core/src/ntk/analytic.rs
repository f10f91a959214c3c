//! The cosine kernel `K(x, x') = (1/m) Σ_k cos(b_kᵀ(x - x'))` of a two-layer
//! Fourier feature network whose last layer alone is trained.

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Dense kernel matrix on `points` (row-major `n × d`) for frequencies `b`
/// (`m × d`).
pub fn analytic_cos_kernel_matrix(b: &Matrix, points: &[f64]) -> Result<Matrix> {
    let d = b.cols();
    if d == 0 || points.len() % d != 0 {
        return Err(Error::Shape(format!(
            "points do not have dimension {d}"
        )));
    }
    let n = points.len() / d;
    let m = b.rows() as f64;
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        k.set(i, i, 1.0);
        for j in 0..i {
            let mut s = 0.0;
            for r in 0..b.rows() {
                let phase: f64 = (0..d)
                    .map(|c| b.get(r, c) * (points[i * d + c] - points[j * d + c]))
                    .sum();
                s += phase.cos();
            }
            k.set(i, j, s / m);
            k.set(j, i, s / m);
        }
    }
    Ok(k)
}

/// The two non-zero eigenvalues `(1 ± sin b / b) / 2` of the integral
/// operator with kernel `cos(b(x - x'))` on `[0, 1]`.
pub fn prop1_eigenvalues(b: f64) -> (f64, f64) {
    let sinc = if b.abs() < 1e-8 {
        1.0 - b * b / 6.0
    } else {
        b.sin() / b
    };
    ((1.0 + sinc) / 2.0, (1.0 - sinc) / 2.0)
}

/// `N` midpoint nodes of `[0, 1]` and the kernel matrix scaled by `1/N`,
/// whose eigenvalues approximate those of the integral operator.
pub fn discretized_cos_operator(b: f64, n: usize) -> Matrix {
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let inv = 1.0 / n as f64;
    Matrix::from_fn(n, n, |i, j| (b * (x[i] - x[j])).cos() * inv)
}

/// Minimum grid points per shortest wavelength accepted by
/// [`lemma1_residual`].
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 8.0;

/// Eigenvalues below this are treated as zero.
pub const NONZERO_EIGENVALUE: f64 = 1e-6;

/// Relative residual of the Helmholtz equation `g'' = -(‖B‖_F²/m) g` for
/// samples `g` on a uniform 1-D grid with spacing `h`, using the
/// three-point Laplacian on interior nodes:
/// `‖Δ_h g + (‖B‖_F²/m) g‖ / ‖g‖`.
pub fn lemma1_residual(g: &[f64], h: f64, b: &Matrix, eigenvalue: f64) -> Result<f64> {
    if eigenvalue <= NONZERO_EIGENVALUE {
        return Err(Error::Parameter(format!(
            "eigenvalue {eigenvalue:e} is not above {NONZERO_EIGENVALUE:e}"
        )));
    }
    if b.cols() != 1 {
        return Err(Error::Shape("Helmholtz check is one-dimensional".into()));
    }
    if g.len() < 3 || h <= 0.0 {
        return Err(Error::Parameter("need at least 3 samples and h > 0".into()));
    }
    let max_b = b.data().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max_b > 0.0 {
        let ppw = 2.0 * std::f64::consts::PI / max_b / h;
        if ppw < MIN_POINTS_PER_WAVELENGTH {
            return Err(Error::GridTooCoarse {
                points_per_wavelength: ppw,
                required: MIN_POINTS_PER_WAVELENGTH,
            });
        }
    }
    let c = b.frobenius_norm().powi(2) / b.rows() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..g.len() - 1 {
        let lap = (g[i - 1] - 2.0 * g[i] + g[i + 1]) / (h * h);
        num += (lap + c * g[i]).powi(2);
        den += g[i] * g[i];
    }
    if den == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((num / den).sqrt())
}
