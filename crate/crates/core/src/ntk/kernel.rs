use crate::error::{Error, Result};
use crate::networks::{JetSpec, Network};
use crate::numerics::linalg::{gemm, MatRef};
use crate::numerics::{grad_params, sym_eig, Matrix, ParametricFn};

/// Largest point set for which a dense NTK is assembled.
pub const NTK_MAX_POINTS: usize = 1024;

/// Smallest eigenvalue allowed, relative to `max(1, λ₁)`, before a kernel
/// is rejected as indefinite.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// A symmetric kernel matrix on a point set together with its
/// eigendecomposition (eigenvalues descending, eigenvectors as columns).
#[derive(Clone, Debug)]
pub struct KernelEigenSystem {
    pub kernel: Matrix,
    pub values: Vec<f64>,
    pub vectors: Matrix,
    /// Row-major `n × point_dim` evaluation points (may be empty).
    pub grid: Vec<f64>,
    pub point_dim: usize,
}

impl KernelEigenSystem {
    pub fn new(kernel: Matrix, grid: Vec<f64>, point_dim: usize) -> Result<Self> {
        if point_dim > 0 && grid.len() != kernel.rows() * point_dim {
            return Err(Error::Shape(format!(
                "grid of {} values does not match a {}-point kernel",
                grid.len(),
                kernel.rows()
            )));
        }
        let eig = sym_eig(&kernel)?;
        let top = eig.values.first().copied().unwrap_or(0.0);
        let smallest = eig.values.last().copied().unwrap_or(0.0);
        if smallest < -PSD_TOLERANCE * top.abs().max(1.0) {
            return Err(Error::Definiteness { smallest });
        }
        Ok(KernelEigenSystem {
            kernel,
            values: eig.values,
            vectors: eig.vectors,
            grid,
            point_dim,
        })
    }

    pub fn from_matrix(kernel: Matrix) -> Result<Self> {
        Self::new(kernel, Vec::new(), 0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }
}

/// `J Jᵀ` for a row-per-point Jacobian, exactly symmetric.
pub fn gram(j: &Matrix) -> Matrix {
    let n = j.rows();
    let mut k = vec![0.0; n * n];
    gemm(
        1.0,
        MatRef::new(j.data(), n, j.cols()),
        MatRef::new(j.data(), n, j.cols()).t(),
        0.0,
        &mut k,
    );
    for r in 0..n {
        for c in 0..r {
            k[r * n + c] = k[c * n + r];
        }
    }
    Matrix::from_vec(n, n, k).expect("finite Jacobian gives finite Gram matrix")
}

/// `A Bᵀ` for two row-per-point Jacobians.
pub fn cross_gram(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::Shape("Jacobians have different parameter counts".into()));
    }
    let mut k = vec![0.0; a.rows() * b.rows()];
    gemm(
        1.0,
        MatRef::new(a.data(), a.rows(), a.cols()),
        MatRef::new(b.data(), b.rows(), b.cols()).t(),
        0.0,
        &mut k,
    );
    Matrix::from_vec(a.rows(), b.rows(), k)
}

fn check_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n > cap {
        return Err(Error::TooLarge { what, size: n, cap });
    }
    Ok(())
}

/// Parameter Jacobian of one network output at each point (row-major
/// `n × input_dim` points).
pub fn output_jacobian(net: &Network, theta: &[f64], points: &[f64], output: usize) -> Result<Matrix> {
    if output >= net.output_dim() {
        return Err(Error::Index {
            index: output,
            len: net.output_dim(),
        });
    }
    let spec = JetSpec::values(net.input_dim());
    net.jacobian_rows(theta, points, &spec, |_, _, g| g[output] = 1.0)
}

/// Empirical NTK `K_ij = ⟨∂f(x_i)/∂θ, ∂f(x_j)/∂θ⟩` of the first network
/// output.
pub fn ntk_matrix(net: &Network, theta: &[f64], points: &[f64]) -> Result<Matrix> {
    let n = points.len() / net.input_dim().max(1);
    check_cap(n, NTK_MAX_POINTS, "NTK point set")?;
    Ok(gram(&output_jacobian(net, theta, points, 0)?))
}

/// Empirical NTK of any scalar parametric function, via reverse mode.
pub fn ntk_matrix_fn<F: ParametricFn + ?Sized>(f: &F, theta: &[f64], points: &[f64]) -> Result<Matrix> {
    let d = f.input_dim();
    if d == 0 || points.len() % d != 0 {
        return Err(Error::Shape("point buffer does not match input dimension".into()));
    }
    let n = points.len() / d;
    check_cap(n, NTK_MAX_POINTS, "NTK point set")?;
    let mut rows = Vec::with_capacity(n * theta.len());
    for p in points.chunks_exact(d) {
        rows.extend(grad_params(f, theta, p)?);
    }
    Ok(gram(&Matrix::from_vec(n, theta.len(), rows)?))
}
