use crate::error::{Error, Result};
use crate::networks::{Jet, JetSpec, Network};
use crate::numerics::Matrix;

use super::kernel::{cross_gram, gram};

/// Largest total number of points for PINN block assembly.
pub const BLOCK_MAX_POINTS: usize = 512;

/// A scalar differential operator applied to the network at one point,
/// e.g. a boundary trace `u(x) - g(x)` or a PDE residual.
///
/// `x` is the network input point; `extra` are the non-network trainable
/// scalars.
pub trait PointOperator: Send + Sync {
    /// Derivatives the operator reads.
    fn jet_spec(&self, input_dim: usize) -> JetSpec;

    /// Operator value at point `p` of `jet`.
    fn apply(&self, jet: &Jet, p: usize, x: &[f64], extra: &[f64]) -> f64;

    /// Adds `scale · ∂(operator)/∂(jet entry)` into `g`, which has the layout
    /// of [`Jet::data`].
    fn seed(&self, jet: &Jet, p: usize, x: &[f64], extra: &[f64], scale: f64, g: &mut [f64]);

    /// Adds `scale · ∂(operator)/∂(extra)` into `g_extra`.
    fn seed_extra(
        &self,
        _jet: &Jet,
        _p: usize,
        _x: &[f64],
        _extra: &[f64],
        _scale: f64,
        _g_extra: &mut [f64],
    ) {
    }
}

/// Per-point parameter Jacobian of an operator (network parameters only).
pub fn operator_jacobian(
    net: &Network,
    theta: &[f64],
    extra: &[f64],
    op: &dyn PointOperator,
    points: &[f64],
) -> Result<Matrix> {
    let d = net.input_dim();
    let spec = op.jet_spec(d);
    net.jacobian_rows(theta, points, &spec, |i, jet, g| {
        op.seed(jet, 0, &points[i * d..(i + 1) * d], extra, 1.0, g)
    })
}

/// NTK blocks of a PINN with one boundary-type and one residual-type term.
#[derive(Clone, Debug)]
pub struct PinnNtkBlocks {
    pub k_uu: Matrix,
    pub k_ur: Matrix,
    pub k_rr: Matrix,
    pub x_b: Vec<f64>,
    pub x_r: Vec<f64>,
}

impl PinnNtkBlocks {
    pub fn from_blocks(k_uu: Matrix, k_ur: Matrix, k_rr: Matrix) -> Result<Self> {
        if !k_uu.is_square() || !k_rr.is_square() {
            return Err(Error::Shape("diagonal NTK blocks must be square".into()));
        }
        if k_ur.rows() != k_uu.rows() || k_ur.cols() != k_rr.rows() {
            return Err(Error::Shape("off-diagonal NTK block has the wrong shape".into()));
        }
        Ok(PinnNtkBlocks {
            k_uu,
            k_ur,
            k_rr,
            x_b: Vec::new(),
            x_r: Vec::new(),
        })
    }

    pub fn n_b(&self) -> usize {
        self.k_uu.rows()
    }

    pub fn n_r(&self) -> usize {
        self.k_rr.rows()
    }

    /// `[[K_uu, K_ur], [K_urᵀ, K_rr]]`.
    pub fn full(&self) -> Matrix {
        let (nb, nr) = (self.n_b(), self.n_r());
        let mut k = Matrix::zeros(nb + nr, nb + nr);
        k.set_block(0, 0, &self.k_uu);
        k.set_block(0, nb, &self.k_ur);
        k.set_block(nb, 0, &self.k_ur.transpose());
        k.set_block(nb, nb, &self.k_rr);
        k
    }
}

/// Gram blocks of the boundary and residual operator Jacobians at `x_b`
/// and `x_r` (row-major points).
pub fn pinn_ntk_blocks(
    net: &Network,
    theta: &[f64],
    extra: &[f64],
    boundary: &dyn PointOperator,
    residual: &dyn PointOperator,
    x_b: &[f64],
    x_r: &[f64],
) -> Result<PinnNtkBlocks> {
    let d = net.input_dim();
    let total = (x_b.len() + x_r.len()) / d;
    if total > BLOCK_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "PINN NTK point set",
            size: total,
            cap: BLOCK_MAX_POINTS,
        });
    }
    let jb = operator_jacobian(net, theta, extra, boundary, x_b)?;
    let jr = operator_jacobian(net, theta, extra, residual, x_r)?;
    Ok(PinnNtkBlocks {
        k_uu: gram(&jb),
        k_ur: cross_gram(&jb, &jr)?,
        k_rr: gram(&jr),
        x_b: x_b.to_vec(),
        x_r: x_r.to_vec(),
    })
}
