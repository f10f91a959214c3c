//! Block factorization of a PINN kernel in the eigenbases of its diagonal
//! blocks.
//!
//! With `K_uu = Q_u Λ_u Q_uᵀ`, `K_rr = Q_r Λ_r Q_rᵀ`, `Q = diag(Q_u, Q_r)`
//! and `B = Q_rᵀ K_ru Q_u` (`N_r × N_b`):
//!
//! ```text
//! Λ̃ = QᵀKQ = [[Λ_u, Bᵀ], [B, Λ_r]] = Pᵀ Λ P
//! P = [[I, Λ_u⁻¹Bᵀ], [0, I]]      Λ = diag(Λ_u, Λ_r − B Λ_u⁻¹ Bᵀ)
//! ```

use crate::error::{Error, Result};
use crate::numerics::{sym_eig, Matrix};

use super::blocks::PinnNtkBlocks;

/// Smallest eigenvalue of either diagonal block accepted as definite.
pub const DEFINITE_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Prop2Assembly {
    pub q_u: Matrix,
    pub q_r: Matrix,
    pub lambda_u: Vec<f64>,
    pub lambda_r: Vec<f64>,
    /// `Q_rᵀ K_ru Q_u`
    pub b: Matrix,
    pub p: Matrix,
    /// `QᵀKQ`
    pub lambda_tilde: Matrix,
    /// `diag(Λ_u, Λ_r − B Λ_u⁻¹ Bᵀ)`
    pub lambda: Matrix,
    /// `diag(Q_u, Q_r)`
    pub q: Matrix,
}

impl Prop2Assembly {
    /// `‖QᵀKQ − PᵀΛP‖_F / ‖QᵀKQ‖_F`.
    pub fn identity_residual(&self, k: &Matrix) -> Result<f64> {
        let lhs = self.q.transpose().matmul(k)?.matmul(&self.q)?;
        let rhs = self.p.transpose().matmul(&self.lambda)?.matmul(&self.p)?;
        let scale = lhs.frobenius_norm();
        if scale == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(lhs.sub(&rhs)?.frobenius_norm() / scale)
    }
}

pub fn prop2_assemble(blocks: &PinnNtkBlocks) -> Result<Prop2Assembly> {
    let (nb, nr) = (blocks.n_b(), blocks.n_r());
    let eu = sym_eig(&blocks.k_uu)?;
    let er = sym_eig(&blocks.k_rr)?;
    for vals in [&eu.values, &er.values] {
        let smallest = vals.last().copied().unwrap_or(0.0);
        if smallest <= DEFINITE_THRESHOLD {
            return Err(Error::Definiteness { smallest });
        }
    }
    let b = er
        .vectors
        .transpose()
        .matmul(&blocks.k_ur.transpose())?
        .matmul(&eu.vectors)?;

    let n = nb + nr;
    let mut q = Matrix::zeros(n, n);
    q.set_block(0, 0, &eu.vectors);
    q.set_block(nb, nb, &er.vectors);

    let mut lambda_tilde = Matrix::zeros(n, n);
    lambda_tilde.set_block(0, 0, &Matrix::from_diag(&eu.values));
    lambda_tilde.set_block(0, nb, &b.transpose());
    lambda_tilde.set_block(nb, 0, &b);
    lambda_tilde.set_block(nb, nb, &Matrix::from_diag(&er.values));

    // Λ_u⁻¹ Bᵀ scales the rows of Bᵀ.
    let inv_bt = Matrix::from_fn(nb, nr, |i, j| b.get(j, i) / eu.values[i]);
    let mut p = Matrix::identity(n);
    p.set_block(0, nb, &inv_bt);

    let schur = Matrix::from_diag(&er.values).sub(&b.matmul(&inv_bt)?)?;
    let mut lambda = Matrix::zeros(n, n);
    lambda.set_block(0, 0, &Matrix::from_diag(&eu.values));
    lambda.set_block(nb, nb, &schur);

    Ok(Prop2Assembly {
        q_u: eu.vectors,
        q_r: er.vectors,
        lambda_u: eu.values,
        lambda_r: er.values,
        b,
        p,
        lambda_tilde,
        lambda,
        q,
    })
}
