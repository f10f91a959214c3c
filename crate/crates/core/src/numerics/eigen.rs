//! Symmetric eigensolvers.
//!
//! [`sym_eig`] runs cyclic Jacobi rotations up to [`JACOBI_MAX_N`] and falls
//! back to Householder tridiagonalization with implicit QL above that size.

use crate::error::{Error, Result};
use crate::numerics::linalg::Matrix;

/// Largest size handled by Jacobi rotations.
pub const JACOBI_MAX_N: usize = 1024;
/// Off-diagonal Frobenius norm, relative to ‖M‖_F, at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns. Each eigenvector is signed so its first non-negligible
/// component is positive.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `i`-th eigenvector.
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let scaled = Matrix::from_fn(n, n, |i, j| self.vectors.get(i, j) * self.values[j]);
        scaled
            .matmul(&self.vectors.transpose())
            .expect("square factors")
    }
}

fn check_square(m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix (symmetrized internally).
pub fn sym_eig(m: &Matrix) -> Result<EigenSystem> {
    check_square(m)?;
    if m.rows() <= JACOBI_MAX_N {
        jacobi_eig(m)
    } else {
        tridiagonal_eig(m, true)
    }
}

/// Eigenvalues only, descending.
pub fn sym_eigvals(m: &Matrix) -> Result<Vec<f64>> {
    check_square(m)?;
    if m.rows() <= JACOBI_MAX_N {
        Ok(jacobi_eig(m)?.values)
    } else {
        Ok(tridiagonal_eig(m, false)?.values)
    }
}

/// Cyclic Jacobi rotations.
pub fn jacobi_eig(m: &Matrix) -> Result<EigenSystem> {
    check_square(m)?;
    let n = m.rows();
    let mut a = m.symmetrized()?.into_vec();
    let mut v = Matrix::identity(n).into_vec();
    let total = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= JACOBI_TOL * total {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        // Rotations below this size cannot move the off-diagonal norm.
        let skip = 1e-18 * total / n as f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    Ok(sorted_system(values, Matrix::from_vec(n, n, v)?))
}

/// Householder tridiagonalization followed by implicit QL iterations.
pub fn tridiagonal_eig(m: &Matrix, want_vectors: bool) -> Result<EigenSystem> {
    check_square(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(EigenSystem {
            values: vec![],
            vectors: Matrix::zeros(0, 0),
        });
    }
    let mut v = m.symmetrized()?.into_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(&mut v, &mut d, &mut e, n, want_vectors);
    implicit_ql(&mut v, &mut d, &mut e, n, want_vectors)?;
    let vectors = if want_vectors {
        Matrix::from_vec(n, n, v)?
    } else {
        Matrix::zeros(n, 0)
    };
    if want_vectors {
        Ok(sorted_system(d, vectors))
    } else {
        let mut values = d;
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(EigenSystem { values, vectors })
    }
}

fn sorted_system(values: Vec<f64>, vectors: Matrix) -> EigenSystem {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut q = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        let col = vectors.column(old);
        let scale = col.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let sign = col
            .iter()
            .find(|x| x.abs() > 1e-8 * scale)
            .map_or(1.0, |x| x.signum());
        for (i, x) in col.iter().enumerate() {
            q.set(i, new, sign * x);
        }
    }
    EigenSystem {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: q,
    }
}

// Householder reduction to tridiagonal form. On return `d` holds the
// diagonal, `e[1..]` the subdiagonal, and (if requested) `v` the orthogonal
// transformation.
#[allow(clippy::needless_range_loop)]
fn householder_tridiagonalize(
    v: &mut [f64],
    d: &mut [f64],
    e: &mut [f64],
    n: usize,
    accumulate: bool,
) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if accumulate {
        for i in 0..n - 1 {
            v[at(n - 1, i)] = v[at(i, i)];
            v[at(i, i)] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v[at(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    for k in 0..=i {
                        g += v[at(k, i + 1)] * v[at(k, j)];
                    }
                    for k in 0..=i {
                        v[at(k, j)] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[at(k, i + 1)] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v[at(n - 1, j)];
            v[at(n - 1, j)] = 0.0;
        }
        v[at(n - 1, n - 1)] = 1.0;
    } else {
        // Diagonal of the tridiagonal form sits on the diagonal of `v`.
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
    }
    e[0] = 0.0;
}

fn implicit_ql(
    v: &mut [f64],
    d: &mut [f64],
    e: &mut [f64],
    n: usize,
    vectors: bool,
) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(1);
    let mut iterations = 0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::NonConvergence {
                        sweeps: iterations,
                        residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            h = v[at(k, i + 1)];
                            v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                            v[at(k, i)] = c * v[at(k, i)] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
