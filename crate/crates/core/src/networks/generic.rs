//! Straightforward per-point forward pass over any [`Scalar`] type.
//!
//! This is the reference implementation: with `f64` it evaluates the
//! network, with [`Var`](crate::numerics::Var) it yields parameter
//! gradients and with [`Dual2`](crate::numerics::Dual2) input derivatives.
//! The batched engine is checked against it.

use crate::error::{Error, Result};
use crate::numerics::{ParametricFn, Scalar};

use super::arch::{ArchKind, LayerSlot, Merge, Network};

fn affine<S: Scalar>(theta: &[S], slot: &LayerSlot, z: &[S]) -> Vec<S> {
    (0..slot.fan_out)
        .map(|o| {
            let row = &theta[slot.weight + o * slot.fan_in..slot.weight + (o + 1) * slot.fan_in];
            let mut acc = S::zero();
            for (w, x) in row.iter().zip(z) {
                acc = acc + *w * *x;
            }
            acc * slot.scale + theta[slot.bias + o]
        })
        .collect()
}

/// Outputs of every branch of the shared trunk (before merging).
pub fn branch_outputs<S: Scalar>(net: &Network, theta: &[S], x: &[S]) -> Result<Vec<Vec<S>>> {
    if theta.len() < net.n_params() {
        return Err(Error::Shape(format!(
            "network needs {} parameters, got {}",
            net.n_params(),
            theta.len()
        )));
    }
    if x.len() != net.input_dim() {
        return Err(Error::Shape(format!(
            "network input has dimension {}, got {}",
            net.input_dim(),
            x.len()
        )));
    }
    Ok(net
        .branches()
        .iter()
        .map(|br| {
            let mut z: Vec<S> = match br.embedding {
                None => br.coords.iter().map(|&c| x[c]).collect(),
                Some(e) => {
                    let m = e.m();
                    let s = e.angular_scale();
                    let phases: Vec<S> = (0..m)
                        .map(|k| {
                            let mut p = S::zero();
                            for (j, &c) in br.coords.iter().enumerate() {
                                p = p + x[c] * e.b().get(k, j);
                            }
                            p * s
                        })
                        .collect();
                    phases
                        .iter()
                        .map(|p| p.cos())
                        .chain(phases.iter().map(|p| p.sin()))
                        .collect()
                }
            };
            for slot in net.hidden_layers() {
                z = affine(theta, slot, &z).into_iter().map(|a| a.tanh()).collect();
            }
            z
        })
        .collect())
}

/// The merged feature vector entering the final linear layer.
pub fn merged_features<S: Scalar>(net: &Network, theta: &[S], x: &[S]) -> Result<Vec<S>> {
    let h = branch_outputs(net, theta, x)?;
    Ok(match net.merge() {
        Merge::Concat => h.concat(),
        Merge::Product {
            n_spatial,
            n_temporal,
        } => {
            let mut out = Vec::with_capacity(n_spatial * n_temporal * net.width());
            for i in 0..n_spatial {
                for j in 0..n_temporal {
                    out.extend(h[i].iter().zip(&h[n_spatial + j]).map(|(a, b)| *a * *b));
                }
            }
            out
        }
    })
}

/// Network outputs at one point.
pub fn forward_generic<S: Scalar>(net: &Network, theta: &[S], x: &[S]) -> Result<Vec<S>> {
    let features = merged_features(net, theta, x)?;
    Ok(affine(theta, net.output_layer(), &features))
}

fn require(net: &Network, kind: ArchKind) -> Result<()> {
    if net.kind() != kind {
        return Err(Error::Parameter(format!(
            "expected a {kind:?} architecture, found {:?}",
            net.kind()
        )));
    }
    Ok(())
}

fn checked(out: Vec<f64>) -> Result<Vec<f64>> {
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NumericalOverflow {
            location: "network output".into(),
        })
    }
}

/// Plain fully-connected network on raw coordinates.
pub fn forward_plain(net: &Network, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    require(net, ArchKind::Plain)?;
    checked(forward_generic(net, theta, x)?)
}

/// Multi-scale Fourier feature network.
pub fn forward_mff(net: &Network, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    require(net, ArchKind::Mff)?;
    checked(forward_generic(net, theta, x)?)
}

/// Spatio-temporal multi-scale Fourier feature network at `(x, t)`.
pub fn forward_stmff(net: &Network, theta: &[f64], x: &[f64], t: f64) -> Result<Vec<f64>> {
    require(net, ArchKind::Stmff)?;
    let mut p = x.to_vec();
    p.push(t);
    checked(forward_generic(net, theta, &p)?)
}

/// One output of a network as a function of `(θ, x)`, for the generic
/// differentiation routines.
pub struct NetworkFn<'a> {
    pub net: &'a Network,
    pub output: usize,
}

impl ParametricFn for NetworkFn<'_> {
    fn n_params(&self) -> usize {
        self.net.n_params()
    }

    fn input_dim(&self) -> usize {
        self.net.input_dim()
    }

    fn eval<S: Scalar>(&self, theta: &[S], x: &[S]) -> S {
        forward_generic(self.net, theta, x).expect("lengths checked by caller")[self.output]
    }
}
