//! NTK-trace loss balancing: `λ_i = tr(K) / tr(K_ii)`, where `K` is the
//! block-diagonal collection of the per-term kernels.

use crate::error::{Error, Result};
use crate::networks::{Network, NetworkParams};
use crate::ntk::operator_jacobian;
use crate::numerics::Matrix;
use crate::pde::{PdeProblem, TrainingBatch};

use super::loss::LossWeights;

pub const WEIGHT_MIN: f64 = 1e-2;
pub const WEIGHT_MAX: f64 = 1e4;

/// Weights from per-term kernel traces, clipped to
/// `[WEIGHT_MIN, WEIGHT_MAX]`.
pub fn weights_from_traces(traces: &[f64], names: &[&str]) -> Result<LossWeights> {
    for (i, &t) in traces.iter().enumerate() {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::DegenerateKernel {
                term: names.get(i).copied().unwrap_or("?").to_owned(),
            });
        }
    }
    let total: f64 = traces.iter().sum();
    Ok(LossWeights(
        traces
            .iter()
            .map(|t| (total / t).clamp(WEIGHT_MIN, WEIGHT_MAX))
            .collect(),
    ))
}

/// Weights from explicit per-term kernel blocks.
pub fn adaptive_weights_update(blocks: &[&Matrix], names: &[&str]) -> Result<LossWeights> {
    let traces: Vec<f64> = blocks
        .iter()
        .map(|k| (0..k.rows().min(k.cols())).map(|i| k.get(i, i)).sum())
        .collect();
    weights_from_traces(&traces, names)
}

/// `tr(K_ii) = Σ_p ‖∂ r_i(x_p)/∂θ‖²` for every term over a probe batch,
/// without forming the kernels.
pub fn term_kernel_traces(
    problem: &PdeProblem,
    net: &Network,
    params: &NetworkParams,
    probe: &TrainingBatch,
) -> Result<Vec<f64>> {
    problem
        .terms
        .iter()
        .map(|t| {
            let pts = &probe.groups[t.group].points;
            let j = operator_jacobian(net, params.network(), params.extra(), t.op.as_ref(), pts)?;
            Ok(j.data().iter().map(|x| x * x).sum())
        })
        .collect()
}
