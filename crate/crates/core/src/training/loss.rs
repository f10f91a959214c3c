use crate::error::{Error, Result};
use crate::networks::{Jet, JetSpec, Network, NetworkParams};
use crate::pde::{GroupBatch, PdeProblem, TrainingBatch};

/// One weight per loss term, held constant within a gradient step.
#[derive(Clone, Debug, PartialEq)]
pub struct LossWeights(pub Vec<f64>);

impl LossWeights {
    pub fn ones(n: usize) -> Self {
        LossWeights(vec![1.0; n])
    }

    pub fn validate(&self, n_terms: usize) -> Result<()> {
        if self.0.len() != n_terms {
            return Err(Error::Shape(format!(
                "{} weights for {n_terms} loss terms",
                self.0.len()
            )));
        }
        if let Some(w) = self.0.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Parameter(format!("loss weight {w} must be positive")));
        }
        Ok(())
    }
}

/// Weighted total and the unweighted term values.
#[derive(Clone, Debug, PartialEq)]
pub struct LossValue {
    pub total: f64,
    pub terms: Vec<f64>,
}

/// Union of the derivative requests of every term in `group`.
fn group_spec(problem: &PdeProblem, group: usize) -> JetSpec {
    let d = problem.input_dim();
    let mut spec = JetSpec::values(d);
    for t in problem.terms.iter().filter(|t| t.group == group) {
        let s = t.op.jet_spec(d);
        for c in 0..d {
            spec = spec.with(c, s.order(c));
        }
    }
    spec
}

fn check_shapes(problem: &PdeProblem, batch: &TrainingBatch, n_extra: usize, weights: &LossWeights) -> Result<()> {
    weights.validate(problem.terms.len())?;
    if batch.groups.len() != problem.groups.len() {
        return Err(Error::Shape(format!(
            "batch has {} groups, problem {}",
            batch.groups.len(),
            problem.groups.len()
        )));
    }
    if n_extra != problem.n_extra() {
        return Err(Error::Shape(format!(
            "{n_extra} extra parameters, problem needs {}",
            problem.n_extra()
        )));
    }
    Ok(())
}

/// Residuals of every term of group `gi`, observed values subtracted, with
/// the mean square of each. Fails on a non-finite term.
fn group_residuals(
    problem: &PdeProblem,
    gi: usize,
    gb: &GroupBatch,
    jet: &Jet,
    extra: &[f64],
) -> Result<Vec<(usize, Vec<f64>, f64)>> {
    let d = problem.input_dim();
    let n_out = problem.output_dim();
    let n = gb.points.len() / d;
    let mut out = Vec::new();
    for (k, term) in problem.terms.iter().enumerate().filter(|(_, t)| t.group == gi) {
        let observed = match term.observed {
            Some(o) => Some((gb.observed.as_ref().ok_or(Error::EmptyDataset)?, o)),
            None => None,
        };
        let residuals: Vec<f64> = (0..n)
            .map(|p| {
                let r = term.op.apply(jet, p, &gb.points[p * d..(p + 1) * d], extra);
                match observed {
                    Some((obs, o)) => r - obs[p * n_out + o],
                    None => r,
                }
            })
            .collect();
        let value = residuals.iter().map(|r| r * r).sum::<f64>() / n as f64;
        if !value.is_finite() {
            return Err(Error::NonFiniteLoss {
                term: term.name.to_owned(),
            });
        }
        out.push((k, residuals, value));
    }
    Ok(out)
}

fn weighted(terms: Vec<f64>, weights: &LossWeights) -> Result<LossValue> {
    let total: f64 = terms.iter().zip(&weights.0).map(|(t, w)| t * w).sum();
    if !total.is_finite() {
        return Err(Error::NonFiniteLoss {
            term: "total".into(),
        });
    }
    Ok(LossValue { total, terms })
}

/// Loss of any function given through its jets: `jets(points, spec)` must
/// return the outputs and the requested input derivatives at `points`.
pub fn total_loss_with<F>(
    problem: &PdeProblem,
    extra: &[f64],
    batch: &TrainingBatch,
    weights: &LossWeights,
    mut jets: F,
) -> Result<LossValue>
where
    F: FnMut(&[f64], &JetSpec) -> Result<Jet>,
{
    check_shapes(problem, batch, extra.len(), weights)?;
    let mut terms = vec![0.0; problem.terms.len()];
    for (gi, gb) in batch.groups.iter().enumerate() {
        if gb.points.is_empty() || !problem.terms.iter().any(|t| t.group == gi) {
            continue;
        }
        let jet = jets(&gb.points, &group_spec(problem, gi))?;
        for (k, _, value) in group_residuals(problem, gi, gb, &jet, extra)? {
            terms[k] = value;
        }
    }
    weighted(terms, weights)
}

/// Evaluates every term and adds the gradient of the weighted total with
/// respect to all parameters (network block, then extras) to `grad`.
fn accumulate(
    problem: &PdeProblem,
    net: &Network,
    params: &NetworkParams,
    batch: &TrainingBatch,
    weights: &LossWeights,
    grad: &mut [f64],
) -> Result<LossValue> {
    check_shapes(problem, batch, params.n_extra(), weights)?;
    let d = problem.input_dim();
    let theta = params.network();
    let extra = params.extra();
    let n_net = params.n_network();
    let mut terms = vec![0.0; problem.terms.len()];
    for (gi, gb) in batch.groups.iter().enumerate() {
        let n = gb.points.len() / d;
        if n == 0 || !problem.terms.iter().any(|t| t.group == gi) {
            continue;
        }
        let (jet, cache) = net.forward_jet(theta, &gb.points, &group_spec(problem, gi))?;
        let mut g_jet = jet.zeros_like();
        let mut g_extra = vec![0.0; extra.len()];
        for (k, residuals, value) in group_residuals(problem, gi, gb, &jet, extra)? {
            terms[k] = value;
            let op = problem.terms[k].op.as_ref();
            let c = 2.0 * weights.0[k] / n as f64;
            for (p, &r) in residuals.iter().enumerate() {
                let x = &gb.points[p * d..(p + 1) * d];
                op.seed(&jet, p, x, extra, c * r, &mut g_jet);
                op.seed_extra(&jet, p, x, extra, c * r, &mut g_extra);
            }
        }
        net.backward(theta, &cache, &g_jet, &mut grad[..n_net])?;
        for (o, ge) in grad[n_net..].iter_mut().zip(&g_extra) {
            *o += ge;
        }
    }
    weighted(terms, weights)
}

/// Weighted composite loss and its unweighted terms.
pub fn total_loss(
    problem: &PdeProblem,
    net: &Network,
    params: &NetworkParams,
    batch: &TrainingBatch,
    weights: &LossWeights,
) -> Result<LossValue> {
    if params.n_network() != net.n_params() {
        return Err(Error::Shape(format!(
            "{} network parameters, network has {}",
            params.n_network(),
            net.n_params()
        )));
    }
    total_loss_with(problem, params.extra(), batch, weights, |pts, spec| {
        net.forward_jet(params.network(), pts, spec).map(|(jet, _)| jet)
    })
}

/// Loss together with its gradient over all parameters.
pub fn loss_and_grad(
    problem: &PdeProblem,
    net: &Network,
    params: &NetworkParams,
    batch: &TrainingBatch,
    weights: &LossWeights,
) -> Result<(LossValue, Vec<f64>)> {
    let mut grad = vec![0.0; params.len()];
    let value = accumulate(problem, net, params, batch, weights, &mut grad)?;
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::NumericalOverflow {
            location: format!("loss gradient entry {i}"),
        });
    }
    Ok((value, grad))
}
