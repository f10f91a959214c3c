use crate::error::{Error, Result};
use crate::networks::{ArchKind, Network};

use super::problems::{EvalGrid, PdeProblem};

/// `‖pred − exact‖₂ / ‖exact‖₂`.
pub fn relative_l2(pred: &[f64], exact: &[f64]) -> Result<f64> {
    if pred.len() != exact.len() {
        return Err(Error::Shape(format!(
            "prediction has {} entries, reference {}",
            pred.len(),
            exact.len()
        )));
    }
    let den: f64 = exact.iter().map(|e| e * e).sum::<f64>().sqrt();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let num: f64 = pred
        .iter()
        .zip(exact)
        .map(|(p, e)| (p - e) * (p - e))
        .sum::<f64>()
        .sqrt();
    Ok(num / den)
}

/// Network prediction and reference on a problem's evaluation grid.
#[derive(Clone, Debug)]
pub struct GridPrediction {
    pub input_dim: usize,
    pub output_dim: usize,
    /// Row-major `n × input_dim`, in network coordinates.
    pub points: Vec<f64>,
    /// Row-major `n × output_dim`.
    pub predicted: Vec<f64>,
    pub reference: Vec<f64>,
    /// Points per snapshot block (snapshot grids only); blocks are ordered
    /// by snapshot.
    pub snapshot_len: Option<usize>,
}

impl GridPrediction {
    pub fn len(&self) -> usize {
        self.points.len() / self.input_dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn output_column(data: &[f64], n_out: usize, o: usize) -> Vec<f64> {
        data.iter().skip(o).step_by(n_out).copied().collect()
    }

    pub fn predicted_output(&self, o: usize) -> Vec<f64> {
        Self::output_column(&self.predicted, self.output_dim, o)
    }

    pub fn reference_output(&self, o: usize) -> Vec<f64> {
        Self::output_column(&self.reference, self.output_dim, o)
    }
}

/// Relative L2 errors on the evaluation grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// One entry per output.
    pub relative_l2: Vec<f64>,
    /// `[snapshot][output]`, for snapshot grids.
    pub per_snapshot: Vec<Vec<f64>>,
}

impl Evaluation {
    /// Largest error over outputs and snapshots.
    pub fn worst(&self) -> f64 {
        self.relative_l2
            .iter()
            .chain(self.per_snapshot.iter().flatten())
            .fold(0.0f64, |m, &e| m.max(e))
    }
}

/// Evaluates the network on the problem's fixed grid.
pub fn predict_on_grid(problem: &PdeProblem, net: &Network, theta: &[f64]) -> Result<GridPrediction> {
    let d = problem.input_dim();
    let n_out = problem.output_dim();
    if net.input_dim() != d || net.output_dim() != n_out {
        return Err(Error::Shape(format!(
            "network maps {} -> {}, problem needs {d} -> {n_out}",
            net.input_dim(),
            net.output_dim()
        )));
    }
    let stmff = net.kind() == ArchKind::Stmff;
    match problem.eval_grid {
        EvalGrid::Line { n } => {
            let points = problem.domain.interval(0).linspace(n);
            let predicted = net.predict(theta, &points)?;
            let reference = exact_values(problem, &points, 1)?;
            Ok(GridPrediction {
                input_dim: 1,
                output_dim: 1,
                points,
                predicted,
                reference,
                snapshot_len: None,
            })
        }
        EvalGrid::SpaceTime { nx, nt } => {
            let xs = problem.domain.interval(0).linspace(nx);
            let ts = problem.domain.interval(1).linspace(nt);
            let mut points = Vec::with_capacity(2 * nx * nt);
            for &x in &xs {
                for &t in &ts {
                    points.extend_from_slice(&[x, t]);
                }
            }
            let predicted = if stmff {
                net.predict_stmff_grid(theta, &xs, &ts)?
            } else {
                net.predict(theta, &points)?
            };
            let reference = exact_values(problem, &points, 2)?;
            Ok(GridPrediction {
                input_dim: 2,
                output_dim: 1,
                points,
                predicted,
                reference,
                snapshot_len: None,
            })
        }
        EvalGrid::Snapshots => {
            let obs = problem.observations.as_ref().ok_or(Error::EmptyDataset)?;
            let (t0, span) = obs.time_map();
            let spatial = obs.spatial_points();
            let ns = obs.n * obs.n;
            let s: Vec<f64> = obs.times.iter().map(|t| (t - t0) / span).collect();
            let nt = s.len();
            let mut points = Vec::with_capacity(3 * ns * nt);
            let mut reference = Vec::with_capacity(2 * ns * nt);
            for (it, &si) in s.iter().enumerate() {
                let (u, v) = &obs.fields[it];
                for k in 0..ns {
                    points.extend_from_slice(&[spatial[2 * k], spatial[2 * k + 1], si]);
                    reference.extend_from_slice(&[u[k], v[k]]);
                }
            }
            let predicted = if stmff {
                // Grid output is ordered spatial-major; reorder to snapshot-major.
                let g = net.predict_stmff_grid(theta, &spatial, &s)?;
                let mut out = vec![0.0; g.len()];
                for k in 0..ns {
                    for it in 0..nt {
                        for o in 0..2 {
                            out[(it * ns + k) * 2 + o] = g[(k * nt + it) * 2 + o];
                        }
                    }
                }
                out
            } else {
                net.predict(theta, &points)?
            };
            Ok(GridPrediction {
                input_dim: 3,
                output_dim: 2,
                points,
                predicted,
                reference,
                snapshot_len: Some(ns),
            })
        }
    }
}

fn exact_values(problem: &PdeProblem, points: &[f64], d: usize) -> Result<Vec<f64>> {
    points
        .chunks(d)
        .map(|x| {
            problem.exact(x).ok_or_else(|| {
                Error::Parameter(format!("{} has no closed-form solution", problem.benchmark))
            })
        })
        .collect()
}

pub fn evaluate_prediction(grid: &GridPrediction) -> Result<Evaluation> {
    let n_out = grid.output_dim;
    let mut relative = Vec::with_capacity(n_out);
    for o in 0..n_out {
        relative.push(relative_l2(
            &grid.predicted_output(o),
            &grid.reference_output(o),
        )?);
    }
    let mut per_snapshot = Vec::new();
    if let Some(ns) = grid.snapshot_len {
        let block = ns * n_out;
        for (p, r) in grid.predicted.chunks(block).zip(grid.reference.chunks(block)) {
            let mut row = Vec::with_capacity(n_out);
            for o in 0..n_out {
                let col = |d: &[f64]| GridPrediction::output_column(d, n_out, o);
                row.push(relative_l2(&col(p), &col(r))?);
            }
            per_snapshot.push(row);
        }
    }
    Ok(Evaluation {
        relative_l2: relative,
        per_snapshot,
    })
}

pub fn evaluate(problem: &PdeProblem, net: &Network, theta: &[f64]) -> Result<Evaluation> {
    evaluate_prediction(&predict_on_grid(problem, net, theta)?)
}
