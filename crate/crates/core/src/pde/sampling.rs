use crate::error::{Error, Result};
use crate::numerics::RngStream;

use super::problems::{PdeProblem, Region};

/// Points (row-major, `n × input_dim`) of one sample group, with observed
/// outputs (`n × output_dim`) for dataset groups.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupBatch {
    pub points: Vec<f64>,
    pub observed: Option<Vec<f64>>,
}

impl GroupBatch {
    pub fn len(&self, input_dim: usize) -> usize {
        self.points.len() / input_dim
    }
}

/// One draw of every sample group of a problem.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingBatch {
    pub groups: Vec<GroupBatch>,
}

impl TrainingBatch {
    /// True when every point lies in its group's region.
    pub fn within_regions(&self, problem: &PdeProblem) -> bool {
        let d = problem.input_dim();
        let dom = &problem.domain;
        self.groups.iter().zip(&problem.groups).all(|(b, g)| {
            b.points.chunks(d).all(|x| match &g.region {
                Region::Interior => dom.contains_interior(x),
                Region::Faces(faces) => {
                    dom.contains(x) && faces.iter().any(|f| x[f.coord] == f.value)
                }
                Region::Observations => dom.contains(x),
            })
        })
    }
}

/// Fresh uniform draws for every group; `sizes[i]` points for group `i`.
pub fn sample_batch(problem: &PdeProblem, sizes: &[usize], rng: &mut RngStream) -> Result<TrainingBatch> {
    if sizes.len() != problem.groups.len() {
        return Err(Error::Shape(format!(
            "{} batch sizes for {} sample groups",
            sizes.len(),
            problem.groups.len()
        )));
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Parameter(format!(
            "batch size of group `{}` must be positive",
            problem.groups[i].name
        )));
    }
    let d = problem.input_dim();
    let dom = &problem.domain;
    let mut groups = Vec::with_capacity(sizes.len());
    for (g, &n) in problem.groups.iter().zip(sizes) {
        let mut points = Vec::with_capacity(n * d);
        let mut observed = None;
        match &g.region {
            Region::Interior => {
                for _ in 0..n {
                    for iv in dom.intervals() {
                        points.push(rng.uniform_open(iv.lo, iv.hi));
                    }
                }
            }
            Region::Faces(faces) => {
                for _ in 0..n {
                    let face = faces[rng.index(faces.len())];
                    for (c, iv) in dom.intervals().iter().enumerate() {
                        points.push(if c == face.coord {
                            face.value
                        } else {
                            rng.uniform_in(iv.lo, iv.hi)
                        });
                    }
                }
            }
            Region::Observations => {
                let obs = problem.observations.as_ref().ok_or(Error::EmptyDataset)?;
                if obs.is_empty() {
                    return Err(Error::EmptyDataset);
                }
                let (t0, span) = obs.time_map();
                let mut out = Vec::with_capacity(2 * n);
                for _ in 0..n {
                    let [x, y, t, u, v] = obs.sample(rng.index(obs.len()));
                    points.extend_from_slice(&[x, y, (t - t0) / span]);
                    out.extend_from_slice(&[u, v]);
                }
                observed = Some(out);
            }
        }
        groups.push(GroupBatch { points, observed });
    }
    Ok(TrainingBatch { groups })
}
