use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networks::Channel;
use crate::ntk::PointOperator;

use super::dataset::Observations;
use super::domain::{Domain, Interval};
use super::exact::{self, HEAT_KAPPA, WAVE_C2};
use super::operators::{GrayScottResidual, LinearOperator, Species};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Poisson1d,
    Heat1d,
    Wave1d,
    GrayScott2d,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [
        Benchmark::Poisson1d,
        Benchmark::Heat1d,
        Benchmark::Wave1d,
        Benchmark::GrayScott2d,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Benchmark::Poisson1d => "poisson1d",
            Benchmark::Heat1d => "heat1d",
            Benchmark::Wave1d => "wave1d",
            Benchmark::GrayScott2d => "grayscott2d",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.id() == id)
    }

    pub fn is_time_dependent(self) -> bool {
        !matches!(self, Benchmark::Poisson1d)
    }

    /// Number of spatial coordinates.
    pub fn spatial_dims(self) -> usize {
        match self {
            Benchmark::GrayScott2d => 2,
            _ => 1,
        }
    }

    pub fn input_dim(self) -> usize {
        self.spatial_dims() + usize::from(self.is_time_dependent())
    }

    pub fn output_dim(self) -> usize {
        match self {
            Benchmark::GrayScott2d => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Face `x_coord = value` of the domain box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Face {
    pub coord: usize,
    pub value: f64,
}

/// Where a group of training points is drawn from.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Strictly inside the domain box.
    Interior,
    /// A union of faces; each point picks one face uniformly.
    Faces(Vec<Face>),
    /// Rows of the observation dataset.
    Observations,
}

/// Points shared by one or more loss terms.
#[derive(Clone, Debug)]
pub struct SampleGroup {
    pub name: &'static str,
    pub region: Region,
    pub default_size: usize,
}

/// One mean-squared loss term.
pub struct LossTerm {
    pub name: &'static str,
    /// Index into [`PdeProblem::groups`].
    pub group: usize,
    pub op: Box<dyn PointOperator>,
    /// Subtract this observed output (dataset terms only).
    pub observed: Option<usize>,
}

impl fmt::Debug for LossTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossTerm")
            .field("name", &self.name)
            .field("group", &self.group)
            .field("observed", &self.observed)
            .finish()
    }
}

/// Where relative errors are measured.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalGrid {
    /// `n` equispaced points of `[0, 1]`.
    Line { n: usize },
    /// `nx × nt` equispaced space-time grid over the domain box.
    SpaceTime { nx: usize, nt: usize },
    /// The solver grid at every observed snapshot.
    Snapshots,
}

/// A benchmark with its loss terms, sampling regions, trainable physical
/// parameters and evaluation grid.
#[derive(Debug)]
pub struct PdeProblem {
    pub benchmark: Benchmark,
    pub domain: Domain,
    pub groups: Vec<SampleGroup>,
    pub terms: Vec<LossTerm>,
    /// Initial values of non-network trainable scalars.
    pub extra_init: Vec<f64>,
    pub extra_names: Vec<&'static str>,
    pub observations: Option<Arc<Observations>>,
    pub eval_grid: EvalGrid,
}

impl PdeProblem {
    pub fn input_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn output_dim(&self) -> usize {
        self.benchmark.output_dim()
    }

    pub fn n_extra(&self) -> usize {
        self.extra_init.len()
    }

    pub fn term_names(&self) -> Vec<&'static str> {
        self.terms.iter().map(|t| t.name).collect()
    }

    pub fn default_batch_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.default_size).collect()
    }

    pub fn term(&self, name: &str) -> Option<&LossTerm> {
        self.terms.iter().find(|t| t.name == name)
    }

    /// Closed-form solution at a network input point.
    pub fn exact(&self, x: &[f64]) -> Option<f64> {
        exact::exact_value(self.benchmark, x)
    }

    /// Physical parameters implied by the extras, e.g. `ε = exp(α)`.
    pub fn physical_parameters(&self, extra: &[f64]) -> Vec<(&'static str, f64)> {
        match self.benchmark {
            Benchmark::GrayScott2d => vec![("eps1", extra[0].exp()), ("eps2", extra[1].exp())],
            _ => Vec::new(),
        }
    }
}

fn x_faces() -> Vec<Face> {
    vec![Face { coord: 0, value: 0.0 }, Face { coord: 0, value: 1.0 }]
}

fn t0_face() -> Face {
    Face { coord: 1, value: 0.0 }
}

/// `u_xx = f` on `(0, 1)`, `u(0) = u(1) = 0`, with
/// `u = sin(2πx) + 0.1 sin(50πx)`.
pub fn poisson_problem() -> PdeProblem {
    PdeProblem {
        benchmark: Benchmark::Poisson1d,
        domain: Domain::unit(1),
        groups: vec![
            SampleGroup {
                name: "boundary",
                region: Region::Faces(x_faces()),
                default_size: 128,
            },
            SampleGroup {
                name: "residual",
                region: Region::Interior,
                default_size: 128,
            },
        ],
        terms: vec![
            LossTerm {
                name: "loss_b",
                group: 0,
                op: Box::new(LinearOperator::value(0, Some(exact::zero))),
                observed: None,
            },
            LossTerm {
                name: "loss_r",
                group: 1,
                op: Box::new(LinearOperator::new(
                    0,
                    vec![(Channel::D2(0), 1.0)],
                    Some(exact::poisson_source),
                )),
                observed: None,
            },
        ],
        extra_init: Vec::new(),
        extra_names: Vec::new(),
        observations: None,
        eval_grid: EvalGrid::Line { n: 1024 },
    }
}

/// `u_t = κ u_xx` on `(0,1)²` with `κ = 1/(500π)²`,
/// `u(x,0) = sin(500πx)`, `u(0,t) = u(1,t) = 0`.
pub fn heat_problem() -> PdeProblem {
    PdeProblem {
        benchmark: Benchmark::Heat1d,
        domain: Domain::unit(2),
        groups: vec![
            SampleGroup {
                name: "boundary",
                region: Region::Faces(x_faces()),
                default_size: 128,
            },
            SampleGroup {
                name: "initial",
                region: Region::Faces(vec![t0_face()]),
                default_size: 128,
            },
            SampleGroup {
                name: "residual",
                region: Region::Interior,
                default_size: 128,
            },
        ],
        terms: vec![
            LossTerm {
                name: "loss_bc",
                group: 0,
                op: Box::new(LinearOperator::value(0, Some(exact::zero))),
                observed: None,
            },
            LossTerm {
                name: "loss_ic",
                group: 1,
                op: Box::new(LinearOperator::value(0, Some(exact::heat_initial))),
                observed: None,
            },
            LossTerm {
                name: "loss_r",
                group: 2,
                op: Box::new(LinearOperator::new(
                    0,
                    vec![(Channel::D1(1), 1.0), (Channel::D2(0), -HEAT_KAPPA)],
                    None,
                )),
                observed: None,
            },
        ],
        extra_init: Vec::new(),
        extra_names: Vec::new(),
        observations: None,
        eval_grid: EvalGrid::SpaceTime { nx: 4096, nt: 256 },
    }
}

/// `u_tt = 100 u_xx` on `(0,1)²`. Boundary and initial displacement form
/// one constraint `u = g` on the faces `x = 0`, `x = 1`, `t = 0`; the
/// initial velocity `u_t(x, 0) = 0` is a separate term.
pub fn wave_problem() -> PdeProblem {
    let mut faces = x_faces();
    faces.push(t0_face());
    PdeProblem {
        benchmark: Benchmark::Wave1d,
        domain: Domain::unit(2),
        groups: vec![
            SampleGroup {
                name: "boundary",
                region: Region::Faces(faces),
                default_size: 360,
            },
            SampleGroup {
                name: "initial",
                region: Region::Faces(vec![t0_face()]),
                default_size: 360,
            },
            SampleGroup {
                name: "residual",
                region: Region::Interior,
                default_size: 360,
            },
        ],
        terms: vec![
            LossTerm {
                name: "loss_u",
                group: 0,
                op: Box::new(LinearOperator::value(0, Some(exact::wave_boundary))),
                observed: None,
            },
            LossTerm {
                name: "loss_ut",
                group: 1,
                op: Box::new(LinearOperator::new(0, vec![(Channel::D1(1), 1.0)], None)),
                observed: None,
            },
            LossTerm {
                name: "loss_r",
                group: 2,
                op: Box::new(LinearOperator::new(
                    0,
                    vec![(Channel::D2(1), 1.0), (Channel::D2(0), -WAVE_C2)],
                    None,
                )),
                observed: None,
            },
        ],
        extra_init: Vec::new(),
        extra_names: Vec::new(),
        observations: None,
        eval_grid: EvalGrid::SpaceTime { nx: 256, nt: 256 },
    }
}

/// Initial value of both log-diffusivities.
pub const ALPHA_INIT: f64 = -10.0;

/// Inverse Gray-Scott problem on observed snapshots. Network inputs are
/// `(x, y, s)` with `s` the observation window rescaled to `[0, 1]`;
/// `b` and `d` are known, `ε₁ = e^{α₁}` and `ε₂ = e^{α₂}` are trained.
///
/// The data terms share observation points and the two residuals share
/// collocation points.
pub fn grayscott_problem(observations: Arc<Observations>) -> Result<PdeProblem> {
    if observations.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (_, span) = observations.time_map();
    let p = observations.params;
    let residual = |species| GrayScottResidual {
        species,
        b: p.b,
        d: p.d,
        time_span: span,
    };
    let square = Interval { lo: -1.0, hi: 1.0 };
    Ok(PdeProblem {
        benchmark: Benchmark::GrayScott2d,
        domain: Domain::new(
            vec![square, square, Interval { lo: 0.0, hi: 1.0 }],
            vec![true, true, false],
        )?,
        groups: vec![
            SampleGroup {
                name: "observations",
                region: Region::Observations,
                default_size: 1000,
            },
            SampleGroup {
                name: "residual",
                region: Region::Interior,
                default_size: 1000,
            },
        ],
        terms: vec![
            LossTerm {
                name: "loss_u",
                group: 0,
                op: Box::new(LinearOperator::value(0, None)),
                observed: Some(0),
            },
            LossTerm {
                name: "loss_v",
                group: 0,
                op: Box::new(LinearOperator::value(1, None)),
                observed: Some(1),
            },
            LossTerm {
                name: "loss_ru",
                group: 1,
                op: Box::new(residual(Species::U)),
                observed: None,
            },
            LossTerm {
                name: "loss_rv",
                group: 1,
                op: Box::new(residual(Species::V)),
                observed: None,
            },
        ],
        extra_init: vec![ALPHA_INIT, ALPHA_INIT],
        extra_names: vec!["alpha1", "alpha2"],
        observations: Some(observations),
        eval_grid: EvalGrid::Snapshots,
    })
}
