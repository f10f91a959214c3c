use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Parameter(format!(
                "interval [{lo}, {hi}] must satisfy lo < hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    /// `n` equispaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => (0..n)
                .map(|i| self.lo + self.width() * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Axis-aligned box of network input coordinates. For time-dependent
/// problems time is the last coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    intervals: Vec<Interval>,
    periodic: Vec<bool>,
}

impl Domain {
    pub fn new(intervals: Vec<Interval>, periodic: Vec<bool>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Parameter("domain needs at least one coordinate".into()));
        }
        if periodic.len() != intervals.len() {
            return Err(Error::Shape(format!(
                "{} periodic flags for {} coordinates",
                periodic.len(),
                intervals.len()
            )));
        }
        for iv in &intervals {
            Interval::new(iv.lo, iv.hi)?;
        }
        Ok(Domain {
            intervals,
            periodic,
        })
    }

    /// The unit box `[0,1]^d`, not periodic.
    pub fn unit(d: usize) -> Self {
        Domain {
            intervals: vec![Interval { lo: 0.0, hi: 1.0 }; d],
            periodic: vec![false; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, coord: usize) -> Interval {
        self.intervals[coord]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_periodic(&self, coord: usize) -> bool {
        self.periodic[coord]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.intervals.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }

    /// Strictly inside every interval.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .intervals
                .iter()
                .zip(x)
                .all(|(iv, &v)| v > iv.lo && v < iv.hi)
    }
}
