//! Point operators for the benchmark loss terms.

use crate::networks::{Channel, Jet, JetSpec};
use crate::ntk::PointOperator;

/// Closed-form right-hand side or boundary data.
pub type SourceFn = fn(&[f64]) -> f64;

/// `Σ c_k ∂^{(k)} u_o(x) − s(x)`: any linear combination of propagated
/// channels of one output, minus an optional source.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    output: usize,
    terms: Vec<(Channel, f64)>,
    source: Option<SourceFn>,
}

impl LinearOperator {
    pub fn new(output: usize, terms: Vec<(Channel, f64)>, source: Option<SourceFn>) -> Self {
        LinearOperator {
            output,
            terms,
            source,
        }
    }

    /// `u_o(x) − g(x)`, or plain `u_o(x)` without data.
    pub fn value(output: usize, target: Option<SourceFn>) -> Self {
        Self::new(output, vec![(Channel::Value, 1.0)], target)
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn terms(&self) -> &[(Channel, f64)] {
        &self.terms
    }

    pub fn source(&self, x: &[f64]) -> f64 {
        self.source.map_or(0.0, |s| s(x))
    }
}

impl PointOperator for LinearOperator {
    fn jet_spec(&self, input_dim: usize) -> JetSpec {
        self.terms
            .iter()
            .fold(JetSpec::values(input_dim), |spec, &(ch, _)| match ch {
                Channel::Value => spec,
                Channel::D1(c) => spec.with(c, 1),
                Channel::D2(c) => spec.with(c, 2),
            })
    }

    fn apply(&self, jet: &Jet, p: usize, x: &[f64], _extra: &[f64]) -> f64 {
        let lhs: f64 = self
            .terms
            .iter()
            .map(|&(ch, c)| c * jet.at(ch, p, self.output))
            .sum();
        lhs - self.source(x)
    }

    fn seed(&self, jet: &Jet, p: usize, _x: &[f64], _extra: &[f64], scale: f64, g: &mut [f64]) {
        for &(ch, c) in &self.terms {
            g[jet.offset(ch, p, self.output)] += scale * c;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    U,
    V,
}

/// Gray-Scott reaction-diffusion residual with `ε = exp(α)` read from the
/// trainable extras (`α₁` at index 0, `α₂` at index 1).
///
/// Network inputs are `(x, y, s)` with rescaled time `s = (t − t₀)/T`, so
/// `∂/∂t = T⁻¹ ∂/∂s`.
///
/// ```text
/// r_u = u_t − ε₁Δu − b(1 − u) + u v²
/// r_v = v_t − ε₂Δv + d v − u v²
/// ```
#[derive(Clone, Debug)]
pub struct GrayScottResidual {
    pub species: Species,
    pub b: f64,
    pub d: f64,
    pub time_span: f64,
}

const U: usize = 0;
const V: usize = 1;
const T: usize = 2;

impl GrayScottResidual {
    fn alpha_index(&self) -> usize {
        match self.species {
            Species::U => 0,
            Species::V => 1,
        }
    }

    fn own(&self) -> usize {
        match self.species {
            Species::U => U,
            Species::V => V,
        }
    }
}

impl PointOperator for GrayScottResidual {
    fn jet_spec(&self, input_dim: usize) -> JetSpec {
        JetSpec::values(input_dim).with(0, 2).with(1, 2).with(T, 1)
    }

    fn apply(&self, jet: &Jet, p: usize, _x: &[f64], extra: &[f64]) -> f64 {
        let eps = extra[self.alpha_index()].exp();
        let o = self.own();
        let u = jet.at(Channel::Value, p, U);
        let v = jet.at(Channel::Value, p, V);
        let dt = jet.at(Channel::D1(T), p, o) / self.time_span;
        let lap = jet.at(Channel::D2(0), p, o) + jet.at(Channel::D2(1), p, o);
        match self.species {
            Species::U => dt - eps * lap - self.b * (1.0 - u) + u * v * v,
            Species::V => dt - eps * lap + self.d * v - u * v * v,
        }
    }

    fn seed(&self, jet: &Jet, p: usize, _x: &[f64], extra: &[f64], scale: f64, g: &mut [f64]) {
        let eps = extra[self.alpha_index()].exp();
        let o = self.own();
        let u = jet.at(Channel::Value, p, U);
        let v = jet.at(Channel::Value, p, V);
        g[jet.offset(Channel::D1(T), p, o)] += scale / self.time_span;
        g[jet.offset(Channel::D2(0), p, o)] -= scale * eps;
        g[jet.offset(Channel::D2(1), p, o)] -= scale * eps;
        let (du, dv) = match self.species {
            Species::U => (self.b + v * v, 2.0 * u * v),
            Species::V => (-v * v, self.d - 2.0 * u * v),
        };
        g[jet.offset(Channel::Value, p, U)] += scale * du;
        g[jet.offset(Channel::Value, p, V)] += scale * dv;
    }

    fn seed_extra(
        &self,
        jet: &Jet,
        p: usize,
        _x: &[f64],
        extra: &[f64],
        scale: f64,
        g_extra: &mut [f64],
    ) {
        let a = self.alpha_index();
        let o = self.own();
        let lap = jet.at(Channel::D2(0), p, o) + jet.at(Channel::D2(1), p, o);
        g_extra[a] -= scale * extra[a].exp() * lap;
    }
}
