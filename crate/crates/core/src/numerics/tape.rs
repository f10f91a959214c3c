//! Reverse-mode differentiation on an append-only trace.
//!
//! Every arithmetic operation on a [`Var`] records its local partial
//! derivatives; [`Tape::gradient`] replays the trace backwards.

use std::cell::RefCell;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

const NO_PARENT: usize = usize::MAX;

#[derive(Clone, Copy)]
struct Node {
    parents: [usize; 2],
    partials: [f64; 2],
}

/// The adjoint record: a trace of scalar operations.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Tape {
            nodes: RefCell::new(Vec::with_capacity(n)),
        }
    }

    /// A new independent variable.
    pub fn var(&self, value: f64) -> Var<'_> {
        let index = self.push(Node {
            parents: [NO_PARENT; 2],
            partials: [0.0; 2],
        });
        Var {
            tape: Some(self),
            index,
            value,
        }
    }

    pub fn vars(&self, values: &[f64]) -> Vec<Var<'_>> {
        values.iter().map(|&v| self.var(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, node: Node) -> usize {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(node);
        nodes.len() - 1
    }

    /// Adjoints of `output` with respect to every recorded node, indexed by
    /// node position. Use [`Var::index`] to pick out inputs.
    pub fn adjoints(&self, output: Var<'_>) -> Vec<f64> {
        let nodes = self.nodes.borrow();
        let mut adj = vec![0.0; nodes.len()];
        let Some(out) = output.node() else {
            return adj;
        };
        adj[out] = 1.0;
        for i in (0..=out).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            let node = nodes[i];
            for k in 0..2 {
                let p = node.parents[k];
                if p != NO_PARENT {
                    adj[p] += a * node.partials[k];
                }
            }
        }
        adj
    }

    /// Gradient of `output` with respect to `inputs`.
    pub fn gradient(&self, output: Var<'_>, inputs: &[Var<'_>]) -> Vec<f64> {
        let adj = self.adjoints(output);
        inputs
            .iter()
            .map(|v| v.node().map_or(0.0, |i| adj[i]))
            .collect()
    }
}

/// A scalar that is either a recorded node or a tape-free constant.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: Option<&'t Tape>,
    index: usize,
    value: f64,
}

impl<'t> Var<'t> {
    pub fn constant(value: f64) -> Self {
        Var {
            tape: None,
            index: NO_PARENT,
            value,
        }
    }

    pub fn index(&self) -> Option<usize> {
        self.node()
    }

    fn node(&self) -> Option<usize> {
        self.tape.map(|_| self.index)
    }

    fn unary(self, value: f64, partial: f64) -> Self {
        match self.tape {
            None => Var::constant(value),
            Some(tape) => {
                let index = tape.push(Node {
                    parents: [self.index, NO_PARENT],
                    partials: [partial, 0.0],
                });
                Var {
                    tape: Some(tape),
                    index,
                    value,
                }
            }
        }
    }

    fn binary(self, other: Self, value: f64, da: f64, db: f64) -> Self {
        match (self.tape, other.tape) {
            (None, None) => Var::constant(value),
            (Some(_), None) => self.unary(value, da),
            (None, Some(_)) => other.unary(value, db),
            (Some(tape), Some(_)) => {
                let index = tape.push(Node {
                    parents: [self.index, other.index],
                    partials: [da, db],
                });
                Var {
                    tape: Some(tape),
                    index,
                    value,
                }
            }
        }
    }
}

impl Add for Var<'_> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.binary(rhs, self.value + rhs.value, 1.0, 1.0)
    }
}

impl Sub for Var<'_> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.binary(rhs, self.value - rhs.value, 1.0, -1.0)
    }
}

impl Mul for Var<'_> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.binary(rhs, self.value * rhs.value, rhs.value, self.value)
    }
}

impl Div for Var<'_> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        self.binary(rhs, q, 1.0 / rhs.value, -q / rhs.value)
    }
}

impl Neg for Var<'_> {
    type Output = Self;
    fn neg(self) -> Self {
        self.unary(-self.value, -1.0)
    }
}

impl Add<f64> for Var<'_> {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        self.unary(self.value + rhs, 1.0)
    }
}

impl Sub<f64> for Var<'_> {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        self.unary(self.value - rhs, 1.0)
    }
}

impl Mul<f64> for Var<'_> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.unary(self.value * rhs, rhs)
    }
}

impl Scalar for Var<'_> {
    fn from_f64(v: f64) -> Self {
        Var::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn tanh(self) -> Self {
        let t = self.value.tanh();
        self.unary(t, 1.0 - t * t)
    }
    fn sin(self) -> Self {
        self.unary(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.unary(self.value.cos(), -self.value.sin())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.unary(e, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_and_chain_rule() {
        let tape = Tape::new();
        let x = tape.var(0.7);
        let y = tape.var(-1.3);
        let f = (x * y).sin() + x.exp() / y;
        let g = tape.gradient(f, &[x, y]);
        let (xv, yv) = (0.7f64, -1.3f64);
        let dfx = yv * (xv * yv).cos() + xv.exp() / yv;
        let dfy = xv * (xv * yv).cos() - xv.exp() / (yv * yv);
        assert!((g[0] - dfx).abs() < 1e-14);
        assert!((g[1] - dfy).abs() < 1e-14);
    }

    #[test]
    fn constants_record_nothing() {
        let tape = Tape::new();
        let c = Var::constant(2.0) * Var::constant(3.0);
        assert_eq!(c.value(), 6.0);
        assert!(tape.is_empty());
        let x = tape.var(1.0);
        let y = x * c;
        assert_eq!(tape.gradient(y, &[x]), vec![6.0]);
    }

    #[test]
    fn reused_variable_accumulates() {
        let tape = Tape::new();
        let x = tape.var(3.0);
        let f = x * x * x;
        assert!((tape.gradient(f, &[x])[0] - 27.0).abs() < 1e-12);
    }
}
