use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moments and step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub learning_rate: f64,
}

impl OptimizerState {
    pub fn new(n: usize) -> Self {
        OptimizerState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
            learning_rate: 0.0,
        }
    }
}

/// `η · decay^⌊iteration / interval⌋`
pub fn lr_schedule(base: f64, iteration: u64, decay: f64, interval: u64) -> f64 {
    let k = iteration / interval.max(1);
    base * decay.powi(k.min(i32::MAX as u64) as i32)
}

/// One bias-corrected Adam update of `theta` with learning rate `lr`.
pub fn adam_step(state: &mut OptimizerState, theta: &mut [f64], grad: &[f64], lr: f64) -> Result<()> {
    if theta.len() != state.m.len() || grad.len() != theta.len() {
        return Err(Error::Shape(format!(
            "Adam state has {} entries, parameters {}, gradient {}",
            state.m.len(),
            theta.len(),
            grad.len()
        )));
    }
    state.step += 1;
    state.learning_rate = lr;
    let t = state.step as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    for i in 0..theta.len() {
        let g = grad[i];
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * g;
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * g * g;
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        theta[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
    Ok(())
}
