//! Text listing of the built-in benchmarks.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pde::Benchmark;

struct Entry {
    benchmark: Benchmark,
    equation: &'static str,
    domain: &'static str,
    architecture: &'static str,
    sigma: &'static str,
    preset: &'static str,
}

const ENTRIES: [Entry; 4] = [
    Entry {
        benchmark: Benchmark::Poisson1d,
        equation: "u_xx = f(x), u(0) = u(1) = 0, u = sin(2 pi x) + 0.1 sin(50 pi x)",
        domain: "x in [0, 1]",
        architecture: "mff, 2 x 100",
        sigma: "sigma = 1, 10",
        preset: "poisson-mff",
    },
    Entry {
        benchmark: Benchmark::Heat1d,
        equation: "u_t = u_xx / (500 pi)^2, u = exp(-t) sin(500 pi x)",
        domain: "(x, t) in [0, 1] x [0, 1]",
        architecture: "stmff, 3 x 100",
        sigma: "sigma_x = 200, sigma_t = 1",
        preset: "heat-stmff",
    },
    Entry {
        benchmark: Benchmark::Wave1d,
        equation: "u_tt = 100 u_xx, u = sin(pi x) cos(10 pi t) + sin(2 pi x) cos(20 pi t)",
        domain: "(x, t) in [0, 1] x [0, 1]",
        architecture: "stmff, 3 x 200, adaptive weights",
        sigma: "sigma_x = 1, sigma_t = 1, 10",
        preset: "wave-stmff-adaptive",
    },
    Entry {
        benchmark: Benchmark::GrayScott2d,
        equation: "u_t = eps1 lap u + b (1 - u) - u v^2, v_t = eps2 lap v - d v + u v^2 (infer eps1, eps2)",
        domain: "periodic (x, y) in [-1, 1]^2, observation window in t",
        architecture: "stmff, 4 x 100",
        sigma: "sigma_x = 30, sigma_t = 1",
        preset: "grayscott-inverse",
    },
];

/// One benchmark id per line.
pub fn list() -> String {
    let mut s = String::new();
    for e in &ENTRIES {
        let _ = writeln!(s, "{}", e.benchmark.id());
    }
    s
}

pub fn describe(id: &str) -> Result<String> {
    let e = ENTRIES
        .iter()
        .find(|e| e.benchmark.id() == id)
        .ok_or_else(|| Error::Validation(vec![format!("benchmark: unknown id `{id}`")]))?;
    let mut s = String::new();
    let _ = writeln!(s, "benchmark:    {}", e.benchmark.id());
    let _ = writeln!(s, "equation:     {}", e.equation);
    let _ = writeln!(s, "domain:       {}", e.domain);
    let _ = writeln!(s, "inputs:       {}", e.benchmark.input_dim());
    let _ = writeln!(s, "outputs:      {}", e.benchmark.output_dim());
    let _ = writeln!(s, "architecture: {}", e.architecture);
    let _ = writeln!(s, "default σ:    {}", e.sigma);
    let _ = writeln!(s, "preset:       {}", e.preset);
    Ok(s)
}
