//! Acceptance criteria 1-15, one PASS/FAIL line each.
//!
//! The default run covers the fast checks (1-7, 14, 15). Criteria 8-13 train
//! full-length models and take hours on one core; run them with
//!
//!     cargo test --release --test acceptance -- --long
//!
//! Positional numbers select criteria, e.g. `-- --long 8 13`. Run artifacts
//! of the long tier go to `target/tmp/acceptance/<preset>`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use ffpinn::experiments::{self, preset, preset_names, ExperimentConfig, ExperimentRecord, Task};
use ffpinn::networks::*;
use ffpinn::ntk::*;
use ffpinn::numerics::{central_difference, sym_eigvals, Matrix, RngStream};
use ffpinn::pde::*;
use ffpinn::training::*;

type Outcome = (bool, String);

struct Criterion {
    id: u32,
    name: &'static str,
    long: bool,
    run: fn() -> Outcome,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "cos-kernel eigenvalues", long: false, run: c01_cos_kernel_eigenvalues },
    Criterion { id: 2, name: "Helmholtz residual of eigenfunctions", long: false, run: c02_helmholtz },
    Criterion { id: 3, name: "block NTK identity", long: false, run: c03_block_identity },
    Criterion { id: 4, name: "linearized dynamics of a wide network", long: false, run: c04_linearized_dynamics },
    Criterion { id: 5, name: "loss gradients vs finite differences", long: false, run: c05_gradients },
    Criterion { id: 6, name: "dominant frequency non-decreasing in sigma", long: false, run: c06_dominant_frequency },
    Criterion { id: 7, name: "ETDRK4 temporal order", long: false, run: c07_etdrk4_order },
    Criterion { id: 8, name: "Poisson MFF accuracy", long: true, run: c08_poisson_mff },
    Criterion { id: 9, name: "Poisson baselines fail", long: true, run: c09_poisson_baselines },
    Criterion { id: 10, name: "heat ST-MFF vs plain", long: true, run: c10_heat },
    Criterion { id: 11, name: "wave adaptive vs fixed weights", long: true, run: c11_wave },
    Criterion { id: 12, name: "Gray-Scott inverse problem", long: true, run: c12_grayscott },
    Criterion { id: 13, name: "spectral-bias ordering", long: true, run: c13_spectral_bias },
    Criterion { id: 14, name: "overfitting with sigma = 10", long: false, run: c14_overfitting },
    Criterion { id: 15, name: "presets are deterministic", long: false, run: c15_determinism },
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let long = args.iter().any(|a| a == "--long" || a == "--ignored" || a == "--include-ignored")
        || std::env::var_os("FFPINN_ACCEPTANCE_LONG").is_some();
    let picked: Vec<u32> = args.iter().filter_map(|a| a.parse().ok()).collect();
    if args.iter().any(|a| a == "--list") {
        for c in CRITERIA {
            println!("criterion {}: test", c.id);
        }
        return;
    }
    let mut failed = Vec::new();
    for c in CRITERIA {
        if !picked.is_empty() && !picked.contains(&c.id) {
            continue;
        }
        if c.long && !long && picked.is_empty() {
            println!("criterion {:>2} SKIP {} (long tier, pass --long)", c.id, c.name);
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(c.run)) {
            Ok(o) => o,
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        println!(
            "criterion {:>2} {} {} [{:.1}s]: {}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            start.elapsed().as_secs_f64(),
            detail
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn run_dir(name: &str) -> PathBuf {
    let base = option_env!("CARGO_TARGET_TMPDIR").map_or_else(std::env::temp_dir, PathBuf::from);
    let dir = base.join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_preset(name: &str) -> ExperimentRecord {
    let cfg = preset(name).unwrap();
    let mut last = Instant::now();
    let mut progress = |line: &str| {
        if last.elapsed().as_secs() >= 60 {
            eprintln!("  [{name}] {line}");
            last = Instant::now();
        }
    };
    experiments::run(&cfg, &run_dir(name), Some(&mut progress)).unwrap()
}

fn metric(rec: &ExperimentRecord, key: &str) -> f64 {
    *rec.metrics.get(key).unwrap_or_else(|| panic!("missing metric {key}"))
}

fn c01_cos_kernel_eigenvalues() -> Outcome {
    let mut worst = 0.0f64;
    for b in [1.0, 5.0, 10.0, 30.0] {
        let vals = sym_eigvals(&discretized_cos_operator(b, 2000)).unwrap();
        let (p, m) = prop1_eigenvalues(b);
        let (hi, lo) = (p.max(m), p.min(m));
        worst = worst.max((vals[0] - hi).abs()).max((vals[1] - lo).abs());
    }
    (worst < 1e-3, format!("max |λ - (1 ± sin b/b)/2| = {worst:.2e} (tol 1e-3)"))
}

fn c02_helmholtz() -> Outcome {
    let mut analytic = 0.0f64;
    let mut numeric = 0.0f64;
    for b in [1.0, 5.0, 10.0] {
        let bm = Matrix::from_vec(1, 1, vec![b]).unwrap();
        let (p, m) = prop1_eigenvalues(b);
        let n = 1001;
        let h = 1.0 / (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let c: Vec<f64> = x.iter().map(|v| (b * v).cos()).collect();
        let s: Vec<f64> = x.iter().map(|v| (b * v).sin()).collect();
        analytic = analytic
            .max(lemma1_residual(&c, h, &bm, p.max(m)).unwrap())
            .max(lemma1_residual(&s, h, &bm, p.max(m)).unwrap());

        let n = 401;
        let h = 1.0 / (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let sys = KernelEigenSystem::new(analytic_cos_kernel_matrix(&bm, &x).unwrap(), x, 1).unwrap();
        for k in 0..2 {
            let r = lemma1_residual(&sys.vector(k), h, &bm, sys.values[k] / n as f64).unwrap();
            numeric = numeric.max(r);
        }
    }
    (
        analytic < 1e-3 && numeric < 1e-2,
        format!("analytic {analytic:.2e} (tol 1e-3), numeric leading eigenvectors {numeric:.2e} (tol 1e-2)"),
    )
}

fn random_spd(n: usize, rng: &mut RngStream) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.normal());
    g.matmul(&g.transpose()).unwrap().add(&Matrix::identity(n)).unwrap()
}

fn c03_block_identity() -> Outcome {
    let mut rng = RngStream::new(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let nb = 2 + rng.index(8);
        let nr = 2 + rng.index(12);
        let k_ur = Matrix::from_fn(nb, nr, |_, _| rng.normal());
        let blocks = PinnNtkBlocks::from_blocks(random_spd(nb, &mut rng), k_ur, random_spd(nr, &mut rng)).unwrap();
        let a = prop2_assemble(&blocks).unwrap();
        worst = worst.max(a.identity_residual(&blocks.full()).unwrap());
    }
    (worst < 1e-8, format!("max relative Frobenius residual {worst:.2e} over 20 triples (tol 1e-8)"))
}

fn c04_linearized_dynamics() -> Outcome {
    let cfg = FcnnConfig::new(1, 2048, 1).with_parameterization(Parameterization::Ntk);
    let net = Network::new(cfg, ArchitectureSpec::Plain).unwrap();
    let theta = init_params(&net, &mut RngStream::new(0)).into_vec();
    let x: Vec<f64> = (0..16).map(|i| i as f64 / 15.0).collect();
    let y: Vec<f64> = x.iter().map(|x| (2.0 * PI * x).sin()).collect();
    let sys = KernelEigenSystem::new(ntk_matrix(&net, &theta, &x).unwrap(), x.clone(), 1).unwrap();
    let f0 = net.predict(&theta, &x).unwrap();
    let r0: Vec<f64> = y.iter().zip(&f0).map(|(a, b)| a - b).collect();
    let lr = 1e-3;
    let steps = 500;
    let predicted = |k: usize| -> Vec<f64> {
        let lin = linearized_dynamics(&sys, &r0, lr * k as f64).unwrap();
        f0.iter().zip(&lin).map(|(a, b)| a + b).collect()
    };
    let mut worst = 0.0f64;
    let out = fit_regression(
        &net,
        &theta,
        &x,
        &y,
        steps,
        RegressionOptimizer::GradientDescent { learning_rate: lr },
        RegressionLoss::HalfSum,
        |k, _, pred| {
            worst = worst.max(relative_l2(pred, &predicted(k)).unwrap());
            true
        },
    )
    .unwrap();
    let err = relative_l2(&out.predictions, &predicted(steps)).unwrap();
    (
        err <= 0.05,
        format!("relative L2 after {steps} steps {err:.2e} (tol 5e-2); worst along the path {worst:.2e}"),
    )
}

fn gd_net(problem: &PdeProblem, stmff: bool, seed: u64) -> Network {
    let mut rng = RngStream::new(seed).substream("features");
    let d = problem.input_dim();
    let cfg = FcnnConfig::new(2, 8, d).with_output_dim(problem.output_dim());
    let arch = if stmff {
        let ds = problem.benchmark.spatial_dims();
        ArchitectureSpec::Stmff {
            spatial: vec![sample_fourier_features(ds, 4, 2.0, true, &mut rng).unwrap()],
            temporal: vec![
                sample_fourier_features(1, 4, 1.0, true, &mut rng).unwrap(),
                sample_fourier_features(1, 4, 3.0, true, &mut rng).unwrap(),
            ],
            spatial_dims: ds,
        }
    } else {
        ArchitectureSpec::Mff {
            embeddings: vec![
                sample_fourier_features(d, 4, 1.0, true, &mut rng).unwrap(),
                sample_fourier_features(d, 4, 5.0, true, &mut rng).unwrap(),
            ],
        }
    };
    Network::new(cfg, arch).unwrap()
}

fn gradient_deviation(problem: &PdeProblem, net: &Network, seed: u64) -> f64 {
    let mut params =
        init_params(net, &mut RngStream::new(seed).substream("init")).with_extra(&problem.extra_init);
    let n_net = params.n_network();
    for (i, a) in params.as_mut_slice()[n_net..].iter_mut().enumerate() {
        *a = -9.0 - i as f64;
    }
    let batch = sample_batch(problem, &vec![6; problem.groups.len()], &mut RngStream::new(seed)).unwrap();
    let weights = LossWeights((0..problem.terms.len()).map(|k| 1.0 + 0.5 * k as f64).collect());
    let (_, grad) = loss_and_grad(problem, net, &params, &batch, &weights).unwrap();
    let f = |v: &[f64]| {
        let p = NetworkParams::from_parts(v.to_vec(), n_net).unwrap();
        total_loss(problem, net, &p, &batch, &weights).unwrap().total
    };
    let fd = central_difference(f, params.as_slice(), 1e-5);
    let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    grad.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

fn c05_gradients() -> Outcome {
    let p = GrayScottParams::default();
    let (u0, v0) = gaussian_initial_condition(16);
    let states = grayscott_reference(p, &u0, &v0, 16, 0.5, 20.0, 10.0).unwrap();
    let obs = Arc::new(Observations::from_states(states[1..].to_vec()).unwrap());
    let cases = [
        (poisson_problem(), false),
        (heat_problem(), true),
        (wave_problem(), true),
        (grayscott_problem(obs).unwrap(), true),
    ];
    let mut parts = Vec::new();
    let mut worst = 0.0f64;
    for (k, (problem, stmff)) in cases.iter().enumerate() {
        let net = gd_net(problem, *stmff, 40 + k as u64);
        let dev = gradient_deviation(problem, &net, k as u64);
        worst = worst.max(dev);
        parts.push(format!("{} {dev:.1e}", problem.benchmark));
    }
    (worst < 1e-5, format!("{} (tol 1e-5)", parts.join(", ")))
}

fn c06_dominant_frequency() -> Outcome {
    let cfg = preset("ntk-sigma-sweep").unwrap();
    let ntk = cfg.ntk.clone().unwrap();
    let sweep = experiments::sigma_sweep(cfg.architecture.as_ref().unwrap(), &ntk.sigmas, ntk.seeds, ntk.grid_points, cfg.seed)
        .unwrap();
    let medians: Vec<f64> = sweep.iter().map(|s| s.median_dominant).collect();
    let centroids: Vec<String> = sweep.iter().map(|s| format!("{:.2}", s.median_centroid)).collect();
    let ok = medians.windows(2).all(|w| w[0] <= w[1]);
    (
        ok,
        format!(
            "median dominant frequency over σ {:?}: {medians:?}; median spectral centroid: [{}]",
            ntk.sigmas,
            centroids.join(", ")
        ),
    )
}

fn c07_etdrk4_order() -> Outcome {
    let cfg = preset("grayscott-dataset").unwrap();
    let ds = cfg.dataset.unwrap();
    let n = ds.solver_grid();
    let (u0, v0) = gaussian_initial_condition(n);
    let runs: Vec<GrayScottState> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&dt| grayscott_reference(ds.params, &u0, &v0, n, dt, 100.0, 100.0).unwrap().pop().unwrap())
        .collect();
    let order = richardson_order(&runs[0], &runs[1], &runs[2]);
    (order >= 3.5, format!("observed order {order:.3} on the {n}x{n} solver grid (need ≥ 3.5)"))
}

fn c08_poisson_mff() -> Outcome {
    let rec = run_preset("poisson-mff");
    let e = metric(&rec, "final_relative_l2");
    (e <= 5e-3, format!("relative L2 {e:.3e} (tol 5e-3)"))
}

fn c09_poisson_baselines() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in ["poisson-plain", "poisson-ff-sigma1", "poisson-ff-sigma50"] {
        let e = metric(&run_preset(p), "final_relative_l2");
        ok &= e >= 0.1;
        parts.push(format!("{p} {e:.3e}"));
    }
    (ok, format!("{} (need ≥ 1e-1 each)", parts.join(", ")))
}

fn c10_heat() -> Outcome {
    let st = metric(&run_preset("heat-stmff"), "final_relative_l2");
    let plain = metric(&run_preset("heat-plain"), "final_relative_l2");
    (
        st <= 1e-2 && plain >= 0.5,
        format!("ST-MFF {st:.3e} (tol 1e-2), plain {plain:.3e} (need ≥ 5e-1)"),
    )
}

fn c11_wave() -> Outcome {
    let adaptive = metric(&run_preset("wave-stmff-adaptive"), "final_relative_l2");
    let fixed = metric(&run_preset("wave-stmff-fixed"), "final_relative_l2");
    (
        adaptive <= 5e-2 && fixed >= 0.5,
        format!("adaptive {adaptive:.3e} (tol 5e-2), fixed {fixed:.3e} (need ≥ 5e-1)"),
    )
}

fn c12_grayscott() -> Outcome {
    let rec = run_preset("grayscott-inverse");
    let e1 = metric(&rec, "eps1_relative_error");
    let e2 = metric(&rec, "eps2_relative_error");
    let u = metric(&rec, "max_snapshot_relative_l2_u");
    let v = metric(&rec, "max_snapshot_relative_l2_v");
    (
        e1 <= 0.25 && e2 <= 0.25 && u <= 0.1 && v <= 0.1,
        format!(
            "eps1 error {:.1}%, eps2 error {:.1}% (tol 25%); worst snapshot relative L2 u {u:.3e}, v {v:.3e} (tol 1e-1)",
            100.0 * e1,
            100.0 * e2
        ),
    )
}

/// First epoch below the threshold, `None` when never reached.
fn first_below(rec: &ExperimentRecord, sigma: &str, band: &str) -> Option<f64> {
    let v = metric(rec, &format!("sigma{sigma}_band_{band}_first_below"));
    (v >= 0.0).then_some(v)
}

/// `a` strictly before `b`, where never counts as after everything.
fn strictly_before(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    }
}

fn c13_spectral_bias() -> Outcome {
    let cfg = preset("regression-spectral-bias").unwrap();
    let bands = &cfg.regression.as_ref().unwrap().bands;
    assert_eq!(bands, &[[0, 2], [9, 11]]);
    let rec = run_preset("regression-spectral-bias");
    let (l1, h1) = (first_below(&rec, "1", "0_2"), first_below(&rec, "1", "9_11"));
    let (l10, h10) = (first_below(&rec, "10", "0_2"), first_below(&rec, "10", "9_11"));
    let low_first = strictly_before(l1, h1);
    let high_first = strictly_before(h10, l10);
    (
        low_first && high_first,
        format!(
            "first epoch below 0.1 (low band, high band): σ=1 ({l1:?}, {h1:?}) low first: {low_first}; σ=10 ({l10:?}, {h10:?}) high first: {high_first}"
        ),
    )
}

fn c14_overfitting() -> Outcome {
    let cfg = preset("regression-overfit").unwrap();
    let rec = experiments::run(&cfg, &run_dir("regression-overfit"), None).unwrap();
    let train = metric(&rec, "sigma10_train_relative_l2");
    let test = metric(&rec, "sigma10_test_relative_l2");
    (
        train < 1e-2 && test > 1e-1,
        format!("train relative L2 {train:.2e} (need < 1e-2), test {test:.3e} (need > 1e-1)"),
    )
}

/// Each preset with its iteration count capped at 20, run twice. Gray-Scott
/// presets share one generated dataset between the two runs; the dataset
/// preset itself is generated twice.
fn c15_determinism() -> Outcome {
    let mut mismatched = Vec::new();
    let names = preset_names();
    for name in &names {
        let mut cfg: ExperimentConfig = preset(name).unwrap();
        if let Some(t) = &mut cfg.training {
            t.iterations = t.iterations.min(20);
        }
        if let Some(r) = &mut cfg.regression {
            r.epochs = r.epochs.min(20);
        }
        let root = run_dir(&format!("determinism-{name}"));
        if cfg.task == Task::Pinn {
            if let Some(d) = &mut cfg.dataset {
                d.dir = Some(root.join("dataset"));
            }
        }
        let a = experiments::run(&cfg, &root.join("a"), None).unwrap();
        let b = experiments::run(&cfg, &root.join("b"), None).unwrap();
        let same = a.metrics.len() == b.metrics.len()
            && a.metrics
                .iter()
                .zip(&b.metrics)
                .all(|((ka, va), (kb, vb))| ka == kb && va.to_bits() == vb.to_bits())
            && a.input_hash == b.input_hash;
        if !same {
            mismatched.push(*name);
        }
        let _ = std::fs::remove_dir_all(&root);
    }
    (
        mismatched.is_empty(),
        format!("{} presets rerun, mismatched: {mismatched:?}", names.len()),
    )
}
