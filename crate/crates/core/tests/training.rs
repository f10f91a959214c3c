use std::f64::consts::PI;
use std::sync::Arc;

use ffpinn::error::Error;
use ffpinn::networks::*;
use ffpinn::ntk::pinn_ntk_blocks;
use ffpinn::numerics::{central_difference, Matrix, RngStream};
use ffpinn::pde::exact::poisson_source;
use ffpinn::pde::*;
use ffpinn::training::*;
use proptest::prelude::*;

fn mff_net(input_dim: usize, output_dim: usize, depth: usize, width: usize, sigmas: &[f64], m: usize, seed: u64) -> Network {
    let mut rng = RngStream::new(seed).substream("features");
    let embeddings = sigmas
        .iter()
        .map(|&s| sample_fourier_features(input_dim, m, s, true, &mut rng).unwrap())
        .collect();
    let cfg = FcnnConfig::new(depth, width, input_dim).with_output_dim(output_dim);
    Network::new(cfg, ArchitectureSpec::Mff { embeddings }).unwrap()
}

fn stmff_net(problem: &PdeProblem, width: usize, sx: f64, st: f64, m: usize, seed: u64) -> Network {
    let mut rng = RngStream::new(seed).substream("features");
    let ds = problem.benchmark.spatial_dims();
    let arch = ArchitectureSpec::Stmff {
        spatial: vec![sample_fourier_features(ds, m, sx, true, &mut rng).unwrap()],
        temporal: vec![sample_fourier_features(1, m, st, true, &mut rng).unwrap()],
        spatial_dims: ds,
    };
    let cfg = FcnnConfig::new(1, width, problem.input_dim()).with_output_dim(problem.output_dim());
    Network::new(cfg, arch).unwrap()
}

fn init(net: &Network, problem: &PdeProblem, seed: u64) -> NetworkParams {
    init_params(net, &mut RngStream::new(seed).substream("init")).with_extra(&problem.extra_init)
}

fn small_observations() -> Arc<Observations> {
    let p = GrayScottParams::default();
    let (u0, v0) = gaussian_initial_condition(16);
    let states = grayscott_reference(p, &u0, &v0, 16, 0.5, 20.0, 10.0).unwrap();
    Arc::new(Observations::from_states(states[1..].to_vec()).unwrap())
}

fn term_index(problem: &PdeProblem, name: &str) -> usize {
    problem.terms.iter().position(|t| t.name == name).unwrap()
}

#[test]
fn learning_rate_schedule() {
    assert_eq!(lr_schedule(1e-3, 0, 0.9, 1000), 1e-3);
    assert!((lr_schedule(1e-3, 999, 0.9, 1000) - 1e-3).abs() < 1e-18);
    assert!((lr_schedule(1e-3, 1000, 0.9, 1000) - 0.9e-3).abs() < 1e-18);
    assert!((lr_schedule(1e-3, 2500, 0.9, 1000) - 0.81e-3).abs() < 1e-18);
}

#[test]
fn adam_zero_gradient_keeps_parameters() {
    let mut state = OptimizerState::new(3);
    let mut theta = vec![1.0, -2.0, 0.5];
    for _ in 0..5 {
        adam_step(&mut state, &mut theta, &[0.0; 3], 1e-3).unwrap();
    }
    assert_eq!(theta, vec![1.0, -2.0, 0.5]);
    assert_eq!(state.step, 5);
}

#[test]
fn adam_first_step_moves_by_the_learning_rate() {
    let eta = 1e-3;
    let g = [3.0, -0.5, 1e-3];
    let mut state = OptimizerState::new(3);
    let mut theta = vec![0.0; 3];
    adam_step(&mut state, &mut theta, &g, eta).unwrap();
    for (t, gi) in theta.iter().zip(g) {
        // m̂ = g, v̂ = g², so Δ = −η g / (|g| + ε)
        let expected = -eta * gi / (gi.abs() + 1e-8);
        assert!((t - expected).abs() < 1e-15);
        assert!((t + eta * gi.signum()).abs() < 1e-5 * eta);
    }
}

#[test]
fn adam_matches_a_scalar_run_on_a_parabola() {
    let eta = 1e-2;
    let mut state = OptimizerState::new(1);
    let mut theta = vec![1.0];
    let (mut m, mut v, mut x) = (0.0f64, 0.0f64, 1.0f64);
    let mut prev = 1.0f64;
    for k in 1..=100 {
        let g = 2.0 * theta[0];
        adam_step(&mut state, &mut theta, &[g], eta).unwrap();

        let gx = 2.0 * x;
        m = 0.9 * m + 0.1 * gx;
        v = 0.999 * v + 0.001 * gx * gx;
        let mh = m / (1.0 - 0.9f64.powi(k));
        let vh = v / (1.0 - 0.999f64.powi(k));
        x -= eta * mh / (vh.sqrt() + 1e-8);

        assert!((theta[0] - x).abs() < 1e-14, "step {k}");
        assert!(theta[0].abs() < prev, "step {k}");
        prev = theta[0].abs();
    }
}

#[test]
fn adam_rejects_mismatched_shapes() {
    let mut state = OptimizerState::new(2);
    let mut theta = vec![0.0; 3];
    assert!(matches!(
        adam_step(&mut state, &mut theta, &[0.0; 3], 1e-3),
        Err(Error::Shape(_))
    ));
}

#[test]
fn trace_ratio_weights() {
    let w = weights_from_traces(&[3.0, 3.0], &["a", "b"]).unwrap();
    assert_eq!(w.0, vec![2.0, 2.0]);
    let w = weights_from_traces(&[9.0, 1.0], &["a", "b"]).unwrap();
    assert!((w.0[0] - 10.0 / 9.0).abs() < 1e-15);
    assert!((w.0[1] - 10.0).abs() < 1e-15);

    let blocks = [Matrix::from_diag(&[4.0, 5.0]), Matrix::from_diag(&[1.0])];
    let w = adaptive_weights_update(&[&blocks[0], &blocks[1]], &["a", "b"]).unwrap();
    assert!((w.0[0] - 10.0 / 9.0).abs() < 1e-15);
    assert!((w.0[1] - 10.0).abs() < 1e-15);
}

#[test]
fn trace_ratio_weights_are_clipped() {
    let w = weights_from_traces(&[1e-7, 1.0], &["a", "b"]).unwrap();
    assert_eq!(w.0[0], 1e4);
    assert!((w.0[1] - 1.0000001).abs() < 1e-12);
}

#[test]
fn zero_trace_is_degenerate() {
    match weights_from_traces(&[1.0, 0.0], &["loss_b", "loss_r"]) {
        Err(Error::DegenerateKernel { term }) => assert_eq!(term, "loss_r"),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #[test]
    fn trace_ratio_weights_are_scale_invariant(
        traces in proptest::collection::vec(1e-3f64..1e3, 2..5),
        scale in 1e-3f64..1e3,
    ) {
        let names = vec!["t"; traces.len()];
        let a = weights_from_traces(&traces, &names).unwrap();
        let scaled: Vec<f64> = traces.iter().map(|t| t * scale).collect();
        let b = weights_from_traces(&scaled, &names).unwrap();
        for (x, y) in a.0.iter().zip(&b.0) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }

    #[test]
    fn loss_terms_are_non_negative_and_total_is_the_weighted_sum(
        seed in 0u64..50,
        wb in 0.01f64..100.0,
        wr in 0.01f64..100.0,
    ) {
        let problem = poisson_problem();
        let net = mff_net(1, 1, 1, 8, &[1.0, 5.0], 4, seed);
        let params = init(&net, &problem, seed);
        let batch = sample_batch(&problem, &[4, 16], &mut RngStream::new(seed)).unwrap();
        let weights = LossWeights(vec![wb, wr]);
        let v = total_loss(&problem, &net, &params, &batch, &weights).unwrap();
        prop_assert!(v.terms.iter().all(|&t| t >= 0.0));
        let sum = wb * v.terms[0] + wr * v.terms[1];
        prop_assert!((v.total - sum).abs() <= 1e-12 * sum.max(1e-300));
    }
}

#[test]
fn exact_solutions_give_vanishing_loss() {
    for problem in [poisson_problem(), heat_problem(), wave_problem()] {
        let batch = sample_batch(&problem, &problem.default_batch_sizes(), &mut RngStream::new(4)).unwrap();
        let weights = LossWeights::ones(problem.terms.len());
        let v = total_loss_with(&problem, &[], &batch, &weights, |pts, spec| {
            exact_jet(problem.benchmark, pts, spec)
        })
        .unwrap();
        for (name, t) in problem.term_names().iter().zip(&v.terms) {
            assert!(*t < 1e-10, "{} {name}: {t}", problem.benchmark);
        }
    }
}

#[test]
fn zero_network_poisson_terms() {
    let problem = poisson_problem();
    let net = Network::new(FcnnConfig::new(2, 10, 1), ArchitectureSpec::Plain).unwrap();
    let params = NetworkParams::new(vec![0.0; net.n_params()]);
    let batch = sample_batch(&problem, &[16, 64], &mut RngStream::new(1)).unwrap();
    let v = total_loss(&problem, &net, &params, &batch, &LossWeights::ones(2)).unwrap();
    let residual_group = problem.term("loss_r").unwrap().group;
    let pts = &batch.groups[residual_group].points;
    let expected = pts.iter().map(|&x| poisson_source(&[x]).powi(2)).sum::<f64>() / pts.len() as f64;
    assert_eq!(v.terms[term_index(&problem, "loss_b")], 0.0);
    let lr = v.terms[term_index(&problem, "loss_r")];
    assert!((lr - expected).abs() <= 1e-12 * expected);
}

#[test]
fn doubling_the_residual_weight_adds_the_residual_term() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 2, 16, &[1.0, 10.0], 8, 3);
    let params = init(&net, &problem, 3);
    let batch = sample_batch(&problem, &[32, 32], &mut RngStream::new(2)).unwrap();
    let r = term_index(&problem, "loss_r");
    let mut w = LossWeights::ones(2);
    let a = total_loss(&problem, &net, &params, &batch, &w).unwrap();
    w.0[r] = 2.0;
    let b = total_loss(&problem, &net, &params, &batch, &w).unwrap();
    assert_eq!(a.terms, b.terms);
    assert!((b.total - a.total - a.terms[r]).abs() <= 1e-14 * b.total);
}

fn gradient_check(problem: &PdeProblem, net: &Network, batch_size: usize, seed: u64) -> f64 {
    let mut params = init(net, problem, seed);
    // move α away from its initial value so both α terms matter
    for (i, a) in params.as_mut_slice()[net.n_params()..].iter_mut().enumerate() {
        *a = -9.0 - i as f64;
    }
    let batch = sample_batch(problem, &vec![batch_size; problem.groups.len()], &mut RngStream::new(seed)).unwrap();
    let weights = LossWeights((0..problem.terms.len()).map(|k| 1.0 + 0.5 * k as f64).collect());
    let (_, grad) = loss_and_grad(problem, net, &params, &batch, &weights).unwrap();
    let n_net = params.n_network();
    let f = |v: &[f64]| {
        let p = NetworkParams::from_parts(v.to_vec(), n_net).unwrap();
        total_loss(problem, net, &p, &batch, &weights).unwrap().total
    };
    let fd = central_difference(f, params.as_slice(), 1e-5);
    let scale = fd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dev = grad
        .iter()
        .zip(&fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    dev / scale
}

#[test]
fn loss_gradients_match_finite_differences() {
    let poisson = poisson_problem();
    let net = mff_net(1, 1, 1, 6, &[1.0, 3.0], 3, 11);
    let dev = gradient_check(&poisson, &net, 6, 1);
    assert!(dev < 1e-5, "poisson {dev}");

    for problem in [heat_problem(), wave_problem()] {
        let net = stmff_net(&problem, 6, 2.0, 1.0, 3, 12);
        let dev = gradient_check(&problem, &net, 6, 2);
        assert!(dev < 1e-5, "{} {dev}", problem.benchmark);
    }

    let gs = grayscott_problem(small_observations()).unwrap();
    let net = stmff_net(&gs, 6, 2.0, 1.0, 3, 13);
    let dev = gradient_check(&gs, &net, 6, 3);
    assert!(dev < 1e-5, "grayscott {dev}");
}

#[test]
fn extra_parameter_gradient_is_checked_separately() {
    let gs = grayscott_problem(small_observations()).unwrap();
    let net = stmff_net(&gs, 6, 2.0, 1.0, 3, 21);
    let mut params = init(&net, &gs, 5);
    let n_net = params.n_network();
    params.as_mut_slice()[n_net] = -3.0;
    params.as_mut_slice()[n_net + 1] = -4.0;
    let batch = sample_batch(&gs, &[8, 8], &mut RngStream::new(5)).unwrap();
    let w = LossWeights::ones(gs.terms.len());
    let (_, grad) = loss_and_grad(&gs, &net, &params, &batch, &w).unwrap();
    let base = params.as_slice().to_vec();
    for k in 0..2 {
        let f = |a: f64| {
            let mut v = base.clone();
            v[n_net + k] = a;
            let p = NetworkParams::from_parts(v, n_net).unwrap();
            total_loss(&gs, &net, &p, &batch, &w).unwrap().total
        };
        let a = base[n_net + k];
        let h = 1e-5;
        let fd = (f(a + h) - f(a - h)) / (2.0 * h);
        assert!(grad[n_net + k] != 0.0);
        assert!((grad[n_net + k] - fd).abs() <= 1e-6 * fd.abs(), "α{k}: {} vs {fd}", grad[n_net + k]);
    }
}

#[test]
fn probe_traces_match_the_explicit_kernel_blocks() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 2, 12, &[1.0, 10.0], 6, 4);
    let params = init(&net, &problem, 4);
    let probe = sample_batch(&problem, &[16, 16], &mut RngStream::new(8)).unwrap();
    let traces = term_kernel_traces(&problem, &net, &params, &probe).unwrap();
    let b = problem.term("loss_b").unwrap();
    let r = problem.term("loss_r").unwrap();
    let blocks = pinn_ntk_blocks(
        &net,
        params.network(),
        params.extra(),
        b.op.as_ref(),
        r.op.as_ref(),
        &probe.groups[b.group].points,
        &probe.groups[r.group].points,
    )
    .unwrap();
    let ib = term_index(&problem, "loss_b");
    let ir = term_index(&problem, "loss_r");
    assert!((traces[ib] - blocks.k_uu.trace()).abs() <= 1e-10 * traces[ib]);
    assert!((traces[ir] - blocks.k_rr.trace()).abs() <= 1e-10 * traces[ir]);
}

fn quick_config(iterations: u64) -> TrainingConfig {
    let mut c = TrainingConfig::new(iterations);
    c.batch_sizes = Some(vec![16, 32]);
    c.eval_interval = 10;
    c.seed = 7;
    c
}

#[test]
fn training_is_deterministic() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 2, 16, &[1.0, 10.0], 8, 5);
    let run = || {
        train(&problem, &net, init(&net, &problem, 5), &quick_config(40), TrainHooks::default()).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.log, b.log);
    assert_eq!(a.log.to_csv(), b.log.to_csv());
    assert_eq!(a.params, b.params);
    assert_eq!(a.log.records.len(), 5);
    assert_eq!(
        a.log.records.iter().map(|r| r.iteration).collect::<Vec<_>>(),
        [0, 10, 20, 30, 39]
    );
    assert_eq!(a.log.records[0].displacement, 0.0);
}

#[test]
fn zero_iterations_leave_parameters_alone() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 1, 8, &[1.0], 4, 6);
    let start = init(&net, &problem, 6);
    let out = train(&problem, &net, start.clone(), &quick_config(0), TrainHooks::default()).unwrap();
    assert_eq!(out.params, start);
    assert!(out.log.records.is_empty());
    assert_eq!(out.log.to_csv().lines().count(), 2);
    assert_eq!(out.iterations_done, 0);
}

#[test]
fn non_finite_loss_aborts_with_the_last_good_parameters() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 1, 8, &[1.0, 10.0], 4, 7);
    let start = init(&net, &problem, 7);
    let dir = tempfile::tempdir().unwrap();
    let mut config = quick_config(10);
    config.fixed_weights = Some(vec![1e308, 1e308]);
    let hooks = TrainHooks {
        checkpoint_dir: Some(dir.path().to_path_buf()),
        on_record: None,
    };
    let out = train(&problem, &net, start.clone(), &config, hooks).unwrap();
    assert!(matches!(out.aborted, Some(Error::NonFiniteLoss { .. })));
    assert_eq!(out.params, start);
    let ckpt = load_checkpoint(&dir.path().join("checkpoint_00000000.bin")).unwrap();
    assert_eq!(ckpt.params, start);
}

#[test]
fn adaptive_weights_are_logged_within_bounds() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 2, 16, &[1.0, 10.0], 8, 8);
    let mut config = quick_config(12);
    config.weights = WeightMode::Adaptive;
    config.adaptive_interval = 5;
    config.probe_size = 16;
    config.eval_interval = 1;
    let mut seen = 0;
    let mut cb = |_: &LogRecord| seen += 1;
    let hooks = TrainHooks {
        checkpoint_dir: None,
        on_record: Some(&mut cb),
    };
    let out = train(&problem, &net, init(&net, &problem, 8), &config, hooks).unwrap();
    assert_eq!(seen, 12);
    let recs = &out.log.records;
    for r in recs {
        assert!(r.weights.iter().all(|w| (1e-2..=1e4).contains(w)));
        assert!(r.weights != vec![1.0, 1.0]);
    }
    // constant between updates, refreshed at 0, 5, 10
    assert_eq!(recs[1].weights, recs[4].weights);
    assert_ne!(recs[4].weights, recs[5].weights);
    assert_eq!(recs[5].weights, recs[9].weights);
}

#[test]
fn poisson_smoke_run_reduces_the_loss() {
    let problem = poisson_problem();
    let net = mff_net(1, 1, 2, 100, &[1.0, 10.0], 100, 9);
    let start = init(&net, &problem, 9);
    let mut config = TrainingConfig::new(1000);
    config.eval_interval = 1000;
    config.seed = 9;
    let out = train(&problem, &net, start.clone(), &config, TrainHooks::default()).unwrap();
    let probe = sample_batch(&problem, &[256, 1024], &mut RngStream::new(99)).unwrap();
    let w = LossWeights::ones(2);
    let before = total_loss(&problem, &net, &start, &probe, &w).unwrap().total;
    let after = total_loss(&problem, &net, &out.params, &probe, &w).unwrap().total;
    assert!(after * 10.0 <= before, "{before} -> {after}");
}

#[test]
fn log_csv_roundtrip_and_version_check() {
    let log = TrainingLog {
        term_names: vec!["loss_u".into(), "loss_r".into()],
        error_names: vec!["relative_l2_u".into(), "relative_l2_v".into()],
        physical_names: vec!["eps1".into()],
        records: vec![LogRecord {
            iteration: 100,
            learning_rate: 1e-3,
            total_loss: 0.1 + 0.2,
            terms: vec![1.0 / 3.0, 2e-300],
            weights: vec![1.0, 12.5],
            relative_l2: vec![0.5, PI],
            physical: vec![2e-5],
            displacement: 0.01,
        }],
    };
    let csv = log.to_csv();
    assert!(csv.starts_with("#schema_version=1\niteration,learning_rate,total_loss,loss_u,loss_r,weight_loss_u"));
    let path = std::path::Path::new("log.csv");
    assert_eq!(TrainingLog::from_csv(&csv, path).unwrap(), log);
    let bad = csv.replacen("#schema_version=1", "#schema_version=2", 1);
    assert!(matches!(
        TrainingLog::from_csv(&bad, path),
        Err(Error::SchemaVersion { found: 2, .. })
    ));
}

#[test]
fn config_defaults_and_validation() {
    let c: TrainingConfig = serde_json::from_str(r#"{"iterations": 10}"#).unwrap();
    assert_eq!(c, TrainingConfig::new(10));
    assert_eq!(c.learning_rate, 1e-3);
    assert_eq!(c.decay_steps, 1000);
    let mut bad = c.clone();
    bad.learning_rate = 0.0;
    bad.eval_interval = 0;
    match bad.validate() {
        Err(Error::Validation(keys)) => {
            assert_eq!(keys.len(), 2);
            assert!(keys[0].starts_with("training.learning_rate"));
        }
        other => panic!("{other:?}"),
    }
    assert!(serde_json::from_str::<TrainingConfig>(r#"{"iterations": 1, "lr": 1}"#).is_err());
}

fn regression_net(sigma: f64, seed: u64) -> Network {
    mff_net(1, 1, 4, 100, &[sigma], 100, seed)
}

#[test]
fn regression_gradient_matches_finite_differences() {
    let net = mff_net(1, 1, 2, 8, &[2.0], 4, 1);
    let theta = init_params(&net, &mut RngStream::new(1)).into_vec();
    let x: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    let y: Vec<f64> = x.iter().map(|x| (2.0 * PI * x).sin()).collect();
    for loss in [RegressionLoss::MeanSquared, RegressionLoss::HalfSum] {
        let (_, grad, _) = regression_loss_grad(&net, &theta, &x, &y, loss).unwrap();
        let fd = central_difference(
            |t| regression_loss_grad(&net, t, &x, &y, loss).unwrap().0,
            &theta,
            1e-6,
        );
        let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dev = grad.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(dev < 1e-6 * scale, "{loss:?}");
    }
}

#[test]
fn band_error_oracles() {
    let n = 100;
    let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let low: Vec<f64> = x.iter().map(|x| (2.0 * PI * x).sin()).collect();
    let high: Vec<f64> = x.iter().map(|x| (20.0 * PI * x).sin()).collect();
    let target: Vec<f64> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
    let bands = [0..=2, 9..=11];
    let e = band_errors(&target, &target, &bands).unwrap();
    assert_eq!(e, vec![0.0, 0.0]);
    let e = band_errors(&vec![0.0; n], &target, &bands).unwrap();
    assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    let e = band_errors(&low, &target, &bands).unwrap();
    assert!(e[0] < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    let half: Vec<f64> = target.iter().map(|t| 0.5 * t).collect();
    let e = band_errors(&half, &target, &bands).unwrap();
    assert!((e[0] - 0.5).abs() < 1e-12 && (e[1] - 0.5).abs() < 1e-12);
}

#[test]
fn gradient_descent_step_is_plain() {
    let net = mff_net(1, 1, 1, 4, &[1.0], 2, 2);
    let theta = init_params(&net, &mut RngStream::new(2)).into_vec();
    let x = [0.1, 0.5, 0.9];
    let y = [1.0, 0.0, -1.0];
    let (_, g, _) = regression_loss_grad(&net, &theta, &x, &y, RegressionLoss::HalfSum).unwrap();
    let out = fit_regression(
        &net,
        &theta,
        &x,
        &y,
        1,
        RegressionOptimizer::GradientDescent { learning_rate: 0.1 },
        RegressionLoss::HalfSum,
        |_, _, _| true,
    )
    .unwrap();
    for ((a, b), gi) in out.theta.iter().zip(&theta).zip(&g) {
        assert_eq!(*a, b - 0.1 * gi);
    }
}

#[test]
fn high_sigma_moves_the_parameters_less() {
    let n = 100;
    let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|x| (20.0 * PI * x).sin() + (2.0 * PI * x).sin())
        .collect();
    let displacement = |sigma: f64| {
        let net = regression_net(sigma, 0);
        let theta0 = init_params(&net, &mut RngStream::new(0).substream("init")).into_vec();
        let out = fit_regression(
            &net,
            &theta0,
            &x,
            &y,
            1000,
            RegressionOptimizer::Adam { learning_rate: 1e-3 },
            RegressionLoss::MeanSquared,
            |_, _, _| true,
        )
        .unwrap();
        displacement_ratio(&out.theta, &theta0)
    };
    let d1 = displacement(1.0);
    let d10 = displacement(10.0);
    assert!(d10 < d1, "σ=1: {d1}, σ=10: {d10}");
}
