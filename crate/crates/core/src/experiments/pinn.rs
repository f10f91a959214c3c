use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::Result;
use crate::networks::{init_params, save_checkpoint, Network, NetworkParams};
use crate::numerics::RngStream;
use crate::pde::dataset::MANIFEST_FILE;
use crate::pde::{builtin_problem, grayscott_problem, predict_on_grid, Benchmark, Observations, PdeProblem};
use crate::training::log::fmt_f64;
use crate::training::{train, LogRecord, TrainHooks};

use super::config::ExperimentConfig;
use super::dataset::ensure_dataset;
use super::record::{finish_run, write_atomic, ExperimentRecord, RunEnd, RunStatus};
use super::Progress;

/// Most rows written to `prediction.csv`.
pub const PLOT_MAX_ROWS: usize = 65_536;

/// Problem, network and initial parameters of a PINN configuration, plus
/// the dataset manifest bytes that go into the input hash.
pub struct PinnSetup {
    pub problem: PdeProblem,
    pub net: Network,
    pub init: NetworkParams,
    pub dataset_manifest: Vec<u8>,
}

pub fn setup_pinn(config: &ExperimentConfig, out: &Path) -> Result<PinnSetup> {
    config.validate()?;
    let benchmark = config.benchmark()?;
    let mut dataset_manifest = Vec::new();
    let problem = match builtin_problem(benchmark) {
        Some(p) => p,
        None => {
            let ds = config.dataset.as_ref().expect("validated");
            let dir = ds.dir.clone().unwrap_or_else(|| out.join("dataset"));
            ensure_dataset(ds, &dir)?;
            dataset_manifest = std::fs::read(dir.join(MANIFEST_FILE))?;
            let obs = Observations::load(&dir, (ds.window[0], ds.window[1]))?;
            grayscott_problem(Arc::new(obs))?
        }
    };
    let arch = config.architecture.as_ref().expect("validated");
    let root = RngStream::new(config.seed);
    let net = arch.build(
        problem.input_dim(),
        problem.output_dim(),
        benchmark.spatial_dims(),
        &mut root.substream("features"),
    )?;
    let init = init_params(&net, &mut root.substream("init")).with_extra(&problem.extra_init);
    Ok(PinnSetup {
        problem,
        net,
        init,
        dataset_manifest,
    })
}

fn input_names(benchmark: Benchmark) -> &'static [&'static str] {
    match benchmark {
        Benchmark::Poisson1d => &["x"],
        Benchmark::Heat1d | Benchmark::Wave1d => &["x", "t"],
        Benchmark::GrayScott2d => &["x", "y", "t"],
    }
}

fn output_names(problem: &PdeProblem) -> Vec<&'static str> {
    if problem.output_dim() == 1 {
        vec!["u"]
    } else {
        vec!["u", "v"]
    }
}

/// Prediction, reference and point-wise error on (a stride of) the
/// evaluation grid, with physical coordinates.
pub fn prediction_csv(problem: &PdeProblem, net: &Network, theta: &[f64]) -> Result<String> {
    let grid = predict_on_grid(problem, net, theta)?;
    let d = grid.input_dim;
    let n_out = grid.output_dim;
    let stride = grid.len().div_ceil(PLOT_MAX_ROWS).max(1);
    let time_map = problem.observations.as_ref().map(|o| o.time_map());
    let outs = output_names(problem);
    let mut s = String::from("#schema_version=1\n");
    let mut header: Vec<String> = input_names(problem.benchmark).iter().map(|c| c.to_string()).collect();
    for o in &outs {
        header.push(format!("{o}_pred"));
        header.push(format!("{o}_ref"));
        header.push(format!("{o}_abs_error"));
    }
    s.push_str(&header.join(","));
    s.push('\n');
    for i in (0..grid.len()).step_by(stride) {
        let x = &grid.points[i * d..(i + 1) * d];
        let mut row: Vec<String> = x.iter().map(|&v| fmt_f64(v)).collect();
        if let Some((t0, span)) = time_map {
            row[d - 1] = fmt_f64(t0 + x[d - 1] * span);
        }
        for o in 0..n_out {
            let p = grid.predicted[i * n_out + o];
            let r = grid.reference[i * n_out + o];
            row.push(fmt_f64(p));
            row.push(fmt_f64(r));
            row.push(fmt_f64((p - r).abs()));
        }
        let _ = writeln!(s, "{}", row.join(","));
    }
    Ok(s)
}

/// Trains the configured PINN and writes the log, checkpoints, plot data,
/// `summary.json` and `record.json` into `out`.
pub fn run_pinn(config: &ExperimentConfig, out: &Path, mut progress: Progress<'_>) -> Result<ExperimentRecord> {
    std::fs::create_dir_all(out)?;
    let setup = setup_pinn(config, out)?;
    let PinnSetup {
        problem,
        net,
        init,
        dataset_manifest,
    } = setup;
    let mut tc = config.training.clone().expect("validated");
    tc.seed = config.seed;

    let mut report = |r: &LogRecord| {
        if let Some(p) = progress.as_mut() {
            let errs: Vec<String> = r.relative_l2.iter().map(|e| format!("{e:.3e}")).collect();
            p(&format!(
                "iter {:>7}  loss {:.4e}  rel_l2 {}",
                r.iteration,
                r.total_loss,
                errs.join("/")
            ));
        }
    };
    let hooks = TrainHooks {
        checkpoint_dir: Some(out.join("checkpoints")),
        on_record: Some(&mut report),
    };
    let outcome = train(&problem, &net, init, &tc, hooks)?;

    let mut artifacts = vec!["log.csv".to_owned(), "final.bin".into(), "prediction.csv".into()];
    write_atomic(&out.join("log.csv"), outcome.log.to_csv().as_bytes())?;
    save_checkpoint(&out.join("final.bin"), &outcome.params, &net.arch().embeddings())?;
    write_atomic(
        &out.join("prediction.csv"),
        prediction_csv(&problem, &net, outcome.params.network())?.as_bytes(),
    )?;
    if let Ok(entries) = std::fs::read_dir(out.join("checkpoints")) {
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .map(|e| format!("checkpoints/{}", e.file_name().to_string_lossy()))
            .collect();
        names.sort();
        artifacts.extend(names);
    }

    let mut metrics = BTreeMap::new();
    metrics.insert("iterations".to_owned(), tc.iterations as f64);
    metrics.insert("iterations_done".to_owned(), outcome.iterations_done as f64);
    if let Some(last) = outcome.log.records.last() {
        metrics.insert("final_total_loss".into(), last.total_loss);
    }
    if let Some(ev) = &outcome.evaluation {
        if ev.relative_l2.len() == 1 {
            metrics.insert("final_relative_l2".into(), ev.relative_l2[0]);
        } else {
            for (name, e) in output_names(&problem).iter().zip(&ev.relative_l2) {
                metrics.insert(format!("final_relative_l2_{name}"), *e);
            }
            for (o, name) in output_names(&problem).iter().enumerate() {
                let worst = ev.per_snapshot.iter().map(|r| r[o]).fold(0.0f64, f64::max);
                metrics.insert(format!("max_snapshot_relative_l2_{name}"), worst);
            }
        }
    }
    if let Some(obs) = &problem.observations {
        let truth = [obs.params.eps1, obs.params.eps2];
        for ((name, v), t) in problem
            .physical_parameters(outcome.params.extra())
            .into_iter()
            .zip(truth)
        {
            metrics.insert(name.to_owned(), v);
            metrics.insert(format!("{name}_relative_error"), (v - t).abs() / t);
        }
    }

    let (status, error) = match &outcome.aborted {
        Some(e) => (RunStatus::Failed, Some(e.to_string())),
        None => (RunStatus::Ok, None),
    };
    finish_run(RunEnd {
        config,
        out,
        extra_inputs: &dataset_manifest,
        header: vec![("benchmark", problem.benchmark.id().into())],
        metrics,
        artifacts,
        status,
        error,
        wall_seconds: outcome.wall_seconds,
    })
}

