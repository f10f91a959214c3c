use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::error::Result;
use crate::networks::init_params;
use crate::numerics::RngStream;
use crate::pde::relative_l2;
use crate::training::log::fmt_f64;
use crate::training::{
    band_errors, displacement_ratio, fit_regression, RegressionLoss, RegressionOptimizer,
};

use super::config::{ArchKindConfig, ArchitectureConfig, ExperimentConfig, RegressionConfig, TrainPoints};
use super::record::{finish_run, write_atomic, ExperimentRecord, RunEnd, RunStatus};
use super::Progress;

/// Result of fitting one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionRun {
    pub sigma: f64,
    pub train_relative_l2: f64,
    pub test_relative_l2: f64,
    pub displacement: f64,
    /// First epoch at which each band error fell below the threshold.
    pub first_below: Vec<Option<usize>>,
    pub final_band_errors: Vec<f64>,
    /// `epoch, loss, train_relative_l2, band errors…, displacement` rows.
    pub history_csv: String,
    /// `x, prediction, target` on the test points.
    pub fit_csv: String,
}

pub fn target_fn(freqs: &[f64], x: f64) -> f64 {
    freqs.iter().map(|a| (a * PI * x).sin()).sum()
}

/// Scale label used in file names and metric keys, e.g. `sigma10`.
pub fn sigma_label(sigma: f64) -> String {
    format!("sigma{sigma}")
}

/// Fits the target with a single embedding of scale `sigma`.
pub fn fit_one(
    arch: &ArchitectureConfig,
    cfg: &RegressionConfig,
    sigma: f64,
    seed: u64,
) -> Result<RegressionRun> {
    let single = ArchitectureConfig {
        kind: ArchKindConfig::Mff,
        sigmas: vec![sigma],
        ..arch.clone()
    };
    let root = RngStream::new(seed).substream(&sigma_label(sigma));
    let net = single.build(1, 1, 1, &mut root.substream("features"))?;
    let theta0 = init_params(&net, &mut root.substream("init")).into_vec();
    let n = cfg.n_train;
    let x: Vec<f64> = match cfg.train_points {
        TrainPoints::Grid => (0..n).map(|i| i as f64 / n as f64).collect(),
        TrainPoints::Uniform => {
            let mut rng = root.substream("points");
            let mut v: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            v.sort_by(f64::total_cmp);
            v
        }
    };
    let y: Vec<f64> = x.iter().map(|&x| target_fn(&cfg.target_frequencies, x)).collect();
    let bands: Vec<_> = cfg.bands.iter().map(|b| b[0]..=b[1]).collect();

    let mut first_below = vec![None; bands.len()];
    let mut last_bands = vec![f64::NAN; bands.len()];
    let mut history = String::from("#schema_version=1\nepoch,train_relative_l2");
    for b in &cfg.bands {
        let _ = write!(history, ",band_{}_{}", b[0], b[1]);
    }
    history.push_str(",param_displacement\n");
    let mut failure = None;
    let out = fit_regression(
        &net,
        &theta0,
        &x,
        &y,
        cfg.epochs,
        RegressionOptimizer::Adam {
            learning_rate: cfg.learning_rate,
        },
        RegressionLoss::MeanSquared,
        |epoch, theta, pred| {
            let train = relative_l2(pred, &y).unwrap_or(f64::NAN);
            let mut row = format!("{epoch},{}", fmt_f64(train));
            if !bands.is_empty() {
                match band_errors(pred, &y, &bands) {
                    Ok(e) => {
                        for (k, v) in e.iter().enumerate() {
                            if *v < cfg.band_threshold && first_below[k].is_none() {
                                first_below[k] = Some(epoch);
                            }
                            row.push(',');
                            row.push_str(&fmt_f64(*v));
                        }
                        last_bands = e;
                    }
                    Err(e) => {
                        failure = Some(e);
                        return false;
                    }
                }
            }
            let _ = writeln!(history, "{row},{}", fmt_f64(displacement_ratio(theta, &theta0)));
            true
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let x_test: Vec<f64> = (0..cfg.n_test).map(|i| i as f64 / (cfg.n_test - 1) as f64).collect();
    let y_test: Vec<f64> = x_test.iter().map(|&x| target_fn(&cfg.target_frequencies, x)).collect();
    let pred_test = net.predict(&out.theta, &x_test)?;
    let mut fit_csv = String::from("#schema_version=1\nx,prediction,target\n");
    for ((x, p), t) in x_test.iter().zip(&pred_test).zip(&y_test) {
        let _ = writeln!(fit_csv, "{},{},{}", fmt_f64(*x), fmt_f64(*p), fmt_f64(*t));
    }
    Ok(RegressionRun {
        sigma,
        train_relative_l2: relative_l2(&out.predictions, &y)?,
        test_relative_l2: relative_l2(&pred_test, &y_test)?,
        displacement: displacement_ratio(&out.theta, &theta0),
        first_below,
        final_band_errors: last_bands,
        history_csv: history,
        fit_csv,
    })
}

/// Runs every configured scale and writes per-scale history and fit CSVs.
pub fn run_regression(config: &ExperimentConfig, out: &Path, mut progress: Progress<'_>) -> Result<ExperimentRecord> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    let start = Instant::now();
    let arch = config.architecture.as_ref().expect("validated");
    let cfg = config.regression.as_ref().expect("validated");
    let mut metrics = BTreeMap::new();
    let mut artifacts = Vec::new();
    for &sigma in &cfg.sigmas {
        let run = fit_one(arch, cfg, sigma, config.seed)?;
        let label = sigma_label(sigma);
        for (name, text) in [("history", &run.history_csv), ("fit", &run.fit_csv)] {
            let file = format!("{name}_{label}.csv");
            write_atomic(&out.join(&file), text.as_bytes())?;
            artifacts.push(file);
        }
        metrics.insert(format!("{label}_train_relative_l2"), run.train_relative_l2);
        metrics.insert(format!("{label}_test_relative_l2"), run.test_relative_l2);
        metrics.insert(format!("{label}_param_displacement"), run.displacement);
        for (k, b) in cfg.bands.iter().enumerate() {
            let key = format!("{label}_band_{}_{}", b[0], b[1]);
            // never reached: -1
            metrics.insert(format!("{key}_first_below"), run.first_below[k].map_or(-1.0, |e| e as f64));
            metrics.insert(format!("{key}_final_error"), run.final_band_errors[k]);
        }
        if let Some(p) = progress.as_mut() {
            p(&format!(
                "σ={sigma}: train {:.3e}, test {:.3e}, first below {:?}",
                run.train_relative_l2, run.test_relative_l2, run.first_below
            ));
        }
    }
    metrics.insert("epochs".into(), cfg.epochs as f64);
    finish_run(RunEnd {
        config,
        out,
        extra_inputs: &[],
        header: vec![("task", "regression".into())],
        metrics,
        artifacts,
        status: RunStatus::Ok,
        error: None,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
