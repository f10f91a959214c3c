use std::path::PathBuf;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::networks::{save_checkpoint, Network, NetworkParams};
use crate::numerics::RngStream;
use crate::pde::{evaluate, sample_batch, Evaluation, PdeProblem};

use super::adam::{adam_step, lr_schedule, OptimizerState};
use super::adaptive::{term_kernel_traces, weights_from_traces};
use super::config::{TrainingConfig, WeightMode};
use super::log::{LogRecord, TrainingLog};
use super::loss::{loss_and_grad, LossWeights};

/// Side channels of a training run.
#[derive(Default)]
pub struct TrainHooks<'a> {
    /// Directory for `checkpoint_{iteration}.bin` files; none written when
    /// absent.
    pub checkpoint_dir: Option<PathBuf>,
    /// Called with every new log record.
    pub on_record: Option<&'a mut dyn FnMut(&LogRecord)>,
}

#[derive(Debug)]
pub struct TrainingOutcome {
    /// Final parameters, or the last finite ones when the run aborted.
    pub params: NetworkParams,
    pub log: TrainingLog,
    /// Errors of `params` on the problem's evaluation grid.
    pub evaluation: Option<Evaluation>,
    pub weights: LossWeights,
    pub iterations_done: u64,
    /// The numerical failure that stopped the run early.
    pub aborted: Option<Error>,
    pub wall_seconds: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖θ − θ0‖ / ‖θ0‖`
pub fn displacement_ratio(theta: &[f64], theta0: &[f64]) -> f64 {
    let diff: f64 = theta
        .iter()
        .zip(theta0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let n0 = norm(theta0);
    if n0 > 0.0 {
        diff / n0
    } else {
        diff
    }
}

pub fn log_columns(problem: &PdeProblem) -> TrainingLog {
    let error_names = if problem.output_dim() == 1 {
        vec!["relative_l2".to_owned()]
    } else {
        ["u", "v", "w"]
            .iter()
            .take(problem.output_dim())
            .map(|f| format!("relative_l2_{f}"))
            .collect()
    };
    TrainingLog {
        term_names: problem.term_names().iter().map(|s| s.to_string()).collect(),
        error_names,
        physical_names: problem
            .physical_parameters(&problem.extra_init)
            .iter()
            .map(|(n, _)| n.to_string())
            .collect(),
        records: Vec::new(),
    }
}

/// Fresh-batch Adam training with optional NTK-based loss weights.
///
/// Batches come from the `sampler` substream of `config.seed` and adaptive
/// probes from `probe`, so runs are reproducible bit for bit. A record is
/// logged before the update at every `eval_interval`-th iteration and at
/// the last one.
pub fn train(
    problem: &PdeProblem,
    net: &Network,
    init: NetworkParams,
    config: &TrainingConfig,
    hooks: TrainHooks<'_>,
) -> Result<TrainingOutcome> {
    config.validate()?;
    let start = Instant::now();
    let n_terms = problem.terms.len();
    if init.n_network() != net.n_params() || init.n_extra() != problem.n_extra() {
        return Err(Error::Shape(format!(
            "parameters ({} network, {} extra) do not fit network ({}) and problem ({})",
            init.n_network(),
            init.n_extra(),
            net.n_params(),
            problem.n_extra()
        )));
    }
    let sizes = config
        .batch_sizes
        .clone()
        .unwrap_or_else(|| problem.default_batch_sizes());
    if sizes.len() != problem.groups.len() {
        return Err(Error::Validation(vec![format!(
            "training.batch_sizes: {} sizes for {} sample groups",
            sizes.len(),
            problem.groups.len()
        )]));
    }
    let mut weights = match (&config.weights, &config.fixed_weights) {
        (WeightMode::Fixed, Some(w)) => LossWeights(w.clone()),
        _ => LossWeights::ones(n_terms),
    };
    weights.validate(n_terms)?;

    let root = RngStream::new(config.seed);
    let mut sampler = root.substream("sampler");
    let mut prober = root.substream("probe");
    let mut state = OptimizerState::new(init.len());
    let theta0 = init.network().to_vec();
    let mut params = init.clone();
    let mut last_good = init;
    let mut log = log_columns(problem);
    let TrainHooks {
        checkpoint_dir,
        mut on_record,
    } = hooks;
    let checkpoint = |p: &NetworkParams, it: u64| -> Result<()> {
        if let Some(dir) = &checkpoint_dir {
            std::fs::create_dir_all(dir)?;
            save_checkpoint(
                &dir.join(format!("checkpoint_{it:08}.bin")),
                p,
                &net.arch().embeddings(),
            )?;
        }
        Ok(())
    };

    let mut aborted = None;
    let mut done = 0;
    for it in 0..config.iterations {
        if config.weights == WeightMode::Adaptive && it % config.adaptive_interval == 0 {
            let probe = sample_batch(problem, &vec![config.probe_size; sizes.len()], &mut prober)?;
            let traces = term_kernel_traces(problem, net, &params, &probe)?;
            weights = weights_from_traces(&traces, &problem.term_names())?;
        }
        let batch = sample_batch(problem, &sizes, &mut sampler)?;
        let (loss, grad) = match loss_and_grad(problem, net, &params, &batch, &weights) {
            Ok(v) => v,
            Err(e) if e.is_numerical() => {
                aborted = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let lr = lr_schedule(config.learning_rate, it, config.decay_rate, config.decay_steps);
        if it % config.eval_interval == 0 || it + 1 == config.iterations {
            let ev = evaluate(problem, net, params.network())?;
            let record = LogRecord {
                iteration: it,
                learning_rate: lr,
                total_loss: loss.total,
                terms: loss.terms.clone(),
                weights: weights.0.clone(),
                relative_l2: ev.relative_l2.clone(),
                physical: problem
                    .physical_parameters(params.extra())
                    .into_iter()
                    .map(|(_, v)| v)
                    .collect(),
                displacement: displacement_ratio(params.network(), &theta0),
            };
            if let Some(cb) = on_record.as_mut() {
                cb(&record);
            }
            log.records.push(record);
        }
        last_good.as_mut_slice().copy_from_slice(params.as_slice());
        adam_step(&mut state, params.as_mut_slice(), &grad, lr)?;
        done = it + 1;
        if params.as_slice().iter().any(|x| !x.is_finite()) {
            aborted = Some(Error::NumericalOverflow {
                location: format!("parameters after iteration {it}"),
            });
            break;
        }
        if done % config.checkpoint_interval == 0 {
            checkpoint(&params, done)?;
        }
    }
    let final_params = if aborted.is_some() {
        checkpoint(&last_good, done)?;
        last_good
    } else {
        params
    };
    let evaluation = match evaluate(problem, net, final_params.network()) {
        Ok(ev) => Some(ev),
        Err(e) if e.is_numerical() => None,
        Err(e) => return Err(e),
    };
    Ok(TrainingOutcome {
        params: final_params,
        log,
        evaluation,
        weights,
        iterations_done: done,
        aborted,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
