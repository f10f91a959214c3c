use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::networks::init_params;
use crate::ntk::kernel::NTK_MAX_POINTS;
use crate::ntk::{dominant_frequency, eigenvectors_csv, ntk_matrix, spectrum_csv, KernelEigenSystem};
use crate::numerics::{dft_magnitude, RngStream};
use crate::training::log::fmt_f64;

use super::config::{ArchKindConfig, ArchitectureConfig, ExperimentConfig};
use super::record::{finish_run, write_atomic, ExperimentRecord, RunEnd, RunStatus};
use super::Progress;

/// Magnitude-weighted mean wavenumber of `q`.
pub fn spectral_centroid(q: &[f64]) -> Result<f64> {
    let m = dft_magnitude(q)?;
    let total: f64 = m.iter().sum();
    Ok(m.iter().enumerate().map(|(k, v)| k as f64 * v).sum::<f64>() / total)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Leading-eigenvector statistics of one scale over several seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSpectrum {
    /// `None` for a plain network.
    pub sigma: Option<f64>,
    pub dominant: Vec<usize>,
    pub centroid: Vec<f64>,
    pub median_dominant: f64,
    pub median_centroid: f64,
}

/// Kernel eigensystem of one freshly initialized network on `grid`.
pub fn kernel_system(
    arch: &ArchitectureConfig,
    sigma: Option<f64>,
    grid: &[f64],
    root: &RngStream,
) -> Result<KernelEigenSystem> {
    let a = match sigma {
        Some(s) => ArchitectureConfig {
            kind: ArchKindConfig::Mff,
            sigmas: vec![s],
            ..arch.clone()
        },
        None => arch.clone(),
    };
    let net = a.build(1, 1, 1, &mut root.substream("features"))?;
    let theta = init_params(&net, &mut root.substream("init")).into_vec();
    let k = ntk_matrix(&net, &theta, grid)?;
    KernelEigenSystem::new(k, grid.to_vec(), 1)
}

/// Writes eigenvalue and eigenvector CSVs for the first seed of every scale
/// and `dominant_frequency.csv` with one row per scale.
pub fn analyze_ntk(config: &ExperimentConfig, out: &Path, mut progress: Progress<'_>) -> Result<ExperimentRecord> {
    config.validate()?;
    let start = Instant::now();
    let arch = config.architecture.as_ref().expect("validated");
    let cfg = config.ntk.clone().unwrap_or_default();
    if cfg.grid_points > NTK_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "NTK grid",
            size: cfg.grid_points,
            cap: NTK_MAX_POINTS,
        });
    }
    std::fs::create_dir_all(out)?;
    let n = cfg.grid_points;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let scales: Vec<Option<f64>> = if arch.kind == ArchKindConfig::Plain {
        vec![None]
    } else {
        cfg.sigmas.iter().map(|&s| Some(s)).collect()
    };
    let mut artifacts = Vec::new();
    let mut metrics = BTreeMap::new();
    let mut table = String::from("#schema_version=1\nsigma,median_dominant_frequency,median_spectral_centroid");
    for s in 0..cfg.seeds {
        let _ = write!(table, ",dominant_seed{s}");
    }
    table.push('\n');
    for sigma in scales {
        let label = sigma.map_or("plain".to_owned(), |s| format!("sigma{s}"));
        let spec = scale_spectrum(arch, sigma, &grid, cfg.seeds, config.seed, |sys| {
            for (file, text) in [
                (format!("eigenvalues_{label}.csv"), spectrum_csv(&sys.values)),
                (format!("eigenvectors_{label}.csv"), eigenvectors_csv(sys, cfg.eigenvectors)),
            ] {
                write_atomic(&out.join(&file), text.as_bytes())?;
                artifacts.push(file);
            }
            Ok(())
        })?;
        let (md, mc, dominant) = (spec.median_dominant, spec.median_centroid, &spec.dominant);
        let _ = write!(
            table,
            "{},{},{}",
            sigma.map_or("0".to_owned(), fmt_f64),
            fmt_f64(md),
            fmt_f64(mc)
        );
        for d in dominant {
            let _ = write!(table, ",{d}");
        }
        table.push('\n');
        metrics.insert(format!("{label}_median_dominant_frequency"), md);
        metrics.insert(format!("{label}_median_spectral_centroid"), mc);
        if let Some(p) = progress.as_mut() {
            p(&format!("{label}: dominant {dominant:?}, median centroid {mc:.3}"));
        }
    }
    write_atomic(&out.join("dominant_frequency.csv"), table.as_bytes())?;
    artifacts.push("dominant_frequency.csv".into());
    finish_run(RunEnd {
        config,
        out,
        extra_inputs: &[],
        header: vec![("task", "ntk".into())],
        metrics,
        artifacts,
        status: RunStatus::Ok,
        error: None,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Leading-eigenvector statistics over `seeds` initializations; `first`
/// sees the eigensystem of seed 0.
pub fn scale_spectrum<F>(
    arch: &ArchitectureConfig,
    sigma: Option<f64>,
    grid: &[f64],
    seeds: usize,
    seed: u64,
    mut first: F,
) -> Result<ScaleSpectrum>
where
    F: FnMut(&KernelEigenSystem) -> Result<()>,
{
    let mut dominant = Vec::new();
    let mut centroid = Vec::new();
    for s in 0..seeds {
        let root = RngStream::new(seed).substream(&format!("seed{s}"));
        let sys = kernel_system(arch, sigma, grid, &root)?;
        let q = sys.vector(0);
        dominant.push(dominant_frequency(&q)?);
        centroid.push(spectral_centroid(&q)?);
        if s == 0 {
            first(&sys)?;
        }
    }
    let median_dominant = median(&mut dominant.iter().map(|&d| d as f64).collect::<Vec<_>>());
    let median_centroid = median(&mut centroid.clone());
    Ok(ScaleSpectrum {
        sigma,
        dominant,
        centroid,
        median_dominant,
        median_centroid,
    })
}

/// Statistics for each scale on `grid_points` evenly spaced points of
/// `[0, 1]`, as written to `dominant_frequency.csv`.
pub fn sigma_sweep(
    arch: &ArchitectureConfig,
    sigmas: &[f64],
    seeds: usize,
    grid_points: usize,
    seed: u64,
) -> Result<Vec<ScaleSpectrum>> {
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| i as f64 / (grid_points - 1) as f64)
        .collect();
    sigmas
        .iter()
        .map(|&s| scale_spectrum(arch, Some(s), &grid, seeds, seed, |_| Ok(())))
        .collect()
}
