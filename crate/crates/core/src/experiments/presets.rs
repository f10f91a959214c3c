//! Configurations shipped with the crate, one per reproduced experiment.

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

const PRESETS: &[(&str, &str)] = &[
    ("fig1-plain-poisson", include_str!("../../presets/fig1-plain-poisson.json")),
    ("poisson-plain", include_str!("../../presets/poisson-plain.json")),
    ("poisson-mff", include_str!("../../presets/poisson-mff.json")),
    ("poisson-ff-sigma1", include_str!("../../presets/poisson-ff-sigma1.json")),
    ("poisson-ff-sigma50", include_str!("../../presets/poisson-ff-sigma50.json")),
    ("heat-stmff", include_str!("../../presets/heat-stmff.json")),
    ("heat-plain", include_str!("../../presets/heat-plain.json")),
    ("wave-stmff-adaptive", include_str!("../../presets/wave-stmff-adaptive.json")),
    ("wave-stmff-fixed", include_str!("../../presets/wave-stmff-fixed.json")),
    ("grayscott-dataset", include_str!("../../presets/grayscott-dataset.json")),
    ("grayscott-inverse", include_str!("../../presets/grayscott-inverse.json")),
    ("grayscott-paper", include_str!("../../presets/grayscott-paper.json")),
    ("ntk-sigma-sweep", include_str!("../../presets/ntk-sigma-sweep.json")),
    ("regression-spectral-bias", include_str!("../../presets/regression-spectral-bias.json")),
    ("regression-overfit", include_str!("../../presets/regression-overfit.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Raw JSON of a preset.
pub fn preset_json(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, j)| *j)
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = preset_json(name).ok_or_else(|| {
        Error::Validation(vec![format!(
            "preset: unknown name `{name}` (known: {})",
            preset_names().join(", ")
        )])
    })?;
    ExperimentConfig::from_json(text)
}
