use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const LOG_SCHEMA_VERSION: u32 = 1;

/// One evaluation point of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRecord {
    pub iteration: u64,
    pub learning_rate: f64,
    pub total_loss: f64,
    /// Unweighted loss terms.
    pub terms: Vec<f64>,
    pub weights: Vec<f64>,
    pub relative_l2: Vec<f64>,
    /// Inferred physical parameters, e.g. `ε = exp(α)`.
    pub physical: Vec<f64>,
    /// `‖θ(t) − θ(0)‖ / ‖θ(0)‖` over the network parameters.
    pub displacement: f64,
}

/// Append-only evaluation history with stable column names.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrainingLog {
    pub term_names: Vec<String>,
    pub error_names: Vec<String>,
    pub physical_names: Vec<String>,
    pub records: Vec<LogRecord>,
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl TrainingLog {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec![
            "iteration".to_owned(),
            "learning_rate".into(),
            "total_loss".into(),
        ];
        h.extend(self.term_names.iter().cloned());
        h.extend(self.term_names.iter().map(|n| format!("weight_{n}")));
        h.extend(self.error_names.iter().cloned());
        h.extend(self.physical_names.iter().cloned());
        h.push("param_displacement".into());
        h
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("#schema_version={LOG_SCHEMA_VERSION}\n{}\n", self.header().join(","));
        for r in &self.records {
            let mut row = vec![r.iteration.to_string(), fmt_f64(r.learning_rate), fmt_f64(r.total_loss)];
            row.extend(r.terms.iter().map(|&x| fmt_f64(x)));
            row.extend(r.weights.iter().map(|&x| fmt_f64(x)));
            row.extend(r.relative_l2.iter().map(|&x| fmt_f64(x)));
            row.extend(r.physical.iter().map(|&x| fmt_f64(x)));
            row.push(fmt_f64(r.displacement));
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses a log written by [`TrainingLog::to_csv`].
    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let fail = |reason: String| Error::Format {
            path: path.to_path_buf(),
            reason,
        };
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| fail("empty file".into()))?;
        let version: u32 = first
            .strip_prefix("#schema_version=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| fail("missing schema version line".into()))?;
        if version != LOG_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                what: "training log",
                found: version,
                expected: LOG_SCHEMA_VERSION,
            });
        }
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| fail("missing header".into()))?
            .split(',')
            .collect();
        let n_terms = header.iter().filter(|h| h.starts_with("weight_")).count();
        let errors: Vec<String> = header
            .iter()
            .filter(|h| h.starts_with("relative_l2"))
            .map(|h| h.to_string())
            .collect();
        let fixed = 3 + 2 * n_terms + errors.len() + 1;
        if header.len() < fixed || header[..3] != ["iteration", "learning_rate", "total_loss"] {
            return Err(fail("unexpected header".into()));
        }
        let n_phys = header.len() - fixed;
        let mut log = TrainingLog {
            term_names: header[3..3 + n_terms].iter().map(|s| s.to_string()).collect(),
            error_names: errors.clone(),
            physical_names: header[3 + 2 * n_terms + errors.len()..header.len() - 1]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            records: Vec::new(),
        };
        for (k, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != header.len() {
                return Err(fail(format!("row {k} has {} columns", cols.len())));
            }
            let num = |i: usize| -> Result<f64> {
                cols[i]
                    .parse()
                    .map_err(|_| fail(format!("row {k}: bad number `{}`", cols[i])))
            };
            let range = |a: usize, n: usize| -> Result<Vec<f64>> { (a..a + n).map(num).collect() };
            let e0 = 3 + 2 * n_terms;
            log.records.push(LogRecord {
                iteration: cols[0]
                    .parse()
                    .map_err(|_| fail(format!("row {k}: bad iteration")))?,
                learning_rate: num(1)?,
                total_loss: num(2)?,
                terms: range(3, n_terms)?,
                weights: range(3 + n_terms, n_terms)?,
                relative_l2: range(e0, errors.len())?,
                physical: range(e0 + errors.len(), n_phys)?,
                displacement: num(cols.len() - 1)?,
            });
        }
        Ok(log)
    }
}
