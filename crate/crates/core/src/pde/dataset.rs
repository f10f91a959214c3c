//! On-disk Gray-Scott datasets: one binary blob per snapshot, a CSV
//! manifest and a JSON description of the run.
//!
//! Blob layout (little endian):
//!
//! ```text
//! b"FFGS" | u32 version | u32 n | f64 time | u32 n_fields
//! per field: u8 field id (0 = u, 1 = v) | n² × f64, row-major in y
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grayscott::{grid_coords, GrayScottParams, GrayScottState};

const MAGIC: &[u8; 4] = b"FFGS";
pub const DATASET_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.csv";
pub const META_FILE: &str = "dataset.json";
const SCHEMA_LINE: &str = "#schema_version=1";

pub const FIELD_U: u8 = 0;
pub const FIELD_V: u8 = 1;

/// Solver settings stored next to the snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema_version: u32,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub params: GrayScottParams,
    /// Grid the solver ran on when it differs from `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRow {
    pub snapshot_index: usize,
    pub time: f64,
    pub file: String,
}

pub fn encode_snapshot(state: &GrayScottState) -> Vec<u8> {
    let n2 = state.n * state.n;
    let mut out = Vec::with_capacity(25 + 2 * (1 + 8 * n2));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&(state.n as u32).to_le_bytes());
    out.extend_from_slice(&state.time.to_le_bytes());
    out.extend_from_slice(&2u32.to_le_bytes());
    for (id, field) in [(FIELD_U, &state.u), (FIELD_V, &state.v)] {
        out.push(id);
        for x in field.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.pos + k > self.bytes.len() {
            return Err(self.fail("truncated"));
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn fail(&self, reason: &str) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            reason: reason.into(),
        }
    }
}

/// Decodes a snapshot blob. Parameters are not stored in blobs and are
/// taken from the caller.
pub fn decode_snapshot(bytes: &[u8], path: &Path, params: GrayScottParams) -> Result<GrayScottState> {
    let mut r = Reader { bytes, pos: 0, path };
    if r.take(4)? != MAGIC {
        return Err(r.fail("bad magic"));
    }
    let version = r.u32()?;
    if version != DATASET_VERSION {
        return Err(Error::SchemaVersion {
            what: "snapshot",
            found: version,
            expected: DATASET_VERSION,
        });
    }
    let n = r.u32()? as usize;
    let time = r.f64()?;
    let n_fields = r.u32()?;
    let mut u = None;
    let mut v = None;
    for _ in 0..n_fields {
        let id = r.take(1)?[0];
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            data.push(r.f64()?);
        }
        match id {
            FIELD_U => u = Some(data),
            FIELD_V => v = Some(data),
            _ => return Err(r.fail("unknown field id")),
        }
    }
    if r.pos != bytes.len() {
        return Err(r.fail("trailing bytes"));
    }
    match (u, v) {
        (Some(u), Some(v)) => Ok(GrayScottState {
            n,
            time,
            u,
            v,
            params,
        }),
        _ => Err(r.fail("missing u or v field")),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes every state plus `manifest.csv` and `dataset.json` into `dir`.
pub fn write_dataset(
    dir: &Path,
    states: &[GrayScottState],
    meta: &DatasetMeta,
) -> Result<Vec<ManifestRow>> {
    fs::create_dir_all(dir)?;
    let mut rows = Vec::with_capacity(states.len());
    let mut manifest = format!("{SCHEMA_LINE}\nsnapshot_index,time,file\n");
    for (i, s) in states.iter().enumerate() {
        let file = format!("snapshot_{i:04}.bin");
        write_atomic(&dir.join(&file), &encode_snapshot(s))?;
        manifest.push_str(&format!("{i},{:.17e},{file}\n", s.time));
        rows.push(ManifestRow {
            snapshot_index: i,
            time: s.time,
            file,
        });
    }
    write_atomic(&dir.join(MANIFEST_FILE), manifest.as_bytes())?;
    write_atomic(
        &dir.join(META_FILE),
        serde_json::to_string_pretty(meta)?.as_bytes(),
    )?;
    Ok(rows)
}

pub fn read_meta(dir: &Path) -> Result<DatasetMeta> {
    let path = dir.join(META_FILE);
    let meta: DatasetMeta = serde_json::from_str(&fs::read_to_string(&path)?)?;
    if meta.schema_version != DATASET_VERSION {
        return Err(Error::SchemaVersion {
            what: "dataset description",
            found: meta.schema_version,
            expected: DATASET_VERSION,
        });
    }
    Ok(meta)
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestRow>> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path)?;
    let fail = |reason: String| Error::Format {
        path: path.clone(),
        reason,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(SCHEMA_LINE) => {}
        Some(l) if l.starts_with("#schema_version=") => {
            let found = l["#schema_version=".len()..].parse().unwrap_or(u32::MAX);
            return Err(Error::SchemaVersion {
                what: "manifest",
                found,
                expected: DATASET_VERSION,
            });
        }
        _ => return Err(fail("missing schema version line".into())),
    }
    if lines.next() != Some("snapshot_index,time,file") {
        return Err(fail("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(fail(format!("row {k} has {} columns", cols.len())));
        }
        let bad = |what: &str| fail(format!("row {k}: bad {what}"));
        rows.push(ManifestRow {
            snapshot_index: cols[0].parse().map_err(|_| bad("snapshot_index"))?,
            time: cols[1].parse().map_err(|_| bad("time"))?,
            file: cols[2].to_owned(),
        });
    }
    Ok(rows)
}

/// Loads the snapshots listed in the manifest whose time lies in
/// `[t0, t1]` (inclusive, with a small tolerance).
pub fn read_snapshots(dir: &Path, window: Option<(f64, f64)>) -> Result<Vec<GrayScottState>> {
    let meta = read_meta(dir)?;
    let mut out = Vec::new();
    for row in read_manifest(dir)? {
        if let Some((t0, t1)) = window {
            let tol = 1e-9 * t1.abs().max(1.0);
            if row.time < t0 - tol || row.time > t1 + tol {
                continue;
            }
        }
        let path: PathBuf = dir.join(&row.file);
        let state = decode_snapshot(&fs::read(&path)?, &path, meta.params)?;
        if state.n != meta.n {
            return Err(Error::Format {
                path,
                reason: format!("grid size {} differs from dataset size {}", state.n, meta.n),
            });
        }
        out.push(state);
    }
    Ok(out)
}

/// Snapshots of one window, flattened for sampling and evaluation.
#[derive(Clone, Debug)]
pub struct Observations {
    pub n: usize,
    /// Grid nodes along each axis.
    pub coords: Vec<f64>,
    pub times: Vec<f64>,
    /// Per snapshot `(u, v)` grids.
    pub fields: Vec<(Vec<f64>, Vec<f64>)>,
    pub params: GrayScottParams,
}

impl Observations {
    pub fn from_states(states: Vec<GrayScottState>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyDataset)?;
        let n = first.n;
        let params = first.params;
        if states.iter().any(|s| s.n != n) {
            return Err(Error::Shape("snapshots have different grid sizes".into()));
        }
        Ok(Observations {
            n,
            coords: grid_coords(n),
            times: states.iter().map(|s| s.time).collect(),
            fields: states.into_iter().map(|s| (s.u, s.v)).collect(),
            params,
        })
    }

    pub fn load(dir: &Path, window: (f64, f64)) -> Result<Self> {
        Self::from_states(read_snapshots(dir, Some(window))?)
    }

    pub fn n_snapshots(&self) -> usize {
        self.times.len()
    }

    /// Total number of `(x, y, t)` samples.
    pub fn len(&self) -> usize {
        self.n_snapshots() * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample `k` as `(x, y, t, u, v)`.
    pub fn sample(&self, k: usize) -> [f64; 5] {
        let n2 = self.n * self.n;
        let (s, cell) = (k / n2, k % n2);
        let (ix, iy) = (cell % self.n, cell / self.n);
        let (u, v) = &self.fields[s];
        [
            self.coords[ix],
            self.coords[iy],
            self.times[s],
            u[cell],
            v[cell],
        ]
    }

    /// Grid points row-major in `y`, as `(x, y)` pairs.
    pub fn spatial_points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.n * self.n);
        for iy in 0..self.n {
            for ix in 0..self.n {
                pts.push(self.coords[ix]);
                pts.push(self.coords[iy]);
            }
        }
        pts
    }

    /// `(t₀, T)` mapping physical time to `s = (t − t₀)/T ∈ [0, 1]`.
    pub fn time_map(&self) -> (f64, f64) {
        let t0 = self.times.iter().copied().fold(f64::INFINITY, f64::min);
        let t1 = self.times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if t1 > t0 { t1 - t0 } else { 1.0 };
        (t0, span)
    }
}
