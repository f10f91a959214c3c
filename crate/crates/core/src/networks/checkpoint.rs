//! Little-endian binary snapshots of parameters and frequency matrices.
//!
//! Layout: `b"FFPN"`, `u32` version, `u64` total parameter count, `u64`
//! network parameter count, the parameters as `f64`, `u32` embedding count,
//! then per embedding `u32 m`, `u32 d`, `f64 σ`, `u8 two_pi` and the `m × d`
//! frequency matrix row-major.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

use super::fourier::FourierEmbedding;
use super::params::NetworkParams;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"FFPN";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub params: NetworkParams,
    pub embeddings: Vec<FourierEmbedding>,
}

pub fn encode_checkpoint(params: &NetworkParams, embeddings: &[&FourierEmbedding]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(32 + 8 * params.len());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(params.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(params.n_network() as u64).to_le_bytes());
    for v in params.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(embeddings.len() as u32).to_le_bytes());
    for e in embeddings {
        buf.extend_from_slice(&(e.m() as u32).to_le_bytes());
        buf.extend_from_slice(&(e.d() as u32).to_le_bytes());
        buf.extend_from_slice(&e.sigma().to_le_bytes());
        buf.push(e.two_pi() as u8);
        for v in e.b().data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        if self.pos + n > self.data.len() {
            return Err(format!("truncated at byte {}", self.pos));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> std::result::Result<u8, String> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_checkpoint(data: &[u8], path: &Path) -> Result<Checkpoint> {
    let fmt = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut c = Cursor { data, pos: 0 };
    if c.take(4).map_err(fmt)? != CHECKPOINT_MAGIC {
        return Err(fmt("bad magic".into()));
    }
    let version = c.u32().map_err(fmt)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::SchemaVersion {
            what: "checkpoint",
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let total = c.u64().map_err(fmt)? as usize;
    let n_network = c.u64().map_err(fmt)? as usize;
    if total > data.len() / 8 {
        return Err(fmt(format!("implausible parameter count {total}")));
    }
    let values = (0..total).map(|_| c.f64()).collect::<std::result::Result<Vec<_>, _>>().map_err(fmt)?;
    let params = NetworkParams::from_parts(values, n_network)?;
    let n_emb = c.u32().map_err(fmt)?;
    let mut embeddings = Vec::with_capacity(n_emb as usize);
    for _ in 0..n_emb {
        let m = c.u32().map_err(fmt)? as usize;
        let d = c.u32().map_err(fmt)? as usize;
        let sigma = c.f64().map_err(fmt)?;
        let two_pi = c.u8().map_err(fmt)? != 0;
        if m.saturating_mul(d) > data.len() / 8 {
            return Err(fmt(format!("implausible embedding shape {m}x{d}")));
        }
        let b = (0..m * d).map(|_| c.f64()).collect::<std::result::Result<Vec<_>, _>>().map_err(fmt)?;
        let b = Matrix::from_vec(m, d, b).map_err(|e| fmt(e.to_string()))?;
        embeddings.push(FourierEmbedding::from_matrix(b, sigma, two_pi)?);
    }
    if c.pos != data.len() {
        return Err(fmt("trailing bytes".into()));
    }
    Ok(Checkpoint { params, embeddings })
}

pub fn save_checkpoint(
    path: &Path,
    params: &NetworkParams,
    embeddings: &[&FourierEmbedding],
) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode_checkpoint(params, embeddings))?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut data = Vec::new();
    fs::File::open(path)?.read_to_end(&mut data)?;
    decode_checkpoint(&data, path)
}
