use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::numerics::dft_magnitude;

use super::kernel::KernelEigenSystem;

/// Magnitudes within this relative distance count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

/// Wavenumber with the largest DFT magnitude; ties go to the smaller one.
pub fn dominant_frequency(q: &[f64]) -> Result<usize> {
    let mags = dft_magnitude(q)?;
    let mut best = 0;
    for (k, &m) in mags.iter().enumerate() {
        if m > mags[best] * (1.0 + TIE_TOLERANCE) {
            best = k;
        }
    }
    Ok(best)
}

/// CSV text with columns `index,eigenvalue`.
pub fn spectrum_csv(values: &[f64]) -> String {
    let mut s = String::from("#schema_version=1\nindex,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i},{v:.17e}");
    }
    s
}

/// CSV text with columns `grid_x,q1..q{count}` for a 1-D grid.
pub fn eigenvectors_csv(sys: &KernelEigenSystem, count: usize) -> String {
    let count = count.min(sys.len());
    let mut s = String::from("#schema_version=1\ngrid_x");
    for i in 1..=count {
        let _ = write!(s, ",q{i}");
    }
    s.push('\n');
    for r in 0..sys.len() {
        let x = if sys.point_dim > 0 {
            sys.grid[r * sys.point_dim]
        } else {
            r as f64
        };
        let _ = write!(s, "{x:.17e}");
        for i in 0..count {
            let _ = write!(s, ",{:.17e}", sys.vectors.get(r, i));
        }
        s.push('\n');
    }
    s
}

pub fn write_spectrum_csv(path: &Path, sys: &KernelEigenSystem) -> Result<()> {
    std::fs::write(path, spectrum_csv(&sys.values))?;
    Ok(())
}

pub fn write_eigenvectors_csv(path: &Path, sys: &KernelEigenSystem, count: usize) -> Result<()> {
    std::fs::write(path, eigenvectors_csv(sys, count))?;
    Ok(())
}
