use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, RngStream};

/// A fixed random Fourier feature map `v ↦ [cos(sBv); sin(sBv)]`, with
/// `s = 2π` when `two_pi` is set and `s = 1` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierEmbedding {
    b: Matrix,
    sigma: f64,
    two_pi: bool,
}

/// Draws an `m × d` frequency matrix with i.i.d. `N(0, σ²)` entries.
pub fn sample_fourier_features(
    d: usize,
    m: usize,
    sigma: f64,
    two_pi: bool,
    rng: &mut RngStream,
) -> Result<FourierEmbedding> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!(
            "Fourier feature scale must be positive, got {sigma}"
        )));
    }
    if m == 0 || d == 0 {
        return Err(Error::Parameter("Fourier features need m ≥ 1 and d ≥ 1".into()));
    }
    let b = Matrix::from_fn(m, d, |_, _| sigma * rng.normal());
    Ok(FourierEmbedding { b, sigma, two_pi })
}

impl FourierEmbedding {
    /// An embedding with a prescribed frequency matrix.
    pub fn from_matrix(b: Matrix, sigma: f64, two_pi: bool) -> Result<Self> {
        if b.rows() == 0 || b.cols() == 0 {
            return Err(Error::Parameter("empty frequency matrix".into()));
        }
        Ok(FourierEmbedding { b, sigma, two_pi })
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn two_pi(&self) -> bool {
        self.two_pi
    }

    /// Number of frequencies.
    pub fn m(&self) -> usize {
        self.b.rows()
    }

    /// Input dimension.
    pub fn d(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        2 * self.m()
    }

    /// Multiplier applied to `Bv` inside the trigonometric functions.
    pub fn angular_scale(&self) -> f64 {
        if self.two_pi {
            2.0 * PI
        } else {
            1.0
        }
    }

    /// `[cos(sBv); sin(sBv)]`.
    pub fn embed(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.d() {
            return Err(Error::Shape(format!(
                "embedding expects dimension {}, got {}",
                self.d(),
                v.len()
            )));
        }
        let m = self.m();
        let s = self.angular_scale();
        let mut out = vec![0.0; 2 * m];
        for k in 0..m {
            let phase = s * self.b.row(k).iter().zip(v).map(|(b, x)| b * x).sum::<f64>();
            let (sn, cs) = phase.sin_cos();
            out[k] = cs;
            out[m + k] = sn;
        }
        Ok(out)
    }
}

/// Free-function form of [`FourierEmbedding::embed`].
pub fn embed(e: &FourierEmbedding, v: &[f64]) -> Result<Vec<f64>> {
    e.embed(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = sample_fourier_features(1, 4, 1.0, true, &mut RngStream::new(5)).unwrap();
        let b = sample_fourier_features(1, 4, 1.0, true, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_scale_matches_sigma() {
        let e = sample_fourier_features(1, 10_000, 10.0, true, &mut RngStream::new(1)).unwrap();
        let v = e.b().data();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
        assert!((9.8..=10.2).contains(&sd), "{sd}");
    }

    #[test]
    fn zero_sigma_rejected() {
        assert!(sample_fourier_features(1, 4, 0.0, true, &mut RngStream::new(1)).is_err());
        assert!(sample_fourier_features(1, 4, -1.0, true, &mut RngStream::new(1)).is_err());
    }

    #[test]
    fn origin_maps_to_ones_then_zeros() {
        let e = sample_fourier_features(2, 3, 2.0, true, &mut RngStream::new(1)).unwrap();
        assert_eq!(e.embed(&[0.0, 0.0]).unwrap(), vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn without_two_pi_is_plain_cos_sin() {
        let e = FourierEmbedding::from_matrix(Matrix::from_vec(1, 1, vec![3.0]).unwrap(), 1.0, false)
            .unwrap();
        let g = e.embed(&[0.4]).unwrap();
        assert_eq!(g, vec![(1.2f64).cos(), (1.2f64).sin()]);
    }

    #[test]
    fn dimension_mismatch() {
        let e = sample_fourier_features(2, 3, 2.0, true, &mut RngStream::new(1)).unwrap();
        assert!(e.embed(&[0.0]).is_err());
    }
}
