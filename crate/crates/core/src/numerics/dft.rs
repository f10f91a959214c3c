//! Direct discrete Fourier transform of real samples.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `|X_k|` for `k = 0..=N/2`, where `X_k = Σ_j v_j e^{-2πi jk/N}`.
pub fn dft_magnitude(v: &[f64]) -> Result<Vec<f64>> {
    Ok(dft_real(v)?
        .into_iter()
        .map(|(re, im)| re.hypot(im))
        .collect())
}

/// One-sided complex coefficients `(Re X_k, Im X_k)` for `k = 0..=N/2`.
pub fn dft_real(v: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = v.len();
    if n < 4 {
        return Err(Error::Parameter(format!(
            "DFT needs at least 4 samples, got {n}"
        )));
    }
    let (cos, sin): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .unzip();
    Ok((0..=n / 2)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, &x) in v.iter().enumerate() {
                let idx = (j * k) % n;
                re += x * cos[idx];
                im -= x * sin[idx];
            }
            (re, im)
        })
        .collect())
}

/// `Σ_j v_j²` recovered from one-sided magnitudes of an `n`-point transform.
pub fn parseval_energy(magnitudes: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for (k, m) in magnitudes.iter().enumerate() {
        let w = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
        s += w * m * m;
    }
    s / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|j| f(j as f64 / n as f64)).collect()
    }

    #[test]
    fn constant_is_all_dc() {
        let m = dft_magnitude(&[2.0; 16]).unwrap();
        assert!((m[0] - 32.0).abs() < 1e-12);
        assert!(m[1..].iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn pure_tone_peaks_once() {
        let m = dft_magnitude(&tone(100, |x| (2.0 * PI * 3.0 * x).sin())).unwrap();
        let (k, _) = m.iter().enumerate().fold((0, 0.0), |a, (k, &v)| if v > a.1 { (k, v) } else { a });
        assert_eq!(k, 3);
        assert!(m.iter().enumerate().all(|(j, &v)| j == 3 || v < 1e-10));
    }

    #[test]
    fn two_tones_have_two_to_one_ratio() {
        let m = dft_magnitude(&tone(100, |x| {
            (2.0 * PI * 3.0 * x).sin() + 0.5 * (2.0 * PI * 7.0 * x).sin()
        }))
        .unwrap();
        // A unit sine of integer wavenumber has |X_k| = N/2.
        assert!((m[3] - 50.0).abs() < 1e-10);
        assert!((m[7] - 25.0).abs() < 1e-10);
    }

    #[test]
    fn parseval_holds_for_odd_and_even() {
        for n in [17usize, 64] {
            let v: Vec<f64> = (0..n).map(|j| ((j * j) as f64 * 0.37).sin() + 0.2).collect();
            let e: f64 = v.iter().map(|x| x * x).sum();
            let m = dft_magnitude(&v).unwrap();
            assert!((parseval_energy(&m, n) - e).abs() < 1e-10 * e);
        }
    }

    #[test]
    fn too_short() {
        assert!(dft_magnitude(&[1.0, 2.0, 3.0]).is_err());
    }
}
