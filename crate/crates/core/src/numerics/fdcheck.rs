//! Central finite differences as a derivative oracle.

/// Central-difference gradient of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            xp[i] = x[i] + h;
            let fp = f(&xp);
            xp[i] = x[i] - h;
            let fm = f(&xp);
            xp[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Largest deviation between `analytic` and the central-difference gradient
/// of `f` at `x`, each entry measured relative to `max(|a|, |fd|, 1)`.
pub fn finite_diff_check(f: impl Fn(&[f64]) -> f64, analytic: &[f64], x: &[f64], h: f64) -> f64 {
    assert!(h > 0.0, "step must be positive");
    assert_eq!(analytic.len(), x.len(), "one analytic partial per coordinate");
    let fd = central_difference(f, x, h);
    analytic
        .iter()
        .zip(&fd)
        .map(|(a, d)| (a - d).abs() / a.abs().max(d.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Entry-wise relative deviation `|a - b| / max(|a|, |b|, floor)`.
pub fn max_relative_deviation(a: &[f64], b: &[f64], floor: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube() {
        assert!(finite_diff_check(|x| x[0].powi(3), &[3.0], &[1.0], 1e-5) < 1e-9);
    }

    #[test]
    fn tanh_derivative() {
        let t = 0.3f64.tanh();
        assert!(finite_diff_check(|x| x[0].tanh(), &[1.0 - t * t], &[0.3], 1e-5) < 1e-9);
    }

    #[test]
    fn constant() {
        let fd = central_difference(|_| 4.2, &[0.7], 1e-5);
        assert!(fd[0].abs() < 1e-10);
        assert!(finite_diff_check(|_| 4.2, &[0.0], &[0.7], 1e-5) < 1e-10);
    }
}
