//! Pseudo-spectral Gray-Scott reference solver on the periodic square
//! `[−1, 1]²`, advanced with ETDRK4 (Cox-Matthews, with the contour-integral
//! coefficients of Kassam and Trefethen).
//!
//! Per Fourier mode the linear part is diagonal,
//! `L_u = −ε₁|k|² − b`, `L_v = −ε₂|k|² − d`, and the remainder
//! `N_u = b − uv²`, `N_v = uv²` is evaluated in physical space.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Any concentration beyond this magnitude aborts a run.
pub const BLOW_UP_LIMIT: f64 = 10.0;

/// Points on the contour used for the ETDRK4 coefficients.
const CONTOUR_POINTS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrayScottParams {
    pub b: f64,
    pub d: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for GrayScottParams {
    fn default() -> Self {
        GrayScottParams {
            b: 0.04,
            d: 0.1,
            eps1: 2e-5,
            eps2: 1e-5,
        }
    }
}

/// Concentrations on an `n × n` grid, stored row-major with `y` as the row
/// index: entry `iy * n + ix` sits at `(x_ix, y_iy)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayScottState {
    pub n: usize,
    pub time: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub params: GrayScottParams,
}

impl GrayScottState {
    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// The same fields on the coarser `n × n` grid, keeping every
    /// `self.n / n`-th node in each direction.
    pub fn subsample(&self, n: usize) -> Result<GrayScottState> {
        if n == 0 || n > self.n || self.n % n != 0 {
            return Err(Error::Parameter(format!(
                "cannot subsample a {0}×{0} grid to {n}×{n}",
                self.n
            )));
        }
        let s = self.n / n;
        let pick = |f: &[f64]| -> Vec<f64> {
            (0..n)
                .flat_map(|iy| (0..n).map(move |ix| (iy * s, ix * s)))
                .map(|(y, x)| f[y * self.n + x])
                .collect()
        };
        Ok(GrayScottState {
            n,
            time: self.time,
            u: pick(&self.u),
            v: pick(&self.v),
            params: self.params,
        })
    }
}

/// Grid nodes `−1 + 2i/n`, `i = 0..n`.
pub fn grid_coords(n: usize) -> Vec<f64> {
    (0..n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect()
}

/// Offset Gaussian spots:
/// `u = 1 − exp(−80((x+0.05)² + (y+0.02)²))`,
/// `v = exp(−80((x−0.05)² + (y−0.02)²))`.
pub fn gaussian_initial_condition(n: usize) -> (Vec<f64>, Vec<f64>) {
    let xs = grid_coords(n);
    let mut u = vec![0.0; n * n];
    let mut v = vec![0.0; n * n];
    for (iy, &y) in xs.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            u[iy * n + ix] = 1.0 - (-80.0 * ((x + 0.05).powi(2) + (y + 0.02).powi(2))).exp();
            v[iy * n + ix] = (-80.0 * ((x - 0.05).powi(2) + (y - 0.02).powi(2))).exp();
        }
    }
    (u, v)
}

/// 2D transforms built from row transforms and transposes.
struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft2 {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    fn transpose(&self, a: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                a.swap(i * n + j, j * n + i);
            }
        }
    }

    fn forward(&mut self, a: &mut [Complex64]) {
        self.forward.process_with_scratch(a, &mut self.scratch);
        self.transpose(a);
        self.forward.process_with_scratch(a, &mut self.scratch);
        self.transpose(a);
    }

    /// Normalized inverse.
    fn inverse(&mut self, a: &mut [Complex64]) {
        self.inverse.process_with_scratch(a, &mut self.scratch);
        self.transpose(a);
        self.inverse.process_with_scratch(a, &mut self.scratch);
        self.transpose(a);
        let s = 1.0 / (self.n * self.n) as f64;
        for z in a.iter_mut() {
            *z *= s;
        }
    }
}

/// ETDRK4 coefficients for one diagonal linear operator.
struct Coefficients {
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl Coefficients {
    fn new(l: &[f64], h: f64) -> Self {
        let m = l.len();
        let mut c = Coefficients {
            e: vec![0.0; m],
            e2: vec![0.0; m],
            q: vec![0.0; m],
            f1: vec![0.0; m],
            f2: vec![0.0; m],
            f3: vec![0.0; m],
        };
        let roots: Vec<Complex64> = (1..=CONTOUR_POINTS)
            .map(|j| Complex64::from_polar(1.0, PI * (j as f64 - 0.5) / CONTOUR_POINTS as f64))
            .collect();
        let mp = CONTOUR_POINTS as f64;
        for (i, &li) in l.iter().enumerate() {
            let hl = h * li;
            c.e[i] = hl.exp();
            c.e2[i] = (hl / 2.0).exp();
            let (mut q, mut f1, mut f2, mut f3) = (0.0, 0.0, 0.0, 0.0);
            for &r in &roots {
                let z = Complex64::new(hl, 0.0) + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += (((z / 2.0).exp() - 1.0) / z).re;
                f1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).re;
                f2 += ((2.0 + z + ez * (z - 2.0)) / z3).re;
                f3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).re;
            }
            c.q[i] = h * q / mp;
            c.f1[i] = h * f1 / mp;
            c.f2[i] = h * f2 / mp;
            c.f3[i] = h * f3 / mp;
        }
        c
    }
}

struct Stepper {
    params: GrayScottParams,
    fft: Fft2,
    cu: Coefficients,
    cv: Coefficients,
}

fn wavenumbers_squared(n: usize) -> Vec<f64> {
    // Period 2, so the fundamental wavenumber is π.
    let k: Vec<f64> = (0..n)
        .map(|i| {
            let f = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            PI * f
        })
        .collect();
    let mut k2 = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            k2[iy * n + ix] = k[ix] * k[ix] + k[iy] * k[iy];
        }
    }
    k2
}

impl Stepper {
    fn new(n: usize, params: GrayScottParams, dt: f64) -> Self {
        let k2 = wavenumbers_squared(n);
        let lu: Vec<f64> = k2.iter().map(|&k| -params.eps1 * k - params.b).collect();
        let lv: Vec<f64> = k2.iter().map(|&k| -params.eps2 * k - params.d).collect();
        Stepper {
            params,
            fft: Fft2::new(n),
            cu: Coefficients::new(&lu, dt),
            cv: Coefficients::new(&lv, dt),
        }
    }

    fn spectral(&mut self, f: &[f64]) -> Vec<Complex64> {
        let mut a: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut a);
        a
    }

    fn physical(&mut self, fh: &[Complex64]) -> Vec<f64> {
        let mut a = fh.to_vec();
        self.fft.inverse(&mut a);
        a.iter().map(|z| z.re).collect()
    }

    /// Spectral nonlinear terms and the largest physical magnitude seen.
    fn nonlinear(
        &mut self,
        uh: &[Complex64],
        vh: &[Complex64],
    ) -> (Vec<Complex64>, Vec<Complex64>, f64) {
        let mut nu = uh.to_vec();
        let mut nv = vh.to_vec();
        self.fft.inverse(&mut nu);
        self.fft.inverse(&mut nv);
        let b = self.params.b;
        let mut peak = 0.0f64;
        for (zu, zv) in nu.iter_mut().zip(nv.iter_mut()) {
            let (u, v) = (zu.re, zv.re);
            if !u.is_finite() || !v.is_finite() {
                peak = f64::INFINITY;
            }
            peak = peak.max(u.abs()).max(v.abs());
            let uv2 = u * v * v;
            *zu = Complex64::new(b - uv2, 0.0);
            *zv = Complex64::new(uv2, 0.0);
        }
        self.fft.forward(&mut nu);
        self.fft.forward(&mut nv);
        (nu, nv, peak)
    }

    /// One ETDRK4 step; returns the peak magnitude at the start of the step.
    fn step(&mut self, uh: &mut [Complex64], vh: &mut [Complex64]) -> f64 {
        let m = uh.len();
        let (nu, nv, peak) = self.nonlinear(uh, vh);
        let (cu, cv) = (&self.cu, &self.cv);
        let au: Vec<Complex64> = (0..m).map(|i| uh[i] * cu.e2[i] + nu[i] * cu.q[i]).collect();
        let av: Vec<Complex64> = (0..m).map(|i| vh[i] * cv.e2[i] + nv[i] * cv.q[i]).collect();
        let (nau, nav, _) = self.nonlinear(&au, &av);
        let (cu, cv) = (&self.cu, &self.cv);
        let bu: Vec<Complex64> = (0..m).map(|i| uh[i] * cu.e2[i] + nau[i] * cu.q[i]).collect();
        let bv: Vec<Complex64> = (0..m).map(|i| vh[i] * cv.e2[i] + nav[i] * cv.q[i]).collect();
        let (nbu, nbv, _) = self.nonlinear(&bu, &bv);
        let (cu, cv) = (&self.cu, &self.cv);
        let ccu: Vec<Complex64> = (0..m)
            .map(|i| au[i] * cu.e2[i] + (nbu[i] * 2.0 - nu[i]) * cu.q[i])
            .collect();
        let ccv: Vec<Complex64> = (0..m)
            .map(|i| av[i] * cv.e2[i] + (nbv[i] * 2.0 - nv[i]) * cv.q[i])
            .collect();
        let (ncu, ncv, _) = self.nonlinear(&ccu, &ccv);
        let (cu, cv) = (&self.cu, &self.cv);
        for i in 0..m {
            uh[i] = uh[i] * cu.e[i]
                + nu[i] * cu.f1[i]
                + (nau[i] + nbu[i]) * (2.0 * cu.f2[i])
                + ncu[i] * cu.f3[i];
            vh[i] = vh[i] * cv.e[i]
                + nv[i] * cv.f1[i]
                + (nav[i] + nbv[i]) * (2.0 * cv.f2[i])
                + ncv[i] * cv.f3[i];
        }
        peak
    }
}

fn whole_multiple(what: &str, total: f64, unit: f64) -> Result<usize> {
    let k = (total / unit).round();
    if (k * unit - total).abs() > 1e-9 * total.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "{what} {total} is not a whole multiple of dt = {unit}"
        )));
    }
    Ok(k as usize)
}

fn check_state(time: f64, u: &[f64], v: &[f64]) -> Result<()> {
    for (field, data) in [("u", u), ("v", v)] {
        if let Some(&bad) = data
            .iter()
            .find(|x| !x.is_finite() || x.abs() > BLOW_UP_LIMIT)
        {
            return Err(Error::BlowUp {
                time,
                field,
                value: bad,
            });
        }
    }
    Ok(())
}

/// Integrates from `(u0, v0)` at `t = 0` to `t_end` with step `dt`,
/// returning the states at every multiple of `snapshot_every` (including
/// `t = 0`).
pub fn grayscott_reference(
    params: GrayScottParams,
    u0: &[f64],
    v0: &[f64],
    n: usize,
    dt: f64,
    t_end: f64,
    snapshot_every: f64,
) -> Result<Vec<GrayScottState>> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "grid size {n} must be a power of two (at least 4)"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("time step {dt} must be positive")));
    }
    if !(t_end >= 0.0 && snapshot_every > 0.0) {
        return Err(Error::Parameter(
            "t_end must be non-negative and the snapshot interval positive".into(),
        ));
    }
    if u0.len() != n * n || v0.len() != n * n {
        return Err(Error::Shape(format!(
            "initial fields must have {} entries",
            n * n
        )));
    }
    let steps = whole_multiple("t_end", t_end, dt)?;
    let stride = whole_multiple("snapshot interval", snapshot_every, dt)?.max(1);
    check_state(0.0, u0, v0)?;

    let mut stepper = Stepper::new(n, params, dt);
    let mut uh = stepper.spectral(u0);
    let mut vh = stepper.spectral(v0);
    let mut out = vec![GrayScottState {
        n,
        time: 0.0,
        u: u0.to_vec(),
        v: v0.to_vec(),
        params,
    }];
    for s in 1..=steps {
        let peak = stepper.step(&mut uh, &mut vh);
        let t_prev = (s - 1) as f64 * dt;
        if !(peak <= BLOW_UP_LIMIT) {
            let u = stepper.physical(&uh);
            let v = stepper.physical(&vh);
            check_state(t_prev, &u, &v)?;
            return Err(Error::BlowUp {
                time: t_prev,
                field: "u/v",
                value: peak,
            });
        }
        if s % stride == 0 {
            let time = s as f64 * dt;
            let u = stepper.physical(&uh);
            let v = stepper.physical(&vh);
            check_state(time, &u, &v)?;
            out.push(GrayScottState {
                n,
                time,
                u,
                v,
                params,
            });
        }
    }
    Ok(out)
}

fn diff_norm(a: &GrayScottState, b: &GrayScottState) -> f64 {
    a.u.iter()
        .zip(&b.u)
        .chain(a.v.iter().zip(&b.v))
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Observed temporal order from three runs at `dt`, `dt/2`, `dt/4`:
/// `log₂(‖c − m‖ / ‖m − f‖)`.
pub fn richardson_order(
    coarse: &GrayScottState,
    mid: &GrayScottState,
    fine: &GrayScottState,
) -> f64 {
    (diff_norm(coarse, mid) / diff_norm(mid, fine)).log2()
}

/// Relative size of the Gray-Scott residual on a solver grid, using a
/// centred difference in time (`prev`, `next` are `h` before and after
/// `cur`) and a fourth-order periodic Laplacian.
///
/// Returns `‖r‖ / ‖|u_t| + |εΔu| + |reaction|‖` for `u` and `v`.
pub fn fd_residual(
    prev: &GrayScottState,
    cur: &GrayScottState,
    next: &GrayScottState,
    h: f64,
) -> (f64, f64) {
    let n = cur.n;
    let dx = 2.0 / n as f64;
    let p = cur.params;
    let lap = |f: &[f64], ix: usize, iy: usize| {
        let at = |i: isize, j: isize| {
            let i = (i + n as isize) as usize % n;
            let j = (j + n as isize) as usize % n;
            f[j * n + i]
        };
        let (i, j) = (ix as isize, iy as isize);
        let c = -30.0 * at(i, j);
        let xx = -at(i - 2, j) + 16.0 * at(i - 1, j) + c + 16.0 * at(i + 1, j) - at(i + 2, j);
        let yy = -at(i, j - 2) + 16.0 * at(i, j - 1) + c + 16.0 * at(i, j + 1) - at(i, j + 2);
        (xx + yy) / (12.0 * dx * dx)
    };
    let (mut ru, mut su, mut rv, mut sv) = (0.0, 0.0, 0.0, 0.0);
    for iy in 0..n {
        for ix in 0..n {
            let k = iy * n + ix;
            let (u, v) = (cur.u[k], cur.v[k]);
            let ut = (next.u[k] - prev.u[k]) / (2.0 * h);
            let vt = (next.v[k] - prev.v[k]) / (2.0 * h);
            let du = p.eps1 * lap(&cur.u, ix, iy);
            let dv = p.eps2 * lap(&cur.v, ix, iy);
            let uv2 = u * v * v;
            let r_u = ut - du - p.b * (1.0 - u) + uv2;
            let r_v = vt - dv + p.d * v - uv2;
            ru += r_u * r_u;
            rv += r_v * r_v;
            su += (ut.abs() + du.abs() + (p.b * (1.0 - u) - uv2).abs()).powi(2);
            sv += (vt.abs() + dv.abs() + (p.d * v - uv2).abs()).powi(2);
        }
    }
    ((ru / su).sqrt(), (rv / sv).sqrt())
}
