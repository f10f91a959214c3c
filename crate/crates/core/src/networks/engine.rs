//! Batched forward/backward passes that carry input derivatives.
//!
//! Points are rows. Alongside the value channel the engine propagates, per
//! requested input coordinate `c`, the first derivative `∂/∂x_c` and
//! optionally the second derivative `∂²/∂x_c²`. All channels of one layer
//! are stacked vertically and multiplied by the weight matrix in a single
//! gemm; the nonlinearity then mixes them:
//!
//! ```text
//! T = tanh(A)   S1 = 1 - T²   S2 = -2 T S1
//! H = T         DH = S1 ⊙ DA  DDH = S1 ⊙ DDA + S2 ⊙ DA²
//! ```
//!
//! [`Network::backward`] runs the exact adjoint of that recurrence, so loss
//! terms built from any channel get parameter gradients in one sweep.

use crate::error::{Error, Result};
use crate::numerics::linalg::{gemm, MatRef};
use crate::numerics::Matrix;

use super::arch::{BranchDesc, LayerSlot, Merge, Network};

/// One propagated quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Value,
    /// `∂/∂x_c`
    D1(usize),
    /// `∂²/∂x_c²`
    D2(usize),
}

/// Derivative order (0, 1 or 2) requested for each input coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSpec {
    orders: Vec<u8>,
}

impl JetSpec {
    /// Values only.
    pub fn values(input_dim: usize) -> Self {
        JetSpec {
            orders: vec![0; input_dim],
        }
    }

    pub fn new(orders: Vec<u8>) -> Result<Self> {
        if let Some(o) = orders.iter().find(|&&o| o > 2) {
            return Err(Error::Parameter(format!(
                "derivative order {o} not supported (max 2)"
            )));
        }
        Ok(JetSpec { orders })
    }

    /// Requests derivatives up to `order` along `coord`.
    pub fn with(mut self, coord: usize, order: u8) -> Self {
        assert!(order <= 2, "derivative order above 2");
        if coord >= self.orders.len() {
            self.orders.resize(coord + 1, 0);
        }
        self.orders[coord] = self.orders[coord].max(order);
        self
    }

    pub fn input_dim(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self, coord: usize) -> u8 {
        self.orders.get(coord).copied().unwrap_or(0)
    }

    /// Channel order: value, then first derivatives, then second
    /// derivatives, each by ascending coordinate.
    pub fn channels(&self) -> Vec<Channel> {
        let all: Vec<usize> = (0..self.orders.len()).collect();
        self.channels_for(&all)
    }

    fn channels_for(&self, coords: &[usize]) -> Vec<Channel> {
        let mut sorted = coords.to_vec();
        sorted.sort_unstable();
        let mut out = vec![Channel::Value];
        out.extend(
            sorted
                .iter()
                .filter(|&&c| self.order(c) >= 1)
                .map(|&c| Channel::D1(c)),
        );
        out.extend(
            sorted
                .iter()
                .filter(|&&c| self.order(c) == 2)
                .map(|&c| Channel::D2(c)),
        );
        out
    }
}

/// Network outputs and their input derivatives at a batch of points.
#[derive(Clone, Debug)]
pub struct Jet {
    n_points: usize,
    n_out: usize,
    channels: Vec<Channel>,
    /// `[channel][point][output]`
    data: Vec<f64>,
}

impl Jet {
    /// Wraps externally computed channel data (layout `[channel][point][output]`,
    /// channels in [`JetSpec::channels`] order).
    pub fn from_data(spec: &JetSpec, n_points: usize, n_out: usize, data: Vec<f64>) -> Result<Jet> {
        let channels = spec.channels();
        if data.len() != channels.len() * n_points * n_out {
            return Err(Error::Shape(format!(
                "jet data has length {}, expected {}",
                data.len(),
                channels.len() * n_points * n_out
            )));
        }
        Ok(Jet {
            n_points,
            n_out,
            channels,
            data,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_index(&self, ch: Channel) -> Option<usize> {
        self.channels.iter().position(|&c| c == ch)
    }

    /// `n_points × n_out` block of one channel, if it was propagated.
    pub fn get(&self, ch: Channel) -> Option<&[f64]> {
        let i = self.channel_index(ch)?;
        let len = self.n_points * self.n_out;
        Some(&self.data[i * len..(i + 1) * len])
    }

    /// Like [`Jet::get`] but panics when the channel is missing.
    pub fn channel(&self, ch: Channel) -> &[f64] {
        self.get(ch)
            .unwrap_or_else(|| panic!("channel {ch:?} was not requested"))
    }

    pub fn value(&self) -> &[f64] {
        self.channel(Channel::Value)
    }

    pub fn d1(&self, coord: usize) -> &[f64] {
        self.channel(Channel::D1(coord))
    }

    pub fn d2(&self, coord: usize) -> &[f64] {
        self.channel(Channel::D2(coord))
    }

    /// Entry for one channel, point and output.
    pub fn at(&self, ch: Channel, point: usize, out: usize) -> f64 {
        self.channel(ch)[point * self.n_out + out]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// A zeroed buffer laid out like `data`, for output adjoints.
    pub fn zeros_like(&self) -> Vec<f64> {
        vec![0.0; self.data.len()]
    }

    /// Position of one entry inside a `data`-shaped buffer. Panics when the
    /// channel is missing.
    pub fn offset(&self, ch: Channel, point: usize, out: usize) -> usize {
        let i = self
            .channel_index(ch)
            .unwrap_or_else(|| panic!("channel {ch:?} was not requested"));
        (i * self.n_points + point) * self.n_out + out
    }

    /// Offset range of one channel inside a `data`-shaped buffer.
    pub fn range(&self, ch: Channel) -> Option<std::ops::Range<usize>> {
        let i = self.channel_index(ch)?;
        let len = self.n_points * self.n_out;
        Some(i * len..(i + 1) * len)
    }
}

struct LayerCache {
    input: Vec<f64>,
    pre: Vec<f64>,
    tanh: Vec<f64>,
}

struct BranchCache {
    channels: Vec<Channel>,
    layers: Vec<LayerCache>,
    out: Vec<f64>,
}

impl BranchCache {
    fn index(&self, ch: Channel) -> Option<usize> {
        self.channels.iter().position(|&c| c == ch)
    }
}

/// Intermediate values kept by [`Network::forward_jet`] for
/// [`Network::backward`].
pub struct JetCache {
    n_points: usize,
    channels: Vec<Channel>,
    branches: Vec<BranchCache>,
    merged: Vec<f64>,
}

fn d1_partner(channels: &[Channel]) -> Vec<Option<usize>> {
    channels
        .iter()
        .map(|ch| match ch {
            Channel::D2(c) => channels.iter().position(|&x| x == Channel::D1(*c)),
            _ => None,
        })
        .collect()
}

fn branch_input(
    br: &BranchDesc<'_>,
    channels: &[Channel],
    points: &[f64],
    n: usize,
    d: usize,
) -> (Vec<f64>, usize) {
    let nc = channels.len();
    match br.embedding {
        None => {
            let width = br.coords.len();
            let mut z = vec![0.0; nc * n * width];
            for (ci, ch) in channels.iter().enumerate() {
                for p in 0..n {
                    let row = &mut z[(ci * n + p) * width..(ci * n + p + 1) * width];
                    for (j, &c) in br.coords.iter().enumerate() {
                        row[j] = match ch {
                            Channel::Value => points[p * d + c],
                            Channel::D1(k) => (*k == c) as u8 as f64,
                            Channel::D2(_) => 0.0,
                        };
                    }
                }
            }
            (z, width)
        }
        Some(e) => {
            let m = e.m();
            let width = 2 * m;
            let s = e.angular_scale();
            let b = e.b();
            let local: Vec<Option<usize>> = channels
                .iter()
                .map(|ch| match ch {
                    Channel::Value => None,
                    Channel::D1(c) | Channel::D2(c) => br.coords.iter().position(|x| x == c),
                })
                .collect();
            let mut z = vec![0.0; nc * n * width];
            for p in 0..n {
                for k in 0..m {
                    let brow = b.row(k);
                    let mut phase = 0.0;
                    for (j, &c) in br.coords.iter().enumerate() {
                        phase += brow[j] * points[p * d + c];
                    }
                    let (sn, cs) = (s * phase).sin_cos();
                    for (ci, ch) in channels.iter().enumerate() {
                        let base = (ci * n + p) * width;
                        let (vc, vs) = match ch {
                            Channel::Value => (cs, sn),
                            Channel::D1(_) => {
                                let w = s * brow[local[ci].expect("branch coordinate")];
                                (-sn * w, cs * w)
                            }
                            Channel::D2(_) => {
                                let w = s * brow[local[ci].expect("branch coordinate")];
                                (-cs * w * w, -sn * w * w)
                            }
                        };
                        z[base + k] = vc;
                        z[base + m + k] = vs;
                    }
                }
            }
            (z, width)
        }
    }
}

/// Pair of branch channels whose product forms a merged channel.
fn product_sources(
    ch: Channel,
    x: &BranchCache,
    t: &BranchCache,
) -> Option<(usize, usize)> {
    if ch == Channel::Value {
        return Some((0, 0));
    }
    if let Some(i) = x.index(ch) {
        return Some((i, 0));
    }
    t.index(ch).map(|j| (0, j))
}

impl Network {
    fn run_branch(
        &self,
        theta: &[f64],
        b: usize,
        br: &BranchDesc<'_>,
        channels: Vec<Channel>,
        points: &[f64],
        n: usize,
    ) -> Result<BranchCache> {
        let nc = channels.len();
        let partner = d1_partner(&channels);
        let (mut z, mut in_w) = branch_input(br, &channels, points, n, self.input_dim());
        let w = self.width();
        let mut layers = Vec::with_capacity(self.hidden_layers().len());
        for (l, slot) in self.hidden_layers().iter().enumerate() {
            let rows = nc * n;
            let mut a = vec![0.0; rows * w];
            let wmat = &theta[slot.weight..slot.weight + slot.weight_len()];
            gemm(
                slot.scale,
                MatRef::new(&z, rows, in_w),
                MatRef::new(wmat, w, in_w).t(),
                0.0,
                &mut a,
            );
            let bias = &theta[slot.bias..slot.bias + w];
            for row in a[..n * w].chunks_exact_mut(w) {
                for (v, bb) in row.iter_mut().zip(bias) {
                    *v += bb;
                }
            }
            let t: Vec<f64> = a[..n * w].iter().map(|v| v.tanh()).collect();
            let mut h = vec![0.0; rows * w];
            h[..n * w].copy_from_slice(&t);
            for ci in 1..nc {
                let blk = ci * n * w..(ci + 1) * n * w;
                match channels[ci] {
                    Channel::D1(_) => {
                        for ((hv, av), tv) in h[blk.clone()].iter_mut().zip(&a[blk]).zip(&t) {
                            *hv = (1.0 - tv * tv) * av;
                        }
                    }
                    Channel::D2(_) => {
                        let j = partner[ci].expect("second derivative implies first");
                        let da = &a[j * n * w..(j + 1) * n * w];
                        for (((hv, av), tv), dv) in
                            h[blk.clone()].iter_mut().zip(&a[blk]).zip(&t).zip(da)
                        {
                            let s1 = 1.0 - tv * tv;
                            let s2 = -2.0 * tv * s1;
                            *hv = s1 * av + s2 * dv * dv;
                        }
                    }
                    Channel::Value => unreachable!("value is channel 0"),
                }
            }
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalOverflow {
                    location: format!("branch {b}, hidden layer {l}"),
                });
            }
            layers.push(LayerCache {
                input: std::mem::replace(&mut z, h),
                pre: a,
                tanh: t,
            });
            in_w = w;
        }
        Ok(BranchCache {
            channels,
            layers,
            out: z,
        })
    }

    fn check_points(&self, points: &[f64]) -> Result<usize> {
        let d = self.input_dim();
        if points.len() % d != 0 {
            return Err(Error::Shape(format!(
                "point buffer of length {} is not a multiple of the input dimension {d}",
                points.len()
            )));
        }
        Ok(points.len() / d)
    }

    /// Outputs and requested input derivatives at `points` (row-major,
    /// `n × input_dim`), plus the cache needed for [`Network::backward`].
    pub fn forward_jet(
        &self,
        theta: &[f64],
        points: &[f64],
        spec: &JetSpec,
    ) -> Result<(Jet, JetCache)> {
        self.check_theta(theta)?;
        let n = self.check_points(points)?;
        if spec.input_dim() > self.input_dim() {
            return Err(Error::Shape(format!(
                "derivative request covers {} coordinates, network has {}",
                spec.input_dim(),
                self.input_dim()
            )));
        }
        let channels = spec.channels();
        let nc = channels.len();
        let w = self.width();

        let descs = self.branches();
        let mut branches = Vec::with_capacity(descs.len());
        for (b, br) in descs.iter().enumerate() {
            branches.push(self.run_branch(
                theta,
                b,
                br,
                spec.channels_for(&br.coords),
                points,
                n,
            )?);
        }

        let f = self.merged_width();
        let mut merged = vec![0.0; nc * n * f];
        match self.merge() {
            Merge::Concat => {
                for (b, bc) in branches.iter().enumerate() {
                    for (ci, ch) in channels.iter().enumerate() {
                        let src_c = bc.index(*ch).expect("concat branches see every coordinate");
                        for p in 0..n {
                            let src = &bc.out[(src_c * n + p) * w..(src_c * n + p + 1) * w];
                            let dst = (ci * n + p) * f + b * w;
                            merged[dst..dst + w].copy_from_slice(src);
                        }
                    }
                }
            }
            Merge::Product {
                n_spatial,
                n_temporal,
            } => {
                for i in 0..n_spatial {
                    for j in 0..n_temporal {
                        let (xb, tb) = (&branches[i], &branches[n_spatial + j]);
                        let block = (i * n_temporal + j) * w;
                        for (ci, ch) in channels.iter().enumerate() {
                            let Some((xi, ti)) = product_sources(*ch, xb, tb) else {
                                continue;
                            };
                            for p in 0..n {
                                let xs = &xb.out[(xi * n + p) * w..(xi * n + p + 1) * w];
                                let ts = &tb.out[(ti * n + p) * w..(ti * n + p + 1) * w];
                                let dst = (ci * n + p) * f + block;
                                for k in 0..w {
                                    merged[dst + k] = xs[k] * ts[k];
                                }
                            }
                        }
                    }
                }
            }
        }

        let out_slot = self.output_layer();
        let n_out = self.output_dim();
        let mut data = vec![0.0; nc * n * n_out];
        gemm(
            out_slot.scale,
            MatRef::new(&merged, nc * n, f),
            MatRef::new(
                &theta[out_slot.weight..out_slot.weight + out_slot.weight_len()],
                n_out,
                f,
            )
            .t(),
            0.0,
            &mut data,
        );
        let bias = &theta[out_slot.bias..out_slot.bias + n_out];
        for row in data[..n * n_out].chunks_exact_mut(n_out) {
            for (v, b) in row.iter_mut().zip(bias) {
                *v += b;
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalOverflow {
                location: "output layer".into(),
            });
        }
        Ok((
            Jet {
                n_points: n,
                n_out,
                channels: channels.clone(),
                data,
            },
            JetCache {
                n_points: n,
                channels,
                branches,
                merged,
            },
        ))
    }

    /// Gradient with respect to the network parameters of `Σ g ⊙ jet`, where
    /// `g` has the layout of [`Jet::data`]. Accumulates into `grad`.
    pub fn backward(
        &self,
        theta: &[f64],
        cache: &JetCache,
        g_out: &[f64],
        grad: &mut [f64],
    ) -> Result<()> {
        self.check_theta(theta)?;
        let n = cache.n_points;
        let nc = cache.channels.len();
        let n_out = self.output_dim();
        let w = self.width();
        let f = self.merged_width();
        if g_out.len() != nc * n * n_out {
            return Err(Error::Shape(format!(
                "output adjoint has length {}, expected {}",
                g_out.len(),
                nc * n * n_out
            )));
        }
        if grad.len() < self.n_params() {
            return Err(Error::Shape("gradient buffer too short".into()));
        }
        let out_slot = self.output_layer();
        gemm(
            out_slot.scale,
            MatRef::new(g_out, nc * n, n_out).t(),
            MatRef::new(&cache.merged, nc * n, f),
            1.0,
            &mut grad[out_slot.weight..out_slot.weight + out_slot.weight_len()],
        );
        for row in g_out[..n * n_out].chunks_exact(n_out) {
            for (o, g) in row.iter().enumerate() {
                grad[out_slot.bias + o] += g;
            }
        }
        let mut g_merged = vec![0.0; nc * n * f];
        gemm(
            out_slot.scale,
            MatRef::new(g_out, nc * n, n_out),
            MatRef::new(
                &theta[out_slot.weight..out_slot.weight + out_slot.weight_len()],
                n_out,
                f,
            ),
            0.0,
            &mut g_merged,
        );

        let mut g_branch: Vec<Vec<f64>> = cache
            .branches
            .iter()
            .map(|bc| vec![0.0; bc.channels.len() * n * w])
            .collect();
        match self.merge() {
            Merge::Concat => {
                for (b, bc) in cache.branches.iter().enumerate() {
                    for (ci, ch) in cache.channels.iter().enumerate() {
                        let dst_c = bc.index(*ch).expect("concat branches see every coordinate");
                        for p in 0..n {
                            let src = (ci * n + p) * f + b * w;
                            let dst = (dst_c * n + p) * w;
                            g_branch[b][dst..dst + w].copy_from_slice(&g_merged[src..src + w]);
                        }
                    }
                }
            }
            Merge::Product {
                n_spatial,
                n_temporal,
            } => {
                for i in 0..n_spatial {
                    for j in 0..n_temporal {
                        let (xb, tb) = (&cache.branches[i], &cache.branches[n_spatial + j]);
                        let block = (i * n_temporal + j) * w;
                        for (ci, ch) in cache.channels.iter().enumerate() {
                            let Some((xi, ti)) = product_sources(*ch, xb, tb) else {
                                continue;
                            };
                            for p in 0..n {
                                let gm = &g_merged[(ci * n + p) * f + block..][..w];
                                let xs = &xb.out[(xi * n + p) * w..][..w];
                                let ts = &tb.out[(ti * n + p) * w..][..w];
                                {
                                    let gx = &mut g_branch[i][(xi * n + p) * w..][..w];
                                    for k in 0..w {
                                        gx[k] += gm[k] * ts[k];
                                    }
                                }
                                let gt = &mut g_branch[n_spatial + j][(ti * n + p) * w..][..w];
                                for k in 0..w {
                                    gt[k] += gm[k] * xs[k];
                                }
                            }
                        }
                    }
                }
            }
        }

        for (bc, gh) in cache.branches.iter().zip(g_branch) {
            self.branch_backward(theta, bc, gh, n, grad);
        }
        Ok(())
    }

    #[allow(clippy::needless_range_loop)]
    fn branch_backward(
        &self,
        theta: &[f64],
        bc: &BranchCache,
        mut gh: Vec<f64>,
        n: usize,
        grad: &mut [f64],
    ) {
        let nc = bc.channels.len();
        let partner = d1_partner(&bc.channels);
        let w = self.width();
        let nw = n * w;
        let slots: &[LayerSlot] = self.hidden_layers();
        for l in (0..slots.len()).rev() {
            let slot = &slots[l];
            let lc = &bc.layers[l];
            let a = &lc.pre;
            let t = &lc.tanh;
            let mut ga = vec![0.0; nc * nw];
            let mut g_s1 = vec![0.0; nw];
            let mut g_s2 = vec![0.0; nw];
            for ci in 1..nc {
                let blk = ci * nw..(ci + 1) * nw;
                match bc.channels[ci] {
                    Channel::D1(_) => {
                        for q in 0..nw {
                            let s1 = 1.0 - t[q] * t[q];
                            let g = gh[blk.start + q];
                            ga[blk.start + q] += g * s1;
                            g_s1[q] += g * a[blk.start + q];
                        }
                    }
                    Channel::D2(_) => {
                        let j = partner[ci].expect("second derivative implies first");
                        for q in 0..nw {
                            let s1 = 1.0 - t[q] * t[q];
                            let s2 = -2.0 * t[q] * s1;
                            let g = gh[blk.start + q];
                            let da = a[j * nw + q];
                            ga[blk.start + q] += g * s1;
                            ga[j * nw + q] += 2.0 * g * s2 * da;
                            g_s1[q] += g * a[blk.start + q];
                            g_s2[q] += g * da * da;
                        }
                    }
                    Channel::Value => unreachable!(),
                }
            }
            for q in 0..nw {
                let tv = t[q];
                let s1 = 1.0 - tv * tv;
                let gt = gh[q] - 2.0 * tv * g_s1[q] + (6.0 * tv * tv - 2.0) * g_s2[q];
                ga[q] = gt * s1;
            }
            let in_w = slot.fan_in;
            gemm(
                slot.scale,
                MatRef::new(&ga, nc * n, w).t(),
                MatRef::new(&lc.input, nc * n, in_w),
                1.0,
                &mut grad[slot.weight..slot.weight + slot.weight_len()],
            );
            for row in ga[..nw].chunks_exact(w) {
                for (k, g) in row.iter().enumerate() {
                    grad[slot.bias + k] += g;
                }
            }
            if l > 0 {
                let mut gz = vec![0.0; nc * n * in_w];
                gemm(
                    slot.scale,
                    MatRef::new(&ga, nc * n, w),
                    MatRef::new(&theta[slot.weight..slot.weight + slot.weight_len()], w, in_w),
                    0.0,
                    &mut gz,
                );
                gh = gz;
            }
        }
    }

    /// Output values at `points` (row-major, `n × input_dim`), as
    /// `n × output_dim`.
    pub fn predict(&self, theta: &[f64], points: &[f64]) -> Result<Vec<f64>> {
        const CHUNK: usize = 4096;
        let d = self.input_dim();
        let n = self.check_points(points)?;
        let spec = JetSpec::values(d);
        let mut out = Vec::with_capacity(n * self.output_dim());
        for chunk in points.chunks(CHUNK * d) {
            let (jet, _) = self.forward_jet(theta, chunk, &spec)?;
            out.extend_from_slice(jet.value());
        }
        Ok(out)
    }

    /// Per-point parameter Jacobian rows. For each point the single-point
    /// jet is handed to `seed`, which fills the output adjoint (layout of
    /// [`Jet::data`]); the row is the resulting parameter gradient.
    pub fn jacobian_rows(
        &self,
        theta: &[f64],
        points: &[f64],
        spec: &JetSpec,
        mut seed: impl FnMut(usize, &Jet, &mut [f64]),
    ) -> Result<Matrix> {
        let d = self.input_dim();
        let n = self.check_points(points)?;
        let p = self.n_params();
        let mut rows = vec![0.0; n * p];
        for i in 0..n {
            let (jet, cache) = self.forward_jet(theta, &points[i * d..(i + 1) * d], spec)?;
            let mut g = jet.zeros_like();
            seed(i, &jet, &mut g);
            self.backward(theta, &cache, &g, &mut rows[i * p..(i + 1) * p])?;
        }
        Matrix::from_vec(n, p, rows).map_err(|_| Error::NumericalOverflow {
            location: "parameter Jacobian".into(),
        })
    }

    /// Values of an ST-MFF network on the tensor grid `spatial × times`,
    /// evaluating each branch once per distinct coordinate. `spatial` is
    /// row-major `n_x × spatial_dims`; the result is indexed
    /// `[(ix * n_t + it) * n_out + o]`.
    pub fn predict_stmff_grid(
        &self,
        theta: &[f64],
        spatial: &[f64],
        times: &[f64],
    ) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        let Merge::Product {
            n_spatial,
            n_temporal,
        } = self.merge()
        else {
            return Err(Error::Parameter(
                "grid evaluation needs an ST-MFF architecture".into(),
            ));
        };
        let d = self.input_dim();
        let dx = d - 1;
        if spatial.len() % dx != 0 {
            return Err(Error::Shape("spatial grid has the wrong width".into()));
        }
        let nx = spatial.len() / dx;
        let nt = times.len();
        let mut xp = vec![0.0; nx * d];
        for i in 0..nx {
            xp[i * d..i * d + dx].copy_from_slice(&spatial[i * dx..(i + 1) * dx]);
        }
        let mut tp = vec![0.0; nt * d];
        for (i, t) in times.iter().enumerate() {
            tp[i * d + dx] = *t;
        }
        let spec = JetSpec::values(d);
        let descs = self.branches();
        let mut hx = Vec::with_capacity(n_spatial);
        let mut ht = Vec::with_capacity(n_temporal);
        for (b, br) in descs.iter().enumerate() {
            let (pts, n, dst) = if b < n_spatial {
                (&xp, nx, &mut hx)
            } else {
                (&tp, nt, &mut ht)
            };
            dst.push(
                self.run_branch(theta, b, br, spec.channels_for(&br.coords), pts, n)?
                    .out,
            );
        }
        let w = self.width();
        let f = self.merged_width();
        let slot = self.output_layer();
        let n_out = self.output_dim();
        let mut out = vec![0.0; nx * nt * n_out];
        let mut plane = vec![0.0; nx * nt];
        let mut q = vec![0.0; nt * w];
        for o in 0..n_out {
            plane.fill(0.0);
            let wrow = &theta[slot.weight + o * f..slot.weight + (o + 1) * f];
            for i in 0..n_spatial {
                for j in 0..n_temporal {
                    let wb = &wrow[(i * n_temporal + j) * w..][..w];
                    for it in 0..nt {
                        for k in 0..w {
                            q[it * w + k] = ht[j][it * w + k] * wb[k];
                        }
                    }
                    gemm(
                        slot.scale,
                        MatRef::new(&hx[i], nx, w),
                        MatRef::new(&q, nt, w).t(),
                        1.0,
                        &mut plane,
                    );
                }
            }
            let b = theta[slot.bias + o];
            for (k, v) in plane.iter().enumerate() {
                out[k * n_out + o] = v + b;
            }
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalOverflow {
                location: "output layer".into(),
            });
        }
        Ok(out)
    }
}
