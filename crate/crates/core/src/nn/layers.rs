//! Runtime layers: parameters plus batched forward and backward passes.
//!
//! Activations travel as flat row-major buffers with the batch axis first.
//! Convolutions are channels-last, `[batch, length, channels]`, and run as
//! an im2col product; the column matrix is kept for the backward pass.

use super::gemm::gemm;
use super::spec::{Activation, LayerSpec};
use crate::rng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Conv1d {
    pub filters: usize,
    pub kernel: usize,
    pub stride: usize,
    pub l2: f64,
    pub activation: Activation,
    pub in_len: usize,
    pub in_channels: usize,
    pub out_len: usize,
    pub pad_left: usize,
    /// `[kernel, in_channels, filters]`, row-major.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense {
    pub in_dim: usize,
    pub units: usize,
    pub l2: f64,
    pub activation: Activation,
    /// `[in_dim, units]`, row-major.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Layer {
    Conv1d(Conv1d),
    Dense(Dense),
    Dropout { p: f64 },
    Flatten,
}

pub(crate) enum Cache {
    None,
    Columns(Vec<f64>),
    Mask(Vec<f64>),
}

pub(crate) struct ParamGrads {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

fn glorot(rng: &mut Prng, fan_in: usize, fan_out: usize, n: usize) -> Vec<f64> {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..n).map(|_| rng.uniform_range(-bound, bound)).collect()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn activate(act: Activation, z: &mut [f64]) {
    match act {
        Activation::Relu => z.iter_mut().for_each(|v| {
            // NaN passes through so non-finite values stay detectable
            if *v < 0.0 {
                *v = 0.0
            }
        }),
        Activation::Sigmoid => z.iter_mut().for_each(|v| *v = sigmoid(*v)),
        Activation::Linear => {}
    }
}

/// Turns a gradient w.r.t. the activation output into one w.r.t. its input.
fn activation_backward(act: Activation, output: &[f64], grad: &mut [f64]) {
    match act {
        Activation::Relu => {
            for (g, &y) in grad.iter_mut().zip(output) {
                if y <= 0.0 {
                    *g = 0.0;
                }
            }
        }
        Activation::Sigmoid => {
            for (g, &y) in grad.iter_mut().zip(output) {
                *g *= y * (1.0 - y);
            }
        }
        Activation::Linear => {}
    }
}

fn add_bias(out: &mut [f64], bias: &[f64]) {
    for row in out.chunks_exact_mut(bias.len()) {
        for (o, b) in row.iter_mut().zip(bias) {
            *o += b;
        }
    }
}

fn column_sums(grad: &[f64], width: usize) -> Vec<f64> {
    let mut sums = vec![0.0; width];
    for row in grad.chunks_exact(width) {
        for (s, g) in sums.iter_mut().zip(row) {
            *s += g;
        }
    }
    sums
}

impl Conv1d {
    fn patch_width(&self) -> usize {
        self.kernel * self.in_channels
    }

    fn im2col(&self, input: &[f64], batch: usize) -> Vec<f64> {
        let (c, w) = (self.in_channels, self.patch_width());
        let mut cols = vec![0.0; batch * self.out_len * w];
        for b in 0..batch {
            let x = &input[b * self.in_len * c..(b + 1) * self.in_len * c];
            for t in 0..self.out_len {
                let row = &mut cols[(b * self.out_len + t) * w..(b * self.out_len + t + 1) * w];
                for k in 0..self.kernel {
                    let pos = (t * self.stride + k) as isize - self.pad_left as isize;
                    if pos >= 0 && (pos as usize) < self.in_len {
                        let p = pos as usize;
                        row[k * c..(k + 1) * c].copy_from_slice(&x[p * c..(p + 1) * c]);
                    }
                }
            }
        }
        cols
    }

    fn col2im(&self, dcols: &[f64], batch: usize) -> Vec<f64> {
        let (c, w) = (self.in_channels, self.patch_width());
        let mut dx = vec![0.0; batch * self.in_len * c];
        for b in 0..batch {
            let x = &mut dx[b * self.in_len * c..(b + 1) * self.in_len * c];
            for t in 0..self.out_len {
                let row = &dcols[(b * self.out_len + t) * w..(b * self.out_len + t + 1) * w];
                for k in 0..self.kernel {
                    let pos = (t * self.stride + k) as isize - self.pad_left as isize;
                    if pos >= 0 && (pos as usize) < self.in_len {
                        let p = pos as usize;
                        for (d, g) in x[p * c..(p + 1) * c].iter_mut().zip(&row[k * c..(k + 1) * c]) {
                            *d += g;
                        }
                    }
                }
            }
        }
        dx
    }
}

impl Layer {
    /// Builds a layer with Glorot-uniform weights and zero biases.
    pub fn init(spec: &LayerSpec, input_shape: &[usize], rng: &mut Prng) -> Layer {
        match *spec {
            LayerSpec::Conv1d {
                filters,
                kernel,
                stride,
                l2,
                activation,
                ..
            } => {
                let (in_len, in_channels) = (input_shape[0], input_shape[1]);
                let out_len = in_len.div_ceil(stride);
                let pad_total = ((out_len - 1) * stride + kernel).saturating_sub(in_len);
                Layer::Conv1d(Conv1d {
                    filters,
                    kernel,
                    stride,
                    l2,
                    activation,
                    in_len,
                    in_channels,
                    out_len,
                    pad_left: pad_total / 2,
                    weight: glorot(
                        rng,
                        kernel * in_channels,
                        kernel * filters,
                        kernel * in_channels * filters,
                    ),
                    bias: vec![0.0; filters],
                })
            }
            LayerSpec::Dense {
                units,
                l2,
                activation,
            } => {
                let in_dim = input_shape[0];
                Layer::Dense(Dense {
                    in_dim,
                    units,
                    l2,
                    activation,
                    weight: glorot(rng, in_dim, units, in_dim * units),
                    bias: vec![0.0; units],
                })
            }
            LayerSpec::Dropout { p } => Layer::Dropout { p },
            LayerSpec::Flatten => Layer::Flatten,
        }
    }

    pub fn params(&self) -> Option<(&[f64], &[f64])> {
        match self {
            Layer::Conv1d(c) => Some((&c.weight, &c.bias)),
            Layer::Dense(d) => Some((&d.weight, &d.bias)),
            _ => None,
        }
    }

    pub fn params_mut(&mut self) -> Option<(&mut Vec<f64>, &mut Vec<f64>)> {
        match self {
            Layer::Conv1d(c) => Some((&mut c.weight, &mut c.bias)),
            Layer::Dense(d) => Some((&mut d.weight, &mut d.bias)),
            _ => None,
        }
    }

    pub fn l2(&self) -> f64 {
        match self {
            Layer::Conv1d(c) => c.l2,
            Layer::Dense(d) => d.l2,
            _ => 0.0,
        }
    }

    pub fn activation(&self) -> Option<Activation> {
        match self {
            Layer::Conv1d(c) => Some(c.activation),
            Layer::Dense(d) => Some(d.activation),
            _ => None,
        }
    }

    pub fn forward(&self, input: &[f64], batch: usize, mode: Mode, rng: &mut Prng) -> (Vec<f64>, Cache) {
        match self {
            Layer::Conv1d(c) => {
                let cols = c.im2col(input, batch);
                let rows = batch * c.out_len;
                let mut out = vec![0.0; rows * c.filters];
                gemm(rows, c.patch_width(), c.filters, &cols, false, &c.weight, false, 0.0, &mut out);
                add_bias(&mut out, &c.bias);
                activate(c.activation, &mut out);
                (out, Cache::Columns(cols))
            }
            Layer::Dense(d) => {
                let mut out = vec![0.0; batch * d.units];
                gemm(batch, d.in_dim, d.units, input, false, &d.weight, false, 0.0, &mut out);
                add_bias(&mut out, &d.bias);
                activate(d.activation, &mut out);
                (out, Cache::None)
            }
            Layer::Dropout { p } => {
                if mode == Mode::Eval || *p == 0.0 {
                    return (input.to_vec(), Cache::None);
                }
                let scale = 1.0 / (1.0 - p);
                let mask: Vec<f64> = (0..input.len())
                    .map(|_| if rng.uniform() < *p { 0.0 } else { scale })
                    .collect();
                let out = input.iter().zip(&mask).map(|(x, m)| x * m).collect();
                (out, Cache::Mask(mask))
            }
            Layer::Flatten => (input.to_vec(), Cache::None),
        }
    }

    /// Backward pass for one layer.
    ///
    /// `grad` is d(loss)/d(output), or d(loss)/d(pre-activation) when
    /// `grad_is_preactivation` is set. Returns d(loss)/d(input) when
    /// `want_input_grad`, and the parameter gradients (data term only).
    #[allow(clippy::too_many_arguments)]
    pub fn backward(
        &self,
        input: &[f64],
        output: &[f64],
        cache: &Cache,
        mut grad: Vec<f64>,
        batch: usize,
        grad_is_preactivation: bool,
        want_input_grad: bool,
    ) -> (Option<Vec<f64>>, Option<ParamGrads>) {
        match self {
            Layer::Conv1d(c) => {
                if !grad_is_preactivation {
                    activation_backward(c.activation, output, &mut grad);
                }
                let Cache::Columns(cols) = cache else {
                    unreachable!("conv1d forward always caches its columns")
                };
                let rows = batch * c.out_len;
                let w = c.patch_width();
                let mut dw = vec![0.0; w * c.filters];
                gemm(w, rows, c.filters, cols, true, &grad, false, 0.0, &mut dw);
                let db = column_sums(&grad, c.filters);
                let dx = want_input_grad.then(|| {
                    let mut dcols = vec![0.0; rows * w];
                    gemm(rows, c.filters, w, &grad, false, &c.weight, true, 0.0, &mut dcols);
                    c.col2im(&dcols, batch)
                });
                (dx, Some(ParamGrads { weight: dw, bias: db }))
            }
            Layer::Dense(d) => {
                if !grad_is_preactivation {
                    activation_backward(d.activation, output, &mut grad);
                }
                let mut dw = vec![0.0; d.in_dim * d.units];
                gemm(d.in_dim, batch, d.units, input, true, &grad, false, 0.0, &mut dw);
                let db = column_sums(&grad, d.units);
                let dx = want_input_grad.then(|| {
                    let mut dx = vec![0.0; batch * d.in_dim];
                    gemm(batch, d.units, d.in_dim, &grad, false, &d.weight, true, 0.0, &mut dx);
                    dx
                });
                (dx, Some(ParamGrads { weight: dw, bias: db }))
            }
            Layer::Dropout { .. } => {
                if let Cache::Mask(mask) = cache {
                    grad.iter_mut().zip(mask).for_each(|(g, m)| *g *= m);
                }
                (want_input_grad.then_some(grad), None)
            }
            Layer::Flatten => (want_input_grad.then_some(grad), None),
        }
    }
}
