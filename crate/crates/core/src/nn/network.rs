use super::layers::{Cache, Layer, Mode};
use super::loss::{check_targets, data_loss, output_grad};
use super::spec::NetworkSpec;
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::rng::{stream, Prng};

/// Rows per chunk when predicting, bounding the im2col buffers.
const PREDICT_CHUNK: usize = 256;

/// A sequential network with its parameters. Immutable once trained; share
/// it freely for inference.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: NetworkSpec,
    shapes: Vec<Vec<usize>>,
    pub(crate) layers: Vec<Layer>,
}

pub type TrainedNetwork = Network;

/// Identifies one parameter tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamInfo {
    pub layer: usize,
    pub name: &'static str,
    pub shape: Vec<usize>,
}

/// Activations and caches from one forward pass.
pub struct ForwardPass {
    batch: usize,
    activations: Vec<Vec<f64>>,
    caches: Vec<Cache>,
    output_shape: Vec<usize>,
}

impl ForwardPass {
    pub fn output(&self) -> Tensor {
        let mut shape = vec![self.batch];
        shape.extend_from_slice(&self.output_shape);
        Tensor::new(shape, self.activations.last().expect("input is stored").clone())
            .expect("output size follows the network shapes")
    }

    /// Entry 0 is the input batch, entry `i + 1` the output of layer `i`.
    pub fn activations(&self) -> &[Vec<f64>] {
        &self.activations
    }

    fn output_slice(&self) -> &[f64] {
        self.activations.last().expect("input is stored")
    }
}

impl Network {
    /// Untrained network: Glorot-uniform weights, zero biases, drawn from
    /// the init stream of `spec.seed`.
    pub fn init(spec: NetworkSpec) -> Result<Self> {
        let mut rng = Prng::with_stream(spec.seed, stream::INIT);
        Self::init_with(spec, &mut rng)
    }

    pub fn init_with(spec: NetworkSpec, rng: &mut Prng) -> Result<Self> {
        spec.validate()?;
        let shapes = spec.shapes()?;
        let layers = spec
            .layers
            .iter()
            .zip(&shapes)
            .map(|(l, shape)| Layer::init(l, shape, rng))
            .collect();
        Ok(Network {
            spec,
            shapes,
            layers,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    /// Per-sample shapes; entry 0 is the input.
    pub fn shapes(&self) -> &[Vec<usize>] {
        &self.shapes
    }

    pub fn output_dim(&self) -> usize {
        self.shapes.last().expect("non-empty")[0]
    }

    pub fn param_info(&self) -> Vec<ParamInfo> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            match layer {
                Layer::Conv1d(c) => {
                    out.push(ParamInfo { layer: i, name: "weight", shape: vec![c.kernel, c.in_channels, c.filters] });
                    out.push(ParamInfo { layer: i, name: "bias", shape: vec![c.filters] });
                }
                Layer::Dense(d) => {
                    out.push(ParamInfo { layer: i, name: "weight", shape: vec![d.in_dim, d.units] });
                    out.push(ParamInfo { layer: i, name: "bias", shape: vec![d.units] });
                }
                _ => {}
            }
        }
        out
    }

    pub fn params(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .filter_map(Layer::params)
            .flat_map(|(w, b)| [w, b])
            .collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .filter_map(Layer::params_mut)
            .flat_map(|(w, b)| [w.as_mut_slice(), b.as_mut_slice()])
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    /// Sum over layers of `l2 * sum(w^2)`; biases are not penalised.
    pub fn l2_penalty(&self) -> f64 {
        self.layers
            .iter()
            .filter_map(|l| l.params().map(|(w, _)| l.l2() * w.iter().map(|v| v * v).sum::<f64>()))
            .sum()
    }

    fn check_batch(&self, batch: &Tensor) -> Result<()> {
        if batch.shape().len() != self.spec.input_shape.len() + 1
            || batch.shape()[1..] != self.spec.input_shape[..]
        {
            return Err(Error::Shape(format!(
                "batch shape {:?} does not match [batch] + {:?}",
                batch.shape(),
                self.spec.input_shape
            )));
        }
        Ok(())
    }

    pub fn forward(&self, batch: &Tensor, mode: Mode, rng: &mut Prng) -> Result<ForwardPass> {
        self.check_batch(batch)?;
        let b = batch.batch();
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        let mut caches = Vec::with_capacity(self.layers.len());
        activations.push(batch.data().to_vec());
        for layer in &self.layers {
            let (out, cache) = layer.forward(activations.last().expect("non-empty"), b, mode, rng);
            activations.push(out);
            caches.push(cache);
        }
        Ok(ForwardPass {
            batch: b,
            activations,
            caches,
            output_shape: self.shapes.last().expect("non-empty").clone(),
        })
    }

    /// Evaluation-mode forward pass over all rows of `inputs`.
    pub fn predict(&self, inputs: &Tensor) -> Result<Tensor> {
        self.check_batch(inputs)?;
        let n = inputs.batch();
        let out_dim = self.output_dim();
        let mut out = Vec::with_capacity(n * out_dim);
        // eval mode draws nothing from the stream
        let mut rng = Prng::new(0);
        let idx: Vec<usize> = (0..n).collect();
        for chunk in idx.chunks(PREDICT_CHUNK) {
            let pass = self.forward(&inputs.gather(chunk), Mode::Eval, &mut rng)?;
            out.extend_from_slice(pass.output_slice());
        }
        Tensor::new(vec![n, out_dim], out)
    }

    fn first_non_finite(&self, pass: &ForwardPass) -> String {
        for (i, act) in pass.activations.iter().enumerate().skip(1) {
            if act.iter().any(|v| !v.is_finite()) {
                return format!("layer {} ({})", i - 1, self.spec.layers[i - 1].kind());
            }
        }
        "loss".to_owned()
    }

    /// Loss (data term plus L2 penalty) and its gradient for every
    /// parameter tensor, in [`Network::params`] order.
    pub fn loss_and_grad(
        &self,
        batch: &Tensor,
        targets: &Tensor,
        mode: Mode,
        rng: &mut Prng,
    ) -> Result<(f64, Vec<Vec<f64>>)> {
        let pass = self.forward(batch, mode, rng)?;
        self.backward(&pass, targets)
    }

    pub fn backward(&self, pass: &ForwardPass, targets: &Tensor) -> Result<(f64, Vec<Vec<f64>>)> {
        let out_dim = self.output_dim();
        if targets.shape() != [pass.batch, out_dim] {
            return Err(Error::Shape(format!(
                "targets shape {:?}, expected [{}, {out_dim}]",
                targets.shape(),
                pass.batch
            )));
        }
        check_targets(self.spec.loss, targets.data())?;
        let pred = pass.output_slice();
        let loss = data_loss(self.spec.loss, pred, targets.data(), pass.batch) + self.l2_penalty();
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                location: self.first_non_finite(pass),
            });
        }

        let last_act = self.layers.iter().rev().find_map(Layer::activation);
        let trailing_is_param = self.layers.last().and_then(Layer::activation).is_some();
        let (mut grad, mut preact) =
            output_grad(self.spec.loss, last_act, pred, targets.data(), pass.batch);
        if preact && !trailing_is_param {
            // a dropout or flatten after the sigmoid: fall back to the plain gradient
            let (g, _) = output_grad(self.spec.loss, None, pred, targets.data(), pass.batch);
            grad = g;
            preact = false;
        }

        let first_param = self.layers.iter().position(|l| l.params().is_some()).unwrap_or(0);
        let mut grads_rev: Vec<Vec<f64>> = Vec::new();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let (dx, pg) = layer.backward(
                &pass.activations[i],
                &pass.activations[i + 1],
                &pass.caches[i],
                std::mem::take(&mut grad),
                pass.batch,
                preact,
                i > first_param,
            );
            preact = false;
            if let Some(mut pg) = pg {
                let l2 = layer.l2();
                if l2 > 0.0 {
                    let (w, _) = layer.params().expect("parametric layer");
                    for (g, wv) in pg.weight.iter_mut().zip(w) {
                        *g += 2.0 * l2 * wv;
                    }
                }
                grads_rev.push(pg.bias);
                grads_rev.push(pg.weight);
            }
            match dx {
                Some(d) => grad = d,
                None => break,
            }
        }
        grads_rev.reverse();
        Ok((loss, grads_rev))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::spec::{Activation, AdamParams, LayerSpec, Loss, Padding};

    fn spec(input: Vec<usize>, layers: Vec<LayerSpec>, loss: Loss) -> NetworkSpec {
        NetworkSpec {
            input_shape: input,
            layers,
            loss,
            optimizer: AdamParams::default(),
            epochs: 1,
            batch_size: 4,
            seed: 11,
        }
    }

    #[test]
    fn dense_param_shapes() {
        let net = Network::init(spec(
            vec![4],
            vec![LayerSpec::Dense { units: 2, l2: 0.0, activation: Activation::Sigmoid }],
            Loss::BinaryCrossEntropy,
        ))
        .unwrap();
        let info = net.param_info();
        assert_eq!(info[0].shape, [4, 2]);
        assert_eq!(info[1].shape, [2]);
        assert!(net.params()[1].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let s = spec(
            vec![6, 2],
            vec![
                LayerSpec::Conv1d { filters: 3, kernel: 3, stride: 1, padding: Padding::Same, l2: 0.1, activation: Activation::Relu },
                LayerSpec::Flatten,
                LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Sigmoid },
            ],
            Loss::BinaryCrossEntropy,
        );
        let a = Network::init(s.clone()).unwrap();
        let b = Network::init(s).unwrap();
        let bits = |n: &Network| n.params().iter().flat_map(|p| p.iter().map(|v| v.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn shape_errors_name_the_layer() {
        let err = Network::init(spec(
            vec![6, 2],
            vec![
                LayerSpec::Conv1d { filters: 3, kernel: 3, stride: 1, padding: Padding::Same, l2: 0.0, activation: Activation::Relu },
                LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Sigmoid },
            ],
            Loss::BinaryCrossEntropy,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("layer 1 (dense)"), "{err}");
    }

    #[test]
    fn mse_zero_residual_leaves_only_l2() {
        let mut net = Network::init(spec(
            vec![3],
            vec![LayerSpec::Dense { units: 2, l2: 0.25, activation: Activation::Linear }],
            Loss::MeanSquaredError,
        ))
        .unwrap();
        net.params_mut()[1].copy_from_slice(&[0.1, -0.2]);
        let x = Tensor::new(vec![2, 3], vec![0.1, 0.5, -0.3, 1.0, 0.0, 0.2]).unwrap();
        let y = net.predict(&x).unwrap();
        let (loss, grads) = net.loss_and_grad(&x, &y, Mode::Eval, &mut Prng::new(0)).unwrap();
        assert!((loss - net.l2_penalty()).abs() < 1e-15);
        for (g, w) in grads[0].iter().zip(net.params()[0]) {
            assert!((g - 0.5 * w).abs() < 1e-15);
        }
        assert!(grads[1].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn bad_batch_shape() {
        let net = Network::init(spec(
            vec![3],
            vec![LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Sigmoid }],
            Loss::BinaryCrossEntropy,
        ))
        .unwrap();
        let x = Tensor::zeros(vec![2, 4]);
        assert!(net.predict(&x).is_err());
    }

    #[test]
    fn non_finite_input_reports_layer() {
        let net = Network::init(spec(
            vec![2],
            vec![
                LayerSpec::Dense { units: 2, l2: 0.0, activation: Activation::Linear },
                LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Linear },
            ],
            Loss::MeanSquaredError,
        ))
        .unwrap();
        let x = Tensor::new(vec![1, 2], vec![f64::INFINITY, 1.0]).unwrap();
        let y = Tensor::zeros(vec![1, 1]);
        let err = net.loss_and_grad(&x, &y, Mode::Eval, &mut Prng::new(0)).unwrap_err();
        assert!(err.to_string().contains("layer 0 (dense)"), "{err}");
    }
}
