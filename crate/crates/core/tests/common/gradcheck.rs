//! Central finite-difference oracle for network gradients.

use cadpipe::nn::{
    Activation, AdamParams, LayerSpec, Loss, Mode, Network, NetworkSpec, Padding, Tensor,
};
use cadpipe::Prng;

pub const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Dense,
    Conv1d,
    DropoutOff,
    Bce,
    Mse,
    L2,
}

impl Path {
    pub const ALL: [Path; 6] = [Path::Dense, Path::Conv1d, Path::DropoutOff, Path::Bce, Path::Mse, Path::L2];
}

fn loss_at(net: &Network, x: &Tensor, y: &Tensor) -> (f64, Vec<bool>) {
    let mut rng = Prng::new(0);
    let pass = net.forward(x, Mode::Eval, &mut rng).unwrap();
    let zero_pattern = pass.activations()[1..]
        .iter()
        .flat_map(|a| a.iter().map(|&v| v == 0.0))
        .collect();
    let (loss, _) = net.backward(&pass, y).unwrap();
    (loss, zero_pattern)
}

/// Maximum relative error between analytic and numeric gradients over all
/// parameters, or `None` when a perturbation crosses a ReLU kink (the
/// instance is then not differentiable at the tested resolution).
pub fn max_relative_error(net: &mut Network, x: &Tensor, y: &Tensor) -> Option<f64> {
    let (_, analytic) = net.loss_and_grad(x, y, Mode::Eval, &mut Prng::new(0)).unwrap();
    let n_tensors = analytic.len();
    let mut worst = 0.0f64;
    for t in 0..n_tensors {
        for j in 0..analytic[t].len() {
            let orig = net.params()[t][j];
            net.params_mut()[t][j] = orig + STEP;
            let (plus, pat_plus) = loss_at(net, x, y);
            net.params_mut()[t][j] = orig - STEP;
            let (minus, pat_minus) = loss_at(net, x, y);
            net.params_mut()[t][j] = orig;
            if pat_plus != pat_minus {
                return None;
            }
            let numeric = (plus - minus) / (2.0 * STEP);
            let a = analytic[t][j];
            let scale = a.abs().max(numeric.abs());
            let err = if scale < 1e-7 { (a - numeric).abs() } else { (a - numeric).abs() / scale };
            worst = worst.max(err);
        }
    }
    Some(worst)
}

fn random_tensor(rng: &mut Prng, shape: Vec<usize>, lo: f64, hi: f64) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape, (0..n).map(|_| rng.uniform_range(lo, hi)).collect()).unwrap()
}

fn binary_targets(rng: &mut Prng, batch: usize, dim: usize) -> Tensor {
    Tensor::new(vec![batch, dim], (0..batch * dim).map(|_| (rng.below(2)) as f64).collect()).unwrap()
}

fn act(rng: &mut Prng) -> Activation {
    [Activation::Relu, Activation::Linear, Activation::Sigmoid][rng.below(3)]
}

/// A random instance (network with at most 200 parameters, batch, targets)
/// that exercises `path`.
pub fn instance(path: Path, case_seed: u64) -> (Network, Tensor, Tensor) {
    let mut rng = Prng::new(case_seed);
    let batch = 1 + rng.below(4);
    let (input_shape, layers, loss, l2): (Vec<usize>, Vec<LayerSpec>, Loss, f64) = match path {
        Path::Dense => {
            let d = 2 + rng.below(4);
            let h = 2 + rng.below(5);
            let o = 1 + rng.below(2);
            (
                vec![d],
                vec![
                    LayerSpec::Dense { units: h, l2: 0.0, activation: act(&mut rng) },
                    LayerSpec::Dense { units: o, l2: 0.0, activation: Activation::Linear },
                ],
                Loss::MeanSquaredError,
                0.0,
            )
        }
        Path::Conv1d => {
            let len = 3 + rng.below(5);
            let c = 1 + rng.below(2);
            let f = 1 + rng.below(3);
            let k = [1, 2, 3][rng.below(3)].min(len);
            let stride = 1 + rng.below(2);
            (
                vec![len, c],
                vec![
                    LayerSpec::Conv1d { filters: f, kernel: k, stride, padding: Padding::Same, l2: 0.0, activation: act(&mut rng) },
                    LayerSpec::Conv1d { filters: 2, kernel: k.min(len.div_ceil(stride)), stride: 1, padding: Padding::Same, l2: 0.0, activation: Activation::Linear },
                    LayerSpec::Flatten,
                    LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Linear },
                ],
                Loss::MeanSquaredError,
                0.0,
            )
        }
        Path::DropoutOff => {
            let d = 2 + rng.below(4);
            (
                vec![d],
                vec![
                    LayerSpec::Dense { units: 4, l2: 0.0, activation: act(&mut rng) },
                    LayerSpec::Dropout { p: 0.5 },
                    LayerSpec::Dense { units: 3, l2: 0.0, activation: act(&mut rng) },
                    LayerSpec::Dropout { p: 0.25 },
                    LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Linear },
                ],
                Loss::MeanSquaredError,
                0.0,
            )
        }
        Path::Bce => {
            let d = 2 + rng.below(4);
            let o = 1 + rng.below(2);
            (
                vec![d],
                vec![
                    LayerSpec::Dense { units: 5, l2: 0.0, activation: act(&mut rng) },
                    LayerSpec::Dense { units: o, l2: 0.0, activation: Activation::Sigmoid },
                ],
                Loss::BinaryCrossEntropy,
                0.0,
            )
        }
        Path::Mse => {
            let d = 2 + rng.below(4);
            (
                vec![d],
                vec![
                    LayerSpec::Dense { units: 3, l2: 0.0, activation: act(&mut rng) },
                    LayerSpec::Dense { units: d, l2: 0.0, activation: Activation::Sigmoid },
                ],
                Loss::MeanSquaredError,
                0.0,
            )
        }
        Path::L2 => {
            let len = 3 + rng.below(4);
            let l2 = rng.uniform_range(0.01, 0.5);
            (
                vec![len, 1],
                vec![
                    LayerSpec::Conv1d { filters: 2, kernel: 3.min(len), stride: 1, padding: Padding::Same, l2, activation: act(&mut rng) },
                    LayerSpec::Flatten,
                    LayerSpec::Dense { units: 2, l2, activation: Activation::Sigmoid },
                ],
                Loss::BinaryCrossEntropy,
                l2,
            )
        }
    };
    let _ = l2;
    let spec = NetworkSpec {
        input_shape: input_shape.clone(),
        layers,
        loss,
        optimizer: AdamParams::default(),
        epochs: 1,
        batch_size: batch,
        seed: case_seed,
    };
    let mut net = Network::init(spec).unwrap();
    // non-zero biases so every term of the gradient is exercised
    for p in net.params_mut() {
        if p.len() <= 8 {
            for v in p.iter_mut() {
                *v = rng.uniform_range(-0.3, 0.3);
            }
        }
    }
    assert!(net.parameter_count() <= 200, "{path:?} instance too large");
    let mut xshape = vec![batch];
    xshape.extend(input_shape);
    let x = random_tensor(&mut rng, xshape, -1.0, 1.0);
    let out = net.output_dim();
    let y = match loss {
        Loss::BinaryCrossEntropy => binary_targets(&mut rng, batch, out),
        Loss::MeanSquaredError => random_tensor(&mut rng, vec![batch, out], 0.0, 1.0),
    };
    (net, x, y)
}

/// Runs `cases` differentiable instances of `path`; returns the worst error
/// and the number of instances drawn (including kink rejections).
pub fn check_path(path: Path, cases: usize, base_seed: u64) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut drawn = 0u64;
    while checked < cases {
        let (mut net, x, y) = instance(path, base_seed.wrapping_add(drawn));
        drawn += 1;
        if let Some(err) = max_relative_error(&mut net, &x, &y) {
            worst = worst.max(err);
            checked += 1;
        }
        assert!(drawn < 20 * cases as u64, "{path:?}: too many kink rejections");
    }
    (worst, drawn as usize)
}
