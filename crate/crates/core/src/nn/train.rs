use super::adam::AdamState;
use super::layers::Mode;
use super::network::Network;
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::rng::{stream, Prng};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Sample-weighted mean of the mini-batch losses, one entry per epoch.
    pub loss_history: Vec<f64>,
    pub steps: usize,
}

/// Mini-batch Adam training using the schedule in the network's spec.
///
/// Each epoch reshuffles the rows with the training stream of `spec.seed`,
/// which also drives the dropout masks. The last batch of an epoch may be
/// short.
pub fn train(net: &mut Network, inputs: &Tensor, targets: &Tensor) -> Result<TrainReport> {
    let n = inputs.batch();
    if n == 0 {
        return Err(Error::Data("cannot train on an empty input".into()));
    }
    if targets.batch() != n {
        return Err(Error::Shape(format!(
            "{n} input rows but {} target rows",
            targets.batch()
        )));
    }
    let spec = net.spec().clone();
    let sizes: Vec<usize> = net.params().iter().map(|p| p.len()).collect();
    let mut adam = AdamState::new(spec.optimizer, &sizes);
    let mut rng = Prng::with_stream(spec.seed, stream::TRAIN);
    let mut report = TrainReport {
        loss_history: Vec::with_capacity(spec.epochs),
        steps: 0,
    };
    for epoch in 0..spec.epochs {
        let order = rng.permutation(n);
        let mut total = 0.0;
        for chunk in order.chunks(spec.batch_size) {
            let x = inputs.gather(chunk);
            let y = targets.gather(chunk);
            let (loss, grads) = net.loss_and_grad(&x, &y, Mode::Train, &mut rng)?;
            adam.step(&mut net.params_mut(), &grads)?;
            total += loss * chunk.len() as f64;
            report.steps += 1;
        }
        let epoch_loss = total / n as f64;
        log::debug!("epoch {epoch}: loss {epoch_loss:.6}");
        report.loss_history.push(epoch_loss);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::spec::{Activation, AdamParams, LayerSpec, Loss, NetworkSpec};

    fn toy() -> (Tensor, Tensor) {
        // separable by the line x0 + x1 = 1
        let pts = [
            (0.1, 0.2, 0.0), (0.3, 0.1, 0.0), (0.2, 0.5, 0.0), (0.0, 0.7, 0.0), (0.4, 0.4, 0.0),
            (0.9, 0.8, 1.0), (0.7, 0.6, 1.0), (1.0, 0.4, 1.0), (0.6, 0.9, 1.0), (0.8, 0.5, 1.0),
        ];
        let x = pts.iter().flat_map(|p| [p.0, p.1]).collect();
        let y = pts.iter().map(|p| p.2).collect();
        (Tensor::new(vec![10, 2], x).unwrap(), Tensor::new(vec![10, 1], y).unwrap())
    }

    fn net(epochs: usize, batch_size: usize) -> Network {
        Network::init(NetworkSpec {
            input_shape: vec![2],
            layers: vec![
                LayerSpec::Dense { units: 8, l2: 0.0, activation: Activation::Relu },
                LayerSpec::Dense { units: 1, l2: 0.0, activation: Activation::Sigmoid },
            ],
            loss: Loss::BinaryCrossEntropy,
            optimizer: AdamParams { lr: 0.05, ..Default::default() },
            epochs,
            batch_size,
            seed: 5,
        })
        .unwrap()
    }

    #[test]
    fn one_step_per_epoch_when_batch_covers_data() {
        let (x, y) = toy();
        let mut n = net(1, 64);
        assert_eq!(train(&mut n, &x, &y).unwrap().steps, 1);
        let mut n = net(3, 4);
        assert_eq!(train(&mut n, &x, &y).unwrap().steps, 9);
    }

    #[test]
    fn separable_toy_reaches_full_accuracy() {
        let (x, y) = toy();
        let mut n = net(200, 4);
        let report = train(&mut n, &x, &y).unwrap();
        assert_eq!(report.loss_history.len(), 200);
        let p = n.predict(&x).unwrap();
        let correct = p.data().iter().zip(y.data()).filter(|(p, t)| (**p >= 0.5) == (**t == 1.0)).count();
        assert_eq!(correct, 10);
    }

    #[test]
    fn deterministic_history() {
        let (x, y) = toy();
        let a = train(&mut net(20, 3), &x, &y).unwrap();
        let b = train(&mut net(20, 3), &x, &y).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_input_is_an_error() {
        let mut n = net(1, 4);
        let x = Tensor::zeros(vec![0, 2]);
        let y = Tensor::zeros(vec![0, 1]);
        assert!(train(&mut n, &x, &y).is_err());
    }
}
