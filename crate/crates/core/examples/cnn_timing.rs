//! Times one optimizer step of the full-size CNN on random data.

use std::time::Instant;

use cadpipe::models::{build_cnn, CnnConfig};
use cadpipe::nn::{Mode, Network, Tensor};
use cadpipe::Prng;

fn main() {
    let cfg = CnnConfig::default();
    let spec = build_cnn(&cfg, 57, 0).expect("valid config");
    let net = Network::init(spec).expect("valid spec");
    println!("parameters: {}", net.parameter_count());
    let mut rng = Prng::new(1);
    let b = cfg.batch_size;
    let x = Tensor::new(vec![b, 57, 1], (0..b * 57).map(|_| rng.uniform()).collect()).unwrap();
    let y = Tensor::new(vec![b, 2], (0..b).flat_map(|i| if i % 2 == 0 { [1.0, 0.0] } else { [0.0, 1.0] }).collect()).unwrap();
    for _ in 0..3 {
        let start = Instant::now();
        let (loss, _) = net.loss_and_grad(&x, &y, Mode::Train, &mut rng).unwrap();
        println!("batch of {b}: loss {loss:.4}, forward+backward {:.2?}", start.elapsed());
    }
}
