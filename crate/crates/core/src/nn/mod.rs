//! Small deterministic neural-network engine: sequential stacks of conv1d,
//! dense, dropout and flatten layers trained with Adam on binary
//! cross-entropy or mean squared error. All arithmetic is `f64`.

mod adam;
mod gemm;
mod io;
mod layers;
mod loss;
mod network;
mod spec;
mod tensor;
mod train;

pub use adam::AdamState;
pub use io::{load_network, save_network};
pub use layers::{sigmoid, Mode};
pub use loss::data_loss;
pub use network::{ForwardPass, Network, ParamInfo, TrainedNetwork};
pub use spec::{Activation, AdamParams, LayerSpec, Loss, NetworkSpec, Padding, BCE_EPSILON};
pub use tensor::Tensor;
pub use train::{train, TrainReport};
