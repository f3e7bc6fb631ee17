//! Text serialization of trained networks.
//!
//! ```text
//! cadpipe-network 1
//! spec {"input_shape":[57,1],"layers":[...],...}
//! param 0 weight 3 1 256
//! <row-major values separated by single spaces>
//! param 0 bias 256
//! <values>
//! ...
//! end
//! ```
//!
//! The `spec` line is the JSON form of [`NetworkSpec`]. One `param` header
//! per tensor follows in layer order, giving the layer index, tensor name
//! and shape, then a line with the values in shortest round-trip decimal
//! form, so reloading restores every parameter bit for bit.

use std::io::{BufRead, Write};

use super::network::Network;
use super::spec::NetworkSpec;
use crate::error::{Error, Result};

const MAGIC: &str = "cadpipe-network 1";

fn write_err(e: std::io::Error) -> Error {
    Error::Parse(format!("writing network: {e}"))
}

pub fn save_network<W: Write>(net: &Network, mut out: W) -> Result<()> {
    let spec = serde_json::to_string(net.spec()).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{MAGIC}").map_err(write_err)?;
    writeln!(out, "spec {spec}").map_err(write_err)?;
    for (info, values) in net.param_info().iter().zip(net.params()) {
        let dims: Vec<String> = info.shape.iter().map(usize::to_string).collect();
        writeln!(out, "param {} {} {}", info.layer, info.name, dims.join(" ")).map_err(write_err)?;
        let vals: Vec<String> = values.iter().map(f64::to_string).collect();
        writeln!(out, "{}", vals.join(" ")).map_err(write_err)?;
    }
    writeln!(out, "end").map_err(write_err)?;
    Ok(())
}

pub fn load_network<R: BufRead>(input: R) -> Result<Network> {
    let mut lines = input.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("network file ended before {what}")))?
            .map_err(|e| Error::Parse(format!("reading network: {e}")))
    };
    if next("header")? != MAGIC {
        return Err(Error::Parse("not a cadpipe network file".into()));
    }
    let spec_line = next("spec")?;
    let json = spec_line
        .strip_prefix("spec ")
        .ok_or_else(|| Error::Parse("missing spec line".into()))?;
    let spec: NetworkSpec = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let mut net = Network::init(spec)?;
    let infos = net.param_info();
    let mut params = net.params_mut();
    for (info, dst) in infos.iter().zip(params.iter_mut()) {
        let header = next("param header")?;
        let expected = format!(
            "param {} {} {}",
            info.layer,
            info.name,
            info.shape.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
        );
        if header != expected {
            return Err(Error::Parse(format!("expected {expected:?}, found {header:?}")));
        }
        let values = next("param values")?;
        let parsed: Vec<f64> = values
            .split(' ')
            .map(|v| v.parse::<f64>().map_err(|_| Error::Parse(format!("bad value {v:?}"))))
            .collect::<Result<_>>()?;
        if parsed.len() != dst.len() {
            return Err(Error::Parse(format!(
                "layer {} {}: expected {} values, found {}",
                info.layer,
                info.name,
                dst.len(),
                parsed.len()
            )));
        }
        dst.copy_from_slice(&parsed);
    }
    drop(params);
    if next("end marker")? != "end" {
        return Err(Error::Parse("missing end marker".into()));
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::spec::{Activation, AdamParams, LayerSpec, Loss, Padding};

    #[test]
    fn round_trip_is_bit_exact() {
        let net = Network::init(NetworkSpec {
            input_shape: vec![5, 1],
            layers: vec![
                LayerSpec::Conv1d { filters: 2, kernel: 3, stride: 1, padding: Padding::Same, l2: 0.2, activation: Activation::Relu },
                LayerSpec::Flatten,
                LayerSpec::Dense { units: 3, l2: 0.0, activation: Activation::Relu },
                LayerSpec::Dropout { p: 0.5 },
                LayerSpec::Dense { units: 2, l2: 0.0, activation: Activation::Sigmoid },
            ],
            loss: Loss::BinaryCrossEntropy,
            optimizer: AdamParams::default(),
            epochs: 1,
            batch_size: 2,
            seed: 99,
        })
        .unwrap();
        let mut buf = Vec::new();
        save_network(&net, &mut buf).unwrap();
        let back = load_network(&buf[..]).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn rejects_truncated_file() {
        assert!(load_network(&b"cadpipe-network 1\n"[..]).is_err());
        assert!(load_network(&b"something else\n"[..]).is_err());
    }
}
