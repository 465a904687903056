//! Binary checkpoints for the three-network learner.
//!
//! Layout (all integers and floats little-endian):
//!   magic  b"OMPOCKPT"  (8 bytes)
//!   version u32 = 1
//!   3 network blocks (critic, actor, discriminator), each:
//!     input_dim u32, output_dim u32, activation u8 (0 elu, 1 tanh, 2 relu),
//!     n_hidden u32, hidden dims u32 each,
//!     learning_rate f64, adam step u64,
//!     param_count u64, params f64..., adam m f64..., adam v f64...
//!
//! Round-trips are bit-exact: floats are stored as raw IEEE-754 bits.

use anyhow::{bail, Context, Result};
use ompo_core::agent::OmpoAgent;
use ompo_core::nn::{Activation, AdamState, MlpSpec, Network, ParamVector};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"OMPOCKPT";
const VERSION: u32 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

fn activation_code(a: Activation) -> u8 {
    match a {
        Activation::Elu => 0,
        Activation::Tanh => 1,
        Activation::Relu => 2,
    }
}

fn activation_from(code: u8) -> Result<Activation> {
    Ok(match code {
        0 => Activation::Elu,
        1 => Activation::Tanh,
        2 => Activation::Relu,
        other => bail!("unknown activation code {other}"),
    })
}

fn write_network<W: Write>(w: &mut W, net: &Network) -> Result<()> {
    write_u32(w, net.spec.input_dim as u32)?;
    write_u32(w, net.spec.output_dim as u32)?;
    w.write_all(&[activation_code(net.spec.activation)])?;
    write_u32(w, net.spec.hidden_dims.len() as u32)?;
    for &d in &net.spec.hidden_dims {
        write_u32(w, d as u32)?;
    }
    write_f64(w, net.adam.learning_rate)?;
    write_u64(w, net.adam.step)?;
    write_u64(w, net.params.len() as u64)?;
    for &x in net.params.data.iter().chain(&net.adam.m).chain(&net.adam.v) {
        write_f64(w, x)?;
    }
    Ok(())
}

fn read_network<R: Read>(r: &mut R) -> Result<Network> {
    let input_dim = read_u32(r)? as usize;
    let output_dim = read_u32(r)? as usize;
    let mut code = [0u8; 1];
    r.read_exact(&mut code)?;
    let activation = activation_from(code[0])?;
    let n_hidden = read_u32(r)? as usize;
    let mut hidden = Vec::with_capacity(n_hidden);
    for _ in 0..n_hidden {
        hidden.push(read_u32(r)? as usize);
    }
    let spec = MlpSpec::new(input_dim, output_dim, hidden, activation).map_err(|e| anyhow::anyhow!("{e}"))?;
    let learning_rate = read_f64(r)?;
    let step = read_u64(r)?;
    let count = read_u64(r)? as usize;
    if count != spec.param_count() {
        bail!("checkpoint parameter count {count} does not match spec {}", spec.param_count());
    }
    let mut read_vec = |n: usize| -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(read_f64(r)?);
        }
        Ok(v)
    };
    let params = ParamVector { data: read_vec(count)? };
    let mut adam = AdamState::new(count, learning_rate);
    adam.m = read_vec(count)?;
    adam.v = read_vec(count)?;
    adam.step = step;
    Ok(Network { spec, params, adam })
}

/// Networks and optimizer state of one agent; the scenario config travels in
/// the manifest, not here.
pub fn save_networks(path: &Path, agent: &OmpoAgent) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    w.write_all(MAGIC)?;
    write_u32(&mut w, VERSION)?;
    for net in [&agent.critic, &agent.actor, &agent.discriminator] {
        write_network(&mut w, net)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_networks(path: &Path) -> Result<(Network, Network, Network)> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = std::io::BufReader::new(file);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        bail!("not a checkpoint file (bad magic)");
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        bail!("unsupported checkpoint version {version}");
    }
    let critic = read_network(&mut r)?;
    let actor = read_network(&mut r)?;
    let discriminator = read_network(&mut r)?;
    Ok((critic, actor, discriminator))
}
