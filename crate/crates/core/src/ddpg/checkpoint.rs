//! Versioned binary checkpoint of [`AgentParams`].
//!
//! Layout (little endian): magic, `u32` version, then eight networks
//! (actor, critic branches and head, and the same for the targets), each
//! as a layer count followed by `inputs: u32, outputs: u32, activation: u8`
//! and the row-major weights and bias as `f64`. Both Adam states follow.

use std::io::{Read, Write};

use ndarray::{Array1, Array2};

use super::adam::Adam;
use super::agent::AgentParams;
use super::mlp::{Activation, Layer, Mlp};
use super::networks::{Actor, Critic};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CRNODDPG";
pub const VERSION: u32 = 1;

fn io(e: std::io::Error) -> Error {
    Error::Checkpoint(e.to_string())
}

fn put_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes()).map_err(io)
}

fn put_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes()).map_err(io)
}

fn put_f64s<'a, W: Write>(w: &mut W, vs: impl IntoIterator<Item = &'a f64>) -> Result<()> {
    for v in vs {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    Ok(())
}

fn get<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(io)?;
    Ok(buf)
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    get::<4, _>(r).map(u32::from_le_bytes)
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    get::<8, _>(r).map(u64::from_le_bytes)
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    get::<8, _>(r).map(f64::from_le_bytes)
}

fn write_mlp<W: Write>(w: &mut W, net: &Mlp) -> Result<()> {
    put_u32(w, net.layers().len() as u32)?;
    for l in net.layers() {
        put_u32(w, l.inputs() as u32)?;
        put_u32(w, l.outputs() as u32)?;
        w.write_all(&[l.activation.tag()]).map_err(io)?;
        put_f64s(w, l.weights.iter().chain(l.bias.iter()))?;
    }
    Ok(())
}

const MAX_WIDTH: u32 = 1 << 16;

fn read_mlp<R: Read>(r: &mut R) -> Result<Mlp> {
    let count = get_u32(r)?;
    if count == 0 || count > 64 {
        return Err(Error::Checkpoint(format!("implausible layer count {count}")));
    }
    let mut layers = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let inputs = get_u32(r)?;
        let outputs = get_u32(r)?;
        if inputs == 0 || outputs == 0 || inputs > MAX_WIDTH || outputs > MAX_WIDTH {
            return Err(Error::Checkpoint(format!("implausible layer shape {inputs}x{outputs}")));
        }
        let [tag] = get::<1, _>(r)?;
        let activation = Activation::from_tag(tag).ok_or_else(|| Error::Checkpoint(format!("unknown activation {tag}")))?;
        let (i, o) = (inputs as usize, outputs as usize);
        let w: Vec<f64> = (0..i * o).map(|_| get_f64(r)).collect::<Result<_>>()?;
        let b: Vec<f64> = (0..o).map(|_| get_f64(r)).collect::<Result<_>>()?;
        layers.push(Layer {
            weights: Array2::from_shape_vec((i, o), w).expect("shape"),
            bias: Array1::from_vec(b),
            activation,
        });
    }
    Mlp::new(layers).map_err(|e| Error::Checkpoint(e.to_string()))
}

fn write_adam<W: Write>(w: &mut W, opt: &Adam) -> Result<()> {
    put_u64(w, opt.t)?;
    put_f64s(w, [&opt.lr, &opt.beta1, &opt.beta2, &opt.eps])?;
    put_u64(w, opt.m.len() as u64)?;
    put_f64s(w, &opt.m)?;
    put_f64s(w, &opt.v)
}

fn read_adam<R: Read>(r: &mut R, expected_len: usize) -> Result<Adam> {
    let t = get_u64(r)?;
    let lr = get_f64(r)?;
    let beta1 = get_f64(r)?;
    let beta2 = get_f64(r)?;
    let eps = get_f64(r)?;
    let n = get_u64(r)? as usize;
    if n != expected_len {
        return Err(Error::Checkpoint(format!("optimiser holds {n} moments, network has {expected_len}")));
    }
    let m = (0..n).map(|_| get_f64(r)).collect::<Result<_>>()?;
    let v = (0..n).map(|_| get_f64(r)).collect::<Result<_>>()?;
    Ok(Adam { lr, beta1, beta2, eps, m, v, t })
}

fn write_critic<W: Write>(w: &mut W, c: &Critic) -> Result<()> {
    write_mlp(w, &c.state_branch)?;
    write_mlp(w, &c.action_branch)?;
    write_mlp(w, &c.head)
}

fn read_critic<R: Read>(r: &mut R) -> Result<Critic> {
    let s = read_mlp(r)?;
    let a = read_mlp(r)?;
    let h = read_mlp(r)?;
    Critic::from_parts(s, a, h)
}

pub fn save<W: Write>(params: &AgentParams, mut w: W) -> Result<()> {
    w.write_all(MAGIC).map_err(io)?;
    put_u32(&mut w, VERSION)?;
    write_mlp(&mut w, &params.actor.net)?;
    write_critic(&mut w, &params.critic)?;
    write_mlp(&mut w, &params.actor_target.net)?;
    write_critic(&mut w, &params.critic_target)?;
    write_adam(&mut w, &params.actor_opt)?;
    write_adam(&mut w, &params.critic_opt)?;
    w.flush().map_err(io)
}

pub fn load<R: Read>(mut r: R) -> Result<AgentParams> {
    let magic = get::<8, _>(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("not an agent checkpoint".into()));
    }
    let version = get_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
    }
    let actor = Actor::from_net(read_mlp(&mut r)?)?;
    let critic = read_critic(&mut r)?;
    let actor_target = Actor::from_net(read_mlp(&mut r)?)?;
    let critic_target = read_critic(&mut r)?;
    let actor_opt = read_adam(&mut r, actor.net.num_params())?;
    let critic_opt = read_adam(&mut r, critic.num_params())?;
    Ok(AgentParams { actor, critic, actor_target, critic_target, actor_opt, critic_opt })
}

pub fn save_to_path(params: &AgentParams, path: &std::path::Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(io)?;
    save(params, std::io::BufWriter::new(f))
}

pub fn load_from_path(path: &std::path::Path) -> Result<AgentParams> {
    let f = std::fs::File::open(path).map_err(io)?;
    load(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::super::agent::{Agent, AgentConfig};
    use super::super::replay::Transition;
    use super::*;
    use crate::rng::{self, Stream};

    fn bits(p: &AgentParams) -> Vec<u64> {
        let nets = p
            .actor
            .net
            .params()
            .chain(p.critic.params())
            .chain(p.actor_target.net.params())
            .chain(p.critic_target.params());
        let opts = [&p.actor_opt, &p.critic_opt].into_iter().flat_map(|o| o.m.iter().chain(o.v.iter()));
        nets.chain(opts).map(|v| v.to_bits()).collect()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut a = Agent::new(AgentConfig::default(), &mut rng::stream(1, Stream::WeightInit)).unwrap();
        let t = Transition { state: [0.1, 0.2, 0.3, 0.4], action: 0.7, reward: 1.5, next_state: [0.4; 4] };
        for _ in 0..5 {
            a.train_on(&[&t, &t, &t]);
        }
        let mut buf = Vec::new();
        save(&a.params, &mut buf).unwrap();
        let back = load(buf.as_slice()).unwrap();
        assert_eq!(bits(&back), bits(&a.params));
        assert_eq!(back, a.params);
        assert_eq!(back.actor_opt.steps(), 5);
    }

    #[test]
    fn rejects_bad_header_and_truncation() {
        let a = Agent::new(AgentConfig::default(), &mut rng::stream(2, Stream::WeightInit)).unwrap();
        let mut buf = Vec::new();
        save(&a.params, &mut buf).unwrap();
        let mut wrong = buf.clone();
        wrong[0] = b'X';
        assert!(load(wrong.as_slice()).is_err());
        let mut ver = buf.clone();
        ver[8] = 99;
        assert!(load(ver.as_slice()).is_err());
        assert!(load(&buf[..buf.len() - 3]).is_err());
    }
}
