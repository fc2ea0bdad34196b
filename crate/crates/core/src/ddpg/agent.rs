//! Actor-critic agent with target networks and soft updates.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::networks::{Actor, ActorHidden, Critic, CriticOutput, STATE_DIM};
use super::noise::{Exploration, NoiseSchedule};
use super::replay::{ReplayBuffer, Transition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub gamma: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Transitions collected before the first training step.
    pub warmup: usize,
    pub hidden: usize,
    pub noise: NoiseSchedule,
    pub actor_hidden: ActorHidden,
    pub critic_output: CriticOutput,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            actor_lr: 0.002,
            critic_lr: 0.004,
            gamma: 0.9,
            tau: 0.01,
            batch_size: 32,
            buffer_capacity: 20_000,
            warmup: 500,
            hidden: 64,
            noise: NoiseSchedule::default(),
            actor_hidden: ActorHidden::ReluTanh,
            critic_output: CriticOutput::Relu,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau must lie in (0, 1]");
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in [0, 1)");
        }
        if self.batch_size == 0 || self.batch_size > self.buffer_capacity {
            return bad("batch_size must lie in 1..=buffer_capacity");
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0) {
            return bad("learning rates must be positive");
        }
        if self.hidden == 0 {
            return bad("hidden width must be positive");
        }
        Ok(())
    }
}

/// Everything learned: the four networks and both optimiser states.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    pub actor: Actor,
    pub critic: Critic,
    pub actor_target: Actor,
    pub critic_target: Critic,
    pub actor_opt: Adam,
    pub critic_opt: Adam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainDiagnostics {
    pub critic_loss: f64,
    /// Mean critic value of the actor's own actions, after the update.
    pub actor_objective: f64,
}

#[derive(Debug, Clone)]
pub struct Agent {
    config: AgentConfig,
    pub params: AgentParams,
    exploration: Exploration,
}

impl Agent {
    /// Fresh networks drawn from `rng`; targets start as exact copies.
    pub fn new<R: Rng + ?Sized>(config: AgentConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let actor = Actor::new(config.hidden, config.actor_hidden, rng);
        let critic = Critic::new(config.hidden, config.critic_output, rng);
        let params = AgentParams {
            actor_opt: Adam::new(actor.net.num_params(), config.actor_lr),
            critic_opt: Adam::new(critic.num_params(), config.critic_lr),
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
        };
        Ok(Self::with_params(config, params))
    }

    pub fn with_params(config: AgentConfig, params: AgentParams) -> Self {
        let exploration = Exploration::new(config.noise);
        Self { config, params, exploration }
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn begin_episode(&mut self, episode: u64) {
        self.exploration.begin_episode(episode);
    }

    pub fn sigma(&self) -> f64 {
        self.exploration.sigma()
    }

    pub fn set_sigma(&mut self, sigma: f64) {
        self.exploration.set_sigma(sigma);
    }

    /// Actor output, plus exploration noise when `explore`, clipped to `[0, 1]`.
    pub fn select_action<R: Rng + ?Sized>(
        &mut self,
        state: &[f64; STATE_DIM],
        explore: bool,
        rng: &mut R,
    ) -> Result<f64> {
        let beta = self.params.actor.act_one(state)?;
        if !explore {
            return Ok(beta);
        }
        Ok((beta + self.exploration.sample(rng)).clamp(0.0, 1.0))
    }

    /// One critic step, one actor step and a soft target update on a
    /// uniformly drawn minibatch. Returns `None` while the buffer holds
    /// fewer than `batch_size` transitions.
    pub fn train_step<R: Rng + ?Sized>(&mut self, buffer: &ReplayBuffer, rng: &mut R) -> Option<TrainDiagnostics> {
        let batch = buffer.sample(self.config.batch_size, rng)?;
        Some(self.train_on(&batch))
    }

    /// Training step on an explicit minibatch.
    pub fn train_on(&mut self, batch: &[&Transition]) -> TrainDiagnostics {
        let n = batch.len();
        let states = rows(batch.iter().map(|t| &t.state[..]), n, STATE_DIM);
        let next = rows(batch.iter().map(|t| &t.next_state[..]), n, STATE_DIM);
        let actions = Array2::from_shape_fn((n, 1), |(i, _)| batch[i].action);
        let rewards = Array2::from_shape_fn((n, 1), |(i, _)| batch[i].reward);
        let p = &mut self.params;

        let next_actions = p.actor_target.act(&next);
        let targets = rewards + p.critic_target.q(&next, &next_actions) * self.config.gamma;

        let cache = p.critic.forward_cached(&states, &actions);
        let err = cache.q() - &targets;
        let critic_loss = err.mapv(|e| e * e).sum() / n as f64;
        let grads = p.critic.backward(&cache, &(err * (2.0 / n as f64)));
        p.critic_opt.step(p.critic.params_mut(), &grads.params);

        // ascend mean Q(s, mu(s)) with the critic held fixed
        let actor_cache = p.actor.forward_cached(&states);
        let policy_actions = actor_cache.output.mapv(super::networks::to_beta);
        let q_cache = p.critic.forward_cached(&states, &policy_actions);
        let actor_objective = q_cache.q().sum() / n as f64;
        let dq = p.critic.backward(&q_cache, &Array2::from_elem((n, 1), -1.0 / n as f64));
        let actor_grads = p.actor.backward_from_beta(&actor_cache, &dq.actions);
        p.actor_opt.step(p.actor.net.params_mut(), &actor_grads);

        p.critic_target.soft_update_from(&p.critic, self.config.tau);
        p.actor_target.net.soft_update_from(&p.actor.net, self.config.tau);
        TrainDiagnostics { critic_loss, actor_objective }
    }

    pub fn is_finite(&self) -> bool {
        let p = &self.params;
        p.actor.net.is_finite() && p.critic.is_finite() && p.actor_target.net.is_finite() && p.critic_target.is_finite()
    }
}

fn rows<'a>(it: impl Iterator<Item = &'a [f64]>, n: usize, width: usize) -> Array2<f64> {
    let flat: Vec<f64> = it.flat_map(|r| r.iter().copied()).collect();
    Array2::from_shape_vec((n, width), flat).expect("row widths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Stream};

    fn agent(cfg: AgentConfig, seed: u64) -> Agent {
        Agent::new(cfg, &mut rng::stream(seed, Stream::WeightInit)).unwrap()
    }

    fn distance(a: &Agent) -> f64 {
        let p = &a.params;
        let actor = p.actor.net.params().zip(p.actor_target.net.params());
        let critic = p.critic.params().zip(p.critic_target.params());
        actor.chain(critic).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn config_validation() {
        assert!(AgentConfig::default().validate().is_ok());
        assert!(AgentConfig { tau: 0.0, ..Default::default() }.validate().is_err());
        assert!(AgentConfig { gamma: 1.0, ..Default::default() }.validate().is_err());
        assert!(AgentConfig { batch_size: 10, buffer_capacity: 5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn targets_start_equal_to_online() {
        assert_eq!(distance(&agent(AgentConfig::default(), 1)), 0.0);
    }

    #[test]
    fn selection_without_noise_is_deterministic_and_clipped() {
        let mut a = agent(AgentConfig::default(), 2);
        let mut r = rng::stream(2, Stream::Exploration);
        let s = [0.2, 0.4, 0.6, 1.0];
        let b0 = a.select_action(&s, false, &mut r).unwrap();
        assert_eq!(b0, a.params.actor.act_one(&s).unwrap());
        a.set_sigma(0.0);
        assert_eq!(a.select_action(&s, true, &mut r).unwrap(), b0);
        a.set_sigma(50.0);
        for _ in 0..100 {
            let b = a.select_action(&s, true, &mut r).unwrap();
            assert!((0.0..=1.0).contains(&b));
        }
    }

    #[test]
    fn not_ready_below_batch_size() {
        let mut a = agent(AgentConfig::default(), 3);
        let mut buf = ReplayBuffer::new(100);
        let t = Transition { state: [0.1; 4], action: 0.5, reward: 1.0, next_state: [0.1; 4] };
        for _ in 0..31 {
            buf.push(t);
        }
        let before = a.params.clone();
        assert!(a.train_step(&buf, &mut rng::stream(0, Stream::Replay)).is_none());
        assert_eq!(a.params, before);
    }

    #[test]
    fn tau_one_copies_online_into_targets() {
        let mut a = agent(AgentConfig { tau: 1.0, ..Default::default() }, 4);
        let t = Transition { state: [0.3; 4], action: 0.2, reward: 2.0, next_state: [0.4; 4] };
        a.train_on(&[&t, &t]);
        assert_eq!(a.params.actor_target, a.params.actor);
        assert_eq!(a.params.critic_target, a.params.critic);
    }

    #[test]
    fn target_gap_shrinks_geometrically_with_frozen_online() {
        let tau = 0.01;
        let mut a = agent(AgentConfig { tau, ..Default::default() }, 5);
        let mut r = rng::stream(9, Stream::WeightInit);
        a.params.actor_target.net.params_mut().for_each(|p| *p += r.random_range(-1.0..1.0));
        a.params.critic_target.params_mut().for_each(|p| *p += r.random_range(-1.0..1.0));
        let d0 = distance(&a);
        let k = 50;
        for _ in 0..k {
            let p = &mut a.params;
            p.critic_target.soft_update_from(&p.critic, tau);
            p.actor_target.net.soft_update_from(&p.actor.net, tau);
        }
        let expected = d0 * (1.0 - tau).powi(k);
        assert!((distance(&a) - expected).abs() <= 1e-12 * d0);
    }

    #[test]
    fn critic_fits_constant_reward_without_discount() {
        let c = 3.0;
        let cfg = AgentConfig { gamma: 0.0, critic_output: CriticOutput::Linear, ..Default::default() };
        let mut a = agent(cfg, 6);
        let mut r = rng::stream(6, Stream::Replay);
        let mut buf = ReplayBuffer::new(1000);
        for _ in 0..1000 {
            let s: [f64; 4] = std::array::from_fn(|_| r.random_range(0.0..1.0));
            let ns: [f64; 4] = std::array::from_fn(|_| r.random_range(0.0..1.0));
            buf.push(Transition { state: s, action: r.random_range(0.0..1.0), reward: c, next_state: ns });
        }
        let losses: Vec<f64> = (0..1000).map(|_| a.train_step(&buf, &mut r).unwrap().critic_loss).collect();
        let tail = losses[900..].iter().sum::<f64>() / 100.0;
        assert!(tail < 1e-2 * c * c, "tail loss {tail}");
    }

    #[test]
    fn actor_moves_toward_higher_reward_action() {
        // reward = action: the policy should drift toward beta = 1
        let cfg = AgentConfig { gamma: 0.0, critic_output: CriticOutput::Linear, ..Default::default() };
        let mut a = agent(cfg, 7);
        let mut r = rng::stream(7, Stream::Replay);
        let mut buf = ReplayBuffer::new(2000);
        for _ in 0..2000 {
            let s: [f64; 4] = std::array::from_fn(|_| r.random_range(0.0..1.0));
            let act = r.random_range(0.0..1.0);
            buf.push(Transition { state: s, action: act, reward: act, next_state: s });
        }
        let s = [0.5; 4];
        let before = a.params.actor.act_one(&s).unwrap();
        for _ in 0..1500 {
            a.train_step(&buf, &mut r);
        }
        let after = a.params.actor.act_one(&s).unwrap();
        assert!(after > 0.9 && after > before, "{before} -> {after}");
    }
}
