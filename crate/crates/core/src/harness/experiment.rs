//! Episode loops for every policy.

use std::time::Instant;

use rayon::prelude::*;

use super::scenario::{Policy, Scenario};
use crate::baselines::{greedy_policy, random_policy};
use crate::ddpg::{Agent, ReplayBuffer, StateScaler, Transition};
use crate::environment::{Environment, SlotOutcome};
use crate::error::Result;
use crate::netmodel::NetworkConfig;
use crate::rng::{self, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub rewards: Vec<f64>,
    /// Arithmetic mean of `rewards`.
    pub mean_reward: f64,
    pub final_battery: f64,
    /// Exploration scale used in the episode; 0 for non-learning policies.
    pub sigma: f64,
    pub seconds: f64,
    /// Slots whose resulting battery left `[0, E_max]`.
    pub battery_violations: usize,
}

impl EpisodeRecord {
    fn new(episode: usize, rewards: Vec<f64>, final_battery: f64, sigma: f64, seconds: f64, violations: usize) -> Self {
        let mean_reward = rewards.iter().sum::<f64>() / rewards.len() as f64;
        Self { episode, rewards, mean_reward, final_battery, sigma, seconds, battery_violations: violations }
    }
}

/// Index (0-based) of the primary user whose link to the secondary user
/// is strongest; its slots are the ones worth harvesting in.
pub fn harvest_user(config: &NetworkConfig) -> usize {
    config
        .primary_positions
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.distance(&config.secondary_position)))
        .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best })
        .0
}

struct EpisodeTally {
    rewards: Vec<f64>,
    violations: usize,
    capacity: f64,
}

impl EpisodeTally {
    fn new(slots: u64, capacity: f64) -> Self {
        Self { rewards: Vec::with_capacity(slots as usize), violations: 0, capacity }
    }

    fn add(&mut self, out: &SlotOutcome) {
        self.rewards.push(out.reward);
        let b = out.next_state.battery;
        if !(0.0..=self.capacity).contains(&b) {
            self.violations += 1;
        }
    }
}

/// Runs `scenario.policy` for one seed. For DDPG this trains a freshly
/// initialised agent online.
pub fn run_experiment(scenario: &Scenario, seed: u64) -> Result<Vec<EpisodeRecord>> {
    match scenario.policy {
        Policy::Ddpg => train_ddpg(scenario, seed).map(|(records, _)| records),
        policy => run_fixed_policy(scenario, policy, seed),
    }
}

/// Every seed of the scenario, in parallel, in seed order.
pub fn run_all_seeds(scenario: &Scenario) -> Result<Vec<(u64, Vec<EpisodeRecord>)>> {
    scenario.validate()?;
    scenario
        .seeds
        .par_iter()
        .map(|&seed| run_experiment(scenario, seed).map(|r| (seed, r)))
        .collect()
}

fn run_fixed_policy(scenario: &Scenario, policy: Policy, seed: u64) -> Result<Vec<EpisodeRecord>> {
    scenario.validate()?;
    let config = &scenario.network;
    let mut env = Environment::new(config.clone(), scenario.fading, seed)?;
    let mut rng = rng::stream(seed, Stream::Baseline);
    let harvest_slot_user = harvest_user(config) + 1;
    let mut records = Vec::with_capacity(scenario.num_episodes);
    for ep in 0..scenario.num_episodes {
        let start = Instant::now();
        env.reset(ep as u64);
        let mut tally = EpisodeTally::new(scenario.slots_per_episode, config.battery_capacity);
        for _ in 0..scenario.slots_per_episode {
            let state = *env.state();
            let out = match policy {
                Policy::Greedy => {
                    let (a, p) = greedy_policy(&state, config);
                    env.step_direct(a, p)?
                }
                Policy::Random => {
                    let (a, p) = random_policy(&state, config, &mut rng);
                    env.step_direct(a, p)?
                }
                Policy::OracleIntuition => {
                    let beta = if env.scheduled_user() == harvest_slot_user { 1.0 } else { 0.0 };
                    env.step(beta)?
                }
                Policy::Ddpg => unreachable!("handled by train_ddpg"),
            };
            tally.add(&out);
        }
        let secs = start.elapsed().as_secs_f64();
        records.push(EpisodeRecord::new(ep, tally.rewards, env.state().battery, 0.0, secs, tally.violations));
    }
    Ok(records)
}

/// Online DDPG training; returns the per-episode records and the final agent.
pub fn train_ddpg(scenario: &Scenario, seed: u64) -> Result<(Vec<EpisodeRecord>, Agent)> {
    scenario.validate()?;
    let config = &scenario.network;
    let cfg = &scenario.agent;
    let mut env = Environment::new(config.clone(), scenario.fading, seed)?;
    let mut agent = Agent::new(cfg.clone(), &mut rng::stream(seed, Stream::WeightInit))?;
    let mut explore_rng = rng::stream(seed, Stream::Exploration);
    let mut replay_rng = rng::stream(seed, Stream::Replay);
    let scaler = StateScaler::from_config(config);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let ready = cfg.warmup.max(cfg.batch_size);

    let mut records = Vec::with_capacity(scenario.num_episodes);
    for ep in 0..scenario.num_episodes {
        let start = Instant::now();
        env.reset(ep as u64);
        agent.begin_episode(ep as u64);
        let mut tally = EpisodeTally::new(scenario.slots_per_episode, config.battery_capacity);
        let mut s = scaler.normalize(env.state());
        for _ in 0..scenario.slots_per_episode {
            let beta = agent.select_action(&s, true, &mut explore_rng)?;
            let out = env.step(beta)?;
            let next = scaler.normalize(&out.next_state);
            buffer.push(Transition { state: s, action: beta, reward: out.reward, next_state: next });
            if buffer.len() >= ready {
                agent.train_step(&buffer, &mut replay_rng);
            }
            tally.add(&out);
            s = next;
        }
        if !agent.is_finite() {
            return Err(crate::error::Error::NonFinite);
        }
        let secs = start.elapsed().as_secs_f64();
        records.push(EpisodeRecord::new(ep, tally.rewards, env.state().battery, agent.sigma(), secs, tally.violations));
        log::debug!("{} seed {seed} episode {ep}: {:.4}", scenario.name, records[ep].mean_reward);
    }
    Ok((records, agent))
}

/// Runs a trained agent greedily (no exploration, no learning).
pub fn evaluate_agent(agent: &Agent, scenario: &Scenario, seed: u64, episodes: usize) -> Result<Vec<EpisodeRecord>> {
    let config = &scenario.network;
    let mut env = Environment::new(config.clone(), scenario.fading, seed)?;
    let scaler = StateScaler::from_config(config);
    let mut records = Vec::with_capacity(episodes);
    for ep in 0..episodes {
        let start = Instant::now();
        env.reset(ep as u64);
        let mut tally = EpisodeTally::new(scenario.slots_per_episode, config.battery_capacity);
        for _ in 0..scenario.slots_per_episode {
            let beta = agent.params.actor.act_one(&scaler.normalize(env.state()))?;
            tally.add(&env.step(beta)?);
        }
        let secs = start.elapsed().as_secs_f64();
        records.push(EpisodeRecord::new(ep, tally.rewards, env.state().battery, 0.0, secs, tally.violations));
    }
    Ok(records)
}
