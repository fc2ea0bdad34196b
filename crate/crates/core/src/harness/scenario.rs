//! Named experiment setups and policy selectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ddpg::AgentConfig;
use crate::environment::SLOTS_PER_EPISODE;
use crate::error::{Error, Result};
use crate::netmodel::{equally_spaced, FadingMode, NetworkConfig, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Ddpg,
    Greedy,
    Random,
    /// Full harvesting in the slots of the primary user with the strongest
    /// link to the secondary user, full spending in every other slot.
    OracleIntuition,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Ddpg, Policy::Greedy, Policy::Random, Policy::OracleIntuition];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Ddpg => "ddpg",
            Policy::Greedy => "greedy",
            Policy::Random => "random",
            Policy::OracleIntuition => "oracle",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ddpg" => Ok(Policy::Ddpg),
            "greedy" => Ok(Policy::Greedy),
            "random" => Ok(Policy::Random),
            "oracle" | "oracle_intuition" | "oracle-intuition" => Ok(Policy::OracleIntuition),
            other => Err(Error::InvalidConfig(format!("unknown policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub network: NetworkConfig,
    pub fading: FadingMode,
    pub num_episodes: usize,
    pub slots_per_episode: u64,
    pub seeds: Vec<u64>,
    pub policy: Policy,
    pub agent: AgentConfig,
}

impl Scenario {
    pub fn new(name: &str, network: NetworkConfig, fading: FadingMode) -> Self {
        Self {
            name: name.to_string(),
            network,
            fading,
            num_episodes: 200,
            slots_per_episode: SLOTS_PER_EPISODE,
            seeds: vec![0, 1, 2],
            policy: Policy::Ddpg,
            agent: AgentConfig::default(),
        }
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_episodes(mut self, num_episodes: usize) -> Self {
        self.num_episodes = num_episodes;
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_episodes == 0 {
            return Err(Error::InvalidConfig("num_episodes must be at least 1".into()));
        }
        if self.slots_per_episode == 0 {
            return Err(Error::InvalidConfig("slots_per_episode must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("at least one seed is required".into()));
        }
        self.network.validate()?;
        self.agent.validate()
    }
}

fn line_layout(count: usize) -> NetworkConfig {
    NetworkConfig::with_primaries(equally_spaced(Point::new(1.0, 0.0), Point::new(1000.0, 0.0), count))
}

/// `det2`, `const-fading-M2`, `const-fading-M10`, `tv-fading-M2`, `tv-fading-M10`.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let det2 = NetworkConfig::with_primaries(vec![Point::new(0.0, 1.0), Point::new(0.0, 1000.0)]);
    vec![
        Scenario::new("det2", det2, FadingMode::None),
        Scenario::new("const-fading-M2", line_layout(2), FadingMode::ConstantPerExperiment),
        Scenario::new("const-fading-M10", line_layout(10), FadingMode::ConstantPerExperiment),
        Scenario::new("tv-fading-M2", line_layout(2), FadingMode::PerEpisode),
        Scenario::new("tv-fading-M10", line_layout(10), FadingMode::PerEpisode),
    ]
}

pub fn scenario_by_name(name: &str) -> Result<Scenario> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario '{name}'")))
}
