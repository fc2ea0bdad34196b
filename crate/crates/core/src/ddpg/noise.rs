//! Exploration noise added to the actor output.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// Mean-reverting process `x += -theta x + sigma N(0, 1)` per step.
    OrnsteinUhlenbeck { theta: f64 },
}

/// Noise scale `max(floor, initial * decay^episode)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    pub kind: NoiseKind,
    pub initial_sigma: f64,
    pub decay: f64,
    pub floor: f64,
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        Self { kind: NoiseKind::Gaussian, initial_sigma: 0.2, decay: 0.995, floor: 0.01 }
    }
}

impl NoiseSchedule {
    pub fn sigma(&self, episode: u64) -> f64 {
        let e = episode.min(i32::MAX as u64) as i32;
        (self.initial_sigma * self.decay.powi(e)).max(self.floor)
    }
}

#[derive(Debug, Clone)]
pub struct Exploration {
    schedule: NoiseSchedule,
    sigma: f64,
    ou_state: f64,
}

impl Exploration {
    pub fn new(schedule: NoiseSchedule) -> Self {
        Self { schedule, sigma: schedule.sigma(0), ou_state: 0.0 }
    }

    pub fn begin_episode(&mut self, episode: u64) {
        self.sigma = self.schedule.sigma(episode);
        self.ou_state = 0.0;
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn set_sigma(&mut self, sigma: f64) {
        self.sigma = sigma;
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let z: f64 = rng.sample(StandardNormal);
        match self.schedule.kind {
            NoiseKind::Gaussian => self.sigma * z,
            NoiseKind::OrnsteinUhlenbeck { theta } => {
                self.ou_state += -theta * self.ou_state + self.sigma * z;
                self.ou_state
            }
        }
    }
}
