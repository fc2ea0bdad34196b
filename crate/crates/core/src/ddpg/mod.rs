//! Deep deterministic policy gradient, written directly on dense arrays.
//!
//! The actor chooses `beta in [0, 1]`, which the environment maps onto the
//! admissible energy fluctuation; the critic scores state-action pairs.
//! Both have target copies tracked by soft updates.

pub mod adam;
pub mod agent;
pub mod checkpoint;
pub mod mlp;
pub mod networks;
pub mod noise;
pub mod replay;
pub mod scaler;

pub use adam::Adam;
pub use agent::{Agent, AgentConfig, AgentParams, TrainDiagnostics};
pub use mlp::{Activation, Layer, Mlp};
pub use networks::{Actor, ActorHidden, Critic, CriticOutput, STATE_DIM};
pub use noise::{Exploration, NoiseKind, NoiseSchedule};
pub use replay::{ReplayBuffer, Transition};
pub use scaler::{normalize_state, StateScaler};
