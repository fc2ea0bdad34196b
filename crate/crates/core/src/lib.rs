//! Energy-constrained secondary user in a CR-NOMA uplink.
//!
//! A secondary user shares the TDMA slots of `M` primary users. In each
//! slot it splits time between uplink transmission (decoded first by the
//! base station under SIC) and harvesting RF energy from the scheduled
//! primary user. The crate provides:
//!
//! - [`netmodel`]: geometry, path loss, fading and the round-robin schedule;
//! - [`environment`]: battery dynamics, rate and the slot transition;
//! - [`subproblem`]: the closed-form optimal split for a given energy
//!   fluctuation, plus a grid-search oracle;
//! - [`ddpg`]: a from-scratch DDPG agent choosing the energy fluctuation;
//! - [`baselines`]: greedy and random benchmark policies;
//! - [`harness`]: scenarios, experiment loops, CSV output and summaries.

pub mod baselines;
pub mod ddpg;
pub mod environment;
pub mod error;
pub mod harness;
pub mod netmodel;
pub mod rng;
pub mod subproblem;

pub use environment::{Environment, SlotOutcome, SlotState};
pub use error::{Error, Result};
pub use netmodel::{ChannelRealization, FadingMode, NetworkConfig, Point};
pub use subproblem::{solve, SolverInputs, SubproblemSolution};
