use thiserror::Error;

/// Errors raised by the physical model, the slot optimizer and the agent.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: distance {0} m must be strictly positive")]
    InvalidGeometry(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("energy causality violated: spending {spent} J with only {available} J stored")]
    EnergyCausality { spent: f64, available: f64 },

    #[error("invalid action {0}: beta must lie in [0, 1]")]
    InvalidAction(f64),

    #[error("Lambert W0 undefined for argument {0} < -1/e")]
    LambertDomain(f64),

    #[error("objective undefined at alpha = {alpha}: log argument {argument} is not positive")]
    ObjectiveDomain { alpha: f64, argument: f64 },

    #[error("empty feasible interval [{lo}, {hi}] for the slot problem")]
    EmptyFeasibleInterval { lo: f64, hi: f64 },

    #[error("time-sharing coefficient {alpha} exceeds its analytic upper bound {theta1}")]
    BranchBound { alpha: f64, theta1: f64 },

    #[error("transmit power undefined when the time-sharing coefficient is zero")]
    UndefinedPower,

    #[error("energy bookkeeping mismatch: realized {realized} J, requested {requested} J")]
    EnergyBookkeeping { realized: f64, requested: f64 },

    #[error("non-finite value in network input")]
    NonFinite,

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
