//! Slot-level environment: battery dynamics, achievable rate, the action
//! window for the energy fluctuation, and the step transition.

use crate::error::{Error, Result};
use crate::netmodel::{scheduled_user, ChannelRealization, Channels, FadingMode, NetworkConfig};
use crate::subproblem::{self, SolverInputs};

/// Default number of slots per episode.
pub const SLOTS_PER_EPISODE: u64 = 100;

/// Relative tolerance on the energy identity of a solved slot.
pub const ENERGY_IDENTITY_TOL: f64 = 1e-9;

/// Observation at the start of a slot: the three channel gains of the
/// scheduled primary user and the stored energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotState {
    pub g0_gain: f64,
    pub h_gain: f64,
    pub h0_gain: f64,
    /// Stored energy `E_n`, J.
    pub battery: f64,
}

impl SlotState {
    pub fn new(channels: ChannelRealization, battery: f64) -> Self {
        Self {
            g0_gain: channels.g0_gain,
            h_gain: channels.h_gain,
            h0_gain: channels.h0_gain,
            battery,
        }
    }

    pub fn channels(&self) -> ChannelRealization {
        ChannelRealization { g0_gain: self.g0_gain, h_gain: self.h_gain, h0_gain: self.h0_gain }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    /// Rate achieved in the slot, nats per channel use.
    pub reward: f64,
    pub next_state: SlotState,
    /// Energy fluctuation actually applied to the battery, J.
    pub ebar_applied: f64,
    pub alpha: f64,
    /// Secondary transmit power, W.
    pub secondary_power: f64,
}

/// `alpha * ln(1 + P g0 / (N + P_n h))`.
pub fn achievable_rate(alpha: f64, power: f64, state: &SlotState, config: &NetworkConfig) -> f64 {
    if alpha == 0.0 || power == 0.0 {
        return 0.0;
    }
    let interference = config.noise_power + config.primary_tx_power * state.h_gain;
    alpha * (power * state.g0_gain / interference).ln_1p()
}

/// Battery level at the start of the next slot when the secondary user
/// transmits for `alpha T` seconds at `power` and harvests for the rest.
pub fn battery_update(state: &SlotState, alpha: f64, power: f64, config: &NetworkConfig) -> Result<f64> {
    let spent = alpha * config.slot_duration * power;
    if spent - state.battery > 1e-12 * state.battery.max(f64::MIN_POSITIVE) {
        return Err(Error::EnergyCausality { spent, available: state.battery });
    }
    let harvested = (1.0 - alpha) * config.full_slot_harvest(state.h0_gain);
    let next = (harvested - spent + state.battery).min(config.battery_capacity);
    Ok(floor_residue(next))
}

fn floor_residue(level: f64) -> f64 {
    debug_assert!(level >= -1e-12, "battery went negative by {level} J");
    level.max(0.0)
}

/// Range `[lo, hi]` of the energy fluctuation `Ē_n`: from spending as much
/// as possible without harvesting to harvesting the whole slot without
/// transmitting. Always `lo <= 0 <= hi`.
pub fn ebar_bounds(state: &SlotState, config: &NetworkConfig) -> (f64, f64) {
    let lo = -state.battery.min(config.slot_duration * config.secondary_max_power);
    let hi = (config.battery_capacity - state.battery)
        .min(config.full_slot_harvest(state.h0_gain))
        .max(0.0);
    (lo, hi)
}

/// Affine map of the normalized action `beta ∈ [0, 1]` onto the window of
/// [`ebar_bounds`].
pub fn action_to_ebar(beta: f64, state: &SlotState, config: &NetworkConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidAction(beta));
    }
    let (lo, hi) = ebar_bounds(state, config);
    Ok(beta * hi + (1.0 - beta) * lo)
}

/// A single trajectory of the secondary user.
#[derive(Debug, Clone)]
pub struct Environment {
    config: NetworkConfig,
    channels: Channels,
    episode: u64,
    slot: u64,
    state: SlotState,
}

impl Environment {
    pub fn new(config: NetworkConfig, fading: FadingMode, seed: u64) -> Result<Self> {
        let channels = Channels::new(&config, fading, seed)?;
        let state = SlotState::new(channels.realization(1), config.battery_capacity);
        Ok(Self { config, channels, episode: 0, slot: 1, state })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn state(&self) -> &SlotState {
        &self.state
    }

    /// 1-based slot index within the current episode.
    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn episode(&self) -> u64 {
        self.episode
    }

    /// Primary user scheduled in the current slot, 1-based.
    pub fn scheduled_user(&self) -> usize {
        scheduled_user(self.slot, self.config.num_primary())
    }

    /// Starts episode `episode` (0-based) with a full battery.
    pub fn reset(&mut self, episode: u64) -> SlotState {
        self.episode = episode;
        self.channels.begin_episode(episode);
        self.slot = 1;
        self.state = SlotState::new(self.channels.realization(1), self.config.battery_capacity);
        self.state
    }

    /// Advances one slot with normalized action `beta`: maps it to an
    /// energy fluctuation, solves the slot problem in closed form and moves
    /// the battery by that fluctuation.
    pub fn step(&mut self, beta: f64) -> Result<SlotOutcome> {
        let state = self.state;
        let ebar = action_to_ebar(beta, &state, &self.config)?;
        let solution = subproblem::solve(&SolverInputs { ebar, state, config: &self.config })?;

        let harvest = self.config.full_slot_harvest(state.h0_gain);
        let realized = (1.0 - solution.alpha) * harvest
            - solution.alpha * self.config.slot_duration * solution.power;
        let scale = harvest.max(ebar.abs()).max(f64::MIN_POSITIVE);
        if (realized - ebar).abs() > ENERGY_IDENTITY_TOL * scale {
            return Err(Error::EnergyBookkeeping { realized, requested: ebar });
        }

        let next_battery =
            floor_residue((state.battery + ebar).min(self.config.battery_capacity));
        Ok(self.advance(state, next_battery, solution.rate, solution.alpha, solution.power))
    }

    /// Advances one slot with a directly chosen `(alpha, power)` pair, the
    /// way the benchmark policies act.
    pub fn step_direct(&mut self, alpha: f64, power: f64) -> Result<SlotOutcome> {
        let state = self.state;
        let next_battery = battery_update(&state, alpha, power, &self.config)?;
        let reward = achievable_rate(alpha, power, &state, &self.config);
        Ok(self.advance(state, next_battery, reward, alpha, power))
    }

    fn advance(&mut self, state: SlotState, next_battery: f64, reward: f64, alpha: f64, power: f64) -> SlotOutcome {
        self.slot += 1;
        self.state = SlotState::new(self.channels.realization(self.slot), next_battery);
        SlotOutcome {
            reward,
            next_state: self.state,
            ebar_applied: next_battery - state.battery,
            alpha,
            secondary_power: power,
        }
    }
}
