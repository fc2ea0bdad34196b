//! Benchmark policies acting directly in `(alpha, power)` coordinates.
//!
//! Both transmit at the maximum power and never spend more than the
//! stored energy.

use rand::Rng;

use crate::environment::SlotState;
use crate::netmodel::NetworkConfig;

/// Largest time-sharing coefficient affordable at full power.
fn affordable_alpha(state: &SlotState, config: &NetworkConfig) -> f64 {
    (state.battery / (config.slot_duration * config.secondary_max_power)).min(1.0)
}

/// Spend everything stored at `P_max`, harvest for the rest of the slot.
pub fn greedy_policy(state: &SlotState, config: &NetworkConfig) -> (f64, f64) {
    (affordable_alpha(state, config), config.secondary_max_power)
}

/// Transmit at `P_max` for a uniformly drawn affordable fraction of the slot.
pub fn random_policy<R: Rng + ?Sized>(state: &SlotState, config: &NetworkConfig, rng: &mut R) -> (f64, f64) {
    let cap = affordable_alpha(state, config);
    let alpha = if cap > 0.0 { rng.random_range(0.0..=cap) } else { 0.0 };
    (alpha, config.secondary_max_power)
}
