//! Fixed log-scale normalisation of the raw slot state.
//!
//! Channel gains span roughly ten decades between the nearest and the
//! farthest link, so each gain is mapped through `log10` onto `[0, 1]`
//! using bounds taken from the configured geometry.

use crate::environment::SlotState;
use crate::netmodel::NetworkConfig;

use super::networks::STATE_DIM;

/// Decades kept below the weakest path loss to leave room for deep fades.
const FADE_MARGIN_DECADES: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateScaler {
    log_min: f64,
    log_max: f64,
    floor: f64,
    battery_capacity: f64,
}

impl StateScaler {
    pub fn from_config(config: &NetworkConfig) -> Self {
        let links = config.link_distances();
        let nearest = links.iter().copied().fold(f64::INFINITY, f64::min);
        let farthest = links.iter().copied().fold(0.0, f64::max);
        let strongest = config.pathloss_ref * nearest.powf(-config.pathloss_exponent);
        let weakest = config.pathloss_ref * farthest.powf(-config.pathloss_exponent);
        let log_max = strongest.log10();
        let log_min = weakest.log10() - FADE_MARGIN_DECADES;
        Self { log_min, log_max, floor: 10f64.powf(log_min), battery_capacity: config.battery_capacity }
    }

    pub fn gain(&self, x: f64) -> f64 {
        ((x + self.floor).log10() - self.log_min) / (self.log_max - self.log_min)
    }

    pub fn normalize(&self, state: &SlotState) -> [f64; STATE_DIM] {
        let n = |x: f64| self.gain(x).clamp(0.0, 1.0);
        [n(state.g0_gain), n(state.h_gain), n(state.h0_gain), state.battery / self.battery_capacity]
    }
}

/// `[n(g0), n(h), n(h0), E / E_max]` with the scaler calibrated to `config`.
pub fn normalize_state(state: &SlotState, config: &NetworkConfig) -> [f64; STATE_DIM] {
    StateScaler::from_config(config).normalize(state)
}
