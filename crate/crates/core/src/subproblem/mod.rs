//! Per-slot optimizer: for a chosen energy fluctuation `Ē_n`, find the
//! time-sharing coefficient and transmit power maximizing the slot rate.
//!
//! Substituting the energy identity `(1-α)TηP_n h0 - αTP = Ē_n` for the
//! power leaves a one-dimensional concave problem in `α`:
//!
//! ```text
//! maximize   α ln(1 - κ1 + (κ1 - κ2)/α)
//! subject to max{0, θ0} <= α <= min{1, θ1}
//! ```
//!
//! with `κ1 = ηP_n h0 g0 / (N + P_n h)`, `κ2 = Ē g0 / (T (N + P_n h))`,
//! `θ1 = 1 - Ē/(TηP_n h0)` and `θ0` the larger of the battery and the
//! power-cap lower bounds. The unconstrained maximizer is
//! `x* = (κ1 - κ2) / (e^{W0((κ1-1)/e)+1} - 1 + κ1)`, and the constrained
//! optimum is `min{1, max{x*, θ0}}`.

pub mod lambert;
pub mod oracle;

pub use lambert::{lambert_w0, w0_plus_one};
pub use oracle::{argmax_resolvable, grid_oracle, random_instance};

use crate::environment::{achievable_rate, SlotState};
use crate::error::{Error, Result};
use crate::netmodel::NetworkConfig;

/// Feasible-interval inversions smaller than this are treated as rounding.
pub const INTERVAL_TOL: f64 = 1e-9;
/// Relative distance to the full-harvest fluctuation below which the slot
/// is treated as harvest-only.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct SolverInputs<'a> {
    /// Energy fluctuation `Ē_n`, J. Must lie inside `ebar_bounds(state)`.
    pub ebar: f64,
    pub state: SlotState,
    pub config: &'a NetworkConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubproblemSolution {
    pub alpha: f64,
    /// Transmit power, W. Zero when `alpha` is zero.
    pub power: f64,
    /// Slot rate, nats per channel use.
    pub rate: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub theta0: f64,
    pub theta1: f64,
    /// Unconstrained maximizer; `None` in the harvest-only and zero-gain cases.
    pub x_star: Option<f64>,
}

/// Derived constants of one slot problem.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    /// `TηP_n h0`, the energy harvested over a whole slot.
    pub harvest: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `κ1 - κ2`, formed without cancellation.
    pub kappa_gap: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl Terms {
    pub fn new(inputs: &SolverInputs<'_>) -> Self {
        let c = inputs.config;
        let s = &inputs.state;
        let ebar = inputs.ebar;
        let t = c.slot_duration;
        let interference = c.noise_power + c.primary_tx_power * s.h_gain;
        let harvest = c.full_slot_harvest(s.h0_gain);

        let kappa1 = c.harvest_efficiency * c.primary_tx_power * s.h0_gain * s.g0_gain / interference;
        let kappa2 = ebar * s.g0_gain / (t * interference);
        let kappa_gap = (harvest - ebar) * s.g0_gain / (t * interference);

        let power_cap_bound = (harvest - ebar) / (harvest + t * c.secondary_max_power);
        let (theta0, theta1) = if harvest > 0.0 {
            let battery_bound = 1.0 - (s.battery + ebar) / harvest;
            (battery_bound.max(power_cap_bound), 1.0 - ebar / harvest)
        } else if ebar < 0.0 {
            // Nothing to harvest: the battery bound reduces to -Ē <= E_n,
            // which the fluctuation window already guarantees.
            (power_cap_bound, f64::INFINITY)
        } else {
            (power_cap_bound, 0.0)
        };
        Self { harvest, kappa1, kappa2, kappa_gap, theta0, theta1 }
    }

    fn is_harvest_only(&self, ebar: f64) -> bool {
        (ebar - self.harvest).abs() <= SINGULAR_TOL * self.harvest
    }
}

/// Interval `[max{0, θ0}, min{1, θ1}]` of admissible time-sharing
/// coefficients. Nonempty whenever `Ē` lies inside the fluctuation window.
pub fn feasible_interval(inputs: &SolverInputs<'_>) -> Result<(f64, f64)> {
    interval_of(&Terms::new(inputs))
}

fn interval_of(terms: &Terms) -> Result<(f64, f64)> {
    let lo = terms.theta0.max(0.0);
    let hi = terms.theta1.min(1.0);
    if !(lo <= hi + INTERVAL_TOL) {
        return Err(Error::EmptyFeasibleInterval { lo, hi });
    }
    Ok((lo.min(hi), hi))
}

/// Slot rate as a function of `alpha` alone, `α ln(1 - κ1 + (κ1-κ2)/α)`,
/// with its limit 0 at `α = 0`.
pub fn objective(alpha: f64, inputs: &SolverInputs<'_>) -> Result<f64> {
    objective_of(alpha, &Terms::new(inputs))
}

pub(crate) fn objective_of(alpha: f64, terms: &Terms) -> Result<f64> {
    if alpha == 0.0 || alpha == terms.theta1 {
        // Power vanishes at θ1; the κ form only reaches 0 up to rounding.
        return Ok(0.0);
    }
    let excess = terms.kappa_gap / alpha - terms.kappa1;
    if !(excess > -1.0) {
        return Err(Error::ObjectiveDomain { alpha, argument: 1.0 + excess });
    }
    Ok(alpha * excess.ln_1p())
}

/// Optimal time-sharing coefficient.
pub fn optimal_alpha(inputs: &SolverInputs<'_>) -> Result<f64> {
    alpha_of(inputs, &Terms::new(inputs)).map(|(alpha, _)| alpha)
}

/// Returns `(α*, x*)`.
fn alpha_of(inputs: &SolverInputs<'_>, terms: &Terms) -> Result<(f64, Option<f64>)> {
    let (lo, hi) = interval_of(terms)?;
    if terms.harvest > 0.0 && terms.is_harvest_only(inputs.ebar) {
        return Ok((0.0, None));
    }
    if terms.harvest == 0.0 && inputs.ebar >= 0.0 {
        return Ok((0.0, None));
    }
    if inputs.state.g0_gain == 0.0 {
        // Zero rate everywhere; keep the harvest-maximal point.
        return Ok((hi, None));
    }

    let u = w0_plus_one(terms.kappa1)?;
    // e^{W0+1} - 1 + κ1 equals u e^u exactly when u = 1 + W0((κ1-1)/e).
    let x_star = terms.kappa_gap / (u * u.exp());
    let alpha = x_star.max(terms.theta0).min(1.0);
    if alpha > terms.theta1 + INTERVAL_TOL {
        return Err(Error::BranchBound { alpha, theta1: terms.theta1 });
    }
    Ok((alpha.clamp(lo, hi), Some(x_star)))
}

/// Power satisfying the energy identity at `alpha_star`:
/// `((1-α)TηP_n h0 - Ē) / (αT)`, kept inside `[0, min{P_max, E_n/(αT)}]`.
pub fn optimal_power(alpha_star: f64, inputs: &SolverInputs<'_>) -> Result<f64> {
    if !(alpha_star > 0.0) {
        return Err(Error::UndefinedPower);
    }
    let c = inputs.config;
    let t = c.slot_duration;
    let harvest = c.full_slot_harvest(inputs.state.h0_gain);
    let power = ((1.0 - alpha_star) * harvest - inputs.ebar) / (alpha_star * t);
    let cap = c.secondary_max_power.min(inputs.state.battery / (alpha_star * t));
    let mut power = power.clamp(0.0, cap);
    // E/(αT) can round up so that αTP overshoots E by an ulp.
    while power > 0.0 && alpha_star * t * power > inputs.state.battery {
        power = power.next_down();
    }
    Ok(power)
}

/// Solves the slot problem in closed form.
pub fn solve(inputs: &SolverInputs<'_>) -> Result<SubproblemSolution> {
    let terms = Terms::new(inputs);
    let (alpha, x_star) = alpha_of(inputs, &terms)?;
    let (power, rate) = if alpha > 0.0 {
        let power = optimal_power(alpha, inputs)?;
        (power, achievable_rate(alpha, power, &inputs.state, inputs.config))
    } else {
        (0.0, 0.0)
    };
    Ok(SubproblemSolution {
        alpha,
        power,
        rate,
        kappa1: terms.kappa1,
        kappa2: terms.kappa2,
        theta0: terms.theta0,
        theta1: terms.theta1,
        x_star,
    })
}

/// `|(1-α)TηP_n h0 - αTP - Ē|`, the energy-identity residual of a solution.
pub fn energy_residual(solution: &SubproblemSolution, inputs: &SolverInputs<'_>) -> f64 {
    let c = inputs.config;
    let realized = (1.0 - solution.alpha) * c.full_slot_harvest(inputs.state.h0_gain)
        - solution.alpha * c.slot_duration * solution.power;
    (realized - inputs.ebar).abs()
}
