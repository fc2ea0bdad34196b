//! Brute-force reference for the slot problem.

use rand::Rng;

use super::{interval_of, objective_of, SolverInputs, Terms};
use crate::environment::{action_to_ebar, SlotState};
use crate::error::Result;
use crate::netmodel::NetworkConfig;

const GOLDEN_ITERS: usize = 200;

/// Best `(alpha, rate)` of the slot objective over a uniform grid of
/// `resolution` steps spanning the feasible interval (both endpoints
/// included), refined by golden-section search inside the winning cell.
pub fn grid_oracle(inputs: &SolverInputs<'_>, resolution: usize) -> Result<(f64, f64)> {
    let terms = Terms::new(inputs);
    let (lo, hi) = interval_of(&terms)?;
    if terms.harvest > 0.0 && terms.is_harvest_only(inputs.ebar) {
        return Ok((0.0, 0.0));
    }
    let resolution = resolution.max(1);
    let f = |a: f64| objective_of(a, &terms).unwrap_or(f64::NEG_INFINITY);

    let step = (hi - lo) / resolution as f64;
    let mut best = (lo, f(lo));
    for i in 1..=resolution {
        let a = if i == resolution { hi } else { lo + step * i as f64 };
        let v = f(a);
        if v > best.1 {
            best = (a, v);
        }
    }
    if step == 0.0 {
        return Ok(best);
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * b.abs() {
            break;
        }
    }
    for cand in [(c, fc), (d, fd)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Whether moving `delta` away from `alpha` inside the feasible interval
/// lowers the objective by more than `rel_tol` of its value. When it does
/// not, the argmax is not identifiable in floating point and any two
/// maximizers may legitimately differ by more than `delta`.
pub fn argmax_resolvable(inputs: &SolverInputs<'_>, alpha: f64, delta: f64, rel_tol: f64) -> Result<bool> {
    let terms = Terms::new(inputs);
    let (lo, hi) = interval_of(&terms)?;
    let peak = objective_of(alpha, &terms)?;
    let mut probed = false;
    for a in [alpha - delta, alpha + delta] {
        let a = a.clamp(lo, hi);
        if a == alpha {
            continue;
        }
        probed = true;
        if peak - objective_of(a, &terms)? > rel_tol * peak.abs() {
            return Ok(true);
        }
    }
    Ok(!probed)
}

/// Random admissible slot problem: gains log-uniform over
/// `[1e-16, 1e-2]`, battery and the fluctuation position uniform with
/// extra mass on both ends. Returns the state and its fluctuation.
pub fn random_instance<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> (SlotState, f64) {
    let mut gain = || 10f64.powf(rng.random_range(-16.0..-2.0));
    let (g0_gain, h_gain, h0_gain) = (gain(), gain(), gain());
    let mut unit = || match rng.random_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0.0..1.0),
    };
    let battery = unit() * config.battery_capacity;
    let beta = unit();
    let state = SlotState { g0_gain, h_gain, h0_gain, battery };
    let ebar = action_to_ebar(beta, &state, config).expect("beta in [0, 1]");
    (state, ebar)
}
