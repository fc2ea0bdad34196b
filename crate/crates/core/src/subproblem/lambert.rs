//! Principal branch of the Lambert W function.
//!
//! `lambert_w0` solves `w e^w = z` for `w >= -1` with a bracketed Halley
//! iteration. [`w0_plus_one`] evaluates `1 + W0((k - 1)/e)` for `k >= 0`
//! without ever forming `k - 1`, which keeps full relative precision when
//! `k` is tiny (the usual regime of the slot problem, where `k` is a
//! product of path-loss gains).

use std::f64::consts::E;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
/// Slack accepted below the branch point before reporting a domain error.
pub const BRANCH_SLACK: f64 = 1e-12;
const MAX_ITER: usize = 100;

/// `W0(z)`, the real solution of `w e^w = z` with `w >= -1`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::LambertDomain(z));
    }
    if z < -INV_E - BRANCH_SLACK {
        return Err(Error::LambertDomain(z));
    }
    if z <= -INV_E {
        return Ok(-1.0);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }

    // W0 is increasing; bracket it.
    let mut lo = -1.0;
    let mut hi = if z <= E { 1.0 } else { z.ln() };
    let mut w = initial_guess(z).clamp(lo, hi);

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            return Ok(w);
        }
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let mut next = w - f / denom;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.32 {
        // branch-point series in p = sqrt(2(ez + 1))
        let p = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < 3.0 {
        z.ln_1p() * (1.0 - z.ln_1p() / (2.0 + z.ln_1p()))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `g(u) = e^u (u - 1) + 1`, accurate for small `u`.
fn branch_poly(u: f64) -> f64 {
    if u < 0.1 {
        // sum_{k>=2} (k-1) u^k / k!
        let mut term = u * u / 2.0; // u^k / k! at k = 2
        let mut acc = term;
        for k in 3..30 {
            term *= u / k as f64;
            let add = (k - 1) as f64 * term;
            acc += add;
            if add < acc * 1e-18 {
                break;
            }
        }
        acc
    } else {
        u.exp() * (u - 1.0) + 1.0
    }
}

/// `1 + W0((kappa - 1)/e)` for `kappa >= 0`.
///
/// With `u` the returned value, `e^u (u - 1) + 1 = kappa`. For small
/// `kappa` this is solved directly in `u` by Newton's method from the
/// upper bound `sqrt(2 kappa)`; larger values defer to [`lambert_w0`].
pub fn w0_plus_one(kappa: f64) -> Result<f64> {
    if kappa.is_nan() || kappa < 0.0 {
        return Err(Error::LambertDomain((kappa - 1.0) * INV_E));
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    if kappa >= 0.5 {
        return Ok(1.0 + lambert_w0((kappa - 1.0) * INV_E)?);
    }
    // g is convex and increasing on u >= 0, and g(u) >= u^2/2, so Newton
    // from sqrt(2 kappa) decreases monotonically onto the root.
    let mut u = (2.0 * kappa).sqrt();
    for _ in 0..MAX_ITER {
        let f = branch_poly(u) - kappa;
        let step = f / (u * u.exp());
        let next = u - step;
        if !(next > 0.0) {
            u *= 0.5;
            continue;
        }
        if step.abs() <= 2.0 * f64::EPSILON * next {
            return Ok(next);
        }
        u = next;
    }
    Ok(u)
}
