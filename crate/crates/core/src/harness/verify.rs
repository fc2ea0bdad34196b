//! Self-checks behind the `verify` command: solver correctness, gradient
//! correctness and the simulation invariants, at sizes that finish in a
//! few seconds.

use std::f64::consts::E;

use ndarray::Array2;
use rand::Rng;

use super::experiment::run_experiment;
use super::scenario::{builtin_scenarios, scenario_by_name, Policy};
use crate::ddpg::{Actor, ActorHidden, Critic, CriticOutput, STATE_DIM};
use crate::netmodel::NetworkConfig;
use crate::rng::{self, Stream};
use crate::subproblem::{
    argmax_resolvable, energy_residual, feasible_interval, grid_oracle, lambert_w0, objective, random_instance, solve, SolverInputs,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifySizes {
    pub lambert_points: usize,
    pub oracle_instances: usize,
    pub oracle_resolution: usize,
    pub fuzz_instances: usize,
    pub concavity_instances: usize,
    pub concavity_grid: usize,
    pub gradient_instances: usize,
    pub gradient_coords: usize,
}

impl Default for VerifySizes {
    fn default() -> Self {
        Self {
            lambert_points: 10_000,
            oracle_instances: 500,
            oracle_resolution: 10_000,
            fuzz_instances: 20_000,
            concavity_instances: 100,
            concavity_grid: 1000,
            gradient_instances: 10,
            gradient_coords: 200,
        }
    }
}

pub fn lambert_residuals(points: usize) -> CheckOutcome {
    let (a, b) = (1e-9f64.ln(), (1e6 + 1.0 / E).ln());
    let mut worst = 0.0f64;
    for i in 0..points {
        let z = -1.0 / E + (a + (b - a) * i as f64 / (points - 1).max(1) as f64).exp();
        let w = lambert_w0(z).unwrap_or(f64::NAN);
        let r = (w * w.exp() - z).abs() / z.abs().max(1.0);
        worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
    }
    CheckOutcome::new("lambert residual", worst <= 1e-12, format!("max scaled residual {worst:.2e} over {points} points"))
}

const ALPHA_TOL: f64 = 1e-4;
/// Relative objective drop below which the argmax counts as unresolved.
pub const FLAT_TOL: f64 = 1e-12;
/// Rates below this many nats per channel use are rounding noise of the
/// objective at a degenerate (single-point) feasible interval.
pub const RATE_FLOOR: f64 = 1e-12;

pub fn solver_matches_oracle(instances: usize, resolution: usize) -> CheckOutcome {
    let cfg = NetworkConfig::default();
    let mut r = rng::stream(101, Stream::Baseline);
    let (mut worst_rate, mut worst_alpha, mut failures, mut flat) = (0.0f64, 0.0f64, 0usize, 0usize);
    for _ in 0..instances {
        let (state, ebar) = random_instance(&cfg, &mut r);
        let inputs = SolverInputs { ebar, state, config: &cfg };
        match (solve(&inputs), grid_oracle(&inputs, resolution)) {
            (Ok(sol), Ok((alpha, rate))) => {
                let excess = ((sol.rate - rate).abs() - RATE_FLOOR).max(0.0);
                worst_rate = worst_rate.max(excess / rate.abs().max(RATE_FLOOR));
                match argmax_resolvable(&inputs, sol.alpha, ALPHA_TOL, FLAT_TOL) {
                    Ok(true) => worst_alpha = worst_alpha.max((sol.alpha - alpha).abs()),
                    Ok(false) => flat += 1,
                    Err(_) => failures += 1,
                }
            }
            _ => failures += 1,
        }
    }
    let passed = failures == 0 && worst_rate <= 1e-6 && worst_alpha <= ALPHA_TOL;
    CheckOutcome::new(
        "solver vs oracle",
        passed,
        format!("{instances} instances: worst relative rate gap {worst_rate:.2e}, worst alpha gap {worst_alpha:.2e} ({flat} flat objectives skipped), {failures} errors"),
    )
}

pub fn feasibility(instances: usize) -> CheckOutcome {
    let cfg = NetworkConfig::default();
    let mut r = rng::stream(102, Stream::Baseline);
    let violations = (0..instances)
        .filter(|_| {
            let (state, ebar) = random_instance(&cfg, &mut r);
            !matches!(feasible_interval(&SolverInputs { ebar, state, config: &cfg }), Ok((lo, hi)) if lo <= hi)
        })
        .count();
    CheckOutcome::new("feasible interval", violations == 0, format!("{violations} empty intervals in {instances}"))
}

pub fn concavity(instances: usize, grid: usize) -> CheckOutcome {
    let cfg = NetworkConfig::default();
    let mut r = rng::stream(103, Stream::Baseline);
    let mut worst = f64::NEG_INFINITY;
    let mut tested = 0;
    while tested < instances {
        let (state, ebar) = random_instance(&cfg, &mut r);
        let inputs = SolverInputs { ebar, state, config: &cfg };
        let Ok((lo, hi)) = feasible_interval(&inputs) else { continue };
        if hi - lo < 1e-6 {
            continue;
        }
        tested += 1;
        let vals: Vec<f64> = (0..grid)
            .map(|i| objective(lo + (hi - lo) * i as f64 / (grid - 1) as f64, &inputs).unwrap_or(f64::NAN))
            .collect();
        let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for w in vals.windows(3) {
            worst = worst.max((w[0] - 2.0 * w[1] + w[2]) / scale);
        }
    }
    CheckOutcome::new("objective concavity", worst <= 1e-9, format!("max scaled second difference {worst:.2e}"))
}

pub fn constraint_residuals(instances: usize) -> CheckOutcome {
    let cfg = NetworkConfig::default();
    let mut r = rng::stream(104, Stream::Baseline);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let (state, ebar) = random_instance(&cfg, &mut r);
        let inputs = SolverInputs { ebar, state, config: &cfg };
        let Ok(sol) = solve(&inputs) else {
            bad += 1;
            continue;
        };
        let scale = cfg.full_slot_harvest(state.h0_gain).max(ebar.abs()).max(f64::MIN_POSITIVE);
        let res = energy_residual(&sol, &inputs).abs() / scale;
        worst = worst.max(res);
        let spent = sol.alpha * cfg.slot_duration * sol.power;
        if res > 1e-9 || spent > state.battery || sol.power < 0.0 || sol.power > cfg.secondary_max_power {
            bad += 1;
        }
    }
    CheckOutcome::new("constraint residuals", bad == 0, format!("{bad} violations; worst energy residual {worst:.2e}"))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-4)
}

fn random_batch<R: Rng>(rows: usize, cols: usize, r: &mut R) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| r.random_range(0.0..1.0))
}

/// Worst relative error between analytic and central-difference
/// gradients of `sum(c * beta(s))` for random actors, checked on
/// `coords` random parameters and every input.
pub fn actor_gradient_error(pattern: ActorHidden, instances: usize, coords: usize, seed: u64) -> f64 {
    let mut r = rng::stream(seed, Stream::WeightInit);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let actor = Actor::new(64, pattern, &mut r);
        let s = random_batch(3, STATE_DIM, &mut r);
        let c = Array2::from_shape_fn((3, 1), |_| r.random_range(-1.0..1.0));
        let f = |a: &Actor| (a.act(&s) * &c).sum();
        let g = actor.backward_from_beta(&actor.forward_cached(&s), &c);
        for _ in 0..coords {
            let k = r.random_range(0..g.len());
            let mut p = actor.clone();
            *p.net.params_mut().nth(k).unwrap() += h;
            let mut m = actor.clone();
            *m.net.params_mut().nth(k).unwrap() -= h;
            worst = worst.max(rel_err(g[k], (f(&p) - f(&m)) / (2.0 * h)));
        }
    }
    worst
}

/// As [`actor_gradient_error`] for the critic, including the action input.
pub fn critic_gradient_error(output: CriticOutput, instances: usize, coords: usize, seed: u64) -> f64 {
    let mut r = rng::stream(seed, Stream::WeightInit);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let critic = Critic::new(64, output, &mut r);
        let s = random_batch(3, STATE_DIM, &mut r);
        let a = random_batch(3, 1, &mut r);
        let c = Array2::from_shape_fn((3, 1), |_| r.random_range(-1.0..1.0));
        let f = |cr: &Critic, a: &Array2<f64>| (cr.q(&s, a) * &c).sum();
        let g = critic.backward(&critic.forward_cached(&s, &a), &c);
        for _ in 0..coords {
            let k = r.random_range(0..g.params.len());
            let mut p = critic.clone();
            *p.params_mut().nth(k).unwrap() += h;
            let mut m = critic.clone();
            *m.params_mut().nth(k).unwrap() -= h;
            worst = worst.max(rel_err(g.params[k], (f(&p, &a) - f(&m, &a)) / (2.0 * h)));
        }
        for i in 0..3 {
            let mut ap = a.clone();
            ap[[i, 0]] += h;
            let mut am = a.clone();
            am[[i, 0]] -= h;
            worst = worst.max(rel_err(g.actions[[i, 0]], (f(&critic, &ap) - f(&critic, &am)) / (2.0 * h)));
        }
    }
    worst
}

pub fn gradients(instances: usize, coords: usize) -> CheckOutcome {
    let a = actor_gradient_error(ActorHidden::ReluTanh, instances, coords, 201);
    let c = critic_gradient_error(CriticOutput::Linear, instances, coords, 202);
    let c_relu = critic_gradient_error(CriticOutput::Relu, instances, coords, 203);
    let worst = a.max(c).max(c_relu);
    CheckOutcome::new("gradient check", worst <= 1e-5, format!("actor {a:.2e}, critic {c:.2e}, relu-output critic {c_relu:.2e}"))
}

pub fn anchor() -> CheckOutcome {
    let s = scenario_by_name("det2").expect("builtin").with_policy(Policy::OracleIntuition).with_episodes(10);
    match run_experiment(&s, 0) {
        Ok(records) => {
            let tail: Vec<f64> = records[2..].iter().flat_map(|r| r.rewards.iter().copied()).collect();
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            CheckOutcome::new("two-user anchor", (mean - 6.01).abs() <= 0.12, format!("mean reward over slots 201-1000: {mean:.4}"))
        }
        Err(e) => CheckOutcome::new("two-user anchor", false, e.to_string()),
    }
}

pub fn battery_invariant() -> CheckOutcome {
    let mut violations = 0;
    let mut runs = 0;
    for base in builtin_scenarios() {
        for policy in [Policy::Greedy, Policy::Random, Policy::OracleIntuition] {
            let s = base.clone().with_policy(policy).with_episodes(5);
            runs += 1;
            match run_experiment(&s, 0) {
                Ok(rs) => violations += rs.iter().map(|r| r.battery_violations).sum::<usize>(),
                Err(_) => violations += 1,
            }
        }
    }
    CheckOutcome::new("battery invariant", violations == 0, format!("{violations} violations over {runs} runs"))
}

/// Every check at the given sizes.
pub fn run_verify(sizes: &VerifySizes) -> Vec<CheckOutcome> {
    vec![
        lambert_residuals(sizes.lambert_points),
        solver_matches_oracle(sizes.oracle_instances, sizes.oracle_resolution),
        feasibility(sizes.fuzz_instances),
        concavity(sizes.concavity_instances, sizes.concavity_grid),
        constraint_residuals(sizes.fuzz_instances),
        gradients(sizes.gradient_instances, sizes.gradient_coords),
        anchor(),
        battery_invariant(),
    ]
}
