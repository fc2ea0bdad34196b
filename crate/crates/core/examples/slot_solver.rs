//! Solve one slot problem in closed form and check it against a grid search.

use crnoma::environment::{ebar_bounds, SlotState};
use crnoma::subproblem::{grid_oracle, solve, SolverInputs};
use crnoma::NetworkConfig;

fn main() {
    let config = NetworkConfig::default();
    let state = SlotState { g0_gain: 1e-2, h_gain: 1e-6, h0_gain: 0.01 / 0.7, battery: 0.08 };
    let (lo, hi) = ebar_bounds(&state, &config);
    println!("admissible energy fluctuation: [{lo:.4e}, {hi:.4e}] J");

    for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let ebar = beta * hi + (1.0 - beta) * lo;
        let inputs = SolverInputs { ebar, state, config: &config };
        let sol = solve(&inputs).expect("admissible fluctuation");
        let (grid_alpha, grid_rate) = grid_oracle(&inputs, 100_000).expect("oracle");
        println!(
            "beta {beta:.2}  ebar {ebar:+.4e}  alpha* {:.6}  P* {:.5} W  rate {:.6}  (grid: alpha {:.6}, rate {:.6})",
            sol.alpha, sol.power, sol.rate, grid_alpha, grid_rate
        );
        assert!(sol.rate >= grid_rate - 1e-9 * grid_rate.max(1.0));
    }
}
