//! DDPG against both baselines on every built-in scenario, several seeds
//! in parallel.
//!
//! Usage: `cargo run --release --example fading_scenarios -- [episodes]`

use crnoma::harness::{builtin_scenarios, comparison_table, run_all_seeds, summarize, Policy};

fn main() {
    let episodes = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(150);
    let mut rows = Vec::new();
    for scenario in builtin_scenarios() {
        for policy in [Policy::Ddpg, Policy::Greedy, Policy::Random] {
            let s = scenario.clone().with_policy(policy).with_episodes(episodes);
            for (seed, records) in run_all_seeds(&s).unwrap() {
                rows.push((format!("{} {policy} seed {seed}", s.name), summarize(&records, 20).unwrap()));
            }
        }
    }
    print!("{}", comparison_table(&rows));
}
