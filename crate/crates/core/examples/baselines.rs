//! Greedy and random benchmark policies across the built-in scenarios.

use crnoma::harness::{builtin_scenarios, comparison_table, run_experiment, summarize, Policy};

fn main() {
    let mut rows = Vec::new();
    for scenario in builtin_scenarios() {
        for policy in [Policy::Greedy, Policy::Random] {
            let s = scenario.clone().with_policy(policy).with_episodes(20);
            let records = run_experiment(&s, 0).unwrap();
            rows.push((format!("{} {policy}", s.name), summarize(&records, 10).unwrap()));
        }
    }
    print!("{}", comparison_table(&rows));
}
