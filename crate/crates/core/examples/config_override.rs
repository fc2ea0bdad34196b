//! Override network and agent settings from TOML.

use crnoma::harness::{apply_overrides, run_experiment, scenario_by_name, summarize, Policy};

const OVERRIDES: &str = r#"
battery_capacity = 0.05
primary_positions = [{ x = 0.0, y = 1.0 }, { x = 0.0, y = 30.0 }, { x = 0.0, y = 1000.0 }]

[agent]
critic_output = "linear"
"#;

fn main() {
    let mut scenario = scenario_by_name("det2").unwrap();
    apply_overrides(&mut scenario, OVERRIDES).unwrap();
    println!(
        "E_max = {} J, {} primary users, critic output {:?}",
        scenario.network.battery_capacity,
        scenario.network.num_primary(),
        scenario.agent.critic_output
    );
    let s = scenario.with_policy(Policy::OracleIntuition).with_episodes(5);
    let summary = summarize(&run_experiment(&s, 0).unwrap(), 3).unwrap();
    println!("harvest-near/spend-elsewhere policy: {:.4} per slot", summary.trailing_mean);
}
