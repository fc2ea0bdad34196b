//! Train the DDPG agent on a scenario and compare it with the baselines.
//!
//! Usage: `cargo run --release --example train_ddpg -- [scenario] [episodes] [seed]`

use crnoma::harness::{comparison_table, run_experiment, scenario_by_name, summarize, train_ddpg, Policy};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("det2");
    let episodes = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);

    let scenario = scenario_by_name(name).expect("built-in scenario").with_episodes(episodes);
    let (records, _agent) = train_ddpg(&scenario, seed).unwrap();
    for r in records.iter().step_by((episodes / 10).max(1)) {
        println!("episode {:>4}  mean reward {:.4}  sigma {:.4}", r.episode, r.mean_reward, r.sigma);
    }

    let mut rows = vec![(format!("{name} ddpg"), summarize(&records, 20).unwrap())];
    for policy in [Policy::Greedy, Policy::Random] {
        let baseline = run_experiment(&scenario.clone().with_policy(policy), seed).unwrap();
        rows.push((format!("{name} {policy}"), summarize(&baseline, 20).unwrap()));
    }
    print!("{}", comparison_table(&rows));
}
