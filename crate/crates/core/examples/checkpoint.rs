//! Train briefly, save the agent, load it back and confirm the restored
//! policy acts identically.

use crnoma::ddpg::{checkpoint, Agent};
use crnoma::harness::{evaluate_agent, scenario_by_name, train_ddpg};

fn main() {
    let mut scenario = scenario_by_name("det2").unwrap().with_episodes(8);
    scenario.agent.warmup = 200;
    let (_, agent) = train_ddpg(&scenario, 3).unwrap();

    let dir = std::env::temp_dir().join(format!("crnoma-checkpoint-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("det2.ckpt");
    checkpoint::save_to_path(&agent.params, &path).unwrap();
    let bytes = std::fs::metadata(&path).unwrap().len();

    let restored = Agent::with_params(scenario.agent.clone(), checkpoint::load_from_path(&path).unwrap());
    assert_eq!(restored.params, agent.params);
    let a = evaluate_agent(&agent, &scenario, 3, 2).unwrap();
    let b = evaluate_agent(&restored, &scenario, 3, 2).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.rewards, y.rewards);
    }
    println!("saved {bytes} bytes to {}; restored agent reproduces {:.4} per slot", path.display(), a[0].mean_reward);
    std::fs::remove_dir_all(&dir).ok();
}
