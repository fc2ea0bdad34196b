//! Step the environment by hand: harvest in the strong user's slot,
//! spend in the weak user's slot.

use crnoma::{Environment, FadingMode, NetworkConfig};

fn main() {
    let mut env = Environment::new(NetworkConfig::default(), FadingMode::None, 0).unwrap();
    env.reset(0);
    println!("slot user  beta  battery_in     ebar_applied   alpha   power       reward");
    for _ in 0..8 {
        let user = env.scheduled_user();
        let beta = if user == 1 { 1.0 } else { 0.0 };
        let before = env.state().battery;
        let slot = env.slot();
        let out = env.step(beta).unwrap();
        println!(
            "{slot:>4} {user:>4}  {beta:.1}  {before:.6e}  {:+.6e}  {:.4}  {:.4e}  {:.4}",
            out.ebar_applied, out.alpha, out.secondary_power, out.reward
        );
    }
}
