//! Geometry, path loss, Rayleigh fading and the round-robin schedule.

use crnoma::netmodel::{scheduled_user, Channels};
use crnoma::harness::scenario_by_name;
use crnoma::FadingMode;

fn main() {
    let scenario = scenario_by_name("tv-fading-M2").unwrap();
    let config = &scenario.network;
    for (i, p) in config.primary_positions.iter().enumerate() {
        let to_bs = p.distance(&config.bs_position);
        let to_su = p.distance(&config.secondary_position);
        println!(
            "U{}: ({:.0}, {:.0})  BS link {:.1} m -> {:.3e}, SU link {:.1} m -> {:.3e}",
            i + 1,
            p.x,
            p.y,
            to_bs,
            config.path_loss(to_bs).unwrap(),
            to_su,
            config.path_loss(to_su).unwrap()
        );
    }

    for mode in [FadingMode::None, FadingMode::ConstantPerExperiment, FadingMode::PerEpisode] {
        let mut channels = Channels::new(config, mode, 7).unwrap();
        print!("{mode:<10}");
        for episode in 0..3 {
            channels.begin_episode(episode);
            let c = channels.realization(1);
            print!("  ep{episode}: h0 {:.3e}", c.h0_gain);
        }
        println!();
    }

    let order: Vec<usize> = (1..=7).map(|n| scheduled_user(n, 3)).collect();
    println!("schedule for M = 3, slots 1..7: {order:?}");
}
