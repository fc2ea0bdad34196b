use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use crnoma::ddpg::checkpoint;
use crnoma::harness::{
    apply_override_file, builtin_scenarios, comparison_table, run_experiment, run_verify, scenario_by_name, summarize,
    train_ddpg, write_csv_file, Policy, VerifySizes, OUT_DIR_ENV,
};

#[derive(Parser)]
#[command(name = "crnoma", version, about = "Energy-harvesting secondary user in a CR-NOMA uplink")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario under one or more policies and seeds.
    Run {
        #[arg(long)]
        scenario: String,
        /// ddpg, greedy, random or oracle; comma separated for several.
        #[arg(long, value_delimiter = ',', default_value = "ddpg")]
        policy: Vec<String>,
        #[arg(long)]
        episodes: Option<usize>,
        /// Experiment seed; comma separated for several.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
        /// TOML file overriding network (and `[agent]`) fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trailing window for the summary table.
        #[arg(long, default_value_t = 20)]
        window: usize,
        /// Write wall-clock seconds into the CSV (breaks byte-reproducibility).
        #[arg(long)]
        timing: bool,
        /// Save the trained DDPG agent of each seed next to the CSV.
        #[arg(long)]
        checkpoint: bool,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Run the solver, gradient and invariant self-checks.
    Verify,
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::ListScenarios => {
            for s in builtin_scenarios() {
                println!("{:<18} M={:<3} fading={:<12} episodes={}", s.name, s.network.num_primary(), s.fading, s.num_episodes);
            }
            Ok(true)
        }
        Command::Verify => {
            let mut ok = true;
            for c in run_verify(&VerifySizes::default()) {
                println!("{} {:<22} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            Ok(ok)
        }
        Command::Run { scenario, policy, episodes, seed, out, config, window, timing, checkpoint: save } => {
            let mut base = scenario_by_name(&scenario)?;
            if let Some(path) = &config {
                apply_override_file(&mut base, path).with_context(|| format!("applying {}", path.display()))?;
            }
            if let Some(n) = episodes {
                base.num_episodes = n;
            }
            if seed.is_empty() {
                bail!("at least one seed is required");
            }
            base.seeds = seed;
            let policies = policy.iter().map(|p| p.parse::<Policy>()).collect::<Result<Vec<_>, _>>()?;

            let mut rows = Vec::new();
            for p in policies {
                let s = base.clone().with_policy(p);
                s.validate()?;
                let runs: Vec<_> = {
                    use rayon::prelude::*;
                    s.seeds
                        .par_iter()
                        .map(|&sd| -> Result<_> {
                            if p == Policy::Ddpg && save {
                                let (records, agent) = train_ddpg(&s, sd)?;
                                let path = out.join(format!("{}_{}_seed{sd}.ckpt", s.name, p));
                                std::fs::create_dir_all(&out)?;
                                checkpoint::save_to_path(&agent.params, &path)?;
                                Ok((sd, records))
                            } else {
                                Ok((sd, run_experiment(&s, sd)?))
                            }
                        })
                        .collect::<Result<_>>()?
                };
                for (sd, records) in runs {
                    let path = write_csv_file(&out, &s.name, p, sd, &records, timing)?;
                    log::info!("wrote {}", path.display());
                    if let Some(sum) = summarize(&records, window) {
                        rows.push((format!("{} {} seed {sd}", s.name, p), sum));
                    }
                }
            }
            print!("{}", comparison_table(&rows));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
