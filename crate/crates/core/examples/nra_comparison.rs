//! MALM against MOSP, CL and NY on network resource allocation.
//!
//! Usage: `cargo run --release --example nra_comparison -- [T] [seed]` (defaults 2000, 1).

use constrained_oco::harness::{run_experiment, AlgoSpec, ExperimentConfig};

fn main() -> constrained_oco::Result<()> {
    let mut args = std::env::args().skip(1);
    let horizon: usize = args.next().map_or(2000, |a| a.parse().expect("T must be an integer"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed must be an integer"));

    let mut cfg = ExperimentConfig::preset("nra-paper")?;
    cfg.horizons = vec![horizon];
    cfg.seeds = vec![seed];
    let result = run_experiment(&cfg)?;

    println!("NRA, 10 mapping nodes, 10 data centers, T = {horizon}, seed {seed}");
    println!("{:>6} {:>14} {:>14} {:>12}", "algo", "avg regret", "max avg vio", "final |lam|");
    for spec in &cfg.algos {
        let AlgoSpec { name, .. } = spec;
        let cell = result.cell(name, seed, 0, horizon).expect("every algorithm ran");
        let s = &cell.series;
        let lam = s.lambda_norm.as_ref().and_then(|l| l.last()).copied().unwrap_or(f64::NAN);
        println!(
            "{name:>6} {:>14.4} {:>14.6} {lam:>12.3}",
            s.avg_regret(horizon),
            s.max_avg_violation(horizon)
        );
    }
    Ok(())
}
