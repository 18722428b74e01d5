//! Sweep the horizon and write per-round metrics to a CSV file, then read it back.
//!
//! Usage: `cargo run --release --example sweep_to_csv -- [path]` (default `sweep.csv`).

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use constrained_oco::harness::{read_csv, run_to_output, sweep, ExperimentConfig, SweepAxis};

fn main() -> constrained_oco::Result<()> {
    let path = std::env::args().nth(1).map_or_else(|| PathBuf::from("sweep.csv"), PathBuf::from);
    let mut cfg = ExperimentConfig::preset("smoke")?;
    cfg.seeds = vec![1, 2, 3];
    cfg.output = Some(path.clone());

    let result = sweep(&cfg, SweepAxis::Horizon, &[250, 1000])?;
    run_to_output(&cfg, &result)?;

    let parsed = read_csv(BufReader::new(File::open(&path)?))?;
    println!("wrote {} cells to {}", parsed.len(), path.display());
    for (key, series) in parsed.iter().filter(|(k, _)| k.algo == "malm") {
        let t = series.horizon();
        println!(
            "T {:>5} seed {}: avg regret {:>9.4}, max avg violation {:>9.4}",
            key.horizon.unwrap_or(t),
            key.seed,
            series.avg_regret(t),
            series.max_avg_violation(t)
        );
    }
    Ok(())
}
