//! Delayed feedback on the online QCQP: regret of MALM, CZP and delayed NY as the delay grows.

use constrained_oco::harness::{sweep, ExperimentConfig, SweepAxis};

fn main() -> constrained_oco::Result<()> {
    let cfg = ExperimentConfig::preset("oqcqp-paper")?;
    let horizon = cfg.horizons[0];
    let taus = [1, 10, 20, 50, 100];
    let result = sweep(&cfg, SweepAxis::Tau, &taus)?;

    print!("{:>6}", "tau");
    for spec in &cfg.algos {
        print!(" {:>14}", spec.name);
    }
    println!();
    for tau in taus {
        print!("{tau:>6}");
        for spec in &cfg.algos {
            let cell = result.cell(&spec.name, cfg.seeds[0], tau as usize, horizon).expect("cell ran");
            print!(" {:>14.3}", cell.series.final_regret());
        }
        println!();
    }
    Ok(())
}
