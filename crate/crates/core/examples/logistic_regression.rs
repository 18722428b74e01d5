//! Online logistic regression under a time-varying l1 budget.
//!
//! MALM uses the linearized model, whose single-constraint subproblem has a closed form.

use constrained_oco::harness::{run_experiment, ExperimentConfig};
use constrained_oco::problems::{generate_olr, Structure};

fn main() -> constrained_oco::Result<()> {
    let horizon = 2000;
    let problem = generate_olr(5, 10, horizon, 10.0, 7)?;
    if let Structure::Olr(data) = &problem.structure {
        println!(
            "{} rounds of {} samples in dimension {}, tightest budget {:.3}",
            horizon,
            data.features[0].len(),
            data.dim,
            data.min_threshold()
        );
    }

    let mut cfg = ExperimentConfig::preset("olr-paper")?;
    cfg.horizons = vec![horizon];
    cfg.seeds = vec![7];
    let result = run_experiment(&cfg)?;
    for cell in &result.cells {
        let s = &cell.series;
        println!(
            "{:>4}: avg loss gap {:>9.5}  max avg violation {:>9.5}",
            cell.algo,
            s.avg_regret(horizon),
            s.max_avg_violation(horizon)
        );
    }
    Ok(())
}
