//! Compare the largest multiplier MALM produces with the uniform bound psi.

use constrained_oco::malm::{run_malm, MalmConfig};
use constrained_oco::metrics::Kappas;
use constrained_oco::models::ModelKind;
use constrained_oco::problems::generate_oqcqp;

fn main() -> constrained_oco::Result<()> {
    let horizon = 1000;
    for tau in [0, 10] {
        let problem = generate_oqcqp(8, 3, 10.0, horizon, 3)?;
        let cfg = MalmConfig::theorem(horizon, tau, ModelKind::Linearized);
        let trajectory = run_malm(&problem, &cfg)?;
        let largest = trajectory
            .multiplier_norms()
            .expect("MALM tracks multipliers")
            .into_iter()
            .fold(0.0, f64::max);
        let kappas = Kappas::new(&problem.constants, cfg.model)?;
        let (s, psi) = kappas.min_psi(cfg.sigma, cfg.alpha, tau, horizon);
        println!("tau {tau:>3}: max |lambda| = {largest:.4}, psi = {psi:.3e} at s = {s}");
    }
    Ok(())
}
