//! Build a problem by hand from closures and run MALM and CL on it.
//!
//! The learner tracks a point circling (1.2, 0.8), while a rotating half-plane keeps it
//! from following the target all the way round.

use std::f64::consts::PI;
use std::sync::Arc;

use constrained_oco::harness::{run_cell, Algorithm};
use constrained_oco::baselines::{BaselineConfig, BaselineKind};
use constrained_oco::malm::MalmConfig;
use constrained_oco::models::ModelKind;
use constrained_oco::offline::{max_constraint, solve_comparator};
use constrained_oco::oracle::{FnOracle, ProblemConstants, SharedOracle};
use constrained_oco::problems::ProblemInstance;
use constrained_oco::sets::FeasibleSet;
use nalgebra::{dvector, DVector};

fn main() -> constrained_oco::Result<()> {
    let horizon = 200;
    let set = FeasibleSet::new_box(DVector::from_element(2, -2.0), DVector::from_element(2, 2.0))?;
    let rounds: Vec<SharedOracle> = (0..horizon)
        .map(|t| {
            let phase = 2.0 * PI * t as f64 / 50.0;
            let target = dvector![1.2 + 0.5 * phase.cos(), 0.8 + 0.5 * phase.sin()];
            let (t2, a) = (target.clone(), dvector![(0.3 * phase).cos(), (0.3 * phase).sin()]);
            let a2 = a.clone();
            let a3 = a.clone();
            let oracle = FnOracle::new(
                t,
                2,
                1,
                move |x| (x - &target).norm_squared(),
                move |x| (x - &t2) * 2.0,
                move |x| dvector![a2.dot(x) - 1.0],
                move |_, _| a3.clone(),
            )
            .affine_constraints(true)
            .with_strong_convexity(2.0);
            Arc::new(oracle) as SharedOracle
        })
        .collect();

    // |a| = 1, so g stays within 2 sqrt 2 + 1 of zero on the box and g(0) = -1
    let reach = 2.0 * 2f64.sqrt();
    let constants = ProblemConstants {
        diameter: set.diameter(),
        kappa_f: 2.0 * (reach + 2.2),
        kappa_g: 1.0,
        nu_g_plain: reach + 1.0,
        nu_g_linearized: reach + 1.0,
        eps0: 1.0,
        slater_point: DVector::zeros(2),
    };
    let problem = ProblemInstance::custom(set, rounds, constants)?;

    let x_star = solve_comparator(&problem, 1e-8)?;
    println!(
        "best fixed decision ({:.4}, {:.4}), worst constraint {:.2e}",
        x_star[0],
        x_star[1],
        max_constraint(&problem, &x_star)
    );

    let algos = [
        Algorithm::Malm(MalmConfig::theorem(horizon, 0, ModelKind::Linearized)),
        Algorithm::Baseline(BaselineConfig::published(BaselineKind::Cl, horizon, 0)?),
    ];
    for algo in &algos {
        let cell = run_cell(&problem, algo, horizon, &x_star)?;
        let s = &cell.series;
        println!(
            "{:>5}: regret {:>9.3}  avg violation {:>8.4}",
            cell.algo,
            s.final_regret(),
            s.max_avg_violation(horizon)
        );
    }
    Ok(())
}
