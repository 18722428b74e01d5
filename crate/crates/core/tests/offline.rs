mod common;

use std::time::Instant;

use common::{relative_gap, ReducedNra};
use constrained_oco::offline::{max_constraint, solve_comparator, solve_comparator_general, total_loss};
use constrained_oco::oracle::random_point;
use constrained_oco::problems::{generate_nra, generate_olr, generate_oqcqp, ProblemInstance, Structure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nra_reduced(problem: &ProblemInstance) -> ReducedNra {
    match &problem.structure {
        Structure::Nra(data) => ReducedNra::new(data, problem.horizon()),
        _ => unreachable!(),
    }
}

#[test]
fn nra_comparator_matches_dual_bound() {
    for seed in 1..=3 {
        let problem = generate_nra(4, 4, 300, seed).unwrap();
        let reduced = nra_reduced(&problem);
        let x = solve_comparator(&problem, 1e-9).unwrap();
        assert!(max_constraint(&problem, &x) <= 1e-7);
        let primal = reduced.objective(&x);
        let (dual, _) = reduced.solve_dual(200_000);
        assert!(dual <= primal * (1.0 + 1e-9), "dual {dual} above primal {primal}");
        assert!(relative_gap(primal, dual) <= 1e-6, "seed {seed}: primal {primal} dual {dual}");
    }
}

#[test]
fn reduced_weights_agree_with_round_losses() {
    let problem = generate_nra(3, 3, 40, 5).unwrap();
    let reduced = nra_reduced(&problem);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        let x = random_point(&problem.set, &mut rng);
        let a = total_loss(&problem, &x);
        assert!(relative_gap(a, reduced.objective(&x)) <= 1e-12);
    }
}

#[test]
fn general_route_agrees_with_reduced_route_on_short_horizon() {
    // the general route carries one copy of every constraint per round, which leaves it
    // badly conditioned; it is only a cross-check at small T and default tolerance
    let problem = generate_nra(3, 3, 6, 1).unwrap();
    let start = Instant::now();
    let fast = solve_comparator(&problem, 1e-9).unwrap();
    let slow = solve_comparator_general(&problem, 1e-7).unwrap();
    let (a, b) = (total_loss(&problem, &fast), total_loss(&problem, &slow));
    assert!(relative_gap(a, b) <= 1e-6, "{a} vs {b} after {:?}", start.elapsed());
    assert!(max_constraint(&problem, &slow) <= 1e-6);
}

// No sampled feasible point may beat the comparator.
fn assert_no_better_sample(problem: &ProblemInstance, x: &nalgebra::DVector<f64>, samples: usize) {
    let best = total_loss(problem, x);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut feasible = 0;
    for _ in 0..samples {
        let y = random_point(&problem.set, &mut rng);
        // pull samples towards the comparator so many land in the feasible region
        for w in [0.3, 0.03, 3e-3, 3e-4] {
            let z = x + (&y - x) * w;
            if max_constraint(problem, &z) <= 0.0 {
                feasible += 1;
                let loss = total_loss(problem, &z);
                assert!(loss >= best - 1e-7 * (1.0 + best.abs()), "{loss} < {best}");
            }
        }
    }
    assert!(feasible > samples / 4, "only {feasible} feasible samples");
}

#[test]
fn oqcqp_comparator_is_feasible_and_unbeaten() {
    for seed in [1, 4] {
        let problem = generate_oqcqp(6, 3, 5.0, 200, seed).unwrap();
        let x = solve_comparator(&problem, 1e-9).unwrap();
        assert!(max_constraint(&problem, &x) <= 1e-7);
        assert!(problem.set.contains(&x, 1e-12));
        assert_no_better_sample(&problem, &x, 200);
    }
}

#[test]
fn olr_comparator_is_feasible_and_unbeaten() {
    let problem = generate_olr(4, 6, 100, 10.0, 3).unwrap();
    let x = solve_comparator(&problem, 1e-9).unwrap();
    assert!(max_constraint(&problem, &x) <= 1e-7);
    assert!(problem.set.contains(&x, 1e-12));
    assert_no_better_sample(&problem, &x, 200);
}
