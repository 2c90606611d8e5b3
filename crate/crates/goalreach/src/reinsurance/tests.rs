use super::*;
use crate::dist::{Empirical, TruncatedNormal, TruncatedShiftedPareto};
use crate::distortion::sqrt_pricing;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// The benchmark configuration: w0 = 20, 10% loading, sqrt distortion,
/// truncated-shifted Pareto(10, 3, 10) loss, truncated standard normal
/// background on [-5, 5].
fn benchmark(xi: f64) -> ReinsuranceProblem {
    ReinsuranceProblem {
        w0: 20.0,
        xi,
        pricing: sqrt_pricing(0.1),
        loss: Arc::new(TruncatedShiftedPareto::new(10.0, 3.0, 10.0).unwrap()),
        background: Some(Arc::new(TruncatedNormal::new(-5.0, 5.0).unwrap())),
    }
}

#[test]
fn contract_shape() {
    let c = LayerContract::new(1.0, 3.0).unwrap();
    assert_eq!(c.ceded(0.5), 0.0);
    assert_eq!(c.ceded(2.0), 1.0);
    assert_eq!(c.ceded(7.0), 2.0);
    assert_eq!(c.retained(7.0), 5.0);
    assert!(LayerContract::new(3.0, 1.0).is_err());
    assert!(LayerContract::new(-1.0, 1.0).is_err());
}

#[test]
fn psi_positive_at_budget_edge() {
    let p = benchmark(17.0);
    // At pi = w0 - xi the retained interval is empty.
    let edge = psi(&p, 3.0).unwrap();
    let eg = p.pricing.expected_g(&p.loss).unwrap();
    assert!((edge - (eg - 3.0 / 1.1)).abs() < 1e-9);
    assert!(edge > 0.0);
    assert!(psi(&p, 3.1).is_err());
    assert!(psi(&p, -0.1).is_err());
}

/// Proof identity at the benchmark: psi(pi*) equals the price of the
/// retained tail above q*.
#[test]
fn psi_equals_tail_price_at_optimum() {
    let p = benchmark(17.0);
    let at_opt = psi(&p, 2.4356).unwrap();
    let tail = p
        .pricing
        .layer_g_expectation(&p.loss, 3.6608, 10.0)
        .unwrap();
    assert!((at_opt - tail).abs() < 2e-3, "{at_opt} vs {tail}");
}

#[test]
fn psi_midpoint_convexity() {
    let p = benchmark(17.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.0..3.0);
        let b: f64 = rng.gen_range(0.0..3.0);
        let mid = psi(&p, 0.5 * (a + b)).unwrap();
        let avg = 0.5 * (psi(&p, a).unwrap() + psi(&p, b).unwrap());
        assert!(mid <= avg + 1e-9, "convexity fails at ({a}, {b})");
    }
}

#[test]
fn no_background_matches_benchmark_rows() {
    let solver = NoBackgroundSolver::default();
    let sol = solver.solve(&benchmark(17.0)).unwrap();
    assert_eq!(sol.case, SolutionCase::Interior);
    assert!((sol.premium - 2.4356).abs() < 2e-3, "premium {}", sol.premium);
    assert!((sol.value - 0.6946).abs() < 2e-3, "value {}", sol.value);
    assert!((sol.contract.attachment - 0.5644).abs() < 2e-3);
    assert!((sol.contract.detachment - 3.6608).abs() < 2e-3);

    let sol = solver.solve(&benchmark(19.0)).unwrap();
    assert!((sol.premium - 0.4356).abs() < 2e-3);
    assert!((sol.contract.detachment - 1.0165).abs() < 2e-3);
    assert!((sol.value - 0.2881).abs() < 2e-3);
}

/// The attachment never moves with the goal: eta* and pi* + xi stay fixed.
#[test]
fn no_background_attachment_invariance() {
    let solver = NoBackgroundSolver::default();
    let mut first: Option<(f64, f64)> = None;
    for &xi in &[15.0, 16.0, 17.0, 18.0] {
        let sol = solver.solve(&benchmark(xi)).unwrap();
        let key = (sol.contract.attachment, sol.premium + xi);
        match first {
            None => first = Some(key),
            Some((eta, pix)) => {
                assert!((sol.contract.attachment - eta).abs() < 1e-6);
                assert!((sol.premium + xi - pix).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn no_background_rejects_trivial_goals() {
    let solver = NoBackgroundSolver::default();
    assert!(solver.solve(&benchmark(20.0)).is_err());
    assert!(solver.solve(&benchmark(14.0)).is_err());
}

#[test]
fn k_objective_examples() {
    let p = benchmark(17.0);
    // Empty layer at the origin.
    let k = k_objective(&p, 0.0, 0.0).unwrap();
    let f0 = p.background.clone().unwrap();
    assert!((k - f0.cdf(3.0)).abs() < 1e-12);

    // Benchmark optimum: value 0.3577 = K - 1.
    let k = k_objective(&p, 0.5644, 2.0197).unwrap();
    assert!((k - 1.3577).abs() < 3e-3, "K = {k}");

    assert!(k_objective(&p, 2.0, 1.0).is_err());
}

/// The attachment rule z* = min{y, z0}: no z beats it for sampled (z, y).
#[test]
fn k_attachment_rule_dominates() {
    let p = benchmark(17.0);
    let z0 = p.pricing.z0(&p.loss);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let y: f64 = rng.gen_range(0.0..10.0);
        let best = k_objective(&p, y.min(z0), y).unwrap();
        for _ in 0..10 {
            let z: f64 = rng.gen_range(0.0..=y);
            assert!(
                k_objective(&p, z, y).unwrap() <= best + 1e-9,
                "z = {z}, y = {y}"
            );
        }
    }
}

#[test]
fn worst_case_matches_benchmark_rows() {
    let solver = WorstCaseSolver::default();
    let sol = solver.solve(&benchmark(17.0)).unwrap();
    assert_eq!(sol.case, SolutionCase::Interior);
    assert!((sol.premium - 1.2945).abs() < 3e-3, "premium {}", sol.premium);
    assert!((sol.value - 0.3577).abs() < 3e-3, "value {}", sol.value);
    assert!((sol.contract.attachment - 0.5644).abs() < 3e-3);
    assert!((sol.contract.detachment - 2.0197).abs() < 3e-3);

    let sol = solver.solve(&benchmark(18.5)).unwrap();
    assert_eq!(sol.case, SolutionCase::Indifferent);
    assert_eq!(sol.value, 0.0);
}

#[test]
fn comonotone_matches_benchmark_rows() {
    let solver = ComonotoneSolver::default();
    let sol = solver.solve(&benchmark(15.0)).unwrap();
    assert_eq!(sol.case, SolutionCase::Interior);
    assert!((sol.premium - 3.4372).abs() < 3e-3, "premium {}", sol.premium);
    assert!((sol.value - 0.8410).abs() < 3e-3, "value {}", sol.value);
    assert!((sol.contract.detachment - 5.5853).abs() < 3e-3);

    let sol = solver.solve(&benchmark(19.0)).unwrap();
    assert!((sol.premium - 0.7701).abs() < 3e-3);
    assert!((sol.contract.detachment - 1.3879).abs() < 3e-3);
    assert!((sol.value - 0.3690).abs() < 3e-3);
}

/// A constant-zero background function reduces the comonotone problem to
/// a deterministic one, which the no-background solver also covers once
/// its premium is forced to zero loading on Y; the two detachments then
/// obey the same wealth identity.
#[test]
fn comonotone_constant_background_consistency() {
    let mut p = benchmark(17.0);
    p.background = Some(Arc::new(Empirical::new(&[0.0]).unwrap()));
    let sol = ComonotoneSolver::default().solve(&p).unwrap();
    // With h = 0 the interior identity is z0 + (1+loading)*layer(z0, b) = w0 - xi,
    // the same equation the no-background solver solves for q* at pi* =
    // w0 - xi - z0. Check against it directly.
    let nb = NoBackgroundSolver::default().solve(&benchmark(17.0)).unwrap();
    assert!((sol.contract.attachment - nb.contract.attachment).abs() < 1e-4);
    assert!((sol.contract.detachment - nb.contract.detachment).abs() < 1e-4);
    assert!((sol.value - nb.value).abs() < 1e-4);
}

#[test]
fn comonotone_rejects_two_point_background() {
    let mut p = benchmark(17.0);
    p.background = Some(Arc::new(Empirical::new(&[0.0, 1.0]).unwrap()));
    assert!(ComonotoneSolver::default().solve(&p).is_err());
}

#[test]
fn evaluators_reproduce_solver_values() {
    let p = benchmark(17.0);
    let robust = WorstCaseSolver::default().solve(&p).unwrap();
    let again = evaluate_worst_case(&p, &robust.contract).unwrap();
    assert!((again - robust.value).abs() < 1e-6, "{again} vs {}", robust.value);

    let nominal = ComonotoneSolver::default().solve(&p).unwrap();
    let again = evaluate_comonotone(&p, &nominal.contract).unwrap();
    assert!((again - nominal.value).abs() < 1e-6);
}

#[test]
fn evaluate_comonotone_null_contract_with_flat_background() {
    let mut p = benchmark(17.0);
    p.background = Some(Arc::new(Empirical::new(&[0.0]).unwrap()));
    // No reinsurance, h = 0: P(X <= w0 - xi) directly, up to the
    // evaluator's plateau slack.
    let v = evaluate_comonotone(&p, &LayerContract::null()).unwrap();
    assert!((v - p.loss.cdf(3.0)).abs() < 1e-7);
}

#[test]
fn evaluate_worst_case_requires_continuous_background() {
    let mut p = benchmark(17.0);
    p.background = Some(Arc::new(Empirical::new(&[0.0]).unwrap()));
    assert!(evaluate_worst_case(&p, &LayerContract::null()).is_err());
}

/// Each solver is optimal in its own scenario: at every goal level of the
/// benchmark grid, 200 random layers never beat the solved contract. On
/// the indifferent rows the classification's own claim is checked
/// instead: no contract improves by more than the indifference threshold.
#[test]
fn solver_optimality_against_random_layers() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for i in 0..9 {
        let xi = 15.0 + 0.5 * i as f64;
        let p = benchmark(xi);
        let robust = WorstCaseSolver::default().solve(&p).unwrap();
        let nominal = ComonotoneSolver::default().solve(&p).unwrap();
        for _ in 0..200 {
            let a: f64 = rng.gen_range(0.0..10.0);
            let b: f64 = rng.gen_range(a..=10.0);
            let c = LayerContract::new(a, b).unwrap();
            let w = evaluate_worst_case(&p, &c).unwrap();
            if robust.case == SolutionCase::Indifferent {
                assert!(w <= 1e-3, "xi={xi}: ({a}, {b}) exceeds the indifference threshold");
            } else {
                assert!(w <= robust.value + 1e-6, "xi={xi}: worst-case beaten by ({a}, {b})");
            }
            let v = evaluate_comonotone(&p, &c).unwrap();
            assert!(v <= nominal.value + 1e-6, "xi={xi}: nominal beaten by ({a}, {b})");
        }
    }
}

/// The interior comonotone solution satisfies the wealth identity
/// L(z0, b*) = w0 - xi to 1e-8.
#[test]
fn comonotone_wealth_identity_binds() {
    for &xi in &[15.0, 17.0, 19.0] {
        let p = benchmark(xi);
        let sol = ComonotoneSolver::default().solve(&p).unwrap();
        assert_eq!(sol.case, SolutionCase::Interior);
        let map = ComonotoneMap::new(p.loss.clone(), p.background.clone().unwrap()).unwrap();
        let layer = p
            .pricing
            .layer_g_expectation(&p.loss, sol.contract.attachment, sol.contract.detachment)
            .unwrap();
        let big_l = map.h(sol.contract.detachment) + sol.contract.attachment + 1.1 * layer;
        assert!(
            (big_l - (p.w0 - p.xi)).abs() <= 1e-8,
            "xi={xi}: residual {}",
            big_l - (p.w0 - p.xi)
        );
    }
}

#[test]
fn registry_modes() {
    let reg = SolverRegistry::builtin();
    for mode in ["none", "robust", "nominal"] {
        assert_eq!(reg.get(mode).unwrap().mode(), mode);
    }
    assert!(reg.get("bayesian").is_err());
}
