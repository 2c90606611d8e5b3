//! Layer design when the background risk moves comonotonically with the
//! loss (`Y = h(X)` for an increasing continuous `h`).
//!
//! Final wealth reaches the goal exactly on `{h(X) + R(X) <= w0 - xi -
//! premium}`, an increasing-map event, so the value of a layer `(a, b)`
//! is `F_X` at the largest point where
//! `L(a, b) = h(b) + a + (1+loading) * layer(a, b)` fits in the wealth
//! budget. The attachment pins at `z0`; the detachment solves
//! `L(z0, b) = w0 - xi`.

use super::{
    evaluate_comonotone_with_map, ComonotoneMap, LayerContract, ReinsuranceProblem,
    ReinsuranceSolution, ReinsuranceSolver, SolutionCase,
};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::{root_increasing, sup_true, SolverConfig};

pub struct ComonotoneSolver {
    cfg: SolverConfig,
}

impl ComonotoneSolver {
    pub fn new(cfg: SolverConfig) -> Self {
        Self { cfg }
    }
}

impl Default for ComonotoneSolver {
    fn default() -> Self {
        Self::new(SolverConfig::default())
    }
}

const OP: &str = "solve_comonotone";

/// `L(a, b) = h(b) + a + (1+loading) * layer(a, b)`, the wealth needed to
/// stay at the goal when the loss lands exactly at `b`.
fn big_l(p: &ReinsuranceProblem, map: &ComonotoneMap, a: f64, b: f64) -> Result<f64> {
    let layer = p.pricing.layer_g_expectation(&p.loss, a, b)?;
    Ok(map.h(b) + a + (1.0 + p.pricing.loading()) * layer)
}

impl ReinsuranceSolver for ComonotoneSolver {
    fn mode(&self) -> &'static str {
        "nominal"
    }

    fn solve(&self, p: &ReinsuranceProblem) -> Result<ReinsuranceSolution> {
        p.validate_base(OP)?;
        if !p.loss.is_continuous() {
            return Err(Error::precondition(
                OP,
                "loss distribution must be continuous and strictly increasing on [0, M]",
            ));
        }
        if !p.pricing.distortion().is_strictly_increasing() {
            return Err(Error::precondition(
                OP,
                "distortion function must be continuous and strictly increasing",
            ));
        }
        let bg = p.background_required(OP)?;
        let map = ComonotoneMap::new(p.loss.clone(), bg.clone())?;
        let m = p.loss_cap();
        // Strict monotonicity of F_X on [0, M], asserted on a grid.
        let mut prev = 0.0;
        for i in 1..=400 {
            let t = m * i as f64 / 400.0;
            let c = p.loss.cdf(t);
            if c <= prev {
                return Err(Error::precondition(
                    OP,
                    format!("loss CDF is not strictly increasing near {t}"),
                ));
            }
            prev = c;
        }

        let z0 = p.pricing.z0(&p.loss);
        let wealth = p.w0 - p.xi;

        // Trivial screen 1: even the most expensive state fits the budget
        // under the full layer above z0 — the goal is certain.
        if big_l(p, &map, z0, m)? <= wealth {
            let contract = LayerContract::new(z0, m)?;
            let premium = contract.premium(p)?;
            return Ok(ReinsuranceSolution {
                contract,
                premium,
                value: 1.0,
                case: SolutionCase::GoalCertain,
            });
        }
        // Trivial screen 2: already the best state misses the budget.
        if wealth < map.h(0.0) {
            return Ok(ReinsuranceSolution {
                contract: LayerContract::null(),
                premium: 0.0,
                value: 0.0,
                case: SolutionCase::Indifferent,
            });
        }

        if map.h(z0) + z0 >= wealth {
            // No reinsurance: the value is F_X at the largest point the
            // uninsured wealth identity still holds.
            let xbar = sup_true(|t| map.h(t) + t <= wealth, 0.0, m, self.cfg.root_tol);
            let contract = LayerContract::null();
            return Ok(ReinsuranceSolution {
                contract,
                premium: 0.0,
                value: p.loss.cdf(xbar),
                case: SolutionCase::NoReinsurance,
            });
        }

        // Interior branch: L(z0, .) is increasing, bracketed by the two
        // screens above.
        let b_star = root_increasing(
            OP,
            |b| big_l(p, &map, z0, b).expect("layer within support") - wealth,
            z0,
            m,
            self.cfg.root_tol,
        )?;
        let contract = LayerContract::new(z0, b_star)?;
        let premium = contract.premium(p)?;
        let value = p.loss.cdf(b_star);
        // Self-consistency with the generic comonotone evaluator.
        debug_assert!(
            (evaluate_comonotone_with_map(p, &contract, &map)? - value).abs() < 1e-6
        );
        Ok(ReinsuranceSolution {
            contract,
            premium,
            value,
            case: SolutionCase::Interior,
        })
    }
}
