//! Layer design without background risk.
//!
//! With the premium `pi` fixed, the best incentive-compatible contract
//! retains everything up to `eta = w0 - pi - xi` and cedes the layer up to
//! the largest `q` whose price matches the budget; the reaching
//! probability is `F_X(q)`. Optimizing the premium reduces to minimizing
//! the convex `psi`, whose derivative changes sign at
//! `g(S_X(w0 - pi - xi)) = 1/(1+loading)` — which is why the optimal
//! attachment point never moves with the goal level.

use super::{
    psi, psi_derivative, LayerContract, ReinsuranceProblem, ReinsuranceSolution,
    ReinsuranceSolver, SolutionCase,
};
use crate::error::{Error, Result};
use crate::numeric::{inf_true, largest_root_scan, root_increasing, SolverConfig};

pub struct NoBackgroundSolver {
    cfg: SolverConfig,
}

impl NoBackgroundSolver {
    pub fn new(cfg: SolverConfig) -> Self {
        Self { cfg }
    }
}

impl Default for NoBackgroundSolver {
    fn default() -> Self {
        Self::new(SolverConfig::default())
    }
}

const OP: &str = "solve_no_background";

impl ReinsuranceSolver for NoBackgroundSolver {
    fn mode(&self) -> &'static str {
        "none"
    }

    fn solve(&self, p: &ReinsuranceProblem) -> Result<ReinsuranceSolution> {
        p.validate_base(OP)?;
        let m = p.loss_cap();
        let full_premium = p.pricing.premium(&p.loss)?;
        // Nontrivial-problem assumption: w0 - min{premium(X), M} < xi < w0.
        if !(p.xi < p.w0) {
            return Err(Error::precondition(
                OP,
                format!(
                    "goal {} must lie below initial wealth {}; otherwise every contract \
                     has value 0",
                    p.xi, p.w0
                ),
            ));
        }
        if !(p.w0 - full_premium.min(m) < p.xi) {
            return Err(Error::precondition(
                OP,
                format!(
                    "goal {} must exceed w0 - min(premium(X), M) = {}; otherwise full \
                     reinsurance reaches it trivially",
                    p.xi,
                    p.w0 - full_premium.min(m)
                ),
            ));
        }
        let budget = p.w0 - p.xi;
        let loaded = 1.0 + p.pricing.loading();

        // Premium minimizing psi: clamp the sign change of psi' to the
        // feasible range. psi' is nondecreasing; flat stretches resolve to
        // the leftmost sign change.
        let pi_star = if psi_derivative(p, 0.0) >= 0.0 {
            0.0
        } else if psi_derivative(p, budget) < 0.0 {
            budget
        } else {
            inf_true(
                |pi| psi_derivative(p, pi) >= 0.0,
                0.0,
                budget,
                self.cfg.root_tol,
            )
        };

        if psi(p, pi_star)? <= 0.0 {
            // Goal-certain branch: cheapest premium with psi <= 0 (psi is
            // decreasing left of its minimizer), then the stop-loss level
            // matching the retained budget.
            let pi_hat = inf_true(
                |pi| psi(p, pi).expect("pi within the feasible range") <= 0.0,
                0.0,
                pi_star,
                self.cfg.root_tol,
            );
            let retained_budget = p.pricing.expected_g(&p.loss)? - pi_hat / loaded;
            let t_hat = root_increasing(
                OP,
                |t| {
                    p.pricing
                        .layer_g_expectation(&p.loss, 0.0, t)
                        .expect("layer within support") -
                        retained_budget
                },
                0.0,
                m,
                self.cfg.root_tol,
            )?;
            let contract = LayerContract::new(t_hat, m)?;
            return Ok(ReinsuranceSolution {
                contract,
                premium: pi_hat,
                value: 1.0,
                case: SolutionCase::GoalCertain,
            });
        }

        // Interior branch: retain up to eta, cede the widest layer the
        // premium can buy.
        let eta = p.w0 - pi_star - p.xi;
        let target = pi_star / loaded;
        let q_star = largest_root_scan(
            OP,
            |q| {
                p.pricing
                    .layer_g_expectation(&p.loss, eta, q)
                    .expect("layer within support") -
                    target
            },
            eta,
            m,
            1000,
            self.cfg.root_tol,
        )?;
        let contract = LayerContract::new(eta, q_star)?;
        let case = if contract.is_null() {
            SolutionCase::NoReinsurance
        } else {
            SolutionCase::Interior
        };
        Ok(ReinsuranceSolution {
            contract,
            premium: pi_star,
            value: p.loss.cdf(q_star),
            case,
        })
    }
}
