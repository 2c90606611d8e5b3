//! Layer design at the worst-case dependence between loss and background.
//!
//! For each candidate detachment `y` the best attachment is
//! `min(y, z0)`, so the whole design problem collapses to maximizing
//! `y -> K(min(y, z0), y)` over `[0, M]`; the reaching probability of the
//! induced contract is `K - 1`. A maximum of exactly 1 means the goal is
//! unreachable under the worst coupling and every feasible contract is
//! indifferent.

use super::{
    k_objective, LayerContract, ReinsuranceProblem, ReinsuranceSolution, ReinsuranceSolver,
    SolutionCase,
};
use crate::error::{Error, Result};
use crate::numeric::{grid_refine_max, SolverConfig};

pub struct WorstCaseSolver {
    cfg: SolverConfig,
}

impl WorstCaseSolver {
    pub fn new(cfg: SolverConfig) -> Self {
        Self { cfg }
    }
}

impl Default for WorstCaseSolver {
    fn default() -> Self {
        Self::new(SolverConfig::default())
    }
}

const OP: &str = "solve_with_background";

/// Optimal values of `K - 1` at or below this threshold are reported as
/// the all-contracts-indifferent case (detection runs on `K` itself to
/// avoid cancellation in the probability). The threshold sits an order of
/// magnitude below the benchmark-table resolution: when no contract can
/// improve on any other by more than this, the classification treats the
/// goal as unreachable. A background supported on a bounded interval
/// always leaves a sliver of mass that reaches the goal under every
/// coupling, so the exact optimum in the "unreachable" regime is a
/// positive value of order 1e-4 rather than 0.
const INDIFFERENT_TOL: f64 = 1e-3;

impl ReinsuranceSolver for WorstCaseSolver {
    fn mode(&self) -> &'static str {
        "robust"
    }

    fn solve(&self, p: &ReinsuranceProblem) -> Result<ReinsuranceSolution> {
        p.validate_base(OP)?;
        let f0 = p.background_required(OP)?;
        if !f0.is_continuous() {
            return Err(Error::precondition(
                OP,
                "background marginal must be continuous",
            ));
        }
        let m = p.loss_cap();
        let z0 = p.pricing.z0(&p.loss);

        let objective =
            |y: f64| k_objective(p, y.min(z0), y).expect("triangle point within bounds");
        // z0 is the kink of the objective; scan it exactly.
        let (y_star, k_star) =
            grid_refine_max(objective, 0.0, m, self.cfg.grid_points, &[z0], self.cfg.root_tol);
        let z_star = y_star.min(z0);

        if k_star - 1.0 <= INDIFFERENT_TOL {
            return Ok(ReinsuranceSolution {
                contract: LayerContract::null(),
                premium: 0.0,
                value: 0.0,
                case: SolutionCase::Indifferent,
            });
        }

        let contract = LayerContract::new(z_star, y_star)?;
        let premium = contract.premium(p)?;
        let case = if contract.is_null() {
            SolutionCase::NoReinsurance
        } else {
            SolutionCase::Interior
        };
        Ok(ReinsuranceSolution {
            contract,
            premium,
            value: k_star - 1.0,
            case,
        })
    }
}
