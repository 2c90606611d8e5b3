//! Robust goal-reaching portfolio selection.
//!
//! An investor with initial capital `x0` buys a nonnegative payoff `X`
//! priced by a pricing kernel `rho` (budget `E[rho X] <= x0`) and wants to
//! maximize, over the worst dependence between `X` and a background risk
//! `Y ~ F0`, the probability that `X - Y` reaches the goal `xi`. The
//! quantile formulation collapses the payoff search to a two-parameter
//! family of digital payoffs, leaving one scalar maximization:
//!
//! ```text
//! r* = argmax_{r in [0,1)}  F1( x0 / capital_cost(r) ) - r ,
//! ```
//!
//! with `F1 = F0 shifted by xi` and
//! `capital_cost(r) = integral_r^1 F_rho^{-1}(1-s) ds`. The optimal payoff
//! pays `kappa* = x0 / capital_cost(r*)` exactly when
//! `rho <= F_rho^{-1}(1 - r*)` and zero otherwise.

use crate::dist::{shift, Distribution, DynDist};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, grid_refine_max, SolverConfig};
use serde::Serialize;

/// Grid cap below 1: the objective tends below 0 as `r -> 1`, so the
/// maximizer is interior; the cap only truncates a vanishing tail.
const R_CAP: f64 = 1.0 - 1e-6;

/// Problem data for the robust goal-reaching investor.
#[derive(Clone)]
pub struct PortfolioProblem {
    /// Initial wealth, strictly positive.
    pub x0: f64,
    /// Goal level of wealth, strictly positive.
    pub xi: f64,
    /// Pricing kernel law; must be atomless.
    pub pricing_kernel: DynDist,
    /// Background risk law; must be continuous.
    pub background: DynDist,
}

impl PortfolioProblem {
    fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0) || !self.x0.is_finite() {
            return Err(Error::precondition(
                "solve_goal_reaching",
                format!("initial wealth must be positive, got {}", self.x0),
            ));
        }
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(Error::precondition(
                "solve_goal_reaching",
                format!("goal level must be positive, got {}", self.xi),
            ));
        }
        if !self.pricing_kernel.is_continuous() {
            return Err(Error::precondition(
                "solve_goal_reaching",
                "pricing kernel must be atomless",
            ));
        }
        if !self.background.is_continuous() {
            return Err(Error::precondition(
                "solve_goal_reaching",
                "background risk distribution must be continuous",
            ));
        }
        Ok(())
    }
}

/// The digital optimal payoff.
#[derive(Debug, Clone, Serialize)]
pub struct PortfolioSolution {
    /// Losing-event probability mass sacrificed at the optimum.
    pub r_star: f64,
    /// Payment on the winning event; the budget binds at
    /// `kappa_star * capital_cost(r_star) = x0`.
    pub kappa_star: f64,
    /// Winning-event threshold `F_rho^{-1}(1 - r_star)`; infinite when
    /// `r_star = 0` and the kernel is unbounded.
    #[serde(serialize_with = "crate::report::ser_ext_real")]
    pub rho_threshold: f64,
    /// Worst-case goal-reaching probability.
    pub value: f64,
}

impl PortfolioSolution {
    /// `kappa*` on the winning event `{rho <= threshold}`, zero otherwise.
    pub fn optimal_payoff(&self, rho_sample: f64) -> f64 {
        if rho_sample <= self.rho_threshold {
            self.kappa_star
        } else {
            0.0
        }
    }
}

/// `integral_r^1 F_rho^{-1}(1-s) ds`, the capital cost per unit paid on
/// the cheapest winning event of probability `1 - r`.
///
/// Computed in the substituted variable `u = 1 - s` over `[0, 1-r]`. The
/// `u -> 0` endpoint is the (finite) lower support limit. For unbounded
/// kernels the last `1e-6` of mass near `u = 1` is integrated on a log
/// scale through `upper_quantile`, which stays accurate where `1 - u` is
/// no longer representable.
pub fn capital_cost(f_rho: &dyn Distribution, r: f64) -> Result<f64> {
    capital_cost_with(f_rho, r, 1e-10)
}

pub fn capital_cost_with(f_rho: &dyn Distribution, r: f64, quad_tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(
            "capital_cost",
            format!("r must lie in [0, 1), got {r}"),
        ));
    }
    let (lo, hi) = f_rho.support();
    if lo < 0.0 {
        return Err(Error::precondition(
            "capital_cost",
            "pricing kernel must be nonnegative",
        ));
    }
    let u_hi = 1.0 - r;
    let integrand = |u: f64| {
        if u <= 0.0 {
            lo
        } else {
            f_rho.quantile(u.min(1.0))
        }
    };
    let total = if hi.is_finite() {
        adaptive_simpson(integrand, 0.0, u_hi, quad_tol)
    } else {
        const W_SPLIT: f64 = 1e-6;
        let u_split = u_hi.min(1.0 - W_SPLIT);
        let main = adaptive_simpson(integrand, 0.0, u_split, quad_tol);
        let tail = if u_hi > u_split {
            // integral of the quantile over w = 1-u in [w_lo, 1e-6],
            // log-substituted so the adaptive rule sees a smooth integrand.
            let w_lo = r.max(1e-12);
            adaptive_simpson(
                |v| {
                    let w = (-v).exp();
                    f_rho.upper_quantile(w) * w
                },
                -W_SPLIT.ln(),
                -w_lo.ln(),
                quad_tol,
            )
        } else {
            0.0
        };
        main + tail
    };
    if !total.is_finite() {
        return Err(Error::numeric(
            "capital_cost",
            format!("quantile integral diverges for r = {r}; the kernel has no finite mean"),
        ));
    }
    Ok(total)
}

/// Solve the robust goal-reaching problem: dense grid over `r` plus
/// golden-section refinement, smallest maximizer on ties.
pub fn solve_goal_reaching(p: &PortfolioProblem, cfg: &SolverConfig) -> Result<PortfolioSolution> {
    p.validate()?;
    // Shifted background: F1(z) = F0(z - xi).
    let f1 = shift(p.background.clone(), p.xi);
    // Probe the full-budget cost up front; this also rejects kernels with
    // an infinite mean.
    capital_cost_with(&p.pricing_kernel, 0.0, cfg.quad_tol)?;

    let objective = |r: f64| {
        let cost = capital_cost_with(&p.pricing_kernel, r, cfg.quad_tol)
            .expect("capital_cost on a validated kernel");
        f1.cdf(p.x0 / cost) - r
    };
    let (r_star, value) =
        grid_refine_max(objective, 0.0, R_CAP, cfg.grid_points, &[], cfg.root_tol);

    // The true maximizer is interior; a cap that beats it signals numeric
    // trouble rather than a solution.
    if objective(R_CAP) > value + 1e-12 {
        return Err(Error::numeric(
            "solve_goal_reaching",
            "objective still increasing at the r-grid cap",
        ));
    }

    let kappa_star = p.x0 / capital_cost_with(&p.pricing_kernel, r_star, cfg.quad_tol)?;
    let rho_threshold = p.pricing_kernel.quantile(1.0 - r_star);
    Ok(PortfolioSolution {
        r_star,
        kappa_star,
        rho_threshold,
        value: value.clamp(0.0, 1.0),
    })
}
