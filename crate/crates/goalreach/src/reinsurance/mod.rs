//! Optimal layer-reinsurance design under a distortion premium principle.
//!
//! An insurer with wealth `w0` faces an insurable loss `X` on `[0, M]` and
//! possibly a background risk `Y`, and picks an incentive-compatible ceded
//! loss function to maximize the probability that final wealth reaches the
//! goal `xi`. In each dependence scenario the optimum is a layer
//! `I(x) = min((x - a)+, b - a)`; the scenarios differ only in how the
//! layer parameters are pinned down:
//!
//! * `none` — no background risk: premium from the convexity point of
//!   `psi`, detachment from the retained-price root.
//! * `robust` — worst-case dependence between `X` and `Y`: a scalar
//!   maximization of the triangle objective `K(min(y, z0), y)`.
//! * `nominal` — `Y` comonotone with `X`: attachment pinned at `z0`,
//!   detachment from the wealth identity `L(z0, b) = w0 - xi`.
//!
//! The solvers sit behind a common trait and are selected by mode name at
//! runtime. Cross-scenario evaluation of an arbitrary layer contract
//! ([`evaluate_worst_case`], [`evaluate_comonotone`]) supports the
//! robustness comparisons.

mod comonotone;
mod no_background;
mod worst_case;

pub use comonotone::ComonotoneSolver;
pub use no_background::NoBackgroundSolver;
pub use worst_case::WorstCaseSolver;

use crate::dist::{Distribution, DynDist};
use crate::distortion::DistortionPricing;
use crate::error::{Error, Result};
use crate::numeric::{grid_refine_max, sup_true, SolverConfig};
use serde::Serialize;
use std::collections::BTreeMap;

/// Reinsurance design problem. `background` carries the marginal law of
/// `Y`; it is ignored by the `none` solver, read as the worst-case
/// marginal by `robust`, and composed into the comonotone map
/// `h = F_Y^{-1} o F_X` by `nominal`.
#[derive(Clone)]
pub struct ReinsuranceProblem {
    pub w0: f64,
    pub xi: f64,
    pub pricing: DistortionPricing,
    /// Insurable loss `X`; support must be `[0, M]` with finite `M`.
    pub loss: DynDist,
    /// Background risk marginal, where the mode needs one.
    pub background: Option<DynDist>,
}

impl ReinsuranceProblem {
    /// Essential supremum `M` of the insurable loss.
    pub fn loss_cap(&self) -> f64 {
        self.loss.support().1
    }

    pub(crate) fn validate_base(&self, op: &'static str) -> Result<()> {
        if !self.w0.is_finite() || !self.xi.is_finite() {
            return Err(Error::precondition(op, "w0 and xi must be finite"));
        }
        let (lo, hi) = self.loss.support();
        if lo < 0.0 {
            return Err(Error::precondition(
                op,
                format!("insurable loss must be nonnegative, support starts at {lo}"),
            ));
        }
        if !hi.is_finite() {
            return Err(Error::precondition(
                op,
                "insurable loss must have a finite essential supremum",
            ));
        }
        Ok(())
    }

    pub(crate) fn background_required(&self, op: &'static str) -> Result<&DynDist> {
        self.background
            .as_ref()
            .ok_or_else(|| Error::precondition(op, "this mode needs a background risk marginal"))
    }
}

/// Stop-loss layer: cedes `min((x - attachment)+, detachment - attachment)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerContract {
    pub attachment: f64,
    pub detachment: f64,
}

impl LayerContract {
    pub fn new(attachment: f64, detachment: f64) -> Result<Self> {
        if !(0.0 <= attachment && attachment <= detachment) {
            return Err(Error::domain(
                "layer_contract",
                format!("need 0 <= attachment <= detachment, got ({attachment}, {detachment})"),
            ));
        }
        Ok(Self {
            attachment,
            detachment,
        })
    }

    /// The contract that cedes nothing.
    pub fn null() -> Self {
        Self {
            attachment: 0.0,
            detachment: 0.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.detachment - self.attachment
    }

    pub fn is_null(&self) -> bool {
        self.width() <= 1e-12
    }

    /// Ceded loss `I(x)`.
    pub fn ceded(&self, x: f64) -> f64 {
        (x - self.attachment).clamp(0.0, self.width())
    }

    /// Retained loss `R(x) = x - I(x)`.
    pub fn retained(&self, x: f64) -> f64 {
        x - self.ceded(x)
    }

    /// CDF of the retained loss `R(X)`: a layer shifts the upper branch of
    /// `F_X` left by the layer width.
    pub fn retained_cdf(&self, loss: &dyn Distribution, z: f64) -> f64 {
        if z < self.attachment {
            loss.cdf(z)
        } else {
            loss.cdf(z + self.width())
        }
    }

    /// Loaded premium of the ceded layer.
    pub fn premium(&self, p: &ReinsuranceProblem) -> Result<f64> {
        let layer = p.pricing.layer_g_expectation(
            &p.loss,
            self.attachment,
            self.detachment.min(p.loss_cap()),
        )?;
        Ok((1.0 + p.pricing.loading()) * layer)
    }
}

/// Which branch of the optimality analysis produced the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionCase {
    /// The goal is reached with probability 1 (stop-loss branch).
    GoalCertain,
    /// Interior layer with value strictly between 0 and 1.
    Interior,
    /// The goal is unreachable; every feasible contract attains value 0.
    Indifferent,
    /// Ceding nothing is optimal.
    NoReinsurance,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReinsuranceSolution {
    pub contract: LayerContract,
    pub premium: f64,
    pub value: f64,
    pub case: SolutionCase,
}

/// `psi(pi) = E^g[X] - pi/(1+loading) - integral_0^{w0-pi-xi} g(S_X)`,
/// the gap between the retained-price budget and the price of retaining
/// everything up to `eta = w0 - pi - xi`. Convex in `pi`; the goal is
/// certain iff `psi` dips to 0 somewhere on `[0, w0 - xi)`.
pub fn psi(p: &ReinsuranceProblem, pi: f64) -> Result<f64> {
    let budget = p.w0 - p.xi;
    if !(0.0..=budget).contains(&pi) {
        return Err(Error::domain(
            "psi",
            format!("premium {pi} outside the feasible range [0, {budget}]"),
        ));
    }
    let eta = (p.w0 - pi - p.xi).min(p.loss_cap());
    let eg_x = p.pricing.expected_g(&p.loss)?;
    let retained = p.pricing.layer_g_expectation(&p.loss, 0.0, eta)?;
    Ok(eg_x - pi / (1.0 + p.pricing.loading()) - retained)
}

/// Derivative of `psi`: `g(S_X(w0 - pi - xi)) - 1/(1+loading)`,
/// nondecreasing in `pi`.
pub(crate) fn psi_derivative(p: &ReinsuranceProblem, pi: f64) -> f64 {
    p.pricing.g(p.loss.survival(p.w0 - pi - p.xi)) - 1.0 / (1.0 + p.pricing.loading())
}

/// Triangle objective for the worst-case scenario:
/// `K(z, y) = F_X(y) + F0(w0 - (1+loading) * layer(z, y) - xi - z)`.
/// The reaching probability of the induced contract is `K - 1`.
pub fn k_objective(p: &ReinsuranceProblem, z: f64, y: f64) -> Result<f64> {
    if !(0.0 <= z && z <= y && y <= p.loss_cap() + 1e-12) {
        return Err(Error::domain(
            "k_objective",
            format!("need 0 <= z <= y <= M, got z={z}, y={y}"),
        ));
    }
    let f0 = p.background_required("k_objective")?;
    let layer = p.pricing.layer_g_expectation(&p.loss, z, y.min(p.loss_cap()))?;
    let wealth_left = p.w0 - (1.0 + p.pricing.loading()) * layer - p.xi - z;
    Ok(p.loss.cdf(y) + f0.cdf(wealth_left))
}

/// The comonotone coupling map `h(t) = F_Y^{-1}(F_X(t))`, produced when
/// the background risk is an increasing function of the loss.
pub struct ComonotoneMap {
    loss: DynDist,
    bg: DynDist,
    bg_lo: f64,
}

impl ComonotoneMap {
    pub fn new(loss: DynDist, bg: DynDist) -> Result<Self> {
        // h is continuous iff F_Y^{-1} has no jumps on (0, 1): true for the
        // continuous interval-supported families, and for a single point
        // mass (h constant). Multi-atom backgrounds give a genuinely
        // discontinuous h and are rejected.
        let continuous = match bg.atoms() {
            Some(atoms) => atoms.first() == atoms.last(),
            None => bg.is_continuous(),
        };
        if !continuous {
            return Err(Error::precondition(
                "comonotone_map",
                "background quantile has jumps; the comonotone map must be continuous",
            ));
        }
        let bg_lo = bg.support().0;
        let map = Self { loss, bg, bg_lo };
        // Increasing by construction; asserted on a grid anyway.
        let m = map.loss.support().1;
        let mut prev = map.h(0.0);
        for i in 1..=400 {
            let t = m * i as f64 / 400.0;
            let v = map.h(t);
            if v < prev - 1e-12 {
                return Err(Error::precondition(
                    "comonotone_map",
                    format!("map decreases near t = {t}"),
                ));
            }
            prev = v;
        }
        Ok(map)
    }

    /// `h(t)`, with the essential infimum of the background at `F_X(t) = 0`.
    pub fn h(&self, t: f64) -> f64 {
        let u = self.loss.cdf(t);
        if u <= 0.0 {
            self.bg_lo
        } else {
            self.bg.quantile(u)
        }
    }
}

/// Worst-case (over all couplings with the given background marginal)
/// goal-reaching probability of an arbitrary layer contract:
/// `max{0, sup_z (F_{R(X)}(z) - F_pi(z))}` with
/// `F_pi(z) = 1 - F0(w0 - premium - xi - z)`.
pub fn evaluate_worst_case(p: &ReinsuranceProblem, c: &LayerContract) -> Result<f64> {
    evaluate_worst_case_with(p, c, &SolverConfig::default())
}

pub fn evaluate_worst_case_with(
    p: &ReinsuranceProblem,
    c: &LayerContract,
    cfg: &SolverConfig,
) -> Result<f64> {
    let f0 = p.background_required("evaluate_worst_case")?;
    if !f0.is_continuous() {
        return Err(Error::precondition(
            "evaluate_worst_case",
            "background marginal must be continuous",
        ));
    }
    let m = p.loss_cap();
    if c.detachment > m + 1e-9 {
        return Err(Error::precondition(
            "evaluate_worst_case",
            format!("contract detaches at {} beyond the loss cap {m}", c.detachment),
        ));
    }
    let premium = c.premium(p)?;
    let diff = |z: f64| {
        let f_pi = 1.0 - f0.cdf(p.w0 - premium - p.xi - z);
        c.retained_cdf(&p.loss, z) - f_pi
    };
    // The retained CDF jumps upward at the attachment point; evaluate both
    // sides of it exactly.
    let extras = [c.attachment, c.attachment - 1e-12, m];
    let (_, sup) = grid_refine_max(diff, 0.0, m, cfg.grid_points, &extras, cfg.root_tol);
    Ok(sup.max(0.0))
}

/// Goal-reaching probability of a layer contract when the background risk
/// is comonotone with the loss: `F_X(xbar)` where `xbar` is the largest
/// point with `h(x) + R(x) <= w0 - xi - premium`, or 0 when no point
/// qualifies.
pub fn evaluate_comonotone(p: &ReinsuranceProblem, c: &LayerContract) -> Result<f64> {
    let bg = p.background_required("evaluate_comonotone")?;
    let map = ComonotoneMap::new(p.loss.clone(), bg.clone())?;
    evaluate_comonotone_with_map(p, c, &map)
}

pub(crate) fn evaluate_comonotone_with_map(
    p: &ReinsuranceProblem,
    c: &LayerContract,
    map: &ComonotoneMap,
) -> Result<f64> {
    let premium = c.premium(p)?;
    let target = p.w0 - p.xi - premium;
    let total = |t: f64| map.h(t) + c.retained(t);
    // The slack keeps plateaus of h + R that sit exactly at the target
    // (constant h, retained loss flat across the layer) from collapsing
    // the sup under premium-quadrature noise.
    let slack = 1e-8;
    if total(0.0) > target + slack {
        return Ok(0.0);
    }
    let xbar = sup_true(|t| total(t) <= target + slack, 0.0, p.loss_cap(), 1e-10);
    Ok(p.loss.cdf(xbar))
}

/// A reinsurance solver for one dependence scenario, selectable by name.
pub trait ReinsuranceSolver: Send + Sync {
    /// Registry key: `none`, `robust`, or `nominal` for the built-ins.
    fn mode(&self) -> &'static str;

    fn solve(&self, p: &ReinsuranceProblem) -> Result<ReinsuranceSolution>;
}

/// Name-keyed registry of reinsurance solvers.
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn ReinsuranceSolver>>,
}

impl SolverRegistry {
    pub fn builtin() -> Self {
        Self::builtin_with(SolverConfig::default())
    }

    pub fn builtin_with(cfg: SolverConfig) -> Self {
        let mut reg = Self {
            solvers: BTreeMap::new(),
        };
        reg.register(Box::new(NoBackgroundSolver::new(cfg)));
        reg.register(Box::new(WorstCaseSolver::new(cfg)));
        reg.register(Box::new(ComonotoneSolver::new(cfg)));
        reg
    }

    pub fn register(&mut self, solver: Box<dyn ReinsuranceSolver>) {
        self.solvers.insert(solver.mode(), solver);
    }

    pub fn get(&self, mode: &str) -> Result<&dyn ReinsuranceSolver> {
        self.solvers
            .get(mode)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "reinsurance mode",
                name: mode.to_string(),
                known: self.solvers.keys().copied().collect::<Vec<_>>().join(", "),
            })
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests;
