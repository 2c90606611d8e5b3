//! Distortion premium principle and layer-premium integrals.
//!
//! A distortion function `g` reweights the survival function of a
//! nonnegative risk; the premium adds a proportional safety loading:
//!
//! ```text
//! premium(Z) = (1 + loading) * integral_0^inf g(S_Z(z)) dz
//! ```
//!
//! The layer expectation `integral_a^b g(S_X(t)) dt` prices ceded layers,
//! and `z0` is the largest retention level at which the loaded marginal
//! price of cover still reaches 1 — the universal optimal attachment point
//! of the layer solvers.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, sup_true};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A distortion function: increasing on [0, 1] with `g(0) = 0`, `g(1) = 1`.
pub trait Distortion: Send + Sync {
    fn g(&self, s: f64) -> f64;

    /// Continuity plus strict monotonicity, required by the comonotone
    /// reinsurance solver.
    fn is_strictly_increasing(&self) -> bool;
}

pub type DynDistortion = Arc<dyn Distortion>;

/// Power distortion `g(s) = s^theta`; concave (hence a coherent-pricing
/// distortion) exactly when `theta <= 1`. `theta = 1` recovers the
/// expected-value premium principle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDistortion {
    theta: f64,
}

impl PowerDistortion {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "power distortion",
                reason: format!("requires theta > 0, got {theta}"),
            });
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_concave(&self) -> bool {
        self.theta <= 1.0
    }
}

impl Distortion for PowerDistortion {
    fn g(&self, s: f64) -> f64 {
        s.clamp(0.0, 1.0).powf(self.theta)
    }

    fn is_strictly_increasing(&self) -> bool {
        true
    }
}

/// A distortion function together with a safety loading; prices
/// nonnegative risks and layers thereof.
#[derive(Clone)]
pub struct DistortionPricing {
    g: DynDistortion,
    loading: f64,
    quad_tol: f64,
}

impl DistortionPricing {
    pub fn new(g: DynDistortion, loading: f64) -> Result<Self> {
        if !(loading >= 0.0) || !loading.is_finite() {
            return Err(Error::InvalidParameter {
                name: "loading",
                reason: format!("requires loading >= 0, got {loading}"),
            });
        }
        // Enforce the distortion-function invariants on a dense grid.
        if g.g(0.0).abs() > 1e-12 || (g.g(1.0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "distortion",
                reason: "g must satisfy g(0) = 0 and g(1) = 1".into(),
            });
        }
        let mut prev = 0.0;
        for i in 1..=200 {
            let s = i as f64 / 200.0;
            let v = g.g(s);
            if v < prev - 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "distortion",
                    reason: format!("g is not monotone near s = {s}"),
                });
            }
            prev = v;
        }
        Ok(Self {
            g,
            loading,
            quad_tol: 1e-9,
        })
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn distortion(&self) -> &DynDistortion {
        &self.g
    }

    pub fn g(&self, s: f64) -> f64 {
        self.g.g(s)
    }

    /// Distorted premium `(1 + loading) * integral_0^hi g(S_Z(z)) dz` of a
    /// nonnegative risk with bounded support.
    pub fn premium(&self, risk: &dyn Distribution) -> Result<f64> {
        let (lo, hi) = risk.support();
        if lo < 0.0 {
            return Err(Error::domain(
                "premium",
                format!("risk must be nonnegative, support starts at {lo}"),
            ));
        }
        if !hi.is_finite() {
            return Err(Error::domain(
                "premium",
                "risk must have finite upper support",
            ));
        }
        Ok((1.0 + self.loading) * self.layer_g_expectation(risk, 0.0, hi)?)
    }

    /// `integral_a^b g(S_X(t)) dt`, the undistorted-loading price of the
    /// ceded layer between `a` and `b`. The layer premium is
    /// `(1 + loading)` times this value.
    pub fn layer_g_expectation(&self, x: &dyn Distribution, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::domain(
                "layer_g_expectation",
                format!("attachment {a} exceeds detachment {b}"),
            ));
        }
        let hi = x.support().1;
        if a < 0.0 || b > hi + 1e-12 {
            return Err(Error::domain(
                "layer_g_expectation",
                format!("layer [{a}, {b}] outside the risk support [0, {hi}]"),
            ));
        }
        Ok(adaptive_simpson(
            |t| self.g.g(x.survival(t)),
            a,
            b.min(hi),
            self.quad_tol,
        ))
    }

    /// `E^g[X] = integral_0^hi g(S_X(t)) dt` (no loading).
    pub fn expected_g(&self, x: &dyn Distribution) -> Result<f64> {
        let hi = x.support().1;
        self.layer_g_expectation(x, 0.0, hi)
    }

    /// Critical retention level: the largest `z` in `[0, M]` with
    /// `(1 + loading) * g(S_X(z)) >= 1`, or 0 when even full retention of
    /// the first unit prices below par. The map is nonincreasing, so the
    /// boundary is found by bisection to 1e-10; on flat stretches the
    /// bisection lands on the rightmost point still satisfying the
    /// inequality.
    pub fn z0(&self, x: &dyn Distribution) -> f64 {
        let m = x.support().1;
        let loaded = 1.0 + self.loading;
        let pred = |z: f64| loaded * self.g.g(x.survival(z)) >= 1.0;
        if !pred(0.0) {
            return 0.0;
        }
        sup_true(pred, 0.0, m, 1e-10).clamp(0.0, m)
    }
}

/// Builds a distortion function from a parameter map.
pub type DistortionBuilderFn = fn(&Map<String, Value>) -> Result<DynDistortion>;

/// Name-keyed registry of distortion families (only `power` is built in;
/// the expected-value principle is `power` with `theta = 1`).
pub struct DistortionRegistry {
    builders: BTreeMap<&'static str, DistortionBuilderFn>,
}

impl DistortionRegistry {
    pub fn builtin() -> Self {
        let mut reg = Self {
            builders: BTreeMap::new(),
        };
        reg.register("power", build_power);
        reg
    }

    pub fn register(&mut self, name: &'static str, builder: DistortionBuilderFn) {
        self.builders.insert(name, builder);
    }

    pub fn build(&self, family: &str, params: &Map<String, Value>) -> Result<DynDistortion> {
        match self.builders.get(family) {
            Some(builder) => builder(params),
            None => Err(Error::Unknown {
                kind: "distortion family",
                name: family.to_string(),
                known: self.builders.keys().copied().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

impl Default for DistortionRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

fn build_power(params: &Map<String, Value>) -> Result<DynDistortion> {
    let theta = match params.get("theta") {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("parameter `theta` must be a number, got {v}")))?,
        None => return Err(Error::Config("power distortion: missing `theta`".into())),
    };
    Ok(Arc::new(PowerDistortion::new(theta)?))
}

/// Square-root distortion with the given loading, the benchmark pricing
/// rule used throughout the numerical tables.
pub fn sqrt_pricing(loading: f64) -> DistortionPricing {
    DistortionPricing::new(Arc::new(PowerDistortion::new(0.5).unwrap()), loading)
        .expect("valid benchmark pricing")
}
