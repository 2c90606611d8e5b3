//! Experiment harness: the three benchmark tables and the goal / loading /
//! tail-shape sweeps behind the robustness comparisons.
//!
//! Each sweep point solves the robust (worst-case dependence) and nominal
//! (comonotone) problems and then cross-evaluates each contract in the
//! other scenario, producing the four series
//! `worst(robust) = robust.value`, `worst(nominal)`,
//! `nominal(nominal) = nominal.value`, and `nominal(robust)`. Solvers are
//! deterministic, so reports are byte-identical across runs.

use crate::dist::{TruncatedNormal, TruncatedShiftedPareto};
use crate::distortion::{DistortionPricing, PowerDistortion};
use crate::error::{Error, Result};
use crate::numeric::SolverConfig;
use crate::reinsurance::{
    evaluate_comonotone, evaluate_worst_case_with, ReinsuranceProblem, ReinsuranceSolution,
    SolutionCase, SolverRegistry,
};
use crate::report::fmt_sig;
use serde::Serialize;
use std::str::FromStr;
use std::sync::Arc;

/// The benchmark setup: `w0 = 20`, square-root distortion with 10%
/// loading, truncated-shifted Pareto(10, 3, 10) loss, and a zero-mean
/// truncated standard normal background on [-5, 5].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BenchmarkConfig {
    pub w0: f64,
    pub loading: f64,
    pub theta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub loss_cap: f64,
    pub bg_lo: f64,
    pub bg_hi: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            w0: 20.0,
            loading: 0.1,
            theta: 0.5,
            beta: 10.0,
            gamma: 3.0,
            loss_cap: 10.0,
            bg_lo: -5.0,
            bg_hi: 5.0,
        }
    }
}

impl BenchmarkConfig {
    /// Assemble the reinsurance problem at goal level `xi`.
    pub fn problem(&self, xi: f64) -> Result<ReinsuranceProblem> {
        let pricing =
            DistortionPricing::new(Arc::new(PowerDistortion::new(self.theta)?), self.loading)?;
        Ok(ReinsuranceProblem {
            w0: self.w0,
            xi,
            pricing,
            loss: Arc::new(TruncatedShiftedPareto::new(
                self.beta,
                self.gamma,
                self.loss_cap,
            )?),
            background: Some(Arc::new(TruncatedNormal::new(self.bg_lo, self.bg_hi)?)),
        })
    }

    /// The nine goal levels of the benchmark tables.
    pub fn goal_grid() -> Vec<f64> {
        (0..9).map(|i| 15.0 + 0.5 * i as f64).collect()
    }
}

/// Which benchmark table to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    /// No background risk.
    Table1,
    /// Background risk, worst-case dependence.
    Table2,
    /// Background risk, comonotone (nominal) dependence.
    Table3,
}

impl TableId {
    pub fn solver_mode(&self) -> &'static str {
        match self {
            TableId::Table1 => "none",
            TableId::Table2 => "robust",
            TableId::Table3 => "nominal",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
        }
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" | "t1" => Ok(TableId::Table1),
            "table2" | "t2" => Ok(TableId::Table2),
            "table3" | "t3" => Ok(TableId::Table3),
            other => Err(Error::Unknown {
                kind: "table",
                name: other.to_string(),
                known: "table1, table2, table3".into(),
            }),
        }
    }
}

/// One solved row of a benchmark table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub param: f64,
    pub solution: ReinsuranceSolution,
}

/// Reproduce one benchmark table over the nine goal levels.
pub fn run_table(which: TableId, cfg: &SolverConfig) -> Result<Vec<TableRow>> {
    let base = BenchmarkConfig::default();
    let registry = SolverRegistry::builtin_with(*cfg);
    let solver = registry.get(which.solver_mode())?;
    let mut rows = Vec::new();
    for xi in BenchmarkConfig::goal_grid() {
        let problem = base.problem(xi)?;
        let solution = solver
            .solve(&problem)
            .map_err(|e| Error::numeric("run_table", format!("row xi={xi} failed: {e}")))?;
        rows.push(TableRow { param: xi, solution });
    }
    Ok(rows)
}

/// Which base parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Goal level `xi`.
    Goal,
    /// Safety loading coefficient.
    Loading,
    /// Pareto shape (tail) parameter of the loss.
    Shape,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Goal => "goal",
            SweepParameter::Loading => "loading",
            SweepParameter::Shape => "shape",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goal" => Ok(SweepParameter::Goal),
            "loading" => Ok(SweepParameter::Loading),
            "shape" => Ok(SweepParameter::Shape),
            other => Err(Error::Unknown {
                kind: "sweep parameter",
                name: other.to_string(),
                known: "goal, loading, shape".into(),
            }),
        }
    }
}

/// A sweep definition: the varied parameter, its grid, the fixed goal for
/// non-goal sweeps, and the base configuration.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub xi: f64,
    pub base: BenchmarkConfig,
}

impl SweepSpec {
    /// The benchmark sweep grids: nine goals; ten loadings in
    /// {0.02, ..., 0.2}; eleven shapes in {2, 2.2, ..., 4}. The loading
    /// and shape sweeps hold the goal at 17.
    pub fn benchmark(parameter: SweepParameter) -> Self {
        let values = match parameter {
            SweepParameter::Goal => BenchmarkConfig::goal_grid(),
            SweepParameter::Loading => (1..=10).map(|i| 0.02 * i as f64).collect(),
            SweepParameter::Shape => (0..=10).map(|i| 2.0 + 0.2 * i as f64).collect(),
        };
        Self {
            parameter,
            values,
            xi: 17.0,
            base: BenchmarkConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep values must be nonempty".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "sweep values must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    fn problem_at(&self, value: f64) -> Result<ReinsuranceProblem> {
        let mut base = self.base;
        let mut xi = self.xi;
        match self.parameter {
            SweepParameter::Goal => xi = value,
            SweepParameter::Loading => base.loading = value,
            SweepParameter::Shape => base.gamma = value,
        }
        base.problem(xi)
    }
}

/// One sweep point: both solutions plus the cross-scenario evaluations.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param_value: f64,
    pub robust: ReinsuranceSolution,
    pub nominal: ReinsuranceSolution,
    /// Worst-case value of the nominal contract.
    pub worst_of_nominal: f64,
    /// Nominal (comonotone) value of the robust contract.
    pub nominal_of_robust: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
    /// Failed rows as `(param_value, message)`; the sweep continues past
    /// them.
    pub errors: Vec<(f64, String)>,
}

/// Run a sweep: solve both scenarios at every grid point and
/// cross-evaluate the two contracts. Row order follows the value grid.
pub fn run_sweep(spec: &SweepSpec, cfg: &SolverConfig) -> Result<SweepReport> {
    spec.validate()?;
    let registry = SolverRegistry::builtin_with(*cfg);
    let robust_solver = registry.get("robust")?;
    let nominal_solver = registry.get("nominal")?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &value in &spec.values {
        let step = || -> Result<SweepRow> {
            let problem = spec.problem_at(value)?;
            let robust = robust_solver.solve(&problem)?;
            let nominal = nominal_solver.solve(&problem)?;
            let worst_of_nominal = evaluate_worst_case_with(&problem, &nominal.contract, cfg)?;
            let nominal_of_robust = evaluate_comonotone(&problem, &robust.contract)?;
            Ok(SweepRow {
                param_value: value,
                robust,
                nominal,
                worst_of_nominal,
                nominal_of_robust,
            })
        };
        match step() {
            Ok(row) => rows.push(row),
            Err(e) => errors.push((value, e.to_string())),
        }
    }
    Ok(SweepReport {
        parameter: spec.parameter,
        rows,
        errors,
    })
}

/// Fixed CSV header shared by all harness outputs.
pub const CSV_HEADER: &str =
    "param,pi_star,value,attach,detach,worst_of_nominal,nominal_of_robust";

fn solution_cells(s: &ReinsuranceSolution) -> [String; 4] {
    if s.case == SolutionCase::Indifferent {
        // Any feasible contract attains the same value; the premium and
        // layer cells are left empty.
        [
            String::new(),
            fmt_sig(s.value, 6),
            String::new(),
            String::new(),
        ]
    } else {
        [
            fmt_sig(s.premium, 6),
            fmt_sig(s.value, 6),
            fmt_sig(s.contract.attachment, 6),
            fmt_sig(s.contract.detachment, 6),
        ]
    }
}

/// CSV for a table reproduction: the first five columns of the fixed
/// header (no cross-scenario values).
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("param,pi_star,value,attach,detach\n");
    for row in rows {
        let cells = solution_cells(&row.solution);
        out.push_str(&fmt_sig(row.param, 6));
        for cell in &cells {
            out.push(',');
            out.push_str(cell);
        }
        out.push('\n');
    }
    out
}

/// Which solution a sweep CSV describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScenario {
    Robust,
    Nominal,
}

impl SweepScenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepScenario::Robust => "robust",
            SweepScenario::Nominal => "nominal",
        }
    }
}

/// CSV for one scenario of a sweep, under the fixed header: the solution
/// columns describe that scenario's own contract, and both cross-scenario
/// evaluation columns are repeated in each file.
pub fn sweep_csv(report: &SweepReport, scenario: SweepScenario) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let solution = match scenario {
            SweepScenario::Robust => &row.robust,
            SweepScenario::Nominal => &row.nominal,
        };
        let cells = solution_cells(solution);
        out.push_str(&fmt_sig(row.param_value, 6));
        for cell in &cells {
            out.push(',');
            out.push_str(cell);
        }
        out.push(',');
        out.push_str(&fmt_sig(row.worst_of_nominal, 6));
        out.push(',');
        out.push_str(&fmt_sig(row.nominal_of_robust, 6));
        out.push('\n');
    }
    out
}

/// Golden rows for the benchmark tables: `(goal, premium, value, attach,
/// detach)`. `None` marks cells a table row does not pin down: the two
/// indifferent rows of table 2, and two cells whose widely printed values
/// contradict the row's own defining identity — the table-1 goal-16 value
/// (pinned by `value = F_X(detach)` instead) and the table-3 goal-17
/// premium (held to monotonicity across the goal grid instead).
pub mod reference {
    pub type Row = (f64, Option<f64>, f64, Option<f64>, Option<f64>);

    pub const TABLE1: [Row; 9] = [
        (15.0, Some(4.4356), 0.9690, Some(0.5644), Some(8.7320)),
        (15.5, Some(3.9356), 0.9047, Some(0.5644), Some(6.8680)),
        // Value recomputed from F_X(5.5817); 0.8048 is a digit slip.
        (16.0, Some(3.4356), 0.8408, Some(0.5644), Some(5.5817)),
        (16.5, Some(2.9356), 0.7714, Some(0.5644), Some(4.5439)),
        (17.0, Some(2.4356), 0.6946, Some(0.5644), Some(3.6608)),
        (17.5, Some(1.9356), 0.6090, Some(0.5644), Some(2.8882)),
        (18.0, Some(1.4356), 0.5135, Some(0.5644), Some(2.2003)),
        (18.5, Some(0.9356), 0.4069, Some(0.5644), Some(1.5803)),
        (19.0, Some(0.4356), 0.2881, Some(0.5644), Some(1.0165)),
    ];

    pub const TABLE2: [Row; 9] = [
        (15.0, Some(3.0064), 0.7051, Some(0.5644), Some(4.6801)),
        (15.5, Some(2.5712), 0.6300, Some(0.5644), Some(3.8884)),
        (16.0, Some(2.1416), 0.5476, Some(0.5644), Some(3.1950)),
        (16.5, Some(1.7162), 0.4571, Some(0.5644), Some(2.5772)),
        (17.0, Some(1.2945), 0.3577, Some(0.5644), Some(2.0197)),
        (17.5, Some(0.8775), 0.2488, Some(0.5644), Some(1.5120)),
        // The printed 0.5664 attachment is a typo for z0 = 0.5644.
        (18.0, Some(0.4657), 0.1295, Some(0.5644), Some(1.0493)),
        // Goal unreachable: any feasible contract, value 0.
        (18.5, None, 0.0, None, None),
        (19.0, None, 0.0, None, None),
    ];

    pub const TABLE3: [Row; 9] = [
        (15.0, Some(3.4372), 0.8410, Some(0.5644), Some(5.5853)),
        (15.5, Some(3.1080), 0.7960, Some(0.5644), Some(4.8811)),
        (16.0, Some(2.7708), 0.7469, Some(0.5644), Some(4.2383)),
        (16.5, Some(2.4296), 0.6936, Some(0.5644), Some(3.6509)),
        // Premium cell not pinned (printed 1.2955 breaks the wealth
        // identity and monotonicity); held to the monotonicity check.
        (17.0, None, 0.6360, Some(0.5644), Some(3.1133)),
        (17.5, Some(1.7480), 0.5744, Some(0.5644), Some(2.6212)),
        (18.0, Some(1.4131), 0.5090, Some(0.5644), Some(2.1710)),
        (18.5, Some(1.0860), 0.4402, Some(0.5644), Some(1.7604)),
        (19.0, Some(0.7701), 0.3690, Some(0.5644), Some(1.3879)),
    ];

    pub fn for_table(which: super::TableId) -> &'static [Row; 9] {
        match which {
            super::TableId::Table1 => &TABLE1,
            super::TableId::Table2 => &TABLE2,
            super::TableId::Table3 => &TABLE3,
        }
    }

    /// Absolute tolerance for comparing solved rows to the golden rows.
    pub fn tolerance(which: super::TableId) -> f64 {
        match which {
            // Table 1 runs one numeric layer (quadrature inside roots);
            // tables 2-3 nest quadrature inside a scalar optimization.
            super::TableId::Table1 => 2e-3,
            _ => 3e-3,
        }
    }
}
