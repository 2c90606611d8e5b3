//! Command-line front end: subcommand dispatch, config handling, and
//! structured output.
//!
//! Machine-readable results go to standard output (or files under the
//! output directory); progress and diagnostics go to standard error.
//! Exit codes: 0 success, 2 invalid arguments, 1 numeric failure (the
//! diagnostic names the failing operation).

use crate::config::{ConfigFile, DistSpec, DistortionSpec};
use crate::error::{Error, Result};
use crate::frechet::{self, Direction};
use crate::numeric::SolverConfig;
use crate::portfolio::{solve_goal_reaching, PortfolioProblem};
use crate::reinsurance::{ReinsuranceProblem, SolverRegistry};
use crate::robustness::{
    self, run_sweep, run_table, SweepParameter, SweepScenario, SweepSpec, TableId,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable providing the default output directory.
pub const OUTPUT_DIR_ENV: &str = "GOALREACH_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "goalreach",
    version,
    about = "Distributionally robust goal-reaching: digital portfolios, layer reinsurance, \
             and sharp coupling bounds"
)]
struct Cli {
    /// TOML config file; CLI flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory for generated files (default: $GOALREACH_OUTPUT_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Suppress progress lines on standard error.
    #[arg(long, global = true)]
    quiet: bool,

    /// Override the dense-scan grid size of the scalar solvers.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,

    /// Override the absolute quadrature tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    quad_tol: Option<f64>,

    /// Override the bisection/refinement x-tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    root_tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the robust goal-reaching portfolio problem.
    Portfolio(PortfolioArgs),
    /// Solve a reinsurance design problem in one dependence scenario.
    Reinsurance(ReinsuranceArgs),
    /// Extremal P(W <= V) over couplings with fixed marginals.
    Frechet(FrechetArgs),
    /// Regenerate a benchmark table or sweep (CSV plus JSON mirror).
    Reproduce {
        target: ReproduceTarget,
    },
    /// Run a verification suite and report pass/fail.
    Verify {
        target: VerifyTarget,
        /// Seed for the stochastic checks (required by frechet/coupling).
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct PortfolioArgs {
    /// Initial wealth.
    #[arg(long)]
    x0: Option<f64>,
    /// Goal level.
    #[arg(long)]
    xi: Option<f64>,
    /// Pricing-kernel distribution spec.
    #[arg(long, value_name = "DIST")]
    rho: Option<String>,
    /// Background-risk distribution spec.
    #[arg(long, value_name = "DIST")]
    bg: Option<String>,
}

#[derive(Args)]
struct ReinsuranceArgs {
    /// Dependence scenario: none, robust, or nominal.
    #[arg(long)]
    mode: Option<String>,
    /// Initial wealth.
    #[arg(long)]
    w0: Option<f64>,
    /// Goal level.
    #[arg(long)]
    xi: Option<f64>,
    /// Insurable-loss distribution spec.
    #[arg(long, value_name = "DIST")]
    loss: Option<String>,
    /// Background-risk distribution spec.
    #[arg(long, value_name = "DIST")]
    bg: Option<String>,
    /// Distortion pricing spec, e.g. `{family:"power",theta:0.5,loading:0.1}`.
    #[arg(long, value_name = "SPEC")]
    distortion: Option<String>,
}

#[derive(Args)]
struct FrechetArgs {
    /// One of sup_leq, sup_lt, sup_geq, sup_gt, inf_leq, inf_lt, inf_geq, inf_gt.
    #[arg(long)]
    direction: String,
    /// Marginal of V.
    #[arg(long, value_name = "DIST")]
    v: String,
    /// Marginal of W.
    #[arg(long, value_name = "DIST")]
    w: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReproduceTarget {
    Table1,
    Table2,
    Table3,
    SweepGoal,
    SweepLoading,
    SweepShape,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Frechet,
    Coupling,
    Tables,
}

/// Parse `argv` and run; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Explicitly requested --help/--version exit 0; every other
            // parse problem (including a missing subcommand) is a usage
            // error on stderr with exit 2.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // Bad invocations: malformed specs/config, unknown names,
                // out-of-range constructor parameters.
                Error::Config(_) | Error::Unknown { .. } | Error::InvalidParameter { .. } => 2,
                // Mathematical precondition violations and numeric
                // failures inside a well-formed run.
                _ => 1,
            }
        }
    }
}

struct Ctx {
    file: ConfigFile,
    out_dir: Option<PathBuf>,
    quiet: bool,
    solver: SolverConfig,
    overrides: serde_json::Value,
}

impl Ctx {
    fn progress(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn write_file(&self, dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path)?;
        f.write_all(contents.as_bytes())?;
        Ok(path)
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::empty(),
    };
    let mut solver = SolverConfig::default();
    if let Some(n) = file.usize(&["solver", "grid_points"])? {
        solver.grid_points = n;
    }
    if let Some(t) = file.f64(&["solver", "quad_tol"])? {
        solver.quad_tol = t;
    }
    if let Some(t) = file.f64(&["solver", "root_tol"])? {
        solver.root_tol = t;
    }
    if let Some(n) = cli.grid {
        solver.grid_points = n;
    }
    if let Some(t) = cli.quad_tol {
        solver.quad_tol = t;
    }
    if let Some(t) = cli.root_tol {
        solver.root_tol = t;
    }
    if solver.grid_points < 2 {
        return Err(Error::Config("grid must have at least 2 points".into()));
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| file.string(&["output", "dir"]).ok().flatten().map(Into::into))
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(Into::into));
    // Every numeric override is echoed into JSON reports.
    let overrides = json!({
        "grid_points": solver.grid_points,
        "quad_tol": solver.quad_tol,
        "root_tol": solver.root_tol,
    });
    let ctx = Ctx {
        file,
        out_dir,
        quiet: cli.quiet,
        solver,
        overrides,
    };
    match cli.command {
        Command::Portfolio(args) => cmd_portfolio(&ctx, args),
        Command::Reinsurance(args) => cmd_reinsurance(&ctx, args),
        Command::Frechet(args) => cmd_frechet(&ctx, args),
        Command::Reproduce { target } => cmd_reproduce(&ctx, target),
        Command::Verify { target, seed } => cmd_verify(&ctx, target, seed),
    }
}

fn required<T>(flag: &str, cli_val: Option<T>, file_val: Option<T>) -> Result<T> {
    cli_val
        .or(file_val)
        .ok_or_else(|| Error::Config(format!("missing required parameter `{flag}`")))
}

fn dist_arg(ctx: &Ctx, flag: &str, inline: Option<String>, path: &[&str]) -> Result<DistSpec> {
    match inline {
        Some(s) => DistSpec::parse(&s),
        None => required(flag, None, ctx.file.dist(path)?),
    }
}

fn cmd_portfolio(ctx: &Ctx, args: PortfolioArgs) -> Result<()> {
    let x0 = required("--x0", args.x0, ctx.file.f64(&["portfolio", "x0"])?)?;
    let xi = required("--xi", args.xi, ctx.file.f64(&["portfolio", "xi"])?)?;
    let rho = dist_arg(ctx, "--rho", args.rho, &["portfolio", "rho"])?;
    let bg = dist_arg(ctx, "--bg", args.bg, &["portfolio", "bg"])?;
    let problem = PortfolioProblem {
        x0,
        xi,
        pricing_kernel: rho.build()?,
        background: bg.build()?,
    };
    ctx.progress("solving goal-reaching portfolio problem");
    let solution = solve_goal_reaching(&problem, &ctx.solver)?;
    let report = json!({
        "config": {
            "x0": x0,
            "xi": xi,
            "rho": rho.echo(),
            "bg": bg.echo(),
            "solver": ctx.overrides,
        },
        "solution": solution,
    });
    emit_json(ctx, "portfolio.json", &report)
}

fn cmd_reinsurance(ctx: &Ctx, args: ReinsuranceArgs) -> Result<()> {
    let mode = required(
        "--mode",
        args.mode,
        ctx.file.string(&["reinsurance", "mode"])?,
    )?;
    let w0 = required("--w0", args.w0, ctx.file.f64(&["reinsurance", "w0"])?)?;
    let xi = required("--xi", args.xi, ctx.file.f64(&["reinsurance", "xi"])?)?;
    let loss = dist_arg(ctx, "--loss", args.loss, &["reinsurance", "loss"])?;
    let distortion = match args.distortion {
        Some(s) => DistortionSpec::parse(&s)?,
        None => required(
            "--distortion",
            None,
            ctx.file.distortion(&["reinsurance", "distortion"])?,
        )?,
    };
    // Background is optional for mode `none`.
    let bg = match args.bg {
        Some(s) => Some(DistSpec::parse(&s)?),
        None => ctx.file.dist(&["reinsurance", "bg"])?,
    };
    let problem = ReinsuranceProblem {
        w0,
        xi,
        pricing: distortion.build()?,
        loss: loss.build()?,
        background: bg.as_ref().map(|b| b.build()).transpose()?,
    };
    let registry = SolverRegistry::builtin_with(ctx.solver);
    ctx.progress(&format!("solving reinsurance problem, mode `{mode}`"));
    let solution = registry.get(&mode)?.solve(&problem)?;
    let report = json!({
        "config": {
            "mode": mode,
            "w0": w0,
            "xi": xi,
            "loss": loss.echo(),
            "bg": bg.as_ref().map(|b| b.echo()),
            "distortion": distortion.echo(),
            "solver": ctx.overrides,
        },
        "solution": solution,
    });
    emit_json(ctx, "reinsurance.json", &report)
}

fn cmd_frechet(ctx: &Ctx, args: FrechetArgs) -> Result<()> {
    let direction = Direction::from_str(&args.direction)?;
    let v = DistSpec::parse(&args.v)?;
    let w = DistSpec::parse(&args.w)?;
    let result = frechet::sup_prob_with(
        direction,
        &v.build()?,
        &w.build()?,
        ctx.solver.grid_points.max(frechet::DEFAULT_GRID),
    )?;
    let report = json!({
        "config": { "v": v.echo(), "w": w.echo(), "solver": ctx.overrides },
        "result": result,
    });
    emit_json(ctx, "frechet.json", &report)
}

fn emit_json(ctx: &Ctx, name: &str, report: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("serializable report");
    println!("{text}");
    if let Some(dir) = &ctx.out_dir {
        let path = ctx.write_file(dir, name, &text)?;
        ctx.progress(&format!("wrote {}", path.display()));
    }
    Ok(())
}

fn cmd_reproduce(ctx: &Ctx, target: ReproduceTarget) -> Result<()> {
    match target {
        ReproduceTarget::Table1 => reproduce_table(ctx, TableId::Table1),
        ReproduceTarget::Table2 => reproduce_table(ctx, TableId::Table2),
        ReproduceTarget::Table3 => reproduce_table(ctx, TableId::Table3),
        ReproduceTarget::SweepGoal => reproduce_sweep(ctx, SweepParameter::Goal),
        ReproduceTarget::SweepLoading => reproduce_sweep(ctx, SweepParameter::Loading),
        ReproduceTarget::SweepShape => reproduce_sweep(ctx, SweepParameter::Shape),
    }
}

fn reproduce_table(ctx: &Ctx, which: TableId) -> Result<()> {
    ctx.progress(&format!("reproducing {}", which.as_str()));
    let rows = run_table(which, &ctx.solver)?;
    let csv = robustness::table_csv(&rows);
    print!("{csv}");
    if let Some(dir) = ctx.out_dir.clone() {
        let report = json!({
            "table": which.as_str(),
            "solver": ctx.overrides,
            "rows": rows,
        });
        let csv_path = ctx.write_file(&dir, &format!("{}.csv", which.as_str()), &csv)?;
        let json_path = ctx.write_file(
            &dir,
            &format!("{}.json", which.as_str()),
            &serde_json::to_string_pretty(&report).expect("serializable rows"),
        )?;
        ctx.progress(&format!(
            "wrote {} and {}",
            csv_path.display(),
            json_path.display()
        ));
    }
    Ok(())
}

fn reproduce_sweep(ctx: &Ctx, parameter: SweepParameter) -> Result<()> {
    ctx.progress(&format!("running {} sweep", parameter.as_str()));
    let spec = SweepSpec::benchmark(parameter);
    let report = run_sweep(&spec, &ctx.solver)?;
    for (value, msg) in &report.errors {
        eprintln!("warning: sweep point {value} failed: {msg}");
    }
    let dir = ctx
        .out_dir
        .clone()
        .ok_or_else(|| Error::Config(
            format!(
                "sweeps write multiple files; pass --out or set {OUTPUT_DIR_ENV}"
            ),
        ))?;
    let stem = format!("sweep_{}", parameter.as_str());
    let full = json!({
        "spec": spec,
        "solver": ctx.overrides,
        "report": report,
    });
    for scenario in [SweepScenario::Robust, SweepScenario::Nominal] {
        let csv = robustness::sweep_csv(&report, scenario);
        let path = ctx.write_file(&dir, &format!("{stem}_{}.csv", scenario.as_str()), &csv)?;
        ctx.progress(&format!("wrote {}", path.display()));
    }
    let path = ctx.write_file(
        &dir,
        &format!("{stem}.json"),
        &serde_json::to_string_pretty(&full).expect("serializable report"),
    )?;
    ctx.progress(&format!("wrote {}", path.display()));
    Ok(())
}

fn cmd_verify(ctx: &Ctx, target: VerifyTarget, seed: Option<u64>) -> Result<()> {
    match target {
        VerifyTarget::Tables => verify_tables(ctx),
        VerifyTarget::Frechet => {
            let seed = seed.ok_or_else(|| {
                Error::Config("verify frechet is stochastic; pass --seed".into())
            })?;
            verify_frechet(ctx, seed)
        }
        VerifyTarget::Coupling => {
            let seed = seed.ok_or_else(|| {
                Error::Config("verify coupling is stochastic; pass --seed".into())
            })?;
            verify_coupling(ctx, seed)
        }
    }
}

fn verify_tables(ctx: &Ctx) -> Result<()> {
    let mut failures = 0usize;
    for which in [TableId::Table1, TableId::Table2, TableId::Table3] {
        let rows = run_table(which, &ctx.solver)?;
        let golden = robustness::reference::for_table(which);
        let tol = robustness::reference::tolerance(which);
        for (row, (xi, premium, value, attach, detach)) in rows.iter().zip(golden.iter()) {
            let mut worst: f64 = (row.solution.value - value).abs();
            if let Some(p) = premium {
                worst = worst.max((row.solution.premium - p).abs());
            }
            if let Some(a) = attach {
                worst = worst.max((row.solution.contract.attachment - a).abs());
            }
            if let Some(b) = detach {
                worst = worst.max((row.solution.contract.detachment - b).abs());
            }
            let ok = worst <= tol;
            if !ok {
                failures += 1;
            }
            println!(
                "{} xi={:<4} max|delta|={:.2e} tol={:.0e} {}",
                which.as_str(),
                xi,
                worst,
                tol,
                if ok { "PASS" } else { "FAIL" }
            );
        }
    }
    if failures > 0 {
        return Err(Error::numeric(
            "verify_tables",
            format!("{failures} table cells outside tolerance"),
        ));
    }
    Ok(())
}

fn verify_frechet(ctx: &Ctx, seed: u64) -> Result<()> {
    use crate::dist::DynDist;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let n_atoms = 6;
    for case in 0..20 {
        let (v, w) = random_marginal_pair(&mut rng);
        let analytic = frechet::sup_prob(Direction::InfGt, &v, &w)?.bound;
        let atoms = |d: &DynDist| -> Vec<f64> {
            (0..n_atoms)
                .map(|i| d.quantile((i as f64 + 0.5) / n_atoms as f64))
                .collect()
        };
        let brute = frechet::brute_force_bound(Direction::InfGt, &atoms(&v), &atoms(&w))?;
        let tol = 2.0 / n_atoms as f64 + 0.02;
        let ok = (analytic - brute).abs() <= tol;
        if !ok {
            failures += 1;
        }
        println!(
            "pair {case:>2}: analytic={analytic:.4} brute={brute:.4} tol={tol:.3} {}",
            if ok { "PASS" } else { "FAIL" }
        );
        let _ = rng.gen::<f64>();
    }
    if failures > 0 {
        return Err(Error::numeric(
            "verify_frechet",
            format!("{failures} of 20 oracle comparisons failed"),
        ));
    }
    let _ = ctx;
    Ok(())
}

fn verify_coupling(ctx: &Ctx, seed: u64) -> Result<()> {
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let n = 1_000_000usize;
    let mut failures = 0usize;
    for case in 0..10 {
        let (v, w) = random_marginal_pair(&mut rng);
        let coupling = frechet::worst_case_coupling(v, w)?;
        let p = 1.0 - coupling.alpha();
        let freq = frechet::mc_verify(&coupling, n, seed.wrapping_add(case))?;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let ok = (freq - p).abs() <= 3.0 * sigma + 1e-12;
        if !ok {
            failures += 1;
        }
        println!(
            "pair {case}: empirical={freq:.6} analytic={p:.6} 3sigma={:.2e} {}",
            3.0 * sigma,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if failures > 0 {
        return Err(Error::numeric(
            "verify_coupling",
            format!("{failures} of 10 coupling checks failed"),
        ));
    }
    let _ = ctx;
    Ok(())
}

/// A random pair of marginals with at least one continuous side.
pub fn random_marginal_pair(
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (crate::dist::DynDist, crate::dist::DynDist) {
    use crate::dist::{Empirical, Lognormal, TruncatedNormal, TruncatedShiftedPareto, Uniform};
    use rand::Rng;
    use std::sync::Arc;

    let continuous = |rng: &mut rand_chacha::ChaCha8Rng| -> crate::dist::DynDist {
        match rng.gen_range(0..4) {
            0 => {
                let lo = rng.gen_range(-2.0..1.0);
                Arc::new(Uniform::new(lo, lo + rng.gen_range(0.5..3.0)).unwrap())
            }
            1 => {
                let a = rng.gen_range(-3.0..0.0);
                Arc::new(TruncatedNormal::new(a, a + rng.gen_range(1.0..5.0)).unwrap())
            }
            2 => Arc::new(
                TruncatedShiftedPareto::new(
                    rng.gen_range(1.0..10.0),
                    rng.gen_range(1.5..4.0),
                    rng.gen_range(2.0..10.0),
                )
                .unwrap(),
            ),
            _ => Arc::new(
                Lognormal::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.2..0.8)).unwrap(),
            ),
        }
    };
    let v = continuous(rng);
    // Half the time the W side is a small empirical cloud.
    let w: crate::dist::DynDist = if rand::Rng::gen_bool(rng, 0.5) {
        let k = rand::Rng::gen_range(rng, 2..7usize);
        let samples: Vec<f64> = (0..k)
            .map(|_| rand::Rng::gen_range(rng, -2.0..4.0))
            .collect();
        Arc::new(Empirical::new(&samples).unwrap())
    } else {
        continuous(rng)
    };
    (v, w)
}
