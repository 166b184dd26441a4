//! Command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, every check passed |
//! | 1 | ran to completion but a check failed |
//! | 2 | invalid input: bad JSON or expression, unknown id, inadmissible parameters, stability guard |
//! | 3 | domain violation: a pole or branch point inside the sampled region, barrier leaving the grid |
//! | 4 | numerical instability: blow-up or non-finite values |
//! | 5 | output could not be written |
//!
//! Reports are JSON on stdout, or in the file named by `--out`. Files are written to a
//! temporary sibling and renamed into place, so a failed run never leaves a truncated file.

use crate::catalog::{self, CatalogError, Form, Sign};
use crate::expr::{Expr, ExprError};
use crate::lie::{self, LieError, SymmetryReport};
use crate::model::{self, HeatSourceModel, HeathModel, ModelError};
use crate::solutions::{self, BarrierSpec, ClosedFormSolution, SolutionDescriptor, SolutionError};
use crate::solver::{self, ConvergenceCase, GridSpec, Scheme, SchemeConfig, SolverError};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable that replaces [`lie::DEFAULT_SEED`] when `--seed` is absent.
pub const SEED_ENV: &str = "HEATHSYM_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "heathsym",
    version,
    about = "Symmetry toolkit for the generalized Heath equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for sampled checks [default: HEATHSYM_SEED or 20240611].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of sample points per symmetry check.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    /// Tolerance for symmetry residuals and PDE residuals.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report (or CSV for `solve`) here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List, verify or search the classification table.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Map a Heath model to the heat class or back.
    ///
    /// MODEL is inline JSON or a file: `{"a":..,"b":..,"f":".."}` maps forward,
    /// `{"fhat":"..","a":..,"b":..}` maps back.
    Transform { model: String },
    /// Residual and boundary checks of a packaged closed-form solution.
    Check {
        solution: SolutionName,
        #[arg(long)]
        params: Option<String>,
    },
    /// Run the finite-difference solver on a manufactured problem.
    Solve {
        case: CaseName,
        #[arg(long)]
        params: Option<String>,
        /// JSON with any of `x: [lo, hi]`, `nx`, `tau: [lo, hi]`, `nt`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value = "cn")]
        scheme: Scheme,
        /// Keep every n-th time level in the CSV.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Emit `t,x,u` in Heath variables instead of `tau,x,phi`.
        #[arg(long)]
        heath: bool,
    },
    /// Observed order of convergence under grid refinement.
    Converge {
        case: CaseName,
        #[arg(long)]
        params: Option<String>,
        /// Interior node counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<usize>>,
        #[arg(long, default_value = "cn")]
        scheme: Scheme,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// Print every entry with its parameters, constraints and generators.
    List,
    /// Check each generator of one entry against the on-manifold symmetry condition.
    Verify {
        id: String,
        /// Parameter values; drawn from the seed when omitted.
        #[arg(long)]
        params: Option<String>,
        /// `plus` or `minus`; both variants are checked when omitted.
        #[arg(long)]
        sign: Option<String>,
        #[arg(long, value_enum, default_value_t = FormArg::Corrected)]
        form: FormArg,
        /// Arbitrary function of the entry, as an expression in `psi` or `x`.
        #[arg(long)]
        function: Option<String>,
    },
    /// Find the entries whose generators leave a given source invariant.
    Match { fhat: String },
    /// Verify every entry at random admissible parameters.
    Sweep {
        #[arg(long, default_value_t = 10)]
        draws: usize,
        #[arg(long, value_enum, default_value_t = FormArg::Corrected)]
        form: FormArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormArg {
    Literal,
    Corrected,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Form {
        match f {
            FormArg::Literal => Form::Literal,
            FormArg::Corrected => Form::Corrected,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionName {
    Terminal,
    Barrier,
    A22,
    A359,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseName {
    /// Source-free heat equation with a decaying sine.
    Heat,
    /// Barrier closed form on a fixed strip right of the barrier.
    BarrierFixed,
    /// Barrier closed form with the moving barrier as left boundary.
    Barrier,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn expr_code(e: &ExprError) -> i32 {
    match e {
        ExprError::Domain { .. } => 3,
        _ => 2,
    }
}

fn lie_code(e: &LieError) -> i32 {
    match e {
        LieError::Expr(e) => expr_code(e),
        LieError::NotParabolic => 2,
        LieError::Unsamplable { .. } => 3,
    }
}

fn model_code(e: &ModelError) -> i32 {
    match e {
        ModelError::Expr(e) => expr_code(e),
        ModelError::Lie(e) => lie_code(e),
        _ => 2,
    }
}

fn catalog_code(e: &CatalogError) -> i32 {
    match e {
        CatalogError::Expr(e) => expr_code(e),
        CatalogError::Lie(e) => lie_code(e),
        _ => 2,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Expr(e) => expr_code(e),
            CliError::Model(e) => model_code(e),
            CliError::Catalog(e) => catalog_code(e),
            CliError::Solution(e) => match e {
                SolutionError::Expr(e) => expr_code(e),
                SolutionError::Model(e) => model_code(e),
                SolutionError::Catalog(e) => catalog_code(e),
                SolutionError::Lie(e) => lie_code(e),
                SolutionError::Domain { .. } | SolutionError::SingularTime { .. } => 3,
                SolutionError::ZeroDiffusion | SolutionError::Precondition(_) => 2,
            },
            CliError::Solver(e) => match e {
                SolverError::Expr(e) => expr_code(e),
                SolverError::BarrierExitsGrid { .. } => 3,
                SolverError::Blowup { .. } | SolverError::NonFinite { .. } => 4,
                SolverError::InvalidGrid(_)
                | SolverError::StabilityGuard { .. }
                | SolverError::MissingReference
                | SolverError::TooFewLevels(_) => 2,
            },
            CliError::Io { .. } => 5,
        }
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command. `Ok(false)` means the command completed but a check failed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let ctx = Context {
        seed: resolve_seed(cli.seed)?,
        samples: cli.samples,
        tol: cli.tol,
        out: cli.out.clone(),
    };
    match &cli.command {
        Command::Catalog { action } => ctx.catalog(action),
        Command::Transform { model } => ctx.transform(model),
        Command::Check { solution, params } => ctx.check(*solution, params.as_deref()),
        Command::Solve {
            case,
            params,
            grid,
            scheme,
            stride,
            heath,
        } => ctx.solve(
            *case,
            params.as_deref(),
            grid.as_deref(),
            *scheme,
            *stride,
            *heath,
        ),
        Command::Converge {
            case,
            params,
            levels,
            scheme,
        } => ctx.converge(*case, params.as_deref(), levels.as_deref(), *scheme),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(lie::DEFAULT_SEED),
    }
}

/// Writes `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Inline JSON, or the contents of the named file.
fn json_arg(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))
}

fn parse_params(arg: Option<&str>) -> Result<BTreeMap<String, f64>, CliError> {
    match arg {
        None => Ok(BTreeMap::new()),
        Some(a) => serde_json::from_str(&json_arg(a)?)
            .map_err(|e| CliError::Input(format!("invalid --params: {e}"))),
    }
}

/// Merges `given` over `defaults`, rejecting names not in `defaults`.
fn with_defaults(
    given: BTreeMap<String, f64>,
    defaults: &[(&str, f64)],
) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out: BTreeMap<String, f64> =
        defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in given {
        if !out.contains_key(&k) {
            let known: Vec<&str> = defaults.iter().map(|d| d.0).collect();
            return Err(CliError::Input(format!(
                "unknown parameter `{k}` (expected one of {})",
                known.join(", ")
            )));
        }
        out.insert(k, v);
    }
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridOverride {
    x: Option<(f64, f64)>,
    nx: Option<usize>,
    tau: Option<(f64, f64)>,
    nt: Option<usize>,
}

struct Context {
    seed: u64,
    samples: usize,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct NamedCheck {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Reported only; does not affect the exit code.
    pub informational: bool,
    pub status: &'static str,
}

impl NamedCheck {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        let passed = value.is_finite() && value < tolerance;
        NamedCheck {
            name,
            value,
            tolerance,
            passed,
            informational: false,
            status: if passed { "passed" } else { "failed" },
        }
    }

    fn informational(name: &'static str, value: f64, tolerance: f64) -> Self {
        let passed = value.is_finite() && value < tolerance;
        let status = if passed {
            "satisfied (informational)"
        } else {
            "not satisfied (informational)"
        };
        NamedCheck {
            name,
            value,
            tolerance,
            passed,
            informational: true,
            status,
        }
    }

    fn symmetry(name: &'static str, r: &SymmetryReport) -> Self {
        NamedCheck {
            status: if r.passed { "passed" } else { "failed" },
            ..NamedCheck::new(name, r.max_abs, r.tolerance)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub solution: SolutionName,
    pub params: BTreeMap<String, f64>,
    pub pde_residual_max: f64,
    pub pde_tolerance: f64,
    pub boundary_checks: Vec<NamedCheck>,
    pub passed: bool,
    pub descriptor: SolutionDescriptor,
}

const PDE_TOLERANCE: f64 = 1e-7;
const BOUNDARY_TOLERANCE: f64 = 1e-9;

fn barrier_defaults() -> [(&'static str, f64); 7] {
    [
        ("a", 1.0),
        ("b", 1.0),
        ("alpha", 0.05),
        ("beta", 0.9),
        ("K", 1.0),
        ("T", 1.0),
        ("A", 1.0),
    ]
}

fn barrier_spec(p: &BTreeMap<String, f64>) -> Result<BarrierSpec, CliError> {
    Ok(solutions::exponential_barrier(
        p["a"], p["b"], p["alpha"], p["beta"], p["K"], p["T"], p["A"],
    )?)
}

impl Context {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => write_atomic(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn sym_tol(&self) -> f64 {
        self.tol.unwrap_or(lie::DEFAULT_TOLERANCE)
    }

    fn catalog(&self, action: &CatalogAction) -> Result<bool, CliError> {
        match action {
            CatalogAction::List => {
                let entries = catalog::list_entries();
                self.emit(&to_json(
                    &json!({ "count": entries.len(), "entries": entries }),
                ))?;
                Ok(true)
            }
            CatalogAction::Verify {
                id,
                params,
                sign,
                form,
                function,
            } => {
                let e = catalog::entry(id)?;
                let form = Form::from(*form);
                let params = match params {
                    Some(p) => parse_params(Some(p))?,
                    None => e.draw_params(form, &mut lie::point_rng(self.seed, 0)),
                };
                let signs = match sign {
                    Some(s) => {
                        vec![Some(Sign::parse(s).ok_or_else(|| {
                            CliError::Input(format!("unknown sign {s:?}"))
                        })?)]
                    }
                    None => e.sign_variants(),
                };
                let function = function.as_deref().map(Expr::parse).transpose()?;
                let function = function.or_else(|| e.default_function());
                let reports = signs
                    .into_iter()
                    .map(|s| {
                        let inst = catalog::instantiate(id, &params, function.as_ref(), s, form)?;
                        catalog::verify_instance(&inst, self.samples, self.seed, self.sym_tol())
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let passed = reports.iter().all(|r| r.passed);
                self.emit(&to_json(
                    &json!({ "id": e.id, "passed": passed, "variants": reports }),
                ))?;
                Ok(passed)
            }
            CatalogAction::Match { fhat } => {
                let fhat = Expr::parse(fhat)?;
                let opts = catalog::MatchOptions {
                    seed: self.seed,
                    ..Default::default()
                };
                let matches = catalog::match_fhat(&fhat, &opts)?;
                self.emit(&to_json(
                    &json!({ "fhat": fhat.to_string(), "matches": matches }),
                ))?;
                Ok(true)
            }
            CatalogAction::Sweep { draws, form } => {
                let form = Form::from(*form);
                let mut rows = Vec::new();
                for e in catalog::entries() {
                    for sign in e.sign_variants() {
                        let reports = catalog::verify_random(
                            e,
                            sign,
                            form,
                            *draws,
                            self.samples,
                            self.seed,
                            self.sym_tol(),
                        )?;
                        let worst = reports
                            .iter()
                            .flat_map(|r| r.generators.iter().map(|g| g.report.max_abs))
                            .fold(0.0, f64::max);
                        let failing: Vec<_> = reports
                            .iter()
                            .flat_map(|r| r.generators.iter().filter(|g| !g.report.passed))
                            .map(|g| json!({ "generator": g.index, "worst_term": g.report.worst_term }))
                            .take(3)
                            .collect();
                        rows.push(json!({
                            "label": catalog::variant_label(e.id, sign),
                            "reading": e.reading,
                            "passed": reports.iter().all(|r| r.passed),
                            "max_residual": worst,
                            "failing": failing,
                        }));
                    }
                }
                let passed = rows.iter().all(|r| r["passed"] == true);
                self.emit(&to_json(
                    &json!({ "form": form, "draws": draws, "passed": passed, "variants": rows }),
                ))?;
                Ok(passed)
            }
        }
    }

    fn transform(&self, model: &str) -> Result<bool, CliError> {
        let text = json_arg(model)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("invalid model descriptor: {e}")))?;
        let report = if value.get("f").is_some() {
            let m = HeathModel::from_json(&text)?;
            let t = model::heath_to_heat(&m);
            let lin = model::is_linearizable(&m);
            json!({
                "direction": "heath-to-heat",
                "a": m.a,
                "b": m.b,
                "f": m.f.to_string(),
                "fhat": t.heat.fhat.to_string(),
                "map": map_json(&t.map),
                "warnings": t.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                "linearizable": lin.linearizable,
                "g": lin.g.map(|g| g.to_string()),
                "potential": lin.potential.map(|p| p.to_string()),
            })
        } else if let Some(fhat) = value.get("fhat").and_then(|v| v.as_str()) {
            let coeff = |k: &str, default: f64| match value.get(k) {
                None => Ok(default),
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| CliError::Input(format!("`{k}` must be a number"))),
            };
            let (a, b) = (coeff("a", 0.0)?, coeff("b", 1.0)?);
            let heat = HeatSourceModel::parse(fhat)?;
            let m = model::heat_to_heath(&heat, a, b)?;
            json!({
                "direction": "heat-to-heath",
                "a": a,
                "b": b,
                "fhat": heat.fhat.to_string(),
                "f": m.f.to_string(),
                "map": map_json(&m.coordinate_map()),
                "warnings": heat.warnings().iter().chain(m.warnings().iter()).map(|w| w.to_string()).collect::<Vec<_>>(),
            })
        } else {
            return Err(CliError::Input(
                "model descriptor needs `f` (with `a`, `b`) or `fhat`".into(),
            ));
        };
        self.emit(&to_json(&report))?;
        Ok(true)
    }

    fn check(&self, name: SolutionName, params: Option<&str>) -> Result<bool, CliError> {
        let given = parse_params(params)?;
        let n = self.samples;
        let pde_tol = self.tol.unwrap_or(PDE_TOLERANCE);
        let (params, sol, checks): (_, ClosedFormSolution, Vec<NamedCheck>) = match name {
            SolutionName::Terminal => {
                let p = with_defaults(given, &[("a", 1.0), ("b", 1.0), ("T", 1.0)])?;
                let sol = solutions::terminal_solution(p["a"], p["b"], p["T"])?;
                let c = solutions::terminal_checks(p["a"], p["b"], p["T"], n, self.seed)?;
                let checks = vec![
                    NamedCheck::new(
                        "terminal condition u(x,T) = 1",
                        c.terminal_error,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::new("similarity form equals closed form", c.similarity_gap, 1e-8),
                    NamedCheck::new(
                        "reduced ODE (derived)",
                        c.reduced_ode_corrected,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::informational(
                        "reduced ODE (as printed)",
                        c.reduced_ode_printed,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::informational(
                        "terminal datum with printed constant",
                        c.printed_constant_datum_error,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::symmetry("subalgebra generator is a symmetry", &c.generator),
                    NamedCheck::new(
                        "generator leaves terminal surface invariant",
                        c.surface_residual,
                        1e-10,
                    ),
                    NamedCheck::new(
                        "generator leaves terminal datum invariant",
                        c.datum_residual,
                        1e-10,
                    ),
                    NamedCheck::new("solution is invariant", c.solution_invariance, 1e-8),
                ];
                (p, sol, checks)
            }
            SolutionName::Barrier => {
                let p = with_defaults(given, &barrier_defaults())?;
                let spec = barrier_spec(&p)?;
                let sol = solutions::barrier_solution(&spec)?;
                let c = solutions::barrier_checks(&spec, n, self.seed)?;
                let checks = vec![
                    NamedCheck::new(
                        "barrier condition u(H,t) = R",
                        c.barrier_error,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::new(
                        "heat-form barrier condition",
                        c.heat_barrier_error,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::new(
                        "general H at exponential coefficients",
                        c.h_general_gap,
                        1e-10,
                    ),
                    NamedCheck::new(
                        "general R at exponential coefficients",
                        c.r_general_gap,
                        1e-9,
                    ),
                    NamedCheck::new("similarity form equals closed form", c.heat_form_gap, 1e-10),
                    NamedCheck::new(
                        "similarity form solves heat equation",
                        c.heat_residual,
                        1e-8,
                    ),
                    NamedCheck::new(
                        "reduced ODE (derived)",
                        c.reduced_ode_corrected,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::informational(
                        "reduced ODE (as printed)",
                        c.reduced_ode_printed,
                        BOUNDARY_TOLERANCE,
                    ),
                    NamedCheck::symmetry("barrier generator is a symmetry", &c.generator),
                    NamedCheck::new(
                        "generator leaves barrier invariant",
                        c.surface_residual,
                        1e-10,
                    ),
                    NamedCheck::new(
                        "generator leaves barrier value invariant",
                        c.value_residual,
                        1e-10,
                    ),
                    NamedCheck::new("solution is invariant", c.solution_invariance, 1e-8),
                    NamedCheck::informational(
                        "call payoff at t = T",
                        (c.payoff.solution - c.payoff.payoff).abs(),
                        BOUNDARY_TOLERANCE,
                    ),
                ];
                (p, sol, checks)
            }
            SolutionName::A22 => {
                let p = with_defaults(given, &[("a", 1.0), ("b", 1.0), ("c3", 0.0)])?;
                let sol = solutions::example_a22(p["a"], p["b"], p["c3"])?;
                (p, sol, Vec::new())
            }
            SolutionName::A359 => {
                let p = with_defaults(given, &[("a", 1.0), ("b", 1.0), ("c1", -1.0)])?;
                let sol = solutions::example_a359(p["a"], p["b"], p["c1"])?;
                let inst = catalog::instantiate(
                    "A_3_5_9",
                    &BTreeMap::from([("B".to_string(), 3.0)]),
                    None,
                    None,
                    Form::Corrected,
                )?;
                let gap = solutions::catalog_source_gap(&sol, &inst, n, self.seed)?;
                (
                    p,
                    sol,
                    vec![NamedCheck::new(
                        "heat source equals catalog entry A_3_5_9 (B = 3)",
                        gap,
                        1e-10,
                    )],
                )
            }
        };
        let pde_residual_max = sol.max_residual(12)?;
        let passed =
            pde_residual_max < pde_tol && checks.iter().all(|c| c.informational || c.passed);
        let report = CheckReport {
            solution: name,
            params,
            pde_residual_max,
            pde_tolerance: pde_tol,
            boundary_checks: checks,
            passed,
            descriptor: sol.descriptor(),
        };
        self.emit(&to_json(&report))?;
        Ok(passed)
    }

    fn case(
        &self,
        name: CaseName,
        params: Option<&str>,
    ) -> Result<(ConvergenceCase, Option<BarrierSpec>), CliError> {
        let given = parse_params(params)?;
        match name {
            CaseName::Heat => {
                if !given.is_empty() {
                    return Err(CliError::Input(
                        "the heat benchmark takes no parameters".into(),
                    ));
                }
                Ok((ConvergenceCase::HeatBenchmark, None))
            }
            CaseName::BarrierFixed | CaseName::Barrier => {
                let spec = barrier_spec(&with_defaults(given, &barrier_defaults())?)?;
                let reference = solutions::barrier_heat_form(&spec);
                // the barrier sits at beta*K*exp(alpha*(t - T)) <= beta*K
                let level = spec.beta * spec.strike;
                // march half a unit of heat time away from the terminal surface
                let start = solutions::terminal_heat_time(spec.b, spec.terminal);
                let tau = (start, start + 0.5);
                let case = match name {
                    CaseName::BarrierFixed => ConvergenceCase::Manufactured {
                        fhat: spec.fhat(),
                        reference,
                        x: (
                            level + 0.1 * spec.strike.max(1.0),
                            level + 2.1 * spec.strike.max(1.0),
                        ),
                        tau,
                    },
                    _ => ConvergenceCase::Barrier {
                        spec: spec.clone(),
                        reference,
                        x: (
                            level - 0.4 * spec.strike.max(1.0),
                            level + 2.1 * spec.strike.max(1.0),
                        ),
                        tau,
                    },
                };
                Ok((case, Some(spec)))
            }
        }
    }

    fn solve(
        &self,
        name: CaseName,
        params: Option<&str>,
        grid: Option<&str>,
        scheme: Scheme,
        stride: usize,
        heath: bool,
    ) -> Result<bool, CliError> {
        let (case, spec) = self.case(name, params)?;
        let default_nx = match name {
            CaseName::Heat => 127,
            _ => 256,
        };
        let base = case.grid(default_nx, scheme)?;
        let over: GridOverride = match grid {
            Some(g) => serde_json::from_str(&json_arg(g)?)
                .map_err(|e| CliError::Input(format!("invalid --grid: {e}")))?,
            None => GridOverride::default(),
        };
        let grid = GridSpec::new(
            over.x.unwrap_or(base.x),
            over.nx.unwrap_or(base.nx),
            over.tau.unwrap_or(base.tau),
            over.nt.unwrap_or(base.nt),
        )?;
        if stride == 0 {
            return Err(CliError::Input("--stride must be at least 1".into()));
        }
        let config = SchemeConfig {
            scheme,
            stride,
            ..SchemeConfig::default()
        };
        let (solution, reference) = match &case {
            ConvergenceCase::HeatBenchmark => {
                let reference = ConvergenceCase::heat_reference();
                let model = HeatSourceModel::new(Expr::zero())?;
                (
                    solver::solve(&model, &reference, &grid, &config, Some(&reference))?,
                    reference,
                )
            }
            ConvergenceCase::Manufactured {
                fhat, reference, ..
            } => {
                let model = HeatSourceModel { fhat: fhat.clone() };
                (
                    solver::solve(&model, reference, &grid, &config, Some(reference))?,
                    reference.clone(),
                )
            }
            ConvergenceCase::Barrier {
                spec, reference, ..
            } => {
                let model = HeatSourceModel { fhat: spec.fhat() };
                (
                    solver::solve_barrier(&model, spec, &grid, &config, reference)?,
                    reference.clone(),
                )
            }
        };
        let norms = solver::error_norms(&solution, &reference)?;
        let csv = match (heath, &spec) {
            (false, _) => solution.csv(),
            (true, Some(s)) => solution.heath_csv(s.a, s.b),
            (true, None) => return Err(CliError::Input("--heath needs a barrier case".into())),
        };
        let last = norms.last().expect("at least one snapshot");
        let summary = json!({
            "case": name,
            "scheme": scheme,
            "grid": grid,
            "h": grid.h(),
            "k": grid.k(),
            "snapshots": solution.snapshots.len(),
            "columns": if heath { "t,x,u" } else { "tau,x,phi" },
            "final": last,
            "max_linf": norms.iter().map(|n| n.linf).fold(0.0, f64::max),
            "warnings": solution.warnings,
        });
        match &self.out {
            Some(path) => {
                write_atomic(path, &csv)?;
                print!("{}", to_json(&summary));
            }
            None => {
                print!("{csv}");
                eprint!("{}", to_json(&summary));
            }
        }
        Ok(true)
    }

    fn converge(
        &self,
        name: CaseName,
        params: Option<&str>,
        levels: Option<&[usize]>,
        scheme: Scheme,
    ) -> Result<bool, CliError> {
        let (case, _) = self.case(name, params)?;
        let levels = match (levels, name) {
            (Some(l), _) => l.to_vec(),
            (None, CaseName::Barrier) => vec![31, 63, 127, 255],
            (None, _) => vec![15, 31, 63, 127],
        };
        let report = solver::convergence_study(&case, &levels, scheme)?;
        self.emit(&to_json(&json!({
            "case": name,
            "scheme": scheme,
            "order": report.order,
            "monotone": report.monotone,
            "levels": report.levels,
        })))?;
        Ok(true)
    }
}

fn map_json(m: &model::CoordinateMap) -> serde_json::Value {
    let [x, tau, phi] = m.forward.clone().map(|e| e.to_string());
    let [xi, t, u] = m.inverse.clone().map(|e| e.to_string());
    json!({
        "forward": { "x": x, "tau": tau, "phi": phi },
        "inverse": { "x": xi, "t": t, "u": u },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("heathsym").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn inadmissible_params_exit_2() {
        let c = cli(&[
            "catalog",
            "verify",
            "A_3_5_2",
            "--params",
            r#"{"B":0,"A":1}"#,
        ]);
        let err = execute(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("B"));
    }

    #[test]
    fn pole_inside_box_is_domain_violation() {
        let c = cli(&["check", "a359", "--params", r#"{"c1":0.2}"#]);
        let err = execute(&c).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("3*b^2*t - 6*c1 + x"));
    }

    #[test]
    fn unknown_check_parameter_is_rejected() {
        let c = cli(&["check", "terminal", "--params", r#"{"q":1}"#]);
        assert_eq!(execute(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn explicit_guard_exit_2() {
        let c = cli(&[
            "solve",
            "heat",
            "--scheme",
            "explicit",
            "--grid",
            r#"{"nt":10}"#,
        ]);
        let err = execute(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("h^2/2"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
