//! Finite differences for `phi_tau = phi_xx + fhat(x, phi)` on a truncated strip.
//!
//! Marching is forward in `tau`, which is backward in Heath time, so a terminal problem
//! becomes an initial-value problem. Boundaries are Dirichlet, either taken from a
//! reference solution or frozen at their initial values. A moving left barrier is handled
//! by masking nodes below it and imposing the barrier datum on the first active node by
//! linear interpolation, which is first order in `h`.

use crate::expr::{CompiledExpr, Expr, ExprError};
use crate::model::{HeatSourceModel, PHI, TAU};
use crate::solutions::BarrierSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

/// Magnitude treated as blow-up.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("explicit scheme unstable: k = {k} exceeds h^2/2 = {bound}")]
    StabilityGuard { k: f64, bound: f64 },
    #[error("solution blew up at tau = {tau}")]
    Blowup { tau: f64 },
    #[error("non-finite value at tau = {tau}, x = {x}")]
    NonFinite { tau: f64, x: f64 },
    #[error("barrier exits grid at tau = {tau} (H = {h})")]
    BarrierExitsGrid { tau: f64, h: f64 },
    #[error("exact Dirichlet boundaries need a reference solution")]
    MissingReference,
    #[error("need >= 3 levels, got {0}")]
    TooFewLevels(usize),
}

/// Uniform grid: `nx` interior nodes between boundary nodes at `x.0` and `x.1`,
/// `nt` steps from `tau.0` to `tau.1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub nx: usize,
    pub tau: (f64, f64),
    pub nt: usize,
}

impl GridSpec {
    pub fn new(x: (f64, f64), nx: usize, tau: (f64, f64), nt: usize) -> Result<Self, SolverError> {
        let g = GridSpec { x, nx, tau, nt };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.nx < 8 {
            return Err(SolverError::InvalidGrid(format!("nx = {} < 8", self.nx)));
        }
        if self.nt < 4 {
            return Err(SolverError::InvalidGrid(format!("nt = {} < 4", self.nt)));
        }
        if !(self.x.0 < self.x.1) {
            return Err(SolverError::InvalidGrid("x range is empty".into()));
        }
        if !(self.tau.0 < self.tau.1) {
            return Err(SolverError::InvalidGrid("tau range is empty".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.x.1 - self.x.0) / (self.nx + 1) as f64
    }

    pub fn k(&self) -> f64 {
        (self.tau.1 - self.tau.0) / self.nt as f64
    }

    /// All `nx + 2` node positions, boundaries included.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.nx + 2).map(|i| self.x.0 + h * i as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ExplicitEuler,
    /// Crank-Nicolson diffusion with a predictor-corrector explicit source.
    CrankNicolsonImex,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "explicit" | "explicit-euler" => Ok(Scheme::ExplicitEuler),
            "cn" | "crank-nicolson-imex" | "cn-imex" => Ok(Scheme::CrankNicolsonImex),
            _ => Err(format!("unknown scheme {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Boundary values from a reference solution at every step.
    ExactDirichlet,
    /// Boundary values frozen at their initial values.
    StaticDirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub boundary: BoundaryMode,
    /// Keep every `stride`-th snapshot; the first and last are always kept.
    pub stride: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            scheme: Scheme::CrankNicolsonImex,
            boundary: BoundaryMode::ExactDirichlet,
            stride: 1,
        }
    }
}

impl SchemeConfig {
    pub fn check_stability(&self, grid: &GridSpec) -> Result<(), SolverError> {
        let (k, h) = (grid.k(), grid.h());
        if self.scheme == Scheme::ExplicitEuler && k > h * h / 2.0 {
            return Err(SolverError::StabilityGuard {
                k,
                bound: h * h / 2.0,
            });
        }
        Ok(())
    }
}

/// The field at one time level. Nodes below `first` lie outside the domain and hold
/// the barrier value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSnapshot {
    pub tau: f64,
    /// Index of the left boundary node.
    pub first: usize,
    pub phi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolverWarning {
    /// `phi <= 0` somewhere, so the map back to Heath variables is undefined there.
    NonPositive { tau: f64, count: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub grid: GridSpec,
    pub snapshots: Vec<FieldSnapshot>,
    pub warnings: Vec<SolverWarning>,
}

impl Solution {
    /// `tau,x,phi` rows, tau-major then x, domain nodes only.
    pub fn csv(&self) -> String {
        let xs = self.grid.nodes();
        let mut out = String::from("tau,x,phi\n");
        for s in &self.snapshots {
            for i in s.first..xs.len() {
                writeln!(out, "{},{},{}", s.tau, xs[i], s.phi[i]).expect("writing to a string");
            }
        }
        out
    }

    /// `t,x,u` rows after mapping back with `t = -2 tau/b^2`, `u = -b^2 ln(phi) - a x`.
    /// Nonpositive values are skipped.
    pub fn heath_csv(&self, a: f64, b: f64) -> String {
        let xs = self.grid.nodes();
        let b2 = b * b;
        let mut out = String::from("t,x,u\n");
        for s in &self.snapshots {
            for i in s.first..xs.len() {
                if s.phi[i] > 0.0 {
                    let u = -b2 * s.phi[i].ln() - a * xs[i];
                    writeln!(out, "{},{},{}", -2.0 * s.tau / b2, xs[i], u)
                        .expect("writing to a string");
                }
            }
        }
        out
    }

    pub fn last(&self) -> &FieldSnapshot {
        self.snapshots
            .last()
            .expect("a solution has at least one snapshot")
    }
}

/// Compiled `fhat(x, phi)`.
struct Source(CompiledExpr);

impl Source {
    fn new(model: &HeatSourceModel) -> Result<Self, ExprError> {
        Ok(Source(model.fhat.compile(&["x", PHI])?))
    }

    fn eval(&self, xs: &[f64], phi: &[f64], from: usize, out: &mut [f64]) -> Result<(), ExprError> {
        let mut stack = Vec::with_capacity(16);
        for i in from..phi.len() {
            out[i] = self.0.eval_with(&[xs[i], phi[i]], &mut stack)?;
        }
        Ok(())
    }
}

/// A function of `(x, tau)`.
struct Field(CompiledExpr);

impl Field {
    fn new(e: &Expr) -> Result<Self, ExprError> {
        Ok(Field(e.compile(&["x", TAU])?))
    }

    fn at(&self, x: f64, tau: f64) -> Result<f64, ExprError> {
        self.0.eval(&[x, tau])
    }
}

/// Left boundary relation `phi[first] = theta phi[first + 1] + (1 - theta) value`.
#[derive(Clone, Copy, Debug)]
struct LeftEdge {
    first: usize,
    theta: f64,
    value: f64,
}

/// Solves `a_i y_{i-1} + b_i y_i + c_i y_{i+1} = d_i` in place; the result is left in `d`.
fn thomas(a: &[f64], b: &[f64], c: &mut [f64], d: &mut [f64]) {
    let n = d.len();
    c[0] /= b[0];
    d[0] /= b[0];
    for i in 1..n {
        let m = b[i] - a[i] * c[i - 1];
        if i + 1 < n {
            c[i] /= m;
        }
        d[i] = (d[i] - a[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
}

struct Stepper<'a> {
    xs: Vec<f64>,
    h: f64,
    k: f64,
    scheme: Scheme,
    source: &'a Source,
    f_old: Vec<f64>,
    f_new: Vec<f64>,
}

impl Stepper<'_> {
    /// Advances `phi` one step. `right` is the new right boundary value.
    fn step(&mut self, phi: &mut Vec<f64>, edge: LeftEdge, right: f64) -> Result<(), ExprError> {
        let n = phi.len();
        let last = n - 1;
        let lo = edge.first;
        self.source.eval(&self.xs, phi, lo, &mut self.f_old)?;
        let r = self.k / (self.h * self.h);
        match self.scheme {
            Scheme::ExplicitEuler => {
                let old = phi.clone();
                for i in lo + 1..last {
                    phi[i] = old[i]
                        + r * (old[i - 1] - 2.0 * old[i] + old[i + 1])
                        + self.k * self.f_old[i];
                }
                phi[last] = right;
                phi[lo] = edge.theta * phi[lo + 1] + (1.0 - edge.theta) * edge.value;
            }
            Scheme::CrankNicolsonImex => {
                let old = phi.clone();
                let predicted = self.cn_solve(&old, edge, right, |i, s: &Self| s.f_old[i]);
                let mut trial = old.clone();
                trial[lo..].copy_from_slice(&predicted[lo..]);
                self.source.eval(&self.xs, &trial, lo, &mut self.f_new)?;
                let corrected = self.cn_solve(&old, edge, right, |i, s: &Self| {
                    0.5 * (s.f_old[i] + s.f_new[i])
                });
                phi[lo..].copy_from_slice(&corrected[lo..]);
            }
        }
        Ok(())
    }

    fn cn_solve(
        &self,
        old: &[f64],
        edge: LeftEdge,
        right: f64,
        src: impl Fn(usize, &Self) -> f64,
    ) -> Vec<f64> {
        let n = old.len();
        let last = n - 1;
        let lo = edge.first;
        let m = last - lo;
        let half = 0.5 * self.k / (self.h * self.h);
        let (mut a, mut b, mut c, mut d) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        // row 0 is the boundary relation at node lo
        b[0] = 1.0;
        c[0] = -edge.theta;
        d[0] = (1.0 - edge.theta) * edge.value;
        for j in 1..m {
            let i = lo + j;
            a[j] = -half;
            b[j] = 1.0 + 2.0 * half;
            c[j] = -half;
            d[j] = old[i] + half * (old[i - 1] - 2.0 * old[i] + old[i + 1]) + self.k * src(i, self);
        }
        d[m - 1] += half * right;
        c[m - 1] = 0.0;
        thomas(&a, &b, &mut c, &mut d);
        let mut out = old.to_vec();
        out[lo..last].copy_from_slice(&d);
        out[last] = right;
        out
    }
}

fn check_field(phi: &[f64], from: usize, xs: &[f64], tau: f64) -> Result<usize, SolverError> {
    let mut nonpositive = 0;
    for i in from..phi.len() {
        let v = phi[i];
        if !v.is_finite() {
            return Err(SolverError::NonFinite { tau, x: xs[i] });
        }
        if v.abs() > BLOWUP {
            return Err(SolverError::Blowup { tau });
        }
        if v <= 0.0 {
            nonpositive += 1;
        }
    }
    Ok(nonpositive)
}

struct Recorder {
    stride: usize,
    nt: usize,
    snapshots: Vec<FieldSnapshot>,
    warnings: Vec<SolverWarning>,
}

impl Recorder {
    fn record(
        &mut self,
        step: usize,
        tau: f64,
        first: usize,
        phi: &[f64],
        xs: &[f64],
    ) -> Result<(), SolverError> {
        let nonpositive = check_field(phi, first, xs, tau)?;
        if nonpositive > 0 {
            self.warnings.push(SolverWarning::NonPositive {
                tau,
                count: nonpositive,
            });
        }
        if step % self.stride.max(1) == 0 || step == self.nt {
            self.snapshots.push(FieldSnapshot {
                tau,
                first,
                phi: phi.to_vec(),
            });
        }
        Ok(())
    }
}

/// Marches `phi_tau = phi_xx + fhat` from `init` (a function of `x`, possibly of `tau`
/// evaluated at the start time). `reference` supplies exact Dirichlet data.
pub fn solve(
    model: &HeatSourceModel,
    init: &Expr,
    grid: &GridSpec,
    config: &SchemeConfig,
    reference: Option<&Expr>,
) -> Result<Solution, SolverError> {
    grid.validate()?;
    config.check_stability(grid)?;
    let reference = match (config.boundary, reference) {
        (BoundaryMode::ExactDirichlet, None) => return Err(SolverError::MissingReference),
        (BoundaryMode::ExactDirichlet, Some(r)) => Some(Field::new(r)?),
        (BoundaryMode::StaticDirichlet, _) => None,
    };
    let source = Source::new(model)?;
    let xs = grid.nodes();
    let start = Field::new(init)?;
    let mut phi: Vec<f64> = xs
        .iter()
        .map(|&x| start.at(x, grid.tau.0))
        .collect::<Result<_, _>>()?;
    let (left0, right0) = (phi[0], phi[xs.len() - 1]);
    let edge_at = |tau: f64| -> Result<(f64, f64), ExprError> {
        match &reference {
            Some(r) => Ok((r.at(xs[0], tau)?, r.at(xs[xs.len() - 1], tau)?)),
            None => Ok((left0, right0)),
        }
    };

    let mut rec = Recorder {
        stride: config.stride,
        nt: grid.nt,
        snapshots: Vec::new(),
        warnings: Vec::new(),
    };
    rec.record(0, grid.tau.0, 0, &phi, &xs)?;
    let n = xs.len();
    let mut stepper = Stepper {
        xs: xs.clone(),
        h: grid.h(),
        k: grid.k(),
        scheme: config.scheme,
        source: &source,
        f_old: vec![0.0; n],
        f_new: vec![0.0; n],
    };
    for step in 1..=grid.nt {
        let tau = grid.tau.0 + grid.k() * step as f64;
        let (left, right) = edge_at(tau)?;
        stepper.step(
            &mut phi,
            LeftEdge {
                first: 0,
                theta: 0.0,
                value: left,
            },
            right,
        )?;
        rec.record(step, tau, 0, &phi, &xs)?;
    }
    Ok(Solution {
        grid: *grid,
        snapshots: rec.snapshots,
        warnings: rec.warnings,
    })
}

/// Index of the first node strictly right of the barrier and its interpolation weight.
fn barrier_edge(xs: &[f64], barrier: f64, tau: f64) -> Result<(usize, f64), SolverError> {
    let last = xs.len() - 1;
    if !(barrier >= xs[0] && barrier < xs[last - 2]) {
        return Err(SolverError::BarrierExitsGrid { tau, h: barrier });
    }
    let first = xs
        .iter()
        .position(|&x| x > barrier)
        .expect("barrier lies inside the grid");
    let theta = (xs[first] - barrier) / (xs[first + 1] - barrier);
    Ok((first, theta))
}

/// Solves the barrier problem: left boundary `x = H(tau)` carrying
/// `phi = exp(-(a H + R)/b^2)`, right boundary and initial field from `reference`.
pub fn solve_barrier(
    model: &HeatSourceModel,
    spec: &BarrierSpec,
    grid: &GridSpec,
    config: &SchemeConfig,
    reference: &Expr,
) -> Result<Solution, SolverError> {
    grid.validate()?;
    config.check_stability(grid)?;
    let source = Source::new(model)?;
    let reference = Field::new(reference)?;
    let barrier = spec.h.compile(&[TAU])?;
    let datum = spec.boundary_phi().compile(&[TAU])?;
    let xs = grid.nodes();
    let n = xs.len();

    let tau0 = grid.tau.0;
    let (h0, g0) = (barrier.eval(&[tau0])?, datum.eval(&[tau0])?);
    let (mut first, _) = barrier_edge(&xs, h0, tau0)?;
    let mut phi = vec![g0; n];
    for i in first..n {
        phi[i] = reference.at(xs[i], tau0)?;
    }
    let right_static = phi[n - 1];
    let mut rec = Recorder {
        stride: config.stride,
        nt: grid.nt,
        snapshots: Vec::new(),
        warnings: Vec::new(),
    };
    rec.record(0, tau0, first, &phi, &xs)?;

    let mut stepper = Stepper {
        xs: xs.clone(),
        h: grid.h(),
        k: grid.k(),
        scheme: config.scheme,
        source: &source,
        f_old: vec![0.0; n],
        f_new: vec![0.0; n],
    };
    let (mut h_old, mut g_old) = (h0, g0);
    for step in 1..=grid.nt {
        let tau = tau0 + grid.k() * step as f64;
        let (h_new, g_new) = (barrier.eval(&[tau])?, datum.eval(&[tau])?);
        let (new_first, theta) = barrier_edge(&xs, h_new, tau)?;
        // nodes uncovered by a receding barrier start from the line through the old datum
        if new_first < first {
            let slope = (phi[first] - g_old) / (xs[first] - h_old);
            for i in new_first..first {
                phi[i] = g_old + slope * (xs[i] - h_old);
            }
        }
        first = new_first;
        let right = match config.boundary {
            BoundaryMode::ExactDirichlet => reference.at(xs[n - 1], tau)?,
            BoundaryMode::StaticDirichlet => right_static,
        };
        stepper.step(
            &mut phi,
            LeftEdge {
                first,
                theta,
                value: g_new,
            },
            right,
        )?;
        for v in &mut phi[..first] {
            *v = g_new;
        }
        rec.record(step, tau, first, &phi, &xs)?;
        (h_old, g_old) = (h_new, g_new);
    }
    Ok(Solution {
        grid: *grid,
        snapshots: rec.snapshots,
        warnings: rec.warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorNorm {
    pub tau: f64,
    pub linf: f64,
    /// `sqrt(h * sum e_i^2)` over interior nodes.
    pub l2: f64,
}

/// Discrete norms of `phi - reference` over the interior nodes of each snapshot.
pub fn error_norms(solution: &Solution, reference: &Expr) -> Result<Vec<ErrorNorm>, SolverError> {
    let r = Field::new(reference)?;
    let xs = solution.grid.nodes();
    let h = solution.grid.h();
    solution
        .snapshots
        .iter()
        .map(|s| {
            let (mut linf, mut sq) = (0.0f64, 0.0);
            for i in s.first + 1..xs.len() - 1 {
                let e = s.phi[i] - r.at(xs[i], s.tau)?;
                linf = linf.max(e.abs());
                sq += e * e;
            }
            Ok(ErrorNorm {
                tau: s.tau,
                linf,
                l2: (h * sq).sqrt(),
            })
        })
        .collect()
}

/// Problems with a known exact solution used for order studies.
#[derive(Clone, Debug)]
pub enum ConvergenceCase {
    /// `phi_tau = phi_xx` on `[0, 1]`, `phi = exp(-pi^2 tau) sin(pi x)`, `tau` in `[0, 0.1]`.
    HeatBenchmark,
    /// Any source with an exact solution, exact Dirichlet data on a fixed strip.
    Manufactured {
        fhat: Expr,
        reference: Expr,
        x: (f64, f64),
        tau: (f64, f64),
    },
    /// Moving left barrier, right boundary and start field from `reference`.
    Barrier {
        spec: BarrierSpec,
        reference: Expr,
        x: (f64, f64),
        tau: (f64, f64),
    },
}

impl ConvergenceCase {
    pub fn heat_reference() -> Expr {
        let pi = Expr::real(std::f64::consts::PI);
        let mut map = std::collections::HashMap::new();
        map.insert("pi".to_string(), pi);
        Expr::parse("exp(-pi^2*tau)*sin(pi*x)")
            .expect("benchmark parses")
            .substitute_all(&map)
    }

    fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        match self {
            ConvergenceCase::HeatBenchmark => ((0.0, 1.0), (0.0, 0.1)),
            ConvergenceCase::Manufactured { x, tau, .. }
            | ConvergenceCase::Barrier { x, tau, .. } => (*x, *tau),
        }
    }

    /// Grid for `nx` interior nodes: `nt = nx + 1` for CN, so `k` is a fixed multiple of `h`,
    /// and `k <= 0.4 h^2` for the explicit scheme.
    pub fn grid(&self, nx: usize, scheme: Scheme) -> Result<GridSpec, SolverError> {
        let (x, tau) = self.ranges();
        let h = (x.1 - x.0) / (nx + 1) as f64;
        let nt = match scheme {
            Scheme::CrankNicolsonImex => nx + 1,
            Scheme::ExplicitEuler => ((tau.1 - tau.0) / (0.4 * h * h)).ceil() as usize,
        };
        GridSpec::new(x, nx, tau, nt.max(4))
    }

    /// Runs one level and returns the solution and its reference.
    pub fn run(&self, nx: usize, scheme: Scheme) -> Result<(Solution, Expr), SolverError> {
        let grid = self.grid(nx, scheme)?;
        let config = SchemeConfig {
            scheme,
            boundary: BoundaryMode::ExactDirichlet,
            stride: usize::MAX,
        };
        match self {
            ConvergenceCase::HeatBenchmark => {
                let reference = Self::heat_reference();
                let model = HeatSourceModel::new(Expr::zero()).expect("zero source is valid");
                Ok((
                    solve(&model, &reference, &grid, &config, Some(&reference))?,
                    reference,
                ))
            }
            ConvergenceCase::Manufactured {
                fhat, reference, ..
            } => {
                let model = HeatSourceModel { fhat: fhat.clone() };
                Ok((
                    solve(&model, reference, &grid, &config, Some(reference))?,
                    reference.clone(),
                ))
            }
            ConvergenceCase::Barrier {
                spec, reference, ..
            } => {
                let model = HeatSourceModel { fhat: spec.fhat() };
                Ok((
                    solve_barrier(&model, spec, &grid, &config, reference)?,
                    reference.clone(),
                ))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Level {
    pub nx: usize,
    pub nt: usize,
    pub h: f64,
    /// Final-time interior L-infinity error.
    pub linf: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<Level>,
    /// Least-squares slope of `ln(linf)` against `ln(h)`.
    pub order: f64,
    /// Whether the error decreased at every refinement.
    pub monotone: bool,
}

/// Runs the case at each `nx` concurrently and fits the observed order.
pub fn convergence_study(
    case: &ConvergenceCase,
    levels: &[usize],
    scheme: Scheme,
) -> Result<ConvergenceReport, SolverError> {
    if levels.len() < 3 {
        return Err(SolverError::TooFewLevels(levels.len()));
    }
    let results: Vec<Level> = levels
        .par_iter()
        .map(|&nx| {
            let (sol, reference) = case.run(nx, scheme)?;
            let norms = error_norms(&sol, &reference)?;
            let last = norms.last().expect("at least one snapshot");
            Ok(Level {
                nx,
                nt: sol.grid.nt,
                h: sol.grid.h(),
                linf: last.linf,
                l2: last.l2,
            })
        })
        .collect::<Result<_, SolverError>>()?;
    let pts: Vec<(f64, f64)> = results.iter().map(|l| (l.h.ln(), l.linf.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let mut sorted = results.clone();
    sorted.sort_by(|a, b| b.h.total_cmp(&a.h));
    let monotone = sorted.windows(2).all(|w| w[1].linf < w[0].linf);
    Ok(ConvergenceReport {
        levels: results,
        order: sxy / sxx,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{barrier_heat_form, exponential_barrier};

    fn cn() -> SchemeConfig {
        SchemeConfig::default()
    }

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 2 1; 0 1 2] y = [4 8 8] has y = [1 2 3]
        let (a, b) = ([0.0, 1.0, 1.0], [2.0, 2.0, 2.0]);
        let (mut c, mut d) = ([1.0, 1.0, 0.0], [4.0, 8.0, 8.0]);
        thomas(&a, &b, &mut c, &mut d);
        for (got, want) in d.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn heat_benchmark_decays() {
        let (sol, reference) = ConvergenceCase::HeatBenchmark
            .run(128, Scheme::CrankNicolsonImex)
            .unwrap();
        let err = error_norms(&sol, &reference).unwrap();
        assert!(err.last().unwrap().linf < 1e-3);
    }

    #[test]
    fn explicit_guard_rejects_large_steps() {
        let grid = GridSpec::new((0.0, 1.0), 15, (0.0, 0.1), 4).unwrap();
        let cfg = SchemeConfig {
            scheme: Scheme::ExplicitEuler,
            ..cn()
        };
        let model = HeatSourceModel::parse("0").unwrap();
        let err = solve(
            &model,
            &ConvergenceCase::heat_reference(),
            &grid,
            &cfg,
            Some(&ConvergenceCase::heat_reference()),
        );
        assert!(matches!(err, Err(SolverError::StabilityGuard { .. })));
    }

    #[test]
    fn explicit_scheme_keeps_maximum_principle() {
        let grid = GridSpec::new((0.0, 1.0), 31, (0.0, 0.05), 200).unwrap();
        let cfg = SchemeConfig {
            scheme: Scheme::ExplicitEuler,
            boundary: BoundaryMode::StaticDirichlet,
            stride: 1,
        };
        let model = HeatSourceModel::parse("0").unwrap();
        let init = Expr::parse("x*(1 - x)*4").unwrap();
        let sol = solve(&model, &init, &grid, &cfg, None).unwrap();
        for s in &sol.snapshots {
            assert!(s.phi.iter().all(|&v| (-1e-15..=1.0 + 1e-15).contains(&v)));
        }
    }

    #[test]
    fn one_step_from_exact_data_is_third_order() {
        // quadratic in x, so the discrete Laplacian is exact and only the time error remains
        let reference = Expr::parse("exp(tau)*(1 + x^2)").unwrap();
        let model = HeatSourceModel::parse("phi*(1 - 2/(1 + x^2))").unwrap();
        let err_for = |k: f64| {
            let grid = GridSpec::new((0.0, 1.0), 15, (0.0, 4.0 * k), 4).unwrap();
            let sol = solve(&model, &reference, &grid, &cn(), Some(&reference)).unwrap();
            error_norms(&sol, &reference).unwrap()[1].linf
        };
        let (e1, e2) = (err_for(1e-2), err_for(5e-3));
        assert!(e1 / e2 > 6.0, "{e1} {e2}");
    }

    #[test]
    fn norms_of_exact_and_shifted_fields() {
        let grid = GridSpec::new((0.0, 1.0), 9, (0.0, 1.0), 4).unwrap();
        let reference = Expr::parse("x + tau").unwrap();
        let xs = grid.nodes();
        let snap = |shift: f64| FieldSnapshot {
            tau: 0.5,
            first: 0,
            phi: xs.iter().map(|x| x + 0.5 + shift).collect(),
        };
        let sol = Solution {
            grid,
            snapshots: vec![snap(0.0), snap(0.25)],
            warnings: Vec::new(),
        };
        let n = error_norms(&sol, &reference).unwrap();
        assert!(n[0].linf < 1e-15);
        assert!((n[1].linf - 0.25).abs() < 1e-15);
    }

    #[test]
    fn barrier_run_tracks_closed_form() {
        let spec = exponential_barrier(1.0, 1.0, 0.05, 0.9, 1.0, 1.0, 1.0).unwrap();
        let reference = barrier_heat_form(&spec);
        let case = ConvergenceCase::Barrier {
            spec,
            reference,
            x: (0.5, 3.0),
            tau: (-0.5, 0.0),
        };
        let (sol, reference) = case.run(256, Scheme::CrankNicolsonImex).unwrap();
        let err = error_norms(&sol, &reference).unwrap();
        assert!(err.iter().all(|e| e.linf < 1e-2));
        assert!(sol.csv().starts_with("tau,x,phi\n"));
    }

    #[test]
    fn barrier_leaving_grid_is_an_error() {
        let spec = exponential_barrier(1.0, 1.0, 0.05, 0.9, 1.0, 1.0, 1.0).unwrap();
        let reference = barrier_heat_form(&spec);
        let grid = GridSpec::new((0.88, 3.0), 64, (-0.5, 0.0), 32).unwrap();
        let model = HeatSourceModel { fhat: spec.fhat() };
        let err = solve_barrier(&model, &spec, &grid, &cn(), &reference);
        assert!(matches!(err, Err(SolverError::BarrierExitsGrid { .. })));
    }

    #[test]
    fn too_few_levels() {
        let r = convergence_study(
            &ConvergenceCase::HeatBenchmark,
            &[16, 32],
            Scheme::CrankNicolsonImex,
        );
        assert!(matches!(r, Err(SolverError::TooFewLevels(2))));
    }
}
