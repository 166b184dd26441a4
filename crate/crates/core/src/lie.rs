//! Lie point symmetries of scalar second-order evolution equations `u_t = rhs(x, t, u, u_x, u_xx)`.
//!
//! Generators, equations and jets use the canonical names `x`, `t`, `u` and
//! `u_x`, `u_t`, `u_xx`, `u_xt`, `u_xxx`. Expressions written in heat variables
//! (`tau`, `phi`) are converted with [`to_canonical`].

use crate::expr::{Bindings, CompiledExpr, Expr, ExprError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

pub const X: &str = "x";
pub const T: &str = "t";
pub const U: &str = "u";
pub const U_X: &str = "u_x";
pub const U_T: &str = "u_t";
pub const U_XX: &str = "u_xx";
pub const U_XT: &str = "u_xt";
pub const U_TT: &str = "u_tt";
pub const U_XXX: &str = "u_xxx";
pub const U_XXT: &str = "u_xxt";

/// Slots of a [`JetPoint`], in the order used by compiled conditions.
pub const JET_SLOTS: [&str; 6] = [X, T, U, U_X, U_XX, U_XXX];

/// Scaled residual below which a generator is accepted.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Default seed for every randomized check.
pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, Error)]
pub enum LieError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("equation is not parabolic: rhs does not depend on u_xx")]
    NotParabolic,
    #[error("no sample point could be evaluated ({attempted} attempted); last error: {last}")]
    Unsamplable { attempted: usize, last: String },
}

/// Renames heat variables `tau`, `phi` to the canonical `t`, `u`.
pub fn to_canonical(e: &Expr) -> Expr {
    e.rename(&[("tau", T), ("phi", U)])
}

/// Renames canonical `t`, `u` back to `tau`, `phi`.
pub fn to_heat(e: &Expr) -> Expr {
    e.rename(&[(T, "tau"), (U, "phi")])
}

/// Infinitesimal generator `xi_x d/dx + xi_t d/dt + eta d/du`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub xi_x: Expr,
    pub xi_t: Expr,
    pub eta: Expr,
}

impl Generator {
    pub fn new(xi_x: Expr, xi_t: Expr, eta: Expr) -> Self {
        Generator { xi_x, xi_t, eta }
    }

    pub fn parse(xi_x: &str, xi_t: &str, eta: &str) -> Result<Self, ExprError> {
        Ok(Generator::new(
            Expr::parse(xi_x)?,
            Expr::parse(xi_t)?,
            Expr::parse(eta)?,
        ))
    }

    /// Builds a generator from coefficients written in `(x, tau, phi)`.
    pub fn from_heat(xi_x: &Expr, xi_tau: &Expr, eta: &Expr) -> Self {
        Generator::new(to_canonical(xi_x), to_canonical(xi_tau), to_canonical(eta))
    }

    pub fn parse_heat(xi_x: &str, xi_tau: &str, eta: &str) -> Result<Self, ExprError> {
        Ok(Generator::from_heat(
            &Expr::parse(xi_x)?,
            &Expr::parse(xi_tau)?,
            &Expr::parse(eta)?,
        ))
    }

    /// Time translation.
    pub fn time_translation() -> Self {
        Generator::new(Expr::zero(), Expr::one(), Expr::zero())
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi_x, &self.xi_t, &self.eta]
    }

    /// Coefficients rewritten in heat variables.
    pub fn heat_components(&self) -> [Expr; 3] {
        self.components().map(to_heat)
    }

    pub fn scale(&self, c: &Expr) -> Self {
        let [a, b, e] = self
            .components()
            .map(|k| Expr::mul_all([c.clone(), k.clone()]));
        Generator::new(a, b, e)
    }

    pub fn add(&self, other: &Generator) -> Self {
        Generator::new(
            &self.xi_x + &other.xi_x,
            &self.xi_t + &other.xi_t,
            &self.eta + &other.eta,
        )
    }

    /// Linear combination `sum c_i X_i`.
    pub fn combine(terms: &[(Expr, &Generator)]) -> Self {
        let mut out = Generator::new(Expr::zero(), Expr::zero(), Expr::zero());
        for (c, g) in terms {
            out = out.add(&g.scale(c));
        }
        out
    }

    pub fn substitute_all(&self, map: &HashMap<String, Expr>) -> Self {
        let [a, b, e] = self.components().map(|k| k.substitute_all(map));
        Generator::new(a, b, e)
    }

    /// The generator acting on a function of `(x, t, u)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::add_all([
            &self.xi_x * f.diff(X),
            &self.xi_t * f.diff(T),
            &self.eta * f.diff(U),
        ])
    }

    /// Commutator `[self, other]`.
    pub fn bracket(&self, other: &Generator) -> Generator {
        let comp = |i: usize| {
            self.apply(other.components()[i])
                .sub(&other.apply(self.components()[i]))
        };
        Generator::new(comp(0), comp(1), comp(2))
    }

    pub fn simplify(&self) -> Self {
        let [a, b, e] = self.components().map(Expr::simplify);
        Generator::new(a, b, e)
    }
}

/// Values of the independent jet coordinates; `u_t` and `u_xt` follow from the equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JetPoint {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_xx: f64,
    pub u_xxx: f64,
}

impl JetPoint {
    pub fn as_array(&self) -> [f64; 6] {
        [self.x, self.t, self.u, self.u_x, self.u_xx, self.u_xxx]
    }

    pub fn bindings(&self) -> Bindings {
        JET_SLOTS
            .iter()
            .zip(self.as_array())
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }
}

/// Total derivative in `x` over the jet coordinates.
pub fn total_dx(e: &Expr) -> Expr {
    let chain = [
        (U, U_X),
        (U_X, U_XX),
        (U_T, U_XT),
        (U_XX, U_XXX),
        (U_XT, U_XXT),
    ];
    let mut terms = vec![e.diff(X)];
    for (var, next) in chain {
        if e.depends_on(var) {
            terms.push(e.diff(var) * Expr::sym(next));
        }
    }
    Expr::add_all(terms)
}

/// Total derivative in `t` over the jet coordinates.
pub fn total_dt(e: &Expr) -> Expr {
    let chain = [(U, U_T), (U_X, U_XT), (U_T, U_TT), (U_XX, U_XXT)];
    let mut terms = vec![e.diff(T)];
    for (var, next) in chain {
        if e.depends_on(var) {
            terms.push(e.diff(var) * Expr::sym(next));
        }
    }
    Expr::add_all(terms)
}

/// `u_t = rhs(x, t, u, u_x, u_xx)`.
#[derive(Clone, Debug)]
pub struct EvolutionPde {
    rhs: Expr,
}

impl EvolutionPde {
    pub fn new(rhs: Expr) -> Result<Self, LieError> {
        if rhs.diff(U_XX).is_zero() {
            return Err(LieError::NotParabolic);
        }
        Ok(EvolutionPde { rhs })
    }

    /// `phi_tau = phi_xx + fhat(x, phi)`; `fhat` may be written in heat or canonical names.
    pub fn heat_with_source(fhat: &Expr) -> Self {
        EvolutionPde {
            rhs: Expr::sym(U_XX) + to_canonical(fhat),
        }
    }

    /// `u_t = a u_x + u_x^2/2 - b^2 u_xx/2 + f(x, u)`.
    pub fn heath(a: f64, b: f64, f: &Expr) -> Result<Self, LieError> {
        let ux = Expr::sym(U_X);
        let rhs = Expr::add_all([
            Expr::real(a) * &ux,
            Expr::ratio(1, 2) * ux.powi(2),
            Expr::real(-b * b / 2.0) * Expr::sym(U_XX),
            f.clone(),
        ]);
        EvolutionPde::new(rhs)
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    /// Coefficient of `u_xx`.
    pub fn diffusion(&self) -> Expr {
        self.rhs.diff(U_XX)
    }

    /// `u_t - rhs` for an explicit candidate `u(x, t)`.
    pub fn residual_of(&self, u: &Expr) -> Expr {
        let ux = u.diff(X);
        let uxx = ux.diff(X);
        let mut map = HashMap::new();
        map.insert(U.to_string(), u.clone());
        map.insert(U_X.to_string(), ux);
        map.insert(U_XX.to_string(), uxx);
        u.diff(T).sub(&self.rhs.substitute_all(&map))
    }
}

/// Second prolongation coefficients.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub eta_x: Expr,
    pub eta_t: Expr,
    pub eta_xx: Expr,
}

pub fn prolong2(g: &Generator) -> Prolongation {
    let ux = Expr::sym(U_X);
    let ut = Expr::sym(U_T);
    let dx_xi = total_dx(&g.xi_x);
    let dx_tau = total_dx(&g.xi_t);
    let eta_x = total_dx(&g.eta).sub(&(&ux * &dx_xi)).sub(&(&ut * &dx_tau));
    let eta_t = total_dt(&g.eta)
        .sub(&(&ux * total_dt(&g.xi_x)))
        .sub(&(&ut * total_dt(&g.xi_t)));
    let eta_xx = total_dx(&eta_x)
        .sub(&(Expr::sym(U_XX) * &dx_xi))
        .sub(&(Expr::sym(U_XT) * &dx_tau));
    Prolongation {
        eta_x,
        eta_t,
        eta_xx,
    }
}

/// The linearized symmetry condition `X^(2)(rhs - u_t)` restricted to solutions,
/// kept as a list of summands so residuals can be scaled by their largest term.
#[derive(Clone, Debug)]
pub struct SymmetryCondition {
    summands: Vec<Expr>,
    compiled: Vec<CompiledExpr>,
}

const SUMMAND_CAP: usize = 512;

impl SymmetryCondition {
    pub fn new(pde: &EvolutionPde, g: &Generator) -> Result<Self, LieError> {
        Self::with_parameters(pde, g, &[])
    }

    /// Like [`new`](Self::new) but leaves `params` free; their values are passed
    /// to [`evaluate_with`](Self::evaluate_with) after the jet coordinates.
    pub fn with_parameters(
        pde: &EvolutionPde,
        g: &Generator,
        params: &[&str],
    ) -> Result<Self, LieError> {
        let rhs = pde.rhs();
        let pr = prolong2(g);
        let raw = [
            &g.xi_x * rhs.diff(X),
            &g.xi_t * rhs.diff(T),
            &g.eta * rhs.diff(U),
            &pr.eta_x * rhs.diff(U_X),
            &pr.eta_xx * rhs.diff(U_XX),
            -&pr.eta_t,
        ];
        // u_xt first: its value contains no u_t, while eta_xx holds both.
        let mut on_manifold = HashMap::new();
        on_manifold.insert(U_XT.to_string(), total_dx(rhs));
        let mut then_ut = HashMap::new();
        then_ut.insert(U_T.to_string(), rhs.clone());
        let mut summands = Vec::new();
        for term in raw {
            if term.is_zero() {
                continue;
            }
            let term = term.substitute_all(&on_manifold).substitute_all(&then_ut);
            summands.extend(
                term.summands(SUMMAND_CAP)
                    .into_iter()
                    .filter(|s| !s.is_zero()),
            );
        }
        let slots: Vec<&str> = JET_SLOTS.iter().chain(params).copied().collect();
        let compiled = summands
            .iter()
            .map(|s| s.compile(&slots))
            .collect::<Result<_, _>>()?;
        Ok(SymmetryCondition { summands, compiled })
    }

    pub fn summands(&self) -> &[Expr] {
        &self.summands
    }

    /// The condition as a single expression over the jet slots.
    pub fn expr(&self) -> Expr {
        Expr::add_all(self.summands.clone())
    }

    /// Returns `(value, largest |summand|)` at `p`.
    pub fn evaluate(&self, p: &JetPoint) -> Result<(f64, f64), ExprError> {
        self.evaluate_with(p, &[])
    }

    pub fn evaluate_with(&self, p: &JetPoint, params: &[f64]) -> Result<(f64, f64), ExprError> {
        let mut args = p.as_array().to_vec();
        args.extend_from_slice(params);
        let mut stack = Vec::with_capacity(32);
        let mut total = 0.0;
        let mut scale: f64 = 0.0;
        for c in &self.compiled {
            let v = c.eval_with(&args, &mut stack)?;
            total += v;
            scale = scale.max(v.abs());
        }
        Ok((total, scale))
    }

    /// `|value| / max |summand|`, or zero when every summand vanishes.
    pub fn scaled(&self, p: &JetPoint) -> Result<f64, ExprError> {
        let (v, s) = self.evaluate(p)?;
        Ok(if s == 0.0 { 0.0 } else { v.abs() / s })
    }

    /// The summand with the largest magnitude at `p`, for diagnostics.
    pub fn dominant_summand(&self, p: &JetPoint) -> Option<(String, f64)> {
        let args = p.as_array();
        self.compiled
            .iter()
            .zip(&self.summands)
            .filter_map(|(c, s)| c.eval(&args).ok().map(|v| (s.to_string(), v)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    }
}

/// Raw value of the on-manifold symmetry condition at one jet point.
pub fn symmetry_residual(pde: &EvolutionPde, g: &Generator, p: &JetPoint) -> Result<f64, LieError> {
    Ok(SymmetryCondition::new(pde, g)?.evaluate(p)?.0)
}

/// Sampling ranges for jet points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleBox {
    pub x: (f64, f64),
    pub t: (f64, f64),
    pub u: (f64, f64),
    pub u_x: (f64, f64),
    pub u_xx: (f64, f64),
    pub u_xxx: (f64, f64),
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            x: (1.0, 2.0),
            t: (0.0, 0.5),
            u: (0.5, 1.5),
            u_x: (-1.0, 1.0),
            u_xx: (-1.0, 1.0),
            u_xxx: (-1.0, 1.0),
        }
    }
}

impl SampleBox {
    pub fn sample(&self, rng: &mut impl Rng) -> JetPoint {
        let mut draw = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.gen_range(lo..hi) };
        JetPoint {
            x: draw(self.x),
            t: draw(self.t),
            u: draw(self.u),
            u_x: draw(self.u_x),
            u_xx: draw(self.u_xx),
            u_xxx: draw(self.u_xxx),
        }
    }

    /// Deterministic points: point `i` comes from its own stream of the seeded generator,
    /// so the set does not depend on evaluation order.
    pub fn points(&self, n: usize, seed: u64) -> Vec<JetPoint> {
        (0..n)
            .map(|i| self.sample(&mut point_rng(seed, i as u64)))
            .collect()
    }
}

pub fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// Largest scaled residual over evaluable points.
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Largest unscaled residual.
    pub max_raw: f64,
    /// Points whose scaled residual exceeds the tolerance.
    pub points_failed: usize,
    /// Points skipped because evaluation hit a domain violation.
    pub points_skipped: usize,
    pub points: usize,
    pub tolerance: f64,
    pub passed: bool,
    /// Largest summand at the worst point, when the check fails.
    pub worst_term: Option<String>,
}

/// Samples the symmetry condition at `n` seeded jet points.
pub fn check_symmetry(
    pde: &EvolutionPde,
    g: &Generator,
    n: usize,
    seed: u64,
    sample_box: &SampleBox,
    tolerance: f64,
) -> Result<SymmetryReport, LieError> {
    let cond = SymmetryCondition::new(pde, g)?;
    check_condition(&cond, n, seed, sample_box, tolerance)
}

pub fn check_condition(
    cond: &SymmetryCondition,
    n: usize,
    seed: u64,
    sample_box: &SampleBox,
    tolerance: f64,
) -> Result<SymmetryReport, LieError> {
    let points = sample_box.points(n.max(1), seed);
    let results: Vec<_> = points
        .par_iter()
        .map(|p| cond.evaluate(p).map(|(v, s)| (p, v, s)))
        .collect();
    let mut scaled = Vec::new();
    let mut max_raw: f64 = 0.0;
    let mut worst: Option<(&JetPoint, f64)> = None;
    let mut last_err = None;
    for r in &results {
        match r {
            Ok((p, v, s)) => {
                let r = if *s == 0.0 { 0.0 } else { v.abs() / s };
                max_raw = max_raw.max(v.abs());
                if worst.is_none_or(|(_, w)| r > w) {
                    worst = Some((p, r));
                }
                scaled.push(r);
            }
            Err(e) => last_err = Some(e.to_string()),
        }
    }
    if scaled.is_empty() {
        return Err(LieError::Unsamplable {
            attempted: points.len(),
            last: last_err.unwrap_or_default(),
        });
    }
    let max_abs = scaled.iter().cloned().fold(0.0, f64::max);
    let passed = max_abs < tolerance;
    Ok(SymmetryReport {
        max_abs,
        mean_abs: scaled.iter().sum::<f64>() / scaled.len() as f64,
        max_raw,
        points_failed: scaled.iter().filter(|r| **r >= tolerance).count(),
        points_skipped: points.len() - scaled.len(),
        points: points.len(),
        tolerance,
        passed,
        worst_term: if passed {
            None
        } else {
            worst
                .and_then(|(p, _)| cond.dominant_summand(p))
                .map(|t| t.0)
        },
    })
}

/// The arbitrary functions `F1(x, t)`, `F2(t)`, `F3(t)`, `F4(t)` of the classification equation.
#[derive(Clone, Debug)]
pub struct ClassificationFunctions {
    pub f1: Expr,
    pub f2: Expr,
    pub f3: Expr,
    pub f4: Expr,
}

impl ClassificationFunctions {
    pub fn parse(f1: &str, f2: &str, f3: &str, f4: &str) -> Result<Self, ExprError> {
        Ok(ClassificationFunctions {
            f1: Expr::parse(f1)?,
            f2: Expr::parse(f2)?,
            f3: Expr::parse(f3)?,
            f4: Expr::parse(f4)?,
        })
    }

    /// The heat-equation generator these functions parametrize:
    /// `xi_t = -F2`, `xi_x = F3 - x F2'/2`, `eta = (F4 + x(x F2'' - 4 F3')/8) u + F1`.
    pub fn generator(&self) -> Generator {
        let x = Expr::sym(X);
        let d2 = self.f2.diff(T);
        let dd2 = d2.diff(T);
        let d3 = self.f3.diff(T);
        let xi_x = self.f3.sub(&(&x * d2 / Expr::int(2)));
        let coeff = &self.f4 + &x * (&x * dd2 - Expr::int(4) * d3) / Expr::int(8);
        Generator::new(xi_x, -&self.f2, coeff * Expr::sym(U) + &self.f1)
    }

    /// The classification equation for the source `fhat(x, u)`, as an expression in `(x, t, u)`.
    pub fn residual_expr(&self, fhat: &Expr) -> Expr {
        let fhat = to_canonical(fhat);
        let (x, phi) = (Expr::sym(X), Expr::sym(U));
        let d2 = self.f2.diff(T);
        let dd2 = d2.diff(T);
        let ddd2 = dd2.diff(T);
        let d3 = self.f3.diff(T);
        let dd3 = d3.diff(T);
        let d4 = self.f4.diff(T);
        let eight = || Expr::int(8);
        let bracket = eight() * &self.f4 + &x * (&x * &dd2 - Expr::int(4) * &d3);
        Expr::add_all([
            fhat.diff(U) * (&self.f1 + &phi * &bracket / eight()),
            self.f1.diff(X).diff(X),
            -(&fhat * &bracket / eight()),
            fhat.diff(X) * self.f3.sub(&(&x * &d2 / Expr::int(2))),
            &phi * &dd2 / Expr::int(4),
            -(&fhat * &d2),
            -self.f1.diff(T),
            &phi * (&x * (Expr::int(4) * &dd3 - &x * &ddd2)).sub(&(eight() * &d4)) / eight(),
        ])
    }
}

/// Classification-equation residual at `(x, t, phi)`.
pub fn classification_residual(
    fhat: &Expr,
    funcs: &ClassificationFunctions,
    x: f64,
    t: f64,
    phi: f64,
) -> Result<f64, ExprError> {
    funcs
        .residual_expr(fhat)
        .eval(&Bindings::from([(X, x), (T, t), (U, phi)]))
}

/// `eta - xi_x u_x - xi_t u_t`.
pub fn invariant_surface(g: &Generator) -> Expr {
    g.eta
        .sub(&(&g.xi_x * Expr::sym(U_X)))
        .sub(&(&g.xi_t * Expr::sym(U_T)))
}

/// The invariant surface condition with an explicit `u(x, t)` substituted.
pub fn invariant_surface_on(g: &Generator, u: &Expr) -> Expr {
    let mut map = HashMap::new();
    map.insert(U_X.to_string(), u.diff(X));
    map.insert(U_T.to_string(), u.diff(T));
    map.insert(U.to_string(), u.clone());
    invariant_surface(g).substitute_all(&map)
}

/// Largest `|eta - xi_x u_x - xi_t u_t|` over `(x, t)` points for an explicit solution.
pub fn solution_invariance_residual(
    g: &Generator,
    u: &Expr,
    pts: &[(f64, f64)],
) -> Result<f64, ExprError> {
    let c = invariant_surface_on(g, u).compile(&[X, T])?;
    let mut worst: f64 = 0.0;
    for &(x, t) in pts {
        worst = worst.max(c.eval(&[x, t])?.abs());
    }
    Ok(worst)
}

/// Residuals of a boundary-invariance test, as expressions in one variable.
#[derive(Clone, Debug)]
pub struct BoundaryResiduals {
    pub r1: Expr,
    pub r2: Expr,
    /// The variable both residuals depend on.
    pub var: &'static str,
}

impl BoundaryResiduals {
    /// Largest `|r1|` and `|r2|` over the sample values.
    pub fn max_over(&self, values: &[f64], extra: &Bindings) -> Result<(f64, f64), ExprError> {
        let mut env = extra.clone();
        let (mut m1, mut m2): (f64, f64) = (0.0, 0.0);
        for &v in values {
            env.set(self.var, v);
            m1 = m1.max(self.r1.eval(&env)?.abs());
            m2 = m2.max(self.r2.eval(&env)?.abs());
        }
        Ok((m1, m2))
    }
}

/// Invariance of the terminal surface `tau = T'` and datum `phi = exp(-(a x + 1)/b^2)`,
/// `T' = -b^2 T/2`, under a heat-variable generator. Both residuals are functions of `x`.
pub fn terminal_invariance_residual(
    g: &Generator,
    a: f64,
    b: f64,
    terminal: f64,
) -> BoundaryResiduals {
    let b2 = b * b;
    let t_prime = -b2 * terminal / 2.0;
    let x = Expr::sym(X);
    let datum = (-(Expr::real(a) * &x + Expr::one()) / Expr::real(b2)).exp();
    let mut on_surface = HashMap::new();
    on_surface.insert(T.to_string(), Expr::real(t_prime));
    on_surface.insert(U.to_string(), datum.clone());
    let r1 = g.xi_t.substitute_all(&on_surface);
    let r2 = g
        .eta
        .sub(&(&g.xi_x * datum.diff(X)))
        .substitute_all(&on_surface);
    BoundaryResiduals { r1, r2, var: X }
}

/// Invariance of the moving boundary `x = H(tau)` with value `phi = exp(-(a H + R)/b^2)`.
/// `h` and `r` are functions of `tau`; both residuals are functions of `tau`.
pub fn barrier_invariance_residual(
    g: &Generator,
    h: &Expr,
    r: &Expr,
    a: f64,
    b: f64,
) -> BoundaryResiduals {
    let h = to_canonical(h);
    let r = to_canonical(r);
    let value = (-(Expr::real(a) * &h + &r) / Expr::real(b * b)).exp();
    let mut on_boundary = HashMap::new();
    on_boundary.insert(X.to_string(), h.clone());
    on_boundary.insert(U.to_string(), value.clone());
    let r1 = g
        .xi_x
        .sub(&(&g.xi_t * h.diff(T)))
        .substitute_all(&on_boundary);
    let r2 = g
        .eta
        .sub(&(&g.xi_t * value.diff(T)))
        .substitute_all(&on_boundary);
    BoundaryResiduals {
        r1: to_heat(&r1),
        r2: to_heat(&r2),
        var: "tau",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat(fhat: &str) -> EvolutionPde {
        EvolutionPde::heat_with_source(&Expr::parse(fhat).unwrap())
    }

    #[test]
    fn trivial_prolongations() {
        let p = prolong2(&Generator::time_translation());
        assert!(p.eta_x.is_zero() && p.eta_t.is_zero() && p.eta_xx.is_zero());
        let p = prolong2(&Generator::parse("0", "0", "u").unwrap());
        assert_eq!(p.eta_x.simplify(), Expr::sym(U_X));
        assert_eq!(p.eta_t.simplify(), Expr::sym(U_T));
        assert_eq!(p.eta_xx.simplify(), Expr::sym(U_XX));
    }

    #[test]
    fn scaling_prolongation() {
        let p = prolong2(&Generator::parse("x", "2*t", "0").unwrap());
        assert_eq!(p.eta_x.simplify().to_string(), "-u_x");
        assert_eq!(p.eta_t.simplify().to_string(), "-2*u_t");
        assert_eq!(p.eta_xx.simplify().to_string(), "-2*u_xx");
    }

    #[test]
    fn time_translation_of_autonomous_source() {
        let pde = heat("phi^2 + sin(x)");
        let rep = check_symmetry(
            &pde,
            &Generator::time_translation(),
            50,
            1,
            &SampleBox::default(),
            1e-12,
        )
        .unwrap();
        assert!(rep.passed);
        assert_eq!(rep.max_raw, 0.0);
    }

    #[test]
    fn detects_non_symmetries() {
        let pde = heat("0*phi");
        let g = Generator::parse("t", "0", "0").unwrap();
        let rep = check_symmetry(&pde, &g, 50, 1, &SampleBox::default(), 1e-8).unwrap();
        assert!(!rep.passed);
        assert!(rep.worst_term.is_some());
    }

    #[test]
    fn galilean_boost_of_heat_equation() {
        // x -> x + 2 eps t with phi -> phi exp(-eps x - eps^2 t)
        let pde = EvolutionPde::new(Expr::parse("u_xx").unwrap()).unwrap();
        let g = Generator::parse("2*t", "0", "-x*u").unwrap();
        let rep = check_symmetry(&pde, &g, 50, 3, &SampleBox::default(), 1e-12).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn parabolicity_required() {
        assert!(matches!(
            EvolutionPde::new(Expr::parse("u_x").unwrap()),
            Err(LieError::NotParabolic)
        ));
    }

    #[test]
    fn unsamplable_box_reported() {
        let pde = heat("ln(phi)*phi");
        let bad = SampleBox {
            u: (-2.0, -1.0),
            ..SampleBox::default()
        };
        let g = Generator::parse("0", "0", "u").unwrap();
        let err = check_symmetry(&pde, &g, 5, 0, &bad, 1e-8);
        assert!(matches!(err, Err(LieError::Unsamplable { .. })));
    }

    #[test]
    fn point_sets_are_deterministic() {
        let b = SampleBox::default();
        assert_eq!(b.points(10, 7), b.points(10, 7));
        assert_ne!(b.points(10, 7), b.points(10, 8));
        assert_eq!(b.points(10, 7)[3], b.points(4, 7)[3]);
    }

    #[test]
    fn invariant_surface_of_time_translation() {
        assert_eq!(
            invariant_surface(&Generator::time_translation()).to_string(),
            "-u_t"
        );
    }
}
