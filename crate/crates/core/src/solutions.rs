//! Closed-form invariant solutions of Heath-type equations, with the boundary data
//! they were built for and self-checks.
//!
//! Two boundary problems are covered: a terminal condition `u(x, T) = 1`, and a
//! down-and-out barrier `u(H(t), t) = R(t)` with an exponential barrier `H`.

use crate::catalog::{self, CatalogError, Form};
use crate::expr::{Bindings, Expr, ExprError};
use crate::lie::{self, Generator, LieError, SampleBox, SymmetryReport};
use crate::model::{pde_residual, CoordinateMap, HeathModel, ModelError, TAU};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("diffusion scale b must be nonzero")]
    ZeroDiffusion,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("time {t} is singular for this solution")]
    SingularTime { t: f64 },
    #[error("domain violation: denominator `{denominator}` vanishes inside the sample box")]
    Domain { denominator: String },
}

/// Rectangle in `(x, t)` where a solution is known to be regular.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolutionBox {
    pub x: (f64, f64),
    pub t: (f64, f64),
}

impl SolutionBox {
    /// `nx` by `nt` grid including the corners.
    pub fn grid(&self, nx: usize, nt: usize) -> Vec<(f64, f64)> {
        let lerp = |(lo, hi): (f64, f64), i: usize, n: usize| {
            if n < 2 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(nx * nt);
        for j in 0..nt {
            for i in 0..nx {
                pts.push((lerp(self.x, i, nx), lerp(self.t, j, nt)));
            }
        }
        pts
    }
}

/// Barrier problem data: `H(tau)` and `R(tau)` in heat time.
#[derive(Clone, Debug, Serialize)]
pub struct BarrierSpec {
    pub a: f64,
    pub b: f64,
    /// Decay rate of the barrier.
    pub alpha: f64,
    /// Barrier level as a fraction of the strike.
    pub beta: f64,
    pub strike: f64,
    pub terminal: f64,
    /// Coefficient of `phi ln|phi|` in the heat source.
    pub log_coeff: f64,
    #[serde(serialize_with = "as_string")]
    pub h: Expr,
    #[serde(serialize_with = "as_string")]
    pub r: Expr,
}

fn as_string<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl BarrierSpec {
    /// `H` as a function of Heath time `t`.
    pub fn h_of_t(&self) -> Expr {
        self.h.substitute(TAU, &heat_time(self.b))
    }

    pub fn r_of_t(&self) -> Expr {
        self.r.substitute(TAU, &heat_time(self.b))
    }

    /// `phi` on the barrier, `exp(-(a H + R)/b^2)`, in heat time.
    pub fn boundary_phi(&self) -> Expr {
        (-(Expr::real(self.a) * &self.h + &self.r) / Expr::real(self.b * self.b)).exp()
    }

    /// The constant `Delta` that makes the invariant solution meet the barrier data.
    pub fn shift(&self) -> f64 {
        self.log_coeff / 2.0 + self.alpha / (self.b * self.b)
    }

    /// Coefficient of `phi x^2` in the heat source.
    pub fn quadratic_coeff(&self) -> f64 {
        let b2 = self.b * self.b;
        -(b2 * self.alpha * self.log_coeff + 2.0 * self.alpha * self.alpha) / (2.0 * b2 * b2)
    }

    /// Heat source `phi (A ln|phi| + B x^2 + Delta)` solved by the barrier solution.
    pub fn fhat(&self) -> Expr {
        Expr::parse("phi*(A*ln(abs(phi)) + B*x^2 + D)")
            .expect("template parses")
            .substitute_all(&consts(&[
                ("A", self.log_coeff),
                ("B", self.quadratic_coeff()),
                ("D", self.shift()),
            ]))
    }
}

/// Boundary data a solution is built for.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Boundary {
    Terminal { time: f64 },
    Barrier(BarrierSpec),
}

/// An explicit solution `u(x, t)` of a Heath model.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    pub name: &'static str,
    pub u: Expr,
    pub model: HeathModel,
    pub params: BTreeMap<String, f64>,
    pub sample_box: SolutionBox,
    pub boundary: Option<Boundary>,
    /// Time at which the closed form blows up, if any.
    pub singular_time: Option<f64>,
    pub description: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionDescriptor {
    pub name: &'static str,
    pub u: String,
    pub a: f64,
    pub b: f64,
    pub f: String,
    pub params: BTreeMap<String, f64>,
    pub sample_box: SolutionBox,
    pub boundary: Option<Boundary>,
    pub singular_time: Option<f64>,
    pub description: &'static str,
}

impl ClosedFormSolution {
    /// Largest `|u_t - rhs|` on an `n` by `n` grid over the sample box.
    pub fn max_residual(&self, n: usize) -> Result<f64, SolutionError> {
        Ok(pde_residual(
            &self.model.pde()?,
            &self.u,
            &self.sample_box.grid(n, n),
        )?)
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64, SolutionError> {
        if self.singular_time.is_some_and(|ts| (t - ts).abs() < 1e-9) {
            return Err(SolutionError::SingularTime { t });
        }
        Ok(self.u.eval(&Bindings::from([("x", x), ("t", t)]))?)
    }

    /// The solution in heat variables, `phi(x, tau)`.
    pub fn heat_form(&self) -> Expr {
        CoordinateMap::new(self.model.a, self.model.b).push_solution(&self.u)
    }

    pub fn descriptor(&self) -> SolutionDescriptor {
        SolutionDescriptor {
            name: self.name,
            u: self.u.to_string(),
            a: self.model.a,
            b: self.model.b,
            f: self.model.f.to_string(),
            params: self.params.clone(),
            sample_box: self.sample_box,
            boundary: self.boundary.clone(),
            singular_time: self.singular_time,
            description: self.description,
        }
    }

    /// Samples as CSV with header `x,t,u`.
    pub fn sample_csv(&self, nx: usize, nt: usize) -> Result<String, ExprError> {
        let c = self.u.compile(&["x", "t"])?;
        let mut out = String::from("x,t,u\n");
        for (x, t) in self.sample_box.grid(nx, nt) {
            writeln!(out, "{x},{t},{}", c.eval(&[x, t])?).expect("writing to a string");
        }
        Ok(out)
    }

    /// Largest `|u(x, T) - 1|` over `n` points of the box's x range.
    pub fn terminal_error(&self, n: usize) -> Result<Option<f64>, SolutionError> {
        let Some(Boundary::Terminal { time }) = self.boundary else {
            return Ok(None);
        };
        let mut worst: f64 = 0.0;
        let row = SolutionBox {
            t: (time, time),
            ..self.sample_box
        };
        for (x, _) in row.grid(n, 1) {
            worst = worst.max((self.eval(x, time)? - 1.0).abs());
        }
        Ok(Some(worst))
    }

    /// Largest `|u(H(t), t) - R(t)|` over `n` times in `[T - 1, T]`.
    pub fn barrier_error(&self, n: usize) -> Result<Option<f64>, ExprError> {
        let Some(Boundary::Barrier(spec)) = &self.boundary else {
            return Ok(None);
        };
        let (h, r) = (spec.h_of_t(), spec.r_of_t());
        let on_barrier = self.u.substitute("x", &h).sub(&r).compile(&["t"])?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let t = spec.terminal - 1.0 + i as f64 / (n - 1).max(1) as f64;
            worst = worst.max(on_barrier.eval(&[t])?.abs());
        }
        Ok(Some(worst))
    }
}

/// Selects a formula exactly as published or the form that holds on substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transcription {
    Printed,
    Corrected,
}

fn consts(pairs: &[(&str, f64)]) -> HashMap<String, Expr> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), Expr::real(*v)))
        .collect()
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn instantiate(template: &str, pairs: &[(&str, f64)]) -> Expr {
    Expr::parse(template)
        .expect("solution templates parse")
        .substitute_all(&consts(pairs))
}

/// `tau = -b^2 t / 2`.
fn heat_time(b: f64) -> Expr {
    Expr::real(-b * b / 2.0) * Expr::sym("t")
}

fn check_b(b: f64) -> Result<(), SolutionError> {
    if b == 0.0 || !b.is_finite() {
        Err(SolutionError::ZeroDiffusion)
    } else {
        Ok(())
    }
}

/// Time at which the terminal solution blows up, `T - 2 ln 2 / b^2`.
pub fn terminal_singular_time(b: f64, terminal: f64) -> f64 {
    terminal - 2.0 * std::f64::consts::LN_2 / (b * b)
}

const TERMINAL_U: &str = "exp(-3*b^2*t/2)/(96*b^2*(2*exp(b^2*t/2) - exp(b^2*T/2)))*(\
    3*b^6*(exp(2*b^2*T) - 2*exp(b^2*(t + 3*T)/2))*T \
    - 96*a^2*(exp(2*b^2*T) - exp(b^2*(t + 3*T)/2)) \
    - 96*b^2*(exp(2*b^2*T) - 2*exp(b^2*(t + 3*T)/2) + 2*a*exp(2*b^2*t)*x - a*exp(b^2*(t + T))*x \
        - a*exp(b^2*(3*t + T)/2)*x) \
    + 4*b^4*(2*exp(2*b^2*T) + 3*exp(b^2*(t + T)) - 7*exp(b^2*(t + 3*T)/2) + 4*exp(2*b^2*t)*(3*x^2 - 2) \
        - 2*exp(b^2*(3*t + T)/2)*(6*x^2 - 5)) \
    - 6*b^4*(exp(2*b^2*T) - 2*exp(b^2*(t + 3*T)/2))*ln(abs(2*exp(b^2*t/2) - exp(b^2*T/2))))";

/// Heath source of the terminal problem: `a^2/2 + b^4 (x^2/2 - 3 (a x + u)/b^2)/2`.
pub fn terminal_source(a: f64, b: f64) -> Expr {
    instantiate(
        "a^2/2 + b^4*(x^2/2 - 3*(a*x + u)/b^2)/2",
        &[("a", a), ("b", b)],
    )
}

/// The invariant solution of the terminal problem with `u(x, T) = 1`.
pub fn terminal_solution(
    a: f64,
    b: f64,
    terminal: f64,
) -> Result<ClosedFormSolution, SolutionError> {
    check_b(b)?;
    let singular = terminal_singular_time(b, terminal);
    let t_lo = (terminal - 0.5).max(singular + 0.1 * (terminal - singular));
    Ok(ClosedFormSolution {
        name: "terminal",
        u: instantiate(TERMINAL_U, &[("a", a), ("b", b), ("T", terminal)]),
        model: HeathModel::new(a, b, terminal_source(a, b))?,
        params: params(&[("a", a), ("b", b), ("T", terminal)]),
        sample_box: SolutionBox { x: (-1.0, 1.0), t: (t_lo, terminal) },
        boundary: Some(Boundary::Terminal { time: terminal }),
        singular_time: Some(singular),
        description: "terminal condition u(x,T) = 1 under a subalgebra of the four-dimensional algebra (A = 3, B = 1/2)",
    })
}

/// `T' = -b^2 T / 2`.
pub fn terminal_heat_time(b: f64, terminal: f64) -> f64 {
    -b * b * terminal / 2.0
}

/// Integration constant of the reduced equation as printed alongside the solution.
pub fn terminal_constant_printed(a: f64, b: f64, terminal: f64) -> f64 {
    let tp = terminal_heat_time(b, terminal);
    let b4 = b.powi(4);
    (-2.0 * tp).exp() * (48.0 * a * a + 96.0 * b * b - 8.0 * b4 - 6.0 * b4 * tp) / 288.0
}

/// Integration constant for which the similarity solution meets `u(x, T) = 1`.
pub fn terminal_constant(a: f64, b: f64, terminal: f64) -> f64 {
    let tp = terminal_heat_time(b, terminal);
    let b4 = b.powi(4);
    (-2.0 * tp).exp() * (48.0 * a * a + 96.0 * b * b - 8.0 * b4 + 6.0 * b4 * tp) / 288.0
}

/// Amplitude `F(tau)` of the terminal similarity solution for `A = 3`, `B = 1/2`,
/// with integration constant `c`.
pub fn terminal_reduction_f(a: f64, b: f64, terminal: f64, c: f64) -> Result<Expr, SolutionError> {
    check_b(b)?;
    let template =
        "exp(exp(3*tau)*(8*b^4*exp(-4*tau) + 12*a^2*exp(-4*Tp) + 3*b^4*exp(-tau - 3*Tp) \
        - 3*exp(-2*Tp)*(b^4*exp(-2*tau) - 24*c) - 2*exp(-tau - Tp)*(5*b^4*exp(-2*tau) + 72*c)) \
        /(24*b^4*(2*exp(-tau) - exp(-Tp)))) * (2*exp(-tau) - exp(-Tp))^(-exp(3*(tau - Tp))/16)";
    Ok(instantiate(
        template,
        &[
            ("a", a),
            ("b", b),
            ("Tp", terminal_heat_time(b, terminal)),
            ("c", c),
        ],
    ))
}

/// Spatial factor `G(x, tau)` of the terminal similarity form `phi = G F(tau)` for a
/// four-dimensional algebra with real exponents, `s = sqrt(A^2 - 16 B)`.
pub fn terminal_similarity_factor(
    a: f64,
    b: f64,
    terminal: f64,
    big_a: f64,
    big_b: f64,
) -> Result<Expr, SolutionError> {
    check_b(b)?;
    let disc = big_a * big_a - 16.0 * big_b;
    if disc <= 0.0 {
        return Err(SolutionError::Precondition(
            "A^2 - 16 B must be positive".into(),
        ));
    }
    let template = "exp(-2*x*(a*exp(-(tau - Tp)*(s - A)/2)*s + b^2*B*(exp(-(tau - Tp)*s) - 1)*x) \
        /(b^2*((exp(-(tau - Tp)*s) - 1)*A + (1 + exp(-(tau - Tp)*s))*s)))";
    Ok(instantiate(
        template,
        &[
            ("a", a),
            ("b", b),
            ("Tp", terminal_heat_time(b, terminal)),
            ("A", big_a),
            ("B", big_b),
            ("s", disc.sqrt()),
        ],
    ))
}

/// `phi(x, tau) = G(x, tau) F(tau)` for `A = 3`, `B = 1/2`.
pub fn terminal_similarity_phi(
    a: f64,
    b: f64,
    terminal: f64,
    c: f64,
) -> Result<Expr, SolutionError> {
    Ok(terminal_similarity_factor(a, b, terminal, 3.0, 0.5)?
        * terminal_reduction_f(a, b, terminal, c)?)
}

/// Left side of the reduced ODE for the terminal amplitude, an expression in `tau`,
/// `F` and `Fp` (for `F'`). The corrected form flips the sign of the `F'` term.
pub fn terminal_reduced_ode(
    which: Transcription,
    a: f64,
    b: f64,
    terminal: f64,
    big_a: f64,
    big_b: f64,
    shift: f64,
) -> Result<Expr, SolutionError> {
    check_b(b)?;
    let disc = big_a * big_a - 16.0 * big_b;
    if disc <= 0.0 {
        return Err(SolutionError::Precondition(
            "A^2 - 16 B must be positive".into(),
        ));
    }
    let template = "(2*a^2*exp((tau - Tp)*(A - s))*s^2 \
        + b^4*(2*B*(s - A) - 2*E2*s*B + A*D*(A - s) + E2*A*s*D - 8*B*D + E2*(A^2*D - 2*A*B - 8*B*D) \
            + 4*E1*(A*B - 4*B*D)) \
        + b^4*A*((1 + E2)*A^2 + (E2 - 1)*A*s - 8*(1 + E1)^2*B)*ln(abs(F)))*F \
        + sgn*b^4*((1 + E2)*A^2 + (E2 - 1)*A*s - 8*(1 + E1)^2*B)*Fp";
    let e1 = Expr::parse("exp(-(tau - Tp)*s)")?;
    let e2 = Expr::parse("exp(-2*(tau - Tp)*s)")?;
    let mut map = consts(&[
        ("a", a),
        ("b", b),
        ("Tp", terminal_heat_time(b, terminal)),
        ("A", big_a),
        ("B", big_b),
        ("D", shift),
        ("s", disc.sqrt()),
        (
            "sgn",
            if which == Transcription::Printed {
                1.0
            } else {
                -1.0
            },
        ),
    ]);
    let e1 = e1.substitute_all(&map);
    let e2 = e2.substitute_all(&map);
    map.insert("E1".into(), e1);
    map.insert("E2".into(), e2);
    Ok(Expr::parse(template)?.substitute_all(&map))
}

/// Evaluates an ODE left side in `F`, `Fp` (and optionally `Fpp`) along `f(var)`.
pub fn ode_along(ode: &Expr, f: &Expr, var: &str) -> Expr {
    let fp = f.diff(var);
    let fpp = fp.diff(var);
    let mut map = HashMap::new();
    map.insert("F".to_string(), f.clone());
    map.insert("Fp".to_string(), fp);
    map.insert("Fpp".to_string(), fpp);
    ode.substitute_all(&map)
}

/// Heat residual `phi_tau - phi_xx - fhat` of an explicit `phi(x, tau)`.
pub fn heat_residual(fhat: &Expr, phi: &Expr) -> Expr {
    let pde = lie::EvolutionPde::heat_with_source(fhat);
    lie::to_heat(&pde.residual_of(&lie::to_canonical(phi)))
}

/// Source of the four-dimensional algebras: `phi (A ln|phi| + B x^2 + Delta)`.
pub fn log_source(big_a: f64, big_b: f64, shift: f64) -> Expr {
    instantiate(
        "phi*(A*ln(abs(phi)) + B*x^2 + D)",
        &[("A", big_a), ("B", big_b), ("D", shift)],
    )
}

/// Coefficients of a generator `c1 X1 + ... + c4 X4` of the four-dimensional algebra,
/// plus the integration constants of the barrier equations.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct BarrierCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

fn sqrt_disc(big_a: f64, big_b: f64) -> Result<f64, SolutionError> {
    let disc = big_a * big_a - 16.0 * big_b;
    if disc <= 0.0 {
        Err(SolutionError::Precondition(
            "A^2 - 16 B must be positive".into(),
        ))
    } else {
        Ok(disc.sqrt())
    }
}

fn coefficient_consts(
    big_a: f64,
    big_b: f64,
    c: &BarrierCoefficients,
) -> Result<HashMap<String, Expr>, SolutionError> {
    Ok(consts(&[
        ("A", big_a),
        ("B", big_b),
        ("s", sqrt_disc(big_a, big_b)?),
        ("c1", c.c1),
        ("c2", c.c2),
        ("c3", c.c3),
        ("c4", c.c4),
        ("c5", c.c5),
        ("c6", c.c6),
    ]))
}

/// General barrier `H(tau)` admitted by the four-dimensional algebra with `A^2 > 16 B`.
pub fn barrier_h_general(
    big_a: f64,
    big_b: f64,
    c: &BarrierCoefficients,
) -> Result<Expr, SolutionError> {
    if c.c1 == 0.0 {
        return Err(SolutionError::Precondition("c1 must be nonzero".into()));
    }
    let template = "exp((A - s)*tau/2)/(2*B*c1)*(s*(c3 - exp(s*tau)*c4) + A*(c3 + exp(s*tau)*c4) \
        + 2*exp(-(A - s)*tau/2)*B*c1*c5)";
    Ok(Expr::parse(template)?.substitute_all(&coefficient_consts(big_a, big_b, c)?))
}

/// Left side of the barrier equation for `H`, in `tau` and `Hp` (for `H'`).
pub fn barrier_h_ode(
    big_a: f64,
    big_b: f64,
    c: &BarrierCoefficients,
) -> Result<Expr, SolutionError> {
    let template = "4*exp((A - s)*tau/2)*(c3 + exp(s*tau)*c4) - c1*Hp";
    Ok(Expr::parse(template)?.substitute_all(&coefficient_consts(big_a, big_b, c)?))
}

/// General rebate `R(tau)` paired with [`barrier_h_general`]. The printed form drops
/// the factor `c5` from the `c3` term, so it only solves the rebate equation when `c5 = 1`.
pub fn barrier_r_general(
    which: Transcription,
    a: f64,
    b: f64,
    big_a: f64,
    big_b: f64,
    c: &BarrierCoefficients,
) -> Result<Expr, SolutionError> {
    check_b(b)?;
    if big_a == 0.0 {
        return Err(SolutionError::Precondition("A must be nonzero".into()));
    }
    if c.c1 == 0.0 {
        return Err(SolutionError::Precondition("c1 must be nonzero".into()));
    }
    let template = "1/(B*c1^2)*(exp((A - s)*tau/2)/2*(b^2*(4*B*c1*(c4*c5*exp(s*tau) + c3*k) \
            + exp((A - s)*tau/2)*(A*(c4^2*exp(2*s*tau) + c3^2) + s*(c3^2 - c4^2*exp(2*s*tau)))) \
            - a*c1*(A*(c4*exp(s*tau) + c3) + s*(c3 - c4*exp(s*tau)))) \
        - b^2*B*(c1*c2 + 16*c3*c4)*exp(A*tau)/A + 2*A*b^2*c3*c4*exp(A*tau)) + c6";
    let mut map = coefficient_consts(big_a, big_b, c)?;
    let k = if which == Transcription::Printed {
        1.0
    } else {
        c.c5
    };
    map.extend(consts(&[("a", a), ("b", b), ("k", k)]));
    Ok(Expr::parse(template)?.substitute_all(&map))
}

/// Left side of the barrier equation for `R`, in `tau` and `Rp` (for `R'`).
pub fn barrier_r_ode(
    a: f64,
    b: f64,
    big_a: f64,
    big_b: f64,
    c: &BarrierCoefficients,
) -> Result<Expr, SolutionError> {
    let template = "4*a*B*c1*exp((A - s)*tau/2)*(c3 + exp(s*tau)*c4) \
        + b^2*(B*(c1*c3*c5*(s - A)*exp((A - s)*tau/2) - c1*c4*c5*(s + A)*exp((s + A)*tau/2) \
            - 8*c3^2*exp((A - s)*tau) - 8*c4^2*exp((s + A)*tau) + (c1*c2 + 16*c3*c4)*exp(A*tau)) \
            - 2*A^2*c3*c4*exp(A*tau)) \
        + B*c1^2*Rp";
    let mut map = coefficient_consts(big_a, big_b, c)?;
    map.extend(consts(&[("a", a), ("b", b)]));
    Ok(Expr::parse(template)?.substitute_all(&map))
}

/// Evaluates an ODE left side in `tau` and `<name>p` along `f(tau)`.
pub fn first_order_along(ode: &Expr, f: &Expr, derivative_name: &str) -> Expr {
    ode.substitute(derivative_name, &f.diff(TAU))
}

/// Coefficient choice that turns the general barrier into the exponential one.
pub fn exponential_coefficients(
    b: f64,
    alpha: f64,
    beta: f64,
    strike: f64,
    terminal: f64,
) -> BarrierCoefficients {
    BarrierCoefficients {
        c1: -2.0 * b * b * (alpha * terminal).exp() / (alpha * beta * strike),
        c3: 1.0,
        ..BarrierCoefficients::default()
    }
}

/// `B` of the four-dimensional algebra that admits the exponential barrier.
pub fn exponential_quadratic_coeff(b: f64, alpha: f64, log_coeff: f64) -> f64 {
    let b2 = b * b;
    -(b2 * alpha * log_coeff + 2.0 * alpha * alpha) / (2.0 * b2 * b2)
}

/// Exponential barrier `H = beta K exp(alpha (t - T))` with its rebate.
pub fn exponential_barrier(
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    strike: f64,
    terminal: f64,
    log_coeff: f64,
) -> Result<BarrierSpec, SolutionError> {
    check_b(b)?;
    if !(alpha > 0.0) {
        return Err(SolutionError::Precondition("alpha must be positive".into()));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(SolutionError::Precondition(
            "beta must lie in (0, 1]".into(),
        ));
    }
    if !(strike > 0.0) {
        return Err(SolutionError::Precondition(
            "strike must be positive".into(),
        ));
    }
    if !(log_coeff * b * b > -4.0 * alpha) {
        return Err(SolutionError::Precondition(
            "A b^2 > -4 alpha is required".into(),
        ));
    }
    let vals = [
        ("a", a),
        ("b", b),
        ("al", alpha),
        ("be", beta),
        ("K", strike),
        ("T", terminal),
    ];
    let h = instantiate("K*be*exp(-2*al*(tau + b^2*T/2)/b^2)", &vals);
    let r = instantiate(
        "-be*K*exp(-2*al*(2*tau/b^2 + T))*(2*a*exp(al*(2*tau/b^2 + T)) + al*be*K)/2",
        &vals,
    );
    Ok(BarrierSpec {
        a,
        b,
        alpha,
        beta,
        strike,
        terminal,
        log_coeff,
        h,
        r,
    })
}

/// The barrier-problem solution and the Heath equation it solves.
pub fn barrier_solution(spec: &BarrierSpec) -> Result<ClosedFormSolution, SolutionError> {
    let vals = [
        ("a", spec.a),
        ("b", spec.b),
        ("al", spec.alpha),
        ("be", spec.beta),
        ("K", spec.strike),
        ("T", spec.terminal),
        ("A", spec.log_coeff),
    ];
    let u = instantiate(
        "((4*al + A*b^2)*(x - be*K*exp(al*(t - T)))^2 - 2*al*x^2)/4 - a*x",
        &vals,
    );
    let f = instantiate(
        "a^2/2 - A*b^2*(a*x + u)/2 + (2*al + A*b^2)*(b^2 - al*x^2)/4",
        &vals,
    );
    let level = spec.beta * spec.strike;
    Ok(ClosedFormSolution {
        name: "barrier",
        u,
        model: HeathModel::new(spec.a, spec.b, f)?,
        params: params(&vals),
        sample_box: SolutionBox { x: (level, level + 20.0), t: (spec.terminal - 1.0, spec.terminal) },
        boundary: Some(Boundary::Barrier(spec.clone())),
        singular_time: None,
        description: "down-and-out barrier with exponential barrier under a subalgebra of the four-dimensional algebra",
    })
}

/// Heat form `phi = exp(alpha x^2/(2 b^2)) F(zeta)` assembled from the similarity
/// variable and the special solution of the reduced equation.
pub fn barrier_heat_form(spec: &BarrierSpec) -> Expr {
    let vals = [
        ("b", spec.b),
        ("al", spec.alpha),
        ("be", spec.beta),
        ("K", spec.strike),
        ("T", spec.terminal),
        ("A", spec.log_coeff),
        ("D", spec.shift()),
    ];
    let zeta = instantiate(
        "b^2*exp(-2*al*tau/b^2 - al*T)*(exp(2*al*tau/b^2 + al*T)*x - K*be)/(2*al*be*K)",
        &vals,
    );
    let f = barrier_similarity_f(spec).substitute("zeta", &zeta);
    instantiate("exp(al*x^2/(2*b^2))", &vals) * f
}

/// Special solution `F(zeta)` of the barrier reduced equation.
pub fn barrier_similarity_f(spec: &BarrierSpec) -> Expr {
    instantiate(
        "exp((2*al + A*b^2 - 2*b^2*D)/(2*A*b^2) - al^2*be^2*K^2*(4*al + A*b^2)/b^6*zeta^2)",
        &[
            ("b", spec.b),
            ("al", spec.alpha),
            ("be", spec.beta),
            ("K", spec.strike),
            ("A", spec.log_coeff),
            ("D", spec.shift()),
        ],
    )
}

/// Left side of the barrier reduced equation in `zeta`, `F`, `Fp`, `Fpp`.
///
/// The printed form carries the second derivative of `ln|F|`; the corrected one has `F''`.
pub fn barrier_reduced_ode(spec: &BarrierSpec, which: Transcription) -> Expr {
    let vals = [
        ("b", spec.b),
        ("al", spec.alpha),
        ("be", spec.beta),
        ("K", spec.strike),
        ("A", spec.log_coeff),
        ("D", spec.shift()),
    ];
    let second = match which {
        Transcription::Printed => "(Fpp*F - Fp^2)/F^2",
        Transcription::Corrected => "Fpp",
    };
    instantiate(
        &format!(
            "4*al^2*be^2*K^2*(2*al*zeta*Fp + F*(al + A*b^2*ln(abs(F)) + b^2*D)) + b^6*{second}"
        ),
        &vals,
    )
}

/// Generator `c1 d/dtau + X3` of the subalgebra that leaves the barrier data
/// invariant, in canonical names.
pub fn barrier_generator(spec: &BarrierSpec) -> Generator {
    let b2 = spec.b * spec.b;
    let c = exponential_coefficients(spec.b, spec.alpha, spec.beta, spec.strike, spec.terminal);
    let s = spec.log_coeff + 4.0 * spec.alpha / b2;
    let rate = (spec.log_coeff - s) / 2.0;
    let vals = [("c1", c.c1), ("r", rate), ("k", s - spec.log_coeff)];
    let [xi, tau, eta] =
        ["4*exp(r*tau)", "c1", "k*exp(r*tau)*x*phi"].map(|s| instantiate(s, &vals));
    Generator::from_heat(&xi, &tau, &eta)
}

/// `u(x, T)` next to the payoff `max(x - K, 0)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PayoffCheck {
    pub x: f64,
    pub solution: f64,
    pub payoff: f64,
    pub satisfied: bool,
}

/// Compares the barrier solution at `t = T` with the call payoff.
pub fn payoff_check(sol: &ClosedFormSolution, x: f64) -> Result<PayoffCheck, SolutionError> {
    let Some(Boundary::Barrier(spec)) = &sol.boundary else {
        return Err(SolutionError::Precondition("not a barrier solution".into()));
    };
    let solution = sol.eval(x, spec.terminal)?;
    let payoff = (x - spec.strike).max(0.0);
    Ok(PayoffCheck {
        x,
        solution,
        payoff,
        satisfied: (solution - payoff).abs() < 1e-9,
    })
}

/// Invariant solution built from the two-dimensional algebra with the quadratic auxiliary variable.
pub fn example_a22(a: f64, b: f64, c3: f64) -> Result<ClosedFormSolution, SolutionError> {
    check_b(b)?;
    let vals = [("a", a), ("b", b), ("c", c3)];
    let u = instantiate(
        "b^2*(-ln(exp(-x^2/8)*sqrt(x)*ln(8*sec((b^2*t - 2*c)/4 + ln(x))^2))) - a*x",
        &vals,
    );
    let f = instantiate(
        "(16*a^2 + b^4*(8 - (4*sqrt(x)*exp(exp(x^2/8 - (a*x + u)/b^2)/sqrt(x) + (a*x + u)/b^2 - x^2/8) \
            + x^4 - 4)/x^2))/32",
        &vals,
    );
    Ok(ClosedFormSolution {
        name: "a22",
        u,
        model: HeathModel::new(a, b, f)?,
        params: params(&vals),
        sample_box: SolutionBox {
            x: (0.5, 1.5),
            t: (0.0, 0.2),
        },
        boundary: None,
        singular_time: None,
        description: "invariant solution from a two-dimensional algebra with F(psi) = exp(psi)",
    })
}

/// Invariant solution built from the three-dimensional algebra with the quadratic source.
pub fn example_a359(a: f64, b: f64, c1: f64) -> Result<ClosedFormSolution, SolutionError> {
    check_b(b)?;
    let vals = [("a", a), ("b", b), ("c", c1)];
    let u = instantiate(
        "b^2*(-ln(3/2*exp(-3*x)*(4/(3*b^2*t - 6*c + x)^2 + 3))) - a*x",
        &vals,
    );
    let f = instantiate(
        "(4*a^2 - b^4*(77*sinh((a*x - 3*b^2*x + u)/b^2) + 85*cosh((a*x - 3*b^2*x + u)/b^2)))/8",
        &vals,
    );
    let sample_box = SolutionBox {
        x: (1.0, 2.0),
        t: (0.0, 0.2),
    };
    // pole where 3 b^2 t - 6 c + x = 0
    let pole = |x: f64, t: f64| 3.0 * b * b * t - 6.0 * c1 + x;
    let corners = [
        (sample_box.x.0, sample_box.t.0),
        (sample_box.x.0, sample_box.t.1),
        (sample_box.x.1, sample_box.t.0),
        (sample_box.x.1, sample_box.t.1),
    ];
    let signs: Vec<bool> = corners.iter().map(|&(x, t)| pole(x, t) > 0.0).collect();
    if signs.iter().any(|s| *s != signs[0]) || corners.iter().any(|&(x, t)| pole(x, t) == 0.0) {
        return Err(SolutionError::Domain {
            denominator: "3*b^2*t - 6*c1 + x".into(),
        });
    }
    Ok(ClosedFormSolution {
        name: "a359",
        u,
        model: HeathModel::new(a, b, f)?,
        params: params(&vals),
        sample_box,
        boundary: None,
        singular_time: None,
        description:
            "invariant solution from a three-dimensional algebra with quadratic source (B = 3)",
    })
}

/// All packaged solutions at their documented parameters.
pub fn documented_solutions() -> Result<Vec<ClosedFormSolution>, SolutionError> {
    let spec = exponential_barrier(1.0, 1.0, 0.05, 0.9, 100.0, 1.0, 1.0)?;
    Ok(vec![
        terminal_solution(1.0, 1.0, 1.0)?,
        barrier_solution(&spec)?,
        example_a22(1.0, 1.0, 0.0)?,
        example_a359(1.0, 1.0, -1.0)?,
    ])
}

/// Member of the four-dimensional algebra with real exponents that leaves the terminal
/// surface and datum invariant, `k2 X2 + k3 X3 + X4` in the catalog basis.
pub fn terminal_generator(
    a: f64,
    b: f64,
    terminal: f64,
    big_a: f64,
    big_b: f64,
) -> Result<Generator, SolutionError> {
    check_b(b)?;
    let s = sqrt_disc(big_a, big_b)?;
    let tp = terminal_heat_time(b, terminal);
    let params: BTreeMap<String, f64> = params(&[("A", big_a), ("B", big_b)]);
    let inst = catalog::instantiate("A_4_1", &params, None, None, Form::Corrected)?;
    let k3 = (tp * s).exp() * (big_a + s) / (s - big_a);
    let k2 = 8.0 * a * s * (tp * (s - big_a) / 2.0).exp() / (b * b * (big_a - s));
    let g = &inst.generators;
    Ok(Generator::combine(&[
        (Expr::real(k2), &g[1]),
        (Expr::real(k3), &g[2]),
        (Expr::one(), &g[3]),
    ]))
}

/// Self-checks of the terminal problem, all residuals absolute unless noted.
#[derive(Clone, Debug, Serialize)]
pub struct TerminalChecks {
    pub pde_residual: f64,
    pub terminal_error: f64,
    pub singular_time: f64,
    /// Relative gap between the similarity form and the pushed solution.
    pub similarity_gap: f64,
    /// Datum error of the similarity form with the printed integration constant.
    pub printed_constant_datum_error: f64,
    pub reduced_ode_printed: f64,
    pub reduced_ode_corrected: f64,
    pub generator: SymmetryReport,
    pub surface_residual: f64,
    pub datum_residual: f64,
    /// `|X(phi - Phi)| / |Phi|` for the heat form `Phi` of the solution.
    pub solution_invariance: f64,
}

fn max_rel(num: &Expr, den: &Expr, pts: &[(f64, f64)]) -> Result<f64, ExprError> {
    let c = num.div(den).compile(&[lie::X, lie::T])?;
    let mut worst: f64 = 0.0;
    for &(x, t) in pts {
        worst = worst.max(c.eval(&[x, t])?.abs());
    }
    Ok(worst)
}

fn max_on(e: &Expr, var: &str, values: &[f64]) -> Result<f64, ExprError> {
    let c = e.compile(&[var])?;
    let mut worst: f64 = 0.0;
    for &v in values {
        worst = worst.max(c.eval(&[v])?.abs());
    }
    Ok(worst)
}

/// Heat-time grid covering the regular part of the terminal solution.
fn terminal_heat_grid(b: f64, terminal: f64) -> (Vec<f64>, Vec<(f64, f64)>) {
    let tp = terminal_heat_time(b, terminal);
    let taus: Vec<f64> = (0..8)
        .map(|i| tp + 0.5 * std::f64::consts::LN_2 * i as f64 / 7.0)
        .collect();
    let pts = SolutionBox {
        x: (-1.0, 1.0),
        t: (tp, tp + 0.5 * std::f64::consts::LN_2),
    }
    .grid(7, 8);
    (taus, pts)
}

/// Runs every terminal-problem check for `A = 3`, `B = 1/2`.
pub fn terminal_checks(
    a: f64,
    b: f64,
    terminal: f64,
    n: usize,
    seed: u64,
) -> Result<TerminalChecks, SolutionError> {
    let sol = terminal_solution(a, b, terminal)?;
    let (taus, pts) = terminal_heat_grid(b, terminal);
    let pushed = lie::to_canonical(&sol.heat_form());
    let source = log_source(3.0, 0.5, 0.0);
    let phi = lie::to_canonical(&terminal_similarity_phi(
        a,
        b,
        terminal,
        terminal_constant(a, b, terminal),
    )?);
    let similarity_gap = max_rel(&phi.sub(&pushed), &pushed, &pts)?;

    let datum = (-(Expr::real(a) * Expr::sym(lie::X) + Expr::one()) / Expr::real(b * b)).exp();
    let printed =
        terminal_similarity_phi(a, b, terminal, terminal_constant_printed(a, b, terminal))?
            .substitute(TAU, &Expr::real(terminal_heat_time(b, terminal)));
    let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let printed_constant_datum_error = max_on(&printed.sub(&datum).div(&datum), lie::X, &xs)?;

    let amplitude = terminal_reduction_f(a, b, terminal, terminal_constant(a, b, terminal))?;
    let ode_gap = |which| -> Result<f64, SolutionError> {
        let ode = terminal_reduced_ode(which, a, b, terminal, 3.0, 0.5, 0.0)?;
        Ok(max_on(
            &ode_along(&ode, &amplitude, TAU).div(&amplitude),
            TAU,
            &taus,
        )?)
    };

    let g = terminal_generator(a, b, terminal, 3.0, 0.5)?;
    let pde = lie::EvolutionPde::heat_with_source(&lie::to_canonical(&source));
    let generator = lie::check_symmetry(
        &pde,
        &g,
        n,
        seed,
        &SampleBox::default(),
        lie::DEFAULT_TOLERANCE,
    )?;
    let boundary = lie::terminal_invariance_residual(&g, a, b, terminal);
    let (surface_residual, datum_residual) = boundary.max_over(&xs, &Bindings::default())?;
    let solution_invariance = max_rel(&lie::invariant_surface_on(&g, &pushed), &pushed, &pts)?;

    Ok(TerminalChecks {
        pde_residual: sol.max_residual(12)?,
        terminal_error: sol.terminal_error(41)?.unwrap_or(f64::NAN),
        singular_time: terminal_singular_time(b, terminal),
        similarity_gap,
        printed_constant_datum_error,
        reduced_ode_printed: ode_gap(Transcription::Printed)?,
        reduced_ode_corrected: ode_gap(Transcription::Corrected)?,
        generator,
        surface_residual,
        datum_residual,
        solution_invariance,
    })
}

/// Self-checks of the barrier problem.
#[derive(Clone, Debug, Serialize)]
pub struct BarrierChecks {
    pub pde_residual: f64,
    pub barrier_error: f64,
    /// Gap between the general `H` at the exponential coefficients and the exponential barrier.
    pub h_general_gap: f64,
    /// Same for `R` with `c2 = c6 = 0`.
    pub r_general_gap: f64,
    /// Relative gap between the assembled similarity form and the pushed solution.
    pub heat_form_gap: f64,
    /// `|heat residual| / phi` of the assembled similarity form.
    pub heat_residual: f64,
    pub reduced_ode_printed: f64,
    pub reduced_ode_corrected: f64,
    pub generator: SymmetryReport,
    pub surface_residual: f64,
    /// Barrier-value residual relative to `phi` on the barrier.
    pub value_residual: f64,
    pub solution_invariance: f64,
    /// `|phi(H, tau) / exp(-(a H + R)/b^2) - 1|` for the assembled heat form.
    pub heat_barrier_error: f64,
    pub payoff: PayoffCheck,
}

/// Runs every barrier-problem check.
pub fn barrier_checks(
    spec: &BarrierSpec,
    n: usize,
    seed: u64,
) -> Result<BarrierChecks, SolutionError> {
    let sol = barrier_solution(spec)?;
    let b2 = spec.b * spec.b;
    let taus: Vec<f64> = (0..11)
        .map(|i| -b2 * (spec.terminal - i as f64 / 10.0) / 2.0)
        .collect();
    let level = spec.beta * spec.strike;
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .flat_map(|&t| (0..6).map(move |i| (level + 2.0 * i as f64, t)))
        .collect();

    let c = exponential_coefficients(spec.b, spec.alpha, spec.beta, spec.strike, spec.terminal);
    let (big_a, big_b) = (spec.log_coeff, spec.quadratic_coeff());
    let h_general_gap = max_on(
        &barrier_h_general(big_a, big_b, &c)?.sub(&spec.h),
        TAU,
        &taus,
    )?;
    let r_general = barrier_r_general(Transcription::Corrected, spec.a, spec.b, big_a, big_b, &c)?;
    let r_general_gap = max_on(&r_general.sub(&spec.r), TAU, &taus)?;

    let assembled = lie::to_canonical(&barrier_heat_form(spec));
    let pushed = lie::to_canonical(&sol.heat_form());
    let heat_form_gap = max_rel(&assembled.sub(&pushed), &pushed, &pts)?;
    let heat_residual = max_rel(
        &lie::to_canonical(&heat_residual(&spec.fhat(), &barrier_heat_form(spec))),
        &assembled,
        &pts,
    )?;

    let amplitude = barrier_similarity_f(spec);
    let zetas: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
    let ode_gap = |which| -> Result<f64, ExprError> {
        max_on(
            &ode_along(&barrier_reduced_ode(spec, which), &amplitude, "zeta").div(&amplitude),
            "zeta",
            &zetas,
        )
    };

    let g = barrier_generator(spec);
    let pde = lie::EvolutionPde::heat_with_source(&lie::to_canonical(&spec.fhat()));
    let generator = lie::check_symmetry(
        &pde,
        &g,
        n,
        seed,
        &SampleBox::default(),
        lie::DEFAULT_TOLERANCE,
    )?;
    let boundary = lie::barrier_invariance_residual(&g, &spec.h, &spec.r, spec.a, spec.b);
    let surface_residual = max_on(&boundary.r1, boundary.var, &taus)?;
    let value_residual = max_on(&boundary.r2.div(&spec.boundary_phi()), boundary.var, &taus)?;
    let solution_invariance = max_rel(&lie::invariant_surface_on(&g, &pushed), &pushed, &pts)?;
    let on_barrier = barrier_heat_form(spec).substitute(lie::X, &spec.h);
    let heat_barrier_error = max_on(
        &on_barrier.div(&spec.boundary_phi()).sub(&Expr::one()),
        TAU,
        &taus,
    )?;

    Ok(BarrierChecks {
        pde_residual: sol.max_residual(12)?,
        barrier_error: sol.barrier_error(41)?.unwrap_or(f64::NAN),
        h_general_gap,
        r_general_gap,
        heat_form_gap,
        heat_residual,
        reduced_ode_printed: ode_gap(Transcription::Printed)?,
        reduced_ode_corrected: ode_gap(Transcription::Corrected)?,
        generator,
        surface_residual,
        value_residual,
        solution_invariance,
        heat_barrier_error,
        payoff: payoff_check(&sol, spec.strike + 1.0)?,
    })
}

/// Largest `|fhat_solution - fhat_entry| / (1 + |fhat_entry|)` between the heat source
/// of `sol` and a catalog instance, over the default sample box.
pub fn catalog_source_gap(
    sol: &ClosedFormSolution,
    inst: &catalog::Instance,
    n: usize,
    seed: u64,
) -> Result<f64, SolutionError> {
    let mine = lie::to_canonical(&crate::model::heath_to_heat(&sol.model).heat.fhat);
    let theirs = lie::to_canonical(&inst.fhat);
    let slots = [lie::X, lie::U];
    let (a, b) = (mine.compile(&slots)?, theirs.compile(&slots)?);
    let mut worst: f64 = 0.0;
    for p in SampleBox::default().points(n, seed) {
        let v = b.eval(&[p.x, p.u])?;
        worst = worst.max((a.eval(&[p.x, p.u])? - v).abs() / (1.0 + v.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_tau(e: &Expr) -> f64 {
        let taus: Vec<f64> = (0..9).map(|i| -0.8 + 0.2 * i as f64).collect();
        max_on(e, TAU, &taus).unwrap()
    }

    #[test]
    fn terminal_solution_meets_condition() {
        let sol = terminal_solution(1.0, 1.0, 1.0).unwrap();
        assert!(sol.terminal_error(41).unwrap().unwrap() < 1e-9);
        assert!(sol.max_residual(10).unwrap() < 1e-7);
        let t_star = terminal_singular_time(1.0, 1.0);
        assert!(matches!(
            sol.eval(0.3, t_star),
            Err(SolutionError::SingularTime { .. })
        ));
    }

    #[test]
    fn terminal_checks_pass_with_matching_constant() {
        let c = terminal_checks(0.7, 1.1, 1.0, 40, 3).unwrap();
        assert!(c.similarity_gap < 1e-10);
        assert!(c.reduced_ode_corrected < 1e-9);
        assert!(c.reduced_ode_printed > 1e-3);
        assert!(c.printed_constant_datum_error > 1e-3);
        assert!(c.generator.passed);
        assert!(c.surface_residual < 1e-12 && c.datum_residual < 1e-12);
        assert!(c.solution_invariance < 1e-10);
    }

    #[test]
    fn general_barrier_functions_solve_their_equations() {
        let all = BarrierCoefficients {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            c5: 1.0,
            c6: 1.0,
        };
        let h = barrier_h_general(1.0, -3.0, &all).unwrap();
        assert!(
            max_tau(&first_order_along(
                &barrier_h_ode(1.0, -3.0, &all).unwrap(),
                &h,
                "Hp"
            )) < 1e-10
        );
        let ode = barrier_r_ode(1.0, 1.0, 1.0, -3.0, &all).unwrap();
        for which in [Transcription::Printed, Transcription::Corrected] {
            let r = barrier_r_general(which, 1.0, 1.0, 1.0, -3.0, &all).unwrap();
            assert!(max_tau(&first_order_along(&ode, &r, "Rp")) < 1e-10);
        }

        let mixed = BarrierCoefficients {
            c1: 1.0,
            c2: 0.7,
            c3: 1.3,
            c4: 0.4,
            c5: 0.6,
            c6: 1.0,
        };
        let ode = barrier_r_ode(1.0, 1.0, 1.0, -3.0, &mixed).unwrap();
        let printed =
            barrier_r_general(Transcription::Printed, 1.0, 1.0, 1.0, -3.0, &mixed).unwrap();
        let corrected =
            barrier_r_general(Transcription::Corrected, 1.0, 1.0, 1.0, -3.0, &mixed).unwrap();
        assert!(max_tau(&first_order_along(&ode, &printed, "Rp")) > 1e-3);
        assert!(max_tau(&first_order_along(&ode, &corrected, "Rp")) < 1e-10);

        let shifted = BarrierCoefficients { c6: 3.5, ..mixed };
        let r2 =
            barrier_r_general(Transcription::Corrected, 1.0, 1.0, 1.0, -3.0, &shifted).unwrap();
        assert!((max_tau(&r2.sub(&corrected)) - 2.5).abs() < 1e-10);
        assert!(
            max_tau(
                &barrier_h_general(1.0, -3.0, &shifted)
                    .unwrap()
                    .sub(&h_of(&mixed))
            ) < 1e-12
        );

        assert!(barrier_h_general(1.0, -3.0, &BarrierCoefficients { c1: 0.0, ..all }).is_err());
        assert!(barrier_r_general(Transcription::Corrected, 1.0, 1.0, 0.0, -3.0, &all).is_err());
    }

    fn h_of(c: &BarrierCoefficients) -> Expr {
        barrier_h_general(1.0, -3.0, c).unwrap()
    }

    #[test]
    fn single_exponential_branch() {
        let c = BarrierCoefficients {
            c1: 2.0,
            c3: 1.5,
            ..Default::default()
        };
        let (a, b) = (1.0, -3.0);
        let s = (a * a - 16.0 * b as f64).sqrt();
        let expected = Expr::parse(&format!(
            "exp({}*tau)*{}",
            (a - s) / 2.0,
            (s + a) * 1.5 / (2.0 * b * 2.0)
        ))
        .unwrap();
        assert!(max_tau(&barrier_h_general(a, b, &c).unwrap().sub(&expected)) < 1e-12);
    }

    #[test]
    fn barrier_solution_meets_barrier() {
        let spec = exponential_barrier(1.0, 1.0, 0.05, 0.9, 100.0, 1.0, 1.0).unwrap();
        let h_at_t = spec.h_of_t().eval(&Bindings::from([("t", 1.0)])).unwrap();
        assert!((h_at_t - 90.0).abs() < 1e-12);
        let sol = barrier_solution(&spec).unwrap();
        assert!(sol.barrier_error(50).unwrap().unwrap() < 1e-9);
        assert!(sol.max_residual(10).unwrap() < 1e-7);
        let x = 120.0;
        let direct = ((4.0 * 0.05 + 1.0) * (x - 90.0f64).powi(2) - 2.0 * 0.05 * x * x) / 4.0 - x;
        assert!((sol.eval(x, 1.0).unwrap() - direct).abs() < 1e-9);
        assert!(!payoff_check(&sol, 101.0).unwrap().satisfied);
        assert!(exponential_barrier(1.0, 1.0, 0.05, 0.9, 100.0, 1.0, -5.0).is_err());
        assert!(exponential_barrier(1.0, 1.0, 0.05, 1.5, 100.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn barrier_checks_pass() {
        let spec = exponential_barrier(1.0, 1.0, 0.05, 0.9, 100.0, 1.0, 1.0).unwrap();
        let c = barrier_checks(&spec, 40, 3).unwrap();
        assert!(c.h_general_gap < 1e-10 && c.r_general_gap < 1e-9);
        assert!(c.heat_form_gap < 1e-10 && c.heat_residual < 1e-10);
        assert!(c.reduced_ode_corrected < 1e-9 && c.reduced_ode_printed > 1.0);
        assert!(c.generator.passed);
        assert!(c.surface_residual < 1e-12 && c.value_residual < 1e-10);
        assert!(c.solution_invariance < 1e-8);
        assert!(c.heat_barrier_error < 1e-9);
    }

    #[test]
    fn examples_solve_their_equations() {
        assert!(
            example_a22(1.0, 1.0, 0.0)
                .unwrap()
                .max_residual(10)
                .unwrap()
                < 1e-7
        );
        assert!(
            example_a359(1.0, 1.0, -1.0)
                .unwrap()
                .max_residual(10)
                .unwrap()
                < 1e-7
        );
        assert!(example_a359(1.0, 1.0, 0.2).is_err());
    }

    #[test]
    fn quadratic_example_lands_in_catalog() {
        let sol = example_a359(1.0, 1.0, -1.0).unwrap();
        let params = BTreeMap::from([("B".to_string(), 3.0)]);
        let inst = catalog::instantiate("A_3_5_9", &params, None, None, Form::Corrected).unwrap();
        assert!(catalog_source_gap(&sol, &inst, 40, 1).unwrap() < 1e-12);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = example_a359(1.0, 1.0, -1.0)
            .unwrap()
            .sample_csv(3, 2)
            .unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,t,u");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn descriptor_serializes() {
        let sol = terminal_solution(1.0, 1.0, 1.0).unwrap();
        let v = serde_json::to_value(sol.descriptor()).unwrap();
        assert_eq!(v["boundary"]["kind"], "terminal");
        assert!(v["u"].as_str().unwrap().contains("exp"));
    }
}
