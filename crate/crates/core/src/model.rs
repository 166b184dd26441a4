//! The generalized Heath equation, the heat equation with nonlinear source,
//! the point transformation linking them and the equivalence group of the heat class.
//!
//! Heath models live in `(x, t, u)`, heat models in `(x, tau, phi)` with `phi > 0`.

use crate::expr::{Bindings, Expr, ExprError};
use crate::lie::{EvolutionPde, LieError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PHI: &str = "phi";
pub const TAU: &str = "tau";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("diffusion scale b must be nonzero")]
    ZeroDiffusion,
    #[error("equivalence transformation needs delta1 != 0 and delta4 != 0")]
    DegenerateTransform,
    #[error("{0} may only depend on {1}")]
    UnexpectedVariable(&'static str, String),
    #[error("invalid model descriptor: {0}")]
    Descriptor(#[from] serde_json::Error),
}

/// Conditions that are reported but do not prevent construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelWarning {
    /// `f` does not depend on `u`.
    SourceIndependentOfU,
    /// `fhat` is affine in `phi`, so the heat equation is linear.
    LinearizableDegenerate,
}

impl std::fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelWarning::SourceIndependentOfU => "source f does not depend on u",
            ModelWarning::LinearizableDegenerate => {
                "linearizable-degenerate: fhat is affine in phi"
            }
        })
    }
}

/// `u_t = a u_x + u_x^2/2 - b^2 u_xx/2 + f(x, u)`.
#[derive(Clone, Debug)]
pub struct HeathModel {
    pub a: f64,
    pub b: f64,
    pub f: Expr,
}

/// `phi_tau = phi_xx + fhat(x, phi)`.
#[derive(Clone, Debug)]
pub struct HeatSourceModel {
    pub fhat: Expr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeathDescriptor {
    pub a: f64,
    pub b: f64,
    pub f: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatDescriptor {
    pub fhat: String,
}

fn only_depends_on(e: &Expr, what: &'static str, allowed: &[&str]) -> Result<(), ModelError> {
    match e
        .free_symbols()
        .into_iter()
        .find(|s| !allowed.contains(&s.as_str()))
    {
        Some(s) => Err(ModelError::UnexpectedVariable(
            what,
            format!("{} (found `{s}`)", allowed.join(", ")),
        )),
        None => Ok(()),
    }
}

// Sample grid used for the "identically zero" checks.
fn probe_points(n: usize) -> Vec<(f64, f64)> {
    let mut rng = crate::lie::point_rng(crate::lie::DEFAULT_SEED, 0);
    (0..n)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.25..3.0)))
        .collect()
}

/// True when `e(x, v)` vanishes at every probe point where it is defined,
/// relative to the size of `scale`.
fn vanishes(e: &Expr, scale: &[&Expr], var: &str) -> bool {
    let mut evaluated = 0;
    for (x, v) in probe_points(64) {
        let env = Bindings::from([("x", x), (var, v)]);
        let Ok(value) = e.eval(&env) else { continue };
        let size = scale
            .iter()
            .filter_map(|s| s.eval(&env).ok())
            .fold(1.0_f64, |m, s| m.max(s.abs()));
        if value.abs() > 1e-9 * size {
            return false;
        }
        evaluated += 1;
    }
    evaluated > 0
}

impl HeathModel {
    pub fn new(a: f64, b: f64, f: Expr) -> Result<Self, ModelError> {
        if b == 0.0 || !b.is_finite() {
            return Err(ModelError::ZeroDiffusion);
        }
        only_depends_on(&f, "f", &["x", "u"])?;
        Ok(HeathModel { a, b, f })
    }

    pub fn parse(a: f64, b: f64, f: &str) -> Result<Self, ModelError> {
        HeathModel::new(a, b, Expr::parse(f)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let d: HeathDescriptor = serde_json::from_str(text)?;
        HeathModel::parse(d.a, d.b, &d.f)
    }

    pub fn descriptor(&self) -> HeathDescriptor {
        HeathDescriptor {
            a: self.a,
            b: self.b,
            f: self.f.to_string(),
        }
    }

    pub fn warnings(&self) -> Vec<ModelWarning> {
        let fu = self.f.diff("u");
        if vanishes(&fu, &[&self.f], "u") {
            vec![ModelWarning::SourceIndependentOfU]
        } else {
            Vec::new()
        }
    }

    pub fn pde(&self) -> Result<EvolutionPde, ModelError> {
        Ok(EvolutionPde::heath(self.a, self.b, &self.f)?)
    }

    pub fn coordinate_map(&self) -> CoordinateMap {
        CoordinateMap::new(self.a, self.b)
    }
}

impl HeatSourceModel {
    pub fn new(fhat: Expr) -> Result<Self, ModelError> {
        only_depends_on(&fhat, "fhat", &["x", PHI])?;
        Ok(HeatSourceModel { fhat })
    }

    pub fn parse(fhat: &str) -> Result<Self, ModelError> {
        HeatSourceModel::new(Expr::parse(fhat)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let d: HeatDescriptor = serde_json::from_str(text)?;
        HeatSourceModel::parse(&d.fhat)
    }

    pub fn descriptor(&self) -> HeatDescriptor {
        HeatDescriptor {
            fhat: self.fhat.to_string(),
        }
    }

    /// True when `fhat_phiphi` vanishes on the probe grid.
    pub fn is_affine_in_phi(&self) -> bool {
        let d1 = self.fhat.diff(PHI);
        let d2 = d1.diff(PHI);
        vanishes(&d2, &[&self.fhat, &d1], PHI)
    }

    pub fn warnings(&self) -> Vec<ModelWarning> {
        if self.is_affine_in_phi() {
            vec![ModelWarning::LinearizableDegenerate]
        } else {
            Vec::new()
        }
    }

    /// The equation in canonical names (`t`, `u` standing for `tau`, `phi`).
    pub fn pde(&self) -> EvolutionPde {
        EvolutionPde::heat_with_source(&self.fhat)
    }
}

/// `tau = -b^2 t / 2`, `phi = exp(-(a x + u)/b^2)` and its inverse.
#[derive(Clone, Debug)]
pub struct CoordinateMap {
    pub a: f64,
    pub b: f64,
    /// `(x, tau, phi)` as functions of `(x, t, u)`.
    pub forward: [Expr; 3],
    /// `(x, t, u)` as functions of `(x, tau, phi)`.
    pub inverse: [Expr; 3],
}

impl CoordinateMap {
    pub fn new(a: f64, b: f64) -> Self {
        let x = Expr::sym("x");
        let b2 = Expr::real(b * b);
        let forward = [
            x.clone(),
            Expr::real(-b * b / 2.0) * Expr::sym("t"),
            (-(Expr::real(a) * &x + Expr::sym("u")) / &b2).exp(),
        ];
        let inverse = [
            x.clone(),
            Expr::real(-2.0 / (b * b)) * Expr::sym(TAU),
            -(b2 * Expr::sym(PHI).ln()) - Expr::real(a) * &x,
        ];
        CoordinateMap {
            a,
            b,
            forward,
            inverse,
        }
    }

    pub fn to_heat(&self, x: f64, t: f64, u: f64) -> Result<[f64; 3], ExprError> {
        let env = Bindings::from([("x", x), ("t", t), ("u", u)]);
        Ok([
            self.forward[0].eval(&env)?,
            self.forward[1].eval(&env)?,
            self.forward[2].eval(&env)?,
        ])
    }

    pub fn to_heath(&self, x: f64, tau: f64, phi: f64) -> Result<[f64; 3], ExprError> {
        let env = Bindings::from([("x", x), (TAU, tau), (PHI, phi)]);
        Ok([
            self.inverse[0].eval(&env)?,
            self.inverse[1].eval(&env)?,
            self.inverse[2].eval(&env)?,
        ])
    }

    /// Image `phi(x, tau)` of a Heath-side function `u(x, t)`.
    pub fn push_solution(&self, u: &Expr) -> Expr {
        let u_of_tau = u.substitute("t", &self.inverse[1]);
        self.forward[2].substitute("u", &u_of_tau)
    }

    /// Preimage `u(x, t)` of a heat-side function `phi(x, tau)`.
    pub fn pull_solution(&self, phi: &Expr) -> Expr {
        let phi_of_t = phi.substitute(TAU, &self.forward[1]);
        self.inverse[2].substitute(PHI, &phi_of_t)
    }

    /// Factor `k(x, t, u)` with heat residual = `k` times Heath residual, where a
    /// residual is `lhs_time_derivative - rhs`. Equal to `(dphi/du) / (dtau/dt)`.
    pub fn residual_factor(&self) -> Expr {
        self.forward[2]
            .diff("u")
            .div(&self.forward[1].diff("t"))
            .simplify()
    }
}

/// The heat-class source equivalent to a Heath model, with `u` eliminated.
#[derive(Clone, Debug)]
pub struct Transformed {
    pub heat: HeatSourceModel,
    pub map: CoordinateMap,
    pub warnings: Vec<ModelWarning>,
}

pub fn heath_to_heat(m: &HeathModel) -> Transformed {
    let map = m.coordinate_map();
    let b4 = m.b.powi(4);
    let f_heat = m.f.substitute("u", &map.inverse[2]);
    let two_f_minus = Expr::int(2) * f_heat - Expr::real(m.a * m.a);
    let fhat = (Expr::sym(PHI) * two_f_minus / Expr::real(b4)).simplify();
    let heat = HeatSourceModel { fhat };
    let mut warnings = m.warnings();
    warnings.extend(heat.warnings());
    Transformed {
        heat,
        map,
        warnings,
    }
}

pub fn heat_to_heath(h: &HeatSourceModel, a: f64, b: f64) -> Result<HeathModel, ModelError> {
    if b == 0.0 {
        return Err(ModelError::ZeroDiffusion);
    }
    let map = CoordinateMap::new(a, b);
    let phi = &map.forward[2];
    let ratio = h.fhat.substitute(PHI, phi) / phi;
    let f = Expr::ratio(1, 2) * (Expr::real(a * a) + Expr::real(b.powi(4)) * ratio);
    HeathModel::new(a, b, f.simplify())
}

/// Largest `|u_t - rhs|` of a candidate `u(x, t)` over the given `(x, t)` points.
pub fn pde_residual(pde: &EvolutionPde, u: &Expr, pts: &[(f64, f64)]) -> Result<f64, ExprError> {
    let residual = pde.residual_of(u).compile(&["x", "t"])?;
    let mut worst: f64 = 0.0;
    for &(x, t) in pts {
        worst = worst.max(residual.eval(&[x, t])?.abs());
    }
    Ok(worst)
}

/// `x' = d4 x + d3`, `tau' = d4^2 tau + d0`, `phi' = d1 phi + shift(x)`.
#[derive(Clone, Debug)]
pub struct EquivalenceTransform {
    pub d0: f64,
    pub d1: f64,
    pub d3: f64,
    pub d4: f64,
    /// Additive shift of `phi`, a function of the untransformed `x`.
    pub shift: Expr,
}

impl EquivalenceTransform {
    pub fn new(d0: f64, d1: f64, d3: f64, d4: f64, shift: Expr) -> Result<Self, ModelError> {
        if d1 == 0.0 || d4 == 0.0 {
            return Err(ModelError::DegenerateTransform);
        }
        only_depends_on(&shift, "shift", &["x"])?;
        Ok(EquivalenceTransform {
            d0,
            d1,
            d3,
            d4,
            shift,
        })
    }

    pub fn identity() -> Self {
        EquivalenceTransform {
            d0: 0.0,
            d1: 1.0,
            d3: 0.0,
            d4: 1.0,
            shift: Expr::zero(),
        }
    }

    /// `then` applied after `self`.
    pub fn compose(&self, then: &EquivalenceTransform) -> EquivalenceTransform {
        let moved_x = Expr::real(self.d4) * Expr::sym("x") + Expr::real(self.d3);
        EquivalenceTransform {
            d0: then.d4 * then.d4 * self.d0 + then.d0,
            d1: then.d1 * self.d1,
            d3: then.d4 * self.d3 + then.d3,
            d4: then.d4 * self.d4,
            shift: (Expr::real(then.d1) * &self.shift + then.shift.substitute("x", &moved_x))
                .simplify(),
        }
    }

    /// Image `(x', tau', phi')` of a point.
    pub fn map_point(&self, x: f64, tau: f64, phi: f64) -> Result<[f64; 3], ExprError> {
        let s = self.shift.eval(&Bindings::from([("x", x)]))?;
        Ok([
            self.d4 * x + self.d3,
            self.d4 * self.d4 * tau + self.d0,
            self.d1 * phi + s,
        ])
    }

    /// Image of a solution `phi(x, tau)`, written in the new variables.
    pub fn push_solution(&self, phi: &Expr) -> Expr {
        let (x_old, tau_old) = self.old_coordinates();
        let image = Expr::real(self.d1) * phi + &self.shift;
        image.substitute_all(
            &[("x".to_string(), x_old), (TAU.to_string(), tau_old)]
                .into_iter()
                .collect(),
        )
    }

    fn old_coordinates(&self) -> (Expr, Expr) {
        let x_old = (Expr::sym("x") - Expr::real(self.d3)) / Expr::real(self.d4);
        let tau_old = (Expr::sym(TAU) - Expr::real(self.d0)) / Expr::real(self.d4 * self.d4);
        (x_old, tau_old)
    }
}

/// Source of the transformed equation: `(d1 fhat(x, phi) - shift''(x)) / d4^2`
/// in the new variables.
pub fn apply_equivalence(h: &HeatSourceModel, g: &EquivalenceTransform) -> HeatSourceModel {
    let (x_old, _) = g.old_coordinates();
    let shift_xx = g.shift.diff("x").diff("x");
    let source = (Expr::real(g.d1) * &h.fhat - shift_xx) / Expr::real(g.d4 * g.d4);
    let phi_old = (Expr::sym(PHI) - &g.shift) / Expr::real(g.d1);
    // substitute phi first: the shift inside phi_old is still in old x
    let fhat = source.substitute(PHI, &phi_old).substitute("x", &x_old);
    HeatSourceModel {
        fhat: fhat.simplify(),
    }
}

/// Outcome of [`is_linearizable`]. For a linearizable model the source is
/// `f = (a^2 + b^4 potential(x) + e^((a x + u)/b^2) g(x)) / 2`, so that the heat
/// form is `phi_tau = phi_xx + (potential(x) phi + g(x)) / b^4`.
#[derive(Clone, Debug)]
pub struct Linearizability {
    pub linearizable: bool,
    pub g: Option<Expr>,
    pub potential: Option<Expr>,
}

pub fn is_linearizable(m: &HeathModel) -> Linearizability {
    let heat = heath_to_heat(m).heat;
    if !heat.is_affine_in_phi() {
        return Linearizability {
            linearizable: false,
            g: None,
            potential: None,
        };
    }
    let b4 = Expr::real(m.b.powi(4));
    let slope = heat.fhat.diff(PHI);
    let intercept = &heat.fhat - Expr::sym(PHI) * &slope;
    let at_one = |e: &Expr| (&b4 * e.substitute(PHI, &Expr::one())).simplify();
    Linearizability {
        linearizable: true,
        g: Some(at_one(&intercept)),
        potential: Some(at_one(&slope)),
    }
}

/// Draws `(x, phi)` pairs with `phi > 0` for sampling checks on heat sources.
pub fn sample_heat_points(n: usize, seed: u64, x: (f64, f64), phi: (f64, f64)) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut rng = crate::lie::point_rng(seed, i as u64);
            (rng.gen_range(x.0..x.1), rng.gen_range(phi.0..phi.1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn exponential_source_is_degenerate() {
        let m = HeathModel::parse(0.0, 1.0, "exp(u)").unwrap();
        let t = heath_to_heat(&m);
        assert_eq!(t.heat.fhat.to_string(), "2");
        assert!(t.warnings.contains(&ModelWarning::LinearizableDegenerate));
        let lin = is_linearizable(&m);
        assert!(lin.linearizable);
        assert_eq!(lin.g.unwrap().to_string(), "2");
        assert_eq!(lin.potential.unwrap().to_string(), "0");
    }

    #[test]
    fn linear_source_gives_phi_log_phi() {
        let m = HeathModel::parse(0.0, 1.0, "u").unwrap();
        let fhat = heath_to_heat(&m).heat.fhat;
        for (x, p) in sample_heat_points(20, 1, (-1.0, 1.0), (0.1, 3.0)) {
            let got = fhat.eval(&Bindings::from([("x", x), (PHI, p)])).unwrap();
            assert!(close(got, -2.0 * p * p.ln(), 1e-12));
        }
    }

    #[test]
    fn coordinate_map_inverts() {
        let map = CoordinateMap::new(0.7, -1.3);
        for (x, t) in sample_heat_points(50, 3, (-2.0, 2.0), (0.0, 1.0)) {
            let u = x * t - 0.4;
            let [x1, tau, phi] = map.to_heat(x, t, u).unwrap();
            let [x2, t2, u2] = map.to_heath(x1, tau, phi).unwrap();
            assert!(close(x2, x, 1e-12) && close(t2, t, 1e-12) && close(u2, u, 1e-12));
        }
    }

    #[test]
    fn residual_factor_matches_ratio() {
        let (a, b) = (0.6, 1.4);
        let m = HeathModel::parse(a, b, "u^2 + x*u").unwrap();
        let tr = heath_to_heat(&m);
        let u = Expr::parse("sin(x)*t + x^2/3").unwrap();
        let heath_res = m.pde().unwrap().residual_of(&u);
        let phi = tr.map.push_solution(&u);
        let heat_res = tr.heat.pde().residual_of(&crate::lie::to_canonical(&phi));
        let factor = tr.map.residual_factor();
        for (x, t) in sample_heat_points(40, 5, (-1.0, 1.0), (0.1, 1.0)) {
            let uval = u.eval(&Bindings::from([("x", x), ("t", t)])).unwrap();
            let [_, tau, _] = tr.map.to_heat(x, t, uval).unwrap();
            let r1 = heath_res
                .eval(&Bindings::from([("x", x), ("t", t)]))
                .unwrap();
            let r2 = heat_res
                .eval(&Bindings::from([("x", x), ("t", tau)]))
                .unwrap();
            let k = factor
                .eval(&Bindings::from([("x", x), ("t", t), ("u", uval)]))
                .unwrap();
            assert!(close(r2, k * r1, 1e-8), "{r2} vs {}", k * r1);
        }
    }

    #[test]
    fn heat_heath_round_trip() {
        let h = HeatSourceModel::parse("phi*(ln(abs(phi)) + x)").unwrap();
        let back = heath_to_heat(&heat_to_heath(&h, 1.0, 1.0).unwrap()).heat;
        for (x, p) in sample_heat_points(100, 7, (-2.0, 2.0), (0.05, 4.0)) {
            let env = Bindings::from([("x", x), (PHI, p)]);
            assert!(close(
                back.fhat.eval(&env).unwrap(),
                h.fhat.eval(&env).unwrap(),
                1e-12
            ));
        }
        let pure = heat_to_heath(&HeatSourceModel::parse("0").unwrap(), 3.0, 2.0).unwrap();
        assert_eq!(pure.f.to_string(), "9/2");
    }

    #[test]
    fn remark_form_recovers_witness() {
        let (a, b) = (1.5, 0.8);
        let f = format!("(exp(({a}*x + u)/{})*x^2 + {})/2", b * b, a * a);
        let lin = is_linearizable(&HeathModel::parse(a, b, &f).unwrap());
        assert!(lin.linearizable);
        let g = lin.g.unwrap();
        for x in [-1.0, 0.3, 2.0] {
            assert!(close(
                g.eval(&Bindings::from([("x", x)])).unwrap(),
                x * x,
                1e-12
            ));
        }
        assert!(!is_linearizable(&HeathModel::parse(0.0, 1.0, "u^2").unwrap()).linearizable);
        let flat = HeathModel::parse(2.0, 1.0, "2").unwrap();
        assert_eq!(flat.warnings(), vec![ModelWarning::SourceIndependentOfU]);
        assert_eq!(is_linearizable(&flat).g.unwrap().to_string(), "0");
    }

    #[test]
    fn equivalence_identity_and_scaling() {
        let h = HeatSourceModel::parse("phi^2").unwrap();
        assert_eq!(
            apply_equivalence(&h, &EquivalenceTransform::identity())
                .fhat
                .to_string(),
            "phi^2"
        );
        let shifted = EquivalenceTransform::new(3.0, 1.0, 0.0, 1.0, Expr::zero()).unwrap();
        assert_eq!(apply_equivalence(&h, &shifted).fhat.to_string(), "phi^2");
        let scaled = EquivalenceTransform::new(0.0, 1.0, 0.0, 2.0, Expr::zero()).unwrap();
        assert_eq!(apply_equivalence(&h, &scaled).fhat.to_string(), "1/4*phi^2");
        assert!(EquivalenceTransform::new(0.0, 0.0, 0.0, 1.0, Expr::zero()).is_err());
    }

    #[test]
    fn descriptors_round_trip() {
        let m = HeathModel::from_json(r#"{"a": 1, "b": 2, "f": "u^2"}"#).unwrap();
        assert_eq!(m.b, 2.0);
        let text = serde_json::to_string(&m.descriptor()).unwrap();
        assert!(HeathModel::from_json(&text).is_ok());
        assert!(HeathModel::from_json(r#"{"a": 1, "b": 0, "f": "u"}"#).is_err());
        assert!(HeatSourceModel::from_json(r#"{"fhat": "phi*t"}"#).is_err());
    }
}
