//! The group classification of `phi_tau = phi_xx + fhat(x, phi)`: every admitted
//! Lie algebra with its family of sources and a basis of generators.
//!
//! Entries are stored as expression templates. Some rows do not verify as printed;
//! for those a [`Patch`] holds the smallest change that makes every generator a
//! symmetry, and both forms stay available through [`Form`].

mod table;

use crate::expr::{Bindings, Expr, ExprError};
use crate::lie::{
    self, check_symmetry, EvolutionPde, Generator, LieError, SampleBox, SymmetryCondition,
    SymmetryReport,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("{id}: unknown parameter `{name}`")]
    UnknownParameter { id: String, name: String },
    #[error("{id}: missing parameter `{name}`")]
    MissingParameter { id: String, name: String },
    #[error("{id}: inadmissible parameters, `{predicate}` fails")]
    Inadmissible { id: String, predicate: String },
    #[error("{id}: an arbitrary function is required")]
    MissingFunction { id: String },
    #[error("{id}: the arbitrary function must satisfy F'' != 0")]
    DegenerateFunction { id: String },
    #[error("{id}: choose a sign variant (plus or minus)")]
    SignRequired { id: String },
    #[error("{id}: entry has no sign variants")]
    SignNotApplicable { id: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// What the arbitrary function of an entry is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FnArg {
    /// `F(psi)`, written by the caller as an expression in `psi`.
    Psi,
    /// `F(x)`, written in `x`.
    X,
    /// The whole source `fhat(x, phi)`.
    Source,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FunctionData {
    pub arg: FnArg,
    /// Requires `F'' != 0`.
    pub convex: bool,
    pub default: &'static str,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParamData {
    pub name: &'static str,
    /// Range used for random admissible draws.
    pub draw: (f64, f64),
    /// Appears only in the literal form of a patched entry.
    pub literal_only: bool,
}

#[derive(Clone, Copy, Debug)]
pub enum Constraint {
    NonZero(&'static str),
    Positive(&'static str),
    Negative(&'static str),
    NotIn(&'static str, &'static [f64]),
}

impl Constraint {
    fn expr(&self) -> &'static str {
        match self {
            Constraint::NonZero(e)
            | Constraint::Positive(e)
            | Constraint::Negative(e)
            | Constraint::NotIn(e, _) => e,
        }
    }

    /// `None` when the constraint mentions a parameter missing from `params`.
    pub fn holds(&self, params: &BTreeMap<String, f64>) -> Option<bool> {
        self.holds_with_margin(params, 0.0)
    }

    /// Like [`Constraint::holds`], but values within `margin` of the excluded set
    /// count as violations.
    pub fn holds_with_margin(&self, params: &BTreeMap<String, f64>, margin: f64) -> Option<bool> {
        let e = Expr::parse(self.expr()).expect("constraint templates parse");
        let env: Bindings = params.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let v = e.eval(&env).ok()?;
        let gap = margin.max(1e-12);
        Some(match self {
            Constraint::NonZero(_) => v.abs() > gap,
            Constraint::Positive(_) => v > margin,
            Constraint::Negative(_) => v < -margin,
            Constraint::NotIn(_, bad) => bad.iter().all(|b| (v - b).abs() > gap),
        })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::NonZero(e) => write!(f, "{e} != 0"),
            Constraint::Positive(e) => write!(f, "{e} > 0"),
            Constraint::Negative(e) => write!(f, "{e} < 0"),
            Constraint::NotIn(e, bad) => {
                let list: Vec<String> = bad.iter().map(|b| b.to_string()).collect();
                write!(f, "{e} not in {{{}}}", list.join(", "))
            }
        }
    }
}

/// Replacement templates for a row that does not verify as printed.
#[derive(Clone, Copy, Debug)]
pub struct Patch {
    pub fhat: Option<&'static str>,
    pub psi: Option<&'static str>,
    pub generators: Option<&'static [[&'static str; 3]]>,
    pub note: &'static str,
}

#[derive(Debug)]
pub struct EntryData {
    pub id: &'static str,
    pub params: &'static [ParamData],
    pub constraints: &'static [Constraint],
    pub signed: bool,
    pub function: Option<FunctionData>,
    pub psi: Option<&'static str>,
    pub fhat: &'static str,
    /// `[xi_x, xi_tau, eta]` per generator.
    pub generators: &'static [[&'static str; 3]],
    pub patch: Option<Patch>,
    /// How an ambiguous printed row was read.
    pub reading: Option<&'static str>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "plus" | "+" => Some(Sign::Plus),
            "minus" | "-" => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

/// Which templates to use for a patched entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Literal,
    #[default]
    Corrected,
}

impl EntryData {
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    pub fn sign_variants(&self) -> Vec<Option<Sign>> {
        if self.signed {
            vec![Some(Sign::Plus), Some(Sign::Minus)]
        } else {
            vec![None]
        }
    }

    /// Parameters needed by `form`.
    pub fn params_for(&self, form: Form) -> impl Iterator<Item = &ParamData> {
        self.params
            .iter()
            .filter(move |p| form == Form::Literal || !p.literal_only || self.patch.is_none())
    }

    pub fn fhat_template(&self, form: Form) -> &'static str {
        self.patched(form, |p| p.fhat).unwrap_or(self.fhat)
    }

    pub fn psi_template(&self, form: Form) -> Option<&'static str> {
        self.patched(form, |p| p.psi).or(self.psi)
    }

    pub fn generator_templates(&self, form: Form) -> &'static [[&'static str; 3]] {
        self.patched(form, |p| p.generators)
            .unwrap_or(self.generators)
    }

    fn patched<T>(&self, form: Form, pick: impl Fn(&Patch) -> Option<T>) -> Option<T> {
        match form {
            Form::Literal => None,
            Form::Corrected => self.patch.as_ref().and_then(pick),
        }
    }

    /// Random admissible parameters within the draw ranges.
    pub fn draw_params(&self, form: Form, rng: &mut impl Rng) -> BTreeMap<String, f64> {
        loop {
            let params: BTreeMap<String, f64> = self
                .params_for(form)
                .map(|p| (p.name.to_string(), rng.gen_range(p.draw.0..p.draw.1)))
                .collect();
            if self
                .constraints
                .iter()
                .all(|c| c.holds(&params) != Some(false))
            {
                return params;
            }
        }
    }

    pub fn default_function(&self) -> Option<Expr> {
        self.function
            .map(|f| Expr::parse(f.default).expect("default functions parse"))
    }
}

pub fn entries() -> &'static [EntryData] {
    &table::ENTRIES
}

pub fn entry(id: &str) -> Result<&'static EntryData, CatalogError> {
    entries()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| CatalogError::UnknownEntry(id.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct EntrySummary {
    pub id: &'static str,
    pub dimension: usize,
    pub params: Vec<&'static str>,
    pub constraints: Vec<String>,
    pub variants: Vec<Sign>,
    pub function: Option<String>,
    pub fhat: &'static str,
    pub psi: Option<&'static str>,
    pub generators: Vec<[&'static str; 3]>,
    pub correction: Option<CorrectionSummary>,
    pub reading: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectionSummary {
    pub note: &'static str,
    pub fhat: Option<&'static str>,
    pub psi: Option<&'static str>,
    pub generators: Option<Vec<[&'static str; 3]>>,
}

fn describe_function(f: &FunctionData) -> String {
    match (f.arg, f.convex) {
        (FnArg::Source, _) => "any fhat(x, phi)".to_string(),
        (FnArg::Psi, true) => "F(psi) with F'' != 0".to_string(),
        (FnArg::Psi, false) => "F(psi)".to_string(),
        (FnArg::X, _) => "F(x)".to_string(),
    }
}

pub fn list_entries() -> Vec<EntrySummary> {
    entries()
        .iter()
        .map(|e| EntrySummary {
            id: e.id,
            dimension: e.dimension(),
            params: e.params_for(Form::Corrected).map(|p| p.name).collect(),
            constraints: e.constraints.iter().map(|c| c.to_string()).collect(),
            variants: e.sign_variants().into_iter().flatten().collect(),
            function: e.function.as_ref().map(describe_function),
            fhat: e.fhat,
            psi: e.psi,
            generators: e.generators.to_vec(),
            correction: e.patch.map(|p| CorrectionSummary {
                note: p.note,
                fhat: p.fhat,
                psi: p.psi,
                generators: p.generators.map(|g| g.to_vec()),
            }),
            reading: e.reading,
        })
        .collect()
}

/// The whole table as JSON.
pub fn export_json() -> serde_json::Value {
    serde_json::to_value(list_entries()).expect("summaries serialize")
}

/// A concrete member of an entry: parameters, sign and arbitrary function fixed.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: &'static str,
    pub sign: Option<Sign>,
    pub form: Form,
    pub params: BTreeMap<String, f64>,
    /// Source in `(x, phi)`.
    pub fhat: Expr,
    /// Generators in canonical names (`t`, `u` for `tau`, `phi`).
    pub generators: Vec<Generator>,
    pub sample_box: SampleBox,
}

impl Instance {
    pub fn pde(&self) -> EvolutionPde {
        EvolutionPde::heat_with_source(&self.fhat)
    }

    pub fn label(&self) -> String {
        variant_label(self.id, self.sign)
    }

    pub fn entry(&self) -> &'static EntryData {
        entry(self.id).expect("instances come from the table")
    }
}

pub fn variant_label(id: &str, sign: Option<Sign>) -> String {
    match sign {
        Some(s) => format!("{id}[{s}]"),
        None => id.to_string(),
    }
}

fn substitution(params: &BTreeMap<String, f64>, sign: Option<Sign>) -> HashMap<String, Expr> {
    let mut map: HashMap<String, Expr> = params
        .iter()
        .map(|(k, v)| (k.clone(), Expr::real(*v)))
        .collect();
    if let Some(s) = sign {
        map.insert("s".to_string(), Expr::real(s.value()));
    }
    map
}

fn check_sign(e: &EntryData, sign: Option<Sign>) -> Result<(), CatalogError> {
    match (e.signed, sign) {
        (true, None) => Err(CatalogError::SignRequired {
            id: e.id.to_string(),
        }),
        (false, Some(_)) => Err(CatalogError::SignNotApplicable {
            id: e.id.to_string(),
        }),
        _ => Ok(()),
    }
}

fn check_function(e: &EntryData, data: &FunctionData, f: &Expr) -> Result<(), CatalogError> {
    if !data.convex {
        return Ok(());
    }
    let f2 = f.diff("psi").diff("psi");
    let nonzero = (0..16).any(|i| {
        let v = 0.5 + 0.2 * i as f64;
        f2.eval(&Bindings::from([("psi", v)]))
            .is_ok_and(|d| d.abs() > 1e-12)
    });
    if nonzero {
        Ok(())
    } else {
        Err(CatalogError::DegenerateFunction {
            id: e.id.to_string(),
        })
    }
}

/// Fixes the parameters, sign and arbitrary function of an entry.
pub fn instantiate(
    id: &str,
    params: &BTreeMap<String, f64>,
    function: Option<&Expr>,
    sign: Option<Sign>,
    form: Form,
) -> Result<Instance, CatalogError> {
    let e = entry(id)?;
    check_sign(e, sign)?;
    for name in params.keys() {
        if !e.params.iter().any(|p| p.name == name) {
            return Err(CatalogError::UnknownParameter {
                id: id.to_string(),
                name: name.clone(),
            });
        }
    }
    let used: BTreeMap<String, f64> = e
        .params_for(form)
        .map(|p| {
            params
                .get(p.name)
                .map(|v| (p.name.to_string(), *v))
                .ok_or_else(|| CatalogError::MissingParameter {
                    id: id.to_string(),
                    name: p.name.to_string(),
                })
        })
        .collect::<Result<_, _>>()?;
    for c in e.constraints {
        if c.holds(&used) != Some(true) {
            return Err(CatalogError::Inadmissible {
                id: id.to_string(),
                predicate: c.to_string(),
            });
        }
    }
    let subs = substitution(&used, sign);

    let mut fhat = Expr::parse(e.fhat_template(form))?;
    if let Some(data) = &e.function {
        let f = function.ok_or_else(|| CatalogError::MissingFunction { id: id.to_string() })?;
        check_function(e, data, f)?;
        fhat = fhat.substitute("F", f);
    }
    if let Some(psi) = e.psi_template(form) {
        fhat = fhat.substitute("psi", &Expr::parse(psi)?);
    }
    let fhat = fhat.substitute_all(&subs);

    let generators = e
        .generator_templates(form)
        .iter()
        .map(|[a, b, c]| {
            let parts = [a, b, c].map(|s| Expr::parse(s).map(|x| x.substitute_all(&subs)));
            let [a, b, c] = parts;
            Ok(Generator::from_heat(&a?, &b?, &c?))
        })
        .collect::<Result<Vec<_>, CatalogError>>()?;

    Ok(Instance {
        id: e.id,
        sign,
        form,
        params: used,
        fhat,
        generators,
        sample_box: SampleBox::default(),
    })
}

/// [`instantiate`] with the entry's default function.
pub fn instantiate_default(
    id: &str,
    params: &BTreeMap<String, f64>,
    sign: Option<Sign>,
    form: Form,
) -> Result<Instance, CatalogError> {
    let f = entry(id)?.default_function();
    instantiate(id, params, f.as_ref(), sign, form)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCheck {
    pub index: usize,
    /// `[xi_x, xi_tau, eta]` in heat variables.
    pub generator: [String; 3],
    pub report: SymmetryReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub id: &'static str,
    pub label: String,
    pub form: Form,
    pub params: BTreeMap<String, f64>,
    pub fhat: String,
    pub generators: Vec<GeneratorCheck>,
    pub passed: bool,
    /// Set when the printed row needed a reading choice.
    pub reading: Option<&'static str>,
}

/// Checks every generator of `inst` at `n` seeded jet points.
pub fn verify_instance(
    inst: &Instance,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<EntryReport, CatalogError> {
    let pde = inst.pde();
    let generators = inst
        .generators
        .iter()
        .enumerate()
        .map(|(index, g)| {
            let report = check_symmetry(&pde, g, n, seed, &inst.sample_box, tol)?;
            Ok(GeneratorCheck {
                index,
                generator: g.heat_components().map(|c| c.to_string()),
                report,
            })
        })
        .collect::<Result<Vec<_>, CatalogError>>()?;
    Ok(EntryReport {
        id: inst.id,
        label: inst.label(),
        form: inst.form,
        params: inst.params.clone(),
        fhat: inst.fhat.to_string(),
        passed: generators.iter().all(|g| g.report.passed),
        generators,
        reading: inst.entry().reading,
    })
}

/// Instantiates with the default function and verifies.
pub fn verify_entry(
    id: &str,
    params: &BTreeMap<String, f64>,
    sign: Option<Sign>,
    form: Form,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<EntryReport, CatalogError> {
    verify_instance(&instantiate_default(id, params, sign, form)?, n, seed, tol)
}

/// Verifies `draws` random admissible instances of one variant. Draw `k` uses
/// parameters from stream `k` of `seed` and jet points from `seed + k`.
pub fn verify_random(
    e: &EntryData,
    sign: Option<Sign>,
    form: Form,
    draws: usize,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<EntryReport>, CatalogError> {
    (0..draws)
        .into_par_iter()
        .map(|k| {
            let params = e.draw_params(form, &mut lie::point_rng(seed, k as u64));
            let inst = instantiate_default(e.id, &params, sign, form)?;
            verify_instance(&inst, n, seed.wrapping_add(k as u64), tol)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureCheck {
    pub pair: (usize, usize),
    pub bracket: [String; 3],
    pub report: SymmetryReport,
}

/// Checks that the commutator of every pair of generators is again a symmetry.
pub fn closure_check(
    inst: &Instance,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<ClosureCheck>, CatalogError> {
    let pde = inst.pde();
    let mut out = Vec::new();
    for i in 0..inst.generators.len() {
        for j in i + 1..inst.generators.len() {
            let b = inst.generators[i].bracket(&inst.generators[j]).simplify();
            let report = check_symmetry(&pde, &b, n, seed, &inst.sample_box, tol)?;
            out.push(ClosureCheck {
                pair: (i, j),
                bracket: b.heat_components().map(|c| c.to_string()),
                report,
            });
        }
    }
    Ok(out)
}

/// Search settings for [`match_fhat`].
#[derive(Clone, Debug)]
pub struct MatchOptions {
    /// Coarse values tried for every free parameter.
    pub grid: Vec<f64>,
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    /// Number of best coarse candidates refined by pattern search.
    pub refine: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            grid: vec![-3.0, -2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0, 3.0],
            points: 24,
            seed: lie::DEFAULT_SEED,
            tol: lie::DEFAULT_TOLERANCE,
            refine: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Match {
    pub id: &'static str,
    pub sign: Option<Sign>,
    /// Values found for the parameters that enter the generators.
    pub params: BTreeMap<String, f64>,
    pub residual: f64,
}

struct Objective {
    conditions: Vec<SymmetryCondition>,
    components: Vec<Vec<crate::expr::CompiledExpr>>,
    points: Vec<lie::JetPoint>,
}

impl Objective {
    /// Largest scaled residual; stops early once `cutoff` is exceeded.
    fn value(&self, params: &[f64], cutoff: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (cond, comps) in self.conditions.iter().zip(&self.components) {
            if self.vanishing_generator(comps, params) {
                return f64::INFINITY;
            }
            for p in &self.points {
                let r = match cond.evaluate_with(p, params) {
                    Ok((_, 0.0)) => 0.0,
                    Ok((v, s)) => v.abs() / s,
                    Err(_) => return f64::INFINITY,
                };
                worst = worst.max(r);
                if worst > cutoff {
                    return worst;
                }
            }
        }
        worst
    }

    fn vanishing_generator(&self, comps: &[crate::expr::CompiledExpr], params: &[f64]) -> bool {
        self.points.iter().take(3).all(|p| {
            let mut args = vec![p.x, p.t, p.u];
            args.extend_from_slice(params);
            comps.iter().all(|c| c.eval(&args).is_ok_and(|v| v == 0.0))
        })
    }
}

/// Entries whose generators are symmetries of `phi_tau = phi_xx + fhat` for some
/// admissible parameters. The search covers only parameters that enter the
/// generators; a coarse grid is followed by pattern-search refinement.
pub fn match_fhat(fhat: &Expr, opts: &MatchOptions) -> Result<Vec<Match>, CatalogError> {
    let pde = EvolutionPde::heat_with_source(fhat);
    let points = SampleBox::default().points(opts.points, opts.seed);
    let variants: Vec<(&'static EntryData, Option<Sign>)> = entries()
        .iter()
        .flat_map(|e| e.sign_variants().into_iter().map(move |s| (e, s)))
        .collect();
    let found: Vec<Option<Match>> = variants
        .par_iter()
        .map(|&(e, sign)| match_variant(e, sign, &pde, &points, opts))
        .collect::<Result<_, _>>()?;
    Ok(found.into_iter().flatten().collect())
}

fn match_variant(
    e: &'static EntryData,
    sign: Option<Sign>,
    pde: &EvolutionPde,
    points: &[lie::JetPoint],
    opts: &MatchOptions,
) -> Result<Option<Match>, CatalogError> {
    let subs = substitution(&BTreeMap::new(), sign);
    let templates: Vec<[Expr; 3]> = e
        .generator_templates(Form::Corrected)
        .iter()
        .map(|g| {
            let [a, b, c] = g.map(|s| Expr::parse(s).map(|x| x.substitute_all(&subs)));
            Ok::<_, ExprError>([a?, b?, c?])
        })
        .collect::<Result<_, _>>()?;
    let names: Vec<&str> = e
        .params_for(Form::Corrected)
        .map(|p| p.name)
        .filter(|n| templates.iter().flatten().any(|c| c.depends_on(n)))
        .collect();
    let mut conditions = Vec::new();
    let mut components = Vec::new();
    let slots: Vec<&str> = [lie::X, lie::T, lie::U]
        .into_iter()
        .chain(names.iter().copied())
        .collect();
    for [a, b, c] in &templates {
        let g = Generator::from_heat(a, b, c);
        conditions.push(SymmetryCondition::with_parameters(pde, &g, &names)?);
        components.push(
            g.components()
                .iter()
                .map(|c| c.compile(&slots))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let objective = Objective {
        conditions,
        components,
        points: points.to_vec(),
    };
    let admissible = |values: &[f64]| {
        let params: BTreeMap<String, f64> = names
            .iter()
            .map(|n| n.to_string())
            .zip(values.iter().copied())
            .collect();
        e.constraints
            .iter()
            .all(|c| c.holds_with_margin(&params, MATCH_MARGIN) != Some(false))
    };

    let mut coarse: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut values = vec![0.0; names.len()];
    let mut index = vec![0usize; names.len()];
    loop {
        for (v, &i) in values.iter_mut().zip(&index) {
            *v = opts.grid[i];
        }
        if admissible(&values) {
            let r = objective.value(&values, 1.0);
            if r < opts.tol {
                return Ok(Some(found(e, sign, &names, &values, r)));
            }
            if r.is_finite() {
                coarse.push((r, values.clone()));
            }
        }
        // odometer over the grid
        let mut k = 0;
        while k < index.len() {
            index[k] += 1;
            if index[k] < opts.grid.len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
        if k == index.len() {
            break;
        }
    }
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, start) in coarse.into_iter().take(opts.refine) {
        let (r, best) = pattern_search(&objective, start, &admissible);
        if r < opts.tol {
            return Ok(Some(found(e, sign, &names, &best, r)));
        }
    }
    Ok(None)
}

fn found(
    e: &'static EntryData,
    sign: Option<Sign>,
    names: &[&str],
    values: &[f64],
    residual: f64,
) -> Match {
    Match {
        id: e.id,
        sign,
        params: names
            .iter()
            .map(|n| n.to_string())
            .zip(values.iter().copied())
            .collect(),
        residual,
    }
}

const MAX_PATTERN_MOVES: usize = 400;
// refinement can creep onto an excluded boundary where the algebra degenerates
const MATCH_MARGIN: f64 = 1e-4;

fn pattern_search(
    objective: &Objective,
    start: Vec<f64>,
    admissible: &impl Fn(&[f64]) -> bool,
) -> (f64, Vec<f64>) {
    let mut best = start;
    let mut value = objective.value(&best, f64::INFINITY);
    let mut step = 0.25;
    let mut moves = 0;
    while step > 1e-9 && value > 0.0 && moves < MAX_PATTERN_MOVES {
        moves += 1;
        let mut improved = false;
        for k in 0..best.len() {
            for dir in [1.0, -1.0] {
                let mut trial = best.clone();
                trial[k] += dir * step;
                if !admissible(&trial) {
                    continue;
                }
                let r = objective.value(&trial, value);
                if r < value {
                    value = r;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (value, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn table_shape() {
        assert_eq!(entries().len(), 22);
        for e in entries() {
            for form in [Form::Literal, Form::Corrected] {
                assert_eq!(e.generator_templates(form).len(), e.dimension());
            }
        }
        let a1 = &list_entries()[0];
        assert_eq!(a1.function.as_deref(), Some("any fhat(x, phi)"));
        let a352 = list_entries()
            .into_iter()
            .find(|s| s.id == "A_3_5_2")
            .unwrap();
        assert_eq!(a352.constraints, vec!["A != 0", "B not in {0, -1, -2}"]);
        assert_eq!(a352.variants.len(), 2);
    }

    #[test]
    fn instantiation_substitutes_everything() {
        let inst =
            instantiate_default("A_3_5_9", &params(&[("B", 1.0)]), None, Form::Corrected).unwrap();
        let env = Bindings::from([("x", 0.4), ("phi", 1.3)]);
        let want = -(0.4f64).exp() * 1.69 - 0.25 * (-0.4f64).exp();
        assert!((inst.fhat.eval(&env).unwrap() - want).abs() < 1e-14);
        assert_eq!(inst.generators.len(), 3);
        assert_eq!(
            inst.generators[2].heat_components()[0].to_string(),
            "x + 2*tau"
        );

        let a44 = instantiate_default(
            "A_4_4",
            &params(&[("A", 1.0), ("B", 2.0)]),
            None,
            Form::Corrected,
        )
        .unwrap();
        assert_eq!(a44.generators.len(), 4);
        assert_eq!(a44.generators[2].heat_components()[2].to_string(), "-2*phi");
    }

    #[test]
    fn inadmissible_parameters_rejected() {
        let err = instantiate_default(
            "A_3_5_2",
            &params(&[("A", 1.0), ("B", 0.0)]),
            Some(Sign::Plus),
            Form::Corrected,
        )
        .unwrap_err();
        assert!(
            matches!(err, CatalogError::Inadmissible { ref predicate, .. } if predicate.starts_with("B not in"))
        );
        assert!(matches!(
            instantiate_default(
                "A_3_5_2",
                &params(&[("A", 1.0), ("B", 1.0)]),
                None,
                Form::Corrected
            ),
            Err(CatalogError::SignRequired { .. })
        ));
        assert!(matches!(
            instantiate(
                "A_2_2_2",
                &params(&[("A", 2.0)]),
                None,
                None,
                Form::Corrected
            ),
            Err(CatalogError::MissingFunction { .. })
        ));
        let linear = Expr::parse("3*psi").unwrap();
        assert!(matches!(
            instantiate(
                "A_2_2_2",
                &params(&[("A", 2.0)]),
                Some(&linear),
                None,
                Form::Corrected
            ),
            Err(CatalogError::DegenerateFunction { .. })
        ));
    }

    #[test]
    fn representative_entries_verify() {
        let r = verify_entry("A_1", &BTreeMap::new(), None, Form::Corrected, 50, 1, 1e-8).unwrap();
        assert!(r.passed);
        let r = verify_entry(
            "A_2_2_2",
            &params(&[("A", 2.0)]),
            None,
            Form::Corrected,
            100,
            2,
            1e-8,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_entry(
            "A_4_1",
            &params(&[("A", 5.0), ("B", 1.0)]),
            None,
            Form::Corrected,
            100,
            3,
            1e-8,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn literal_typo_detected() {
        let p = params(&[("A", 0.7), ("B", 0.5)]);
        let lit =
            verify_entry("A_3_5_2", &p, Some(Sign::Minus), Form::Literal, 50, 4, 1e-8).unwrap();
        assert!(!lit.passed);
        assert!(lit.generators.iter().any(|g| g.report.worst_term.is_some()));
        let fixed = verify_entry(
            "A_3_5_2",
            &p,
            Some(Sign::Minus),
            Form::Corrected,
            50,
            4,
            1e-8,
        )
        .unwrap();
        assert!(fixed.passed);
        let plus =
            verify_entry("A_3_5_2", &p, Some(Sign::Plus), Form::Literal, 50, 4, 1e-8).unwrap();
        assert!(plus.passed);
    }

    #[test]
    fn export_is_json_array() {
        let v = export_json();
        assert_eq!(v.as_array().unwrap().len(), 22);
        assert_eq!(v[0]["id"], "A_1");
    }
}
