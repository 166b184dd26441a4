//! Acceptance criteria. Prints one PASS/FAIL line per criterion, with indented notes,
//! and exits non-zero if any criterion fails.

use heathsym::catalog::{self, Form, Instance};
use heathsym::expr::{CompiledExpr, Expr};
use heathsym::lie::{self, Generator, SampleBox};
use heathsym::model::{self, HeathModel, PHI};
use heathsym::solutions::{self, BarrierCoefficients, Transcription};
use heathsym::solver::{convergence_study, ConvergenceCase, Scheme};
use std::collections::BTreeMap;
use std::error::Error;
use std::process::Command;

type Res = Result<Outcome, Box<dyn Error>>;

struct Outcome {
    passed: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Outcome {
            passed,
            summary: summary.into(),
            notes: Vec::new(),
        }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

const SEED: u64 = lie::DEFAULT_SEED;

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Fourth-order central difference of `f` in slot `slot` at `at`.
fn central(f: &CompiledExpr, at: &[f64], slot: usize) -> Option<f64> {
    let h = 1e-3 * at[slot].abs().max(1.0);
    let d = |h: f64| -> Option<f64> {
        let (mut lo, mut hi) = (at.to_vec(), at.to_vec());
        lo[slot] -= h;
        hi[slot] += h;
        let (a, b) = (f.eval(&hi).ok()?, f.eval(&lo).ok()?);
        Some((a - b) / (2.0 * h))
    };
    Some((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn instances() -> Result<Vec<Instance>, Box<dyn Error>> {
    let mut out = Vec::new();
    for e in catalog::entries() {
        for sign in e.sign_variants() {
            let p = e.draw_params(Form::Corrected, &mut lie::point_rng(SEED, 0));
            out.push(catalog::instantiate_default(
                e.id,
                &p,
                sign,
                Form::Corrected,
            )?);
        }
    }
    Ok(out)
}

fn catalog_soundness() -> Res {
    let (draws, points, tol) = (10, 100, 1e-8);
    let mut variants = 0;
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    let mut ambiguous = Vec::new();
    for e in catalog::entries() {
        for sign in e.sign_variants() {
            variants += 1;
            let reports =
                catalog::verify_random(e, sign, Form::Corrected, draws, points, SEED, tol)?;
            let ok = reports.iter().all(|r| r.passed);
            for r in &reports {
                for g in &r.generators {
                    worst = worst.max(g.report.max_abs);
                }
            }
            let label = catalog::variant_label(e.id, sign);
            if !ok {
                failed.push(label.clone());
            }
            if e.reading.is_some() {
                ambiguous.push(format!("{label}:{}", if ok { "pass" } else { "FAIL" }));
            }
        }
    }
    let mut out = Outcome::new(
        failed.is_empty(),
        format!("{variants} variants x {draws} draws x {points} points, worst scaled residual {worst:.1e} (tol {tol:.0e})"),
    )
    .note(format!("entries needing a reading choice: {}", ambiguous.join(" ")));
    if !failed.is_empty() {
        out = out.note(format!("failing: {}", failed.join(" ")));
    }
    for e in catalog::entries().iter().filter(|e| e.patch.is_some()) {
        for sign in e.sign_variants() {
            let reports = catalog::verify_random(e, sign, Form::Literal, 3, points, SEED, tol)?;
            let bad = reports
                .iter()
                .flat_map(|r| r.generators.iter())
                .find(|g| !g.report.passed);
            let label = catalog::variant_label(e.id, sign);
            out = out.note(match bad {
                Some(g) => format!(
                    "literal {label}: X{} fails, worst term {}",
                    g.index + 1,
                    g.report.worst_term.as_deref().unwrap_or("?")
                ),
                None => format!("literal {label}: passes at these draws"),
            });
        }
    }
    Ok(out)
}

fn transformation() -> Res {
    let models = [
        (0.6, 1.4, "u^2 + x*u"),
        (-1.0, 0.7, "exp(u/3)*x + sin(u)"),
        (2.0, 1.1, "x^2*u/(1 + u^2)"),
    ];
    let test_u = Expr::parse("sin(x)*t + x^2/3 + 0.2*cos(t*x)")?;
    let pts = model::sample_heat_points(100, SEED, (-1.0, 1.0), (0.1, 1.0));
    let (mut worst_ratio, mut worst_round): (f64, f64) = (0.0, 0.0);
    for (a, b, f) in models {
        let m = HeathModel::parse(a, b, f)?;
        let tr = model::heath_to_heat(&m);
        let heath_res = m.pde()?.residual_of(&test_u).compile(&["x", "t"])?;
        let phi = tr.map.push_solution(&test_u);
        let heat_res = tr
            .heat
            .pde()
            .residual_of(&lie::to_canonical(&phi))
            .compile(&["x", "t"])?;
        let factor = tr.map.residual_factor().compile(&["x", "t", "u"])?;
        let u = test_u.compile(&["x", "t"])?;
        for &(x, t) in &pts {
            let uval = u.eval(&[x, t])?;
            let [_, tau, _] = tr.map.to_heat(x, t, uval)?;
            let lhs = heat_res.eval(&[x, tau])?;
            let rhs = factor.eval(&[x, t, uval])? * heath_res.eval(&[x, t])?;
            worst_ratio = worst_ratio.max(rel(lhs, rhs));
        }
        let back = model::heath_to_heat(&model::heat_to_heath(&tr.heat, a, b)?)
            .heat
            .fhat
            .compile(&["x", PHI])?;
        let fhat = tr.heat.fhat.compile(&["x", PHI])?;
        for (x, p) in model::sample_heat_points(100, SEED + 1, (-2.0, 2.0), (0.05, 4.0)) {
            worst_round = worst_round.max(rel(back.eval(&[x, p])?, fhat.eval(&[x, p])?));
        }
    }
    Ok(Outcome::new(
        worst_ratio < 1e-8 && worst_round < 1e-12,
        format!("residual identity rel err {worst_ratio:.1e} (tol 1e-8), round-trip fhat rel err {worst_round:.1e} (tol 1e-12)"),
    ))
}

fn derivative_engine() -> Res {
    let slots = [lie::X, lie::T, lie::U];
    let pts = SampleBox::default().points(20, SEED);
    let (mut exprs, mut comparisons) = (0usize, 0usize);
    let mut worst: (f64, String) = (0.0, String::new());
    for inst in instances()? {
        let mut corpus = vec![lie::to_canonical(&inst.fhat)];
        for g in &inst.generators {
            corpus.extend(g.components().into_iter().cloned());
        }
        for e in corpus {
            exprs += 1;
            let f = e.compile(&slots)?;
            for (slot, var) in slots.iter().enumerate() {
                let d = e.diff(var).compile(&slots)?;
                for p in &pts {
                    let at = [p.x, p.t, p.u];
                    let (Ok(sym), Some(fd)) = (d.eval(&at), central(&f, &at, slot)) else {
                        continue;
                    };
                    comparisons += 1;
                    let err = rel(sym, fd);
                    if err > worst.0 {
                        worst = (err, format!("{} d/d{var} of {e}", inst.label()));
                    }
                }
            }
        }
    }
    let out = Outcome::new(
        worst.0 < 1e-6 && comparisons > 0,
        format!(
            "{exprs} expressions, {comparisons} comparisons, worst rel err {:.1e} (tol 1e-6)",
            worst.0
        ),
    );
    Ok(if worst.0 > 0.0 {
        out.note(format!("worst at {}", worst.1))
    } else {
        out
    })
}

fn terminal_problem() -> Res {
    let sol = solutions::terminal_solution(1.0, 1.0, 1.0)?;
    let datum = sol.terminal_error(201)?.ok_or("no terminal datum")?;
    let residual = sol.max_residual(25)?;
    let printed = solutions::terminal_checks(1.0, 1.0, 1.0, 100, SEED)?;
    Ok(Outcome::new(
        datum < 1e-9 && residual < 1e-7,
        format!("u(x,T) - 1 max {datum:.1e} on [-1,1] (tol 1e-9), PDE residual {residual:.1e} (tol 1e-7)"),
    )
    .note(format!(
        "similarity form with the printed integration constant misses the datum by {:.1e}; matching constant gives {:.1e}",
        printed.printed_constant_datum_error, printed.similarity_gap
    ))
    .note(format!(
        "reduced ODE residual: as printed {:.1e}, derived form {:.1e}",
        printed.reduced_ode_printed, printed.reduced_ode_corrected
    )))
}

fn max_over_tau(e: &Expr) -> Result<f64, Box<dyn Error>> {
    let c = e.compile(&["tau"])?;
    let mut worst: f64 = 0.0;
    for i in 0..41 {
        worst = worst.max(c.eval(&[-1.0 + 0.05 * i as f64])?.abs());
    }
    Ok(worst)
}

fn barrier_problem() -> Res {
    let spec = solutions::exponential_barrier(1.0, 1.0, 0.05, 0.9, 100.0, 1.0, 1.0)?;
    let sol = solutions::barrier_solution(&spec)?;
    let barrier = sol.barrier_error(201)?.ok_or("no barrier")?;
    let residual = sol.max_residual(25)?;

    let sets = [
        (
            1.0,
            -3.0,
            BarrierCoefficients {
                c1: 1.0,
                c2: 1.0,
                c3: 1.0,
                c4: 1.0,
                c5: 1.0,
                c6: 1.0,
            },
        ),
        (
            1.0,
            -3.0,
            BarrierCoefficients {
                c1: 1.0,
                c2: 0.7,
                c3: 1.3,
                c4: 0.4,
                c5: 0.6,
                c6: 1.0,
            },
        ),
        (
            0.5,
            -2.0,
            BarrierCoefficients {
                c1: -0.8,
                c2: 0.3,
                c3: 0.9,
                c4: -0.5,
                c5: 1.7,
                c6: -2.0,
            },
        ),
    ];
    let (mut ode_worst, mut printed_worst): (f64, f64) = (0.0, 0.0);
    for (big_a, big_b, c) in &sets {
        let h = solutions::barrier_h_general(*big_a, *big_b, c)?;
        let h_ode = solutions::barrier_h_ode(*big_a, *big_b, c)?;
        ode_worst = ode_worst.max(max_over_tau(&solutions::first_order_along(
            &h_ode, &h, "Hp",
        ))?);
        let r_ode = solutions::barrier_r_ode(1.0, 1.0, *big_a, *big_b, c)?;
        let r =
            solutions::barrier_r_general(Transcription::Corrected, 1.0, 1.0, *big_a, *big_b, c)?;
        ode_worst = ode_worst.max(max_over_tau(&solutions::first_order_along(
            &r_ode, &r, "Rp",
        ))?);
        let printed =
            solutions::barrier_r_general(Transcription::Printed, 1.0, 1.0, *big_a, *big_b, c)?;
        printed_worst = printed_worst.max(max_over_tau(&solutions::first_order_along(
            &r_ode, &printed, "Rp",
        ))?);
    }

    let checks = solutions::barrier_checks(&spec, 100, SEED)?;
    let scale = spec.beta * spec.strike;
    let h_gap = checks.h_general_gap / scale;
    let r_gap = checks.r_general_gap / max_over_tau(&spec.r)?;
    Ok(Outcome::new(
        barrier < 1e-9 && residual < 1e-7 && ode_worst < 1e-10 && h_gap < 1e-12 && r_gap < 1e-12,
        format!(
            "u(H,t) - R max {barrier:.1e} (tol 1e-9), PDE residual {residual:.1e} (tol 1e-7), \
             H/R ODE residual {ode_worst:.1e} (tol 1e-10), exponential specialisation rel gap H {h_gap:.1e} R {r_gap:.1e} (tol 1e-12)"
        ),
    )
    .note(format!("general R as printed leaves rebate ODE residual {printed_worst:.1e} when c5 != 1"))
    .note(format!(
        "payoff at t = T: u({}) = {:.3} vs {:.3}, not satisfied (informational)",
        checks.payoff.x, checks.payoff.solution, checks.payoff.payoff
    )))
}

fn extra_examples() -> Res {
    let a22 = solutions::example_a22(1.0, 1.0, 0.0)?;
    let a359 = solutions::example_a359(1.0, 1.0, -1.0)?;
    let (r1, r2) = (a22.max_residual(25)?, a359.max_residual(25)?);
    let inst = catalog::instantiate(
        "A_3_5_9",
        &params(&[("B", 3.0)]),
        None,
        None,
        Form::Corrected,
    )?;
    let gap = solutions::catalog_source_gap(&a359, &inst, 100, SEED)?;
    Ok(Outcome::new(
        r1 < 1e-7 && r2 < 1e-7,
        format!(
            "a22 residual {r1:.1e} on {:?}, a359 residual {r2:.1e} on {:?} (tol 1e-7)",
            a22.sample_box, a359.sample_box
        ),
    )
    .note(format!(
        "a359 heat source vs catalog A_3_5_9 at B = 3: {gap:.1e}"
    )))
}

fn solver_cross_validation() -> Res {
    let spec = solutions::exponential_barrier(1.0, 1.0, 0.05, 0.9, 1.0, 1.0, 1.0)?;
    let reference = solutions::barrier_heat_form(&spec);
    let heat = convergence_study(
        &ConvergenceCase::HeatBenchmark,
        &[15, 31, 63, 127],
        Scheme::CrankNicolsonImex,
    )?;
    let fixed = convergence_study(
        &ConvergenceCase::Manufactured {
            fhat: spec.fhat(),
            reference: reference.clone(),
            x: (1.0, 3.0),
            tau: (-0.5, 0.0),
        },
        &[15, 31, 63, 127],
        Scheme::CrankNicolsonImex,
    )?;
    let moving = convergence_study(
        &ConvergenceCase::Barrier {
            spec,
            reference,
            x: (0.5, 3.0),
            tau: (-0.5, 0.0),
        },
        &[31, 63, 127, 255],
        Scheme::CrankNicolsonImex,
    )?;
    let passed = (heat.order - 2.0).abs() <= 0.2 && fixed.order >= 1.8 && moving.order >= 1.0;
    let mut out = Outcome::new(
        passed,
        format!(
            "orders: heat {:.3} (2.0 +- 0.2), fixed-strip barrier {:.3} (>= 1.8), moving barrier {:.3} (>= 1.0)",
            heat.order, fixed.order, moving.order
        ),
    );
    for (name, r) in [("heat", &heat), ("fixed", &fixed), ("moving", &moving)] {
        let errs: Vec<String> = r
            .levels
            .iter()
            .map(|l| format!("{}:{:.2e}", l.nx, l.linf))
            .collect();
        out = out.note(format!(
            "{name}: {} monotone {}",
            errs.join(" "),
            r.monotone
        ));
    }
    Ok(out)
}

/// `X(f)` for a first-order operator with components over `(x, t, u)`, by central differences.
fn apply_numeric(g: &[CompiledExpr; 3], f: &CompiledExpr, at: &[f64; 3]) -> Option<f64> {
    let mut total = 0.0;
    for (slot, coeff) in g.iter().enumerate() {
        total += coeff.eval(at).ok()? * central(f, at, slot)?;
    }
    Some(total)
}

fn compile_generator(g: &Generator) -> Result<[CompiledExpr; 3], Box<dyn Error>> {
    let slots = [lie::X, lie::T, lie::U];
    let [a, b, c] = g.components();
    Ok([a.compile(&slots)?, b.compile(&slots)?, c.compile(&slots)?])
}

fn lie_closure() -> Res {
    let cases = [
        ("A_4_4", params(&[("A", 1.0), ("B", 2.0)])),
        ("A_2_2_2", params(&[("A", 2.0)])),
        ("A_3_5_9", params(&[("B", 3.0)])),
    ];
    let tol = 1e-6;
    let pts = SampleBox::default().points(30, SEED);
    let (mut sym_worst, mut fd_worst, mut pairs): (f64, f64, usize) = (0.0, 0.0, 0);
    let mut passed = true;
    for (id, p) in &cases {
        let inst = catalog::instantiate_default(id, p, None, Form::Corrected)?;
        for c in catalog::closure_check(&inst, 100, SEED, tol)? {
            pairs += 1;
            passed &= c.report.passed;
            sym_worst = sym_worst.max(c.report.max_abs);
            let (gi, gj) = (&inst.generators[c.pair.0], &inst.generators[c.pair.1]);
            let bracket = compile_generator(&gi.bracket(gj))?;
            let (ci, cj) = (compile_generator(gi)?, compile_generator(gj)?);
            for p in &pts {
                let at = [p.x, p.t, p.u];
                for k in 0..3 {
                    let num = apply_numeric(&ci, &cj[k], &at).zip(apply_numeric(&cj, &ci[k], &at));
                    let (Some((xy, yx)), Ok(sym)) = (num, bracket[k].eval(&at)) else {
                        continue;
                    };
                    fd_worst = fd_worst.max(rel(sym, xy - yx));
                }
            }
        }
    }
    passed &= fd_worst < tol;
    Ok(Outcome::new(
        passed,
        format!(
            "{pairs} commutators on A_4_4, A_2_2_2, A_3_5_9: symmetry residual {sym_worst:.1e}, \
             finite-difference commutator gap {fd_worst:.1e} (tol {tol:.0e})"
        ),
    ))
}

fn determinism() -> Res {
    let bin = env!("CARGO_BIN_EXE_heathsym");
    let dir = tempfile::tempdir()?;
    let runs: Vec<Vec<String>> = [
        vec!["catalog", "verify", "A_4_4", "--params", r#"{"A":1,"B":2}"#],
        vec!["catalog", "verify", "A_3_5_7"],
        vec!["catalog", "match", "phi^2"],
        vec!["transform", r#"{"a":1,"b":2,"f":"x^2 + 3*exp((x+u)/4)"}"#],
        vec!["check", "terminal", "--seed", "7"],
        vec!["check", "barrier"],
        vec!["check", "a359"],
        vec!["converge", "heat"],
        vec!["solve", "barrier", "--stride", "8", "--out", "OUT"],
    ]
    .iter()
    .map(|r| r.iter().map(|s| s.to_string()).collect())
    .collect();
    let mut bytes = 0usize;
    for args in &runs {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out_path = dir.path().join(format!("run{k}.csv"));
            let args: Vec<String> = args
                .iter()
                .map(|a| {
                    if a == "OUT" {
                        out_path.display().to_string()
                    } else {
                        a.clone()
                    }
                })
                .collect();
            let o = Command::new(bin)
                .args(&args)
                .env_remove("HEATHSYM_SEED")
                .output()?;
            if !o.status.success() {
                return Ok(Outcome::new(
                    false,
                    format!("`{}` exited with {}", args.join(" "), o.status),
                ));
            }
            let file = std::fs::read(&out_path).unwrap_or_default();
            outputs.push((o.stdout, file));
        }
        if outputs[0] != outputs[1] {
            return Ok(Outcome::new(
                false,
                format!("`{}` differs between runs", args.join(" ")),
            ));
        }
        bytes += outputs[0].0.len() + outputs[0].1.len();
    }
    // the environment seed and the flag agree
    let flag = Command::new(bin)
        .args(["check", "terminal", "--seed", "7"])
        .output()?;
    let env = Command::new(bin)
        .args(["check", "terminal"])
        .env("HEATHSYM_SEED", "7")
        .output()?;
    let env_ok = flag.stdout == env.stdout;
    Ok(Outcome::new(
        env_ok,
        format!("{} commands run twice, {bytes} bytes identical; HEATHSYM_SEED matches --seed: {env_ok}", runs.len()),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Res); 9] = [
        ("catalog soundness", catalog_soundness),
        ("transformation correctness", transformation),
        ("derivative engine", derivative_engine),
        ("terminal solution", terminal_problem),
        ("barrier solution", barrier_problem),
        ("extra invariant solutions", extra_examples),
        ("solver cross-validation", solver_cross_validation),
        ("Lie algebra closure", lie_closure),
        ("CLI determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {}", i + 1, outcome.summary);
        for n in &outcome.notes {
            println!("       {n}");
        }
        if !outcome.passed {
            failures += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
