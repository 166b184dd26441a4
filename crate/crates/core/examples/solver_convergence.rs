//! Observed convergence orders of the finite-difference solver.

use heathsym::solutions;
use heathsym::solver::{convergence_study, ConvergenceCase, Scheme};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = solutions::exponential_barrier(1.0, 1.0, 0.05, 0.9, 1.0, 1.0, 1.0)?;
    let reference = solutions::barrier_heat_form(&spec);
    let cases = [
        (
            "heat, CN",
            ConvergenceCase::HeatBenchmark,
            Scheme::CrankNicolsonImex,
            vec![15, 31, 63, 127],
        ),
        (
            "heat, explicit",
            ConvergenceCase::HeatBenchmark,
            Scheme::ExplicitEuler,
            vec![15, 31, 63],
        ),
        (
            "barrier source, fixed strip",
            ConvergenceCase::Manufactured {
                fhat: spec.fhat(),
                reference: reference.clone(),
                x: (1.0, 3.0),
                tau: (-0.5, 0.0),
            },
            Scheme::CrankNicolsonImex,
            vec![15, 31, 63, 127],
        ),
        (
            "moving barrier",
            ConvergenceCase::Barrier {
                spec,
                reference,
                x: (0.5, 3.0),
                tau: (-0.5, 0.0),
            },
            Scheme::CrankNicolsonImex,
            vec![31, 63, 127, 255],
        ),
    ];
    for (name, case, scheme, levels) in &cases {
        let r = convergence_study(case, levels, *scheme)?;
        let errors: Vec<String> = r.levels.iter().map(|l| format!("{:.2e}", l.linf)).collect();
        println!(
            "{name:28} order {:.3}  monotone {}  errors {}",
            r.order,
            r.monotone,
            errors.join(" ")
        );
    }
    Ok(())
}
