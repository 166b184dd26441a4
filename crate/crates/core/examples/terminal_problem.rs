//! The terminal problem `u(x, T) = 1`: closed form, similarity reduction and the
//! invariant generator.

use heathsym::lie;
use heathsym::solutions::{self, Transcription};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (a, b, terminal) = (1.0, 1.0, 1.0);
    let sol = solutions::terminal_solution(a, b, terminal)?;
    println!("u(x, t) = {}", sol.u);
    println!("singular at t = {:?}", sol.singular_time);
    println!(
        "PDE residual {:.1e}, terminal error {:.1e}",
        sol.max_residual(20)?,
        sol.terminal_error(41)?.unwrap_or(f64::NAN)
    );

    let c = solutions::terminal_constant(a, b, terminal);
    println!(
        "integration constant {c} (printed value {})",
        solutions::terminal_constant_printed(a, b, terminal)
    );
    println!(
        "F(tau) = {}",
        solutions::terminal_reduction_f(a, b, terminal, c)?
    );

    let checks = solutions::terminal_checks(a, b, terminal, 100, lie::DEFAULT_SEED)?;
    println!("{checks:#?}");
    let ode =
        solutions::terminal_reduced_ode(Transcription::Corrected, a, b, terminal, 3.0, 0.5, 0.0)?;
    println!("reduced ODE: {ode} = 0");
    Ok(())
}
