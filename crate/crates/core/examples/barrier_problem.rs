//! The down-and-out barrier problem with an exponential barrier.

use heathsym::lie;
use heathsym::solutions::{self, BarrierCoefficients, Transcription};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = solutions::exponential_barrier(1.0, 1.0, 0.05, 0.9, 100.0, 1.0, 1.0)?;
    let sol = solutions::barrier_solution(&spec)?;
    println!("H(t) = {}", spec.h_of_t());
    println!("R(t) = {}", spec.r_of_t());
    println!("u(x, t) = {}", sol.u);
    println!("PDE residual {:.1e}", sol.max_residual(20)?);
    println!(
        "barrier error {:.1e}",
        sol.barrier_error(50)?.unwrap_or(f64::NAN)
    );
    let payoff = solutions::payoff_check(&sol, 101.0)?;
    println!(
        "u(101, T) = {:.4} vs payoff {}: satisfied {}",
        payoff.solution, payoff.payoff, payoff.satisfied
    );

    // general barrier and rebate families at unit coefficients
    let c = BarrierCoefficients {
        c1: 1.0,
        c2: 1.0,
        c3: 1.0,
        c4: 1.0,
        c5: 2.0,
        c6: 1.0,
    };
    println!(
        "H general = {}",
        solutions::barrier_h_general(1.0, -3.0, &c)?
    );
    println!(
        "R general = {}",
        solutions::barrier_r_general(Transcription::Corrected, 1.0, 1.0, 1.0, -3.0, &c)?
    );

    let checks = solutions::barrier_checks(&spec, 100, lie::DEFAULT_SEED)?;
    println!("{checks:#?}");
    Ok(())
}
