//! Tests candidate generators of Burgers' equation `u_t = u_xx + u u_x`
//! against the on-manifold symmetry condition.

use heathsym::expr::Expr;
use heathsym::lie::{self, EvolutionPde, Generator, SampleBox};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pde = EvolutionPde::new(Expr::parse("u_xx + u*u_x")?)?;
    let candidates = [
        ("dilation", Generator::parse("x", "2*t", "-u")?),
        ("Galilean boost", Generator::parse("t", "0", "-1")?),
        ("not a symmetry", Generator::parse("x", "t", "u")?),
    ];
    for (name, g) in &candidates {
        let r = lie::check_symmetry(
            &pde,
            g,
            100,
            lie::DEFAULT_SEED,
            &SampleBox::default(),
            lie::DEFAULT_TOLERANCE,
        )?;
        println!(
            "{name:16} max residual {:.2e}  passed {}",
            r.max_abs, r.passed
        );
    }
    Ok(())
}
