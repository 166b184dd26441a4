//! Maps Heath models to the heat class and back, and tests linearizability.

use heathsym::model::{self, HeathModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (a, b, f) in [
        (0.0, 1.0, "u"),
        (1.0, 2.0, "x^2 + 3*exp((x + u)/4)"),
        (0.5, 1.0, "exp(u)"),
    ] {
        let m = HeathModel::parse(a, b, f)?;
        let t = model::heath_to_heat(&m);
        let back = model::heat_to_heath(&t.heat, a, b)?;
        let lin = model::is_linearizable(&m);
        println!("f = {f}  (a = {a}, b = {b})");
        println!("  fhat = {}", t.heat.fhat);
        println!("  back = {}", back.f);
        match (lin.g, lin.potential) {
            (Some(g), Some(p)) => {
                println!("  linear: phi_tau = phi_xx + ({p}) phi/b^4 + ({g})/b^4")
            }
            _ => println!("  nonlinear"),
        }
    }
    let map = model::CoordinateMap::new(1.0, 2.0);
    let [x, tau, phi] = map.to_heat(0.3, 0.7, -0.2)?;
    println!(
        "(0.3, 0.7, -0.2) -> ({x}, {tau}, {phi}) -> {:?}",
        map.to_heath(x, tau, phi)?
    );
    Ok(())
}
