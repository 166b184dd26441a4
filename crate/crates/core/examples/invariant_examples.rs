//! The two further invariant solutions, their residuals and CSV samples.

use heathsym::catalog::{self, Form};
use heathsym::solutions;
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for sol in solutions::documented_solutions()? {
        println!(
            "{:9} residual {:.1e} on {:?}",
            sol.name,
            sol.max_residual(20)?,
            sol.sample_box
        );
    }
    let quad = solutions::example_a359(1.0, 1.0, -1.0)?;
    let inst = catalog::instantiate(
        "A_3_5_9",
        &BTreeMap::from([("B".to_string(), 3.0)]),
        None,
        None,
        Form::Corrected,
    )?;
    println!(
        "source gap to A_3_5_9: {:.1e}",
        solutions::catalog_source_gap(&quad, &inst, 50, 1)?
    );
    match solutions::example_a359(1.0, 1.0, 0.2) {
        Err(e) => println!("c1 = 0.2: {e}"),
        Ok(_) => println!("c1 = 0.2 unexpectedly accepted"),
    }
    print!(
        "{}",
        solutions::example_a22(1.0, 1.0, 0.0)?.sample_csv(3, 2)?
    );
    println!("{}", serde_json::to_string_pretty(&quad.descriptor())?);
    Ok(())
}
