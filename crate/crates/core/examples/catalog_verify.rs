//! Instantiates a few classification entries and checks every generator.

use heathsym::catalog::{self, Form, Sign};
use heathsym::lie;
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{} entries", catalog::entries().len());
    let cases: [(&str, &[(&str, f64)], Option<Sign>); 3] = [
        ("A_4_4", &[("A", 1.0), ("B", 2.0)], None),
        ("A_2_2_2", &[("A", 2.0)], None),
        ("A_4_3", &[], Some(Sign::Plus)),
    ];
    for (id, params, sign) in cases {
        let params: BTreeMap<String, f64> =
            params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let inst = catalog::instantiate_default(id, &params, sign, Form::Corrected)?;
        let report =
            catalog::verify_instance(&inst, 100, lie::DEFAULT_SEED, lie::DEFAULT_TOLERANCE)?;
        println!("{}  fhat = {}", report.label, report.fhat);
        for g in &report.generators {
            println!("  X{}  residual {:.1e}", g.index + 1, g.report.max_abs);
        }
    }

    // the literal row of a patched entry fails, and the report names the offending term
    let e = catalog::entry("A_3_5_10")?;
    let params = e.draw_params(Form::Literal, &mut lie::point_rng(lie::DEFAULT_SEED, 0));
    let literal = catalog::verify_entry(
        e.id,
        &params,
        Some(Sign::Minus),
        Form::Literal,
        100,
        lie::DEFAULT_SEED,
        lie::DEFAULT_TOLERANCE,
    )?;
    for g in literal.generators.iter().filter(|g| !g.report.passed) {
        println!(
            "literal A_3_5_10 X{} fails, worst term {:?}",
            g.index + 1,
            g.report.worst_term
        );
    }
    Ok(())
}
