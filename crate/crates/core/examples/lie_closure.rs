//! Commutators of catalog generators are again symmetries.

use heathsym::catalog::{self, Form};
use heathsym::lie;
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = BTreeMap::from([("A".to_string(), 1.0), ("B".to_string(), 2.0)]);
    let inst = catalog::instantiate_default("A_4_4", &params, None, Form::Corrected)?;
    for c in catalog::closure_check(&inst, 50, lie::DEFAULT_SEED, 1e-6)? {
        let [xi, xt, eta] = &c.bracket;
        println!(
            "[X{}, X{}] = ({xi}, {xt}, {eta})  residual {:.1e}",
            c.pair.0 + 1,
            c.pair.1 + 1,
            c.report.max_abs
        );
    }
    Ok(())
}
