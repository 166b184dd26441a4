//! Finds the classification entries whose generators leave a source invariant.

use heathsym::catalog::{self, MatchOptions};
use heathsym::expr::Expr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "exp(phi)".to_string());
    let fhat = Expr::parse(&source)?;
    for m in catalog::match_fhat(&fhat, &MatchOptions::default())? {
        println!(
            "{:12} {:?}  residual {:.1e}",
            catalog::variant_label(m.id, m.sign),
            m.params,
            m.residual
        );
    }
    Ok(())
}
