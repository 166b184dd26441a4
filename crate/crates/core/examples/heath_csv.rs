//! Solves the moving-barrier problem and writes the field in Heath variables.

use heathsym::model::HeatSourceModel;
use heathsym::solutions;
use heathsym::solver::{self, GridSpec, SchemeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = solutions::exponential_barrier(1.0, 1.0, 0.05, 0.9, 1.0, 1.0, 1.0)?;
    let reference = solutions::barrier_heat_form(&spec);
    let grid = GridSpec::new((0.5, 3.0), 64, (-0.5, 0.0), 65)?;
    let config = SchemeConfig {
        stride: 16,
        ..SchemeConfig::default()
    };
    let model = HeatSourceModel { fhat: spec.fhat() };
    let sol = solver::solve_barrier(&model, &spec, &grid, &config, &reference)?;
    let worst = solver::error_norms(&sol, &reference)?
        .iter()
        .map(|n| n.linf)
        .fold(0.0, f64::max);
    eprintln!(
        "{} snapshots, max interior error {worst:.2e}",
        sol.snapshots.len()
    );
    print!("{}", sol.heath_csv(spec.a, spec.b));
    Ok(())
}
