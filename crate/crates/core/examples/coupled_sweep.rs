//! The same constriction sweep with adjacency-derived mode coupling, which
//! makes the coupling entropy informative.
use kernel_field::experiments::sweep::{
    plot_data_normalized_csv, run_sweep, Constriction, DEFAULT_COUPLING_ETA, TABLE_EPS,
};
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let source = SourceSpec::mutual_information(1.0, 2.0, WeightRule::EigenvalueAware)?;
    let rows = run_sweep(
        &Constriction::path8(),
        &TABLE_EPS,
        &source,
        Some(DEFAULT_COUPLING_ETA),
        SolverOptions::default(),
    )?;
    for r in &rows {
        println!(
            "eps {:.3}: S_coup {:.4}, H {:.4}, Delta' {:.4}, {} iterations",
            r.eps, r.coupling_entropy, r.entropy, r.delta_fiedler, r.iterations
        );
    }
    print!("\nnormalized:\n{}", plot_data_normalized_csv(&rows));
    Ok(())
}
