//! Weaken the middle edge of `P_8` toward disconnection and watch the
//! Fiedler value, entropy and Fiedler-mode gap at the self-consistent kernel.
use kernel_field::experiments::sweep::{run_sweep, sweep_table_csv, Constriction, TABLE_EPS};
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let source = SourceSpec::mutual_information(1.0, 2.0, WeightRule::EigenvalueAware)?;
    let rows = run_sweep(
        &Constriction::path8(),
        &TABLE_EPS,
        &source,
        None,
        SolverOptions::default(),
    )?;
    println!("{:>6} {:>8} {:>8} {:>8}", "eps", "lambda1", "H", "Delta'");
    for r in &rows {
        println!(
            "{:>6.3} {:>8.4} {:>8.4} {:>8.4}",
            r.eps, r.lambda1, r.entropy, r.delta_fiedler
        );
    }
    print!("\n{}", sweep_table_csv(&rows));
    Ok(())
}
