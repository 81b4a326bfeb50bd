//! Solve the self-consistent kernel on `P_8` and inspect convergence.
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let basis = EigenBasis::of_laplacian(&Graph::path(8)?.laplacian())?;
    let source = SourceSpec::mutual_information(1.0, 2.0, WeightRule::Uniform)?;
    let h0 = [1.0; 8];
    let report = solve_fixed_point(&source, &basis, &h0, SolverOptions::default())?;

    println!(
        "converged {} after {} iterations",
        report.converged, report.iterations
    );
    println!("h* = {:.7}", report.h_star.h()[0]);
    println!("residual {:.3e}", report.residual_inf);
    println!(
        "empirical contraction ratio {:.5}",
        report.contraction_ratio
    );
    let cert = contraction_certificate(&source, &basis, &report.h_star)?;
    println!("certificate max_l F_l sum_m |J_lm| = {cert:.5}");
    for (i, s) in report.step_norms.iter().enumerate().take(6) {
        println!("  step {i}: {s:.3e}");
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
