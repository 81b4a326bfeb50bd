//! Hessian, per-mode margins and gaps at a fixed point, with and without
//! inter-mode coupling.
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let graph = Graph::path(8)?.weaken_edge(2, 3, 0.2)?;
    let basis = EigenBasis::of_laplacian(&graph.laplacian())?;
    let plain = SourceSpec::mutual_information(1.0, 2.0, WeightRule::EigenvalueAware)?;
    let coupled = plain
        .clone()
        .with_coupling(0.05, coupling_matrix(&graph, &basis)?)?;

    for (name, source) in [("separable", plain), ("coupled", coupled)] {
        let fp = solve_fixed_point(&source, &basis, &[1.0; 8], SolverOptions::default())?;
        let report = stability_report(&source, &basis, &fp.h_star)?;
        println!("{name}:");
        println!("  stable {}", report.stable);
        println!(
            "  Hessian gap {:.4}, Fiedler-mode gap {:.4}",
            report.hessian_gap, report.fiedler_gap
        );
        println!("  coupling entropy {:.4}", report.coupling_entropy);
        println!("  margins {:.3?}", report.margins);
    }
    Ok(())
}
