//! Laplacian spectrum of a path graph and how it shifts when one edge is
//! weakened.
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let g = Graph::path(8)?;
    let basis = EigenBasis::of_laplacian(&g.laplacian())?;
    println!("P_8 eigenvalues:");
    for (k, lam) in basis.eigenvalues().iter().enumerate() {
        let closed = 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / 8.0).cos();
        println!("  {k}: {lam:.6}  (2 - 2cos(k pi / n) = {closed:.6})");
    }
    println!("orthonormality error {:.2e}", basis.orthonormality_error());

    for eps in [1.0, 0.5, 0.1, 0.01] {
        let weak = g.weaken_edge(2, 3, eps)?;
        let b = EigenBasis::of_laplacian(&weak.laplacian())?;
        println!(
            "edge (2,3) at {eps:>5}: Fiedler value {:.5}",
            b.fiedler_value()
        );
    }
    Ok(())
}
