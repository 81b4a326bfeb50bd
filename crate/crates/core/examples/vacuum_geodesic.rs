//! With no source the solution is `h0 / e`; geodesics between kernels are
//! straight lines in log-weights.
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let basis = EigenBasis::of_laplacian(&Graph::path(8)?.laplacian())?;
    let h0 = heat_kernel_weights(&basis, 1.0)?;
    let vac = vacuum_solution(h0.h())?;
    for (a, b) in h0.h().iter().zip(vac.h()) {
        println!("h0 {a:.5} -> h* {b:.5}  ratio {:.6}", b / a);
    }

    let a = vec![0.0; basis.len()];
    let b: Vec<f64> = basis.eigenvalues().iter().map(|l| -l).collect();
    for t in [0.0, 0.5, 1.0, 2.0] {
        let h = geodesic(&a, &b, t)?;
        println!("t = {t}: {:.4?}", h);
    }
    Ok(())
}
