//! Heat kernels `e^{-tau L}` as spectral weights, and the Hilbert-Schmidt
//! distance computed both in spectral coordinates and from dense matrices.
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let basis = EigenBasis::of_laplacian(&Graph::path(8)?.laplacian())?;
    let short = heat_kernel_weights(&basis, 0.5)?;
    let long = heat_kernel_weights(&basis, 2.0)?;
    println!("h(tau=0.5) = {:.4?}", short.h());
    println!("h(tau=2.0) = {:.4?}", long.h());

    let spectral = hs_distance(&basis, &short, &long)?;
    let dense = materialize_kernel(&basis, &short)?
        .sub(&materialize_kernel(&basis, &long)?)
        .frobenius_norm();
    println!("HS distance: spectral {spectral:.12}, dense {dense:.12}");
    println!("difference {:.2e}", (spectral - dense).abs());
    Ok(())
}
