//! Finite-difference check of the entropy gradient `R` and of the source
//! Jacobian.
use kernel_field::field::path_entropy;
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let basis = EigenBasis::of_laplacian(&Graph::path(8)?.laplacian())?;
    let k = heat_kernel_weights(&basis, 1.0)?;
    let step = 1e-6;

    let r = geometric_r(&k);
    let mut worst: f64 = 0.0;
    for l in 0..k.len() {
        let mut up = k.h().to_vec();
        let mut down = k.h().to_vec();
        up[l] += step;
        down[l] -= step;
        let fd = (path_entropy(&k.with_weights(up)?) - path_entropy(&k.with_weights(down)?))
            / (2.0 * step);
        worst = worst.max((fd - r[l]).abs());
    }
    println!("max |R - dS/dh| = {worst:.3e}");

    let graph = Graph::path(8)?;
    let source = SourceSpec::mutual_information(1.0, 2.0, WeightRule::EigenvalueAware)?
        .with_coupling(0.05, coupling_matrix(&graph, &basis)?)?;
    let j = source_jacobian(&source, &basis, k.h())?;
    let mut worst: f64 = 0.0;
    for m in 0..k.len() {
        let mut up = k.h().to_vec();
        let mut down = k.h().to_vec();
        up[m] += step;
        down[m] -= step;
        let tu = source_t(&source, &basis, &up)?;
        let td = source_t(&source, &basis, &down)?;
        for l in 0..k.len() {
            worst = worst.max(((tu[l] - td[l]) / (2.0 * step) - j[(l, m)]).abs());
        }
    }
    println!("max |J - dT/dh| = {worst:.3e}");
    Ok(())
}
