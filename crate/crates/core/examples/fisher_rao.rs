//! Information-geometric diagnostics of a kernel: spectral entropy, the
//! Fisher-Rao diagonal and its von Neumann entropy, and the vacuum alarm.
use kernel_field::diagnostics::DEFAULT_ALARM_MARGIN;
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let basis = EigenBasis::of_laplacian(&Graph::path(8)?.laplacian())?;
    for tau in [0.1, 1.0, 5.0] {
        let k = heat_kernel_weights(&basis, tau)?;
        let rec = DiagnosticsRecord::compute(&k, DEFAULT_ALARM_MARGIN)?;
        println!("tau = {tau}");
        println!(
            "  H = {:.4} (threshold {:.4}, alarm {})",
            rec.spectral_entropy, rec.threshold, rec.alarm
        );
        println!("  Fisher diagonal {:.3?}", rec.fisher_diag);
        println!("  von Neumann entropy {:.4}", rec.von_neumann_entropy);
    }
    Ok(())
}
