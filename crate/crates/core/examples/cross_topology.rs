//! Compare the early-warning signals on a river channel and a trunk with
//! root and branch fans.
use kernel_field::experiments::sweep::{run_sweep, Constriction, DEFAULT_COUPLING_ETA, TABLE_EPS};
use kernel_field::prelude::*;

fn main() -> Result<()> {
    let source = SourceSpec::mutual_information(1.0, 2.0, WeightRule::EigenvalueAware)?;
    for c in [Constriction::river_channel(), Constriction::trunk_roots()] {
        println!(
            "{} (n = {}, edge {:?})",
            c.name,
            c.base.node_count(),
            c.edge
        );
        let plain = run_sweep(&c, &TABLE_EPS, &source, None, SolverOptions::default())?;
        let coupled = run_sweep(
            &c,
            &TABLE_EPS,
            &source,
            Some(DEFAULT_COUPLING_ETA),
            SolverOptions::default(),
        )?;
        for (p, q) in plain.iter().zip(&coupled) {
            println!(
                "  eps {:.3}: lambda1 {:.4}  H {:.4}  Delta' {:.4}  S_coup {:.4}",
                p.eps, p.lambda1, p.entropy, p.delta_fiedler, q.coupling_entropy
            );
        }
    }
    Ok(())
}
