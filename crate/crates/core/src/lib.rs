//! # kernel-field
//!
//! Self-consistent spectral kernels on finite weighted graphs.
//!
//! A kernel `K = Φ diag(h) Φᵀ` is parameterized by positive weights `h` on
//! the Laplacian eigenbasis. The field equation balances the entropy
//! gradient `R_l = −ln(h_l / h0_l) − 1` against a source `T_l[h]`, and its
//! solutions are fixed points of `h ↦ h0 · exp(−1 − T[h])`. Around a fixed
//! point the crate provides the stability Hessian, per-mode margins and
//! gaps, and scalar early-warning diagnostics that track how the solution
//! responds as a graph edge is weakened toward disconnection.
//!
//! ## Modules
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`graph`] | path, river-channel and trunk+roots builders, edge weakening, `L = D − A` |
//! | [`spectral`] | Jacobi eigensolver, kernels, Hilbert–Schmidt distance, heat kernels |
//! | [`field`] | source functional and Jacobian, `R`, fixed-point solver, vacuum, geodesics |
//! | [`stability`] | Hessian, margins, Hessian gap, Fiedler-mode gap, coupling entropy |
//! | [`diagnostics`] | spectral entropy, Fisher–Rao metric, von Neumann entropy, alarm |
//! | [`experiments`] | reproduction runners and the constriction sweep driver |
//! | [`cli`] | commands behind the `kernel-field` binary |
//!
//! ## Quick start
//!
//! ```
//! use kernel_field::prelude::*;
//!
//! let graph = Graph::path(8)?;
//! let basis = EigenBasis::of_laplacian(&graph.laplacian())?;
//! let source = SourceSpec::mutual_information(1.0, 2.0, WeightRule::Uniform)?;
//! let report = solve_fixed_point(&source, &basis, &[1.0; 8], SolverOptions::default())?;
//! assert!(report.converged);
//! assert!((report.h_star.h()[0] - 0.1547).abs() < 1e-4);
//! # Ok::<(), kernel_field::Error>(())
//! ```
//!
//! Runnable programs for each capability live in `examples/`:
//!
//! ```bash
//! cargo run -p kernel-field --example fixed_point
//! ```

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diagnostics::{
        fisher_rao_diag, spectral_entropy, vacuum_threshold, von_neumann_entropy, DiagnosticsRecord,
    };
    pub use crate::error::{Error, Result};
    pub use crate::field::{
        contraction_certificate, coupling_matrix, geodesic, geometric_r, residual_inf,
        solve_fixed_point, source_jacobian, source_t, vacuum_solution, FixedPointReport,
        SolverOptions, SourceSpec, WeightRule,
    };
    pub use crate::graph::Graph;
    pub use crate::matrix::Matrix;
    pub use crate::spectral::{
        heat_kernel_weights, hs_distance, materialize_kernel, EigenBasis, SpectralKernel,
    };
    pub use crate::stability::{
        coupling_entropy, hessian, hessian_gap, per_mode_margin, stability_report, StabilityReport,
    };
}
