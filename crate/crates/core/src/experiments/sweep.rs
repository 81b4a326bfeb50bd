//! Constriction sweeps: weaken one edge over a grid of weights and track the
//! Fiedler value together with the diagnostics at the self-consistent kernel.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::spectral_entropy;
use crate::error::{Error, Result};
use crate::field::{coupling_matrix, solve_fixed_point, SolverOptions, SourceSpec};
use crate::graph::Graph;
use crate::io::{csv_string, num};
use crate::spectral::EigenBasis;
use crate::stability::stability_report;

/// Edge weights of the reference phase-transition table.
pub const TABLE_EPS: [f64; 5] = [1.000, 0.644, 0.287, 0.109, 0.020];

/// Reference rows `(ε, λ₁, H[h*], Δ′)` on `P_8` with the eigenvalue-aware
/// source, `σ² = 1`, `μ₂ = 2`.
pub const TABLE_ROWS: [(f64, f64, f64, f64); 5] = [
    (1.000, 0.1522, 1.596, 2.962),
    (0.644, 0.1355, 1.627, 2.933),
    (0.287, 0.0949, 1.658, 2.865),
    (0.109, 0.0481, 1.668, 2.790),
    (0.020, 0.0103, 1.670, 2.733),
];

pub const DEFAULT_COUPLING_ETA: f64 = 0.05;

/// A base graph and the edge whose weight is swept.
#[derive(Debug, Clone, PartialEq)]
pub struct Constriction {
    pub name: String,
    pub base: Graph,
    pub edge: (usize, usize),
}

impl Constriction {
    pub fn new(name: impl Into<String>, base: Graph, edge: (usize, usize)) -> Result<Self> {
        if base.edge_weight(edge.0, edge.1).is_none() {
            return Err(Error::EdgeNotFound {
                u: edge.0,
                v: edge.1,
            });
        }
        Ok(Self {
            name: name.into(),
            base,
            edge,
        })
    }

    /// `P_8` with edge `(2, 3)` swept.
    pub fn path8() -> Self {
        Self::new("path", Graph::path(8).expect("P_8"), (2, 3)).expect("edge exists")
    }

    /// Stem of 6 with two 2-node tributaries at stem nodes 1 and 3; the stem
    /// edge `(2, 3)` is swept.
    pub fn river_channel() -> Self {
        let g = Graph::river_channel(6, &[(1, 2), (3, 2)]).expect("default river");
        Self::new("river", g, (2, 3)).expect("edge exists")
    }

    /// Trunk of 4 with 3 roots and 3 branches; trunk edge `(1, 2)` is swept.
    pub fn trunk_roots() -> Self {
        let g = Graph::trunk_roots(4, 3, 3).expect("default trunk");
        Self::new("trunk", g, (1, 2)).expect("edge exists")
    }

    pub fn at(&self, eps: f64) -> Result<Graph> {
        self.base.weaken_edge(self.edge.0, self.edge.1, eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub lambda1: f64,
    pub h_star: Vec<f64>,
    pub entropy: f64,
    pub delta_fiedler: f64,
    pub coupling_entropy: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual_inf: f64,
}

fn sweep_row(
    constriction: &Constriction,
    eps: f64,
    source: &SourceSpec,
    coupling_eta: Option<f64>,
    opts: SolverOptions,
) -> Result<SweepRecord> {
    let graph = constriction.at(eps)?;
    let basis = EigenBasis::of_laplacian(&graph.laplacian())?;
    let spec = match coupling_eta {
        Some(eta) => source
            .clone()
            .with_coupling(eta, coupling_matrix(&graph, &basis)?)?,
        None => source.clone(),
    };
    let h0 = vec![1.0; basis.len()];
    let fp = solve_fixed_point(&spec, &basis, &h0, opts)?;
    let report = stability_report(&spec, &basis, &fp.h_star)?;
    Ok(SweepRecord {
        eps,
        lambda1: basis.fiedler_value(),
        entropy: spectral_entropy(fp.h_star.h())?,
        delta_fiedler: report.fiedler_gap,
        coupling_entropy: report.coupling_entropy,
        converged: fp.converged,
        iterations: fp.iterations,
        residual_inf: fp.residual_inf,
        h_star: fp.h_star.h().to_vec(),
    })
}

/// Runs one row per `ε`. Rows are evaluated in parallel and returned in input
/// order. With `coupling_eta`, the coupling matrix is rebuilt from each
/// perturbed graph. Non-convergence is recorded per row, not raised.
pub fn run_sweep(
    constriction: &Constriction,
    eps_values: &[f64],
    source: &SourceSpec,
    coupling_eta: Option<f64>,
    opts: SolverOptions,
) -> Result<Vec<SweepRecord>> {
    if let Some(&bad) = eps_values.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Domain(format!(
            "sweep weights must be positive, got {bad}"
        )));
    }
    eps_values
        .par_iter()
        .map(|&eps| sweep_row(constriction, eps, source, coupling_eta, opts))
        .collect()
}

const PLOT_HEADER: [&str; 5] = [
    "eps",
    "lambda1",
    "entropy",
    "delta_fiedler",
    "coupling_entropy",
];

fn plot_columns(records: &[SweepRecord]) -> [Vec<f64>; 5] {
    [
        records.iter().map(|r| r.eps).collect(),
        records.iter().map(|r| r.lambda1).collect(),
        records.iter().map(|r| r.entropy).collect(),
        records.iter().map(|r| r.delta_fiedler).collect(),
        records.iter().map(|r| r.coupling_entropy).collect(),
    ]
}

fn columns_to_csv(cols: &[Vec<f64>; 5]) -> String {
    let rows: Vec<Vec<String>> = (0..cols[0].len())
        .map(|i| cols.iter().map(|c| num(c[i])).collect())
        .collect();
    csv_string(&PLOT_HEADER, &rows)
}

/// Min–max scaling to `[0, 1]`; a constant column maps to zeros.
pub fn normalize_unit(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .iter()
        .map(|v| if span > 0.0 { (v - lo) / span } else { 0.0 })
        .collect()
}

/// `eps,lambda1,entropy,delta_fiedler,coupling_entropy`
pub fn plot_data_csv(records: &[SweepRecord]) -> String {
    columns_to_csv(&plot_columns(records))
}

/// Same columns with every quantity except `eps` scaled to `[0, 1]`.
pub fn plot_data_normalized_csv(records: &[SweepRecord]) -> String {
    let mut cols = plot_columns(records);
    for col in cols.iter_mut().skip(1) {
        *col = normalize_unit(col);
    }
    columns_to_csv(&cols)
}

pub const SWEEP_TABLE_HEADER: [&str; 8] = [
    "eps",
    "lambda1",
    "entropy",
    "delta_fiedler",
    "coupling_entropy",
    "converged",
    "iterations",
    "residual_inf",
];

pub fn sweep_table_rows(records: &[SweepRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            vec![
                num(r.eps),
                num(r.lambda1),
                num(r.entropy),
                num(r.delta_fiedler),
                num(r.coupling_entropy),
                r.converged.to_string(),
                r.iterations.to_string(),
                num(r.residual_inf),
            ]
        })
        .collect()
}

pub fn sweep_table_csv(records: &[SweepRecord]) -> String {
    csv_string(&SWEEP_TABLE_HEADER, &sweep_table_rows(records))
}
