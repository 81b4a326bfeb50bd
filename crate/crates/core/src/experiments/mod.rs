//! Deterministic reproduction runners.
//!
//! Each runner computes its quantities, evaluates a fixed list of checks
//! with pinned tolerances and returns an [`ExperimentResult`]. Runners do not
//! touch the filesystem; [`ExperimentResult::write`] emits
//! `<id>_results.json` and `<id>_table.csv` (plus sweep plot data where
//! relevant).
//!
//! | id | what is checked |
//! |----|-----------------|
//! | `exp1` | analytic `R` against central finite differences of the path entropy |
//! | `exp2` | fixed-point convergence, residual and contraction ratio on `P_8` |
//! | `exp3` | vacuum ratio `e^{−1}` and log-linear geodesics |
//! | `exp4` | Hessian, margins, gap and coupling entropy at the `exp2` fixed point |
//! | `exp5` | heat-kernel residuals against the mutual-information source |
//! | `exp6` | constriction sweep on `P_8` against the reference table |
//! | `exp6b` | same sweep with the coupled source |
//! | `exp7` | sweeps on river-channel and trunk+roots trees |

pub mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{
    contraction_certificate, geodesic, geometric_r, path_entropy, residual_inf, solve_fixed_point,
    vacuum_solution, FixedPointReport, SolverOptions, SourceSpec, WeightRule,
};
use crate::graph::Graph;
use crate::io::{csv_string, num, write_atomic, write_json};
use crate::spectral::{heat_kernel_weights, EigenBasis, SpectralKernel};
use crate::stability::stability_report;

use self::sweep::{
    plot_data_csv, plot_data_normalized_csv, run_sweep, sweep_table_rows, Constriction,
    SweepRecord, DEFAULT_COUPLING_ETA, SWEEP_TABLE_HEADER, TABLE_EPS, TABLE_ROWS,
};

pub const SIGMA2: f64 = 1.0;
pub const MU2: f64 = 2.0;
pub const FD_STEP: f64 = 1e-6;
pub const HEAT_TAUS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
    Exp5,
    Exp6,
    Exp6b,
    Exp7,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        Self::Exp1,
        Self::Exp2,
        Self::Exp3,
        Self::Exp4,
        Self::Exp5,
        Self::Exp6,
        Self::Exp6b,
        Self::Exp7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exp1 => "exp1",
            Self::Exp2 => "exp2",
            Self::Exp3 => "exp3",
            Self::Exp4 => "exp4",
            Self::Exp5 => "exp5",
            Self::Exp6 => "exp6",
            Self::Exp6b => "exp6b",
            Self::Exp7 => "exp7",
        }
    }

    pub fn run(self) -> Result<ExperimentResult> {
        match self {
            Self::Exp1 => run_exp1(),
            Self::Exp2 => run_exp2(),
            Self::Exp3 => run_exp3(),
            Self::Exp4 => run_exp4(),
            Self::Exp5 => run_exp5(),
            Self::Exp6 => run_exp6(),
            Self::Exp6b => run_exp6b(),
            Self::Exp7 => run_exp7(),
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Non-gating checks are reported but do not affect `passed`.
    pub gating: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
        csv_string(&header, &self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub id: ExperimentId,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, Value>,
    /// File names written by [`ExperimentResult::write`], relative to the
    /// output directory.
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub table: Table,
    #[serde(skip)]
    pub extra_files: Vec<(String, String)>,
}

impl ExperimentResult {
    fn new(id: ExperimentId) -> Self {
        Self {
            id,
            passed: true,
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            artifacts: Vec::new(),
            table: Table::default(),
            extra_files: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            gating: true,
            detail,
        });
    }

    fn soft_check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            gating: false,
            detail,
        });
    }

    fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(
            key.into(),
            serde_json::to_value(value).expect("metric serializes"),
        );
    }

    pub fn metric_f64(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Writes the JSON and CSV artifacts into `dir` and returns their paths.
    pub fn write(&mut self, dir: &Path) -> Result<Vec<PathBuf>> {
        let stem = self.id.as_str();
        let mut names = vec![format!("{stem}_results.json"), format!("{stem}_table.csv")];
        names.extend(self.extra_files.iter().map(|(n, _)| n.clone()));
        self.artifacts = names.clone();

        write_json(&dir.join(&names[0]), self)?;
        write_atomic(&dir.join(&names[1]), self.table.to_csv().as_bytes())?;
        for (name, contents) in &self.extra_files {
            write_atomic(&dir.join(name), contents.as_bytes())?;
        }
        Ok(names.iter().map(|n| dir.join(n)).collect())
    }

    /// One line per check, `PASS`/`FAIL` (or `pass`/`fail` for non-gating).
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} {}\n",
            self.id,
            if self.passed { "PASSED" } else { "FAILED" }
        );
        for c in &self.checks {
            let tag = match (c.gating, c.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "pass",
                (false, false) => "fail",
            };
            out.push_str(&format!("  [{tag}] {}: {}\n", c.name, c.detail));
        }
        out
    }
}

fn p8_basis() -> Result<(Graph, EigenBasis)> {
    let g = Graph::path(8)?;
    let b = EigenBasis::of_laplacian(&g.laplacian())?;
    Ok((g, b))
}

fn source(rule: WeightRule) -> Result<SourceSpec> {
    SourceSpec::mutual_information(SIGMA2, MU2, rule)
}

/// Root of `x = exp(−1 − c/(1 + x))` on `(0, 1]` by bisection; the per-mode
/// fixed point of the mode-separable source with `σ² = 1`, `μ₂ = 2`.
pub fn scalar_fixed_point(c: f64) -> f64 {
    let g = |x: f64| x - (-1.0 - c / (1.0 + x)).exp();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn run_exp1() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp1);
    let (_, basis) = p8_basis()?;
    let n = basis.len();
    let h0 = vec![1.0; n];
    let k = SpectralKernel::new(h0.clone(), h0.clone())?;
    let analytic = geometric_r(&k);

    let mut fd = Vec::with_capacity(n);
    for l in 0..n {
        let mut plus = h0.clone();
        let mut minus = h0.clone();
        plus[l] += FD_STEP;
        minus[l] -= FD_STEP;
        let sp = path_entropy(&SpectralKernel::new(plus, h0.clone())?);
        let sm = path_entropy(&SpectralKernel::new(minus, h0.clone())?);
        fd.push((sp - sm) / (2.0 * FD_STEP));
    }
    let err = max_abs_diff(&analytic, &fd);

    res.table = Table::new(&["mode", "lambda", "r_analytic", "r_fd", "abs_error"]);
    for l in 0..n {
        res.table.push(vec![
            l.to_string(),
            num(basis.eigenvalues()[l]),
            num(analytic[l]),
            num(fd[l]),
            num((analytic[l] - fd[l]).abs()),
        ]);
    }
    res.metric("max_abs_error", err);
    res.metric("fd_step", FD_STEP);
    res.metric("r_analytic", &analytic);
    res.check(
        "gradient_check",
        err <= 1e-8,
        format!("max |R - FD| = {err:.3e} <= 1e-8"),
    );
    let worst = analytic.iter().fold(0.0f64, |m, r| m.max((r + 1.0).abs()));
    res.check(
        "r_is_minus_one",
        worst <= 1e-15,
        format!("max |R_l + 1| = {worst:.3e}"),
    );
    Ok(res)
}

fn exp2_fixed_point() -> Result<(EigenBasis, SourceSpec, FixedPointReport)> {
    let (_, basis) = p8_basis()?;
    let spec = source(WeightRule::Uniform)?;
    let fp = solve_fixed_point(
        &spec,
        &basis,
        &vec![1.0; basis.len()],
        SolverOptions::default(),
    )?;
    Ok((basis, spec, fp))
}

pub fn run_exp2() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp2);
    let (basis, spec, fp) = exp2_fixed_point()?;
    let oracle = scalar_fixed_point(1.0);
    let cert = contraction_certificate(&spec, &basis, &fp.h_star)?;

    res.table = Table::new(&["iteration", "step_norm", "residual_inf"]);
    for (i, r) in fp.residual_history.iter().enumerate() {
        let step = if i == 0 {
            String::new()
        } else {
            num(fp.step_norms[i - 1])
        };
        res.table.push(vec![i.to_string(), step, num(*r)]);
    }

    let dev = fp
        .h_star
        .h()
        .iter()
        .fold(0.0f64, |m, h| m.max((h - 0.15470).abs()));
    let oracle_dev = fp
        .h_star
        .h()
        .iter()
        .fold(0.0f64, |m, h| m.max((h - oracle).abs()));
    res.metric("h_star", fp.h_star.h());
    res.metric("bisection_root", oracle);
    res.metric("iterations", fp.iterations);
    res.metric("residual_inf", fp.residual_inf);
    res.metric("contraction_ratio", fp.contraction_ratio);
    res.metric("contraction_certificate", cert);
    res.metric("converged", fp.converged);

    res.check(
        "converged",
        fp.converged,
        format!("after {} iterations", fp.iterations),
    );
    res.check(
        "h_star_value",
        dev <= 1e-3,
        format!("max |h* - 0.15470| = {dev:.3e} <= 1e-3"),
    );
    res.check(
        "h_star_matches_bisection",
        oracle_dev <= 1e-10,
        format!("max |h* - root| = {oracle_dev:.3e} <= 1e-10"),
    );
    res.check(
        "terminal_residual",
        fp.residual_inf <= 1e-10,
        format!("{:.3e} <= 1e-10", fp.residual_inf),
    );
    res.check(
        "contraction_ratio",
        (0.09..=0.15).contains(&fp.contraction_ratio),
        format!("{:.4} in [0.09, 0.15]", fp.contraction_ratio),
    );
    res.check(
        "iterations",
        fp.iterations <= 30,
        format!("{} <= 30", fp.iterations),
    );
    res.check(
        "certificate_below_one",
        cert < 1.0,
        format!("{cert:.4} < 1"),
    );
    Ok(res)
}

pub fn run_exp3() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp3);
    let (_, basis) = p8_basis()?;
    let n = basis.len();
    let h0 = vec![1.0; n];
    let vacuum = vacuum_solution(&h0)?;
    let inv_e = (-1.0f64).exp();
    let ratios: Vec<f64> = vacuum.h().iter().zip(&h0).map(|(h, r)| h / r).collect();
    let vac_err = ratios.iter().fold(0.0f64, |m, r| m.max((r - inv_e).abs()));

    // heat-kernel geodesic a = 0, b = −λ
    let a = vec![0.0; n];
    let b: Vec<f64> = basis.eigenvalues().iter().map(|l| -l).collect();
    let ts = [0.0, 1.0, 2.0, 3.0, 4.0];
    let path: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| geodesic(&a, &b, t))
        .collect::<Result<_>>()?;
    let mut ratio_spread = 0.0f64;
    for l in 0..n {
        let first = path[1][l] / path[0][l];
        for w in path.windows(2) {
            ratio_spread = ratio_spread.max((w[1][l] / w[0][l] - first).abs());
        }
    }

    let rate = 0.8792;
    let triple: Vec<f64> = (0..3)
        .map(|t| geodesic(&[0.0], &[-rate], t as f64).map(|v| v[0]))
        .collect::<Result<_>>()?;
    // Three-decimal reference values; 0.415² = 0.1722, so they are only
    // log-linear to about one unit in the last place.
    let expected = [1.000, 0.415, 0.173];
    let triple_err = max_abs_diff(&triple, &expected);

    res.table = Table::new(&[
        "mode",
        "lambda",
        "vacuum_ratio",
        "geodesic_t0",
        "geodesic_t1",
        "geodesic_t2",
    ]);
    for l in 0..n {
        res.table.push(vec![
            l.to_string(),
            num(basis.eigenvalues()[l]),
            num(ratios[l]),
            num(path[0][l]),
            num(path[1][l]),
            num(path[2][l]),
        ]);
    }
    res.metric("vacuum_ratio", &ratios);
    res.metric("vacuum_max_error", vac_err);
    res.metric("geodesic_ratio_spread", ratio_spread);
    res.metric("rate_0_8792_triple", &triple);

    res.check(
        "vacuum_ratio",
        vac_err < 1e-6,
        format!("max |h*/h0 - 1/e| = {vac_err:.3e} < 1e-6"),
    );
    res.check(
        "geodesic_log_linear",
        ratio_spread <= 1e-12,
        format!("successive-ratio spread {ratio_spread:.3e} <= 1e-12"),
    );
    res.check(
        "rate_to_value",
        triple_err <= 1e-3,
        format!("exp(-0.8792 t), t=0,1,2 -> {triple:.4?} vs 1.000, 0.415, 0.173 (max diff {triple_err:.1e} <= 1e-3)"),
    );
    Ok(res)
}

pub fn run_exp4() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp4);
    let (basis, spec, fp) = exp2_fixed_point()?;
    let report = stability_report(&spec, &basis, &fp.h_star)?;
    let hs = fp.h_star.h()[0];
    let oracle = -1.0 / hs + 1.0 / ((1.0 + hs) * (1.0 + hs));

    res.table = Table::new(&[
        "mode",
        "h_star",
        "hessian_diag",
        "hessian_eigenvalue",
        "margin",
    ]);
    for l in 0..basis.len() {
        res.table.push(vec![
            l.to_string(),
            num(fp.h_star.h()[l]),
            num(report.hessian[(l, l)]),
            num(report.eigenvalues[l]),
            num(report.margins[l]),
        ]);
    }
    let off = report.hessian.max_abs_off_diagonal();
    let eig_dev = report
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, e| m.max((e + 5.714).abs()));
    let oracle_dev = report
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, e| m.max((e - oracle).abs()));
    let margin_dev = report
        .margins
        .iter()
        .fold(0.0f64, |m, x| m.max((x - 5.714).abs()));
    let ln7 = 7f64.ln();
    res.metric("hessian_eigenvalues", &report.eigenvalues);
    res.metric("hessian_oracle", oracle);
    res.metric("margins", &report.margins);
    res.metric("hessian_gap", report.hessian_gap);
    res.metric("fiedler_gap", report.fiedler_gap);
    res.metric("coupling_entropy", report.coupling_entropy);
    res.metric("stable", report.stable);

    res.check(
        "hessian_diagonal",
        off <= 1e-12,
        format!("max |H_lm|, l != m = {off:.3e}"),
    );
    res.check(
        "eigenvalues",
        eig_dev <= 0.01,
        format!("max |eig + 5.714| = {eig_dev:.4}"),
    );
    res.check(
        "eigenvalues_match_oracle",
        oracle_dev <= 1e-9,
        format!("oracle -1/h* + 1/(1+h*)^2 = {oracle:.6}"),
    );
    res.check(
        "margins",
        margin_dev <= 0.01,
        format!("max |margin - 5.714| = {margin_dev:.4}"),
    );
    res.check(
        "hessian_gap",
        (report.hessian_gap - 5.71).abs() <= 0.01,
        format!("{:.4}", report.hessian_gap),
    );
    res.check(
        "coupling_entropy",
        (report.coupling_entropy - ln7).abs() <= 1e-9,
        format!("{:.10} vs ln 7", report.coupling_entropy),
    );
    res.check(
        "stable",
        report.stable,
        "all Hessian eigenvalues negative".into(),
    );
    Ok(res)
}

pub fn run_exp5() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp5);
    let (_, basis) = p8_basis()?;
    let spec = source(WeightRule::Uniform)?;
    let mut residuals = Vec::new();
    res.table = Table::new(&["tau", "residual_inf"]);
    for &tau in &HEAT_TAUS {
        let k = heat_kernel_weights(&basis, tau)?;
        let r = residual_inf(&spec, &basis, &k)?;
        res.table.push(vec![num(tau), num(r)]);
        residuals.push(r);
    }
    let strict = residuals.windows(2).all(|w| w[1] > w[0]);
    let weak = residuals.windows(2).all(|w| w[1] >= w[0]);
    let first = residuals[0];
    let last = *residuals.last().expect("five taus");
    res.metric("taus", HEAT_TAUS);
    res.metric("residuals", &residuals);

    res.check(
        "strictly_increasing",
        strict,
        format!("residuals {residuals:.4?}"),
    );
    res.soft_check("non_decreasing", weak, format!("residuals {residuals:.4?}"));
    res.check(
        "first_residual",
        (first - 1.50).abs() <= 0.01,
        format!("{first:.4} vs 1.50"),
    );
    res.check(
        "last_residual",
        (last - 17.24).abs() <= 0.05,
        format!("{last:.4} vs 17.24"),
    );
    Ok(res)
}

fn directions_hold(records: &[SweepRecord]) -> (bool, bool, bool) {
    // records are ordered by decreasing ε
    let lambda = records.windows(2).all(|w| w[1].lambda1 < w[0].lambda1);
    let entropy = records.windows(2).all(|w| w[1].entropy >= w[0].entropy);
    let gap = records
        .windows(2)
        .all(|w| w[1].delta_fiedler <= w[0].delta_fiedler);
    (lambda, entropy, gap)
}

fn sweep_table(records: &[SweepRecord]) -> Table {
    let mut table = Table::new(&SWEEP_TABLE_HEADER);
    table.rows = sweep_table_rows(records);
    table
}

fn sweep_extra_files(res: &mut ExperimentResult, records: &[SweepRecord]) {
    let stem = res.id.as_str();
    res.extra_files = vec![
        (format!("{stem}_sweep_plotdata.csv"), plot_data_csv(records)),
        (
            format!("{stem}_sweep_plotdata_normalized.csv"),
            plot_data_normalized_csv(records),
        ),
    ];
}

pub fn run_exp6() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp6);
    let spec = source(WeightRule::EigenvalueAware)?;
    let records = run_sweep(
        &Constriction::path8(),
        &TABLE_EPS,
        &spec,
        None,
        SolverOptions::default(),
    )?;
    res.table = sweep_table(&records);
    sweep_extra_files(&mut res, &records);

    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (r, &(eps, lambda1, entropy, gap)) in records.iter().zip(&TABLE_ROWS) {
        debug_assert_eq!(r.eps, eps);
        worst.0 = worst.0.max((r.lambda1 - lambda1).abs());
        worst.1 = worst.1.max((r.entropy - entropy).abs());
        worst.2 = worst.2.max((r.delta_fiedler - gap).abs());
    }
    let (dl, dh, dg) = directions_hold(&records);
    res.metric("records", &records);
    res.metric("max_lambda1_error", worst.0);
    res.metric("max_entropy_error", worst.1);
    res.metric("max_delta_fiedler_error", worst.2);

    res.check(
        "all_converged",
        records.iter().all(|r| r.converged),
        format!("{} rows", records.len()),
    );
    res.check(
        "lambda1_table",
        worst.0 <= 2e-3,
        format!("max |d lambda1| = {:.2e} <= 2e-3", worst.0),
    );
    res.check(
        "entropy_table",
        worst.1 <= 5e-3,
        format!("max |d H| = {:.2e} <= 5e-3", worst.1),
    );
    res.check(
        "delta_fiedler_table",
        worst.2 <= 5e-3,
        format!("max |d Delta'| = {:.2e} <= 5e-3", worst.2),
    );
    res.check(
        "directions",
        dl && dh && dg,
        format!("lambda1 decreasing {dl}, H non-decreasing {dh}, Delta' non-increasing {dg}"),
    );
    Ok(res)
}

pub fn run_exp6b() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp6b);
    let spec = source(WeightRule::EigenvalueAware)?;
    let records = run_sweep(
        &Constriction::path8(),
        &TABLE_EPS,
        &spec,
        Some(DEFAULT_COUPLING_ETA),
        SolverOptions::default(),
    )?;
    res.table = sweep_table(&records);
    sweep_extra_files(&mut res, &records);

    let s: Vec<f64> = records.iter().map(|r| r.coupling_entropy).collect();
    let range = s.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - s.iter().copied().fold(f64::INFINITY, f64::min);
    let (_, dh, dg) = directions_hold(&records);
    res.metric("eta", DEFAULT_COUPLING_ETA);
    res.metric("records", &records);
    res.metric("coupling_entropy_range", range);

    res.check(
        "all_converged",
        records.iter().all(|r| r.converged),
        format!("{} rows", records.len()),
    );
    res.check(
        "coupling_entropy_varies",
        range > 1e-3,
        format!("range {range:.4} nats > 1e-3"),
    );
    res.check(
        "entropy_direction",
        dh,
        "H non-decreasing as eps falls".into(),
    );
    res.check(
        "delta_fiedler_direction",
        dg,
        "Delta' non-increasing as eps falls".into(),
    );
    Ok(res)
}

pub fn run_exp7() -> Result<ExperimentResult> {
    let mut res = ExperimentResult::new(ExperimentId::Exp7);
    let spec = source(WeightRule::EigenvalueAware)?;
    let opts = SolverOptions::default();
    let header = [
        "topology",
        "coupled",
        "eps",
        "lambda1",
        "entropy",
        "delta_fiedler",
        "coupling_entropy",
        "converged",
    ];
    res.table = Table::new(&header);

    let mut drops = BTreeMap::new();
    for constriction in [Constriction::river_channel(), Constriction::trunk_roots()] {
        let name = constriction.name.clone();
        let plain = run_sweep(&constriction, &TABLE_EPS, &spec, None, opts)?;
        let coupled = run_sweep(
            &constriction,
            &TABLE_EPS,
            &spec,
            Some(DEFAULT_COUPLING_ETA),
            opts,
        )?;
        for (flag, records) in [(false, &plain), (true, &coupled)] {
            for r in records.iter() {
                res.table.push(vec![
                    name.clone(),
                    flag.to_string(),
                    num(r.eps),
                    num(r.lambda1),
                    num(r.entropy),
                    num(r.delta_fiedler),
                    num(r.coupling_entropy),
                    r.converged.to_string(),
                ]);
            }
        }

        let (dl, dh, dg) = directions_hold(&plain);
        res.check(
            &format!("{name}_converged"),
            plain.iter().chain(&coupled).all(|r| r.converged),
            format!("{} rows", plain.len() + coupled.len()),
        );
        res.check(
            &format!("{name}_lambda1_decreasing"),
            dl,
            format!(
                "{:.4?}",
                plain.iter().map(|r| r.lambda1).collect::<Vec<_>>()
            ),
        );
        res.check(
            &format!("{name}_entropy_non_decreasing"),
            dh,
            format!(
                "{:.4?}",
                plain.iter().map(|r| r.entropy).collect::<Vec<_>>()
            ),
        );
        res.check(
            &format!("{name}_delta_fiedler_non_increasing"),
            dg,
            format!(
                "{:.4?}",
                plain.iter().map(|r| r.delta_fiedler).collect::<Vec<_>>()
            ),
        );

        let s: Vec<f64> = coupled.iter().map(|r| r.coupling_entropy).collect();
        let drop = s[0] - s[s.len() - 1];
        drops.insert(name.clone(), drop);
        res.metric(&format!("{name}_records"), &plain);
        res.metric(&format!("{name}_coupled_records"), &coupled);
        res.metric(&format!("{name}_coupling_entropy"), &s);
        res.metric(&format!("{name}_coupling_entropy_drop"), drop);
    }
    let (river, trunk) = (drops["river"], drops["trunk"]);
    res.soft_check(
        "river_coupling_drop_exceeds_trunk",
        river >= trunk,
        format!("S_coup drop river {river:.4} vs trunk {trunk:.4}"),
    );
    res.metric("grid", TABLE_EPS);
    Ok(res)
}

/// Runs every experiment in order.
pub fn run_all() -> Result<Vec<ExperimentResult>> {
    ExperimentId::ALL
        .into_iter()
        .map(ExperimentId::run)
        .collect()
}

/// JSON value of a sweep for the `sweep` command.
pub fn sweep_json(
    constriction: &Constriction,
    coupling_eta: Option<f64>,
    records: &[SweepRecord],
) -> Value {
    json!({
        "topology": constriction.name,
        "edge": [constriction.edge.0, constriction.edge.1],
        "coupling_eta": coupling_eta,
        "records": records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("exp9".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn scalar_root() {
        let r = scalar_fixed_point(1.0);
        assert!((r - (-1.0 - 1.0 / (1.0 + r)).exp()).abs() < 1e-15);
    }

    #[test]
    fn passing_experiments() {
        for id in [
            ExperimentId::Exp1,
            ExperimentId::Exp2,
            ExperimentId::Exp3,
            ExperimentId::Exp4,
            ExperimentId::Exp6,
            ExperimentId::Exp6b,
            ExperimentId::Exp7,
        ] {
            let r = id.run().unwrap();
            assert!(r.passed, "{}", r.summary());
        }
    }

    #[test]
    fn exp5_zero_mode_ties_first_two_residuals() {
        let r = run_exp5().unwrap();
        assert!(!r.check_named("strictly_increasing").unwrap().passed);
        assert!(r.check_named("non_decreasing").unwrap().passed);
        assert!(r.check_named("first_residual").unwrap().passed);
        assert!(r.check_named("last_residual").unwrap().passed);
    }

    #[test]
    fn write_produces_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = run_exp6().unwrap();
        let paths = r.write(dir.path()).unwrap();
        assert_eq!(paths.len(), 4);
        assert!(paths.iter().all(|p| p.exists()));
        let json: Value =
            serde_json::from_str(&std::fs::read_to_string(&paths[0]).unwrap()).unwrap();
        assert_eq!(json["id"], "exp6");
        assert_eq!(json["artifacts"].as_array().unwrap().len(), 4);
    }
}
