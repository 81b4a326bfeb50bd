//! Command implementations behind the `kernel-field` binary.
//!
//! The binary only parses arguments into a [`RunConfig`] and calls one of the
//! `cmd_*` functions here. Exit codes are the machine contract:
//! `0` success, `1` input error, `2` numerical non-convergence (or a failed
//! reproduction check).
//!
//! Builtin graph specs:
//!
//! ```text
//! path:N                     path graph P_N
//! path:N:weaken=u,v,eps      P_N with edge (u,v) set to eps
//! river[:stem,a1,l1,...]     stem path plus tributaries (attach, length)
//! trunk[:len,roots,branches] trunk with a leaf fan at each end
//! file:PATH | PATH.json      graph JSON {"n": .., "edges": [[u, v, w], ..]}
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRecord, DEFAULT_ALARM_MARGIN};
use crate::error::{Error, Result};
use crate::experiments::sweep::{
    plot_data_csv, plot_data_normalized_csv, run_sweep, sweep_table_csv, Constriction,
    DEFAULT_COUPLING_ETA, TABLE_EPS,
};
use crate::experiments::{sweep_json, ExperimentId};
use crate::field::{coupling_matrix, solve_fixed_point, SolverOptions, SourceSpec, WeightRule};
use crate::graph::Graph;
use crate::io::{write_atomic, write_json};
use crate::spectral::EigenBasis;
use crate::stability::stability_report;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

/// A parsed graph spec and the edge a sweep constricts by default.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphChoice {
    pub name: String,
    pub graph: Graph,
    pub default_edge: Option<(usize, usize)>,
}

fn parse_usizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("expected an integer, got '{p}'")))
        })
        .collect()
}

fn middle_edge(len: usize) -> (usize, usize) {
    let hi = (len / 2).max(1);
    (hi - 1, hi)
}

pub fn parse_graph_spec(spec: &str) -> Result<GraphChoice> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("file:") {
        return read_graph_file(Path::new(path));
    }
    if spec.ends_with(".json") {
        return read_graph_file(Path::new(spec));
    }
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "path" => {
            let (n_str, rest) = args.split_once(':').unwrap_or((args, ""));
            let n: usize = n_str
                .parse()
                .map_err(|_| Error::Config(format!("bad path size in '{spec}'")))?;
            let mut graph = Graph::path(n)?;
            let mut edge = if n >= 4 { (2, 3) } else { (0, 1) };
            if !rest.is_empty() {
                let w = rest
                    .strip_prefix("weaken=")
                    .ok_or_else(|| Error::Config(format!("unknown path option '{rest}'")))?;
                let parts: Vec<&str> = w.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Config(format!("expected weaken=u,v,eps, got '{w}'")));
                }
                let u = parse_usizes(parts[0])?[0];
                let v = parse_usizes(parts[1])?[0];
                let eps: f64 = parts[2]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad weight '{}'", parts[2])))?;
                graph = graph.weaken_edge(u, v, eps)?;
                edge = (u, v);
            }
            Ok(GraphChoice {
                name: "path".into(),
                graph,
                default_edge: Some(edge),
            })
        }
        "river" => {
            let c = Constriction::river_channel();
            if args.is_empty() {
                return Ok(GraphChoice {
                    name: c.name,
                    graph: c.base,
                    default_edge: Some(c.edge),
                });
            }
            let nums = parse_usizes(args)?;
            if nums.len() % 2 != 1 {
                return Err(Error::Config(
                    "river expects stem followed by (attach, length) pairs".into(),
                ));
            }
            let tributaries: Vec<(usize, usize)> =
                nums[1..].chunks(2).map(|p| (p[0], p[1])).collect();
            Ok(GraphChoice {
                name: "river".into(),
                graph: Graph::river_channel(nums[0], &tributaries)?,
                default_edge: Some(middle_edge(nums[0])),
            })
        }
        "trunk" => {
            let c = Constriction::trunk_roots();
            if args.is_empty() {
                return Ok(GraphChoice {
                    name: c.name,
                    graph: c.base,
                    default_edge: Some(c.edge),
                });
            }
            let nums = parse_usizes(args)?;
            if nums.len() != 3 {
                return Err(Error::Config("trunk expects len,rootfan,branchfan".into()));
            }
            Ok(GraphChoice {
                name: "trunk".into(),
                graph: Graph::trunk_roots(nums[0], nums[1], nums[2])?,
                default_edge: Some(middle_edge(nums[0])),
            })
        }
        _ => Err(Error::Config(format!("unknown graph spec '{spec}'"))),
    }
}

fn read_graph_file(path: &Path) -> Result<GraphChoice> {
    Ok(GraphChoice {
        name: path.display().to_string(),
        graph: Graph::read_json(path)?,
        default_edge: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceConfig {
    pub sigma2: f64,
    pub mu2: f64,
    /// Defaults to uniform for `solve` and eigenvalue-aware for `sweep`.
    pub weights: Option<WeightRule>,
    pub eta: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            sigma2: 1.0,
            mu2: 2.0,
            weights: None,
            eta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub eps_values: Vec<f64>,
    pub coupled: bool,
    pub edge: Option<(usize, usize)>,
    /// Exit with code 2 when any row fails to converge.
    pub require_convergence: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            eps_values: TABLE_EPS.to_vec(),
            coupled: false,
            edge: None,
            require_convergence: false,
        }
    }
}

/// JSON run configuration. Command-line flags override its fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub graph: Option<String>,
    pub source: SourceConfig,
    pub solver: SolverOptions,
    pub outputs: PathBuf,
    pub experiment: Option<String>,
    pub sweep: Option<SweepConfig>,
    pub include_hessian: bool,
    pub alarm_margin: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            graph: None,
            source: SourceConfig::default(),
            solver: SolverOptions::default(),
            outputs: PathBuf::from("out"),
            experiment: None,
            sweep: None,
            include_hessian: true,
            alarm_margin: DEFAULT_ALARM_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Solve,
    Reproduce(String),
    Sweep,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Exactly one of experiment, sweep or single solve is active.
    pub fn mode(&self) -> Result<Mode> {
        match (&self.experiment, &self.sweep) {
            (Some(_), Some(_)) => Err(Error::Config(
                "config sets both 'experiment' and 'sweep'".into(),
            )),
            (Some(id), None) => Ok(Mode::Reproduce(id.clone())),
            (None, Some(_)) => Ok(Mode::Sweep),
            (None, None) => Ok(Mode::Solve),
        }
    }

    fn graph_choice(&self) -> Result<GraphChoice> {
        parse_graph_spec(self.graph.as_deref().unwrap_or("path:8"))
    }

    fn base_source(&self, default_rule: WeightRule) -> Result<SourceSpec> {
        SourceSpec::mutual_information(
            self.source.sigma2,
            self.source.mu2,
            self.source.weights.unwrap_or(default_rule),
        )
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NumericalFailure(_) => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT_ERROR,
    }
}

fn finish(result: Result<i32>) -> i32 {
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

/// Dispatches on [`RunConfig::mode`].
pub fn run(config: &RunConfig) -> i32 {
    match config.mode() {
        Ok(Mode::Solve) => cmd_solve(config),
        Ok(Mode::Sweep) => cmd_sweep(config),
        Ok(Mode::Reproduce(id)) => cmd_reproduce(&id, &config.outputs),
        Err(err) => finish(Err(err)),
    }
}

pub fn cmd_solve(config: &RunConfig) -> i32 {
    finish(solve_inner(config))
}

fn solve_inner(config: &RunConfig) -> Result<i32> {
    let choice = config.graph_choice()?;
    let basis = EigenBasis::of_laplacian(&choice.graph.laplacian())?;
    let mut spec = config.base_source(WeightRule::Uniform)?;
    if config.source.eta > 0.0 {
        spec = spec.with_coupling(config.source.eta, coupling_matrix(&choice.graph, &basis)?)?;
    }
    let h0 = vec![1.0; basis.len()];
    let fp = solve_fixed_point(&spec, &basis, &h0, config.solver)?;
    let stability = stability_report(&spec, &basis, &fp.h_star)?;
    let diagnostics = DiagnosticsRecord::compute(&fp.h_star, config.alarm_margin)?;

    let out = &config.outputs;
    write_json(&out.join("fixed_point.json"), &fp)?;
    write_json(
        &out.join("stability.json"),
        &stability.to_json_value(config.include_hessian),
    )?;
    write_json(&out.join("diagnostics.json"), &diagnostics)?;

    println!(
        "graph {} (n = {}), lambda1 = {:.6}",
        choice.name,
        basis.len(),
        basis.fiedler_value()
    );
    println!(
        "converged = {}, iterations = {}, residual = {:.6e}, ratio = {:.6}",
        fp.converged, fp.iterations, fp.residual_inf, fp.contraction_ratio
    );
    println!(
        "h* = [{}]",
        fp.h_star
            .h()
            .iter()
            .map(|h| format!("{h:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "stable = {}, gap = {:.6}, fiedler gap = {:.6}, S_coup = {:.6}",
        stability.stable, stability.hessian_gap, stability.fiedler_gap, stability.coupling_entropy
    );
    println!(
        "H = {:.6}, threshold = {:.6}, alarm = {}",
        diagnostics.spectral_entropy, diagnostics.threshold, diagnostics.alarm
    );
    Ok(if fp.converged {
        EXIT_SUCCESS
    } else {
        eprintln!(
            "fixed point did not converge in {} iterations",
            fp.iterations
        );
        EXIT_NOT_CONVERGED
    })
}

/// `id` is an experiment id or `all`.
pub fn cmd_reproduce(id: &str, out: &Path) -> i32 {
    finish(reproduce_inner(id, out))
}

fn reproduce_inner(id: &str, out: &Path) -> Result<i32> {
    let ids: Vec<ExperimentId> = if id == "all" {
        ExperimentId::ALL.to_vec()
    } else {
        vec![id.parse()?]
    };
    let mut all_passed = true;
    for id in ids {
        let mut result = id.run()?;
        result.write(out)?;
        print!("{}", result.summary());
        all_passed &= result.passed;
    }
    Ok(if all_passed {
        EXIT_SUCCESS
    } else {
        EXIT_NOT_CONVERGED
    })
}

pub fn cmd_sweep(config: &RunConfig) -> i32 {
    finish(sweep_inner(config))
}

fn sweep_inner(config: &RunConfig) -> Result<i32> {
    let sweep = config.sweep.clone().unwrap_or_default();
    let choice = config.graph_choice()?;
    let edge = sweep
        .edge
        .or(choice.default_edge)
        .ok_or_else(|| Error::Config("sweep needs an edge for this graph".into()))?;
    let constriction = Constriction::new(choice.name, choice.graph, edge)?;
    let source = config.base_source(WeightRule::EigenvalueAware)?;
    let eta = if config.source.eta > 0.0 {
        config.source.eta
    } else {
        DEFAULT_COUPLING_ETA
    };
    let eta = sweep.coupled.then_some(eta);
    let records = run_sweep(
        &constriction,
        &sweep.eps_values,
        &source,
        eta,
        config.solver,
    )?;

    let out = &config.outputs;
    write_json(
        &out.join("sweep_results.json"),
        &sweep_json(&constriction, eta, &records),
    )?;
    write_atomic(
        &out.join("sweep_table.csv"),
        sweep_table_csv(&records).as_bytes(),
    )?;
    write_atomic(
        &out.join("sweep_plotdata.csv"),
        plot_data_csv(&records).as_bytes(),
    )?;
    write_atomic(
        &out.join("sweep_plotdata_normalized.csv"),
        plot_data_normalized_csv(&records).as_bytes(),
    )?;

    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>10}",
        "eps", "lambda1", "H", "Delta'", "S_coup"
    );
    for r in &records {
        println!(
            "{:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}{}",
            r.eps,
            r.lambda1,
            r.entropy,
            r.delta_fiedler,
            r.coupling_entropy,
            if r.converged { "" } else { "  (not converged)" }
        );
    }
    let unconverged = records.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!("{unconverged} sweep row(s) did not converge");
        if sweep.require_convergence {
            return Ok(EXIT_NOT_CONVERGED);
        }
    }
    Ok(EXIT_SUCCESS)
}

/// Writes `graph.json`, `laplacian.csv` and `eigenbasis.csv`.
pub fn cmd_graph(spec: &str, out: &Path) -> i32 {
    finish(graph_inner(spec, out))
}

fn graph_inner(spec: &str, out: &Path) -> Result<i32> {
    let choice = parse_graph_spec(spec)?;
    let laplacian = choice.graph.laplacian();
    let basis = EigenBasis::of_laplacian(&laplacian)?;
    write_atomic(&out.join("graph.json"), choice.graph.to_json()?.as_bytes())?;
    let mut lap_csv = String::new();
    for row in laplacian.to_rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        lap_csv.push_str(&cells.join(","));
        lap_csv.push('\n');
    }
    write_atomic(&out.join("laplacian.csv"), lap_csv.as_bytes())?;
    write_atomic(&out.join("eigenbasis.csv"), basis.to_csv().as_bytes())?;

    println!(
        "graph {}: n = {}, edges = {}, connected = {}",
        choice.name,
        choice.graph.node_count(),
        choice.graph.edges().len(),
        choice.graph.is_connected()
    );
    for (l, lam) in basis.eigenvalues().iter().enumerate() {
        println!("  lambda_{l} = {lam:.6}");
    }
    Ok(EXIT_SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_spec_grammar() {
        let p = parse_graph_spec("path:8").unwrap();
        assert_eq!(p.graph, Graph::path(8).unwrap());
        assert_eq!(p.default_edge, Some((2, 3)));

        let w = parse_graph_spec("path:8:weaken=2,3,0.3").unwrap();
        assert_eq!(w.graph.edge_weight(2, 3), Some(0.3));

        let r = parse_graph_spec("river:6,1,2,3,2").unwrap();
        assert_eq!(r.graph, Graph::river_channel(6, &[(1, 2), (3, 2)]).unwrap());
        assert_eq!(r.default_edge, Some((2, 3)));
        assert_eq!(parse_graph_spec("river").unwrap().graph, r.graph);

        let t = parse_graph_spec("trunk:4,3,3").unwrap();
        assert_eq!(t.graph, Graph::trunk_roots(4, 3, 3).unwrap());
        assert_eq!(t.default_edge, Some((1, 2)));

        for bad in [
            "ring:5",
            "path:x",
            "path:8:cut=1",
            "river:6,1",
            "trunk:4,3",
            "path:1",
        ] {
            assert!(parse_graph_spec(bad).is_err(), "{bad}");
        }
        assert!(parse_graph_spec("file:/nonexistent/g.json").is_err());
    }

    #[test]
    fn config_modes() {
        let mut c = RunConfig::default();
        assert_eq!(c.mode().unwrap(), Mode::Solve);
        c.sweep = Some(SweepConfig::default());
        assert_eq!(c.mode().unwrap(), Mode::Sweep);
        c.experiment = Some("exp2".into());
        assert!(c.mode().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let c: RunConfig = serde_json::from_str(
            r#"{"graph": "path:8", "source": {"weights": "eigenvalue_aware"}}"#,
        )
        .unwrap();
        assert_eq!(c.source.mu2, 2.0);
        assert_eq!(c.source.weights, Some(WeightRule::EigenvalueAware));
        assert_eq!(c.solver, SolverOptions::default());
        assert!(serde_json::from_str::<RunConfig>(r#"{"grpah": "x"}"#).is_err());
    }
}
