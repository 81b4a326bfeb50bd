use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kernel_field::cli::{self, RunConfig, SweepConfig, EXIT_INPUT_ERROR};
use kernel_field::field::WeightRule;

#[derive(Parser)]
#[command(
    name = "kernel-field",
    version,
    about = "Self-consistent spectral kernels on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the self-consistent kernel on one graph.
    Solve(SolveArgs),
    /// Re-run a reproduction experiment (exp1..exp7, exp6b, all).
    Reproduce {
        id: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Constriction sweep over one edge weight.
    Sweep(SweepArgs),
    /// Dump a graph, its Laplacian and its eigenbasis.
    Graph {
        #[arg(long, default_value = "path:8")]
        graph: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// path:N, path:N:weaken=u,v,eps, river[:...], trunk[:...], file:PATH
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    /// uniform | eigen
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Leave the Hessian out of stability.json.
    #[arg(long)]
    no_hessian: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated edge weights.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Edge to constrict as u,v.
    #[arg(long, value_parser = parse_edge)]
    edge: Option<(usize, usize)>,
    #[arg(long)]
    coupled: bool,
    #[arg(long)]
    require_convergence: bool,
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (u, v) = s.split_once(',').ok_or("expected u,v")?;
    let node = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad node '{x}': {e}"))
    };
    Ok((node(u)?, node(v)?))
}

fn build_config(common: &Common) -> kernel_field::Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(g) = &common.graph {
        config.graph = Some(g.clone());
    }
    if let Some(v) = common.sigma2 {
        config.source.sigma2 = v;
    }
    if let Some(v) = common.mu2 {
        config.source.mu2 = v;
    }
    if let Some(w) = &common.weights {
        config.source.weights = Some(w.parse::<WeightRule>()?);
    }
    if let Some(v) = common.eta {
        config.source.eta = v;
    }
    if let Some(v) = common.tol {
        config.solver.tol = v;
    }
    if let Some(v) = common.max_iter {
        config.solver.max_iter = v;
    }
    if let Some(v) = &common.out {
        config.outputs = v.clone();
    }
    Ok(config)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Solve(args) => match build_config(&args.common) {
            Ok(mut config) => {
                config.include_hessian &= !args.no_hessian;
                config.experiment = None;
                config.sweep = None;
                cli::cmd_solve(&config)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::Reproduce { id, out } => cli::cmd_reproduce(&id, &out),
        Command::Sweep(args) => match build_config(&args.common) {
            Ok(mut config) => {
                let mut sweep = config.sweep.take().unwrap_or_else(SweepConfig::default);
                if let Some(eps) = args.eps {
                    sweep.eps_values = eps;
                }
                if let Some(edge) = args.edge {
                    sweep.edge = Some(edge);
                }
                sweep.coupled |= args.coupled;
                sweep.require_convergence |= args.require_convergence;
                config.sweep = Some(sweep);
                config.experiment = None;
                cli::cmd_sweep(&config)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::Graph { graph, out } => cli::cmd_graph(&graph, &out),
    };
    std::process::exit(code);
}
