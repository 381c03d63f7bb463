use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use netred::graph::Coverage;
use netred::Tolerances;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "netred",
    version,
    about = "Clustering-based reduction of directed network systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Connectedness, components, consensus dimension and system verdicts.
    Analyze(Options),
    /// Strip unreachable, undetectable and 0-dissimilar structure.
    Minreal(Options),
    /// Reduce to a target order and certify the H2 error.
    Reduce(Options),
    /// H2 error of a reduced model against the full one.
    Error(Options),
    /// Graphviz rendering of the network, coloured by cell.
    ExportDot(Options),
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Analyze(o)
            | Command::Minreal(o)
            | Command::Reduce(o)
            | Command::Error(o)
            | Command::ExportDot(o) => o,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Flat TOML file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Laplacian in Matrix Market format.
    #[arg(long)]
    pub laplacian: Option<PathBuf>,
    /// Edge list CSV with header `src,dst,weight` and 1-based ids.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Vertex count for an edge list whose last vertices have no edges.
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Accept positive Laplacian row sums as grounding.
    #[arg(long)]
    pub allow_grounding: bool,
    /// Input matrix F (identity when omitted).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output matrix H (identity when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Target order r.
    #[arg(long)]
    pub order: Option<usize>,
    /// Clustering strategy name.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Error evaluation method name.
    #[arg(long)]
    pub error_method: Option<String>,
    /// Clustering JSON `{"cells": [[1, 2], [3]]}` used instead of a strategy.
    #[arg(long)]
    pub clustering: Option<PathBuf>,
    /// Directory holding a reduced model written by `reduce` or `minreal`.
    #[arg(long)]
    pub reduced: Option<PathBuf>,
    /// Project onto an improper clustering instead of failing.
    #[arg(long)]
    pub force: bool,
    /// Keep only vertices reached from every input and reaching every output.
    #[arg(long)]
    pub strict_reachability: bool,
    /// Cluster the network as given, without minimal realization.
    #[arg(long)]
    pub skip_minreal: bool,
    /// Write pseudo Gramians and balancing weights as Matrix Market files.
    #[arg(long)]
    pub export_gramians: bool,
    /// Seed for randomized strategies.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rank threshold multiplier.
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Relative residual accepted by solves and consistency checks.
    #[arg(long)]
    pub tol_residual: Option<f64>,
    /// Relative threshold of the clusterability test.
    #[arg(long)]
    pub tol_clusterability: Option<f64>,
}

/// Command-line options merged over the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Source,
    pub vertices: Option<usize>,
    pub allow_grounding: bool,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub order: Option<usize>,
    pub strategy: String,
    pub error_method: String,
    pub clustering: Option<PathBuf>,
    pub reduced: Option<PathBuf>,
    pub force: bool,
    pub coverage: Coverage,
    pub skip_minreal: bool,
    pub export_gramians: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone)]
pub enum Source {
    Laplacian(PathBuf),
    Edges(PathBuf),
}

fn load_file(path: &Path) -> CliResult<Options> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut opts: Options = toml::from_str(&text).map_err(|e| {
        let line = e
            .span()
            .map_or(1, |s| text[..s.start].matches('\n').count() + 1);
        CliError::parse(path, line, e.message().to_string())
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [
        &mut opts.laplacian,
        &mut opts.edges,
        &mut opts.input,
        &mut opts.output,
        &mut opts.out,
        &mut opts.clustering,
        &mut opts.reduced,
    ]
    .into_iter()
    .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(opts)
}

impl RunConfig {
    pub fn resolve(flags: &Options) -> CliResult<Self> {
        let file = match &flags.config {
            Some(p) => load_file(p)?,
            None => Options::default(),
        };
        let laplacian = flags.laplacian.clone().or(file.laplacian);
        let edges = flags.edges.clone().or(file.edges);
        let source = match (laplacian, edges) {
            (Some(l), None) => Source::Laplacian(l),
            (None, Some(e)) => Source::Edges(e),
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give exactly one of --laplacian and --edges, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Usage(
                    "a network is required: pass --laplacian or --edges".into(),
                ))
            }
        };
        let order = flags.order.or(file.order);
        if order == Some(0) {
            return Err(CliError::Usage("--order must be at least 1".into()));
        }
        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            rank: flags.tol_rank.or(file.tol_rank).unwrap_or(defaults.rank),
            residual: flags
                .tol_residual
                .or(file.tol_residual)
                .unwrap_or(defaults.residual),
            clusterability: flags
                .tol_clusterability
                .or(file.tol_clusterability)
                .unwrap_or(defaults.clusterability),
            ..defaults
        };
        for (name, v) in [
            ("tol-rank", tolerances.rank),
            ("tol-residual", tolerances.residual),
            ("tol-clusterability", tolerances.clusterability),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!(
                    "--{name} must be positive, got {v}"
                )));
            }
        }
        let strict = flags.strict_reachability || file.strict_reachability;
        Ok(Self {
            source,
            vertices: flags.vertices.or(file.vertices),
            allow_grounding: flags.allow_grounding || file.allow_grounding,
            input: flags.input.clone().or(file.input),
            output: flags.output.clone().or(file.output),
            out: flags.out.clone().or(file.out),
            order,
            strategy: flags
                .strategy
                .clone()
                .or(file.strategy)
                .unwrap_or_else(|| "dissimilarity".into()),
            error_method: flags
                .error_method
                .clone()
                .or(file.error_method)
                .unwrap_or_else(|| "cross-gramian".into()),
            clustering: flags.clustering.clone().or(file.clustering),
            reduced: flags.reduced.clone().or(file.reduced),
            force: flags.force || file.force,
            coverage: if strict { Coverage::All } else { Coverage::Any },
            skip_minreal: flags.skip_minreal || file.skip_minreal,
            export_gramians: flags.export_gramians || file.export_gramians,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            tolerances,
        })
    }
}
