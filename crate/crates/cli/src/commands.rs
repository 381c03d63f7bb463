use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use netred::graph::DiGraph;
use netred::network::NetworkSystem;
use netred::pipeline::{self, ReductionOptions};
use netred::reduction::{
    clusterability_classes, minimal_network_realization, project, Clustering, MergeRecord,
    MinimalRealization,
};
use netred::reduction_error::{h2_distance, ErrorReport, ReferenceModel};
use netred::semistable::pseudo_gramians;
use netred::strategy::error_methods;
use serde::Serialize;

use crate::config::{RunConfig, Source};
use crate::dot;
use crate::error::{CliError, CliResult};
use crate::io::{
    dissimilarity_csv, matrix_market_array, matrix_market_coordinate, read_clustering,
    read_edge_list, read_matrix_market, to_json, ClusteringFile,
};

/// Largest accepted Laplacian row sum relative to the largest entry.
const ROW_SUM_TOL: f64 = 1e-9;

const REDUCED_LAPLACIAN: &str = "reduced_laplacian.mtx";
const REDUCED_INPUT: &str = "reduced_input.mtx";
const REDUCED_OUTPUT: &str = "reduced_output.mtx";

/// Text for stdout plus files for the output directory. Nothing is written
/// until a command has fully succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn write(&self, out: Option<&Path>) -> CliResult<()> {
        if self.files.is_empty() {
            return Ok(());
        }
        let dir = out.ok_or_else(|| CliError::Usage("--out is required".into()))?;
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, contents) in &self.files {
            let p = dir.join(name);
            fs::write(&p, contents).map_err(|e| CliError::io(&p, e))?;
        }
        Ok(())
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn one_based_all(v: &[Vec<usize>]) -> Vec<Vec<usize>> {
    v.iter().map(|c| one_based(c)).collect()
}

fn read_or_identity(path: Option<&PathBuf>, n: usize) -> CliResult<DMatrix<f64>> {
    match path {
        Some(p) => read_matrix_market(p),
        None => Ok(DMatrix::identity(n, n)),
    }
}

pub fn load_system(cfg: &RunConfig) -> CliResult<NetworkSystem> {
    let tol = &cfg.tolerances;
    let (graph, grounding) = match &cfg.source {
        Source::Edges(p) => {
            let g = read_edge_list(p, cfg.vertices)?;
            let n = g.vertex_count();
            (g, nalgebra::DVector::zeros(n))
        }
        Source::Laplacian(p) => {
            let l = read_matrix_market(p)?;
            if l.nrows() == 0 || l.nrows() != l.ncols() {
                return Err(CliError::parse(
                    p,
                    1,
                    format!(
                        "Laplacian must be square and nonempty, got {}x{}",
                        l.nrows(),
                        l.ncols()
                    ),
                ));
            }
            if cfg.allow_grounding {
                DiGraph::from_matrix(&l)?
            } else {
                let n = l.nrows();
                (
                    DiGraph::from_laplacian(&l, ROW_SUM_TOL)?,
                    nalgebra::DVector::zeros(n),
                )
            }
        }
    };
    let n = graph.vertex_count();
    let f = read_or_identity(cfg.input.as_ref(), n)?;
    let h = read_or_identity(cfg.output.as_ref(), n)?;
    Ok(NetworkSystem::with_grounding(graph, grounding, f, h, tol)?)
}

#[derive(Serialize)]
struct AnalysisReport {
    vertices: usize,
    edges: usize,
    connectedness: &'static str,
    components: Vec<Vec<usize>>,
    leading_components: Vec<Vec<usize>>,
    consensus_dimension: usize,
    clusterable_classes: Vec<Vec<usize>>,
    minimum_order: usize,
    semistable: bool,
    grounded: bool,
    controllable: bool,
    observable: bool,
    in_h2: bool,
    h2_norm: Option<f64>,
    balancing_weights: Vec<f64>,
    tolerances: netred::Tolerances,
}

pub fn analyze(cfg: &RunConfig) -> CliResult<Artifacts> {
    let sys = load_system(cfg)?;
    let tol = &cfg.tolerances;
    let a = pipeline::analyze(&sys, tol)?;
    let report = AnalysisReport {
        vertices: sys.n(),
        edges: sys.graph.edges().len(),
        connectedness: a.connectedness.as_str(),
        components: one_based_all(&a.components),
        leading_components: one_based_all(&a.leading),
        consensus_dimension: a.consensus_dimension,
        clusterable_classes: one_based_all(&a.classes.classes),
        minimum_order: a.classes.count(),
        semistable: true,
        grounded: a.grounded,
        controllable: a.controllable,
        observable: a.observable,
        in_h2: a.h2_norm.is_some(),
        h2_norm: a.h2_norm,
        balancing_weights: a.weights.clone(),
        tolerances: *tol,
    };
    let json = to_json(&report);
    let mut art = Artifacts {
        stdout: json.clone(),
        files: Vec::new(),
    };
    if cfg.out.is_some() {
        art.add("analysis.json", json);
    }
    if cfg.export_gramians {
        if cfg.out.is_none() {
            return Err(CliError::Usage("--export-gramians needs --out".into()));
        }
        let dec = sys.decompose(tol)?;
        let g = pseudo_gramians(&dec, &sys.input, &sys.output)?;
        art.add("controllability_gramian.mtx", matrix_market_array(&g.p));
        art.add("observability_gramian.mtx", matrix_market_array(&g.q));
        let w = DMatrix::from_diagonal(&sys.balanced.weights);
        art.add("balancing_weights.mtx", matrix_market_coordinate(&w));
    }
    Ok(art)
}

#[derive(Serialize)]
struct MergeLog {
    kind: netred::reduction::ZeroKind,
    groups: Vec<Vec<usize>>,
    pairs: Vec<PairLog>,
}

#[derive(Serialize)]
struct PairLog {
    i: usize,
    j: usize,
    beta: f64,
}

#[derive(Serialize)]
struct MinrealLog {
    changed: bool,
    summary: String,
    original_order: usize,
    order: usize,
    removed_unreachable: Vec<usize>,
    removed_undetectable: Vec<usize>,
    merges: Vec<MergeLog>,
    members: Vec<Vec<usize>>,
    error: ErrorReport,
}

fn merge_log(m: &MergeRecord) -> MergeLog {
    MergeLog {
        kind: m.kind,
        groups: one_based_all(&m.groups),
        pairs: m
            .pairs
            .iter()
            .map(|p| PairLog {
                i: p.i + 1,
                j: p.j + 1,
                beta: p.beta,
            })
            .collect(),
    }
}

fn minreal_log(sys: &NetworkSystem, min: &MinimalRealization, error: ErrorReport) -> MinrealLog {
    let summary = if min.changed() {
        format!(
            "removed {} unreachable and {} undetectable vertices; {} merge rounds; order {} -> {}",
            min.removed_unreachable.len(),
            min.removed_undetectable.len(),
            min.merges.len(),
            sys.n(),
            min.system.n()
        )
    } else {
        "no changes".to_string()
    };
    MinrealLog {
        changed: min.changed(),
        summary,
        original_order: sys.n(),
        order: min.system.n(),
        removed_unreachable: one_based(&min.removed_unreachable),
        removed_undetectable: one_based(&min.removed_undetectable),
        merges: min.merges.iter().map(merge_log).collect(),
        members: one_based_all(&min.members),
        error,
    }
}

fn add_model(art: &mut Artifacts, l: &DMatrix<f64>, f: &DMatrix<f64>, h: &DMatrix<f64>) {
    art.add(REDUCED_LAPLACIAN, matrix_market_coordinate(l));
    art.add(REDUCED_INPUT, matrix_market_coordinate(f));
    art.add(REDUCED_OUTPUT, matrix_market_coordinate(h));
}

pub fn minreal(cfg: &RunConfig) -> CliResult<Artifacts> {
    require_out(cfg)?;
    let sys = load_system(cfg)?;
    let tol = &cfg.tolerances;
    let min = minimal_network_realization(&sys, cfg.coverage, tol)?;
    let error = h2_distance(&sys, &min.system, tol)?;
    let log = minreal_log(&sys, &min, error.clone());
    let mut art = Artifacts {
        stdout: to_json(&log),
        files: Vec::new(),
    };
    add_model(
        &mut art,
        &min.system.laplacian,
        &min.system.input,
        &min.system.output,
    );
    art.add("minreal.json", to_json(&log));
    art.add("error_report.json", to_json(&error));
    Ok(art)
}

fn require_out(cfg: &RunConfig) -> CliResult<()> {
    match cfg.out {
        Some(_) => Ok(()),
        None => Err(CliError::Usage("--out is required".into())),
    }
}

fn clustering_from_file(path: &Path, file: &ClusteringFile, n: usize) -> CliResult<Clustering> {
    if !file.removed.is_empty() {
        return Err(CliError::Config(format!(
            "{} lists removed vertices; a clustering of every vertex is required",
            path.display()
        )));
    }
    let cells = file
        .cells
        .iter()
        .map(|c| c.iter().map(|v| v - 1).collect())
        .collect();
    Ok(Clustering::from_cells(n, cells)?)
}

pub fn reduce(cfg: &RunConfig) -> CliResult<Artifacts> {
    require_out(cfg)?;
    let sys = load_system(cfg)?;
    let n = sys.n();
    let supplied = match &cfg.clustering {
        Some(p) => Some(clustering_from_file(p, &read_clustering(p)?, n)?),
        None => None,
    };
    let order = match (cfg.order, &supplied) {
        (Some(r), Some(c)) if r != c.order() => {
            return Err(CliError::Usage(format!(
                "--order {r} conflicts with the {} cells of the supplied clustering",
                c.order()
            )))
        }
        (Some(r), _) => r,
        (None, Some(c)) => c.order(),
        (None, None) => return Err(CliError::Usage("--order is required".into())),
    };
    let opts = ReductionOptions {
        order,
        strategy: cfg.strategy.clone(),
        error_method: cfg.error_method.clone(),
        coverage: cfg.coverage,
        minimal_realization: !cfg.skip_minreal,
        force: cfg.force,
        seed: cfg.seed,
        tolerances: cfg.tolerances,
    };
    let out = pipeline::reduce(&sys, &opts, supplied)?;

    let members: Vec<Vec<usize>> = match &out.minimal {
        Some(m) => m.members.clone(),
        None => (0..n).map(|v| vec![v]).collect(),
    };
    let cells: Vec<Vec<usize>> = out
        .reduced
        .clustering
        .cells()
        .iter()
        .map(|c| {
            let mut cell: Vec<usize> = c.iter().flat_map(|&v| members[v].iter().copied()).collect();
            cell.sort_unstable();
            cell
        })
        .collect();
    let mut removed: Vec<usize> = out
        .minimal
        .as_ref()
        .map(|m| {
            m.removed_unreachable
                .iter()
                .chain(&m.removed_undetectable)
                .copied()
                .collect()
        })
        .unwrap_or_default();
    removed.sort_unstable();
    let mut cell_of = vec![None; n];
    for (k, c) in cells.iter().enumerate() {
        for &v in c {
            cell_of[v] = Some(k);
        }
    }
    let clustering = ClusteringFile {
        order: Some(cells.len()),
        cells: one_based_all(&cells),
        removed: one_based(&removed),
    };
    let labels: Vec<String> = members
        .iter()
        .map(|m| {
            m.iter()
                .map(|v| (v + 1).to_string())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();

    let red = &out.reduced;
    let mut art = Artifacts {
        stdout: to_json(&out.report),
        files: Vec::new(),
    };
    add_model(&mut art, &red.laplacian, &red.input, &red.output);
    art.add("clustering.json", to_json(&clustering));
    art.add(
        "dissimilarity.csv",
        dissimilarity_csv(&out.dissimilarity, &labels),
    );
    art.add(
        "original.dot",
        dot::render("original", &sys.graph, &cell_of),
    );
    let (rgraph, _) = DiGraph::from_matrix(&red.laplacian)?;
    let rcells: Vec<Option<usize>> = (0..red.order()).map(Some).collect();
    art.add("reduced.dot", dot::render("reduced", &rgraph, &rcells));
    art.add("error_report.json", to_json(&out.report));
    if let Some(m) = &out.minimal {
        let error = h2_distance(&sys, &m.system, &cfg.tolerances)?;
        art.add("minreal.json", to_json(&minreal_log(&sys, m, error)));
    }
    Ok(art)
}

fn load_reduced(dir: &Path, tol: &netred::Tolerances) -> CliResult<NetworkSystem> {
    let l = read_matrix_market(&dir.join(REDUCED_LAPLACIAN))?;
    let f = read_matrix_market(&dir.join(REDUCED_INPUT))?;
    let h = read_matrix_market(&dir.join(REDUCED_OUTPUT))?;
    Ok(NetworkSystem::from_matrix(&l, f, h, tol)?)
}

pub fn error(cfg: &RunConfig) -> CliResult<Artifacts> {
    let sys = load_system(cfg)?;
    let tol = &cfg.tolerances;
    let report = match (&cfg.reduced, &cfg.clustering) {
        (Some(dir), None) => h2_distance(&sys, &load_reduced(dir, tol)?, tol)?,
        (None, Some(p)) => {
            let clustering = clustering_from_file(p, &read_clustering(p)?, sys.n())?;
            let reference = ReferenceModel::new(sys, tol)?;
            let classes = clusterability_classes(&reference.system, &reference.dec, tol);
            let reduced = project(&reference.system, &clustering, &classes, cfg.force)?;
            error_methods()
                .get(&cfg.error_method)?
                .evaluate(&reference, &reduced)?
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --reduced and --clustering".into(),
            ))
        }
    };
    let json = to_json(&report);
    let mut art = Artifacts {
        stdout: json.clone(),
        files: Vec::new(),
    };
    if cfg.out.is_some() {
        art.add("error_report.json", json);
    }
    Ok(art)
}

pub fn export_dot(cfg: &RunConfig) -> CliResult<Artifacts> {
    let (name, graph, cell_of) = match &cfg.reduced {
        Some(dir) => {
            let sys = load_reduced(dir, &cfg.tolerances)?;
            let cells = (0..sys.n()).map(Some).collect();
            ("reduced", sys.graph, cells)
        }
        None => {
            let sys = load_system(cfg)?;
            let n = sys.n();
            let cells = match &cfg.clustering {
                Some(p) => {
                    let file = read_clustering(p)?;
                    let mut cell_of = vec![None; n];
                    for (k, c) in file.cells.iter().enumerate() {
                        for &v in c {
                            if v > n {
                                return Err(CliError::parse(
                                    p,
                                    1,
                                    format!("vertex {v} exceeds the {n} network vertices"),
                                ));
                            }
                            cell_of[v - 1] = Some(k);
                        }
                    }
                    cell_of
                }
                None => vec![None; n],
            };
            ("network", sys.graph, cells)
        }
    };
    let text = dot::render(name, &graph, &cell_of);
    let mut art = Artifacts {
        stdout: String::new(),
        files: Vec::new(),
    };
    if cfg.out.is_some() {
        art.add(&format!("{name}.dot"), text);
    } else {
        art.stdout = text;
    }
    Ok(art)
}
