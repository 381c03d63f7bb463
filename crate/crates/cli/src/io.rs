use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use netred::graph::{DiGraph, Edge};
use netred::reduction::Dissimilarity;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Lossless float text: the shortest decimal that parses back to the same
/// bits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 {
        "0".into()
    } else if (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_num<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    tok: &str,
    what: &str,
) -> CliResult<T> {
    tok.parse()
        .map_err(|_| CliError::parse(path, line, format!("cannot parse {what} '{tok}'")))
}

/// Reads a real Matrix Market file in coordinate or array layout.
pub fn read_matrix_market(path: &Path) -> CliResult<DMatrix<f64>> {
    let text = read(path)?;
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| CliError::parse(path, 1, "empty file"))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(CliError::parse(
            path,
            hline,
            "missing '%%MatrixMarket matrix' header",
        ));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => {
            return Err(CliError::parse(
                path,
                hline,
                format!("unsupported layout '{other}'"),
            ))
        }
    };
    if !matches!(fields[3].as_str(), "real" | "integer" | "double") {
        return Err(CliError::parse(
            path,
            hline,
            format!("unsupported field '{}', expected real", fields[3]),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(CliError::parse(
                path,
                hline,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };
    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = data
        .next()
        .ok_or_else(|| CliError::parse(path, hline + 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let expected = if coordinate { 3 } else { 2 };
    if dims.len() != expected {
        return Err(CliError::parse(
            path,
            sline,
            format!("size line needs {expected} integers"),
        ));
    }
    let rows: usize = parse_num(path, sline, dims[0], "row count")?;
    let cols: usize = parse_num(path, sline, dims[1], "column count")?;
    let mut m = DMatrix::zeros(rows, cols);
    if coordinate {
        let nnz: usize = parse_num(path, sline, dims[2], "entry count")?;
        let mut seen = 0;
        for (ln, l) in data {
            let tok: Vec<&str> = l.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(CliError::parse(
                    path,
                    ln,
                    "entry needs row, column and value",
                ));
            }
            let i: usize = parse_num(path, ln, tok[0], "row index")?;
            let j: usize = parse_num(path, ln, tok[1], "column index")?;
            let v: f64 = parse_num(path, ln, tok[2], "value")?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(CliError::parse(
                    path,
                    ln,
                    format!("index ({i},{j}) out of range"),
                ));
            }
            m[(i - 1, j - 1)] += v;
            if symmetric && i != j {
                m[(j - 1, i - 1)] += v;
            }
            seen += 1;
        }
        if seen != nnz {
            return Err(CliError::parse(
                path,
                sline,
                format!("declared {nnz} entries, found {seen}"),
            ));
        }
    } else {
        let mut values = Vec::new();
        let mut last = sline;
        for (ln, l) in data {
            last = ln;
            for tok in l.split_whitespace() {
                values.push(parse_num::<f64>(path, ln, tok, "value")?);
            }
        }
        let need = if symmetric {
            rows * (rows + 1) / 2
        } else {
            rows * cols
        };
        if values.len() != need {
            return Err(CliError::parse(
                path,
                last,
                format!("expected {need} values, found {}", values.len()),
            ));
        }
        let mut it = values.into_iter();
        for j in 0..cols {
            let start = if symmetric { j } else { 0 };
            for i in start..rows {
                let v = it.next().unwrap_or(0.0);
                m[(i, j)] = v;
                if symmetric {
                    m[(j, i)] = v;
                }
            }
        }
    }
    Ok(m)
}

/// Coordinate layout with every nonzero entry.
pub fn matrix_market_coordinate(m: &DMatrix<f64>) -> String {
    let mut entries = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != 0.0 {
                entries.push((i, j, m[(i, j)]));
            }
        }
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", m.nrows(), m.ncols(), entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, fmt_f64(v));
    }
    s
}

/// Dense column-major layout.
pub fn matrix_market_array(m: &DMatrix<f64>) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", m.nrows(), m.ncols());
    for v in m.iter() {
        let _ = writeln!(s, "{}", fmt_f64(*v));
    }
    s
}

#[derive(Debug, Deserialize)]
struct EdgeRow {
    src: usize,
    dst: usize,
    weight: f64,
}

/// Reads a `src,dst,weight` edge list with 1-based vertex ids. The vertex
/// count is the largest id unless `vertices` is given.
pub fn read_edge_list(path: &Path, vertices: Option<usize>) -> CliResult<DiGraph> {
    let text = read(path)?;
    if text.trim().is_empty() {
        return Err(CliError::parse(path, 1, "empty file"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::parse(path, 1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["src", "dst", "weight"] {
        return Err(CliError::parse(path, 1, "header must be 'src,dst,weight'"));
    }
    let mut edges = Vec::new();
    let mut max_id = 0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            CliError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row: EdgeRow = rec
            .deserialize(Some(&headers))
            .map_err(|e| CliError::parse(path, line, e.to_string()))?;
        if row.src == 0 || row.dst == 0 {
            return Err(CliError::parse(path, line, "vertex ids are 1-based"));
        }
        max_id = max_id.max(row.src).max(row.dst);
        edges.push((line, Edge::new(row.src - 1, row.dst - 1, row.weight)));
    }
    if edges.is_empty() {
        return Err(CliError::parse(path, 2, "no edges"));
    }
    let n = match vertices {
        Some(n) if n < max_id => {
            return Err(CliError::Config(format!(
                "vertex count {n} is below the largest id {max_id} in {}",
                path.display()
            )))
        }
        Some(n) => n,
        None => max_id,
    };
    DiGraph::new(n, edges.iter().map(|(_, e)| *e)).map_err(|e| {
        let line = match &e {
            netred::NetError::SelfLoop { vertex } => edges
                .iter()
                .find(|(_, x)| x.source == *vertex && x.target == *vertex)
                .map(|(l, _)| *l),
            netred::NetError::InvalidWeight {
                source_vertex,
                target,
                ..
            } => edges
                .iter()
                .find(|(_, x)| x.source == *source_vertex && x.target == *target)
                .map(|(l, _)| *l),
            netred::NetError::DuplicateEdge {
                source_vertex,
                target,
            } => edges
                .iter()
                .filter(|(_, x)| x.source == *source_vertex && x.target == *target)
                .nth(1)
                .map(|(l, _)| *l),
            _ => None,
        };
        match line {
            Some(l) => CliError::parse(path, l, crate::error::one_based_message(&e)),
            None => CliError::Net(e),
        }
    })
}

/// Partition file contents; vertex ids are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringFile {
    #[serde(default)]
    pub order: Option<usize>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed: Vec<usize>,
}

pub fn read_clustering(path: &Path) -> CliResult<ClusteringFile> {
    let text = read(path)?;
    let file: ClusteringFile =
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line(), e.to_string()))?;
    if let Some(order) = file.order {
        if order != file.cells.len() {
            return Err(CliError::parse(
                path,
                1,
                format!("order {order} does not match {} cells", file.cells.len()),
            ));
        }
    }
    if file.cells.iter().flatten().any(|&v| v == 0) {
        return Err(CliError::parse(path, 1, "vertex ids are 1-based"));
    }
    Ok(file)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Long-format pair table; `inf` marks pairs that may not share a cell.
pub fn dissimilarity_csv(d: &Dissimilarity, labels: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let _ = w.write_record(["vertex_i", "vertex_j", "input", "output", "combined"]);
    let cell = |v: Option<f64>| fmt_f64(v.unwrap_or(f64::INFINITY));
    for i in 0..d.n() {
        for j in (i + 1)..d.n() {
            let _ = w.write_record([
                labels[i].clone(),
                labels[j].clone(),
                cell(d.input_value(i, j)),
                cell(d.output_value(i, j)),
                cell(d.value(i, j)),
            ]);
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}
