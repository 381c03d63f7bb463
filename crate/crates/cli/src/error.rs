use std::path::{Path, PathBuf};

use netred::NetError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error("{}", one_based_message(.0))]
    Net(#[from] NetError),
}

/// Library message with vertex ids shifted to the 1-based ids of the files.
pub fn one_based_message(e: &NetError) -> String {
    match e {
        NetError::VertexOutOfRange { vertex, n } => {
            format!(
                "vertex {} is out of range for a graph with {n} vertices",
                vertex + 1
            )
        }
        NetError::SelfLoop { vertex } => format!("self-loop at vertex {}", vertex + 1),
        NetError::InvalidWeight {
            source_vertex,
            target,
            weight,
        } => format!(
            "edge {} -> {} has non-positive or non-finite weight {weight}",
            source_vertex + 1,
            target + 1
        ),
        NetError::DuplicateEdge {
            source_vertex,
            target,
        } => format!("duplicate edge {} -> {}", source_vertex + 1, target + 1),
        NetError::ImproperClustering { i, j } => format!(
            "clustering is improper: vertices {} and {} share a cell but are not clusterable",
            i + 1,
            j + 1
        ),
        NetError::ZeroDissimilarityPresent { i, j } => format!(
            "clusterable vertices {} and {} have zero dissimilarity",
            i + 1,
            j + 1
        ),
        other => other.to_string(),
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn parse(file: &Path, line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            file: file.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Io { .. } => "IoError",
            CliError::Config(_) => "ConfigError",
            CliError::Usage(_) => "UsageError",
            CliError::Net(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
            }
        });
        let detail = &mut v["error"];
        match self {
            CliError::Parse { file, line, .. } => {
                detail["file"] = json!(file.display().to_string());
                detail["line"] = json!(line);
            }
            CliError::Io { path, .. } => {
                detail["file"] = json!(path.display().to_string());
            }
            CliError::Net(NetError::OrderTooSmall { requested, minimum }) => {
                detail["requested"] = json!(requested);
                detail["minimum"] = json!(minimum);
            }
            CliError::Net(NetError::ImproperClustering { i, j }) => {
                detail["vertices"] = json!([i + 1, j + 1]);
            }
            _ => {}
        }
        v
    }
}
