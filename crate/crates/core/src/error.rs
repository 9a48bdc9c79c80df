use std::fmt;
use std::path::PathBuf;

use crate::graph::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, record {record}: {message}")]
    Record {
        path: PathBuf,
        record: u64,
        message: String,
    },
    #[error("no road records in input")]
    Empty,
    #[error("node {node} out of range (graph has {count} nodes)")]
    NodeOutOfRange { node: NodeId, count: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("bad graph snapshot: {0}")]
    Snapshot(String),
}

/// Station table and router setup failures.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, record {record}: {message}")]
    Record {
        path: PathBuf,
        record: u64,
        message: String,
    },
    #[error("duplicate station id {0}")]
    DuplicateStation(i64),
    #[error("station {id} at ({lon}, {lat}) has invalid coordinates")]
    StationCoordinates { id: i64, lon: f64, lat: f64 },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IndexError {
    #[error("cell size must be positive, got {0} km")]
    NonPositiveCellSize(f64),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("({lon}, {lat}) is outside the index bounds")]
    OutOfBounds { lon: f64, lat: f64 },
    #[error("item {0} is already indexed")]
    DuplicateItem(usize),
    #[error("item {0} is not indexed")]
    MissingItem(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("no path from node {source_node} to node {target}")]
    NoPath { source_node: NodeId, target: NodeId },
    #[error("node {node} out of range (graph has {count} nodes)")]
    NodeOutOfRange { node: NodeId, count: usize },
}

/// Pipeline stage that produced a [`PlanError`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Snap,
    InitialPath,
    Split,
    Candidates,
    ProcessGraph,
    Solve,
    Oracle,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Snap => "snap",
            Stage::InitialPath => "initial shortest path",
            Stage::Split => "base split",
            Stage::Candidates => "candidate search",
            Stage::ProcessGraph => "process graph",
            Stage::Solve => "process graph solve",
            Stage::Oracle => "exact oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("[{stage}] no path from node {source_node} to node {target}")]
    NoPath {
        stage: Stage,
        source_node: NodeId,
        target: NodeId,
    },
    #[error(
        "[{}] no charging station reachable within capacity of base {base} (node {node})",
        Stage::Candidates
    )]
    NoStationReachable { base: usize, node: NodeId },
    #[error("[{stage}] trip is infeasible: no sequence of stops keeps every leg within capacity")]
    InfeasibleTrip { stage: Stage },
    #[error(
        "[{}] edge of {weight} s straddles the base threshold {threshold} s; graph too coarse for this capacity",
        Stage::Split
    )]
    CoarseGraph { weight: f64, threshold: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("[{stage}] contract violation: {message}")]
    Contract { stage: Stage, message: String },
    #[error("[{}] {count} stations exceed the oracle limit of {limit}", Stage::Oracle)]
    OracleLimit { count: usize, limit: usize },
}

impl PlanError {
    /// Failing pipeline stage; `None` for parameter errors raised before planning starts.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            PlanError::NoPath { stage, .. }
            | PlanError::InfeasibleTrip { stage }
            | PlanError::Contract { stage, .. } => Some(*stage),
            PlanError::NoStationReachable { .. } => Some(Stage::Candidates),
            PlanError::CoarseGraph { .. } => Some(Stage::Split),
            PlanError::InvalidParams(_) => None,
            PlanError::OracleLimit { .. } => Some(Stage::Oracle),
        }
    }

    pub(crate) fn from_path(err: PathError, stage: Stage) -> Self {
        match err {
            PathError::NoPath { source_node, target } => PlanError::NoPath {
                stage,
                source_node,
                target,
            },
            PathError::NodeOutOfRange { node, count } => PlanError::Contract {
                stage,
                message: format!("node {node} out of range (graph has {count} nodes)"),
            },
        }
    }
}
