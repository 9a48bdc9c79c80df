//! Electric-vehicle trip planning over road networks.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`] loads road tiles into an immutable forward-star [`RoadGraph`]
//!   and snaps coordinates to graph nodes.
//! * [`spatial`] is a uniform lon/lat lattice with doubly-linked item chains
//!   ([`SpatialBinIndex`]).
//! * [`shortest_path`] holds the Dijkstra kernels: A*, radius-bounded
//!   multi-target search backed by sparse maps, and isochrones.
//! * [`ev`] is the charging-stop optimizer: bases, candidate stations,
//!   the process graph and its final solve.
//! * [`io`] covers station tables, solution tables and the synthetic
//!   network generator.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

pub mod error;
pub mod ev;
pub mod geo;
pub mod graph;
pub mod io;
pub mod shortest_path;
pub mod spatial;

pub use error::{GraphError, IndexError, LoadError, PathError, PlanError, Stage};
pub use ev::{
    adjust_cost, build_process_graph, find_candidates, solve_process_graph, split_into_bases, Base, Candidate,
    CandidateSet, EvParams, EvRouter, Leg, PlanTrace, ProcessGraph, RouteSolution, RouterOptions,
};
pub use graph::{load_tiles, nearest_node, GraphEdge, GraphNode, NodeId, RoadGraph};
pub use io::stations::{Station, StationRecord, StationSet};
pub use shortest_path::{astar, bounded_dijkstra, isochrone, BoundedPaths, PathResult, ReachResult};
pub use spatial::{Bounds, SpatialBinIndex};
