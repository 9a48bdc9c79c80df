use rayon::prelude::*;
use rayon::ThreadPool;

use super::process::{assemble, cheapest_chain};
use super::{
    build_process_graph, find_candidates, leg_weight, solve_process_graph, split_into_bases, Base, CandidateSet,
    EvParams, PgEdge, PgNode, ProcessGraph, RouteSolution,
};
use crate::error::{LoadError, PlanError, Stage};
use crate::graph::{nearest_node, NodeId, NodeLocator, RoadGraph};
use crate::io::stations::{StationRecord, StationSet};
use crate::shortest_path::{astar, PathResult, ShortestPathTree};
use crate::spatial::Bounds;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouterOptions {
    /// Station lattice cell size in kilometers.
    pub grid_km: f64,
    pub grid_bounds: Bounds,
    /// Worker threads for the pairwise search batch; 0 uses every core.
    pub threads: usize,
    /// Largest station count the exact oracle accepts.
    pub oracle_limit: usize,
}

impl Default for RouterOptions {
    fn default() -> Self {
        RouterOptions {
            grid_km: 10.0,
            grid_bounds: Bounds::WORLD,
            threads: 0,
            oracle_limit: 100,
        }
    }
}

/// Intermediate products of one planning run.
#[derive(Debug, Clone)]
pub struct PlanTrace {
    pub source: NodeId,
    pub target: NodeId,
    pub initial_path: PathResult,
    pub bases: Vec<Base>,
    pub candidates: Vec<CandidateSet>,
    pub process_graph: ProcessGraph,
    pub solution: RouteSolution,
}

/// Road graph, snapped stations and a worker pool, ready to plan trips.
pub struct EvRouter {
    graph: RoadGraph,
    locator: NodeLocator,
    stations: StationSet,
    pool: ThreadPool,
    oracle_limit: usize,
}

impl EvRouter {
    pub fn new(graph: RoadGraph, stations: &[StationRecord], options: RouterOptions) -> Result<Self, LoadError> {
        let locator = NodeLocator::new(&graph);
        let stations = StationSet::new(&graph, &locator, stations, options.grid_km, options.grid_bounds)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .map_err(|e| LoadError::ThreadPool(e.to_string()))?;
        Ok(EvRouter {
            graph,
            locator,
            stations,
            pool,
            oracle_limit: options.oracle_limit,
        })
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn stations(&self) -> &StationSet {
        &self.stations
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn snap(&self, lon: f64, lat: f64) -> NodeId {
        nearest_node(&self.graph, &self.locator, lon, lat)
    }

    fn snap_checked(&self, (lon, lat): (f64, f64)) -> Result<NodeId, PlanError> {
        if !Bounds::WORLD.contains(lon, lat) {
            return Err(PlanError::InvalidParams(format!(
                "({lon}, {lat}) is not a lon/lat position"
            )));
        }
        Ok(self.snap(lon, lat))
    }

    /// Optimal charging-stop route between two `(lon, lat)` positions.
    pub fn plan_route(
        &self,
        source: (f64, f64),
        target: (f64, f64),
        params: &EvParams,
    ) -> Result<RouteSolution, PlanError> {
        self.plan_traced(source, target, params).map(|t| t.solution)
    }

    pub fn plan_traced(
        &self,
        source: (f64, f64),
        target: (f64, f64),
        params: &EvParams,
    ) -> Result<PlanTrace, PlanError> {
        let (s, t) = (self.snap_checked(source)?, self.snap_checked(target)?);
        self.plan_nodes(s, t, params)
    }

    pub fn plan_nodes(&self, source: NodeId, target: NodeId, params: &EvParams) -> Result<PlanTrace, PlanError> {
        let path = astar(&self.graph, source, target).map_err(|e| PlanError::from_path(e, Stage::InitialPath))?;
        let bases = split_into_bases(&path, params)?;
        let (candidates, process_graph) = if bases.is_empty() {
            (Vec::new(), ProcessGraph::direct(&path, params)?)
        } else {
            let candidates = bases
                .iter()
                .map(|b| find_candidates(b, params, &self.graph, &self.stations))
                .collect::<Result<Vec<_>, _>>()?;
            let pg = build_process_graph(source, target, &candidates, params, &self.graph, &self.pool)?;
            (candidates, pg)
        };
        let solution = solve_process_graph(&process_graph)?;
        Ok(PlanTrace {
            source,
            target,
            initial_path: path,
            bases,
            candidates,
            process_graph,
            solution,
        })
    }

    /// True optimum over every station, for verification on small instances.
    ///
    /// Runs a full Dijkstra from the source and from every station, keeps the
    /// pairs within capacity as edges of a complete feasibility graph and
    /// solves that graph exactly.
    pub fn exact_oracle(
        &self,
        source: (f64, f64),
        target: (f64, f64),
        params: &EvParams,
    ) -> Result<RouteSolution, PlanError> {
        let (s, t) = (self.snap_checked(source)?, self.snap_checked(target)?);
        self.exact_oracle_nodes(s, t, params)
    }

    pub fn exact_oracle_nodes(
        &self,
        source: NodeId,
        target: NodeId,
        params: &EvParams,
    ) -> Result<RouteSolution, PlanError> {
        let count = self.stations.len();
        if count > self.oracle_limit {
            return Err(PlanError::OracleLimit {
                count,
                limit: self.oracle_limit,
            });
        }
        let mut nodes = vec![PgNode {
            column: 0,
            road_node: source,
            station_id: None,
        }];
        nodes.extend(self.stations.stations().iter().map(|s| PgNode {
            column: 1,
            road_node: s.node,
            station_id: Some(s.station_id),
        }));
        nodes.push(PgNode {
            column: 2,
            road_node: target,
            station_id: None,
        });
        let target_ix = nodes.len() - 1;

        let origins: Vec<NodeId> = nodes[..target_ix].iter().map(|n| n.road_node).collect();
        let trees: Vec<ShortestPathTree> = self
            .pool
            .install(|| {
                origins
                    .par_iter()
                    .map(|&o| ShortestPathTree::build(&self.graph, o))
                    .collect::<Result<_, _>>()
            })
            .map_err(|e| PlanError::from_path(e, Stage::Oracle))?;

        let q = params.capacity();
        let mut edges = Vec::new();
        for (i, tree) in trees.iter().enumerate() {
            for (j, node) in nodes.iter().enumerate().skip(1) {
                if j == i {
                    continue;
                }
                let raw = tree.dist[node.road_node as usize];
                if raw <= q {
                    edges.push(PgEdge {
                        from: i,
                        to: j,
                        raw_cost: raw,
                        weight: leg_weight(raw, params, j != target_ix)?,
                        road_path: Vec::new(),
                    });
                }
            }
        }
        let chain = cheapest_chain(nodes.len(), &edges, 0, target_ix)
            .ok_or(PlanError::InfeasibleTrip { stage: Stage::Oracle })?;
        for &i in &chain {
            let e = &mut edges[i];
            let path = trees[e.from]
                .path_to(nodes[e.to].road_node)
                .expect("edge exists only for reachable pairs");
            e.road_path = path.nodes;
        }
        Ok(assemble(&nodes, &edges, &chain))
    }
}
