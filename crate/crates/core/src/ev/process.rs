use std::collections::BinaryHeap;
use std::ops::Range;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::{leg_weight, CandidateSet, EvParams, Leg, RouteSolution};
use crate::error::{PlanError, Stage};
use crate::graph::{NodeId, RoadGraph};
use crate::shortest_path::{bounded_dijkstra, Entry, PathResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgNode {
    pub column: usize,
    pub road_node: NodeId,
    /// Station id for candidate columns, `None` for the trip endpoints.
    pub station_id: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgEdge {
    pub from: usize,
    pub to: usize,
    pub raw_cost: f64,
    /// Penalty-adjusted weight (no penalty on edges into the target).
    pub weight: f64,
    pub road_path: Vec<NodeId>,
}

/// Layered graph: source column, one column of candidates per base, target column.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessGraph {
    pub nodes: Vec<PgNode>,
    pub columns: Vec<Range<usize>>,
    pub edges: Vec<PgEdge>,
    /// Column pairs with no path within capacity.
    pub skipped: usize,
}

impl ProcessGraph {
    pub fn source(&self) -> usize {
        0
    }

    pub fn target(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of base columns (excluding the endpoint columns).
    pub fn base_columns(&self) -> usize {
        self.columns.len() - 2
    }

    /// Single-edge graph for trips that need no recharge.
    pub fn direct(path: &PathResult, params: &EvParams) -> Result<Self, PlanError> {
        let weight = leg_weight(path.cost, params, false)?;
        Ok(ProcessGraph {
            nodes: vec![
                PgNode {
                    column: 0,
                    road_node: path.source(),
                    station_id: None,
                },
                PgNode {
                    column: 1,
                    road_node: path.target(),
                    station_id: None,
                },
            ],
            columns: vec![0..1, 1..2],
            edges: vec![PgEdge {
                from: 0,
                to: 1,
                raw_cost: path.cost,
                weight,
                road_path: path.nodes.clone(),
            }],
            skipped: 0,
        })
    }
}

/// Connects every node of each column to every node of the next with a
/// bounded Dijkstra of radius `Q`; pairs with no path within capacity get no
/// edge. One search runs per left-hand node and the searches execute on
/// `pool`; results land in per-task slots, so the graph does not depend on
/// the thread count.
pub fn build_process_graph(
    source: NodeId,
    target: NodeId,
    candidate_sets: &[CandidateSet],
    params: &EvParams,
    graph: &RoadGraph,
    pool: &ThreadPool,
) -> Result<ProcessGraph, PlanError> {
    let mut nodes = vec![PgNode {
        column: 0,
        road_node: source,
        station_id: None,
    }];
    let mut columns = Vec::with_capacity(candidate_sets.len() + 2);
    columns.push(0..1);
    for (k, set) in candidate_sets.iter().enumerate() {
        if set.candidates.is_empty() {
            return Err(PlanError::Contract {
                stage: Stage::ProcessGraph,
                message: format!("candidate column {k} is empty"),
            });
        }
        let start = nodes.len();
        nodes.extend(set.candidates.iter().map(|c| PgNode {
            column: k + 1,
            road_node: c.node,
            station_id: Some(c.station_id),
        }));
        columns.push(start..nodes.len());
    }
    let last = columns.len();
    nodes.push(PgNode {
        column: last,
        road_node: target,
        station_id: None,
    });
    columns.push(nodes.len() - 1..nodes.len());

    let targets: Vec<Vec<NodeId>> = columns
        .iter()
        .map(|c| nodes[c.clone()].iter().map(|n| n.road_node).collect())
        .collect();
    let tasks: Vec<usize> = (0..nodes.len() - 1).collect();
    let radius = params.capacity();
    let searches: Vec<_> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&u| {
                let next = nodes[u].column + 1;
                bounded_dijkstra(graph, nodes[u].road_node, &targets[next], radius)
            })
            .collect()
    });

    let mut edges = Vec::new();
    let mut skipped = 0;
    for (&u, found) in tasks.iter().zip(searches) {
        let next = nodes[u].column + 1;
        let into_target = next == last;
        for v in columns[next].clone() {
            match found.paths.get(&nodes[v].road_node) {
                Some(path) => edges.push(PgEdge {
                    from: u,
                    to: v,
                    raw_cost: path.cost,
                    weight: leg_weight(path.cost, params, !into_target)?,
                    road_path: path.nodes.clone(),
                }),
                None => skipped += 1,
            }
        }
    }
    Ok(ProcessGraph {
        nodes,
        columns,
        edges,
        skipped,
    })
}

/// Minimum-weight source-to-target path of the process graph, with the road
/// paths of its edges stitched into one route.
pub fn solve_process_graph(pg: &ProcessGraph) -> Result<RouteSolution, PlanError> {
    let chain = cheapest_chain(pg.nodes.len(), &pg.edges, pg.source(), pg.target())
        .ok_or(PlanError::InfeasibleTrip { stage: Stage::Solve })?;
    Ok(assemble(&pg.nodes, &pg.edges, &chain))
}

/// Edge indices of the cheapest path, by Dijkstra over an arbitrary edge list.
pub(crate) fn cheapest_chain(node_count: usize, edges: &[PgEdge], source: usize, target: usize) -> Option<Vec<usize>> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for (i, e) in edges.iter().enumerate() {
        adjacency[e.from].push(i);
    }
    let mut dist = vec![f64::INFINITY; node_count];
    let mut via: Vec<Option<usize>> = vec![None; node_count];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        key: 0.0,
        cost: 0.0,
        node: source as NodeId,
    });
    while let Some(Entry { cost, node, .. }) = heap.pop() {
        let u = node as usize;
        if cost > dist[u] {
            continue;
        }
        if u == target {
            break;
        }
        for &i in &adjacency[u] {
            let e = &edges[i];
            let next = cost + e.weight;
            if next < dist[e.to] {
                dist[e.to] = next;
                via[e.to] = Some(i);
                heap.push(Entry {
                    key: next,
                    cost: next,
                    node: e.to as NodeId,
                });
            }
        }
    }
    if !dist[target].is_finite() {
        return None;
    }
    let mut chain = Vec::new();
    let mut v = target;
    while let Some(i) = via[v] {
        chain.push(i);
        v = edges[i].from;
    }
    chain.reverse();
    Some(chain)
}

pub(crate) fn assemble(nodes: &[PgNode], edges: &[PgEdge], chain: &[usize]) -> RouteSolution {
    let mut legs = Vec::with_capacity(chain.len());
    let mut route: Vec<NodeId> = Vec::new();
    let mut total = 0.0;
    for (index, &i) in chain.iter().enumerate() {
        let e = &edges[i];
        total += e.weight;
        let skip = usize::from(!route.is_empty());
        route.extend_from_slice(&e.road_path[skip..]);
        legs.push(Leg {
            index,
            station_id: nodes[e.to].station_id,
            raw_cost: e.raw_cost,
            cost: e.weight,
            path: e.road_path.clone(),
        });
    }
    if route.is_empty() {
        route.push(nodes[0].road_node);
    }
    let stations_visited = legs.iter().filter_map(|l| l.station_id).collect();
    RouteSolution {
        legs,
        total_cost: total,
        stations_visited,
        route,
    }
}
