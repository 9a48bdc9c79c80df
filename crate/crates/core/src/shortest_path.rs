//! Dijkstra kernels over a [`RoadGraph`].
//!
//! All kernels use a binary heap with lazy deletion (stale entries are skipped
//! on pop). Equal keys pop the lower node id first, so results are
//! deterministic. Every call owns its scratch storage and the graph is only
//! read, so calls may run concurrently.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::error::PathError;
use crate::geo::haversine_m;
use crate::graph::{NodeId, RoadGraph};

/// Headroom keeping the A* heuristic strictly below the true remaining cost
/// under floating-point rounding.
const HEURISTIC_SHRINK: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// Total cost in seconds.
    pub cost: f64,
    /// Node sequence from source to target, inclusive.
    pub nodes: Vec<NodeId>,
    /// Cost from the source to each entry of `nodes`.
    pub cumulative: Vec<f64>,
}

impl PathResult {
    pub fn single(node: NodeId) -> Self {
        PathResult {
            cost: 0.0,
            nodes: vec![node],
            cumulative: vec![0.0],
        }
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("paths are nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReachResult {
    /// Shortest distance of every node within the radius.
    pub distances: HashMap<NodeId, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundedPaths {
    /// Exact shortest paths to the targets settled within the radius.
    pub paths: HashMap<NodeId, PathResult>,
    /// Entries in the sparse distance map when the search stopped.
    pub visited: usize,
}

/// Min-heap entry ordered by `key`, then by lower `node`.
#[derive(Clone, Copy)]
pub(crate) struct Entry {
    pub(crate) key: f64,
    pub(crate) cost: f64,
    pub(crate) node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then_with(|| other.node.cmp(&self.node))
    }
}

fn check_node(graph: &RoadGraph, node: NodeId) -> Result<(), PathError> {
    if (node as usize) < graph.node_count() {
        Ok(())
    } else {
        Err(PathError::NodeOutOfRange {
            node,
            count: graph.node_count(),
        })
    }
}

/// Point-to-point A* with a straight-line time heuristic.
///
/// The heuristic is great-circle distance divided by the fastest edge speed in
/// the graph, which never overestimates. Graphs without usable geometry fall
/// back to a zero heuristic (plain Dijkstra).
pub fn astar(graph: &RoadGraph, source: NodeId, target: NodeId) -> Result<PathResult, PathError> {
    check_node(graph, source)?;
    check_node(graph, target)?;
    if source == target {
        return Ok(PathResult::single(source));
    }
    let (tlon, tlat) = graph.coords(target);
    let heuristic = |v: NodeId| match graph.max_speed() {
        Some(speed) => {
            let (lon, lat) = graph.coords(v);
            haversine_m(lon, lat, tlon, tlat) / speed * HEURISTIC_SHRINK
        }
        None => 0.0,
    };

    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NodeId::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Entry {
        key: heuristic(source),
        cost: 0.0,
        node: source,
    });

    while let Some(Entry { cost, node, .. }) = heap.pop() {
        if cost > dist[node as usize] {
            continue;
        }
        if node == target {
            return Ok(trace(source, target, |v| dist[v as usize], |v| pred[v as usize]));
        }
        let (heads, weights) = graph.adjacency(node);
        for (&to, &w) in heads.iter().zip(weights) {
            let next = cost + w;
            if next < dist[to as usize] {
                dist[to as usize] = next;
                pred[to as usize] = node;
                heap.push(Entry {
                    key: next + heuristic(to),
                    cost: next,
                    node: to,
                });
            }
        }
    }
    Err(PathError::NoPath {
        source_node: source,
        target,
    })
}

fn trace(source: NodeId, target: NodeId, dist: impl Fn(NodeId) -> f64, pred: impl Fn(NodeId) -> NodeId) -> PathResult {
    let mut nodes = vec![target];
    let mut v = target;
    while v != source {
        v = pred(v);
        nodes.push(v);
    }
    nodes.reverse();
    let cumulative: Vec<f64> = nodes.iter().map(|&v| dist(v)).collect();
    PathResult {
        cost: dist(target),
        nodes,
        cumulative,
    }
}

/// Multi-target Dijkstra confined to a cost radius.
///
/// Distances and predecessors live in hash maps sized by the explored disk
/// rather than by the graph. Edges leading beyond `radius` are never relaxed.
/// The search stops once every target is settled or the disk is exhausted.
/// Targets farther than `radius` are absent from the result.
///
/// Panics if `source` is not a node of `graph`.
pub fn bounded_dijkstra(graph: &RoadGraph, source: NodeId, targets: &[NodeId], radius: f64) -> BoundedPaths {
    assert!((source as usize) < graph.node_count(), "source {source} out of range");
    let mut remaining: HashSet<NodeId> = targets.iter().copied().collect();
    let mut out = BoundedPaths::default();
    if remaining.is_empty() || !(radius >= 0.0) {
        return out;
    }
    let mut dist: HashMap<NodeId, f64> = HashMap::new();
    let mut pred: HashMap<NodeId, NodeId> = HashMap::new();
    let mut settled: Vec<NodeId> = Vec::new();
    let mut heap = BinaryHeap::new();
    dist.insert(source, 0.0);
    heap.push(Entry {
        key: 0.0,
        cost: 0.0,
        node: source,
    });

    while let Some(Entry { cost, node, .. }) = heap.pop() {
        if cost > dist[&node] {
            continue;
        }
        if remaining.remove(&node) {
            settled.push(node);
            if remaining.is_empty() {
                break;
            }
        }
        let (heads, weights) = graph.adjacency(node);
        for (&to, &w) in heads.iter().zip(weights) {
            let next = cost + w;
            if next > radius {
                continue;
            }
            if dist.get(&to).is_none_or(|&d| next < d) {
                dist.insert(to, next);
                pred.insert(to, node);
                heap.push(Entry {
                    key: next,
                    cost: next,
                    node: to,
                });
            }
        }
    }

    out.visited = dist.len();
    for t in settled {
        let path = trace(source, t, |v| dist[&v], |v| pred[&v]);
        out.paths.insert(t, path);
    }
    out
}

/// Distances of all nodes within `radius` of `source`, without predecessor storage.
///
/// Panics if `source` is not a node of `graph`.
pub fn isochrone(graph: &RoadGraph, source: NodeId, radius: f64) -> ReachResult {
    assert!((source as usize) < graph.node_count(), "source {source} out of range");
    let mut dist: HashMap<NodeId, f64> = HashMap::new();
    if !(radius >= 0.0) {
        return ReachResult { distances: dist };
    }
    let mut heap = BinaryHeap::new();
    dist.insert(source, 0.0);
    heap.push(Entry {
        key: 0.0,
        cost: 0.0,
        node: source,
    });
    while let Some(Entry { cost, node, .. }) = heap.pop() {
        if cost > dist[&node] {
            continue;
        }
        let (heads, weights) = graph.adjacency(node);
        for (&to, &w) in heads.iter().zip(weights) {
            let next = cost + w;
            if next <= radius && dist.get(&to).is_none_or(|&d| next < d) {
                dist.insert(to, next);
                heap.push(Entry {
                    key: next,
                    cost: next,
                    node: to,
                });
            }
        }
    }
    ReachResult { distances: dist }
}

/// Full single-source shortest-path tree with dense storage.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub source: NodeId,
    pub dist: Vec<f64>,
    pred: Vec<NodeId>,
}

impl ShortestPathTree {
    pub fn build(graph: &RoadGraph, source: NodeId) -> Result<Self, PathError> {
        check_node(graph, source)?;
        let n = graph.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![NodeId::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[source as usize] = 0.0;
        heap.push(Entry {
            key: 0.0,
            cost: 0.0,
            node: source,
        });
        while let Some(Entry { cost, node, .. }) = heap.pop() {
            if cost > dist[node as usize] {
                continue;
            }
            let (heads, weights) = graph.adjacency(node);
            for (&to, &w) in heads.iter().zip(weights) {
                let next = cost + w;
                if next < dist[to as usize] {
                    dist[to as usize] = next;
                    pred[to as usize] = node;
                    heap.push(Entry {
                        key: next,
                        cost: next,
                        node: to,
                    });
                }
            }
        }
        Ok(ShortestPathTree { source, dist, pred })
    }

    pub fn path_to(&self, target: NodeId) -> Option<PathResult> {
        let d = *self.dist.get(target as usize)?;
        d.is_finite().then(|| {
            trace(
                self.source,
                target,
                |v| self.dist[v as usize],
                |v| self.pred[v as usize],
            )
        })
    }
}
