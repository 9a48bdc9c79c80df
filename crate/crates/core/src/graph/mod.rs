//! Immutable directed road graph in forward-star layout.

mod locate;
mod snapshot;
mod tiles;

use std::collections::HashMap;

use crate::error::GraphError;
use crate::geo::haversine_m;

pub use locate::{nearest_node, NodeLocator};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot};
pub use tiles::{load_tiles, parse_tile, Direction, TileRecord};

pub type NodeId = u32;

/// Dedup key resolution for node coordinates, in degrees.
pub const COORD_QUANTUM: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphNode {
    pub id: NodeId,
    pub lon: f64,
    pub lat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub from: NodeId,
    pub to: NodeId,
    /// Travel cost in seconds.
    pub weight: f64,
}

/// Directed weighted graph with node coordinates.
///
/// Edges are stored contiguously and grouped by source node; `offsets[v]..offsets[v + 1]`
/// indexes the outgoing edges of `v`. Within a node, edges are sorted by
/// `(to, weight)` and exact duplicates are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGraph {
    lon: Vec<f64>,
    lat: Vec<f64>,
    offsets: Vec<usize>,
    heads: Vec<NodeId>,
    weights: Vec<f64>,
    max_speed: Option<f64>,
}

impl RoadGraph {
    /// Builds a graph from node coordinates (ids are positions in `coords`) and edges.
    pub fn from_parts(coords: Vec<(f64, f64)>, mut edges: Vec<GraphEdge>) -> Result<Self, GraphError> {
        if coords.is_empty() {
            return Err(GraphError::Invalid("graph has no nodes".into()));
        }
        if coords.len() > NodeId::MAX as usize {
            return Err(GraphError::Invalid(format!(
                "{} nodes exceed the id range",
                coords.len()
            )));
        }
        for (id, &(lon, lat)) in coords.iter().enumerate() {
            if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
                return Err(GraphError::Invalid(format!(
                    "node {id} has invalid coordinates ({lon}, {lat})"
                )));
            }
        }
        let count = coords.len();
        for e in &edges {
            for node in [e.from, e.to] {
                if node as usize >= count {
                    return Err(GraphError::NodeOutOfRange { node, count });
                }
            }
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(GraphError::Invalid(format!(
                    "edge {} -> {} has invalid weight {}",
                    e.from, e.to, e.weight
                )));
            }
        }
        edges.sort_by(|a, b| (a.from, a.to).cmp(&(b.from, b.to)).then(a.weight.total_cmp(&b.weight)));
        edges.dedup_by(|a, b| a.from == b.from && a.to == b.to && a.weight.to_bits() == b.weight.to_bits());

        let mut offsets = vec![0usize; count + 1];
        for e in &edges {
            offsets[e.from as usize + 1] += 1;
        }
        for v in 0..count {
            offsets[v + 1] += offsets[v];
        }
        let (lon, lat): (Vec<f64>, Vec<f64>) = coords.into_iter().unzip();
        let heads: Vec<NodeId> = edges.iter().map(|e| e.to).collect();
        let weights: Vec<f64> = edges.iter().map(|e| e.weight).collect();

        let mut graph = RoadGraph {
            lon,
            lat,
            offsets,
            heads,
            weights,
            max_speed: None,
        };
        graph.max_speed = graph.compute_max_speed();
        Ok(graph)
    }

    /// Largest straight-line speed (meters per second) over all edges, used to
    /// scale the A* heuristic. `None` disables the heuristic: either no edge
    /// has spatial extent or some edge covers distance at zero cost.
    fn compute_max_speed(&self) -> Option<f64> {
        let mut best = 0.0f64;
        for v in 0..self.node_count() {
            for e in self.offsets[v]..self.offsets[v + 1] {
                let to = self.heads[e] as usize;
                let len = haversine_m(self.lon[v], self.lat[v], self.lon[to], self.lat[to]);
                if len == 0.0 {
                    continue;
                }
                let w = self.weights[e];
                if w == 0.0 {
                    return None;
                }
                best = best.max(len / w);
            }
        }
        (best > 0.0 && best.is_finite()).then_some(best)
    }

    pub fn node_count(&self) -> usize {
        self.lon.len()
    }

    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn node(&self, id: NodeId) -> Option<GraphNode> {
        let i = id as usize;
        (i < self.node_count()).then(|| GraphNode {
            id,
            lon: self.lon[i],
            lat: self.lat[i],
        })
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = GraphNode> + '_ {
        (0..self.node_count()).map(|i| GraphNode {
            id: i as NodeId,
            lon: self.lon[i],
            lat: self.lat[i],
        })
    }

    /// `(lon, lat)` of a node. Panics when `id` is out of range.
    pub fn coords(&self, id: NodeId) -> (f64, f64) {
        (self.lon[id as usize], self.lat[id as usize])
    }

    pub fn out_edges(&self, node: NodeId) -> Result<impl ExactSizeIterator<Item = GraphEdge> + '_, GraphError> {
        let v = node as usize;
        if v >= self.node_count() {
            return Err(GraphError::NodeOutOfRange {
                node,
                count: self.node_count(),
            });
        }
        let range = self.offsets[v]..self.offsets[v + 1];
        Ok(range.map(move |e| GraphEdge {
            from: node,
            to: self.heads[e],
            weight: self.weights[e],
        }))
    }

    /// Outgoing `(head, weight)` slices of a node. Panics when `node` is out of range.
    #[inline]
    pub fn adjacency(&self, node: NodeId) -> (&[NodeId], &[f64]) {
        let v = node as usize;
        let range = self.offsets[v]..self.offsets[v + 1];
        (&self.heads[range.clone()], &self.weights[range])
    }

    pub fn edges(&self) -> impl Iterator<Item = GraphEdge> + '_ {
        (0..self.node_count()).flat_map(move |v| {
            (self.offsets[v]..self.offsets[v + 1]).map(move |e| GraphEdge {
                from: v as NodeId,
                to: self.heads[e],
                weight: self.weights[e],
            })
        })
    }

    /// Cheapest edge weight from `from` to `to`, if the edge exists.
    pub fn edge_weight(&self, from: NodeId, to: NodeId) -> Option<f64> {
        if from as usize >= self.node_count() {
            return None;
        }
        let (heads, weights) = self.adjacency(from);
        heads
            .iter()
            .zip(weights)
            .filter(|(&h, _)| h == to)
            .map(|(_, &w)| w)
            .reduce(f64::min)
    }

    pub fn max_speed(&self) -> Option<f64> {
        self.max_speed
    }

    /// `(min_lon, min_lat, max_lon, max_lat)` over all nodes.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let fold = |v: &[f64]| {
            v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
        };
        let (min_lon, max_lon) = fold(&self.lon);
        let (min_lat, max_lat) = fold(&self.lat);
        (min_lon, min_lat, max_lon, max_lat)
    }
}

pub(crate) fn quantize(lon: f64, lat: f64) -> (i64, i64) {
    (
        (lon / COORD_QUANTUM).round() as i64,
        (lat / COORD_QUANTUM).round() as i64,
    )
}

/// Accumulates edges between coordinate-keyed nodes; nodes with identical
/// quantized coordinates collapse into one.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: HashMap<(i64, i64), usize>,
    keys: Vec<(i64, i64)>,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Node for a coordinate, created on first sight.
    pub fn node(&mut self, lon: f64, lat: f64) -> usize {
        let key = quantize(lon, lat);
        *self.ids.entry(key).or_insert_with(|| {
            self.keys.push(key);
            self.keys.len() - 1
        })
    }

    pub fn edge(&mut self, from: usize, to: usize, weight: f64) {
        self.edges.push((from, to, weight));
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Finalizes the graph. Node ids are assigned in (lat, lon) order of the
    /// quantized coordinates, so the result does not depend on insertion order.
    pub fn finish(self) -> Result<RoadGraph, GraphError> {
        let mut order: Vec<usize> = (0..self.keys.len()).collect();
        order.sort_by_key(|&i| (self.keys[i].1, self.keys[i].0));
        let mut remap = vec![0 as NodeId; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as NodeId;
        }
        let coords = order
            .iter()
            .map(|&i| {
                let (x, y) = self.keys[i];
                (x as f64 * COORD_QUANTUM, y as f64 * COORD_QUANTUM)
            })
            .collect();
        let edges = self
            .edges
            .into_iter()
            .map(|(a, b, weight)| GraphEdge {
                from: remap[a],
                to: remap[b],
                weight,
            })
            .collect();
        RoadGraph::from_parts(coords, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RoadGraph {
        // 0 -> 1 (5), 0 -> 2 (3), 1 -> 2 (1), node 3 isolated
        RoadGraph::from_parts(
            vec![(0.0, 0.0), (0.01, 0.0), (0.0, 0.01), (1.0, 1.0)],
            vec![
                GraphEdge {
                    from: 0,
                    to: 2,
                    weight: 3.0,
                },
                GraphEdge {
                    from: 1,
                    to: 2,
                    weight: 1.0,
                },
                GraphEdge {
                    from: 0,
                    to: 1,
                    weight: 5.0,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn out_edges_in_stored_order() {
        let g = sample();
        let out: Vec<_> = g.out_edges(0).unwrap().map(|e| (e.to, e.weight)).collect();
        assert_eq!(out, vec![(1, 5.0), (2, 3.0)]);
        assert_eq!(g.out_edges(3).unwrap().count(), 0);
        assert!(matches!(
            g.out_edges(4),
            Err(GraphError::NodeOutOfRange { node: 4, count: 4 })
        ));
    }

    #[test]
    fn degree_sum_is_edge_count() {
        let g = sample();
        let total: usize = (0..4).map(|v| g.out_edges(v).unwrap().len()).sum();
        assert_eq!(total, g.edge_count());
        assert_eq!(*g.offsets().last().unwrap(), g.edge_count());
        assert!(g.offsets().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let e = GraphEdge {
            from: 0,
            to: 1,
            weight: 2.0,
        };
        let g =
            RoadGraph::from_parts(vec![(0.0, 0.0), (0.1, 0.0)], vec![e, e, GraphEdge { weight: 3.0, ..e }]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(0, 1), Some(2.0));
        assert_eq!(g.edge_weight(1, 0), None);
    }

    #[test]
    fn rejects_invalid_parts() {
        assert!(RoadGraph::from_parts(vec![], vec![]).is_err());
        assert!(RoadGraph::from_parts(vec![(200.0, 0.0)], vec![]).is_err());
        let bad = GraphEdge {
            from: 0,
            to: 5,
            weight: 1.0,
        };
        assert!(matches!(
            RoadGraph::from_parts(vec![(0.0, 0.0)], vec![bad]),
            Err(GraphError::NodeOutOfRange { node: 5, .. })
        ));
        let neg = GraphEdge {
            from: 0,
            to: 0,
            weight: -1.0,
        };
        assert!(RoadGraph::from_parts(vec![(0.0, 0.0)], vec![neg]).is_err());
        let nan = GraphEdge {
            weight: f64::NAN,
            ..neg
        };
        assert!(RoadGraph::from_parts(vec![(0.0, 0.0)], vec![nan]).is_err());
    }

    #[test]
    fn heuristic_speed() {
        let g = sample();
        let len = haversine_m(0.0, 0.0, 0.01, 0.0);
        let speed = g.max_speed().unwrap();
        assert!(speed >= len / 5.0);
        let zero = RoadGraph::from_parts(
            vec![(0.0, 0.0), (0.1, 0.0)],
            vec![GraphEdge {
                from: 0,
                to: 1,
                weight: 0.0,
            }],
        )
        .unwrap();
        assert_eq!(zero.max_speed(), None);
        let pointlike = RoadGraph::from_parts(
            vec![(0.0, 0.0)],
            vec![GraphEdge {
                from: 0,
                to: 0,
                weight: 1.0,
            }],
        )
        .unwrap();
        assert_eq!(pointlike.max_speed(), None);
    }

    #[test]
    fn builder_dedups_by_quantized_coordinates() {
        let mut b = GraphBuilder::new();
        let a = b.node(10.0, 20.0);
        let c = b.node(10.000_000_01, 20.0);
        let d = b.node(10.000_001, 20.0);
        assert_eq!(a, c);
        assert_ne!(a, d);
        b.edge(a, d, 1.0);
        let g = b.finish().unwrap();
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn builder_ids_independent_of_insertion_order() {
        let pts = [(0.0, 1.0), (1.0, 0.0), (0.5, 0.5)];
        let build = |order: &[usize]| {
            let mut b = GraphBuilder::new();
            for &i in order {
                let (lon, lat) = pts[i];
                let u = b.node(lon, lat);
                let (lon2, lat2) = pts[(i + 1) % 3];
                let v = b.node(lon2, lat2);
                b.edge(u, v, i as f64);
            }
            b.finish().unwrap()
        };
        assert_eq!(build(&[0, 1, 2]), build(&[2, 0, 1]));
    }
}
