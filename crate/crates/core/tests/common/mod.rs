//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use evroute::io::synthetic::{GridSpec, WeightSpec};
use evroute::{
    astar, split_into_bases, EvParams, EvRouter, GraphEdge, NodeId, PathResult, RoadGraph, RouteSolution,
    RouterOptions, StationRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Textbook O(V^2) Dijkstra over the graph's edge list. Returns distances
/// (infinite when unreachable).
pub fn dijkstra(graph: &RoadGraph, source: NodeId) -> Vec<f64> {
    let n = graph.node_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in graph.edges() {
        adj[e.from as usize].push((e.to as usize, e.weight));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source as usize] = 0.0;
    loop {
        let mut u = None;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && u.is_none_or(|b: usize| dist[v] < dist[b]) {
                u = Some(v);
            }
        }
        let Some(u) = u else { break };
        done[u] = true;
        for &(v, w) in &adj[u] {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
            }
        }
    }
    dist
}

/// Random graph on `n` nodes scattered in a small box, with a random
/// spanning-ish chain plus `extra` random edges of integer weight in `0..=max_w`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_w: u32) -> RoadGraph {
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(40.0..41.0)))
        .collect();
    let mut edges = Vec::new();
    let mut push = |from: usize, to: usize, rng: &mut ChaCha8Rng| {
        edges.push(GraphEdge {
            from: from as NodeId,
            to: to as NodeId,
            weight: rng.random_range(0..=max_w) as f64,
        })
    };
    for v in 1..n {
        if rng.random_bool(0.8) {
            let u = rng.random_range(0..v);
            push(u, v, rng);
            if rng.random_bool(0.7) {
                push(v, u, rng);
            }
        }
    }
    for _ in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        push(a, b, rng);
    }
    RoadGraph::from_parts(coords, edges).unwrap()
}

/// Checks that a path walks real edges, that its cumulative costs add up edge
/// by edge, and that it runs from `source` to `target` at cost `expected`.
pub fn check_path(graph: &RoadGraph, path: &PathResult, source: NodeId, target: NodeId, expected: f64) {
    assert_eq!(path.nodes.first(), Some(&source));
    assert_eq!(path.nodes.last(), Some(&target));
    assert_eq!(path.nodes.len(), path.cumulative.len());
    assert_eq!(path.cumulative[0], 0.0);
    for k in 1..path.nodes.len() {
        let w = graph
            .edge_weight(path.nodes[k - 1], path.nodes[k])
            .unwrap_or_else(|| panic!("no edge {} -> {}", path.nodes[k - 1], path.nodes[k]));
        assert_eq!(path.cumulative[k], path.cumulative[k - 1] + w, "step {k}");
    }
    assert_eq!(path.cost, *path.cumulative.last().unwrap());
    assert_eq!(path.cost, expected);
}

/// Sum of edge weights along a node sequence, cheapest parallel edge per hop.
pub fn walk_cost(graph: &RoadGraph, nodes: &[NodeId]) -> f64 {
    nodes
        .windows(2)
        .map(|w| graph.edge_weight(w[0], w[1]).expect("route uses a real edge"))
        .fold(0.0, |acc, w| acc + w)
}

/// Checks the structural invariants of a planned route.
pub fn check_solution(graph: &RoadGraph, sol: &RouteSolution, params: &EvParams) {
    let q = params.capacity();
    let mut total = 0.0;
    for (k, leg) in sol.legs.iter().enumerate() {
        assert_eq!(leg.index, k);
        assert!(leg.raw_cost <= q, "leg {k} raw cost {} exceeds {q}", leg.raw_cost);
        assert_eq!(walk_cost(graph, &leg.path), leg.raw_cost);
        let expected = if leg.station_id.is_some() {
            evroute::adjust_cost(leg.raw_cost, params).unwrap()
        } else {
            leg.raw_cost
        };
        assert_eq!(leg.cost.to_bits(), expected.to_bits());
        total += leg.cost;
        if k > 0 {
            assert_eq!(sol.legs[k - 1].path.last(), leg.path.first(), "legs share junctions");
        }
    }
    assert_eq!(sol.total_cost.to_bits(), total.to_bits());
    assert_eq!(sol.legs.last().map(|l| l.station_id), Some(None));
}

/// Grid network with integer weights, router and a trip across it.
pub struct Instance {
    pub router: EvRouter,
    pub stations: Vec<StationRecord>,
    pub source: NodeId,
    pub target: NodeId,
    pub trip_cost: f64,
    pub params: EvParams,
    /// Number of bases the initial path splits into.
    pub bases: usize,
}

pub fn grid(width: usize, height: usize, stations: usize, seed: u64) -> (RoadGraph, Vec<StationRecord>) {
    let net = GridSpec::new(width, height, WeightSpec::UniformInt(5, 15))
        .with_stations(stations, seed)
        .generate()
        .unwrap();
    (net.graph().unwrap(), net.stations)
}

/// Random trip on a random grid with a power-of-two capacity that forces
/// `1..=3` stops and an integer penalty. Every leg weight is then an exact
/// dyadic number, so totals compare exactly whatever the summation order.
/// `candidates = None` uses one candidate slot per station.
pub fn instance(seed: u64, candidates: Option<usize>, threads: usize) -> Option<Instance> {
    let mut r = rng(seed ^ 0x5eed_1234);
    let width = r.random_range(12..=40);
    let height = r.random_range(12..=40);
    let count = r.random_range(15..=60);
    let (graph, stations) = grid(width, height, count, seed);

    let options = RouterOptions {
        threads,
        ..RouterOptions::default()
    };
    let router = EvRouter::new(graph, &stations, options).unwrap();
    let g = router.graph();
    let (w, h) = (width as NodeId, height as NodeId);
    // node ids are row-major for these grids
    let source = r.random_range(0..h) * w + r.random_range(0..w / 4);
    let target = r.random_range(0..h) * w + r.random_range(3 * w / 4..w);
    let trip_cost = astar(g, source, target).ok()?.cost;

    let stops = r.random_range(1..=3) as f64;
    let beta = 1.0 - EvParams::DEFAULT_ALPHA;
    let q = 2f64.powi((trip_cost / ((stops + 0.5) * beta)).log2().round() as i32);
    let penalty = r.random_range(0..=2 * q as u64) as f64;
    let n = candidates.unwrap_or(count);
    let params = EvParams::new(q, penalty).unwrap().with_candidates(n).unwrap();
    let path = astar(g, source, target).unwrap();
    let bases = split_into_bases(&path, &params).ok()?.len();
    (1..=3).contains(&bases).then_some(Instance {
        router,
        stations,
        source,
        target,
        trip_cost,
        params,
        bases,
    })
}

/// Candidates of a base by brute force: full Dijkstra from the base, every
/// station sorted by (distance, id), cut to `n` within `radius`.
pub fn brute_candidates(
    graph: &RoadGraph,
    base: NodeId,
    stations: &[(i64, NodeId)],
    n: usize,
    radius: f64,
) -> Vec<(i64, f64)> {
    let dist = dijkstra(graph, base);
    let mut all: Vec<(i64, f64)> = stations
        .iter()
        .map(|&(id, node)| (id, dist[node as usize]))
        .filter(|&(_, d)| d <= radius)
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(n);
    all
}

/// Multiset of edges as sortable keys.
pub fn edge_multiset(graph: &RoadGraph) -> BTreeMap<((i64, i64), (i64, i64), u64), usize> {
    let key = |v: NodeId| {
        let (lon, lat) = graph.coords(v);
        ((lon * 1e7).round() as i64, (lat * 1e7).round() as i64)
    };
    let mut out = BTreeMap::new();
    for e in graph.edges() {
        *out.entry((key(e.from), key(e.to), e.weight.to_bits())).or_insert(0) += 1;
    }
    out
}
