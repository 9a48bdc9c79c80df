mod common;

use common::{check_path, dijkstra, random_graph, rng};
use evroute::shortest_path::ShortestPathTree;
use evroute::{astar, bounded_dijkstra, isochrone, NodeId, PathError};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn astar_matches_dijkstra_on_random_graphs() {
    for seed in 0..60 {
        let mut r = rng(seed);
        let n = r.random_range(2..60);
        let g = random_graph(&mut r, n, 3 * n, if seed % 3 == 0 { 20 } else { 9 });
        for _ in 0..5 {
            let (s, t) = (r.random_range(0..n) as NodeId, r.random_range(0..n) as NodeId);
            let dist = dijkstra(&g, s);
            match astar(&g, s, t) {
                Ok(p) => check_path(&g, &p, s, t, dist[t as usize]),
                Err(PathError::NoPath { .. }) => assert!(dist[t as usize].is_infinite()),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn astar_uses_geometry_on_grids() {
    // Weights proportional to length keep the heuristic tight.
    let (g, _) = common::grid(15, 15, 0, 3);
    assert!(g.max_speed().is_some());
    let dist = dijkstra(&g, 0);
    for t in [14, 100, 224] {
        check_path(&g, &astar(&g, 0, t).unwrap(), 0, t, dist[t as usize]);
    }
}

#[test]
fn bounded_and_isochrone_match_dijkstra() {
    for seed in 100..160 {
        let mut r = rng(seed);
        let n = r.random_range(2..50);
        let g = random_graph(&mut r, n, 2 * n, 12);
        let s = r.random_range(0..n) as NodeId;
        let dist = dijkstra(&g, s);
        let radius = r.random_range(0..40) as f64;

        let iso = isochrone(&g, s, radius);
        let expect: Vec<NodeId> = (0..n as NodeId).filter(|&v| dist[v as usize] <= radius).collect();
        let mut got: Vec<NodeId> = iso.distances.keys().copied().collect();
        got.sort_unstable();
        assert_eq!(got, expect);
        for (&v, &d) in &iso.distances {
            assert_eq!(d, dist[v as usize]);
        }

        let targets: Vec<NodeId> = (0..5).map(|_| r.random_range(0..n) as NodeId).collect();
        let found = bounded_dijkstra(&g, s, &targets, radius);
        for &t in &targets {
            match found.paths.get(&t) {
                Some(p) => check_path(&g, p, s, t, dist[t as usize]),
                None => assert!(dist[t as usize] > radius, "target {t} at {} missing", dist[t as usize]),
            }
        }
        assert!(found.visited <= expect.len());
    }
}

#[test]
fn tree_matches_dijkstra() {
    let mut r = rng(7);
    let g = random_graph(&mut r, 80, 200, 10);
    let dist = dijkstra(&g, 5);
    let tree = ShortestPathTree::build(&g, 5).unwrap();
    assert_eq!(tree.dist, dist);
    for t in 0..80 {
        match tree.path_to(t) {
            Some(p) => check_path(&g, &p, 5, t, dist[t as usize]),
            None => assert!(dist[t as usize].is_infinite()),
        }
    }
    assert!(ShortestPathTree::build(&g, 80).is_err());
}

#[test]
fn out_of_range_endpoints() {
    let mut r = rng(1);
    let g = random_graph(&mut r, 4, 4, 3);
    assert!(matches!(
        astar(&g, 0, 4),
        Err(PathError::NodeOutOfRange { node: 4, .. })
    ));
    assert!(matches!(
        astar(&g, 9, 0),
        Err(PathError::NodeOutOfRange { node: 9, .. })
    ));
}

#[test]
fn bounded_search_stays_local_on_large_grid() {
    let (g, _) = common::grid(120, 120, 0, 11);
    let s = 60 * 120 + 60;
    let far = 0;
    let found = bounded_dijkstra(&g, s, &[far], 150.0);
    assert!(found.paths.is_empty());
    assert_eq!(found.visited, isochrone(&g, s, 150.0).distances.len());
    assert!(found.visited < g.node_count() / 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_agree(seed in any::<u64>(), n in 2usize..40, radius in 0u32..60) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 2 * n, 10);
        let s = r.random_range(0..n) as NodeId;
        let dist = dijkstra(&g, s);
        let radius = radius as f64;
        let iso = isochrone(&g, s, radius);
        let all: Vec<NodeId> = (0..n as NodeId).collect();
        let bounded = bounded_dijkstra(&g, s, &all, radius);
        prop_assert_eq!(iso.distances.len(), bounded.paths.len());
        for (v, p) in &bounded.paths {
            prop_assert_eq!(p.cost, dist[*v as usize]);
            prop_assert_eq!(iso.distances[v], p.cost);
        }
        for t in 0..n as NodeId {
            let d = dist[t as usize];
            let a = astar(&g, s, t);
            prop_assert_eq!(a.as_ref().map(|p| p.cost).unwrap_or(f64::INFINITY), d);
            // monotone in the radius: everything within radius is reached
            prop_assert_eq!(d <= radius, iso.distances.contains_key(&t));
        }
    }
}
