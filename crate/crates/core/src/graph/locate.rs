use super::{NodeId, RoadGraph};
use crate::error::IndexError;
use crate::geo::{haversine_m, EARTH_RADIUS_M, KM_PER_DEGREE};
use crate::spatial::{Bounds, SpatialBinIndex};

/// Bin index over the nodes of one graph, bounded by the graph's bounding box.
#[derive(Debug, Clone)]
pub struct NodeLocator {
    index: SpatialBinIndex,
}

impl NodeLocator {
    /// Cell size chosen so that the lattice holds about one node per cell.
    pub fn new(graph: &RoadGraph) -> Self {
        let bounds = padded_bounds(graph);
        let area = (bounds.max_lon - bounds.min_lon) * (bounds.max_lat - bounds.min_lat);
        let cell_deg = (area / graph.node_count() as f64).sqrt().max(1e-6);
        Self::with_cell_size(graph, cell_deg * KM_PER_DEGREE).expect("graph bounds are valid")
    }

    pub fn with_cell_size(graph: &RoadGraph, cell_size_km: f64) -> Result<Self, IndexError> {
        let mut index = SpatialBinIndex::with_capacity(cell_size_km, padded_bounds(graph), graph.node_count())?;
        for node in graph.nodes() {
            index.insert(node.id as usize, node.lon, node.lat)?;
        }
        Ok(NodeLocator { index })
    }

    pub fn index(&self) -> &SpatialBinIndex {
        &self.index
    }
}

fn padded_bounds(graph: &RoadGraph) -> Bounds {
    const PAD: f64 = 1e-6;
    let (min_lon, min_lat, max_lon, max_lat) = graph.bbox();
    Bounds {
        min_lon: (min_lon - PAD).max(-180.0),
        min_lat: (min_lat - PAD).max(-90.0),
        max_lon: (max_lon + PAD).min(180.0),
        max_lat: (max_lat + PAD).min(90.0),
    }
}

/// Node closest to `(lon, lat)` by great-circle distance, ties to the smaller id.
///
/// Rings of lattice cells are scanned outward from the query cell until the
/// best distance found is below a lower bound on anything in farther rings.
pub fn nearest_node(graph: &RoadGraph, locator: &NodeLocator, lon: f64, lat: f64) -> NodeId {
    let index = &locator.index;
    let bounds = index.bounds();
    let (dx, dy) = index.cell_size_deg();
    let (ci, cj) = index.cell_of_clamped(lon, lat);

    let cos_query = lat.to_radians().cos().max(0.0);
    let cos_bounds = bounds
        .min_lat
        .to_radians()
        .cos()
        .min(bounds.max_lat.to_radians().cos())
        .max(0.0);
    let widest_lon = (lon - bounds.min_lon).abs().max((lon - bounds.max_lon).abs());

    // Lower bound on the distance to any item outside rings 0..=layer: such an
    // item is at least `layer` whole cells away in latitude or in longitude.
    let lower_bound = |layer: usize| -> f64 {
        let dlat = (layer as f64 * dy).min(180.0);
        let by_lat = EARTH_RADIUS_M * dlat.to_radians();
        let dlon = (layer as f64 * dx).min(360.0 - widest_lon).clamp(0.0, 180.0);
        let h = cos_query * cos_bounds * (dlon.to_radians() / 2.0).sin().powi(2);
        let by_lon = 2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin();
        by_lat.min(by_lon) * (1.0 - 1e-9)
    };

    let mut best: Option<(f64, NodeId)> = None;
    for layer in 0.. {
        let inside = index.for_each_in_ring(ci, cj, layer, |item| {
            let id = item as NodeId;
            let (nlon, nlat) = graph.coords(id);
            let d = haversine_m(lon, lat, nlon, nlat);
            let better = match best {
                None => true,
                Some((bd, bid)) => d < bd || (d == bd && id < bid),
            };
            if better {
                best = Some((d, id));
            }
        });
        if !inside {
            break;
        }
        if let Some((bd, _)) = best {
            if bd < lower_bound(layer) {
                break;
            }
        }
    }
    best.expect("graph has at least one node").1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphEdge;

    fn scan(graph: &RoadGraph, lon: f64, lat: f64) -> NodeId {
        let mut best = (f64::INFINITY, 0);
        for n in graph.nodes() {
            let d = haversine_m(lon, lat, n.lon, n.lat);
            if d < best.0 {
                best = (d, n.id);
            }
        }
        best.1
    }

    #[test]
    fn exact_hit_and_tie() {
        let coords = vec![
            (0.0, 0.0),
            (5.0, 5.0),
            (2.0, 0.0),
            (-1.0, 0.0),
            (9.0, 9.0),
            (1.0, 3.0),
            (3.0, 3.0),
            (1.0, 0.0),
        ];
        let g = RoadGraph::from_parts(
            coords,
            vec![GraphEdge {
                from: 0,
                to: 1,
                weight: 1.0,
            }],
        )
        .unwrap();
        let loc = NodeLocator::new(&g);
        assert_eq!(nearest_node(&g, &loc, 5.0, 5.0), 1);
        assert_eq!(nearest_node(&g, &loc, 0.0, 0.0), 0);
        let no_origin = RoadGraph::from_parts(
            vec![
                (9.0, 9.0),
                (8.0, 8.0),
                (7.0, 7.0),
                (-1.0, 0.0),
                (6.0, 6.0),
                (5.0, 5.0),
                (4.0, 4.0),
                (1.0, 0.0),
            ],
            vec![],
        )
        .unwrap();
        let loc = NodeLocator::new(&no_origin);
        // nodes 3 and 7 are both 1 degree from the query along the equator
        assert_eq!(nearest_node(&no_origin, &loc, 0.0, 0.0), 3);
    }

    #[test]
    fn queries_outside_the_graph() {
        let coords: Vec<_> = (0..10)
            .flat_map(|j| (0..10).map(move |i| (i as f64 * 0.01, j as f64 * 0.01)))
            .collect();
        let g = RoadGraph::from_parts(coords, vec![]).unwrap();
        let loc = NodeLocator::new(&g);
        for &(lon, lat) in &[(-5.0, -5.0), (1.0, 0.05), (0.045, 3.0), (179.0, -80.0)] {
            assert_eq!(nearest_node(&g, &loc, lon, lat), scan(&g, lon, lat));
        }
    }

    #[test]
    fn single_node_graph() {
        let g = RoadGraph::from_parts(vec![(10.0, 10.0)], vec![]).unwrap();
        let loc = NodeLocator::new(&g);
        assert_eq!(nearest_node(&g, &loc, -170.0, 80.0), 0);
    }
}
