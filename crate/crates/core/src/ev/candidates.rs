use std::collections::HashSet;

use super::{Base, EvParams, RADIUS_GROWTH};
use crate::error::PlanError;
use crate::graph::{NodeId, RoadGraph};
use crate::io::stations::StationSet;
use crate::shortest_path::isochrone;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Position in the [`StationSet`].
    pub station: usize,
    pub station_id: i64,
    pub node: NodeId,
    /// Shortest-path cost from the base node.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub base_index: usize,
    pub candidates: Vec<Candidate>,
    pub search_radius_used: f64,
}

/// The `n` stations nearest to a base by road cost.
///
/// Starts with an isochrone of radius `alpha * Q`, bins every reached node,
/// grows the bucket set by one ring and walks the station chains of those
/// buckets. Stations keep their isochrone distance; ties go to the smaller
/// station id. With fewer than `n` hits the radius grows by
/// [`RADIUS_GROWTH`] (capped at `Q`) up to `max_search_expansions` times.
pub fn find_candidates(
    base: &Base,
    params: &EvParams,
    graph: &RoadGraph,
    stations: &StationSet,
) -> Result<CandidateSet, PlanError> {
    let q = params.capacity();
    let n = params.num_candidates();
    let mut radius = (params.alpha() * q).min(q);
    let mut expansions = 0;
    let mut found = gather(base.node, radius, graph, stations);
    while found.len() < n && radius < q && expansions < params.max_search_expansions() {
        radius = (radius * RADIUS_GROWTH).min(q);
        expansions += 1;
        found = gather(base.node, radius, graph, stations);
    }
    if found.is_empty() && radius < q {
        radius = q;
        found = gather(base.node, radius, graph, stations);
    }
    if found.is_empty() {
        return Err(PlanError::NoStationReachable {
            base: base.index,
            node: base.node,
        });
    }
    found.truncate(n);
    Ok(CandidateSet {
        base_index: base.index,
        candidates: found,
        search_radius_used: radius,
    })
}

fn gather(origin: NodeId, radius: f64, graph: &RoadGraph, stations: &StationSet) -> Vec<Candidate> {
    let reach = isochrone(graph, origin, radius);
    let index = stations.index();
    let buckets: HashSet<usize> = reach
        .distances
        .keys()
        .filter_map(|&v| {
            let (lon, lat) = graph.coords(v);
            index.bucket_of(lon, lat).ok()
        })
        .collect();
    let mut found: Vec<Candidate> = index
        .items_in_buckets(buckets, 1)
        .into_iter()
        .filter_map(|item| {
            let station = stations.get(item)?;
            let distance = *reach.distances.get(&station.node)?;
            Some(Candidate {
                station: item,
                station_id: station.station_id,
                node: station.node,
                distance,
            })
        })
        .collect();
    found.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.station_id.cmp(&b.station_id)));
    found
}
