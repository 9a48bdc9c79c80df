//! Shared fixtures for the benchmarks.

use evroute::io::synthetic::{GridSpec, WeightSpec};
use evroute::{EvParams, EvRouter, NodeId, RoadGraph, RouterOptions};

/// Square grid with uniform edge times in [5, 15) seconds.
pub fn grid(side: usize, seed: u64) -> RoadGraph {
    GridSpec::new(side, side, WeightSpec::Uniform(5.0, 15.0))
        .with_stations(0, seed)
        .generate()
        .expect("valid grid")
        .graph()
        .expect("grid builds")
}

/// Corner to corner trip on a `side` grid with `stations` random stations and
/// a capacity that forces a few stops.
pub struct Trip {
    pub router: EvRouter,
    pub params: EvParams,
    pub source: NodeId,
    pub target: NodeId,
}

pub fn trip(side: usize, stations: usize, threads: usize, seed: u64) -> Trip {
    let net = GridSpec::new(side, side, WeightSpec::Uniform(5.0, 15.0))
        .with_stations(stations, seed)
        .generate()
        .expect("valid grid");
    let options = RouterOptions {
        threads,
        ..RouterOptions::default()
    };
    let router = EvRouter::new(net.graph().expect("grid builds"), &net.stations, options).expect("router");
    let target = (side * side - 1) as NodeId;
    // corner to corner is about 2 * side edges of 10 s on average
    let capacity = (2 * side) as f64 * 10.0 / 3.0;
    let params = EvParams::new(capacity, 600.0).expect("params");
    Trip {
        router,
        params,
        source: 0,
        target,
    }
}
