//! Charging station tables (`id,lon,lat` CSV) snapped onto a road graph.

use std::collections::HashSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::LoadError;
use crate::graph::{nearest_node, NodeId, NodeLocator, RoadGraph};
use crate::spatial::{Bounds, SpatialBinIndex};

/// One row of a station table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationRecord {
    pub id: i64,
    pub lon: f64,
    pub lat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub station_id: i64,
    pub lon: f64,
    pub lat: f64,
    /// Graph node the station is snapped to.
    pub node: NodeId,
}

/// Stations snapped to graph nodes and binned by the coordinates of those nodes.
///
/// Item ids in the index are positions in [`stations`](Self::stations).
#[derive(Debug, Clone)]
pub struct StationSet {
    stations: Vec<Station>,
    index: SpatialBinIndex,
}

impl StationSet {
    pub fn new(
        graph: &RoadGraph,
        locator: &NodeLocator,
        records: &[StationRecord],
        cell_size_km: f64,
        bounds: Bounds,
    ) -> Result<Self, LoadError> {
        let mut seen = HashSet::new();
        let mut index = SpatialBinIndex::with_capacity(cell_size_km, bounds, records.len())?;
        let mut stations = Vec::with_capacity(records.len());
        for (item, rec) in records.iter().enumerate() {
            if !seen.insert(rec.id) {
                return Err(LoadError::DuplicateStation(rec.id));
            }
            if !Bounds::WORLD.contains(rec.lon, rec.lat) {
                return Err(LoadError::StationCoordinates {
                    id: rec.id,
                    lon: rec.lon,
                    lat: rec.lat,
                });
            }
            let node = nearest_node(graph, locator, rec.lon, rec.lat);
            let (nlon, nlat) = graph.coords(node);
            index.insert(item, nlon, nlat)?;
            stations.push(Station {
                station_id: rec.id,
                lon: rec.lon,
                lat: rec.lat,
                node,
            });
        }
        Ok(StationSet { stations, index })
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn get(&self, item: usize) -> Option<&Station> {
        self.stations.get(item)
    }

    pub fn index(&self) -> &SpatialBinIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }
}

pub fn read_stations(path: &Path) -> Result<Vec<StationRecord>, LoadError> {
    let file = File::open(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    reader
        .deserialize()
        .enumerate()
        .map(|(n, row)| {
            row.map_err(|e| LoadError::Record {
                path: path.to_path_buf(),
                record: n as u64 + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_stations<W: Write>(out: W, records: &[StationRecord]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for rec in records {
        writer.serialize(rec)?;
    }
    writer.flush()?;
    Ok(())
}
