//! Solution output: per-leg tables (`INDEX,STATION,COST,PATH`), aggregated
//! routes, JSON and GeoJSON.

use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ev::RouteSolution;
use crate::graph::RoadGraph;
use crate::io::stations::StationSet;

/// `STATION` value of legs that end at the trip target.
pub const ENDPOINT_STATION: i64 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    GeoJson,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "geojson" => Ok(OutputFormat::GeoJson),
            other => Err(format!("unknown format {other:?} (expected csv, json or geojson)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    #[serde(rename = "INDEX")]
    pub index: usize,
    #[serde(rename = "STATION")]
    pub station: i64,
    #[serde(rename = "COST")]
    pub cost: f64,
    #[serde(rename = "PATH")]
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionTable {
    pub rows: Vec<SolutionRow>,
}

impl SolutionTable {
    pub fn from_solution(solution: &RouteSolution, graph: &RoadGraph) -> Self {
        let rows = solution
            .legs
            .iter()
            .map(|leg| SolutionRow {
                index: leg.index,
                station: leg.station_id.unwrap_or(ENDPOINT_STATION),
                cost: leg.cost,
                path: linestring_wkt(&coords_of(graph, &leg.path)),
            })
            .collect();
        SolutionTable { rows }
    }

    /// Sum of row costs in leg order.
    pub fn total_cost(&self) -> f64 {
        self.rows.iter().fold(0.0, |acc, r| acc + r.cost)
    }

    pub fn stations(&self) -> Vec<i64> {
        self.rows
            .iter()
            .map(|r| r.station)
            .filter(|&s| s != ENDPOINT_STATION)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> csv::Result<Self> {
        let rows = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<csv::Result<Vec<_>>>()?;
        Ok(SolutionTable { rows })
    }
}

pub fn coords_of(graph: &RoadGraph, nodes: &[crate::graph::NodeId]) -> Vec<(f64, f64)> {
    nodes.iter().map(|&v| graph.coords(v)).collect()
}

/// WKT LINESTRING of the given vertices. A single vertex is repeated so the
/// result is always a valid linestring.
pub fn linestring_wkt(coords: &[(f64, f64)]) -> String {
    let mut points: Vec<wkt::types::Coord<f64>> = coords
        .iter()
        .map(|&(x, y)| wkt::types::Coord { x, y, z: None, m: None })
        .collect();
    if points.len() == 1 {
        points.push(points[0]);
    }
    match wkt::types::LineString::from_coords(points) {
        Some(line) => wkt::Wkt::LineString(line).to_string(),
        None => "LINESTRING EMPTY".to_string(),
    }
}

fn station_point(stations: &StationSet, id: i64) -> Option<(f64, f64)> {
    stations
        .stations()
        .iter()
        .find(|s| s.station_id == id)
        .map(|s| (s.lon, s.lat))
}

pub fn solution_json(solution: &RouteSolution, graph: &RoadGraph, aggregate: bool) -> Value {
    if aggregate {
        return json!({
            "total_cost": solution.total_cost,
            "stations": solution.stations_visited,
            "path": linestring_wkt(&coords_of(graph, &solution.route)),
        });
    }
    let table = SolutionTable::from_solution(solution, graph);
    json!({
        "total_cost": solution.total_cost,
        "stations": solution.stations_visited,
        "legs": table.rows,
    })
}

pub fn solution_geojson(solution: &RouteSolution, graph: &RoadGraph, stations: &StationSet, aggregate: bool) -> Value {
    let line = |nodes: &[crate::graph::NodeId]| {
        let mut coords: Vec<[f64; 2]> = coords_of(graph, nodes).into_iter().map(|(x, y)| [x, y]).collect();
        if coords.len() == 1 {
            coords.push(coords[0]);
        }
        json!({ "type": "LineString", "coordinates": coords })
    };
    let mut features = Vec::new();
    if aggregate {
        features.push(json!({
            "type": "Feature",
            "geometry": line(&solution.route),
            "properties": { "total_cost": solution.total_cost, "stations": solution.stations_visited },
        }));
    } else {
        for leg in &solution.legs {
            features.push(json!({
                "type": "Feature",
                "geometry": line(&leg.path),
                "properties": {
                    "index": leg.index,
                    "station": leg.station_id.unwrap_or(ENDPOINT_STATION),
                    "cost": leg.cost,
                },
            }));
        }
    }
    for (stop, &id) in solution.stations_visited.iter().enumerate() {
        if let Some((lon, lat)) = station_point(stations, id) {
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [lon, lat] },
                "properties": { "station": id, "stop": stop },
            }));
        }
    }
    json!({
        "type": "FeatureCollection",
        "features": features,
        "total_cost": solution.total_cost,
        "stations": solution.stations_visited,
    })
}

/// Single-row CSV with header `COST,STATIONS,PATH`; stations are `;`-separated.
pub fn write_aggregated_csv<W: Write>(out: W, solution: &RouteSolution, graph: &RoadGraph) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["COST", "STATIONS", "PATH"])?;
    let stations: Vec<String> = solution.stations_visited.iter().map(|s| s.to_string()).collect();
    writer.write_record([
        solution.total_cost.to_string(),
        stations.join(";"),
        linestring_wkt(&coords_of(graph, &solution.route)),
    ])?;
    writer.flush()?;
    Ok(())
}

pub fn write_solution<W: Write>(
    mut out: W,
    solution: &RouteSolution,
    graph: &RoadGraph,
    stations: &StationSet,
    format: OutputFormat,
    aggregate: bool,
) -> std::io::Result<()> {
    let csv_err = |e: csv::Error| std::io::Error::other(e.to_string());
    match (format, aggregate) {
        (OutputFormat::Csv, false) => SolutionTable::from_solution(solution, graph)
            .write_csv(out)
            .map_err(csv_err),
        (OutputFormat::Csv, true) => write_aggregated_csv(out, solution, graph).map_err(csv_err),
        (OutputFormat::Json, _) => {
            serde_json::to_writer_pretty(&mut out, &solution_json(solution, graph, aggregate))?;
            writeln!(out)
        }
        (OutputFormat::GeoJson, _) => {
            serde_json::to_writer_pretty(&mut out, &solution_geojson(solution, graph, stations, aggregate))?;
            writeln!(out)
        }
    }
}
