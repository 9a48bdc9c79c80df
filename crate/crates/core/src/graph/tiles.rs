//! Road tile CSV files: header `seg,direction,time`, one WKT LINESTRING per record.

use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use super::{GraphBuilder, RoadGraph};
use crate::error::GraphError;
use crate::geo::haversine_m;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Both,
    Forward,
    Reverse,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "both" => Ok(Direction::Both),
            "forward" => Ok(Direction::Forward),
            "reverse" => Ok(Direction::Reverse),
            other => Err(format!(
                "unknown direction {other:?} (expected both, forward or reverse)"
            )),
        }
    }
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Both => "both",
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileRecord {
    /// `(lon, lat)` vertices, at least two.
    pub vertices: Vec<(f64, f64)>,
    pub direction: Direction,
    /// Travel time of the whole linestring, seconds.
    pub time: f64,
    /// Record number within its file, 1-based.
    pub record: u64,
}

fn parse_linestring(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let geometry = wkt::Wkt::<f64>::from_str(text.trim()).map_err(|e| format!("bad WKT: {e}"))?;
    let wkt::Wkt::LineString(line) = geometry else {
        return Err("expected a LINESTRING".into());
    };
    let vertices: Vec<(f64, f64)> = line.coords().iter().map(|c| (c.x, c.y)).collect();
    if vertices.len() < 2 {
        return Err(format!("linestring has {} vertices, need at least 2", vertices.len()));
    }
    for &(lon, lat) in &vertices {
        if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
            return Err(format!("vertex ({lon}, {lat}) outside lon/lat range"));
        }
    }
    Ok(vertices)
}

pub fn parse_tile(path: &Path) -> Result<Vec<TileRecord>, GraphError> {
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let record_err = |record: u64, message: String| GraphError::Record {
        path: path.to_path_buf(),
        record,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| record_err(0, e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| record_err(0, format!("missing column {name:?}")))
    };
    let (seg, dir, time) = (column("seg")?, column("direction")?, column("time")?);

    let mut out = Vec::new();
    for (n, row) in reader.records().enumerate() {
        let number = n as u64 + 1;
        let row = row.map_err(|e| record_err(number, e.to_string()))?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let vertices = parse_linestring(field(seg)).map_err(|m| record_err(number, m))?;
        let direction = field(dir).parse().map_err(|m| record_err(number, m))?;
        let time: f64 = field(time)
            .parse()
            .map_err(|_| record_err(number, format!("bad time {:?}", field(time))))?;
        if !time.is_finite() || time < 0.0 {
            return Err(record_err(number, format!("negative or non-finite weight {time}")));
        }
        out.push(TileRecord {
            vertices,
            direction,
            time,
            record: number,
        });
    }
    Ok(out)
}

/// Loads and merges tiles. Tiles connect only through nodes with identical
/// (quantized) coordinates; those nodes appear once in the result.
///
/// Interior linestring vertices become nodes. Each segment becomes an edge
/// carrying the record's time prorated by the segment's share of the
/// linestring length.
pub fn load_tiles<P: AsRef<Path>>(paths: &[P]) -> Result<RoadGraph, GraphError> {
    let mut builder = GraphBuilder::new();
    let mut records = 0usize;
    for path in paths {
        let path = path.as_ref();
        for rec in parse_tile(path)? {
            add_record(&mut builder, &rec).map_err(|message| GraphError::Record {
                path: path.to_path_buf(),
                record: rec.record,
                message,
            })?;
            records += 1;
        }
    }
    if records == 0 {
        return Err(GraphError::Empty);
    }
    builder.finish()
}

fn add_record(builder: &mut GraphBuilder, rec: &TileRecord) -> Result<(), String> {
    let mut nodes: Vec<usize> = Vec::with_capacity(rec.vertices.len());
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(rec.vertices.len());
    for &(lon, lat) in &rec.vertices {
        let id = builder.node(lon, lat);
        if nodes.last() != Some(&id) {
            nodes.push(id);
            points.push((lon, lat));
        }
    }
    if nodes.len() < 2 {
        return Err("linestring collapses to a single point".into());
    }
    let lengths: Vec<f64> = points
        .windows(2)
        .map(|w| haversine_m(w[0].0, w[0].1, w[1].0, w[1].1))
        .collect();
    let total: f64 = lengths.iter().sum();
    let segments = lengths.len() as f64;
    for (k, pair) in nodes.windows(2).enumerate() {
        let share = if total > 0.0 {
            lengths[k] / total
        } else {
            1.0 / segments
        };
        let weight = rec.time * share;
        let (a, b) = (pair[0], pair[1]);
        match rec.direction {
            Direction::Forward => builder.edge(a, b, weight),
            Direction::Reverse => builder.edge(b, a, weight),
            Direction::Both => {
                builder.edge(a, b, weight);
                builder.edge(b, a, weight);
            }
        }
    }
    Ok(())
}
