//! Binary graph snapshots.
//!
//! Layout (little endian): 8-byte magic `EVRGRAPH`, `u32` version, `u64` node
//! count, `u64` edge count, then `(lon: f64, lat: f64)` per node and
//! `(from: u32, to: u32, weight: f64)` per edge in storage order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{GraphEdge, RoadGraph};
use crate::error::GraphError;

const MAGIC: &[u8; 8] = b"EVRGRAPH";
const VERSION: u32 = 1;

pub fn write_snapshot(graph: &RoadGraph, path: &Path) -> Result<(), GraphError> {
    let io_err = |source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    encode_snapshot(graph, &mut w).and_then(|_| w.flush()).map_err(io_err)
}

pub fn encode_snapshot<W: Write>(graph: &RoadGraph, w: &mut W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(graph.node_count() as u64).to_le_bytes())?;
    w.write_all(&(graph.edge_count() as u64).to_le_bytes())?;
    for node in graph.nodes() {
        w.write_all(&node.lon.to_le_bytes())?;
        w.write_all(&node.lat.to_le_bytes())?;
    }
    for e in graph.edges() {
        w.write_all(&e.from.to_le_bytes())?;
        w.write_all(&e.to.to_le_bytes())?;
        w.write_all(&e.weight.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<RoadGraph, GraphError> {
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_snapshot(&mut BufReader::new(file))
}

pub fn decode_snapshot<R: Read>(r: &mut R) -> Result<RoadGraph, GraphError> {
    let truncated = |_| GraphError::Snapshot("truncated file".into());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(GraphError::Snapshot("not a graph snapshot".into()));
    }
    let version = u32::from_le_bytes(read_array(r).map_err(truncated)?);
    if version != VERSION {
        return Err(GraphError::Snapshot(format!("unsupported version {version}")));
    }
    let nodes = u64::from_le_bytes(read_array(r).map_err(truncated)?) as usize;
    let edges = u64::from_le_bytes(read_array(r).map_err(truncated)?) as usize;

    let mut coords = Vec::with_capacity(nodes.min(1 << 24));
    for _ in 0..nodes {
        let lon = f64::from_le_bytes(read_array(r).map_err(truncated)?);
        let lat = f64::from_le_bytes(read_array(r).map_err(truncated)?);
        coords.push((lon, lat));
    }
    let mut list = Vec::with_capacity(edges.min(1 << 24));
    for _ in 0..edges {
        let from = u32::from_le_bytes(read_array(r).map_err(truncated)?);
        let to = u32::from_le_bytes(read_array(r).map_err(truncated)?);
        let weight = f64::from_le_bytes(read_array(r).map_err(truncated)?);
        list.push(GraphEdge { from, to, weight });
    }
    let graph = RoadGraph::from_parts(coords, list)?;
    if graph.edge_count() != edges {
        return Err(GraphError::Snapshot("duplicate edges in snapshot".into()));
    }
    Ok(graph)
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> std::io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}
