//! Deterministic grid networks for tests and benchmarks.
//!
//! Generation order, which fixes every random draw for a given seed:
//!
//! 1. The generator is `ChaCha8Rng::seed_from_u64(seed)`.
//! 2. Node `(i, j)` sits at `(origin_lon + i * spacing, origin_lat + j * spacing)`.
//! 3. Rows `j = 0..height`, then columns `i = 0..width`. For each node, its
//!    east neighbor `(i + 1, j)` and then its north neighbor `(i, j + 1)`,
//!    when present, get two `forward` records: first `a -> b`, then `b -> a`,
//!    each with its own weight draw.
//! 4. Weights: `const:C` draws nothing; `uniform:LO:HI` is
//!    `LO + (HI - LO) * rng.random::<f64>()`; `uniform-int:LO:HI` is
//!    `rng.random_range(LO..=HI)` over `i64`.
//! 5. After all edges, station `s = 1..=k` sits on node index
//!    `rng.random_range(0..width * height)` (row-major, `j * width + i`).
//! 6. A record belongs to tile `min(i_a, i_b) * tiles / width`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{Direction, GraphBuilder, RoadGraph, TileRecord};
use crate::io::solution::linestring_wkt;
use crate::io::stations::{write_stations, StationRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Const(f64),
    Uniform(f64, f64),
    UniformInt(i64, i64),
}

impl FromStr for WeightSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("bad number {t:?} in weight spec {s:?}"))
        };
        let int = |t: &str| {
            t.parse::<i64>()
                .map_err(|_| format!("bad integer {t:?} in weight spec {s:?}"))
        };
        let spec = match parts.as_slice() {
            [c] => WeightSpec::Const(num(c)?),
            ["const", c] => WeightSpec::Const(num(c)?),
            ["uniform", lo, hi] => WeightSpec::Uniform(num(lo)?, num(hi)?),
            ["uniform-int", lo, hi] => WeightSpec::UniformInt(int(lo)?, int(hi)?),
            _ => {
                return Err(format!(
                    "bad weight spec {s:?} (const:C, uniform:LO:HI or uniform-int:LO:HI)"
                ))
            }
        };
        let ok = match spec {
            WeightSpec::Const(c) => c.is_finite() && c >= 0.0,
            WeightSpec::Uniform(lo, hi) => lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi,
            WeightSpec::UniformInt(lo, hi) => 0 <= lo && lo <= hi,
        };
        if ok {
            Ok(spec)
        } else {
            Err(format!("weight spec {s:?} needs 0 <= LO <= HI"))
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Const(c) => write!(f, "const:{c}"),
            WeightSpec::Uniform(lo, hi) => write!(f, "uniform:{lo}:{hi}"),
            WeightSpec::UniformInt(lo, hi) => write!(f, "uniform-int:{lo}:{hi}"),
        }
    }
}

impl WeightSpec {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            WeightSpec::Const(c) => c,
            WeightSpec::Uniform(lo, hi) => lo + (hi - lo) * rng.random::<f64>(),
            WeightSpec::UniformInt(lo, hi) => rng.random_range(lo..=hi) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub weights: WeightSpec,
    pub stations: usize,
    pub seed: u64,
    pub tiles: usize,
    pub origin: (f64, f64),
    /// Node spacing in degrees.
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(width: usize, height: usize, weights: WeightSpec) -> Self {
        GridSpec {
            width,
            height,
            weights,
            stations: 0,
            seed: 0,
            tiles: 1,
            origin: (-84.0, 39.0),
            spacing: 0.01,
        }
    }

    pub fn with_stations(mut self, stations: usize, seed: u64) -> Self {
        self.stations = stations;
        self.seed = seed;
        self
    }

    pub fn with_tiles(mut self, tiles: usize) -> Self {
        self.tiles = tiles;
        self
    }

    fn validate(&self) -> Result<(), String> {
        if self.width < 2 || self.height < 2 {
            return Err(format!("grid must be at least 2x2, got {}x{}", self.width, self.height));
        }
        if self.tiles == 0 {
            return Err("need at least one tile".into());
        }
        if !(self.spacing > 0.0) {
            return Err("spacing must be positive".into());
        }
        let (lon, lat) = self.origin;
        let far_lon = lon + (self.width - 1) as f64 * self.spacing;
        let far_lat = lat + (self.height - 1) as f64 * self.spacing;
        if lon < -180.0 || lat < -90.0 || far_lon > 180.0 || far_lat > 90.0 {
            return Err("grid extends beyond lon/lat range".into());
        }
        Ok(())
    }

    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + i as f64 * self.spacing,
            self.origin.1 + j as f64 * self.spacing,
        )
    }

    pub fn generate(&self) -> Result<SyntheticNetwork, String> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut tiles: Vec<Vec<TileRecord>> = vec![Vec::new(); self.tiles];
        for j in 0..self.height {
            for i in 0..self.width {
                let a = self.node_coords(i, j);
                for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                    if ni >= self.width || nj >= self.height {
                        continue;
                    }
                    let b = self.node_coords(ni, nj);
                    let tile = i.min(ni) * self.tiles / self.width;
                    for (from, to) in [(a, b), (b, a)] {
                        let time = self.weights.draw(&mut rng);
                        let record = tiles[tile].len() as u64 + 1;
                        tiles[tile].push(TileRecord {
                            vertices: vec![from, to],
                            direction: Direction::Forward,
                            time,
                            record,
                        });
                    }
                }
            }
        }
        let stations = (1..=self.stations)
            .map(|id| {
                let node = rng.random_range(0..self.width * self.height);
                let (lon, lat) = self.node_coords(node % self.width, node / self.width);
                StationRecord {
                    id: id as i64,
                    lon,
                    lat,
                }
            })
            .collect();
        Ok(SyntheticNetwork { tiles, stations })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticNetwork {
    pub tiles: Vec<Vec<TileRecord>>,
    pub stations: Vec<StationRecord>,
}

impl SyntheticNetwork {
    /// Builds the road graph in memory, as loading the written tiles would.
    pub fn graph(&self) -> Result<RoadGraph, GraphError> {
        let mut builder = GraphBuilder::new();
        for rec in self.tiles.iter().flatten() {
            let from = builder.node(rec.vertices[0].0, rec.vertices[0].1);
            let to = builder.node(rec.vertices[1].0, rec.vertices[1].1);
            builder.edge(from, to, rec.time);
        }
        builder.finish()
    }

    /// Writes `tile_<k>.csv` files and `stations.csv` into `dir`; returns the tile paths.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for (k, tile) in self.tiles.iter().enumerate() {
            let path = dir.join(format!("tile_{k}.csv"));
            let mut writer = csv::Writer::from_writer(fs::File::create(&path)?);
            writer.write_record(["seg", "direction", "time"])?;
            for rec in tile {
                writer.write_record([
                    linestring_wkt(&rec.vertices),
                    rec.direction.as_str().to_string(),
                    rec.time.to_string(),
                ])?;
            }
            writer.flush()?;
            paths.push(path);
        }
        let mut out = fs::File::create(dir.join("stations.csv"))?;
        write_stations(&mut out, &self.stations).map_err(std::io::Error::other)?;
        out.flush()?;
        Ok(paths)
    }
}
