//! Uniform lon/lat lattice used as an associative container.
//!
//! Every item lives in exactly one bucket. Membership is stored as a doubly
//! linked list threaded through a single flat array holding three slots per
//! item: previous item, next item and owning bucket. The only per-bucket
//! storage is the map from non-empty bucket id to the head of its chain, so
//! insertion and removal are O(1) and memory scales with the item count.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::IndexError;
use crate::geo::KM_PER_DEGREE;

/// End-of-chain / empty-slot marker in the links array.
pub const NIL: usize = usize::MAX;

const PREV: usize = 0;
const NEXT: usize = 1;
const BUCKET: usize = 2;

/// Axis-aligned lon/lat rectangle in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl Bounds {
    pub const WORLD: Bounds = Bounds {
        min_lon: -180.0,
        min_lat: -90.0,
        max_lon: 180.0,
        max_lat: 90.0,
    };

    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Self, IndexError> {
        let b = Bounds {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        };
        let finite = [min_lon, min_lat, max_lon, max_lat].iter().all(|v| v.is_finite());
        if !finite || min_lon >= max_lon || min_lat >= max_lat {
            return Err(IndexError::InvalidBounds(format!("{b:?}")));
        }
        if min_lon < -180.0 || max_lon > 180.0 || min_lat < -90.0 || max_lat > 90.0 {
            return Err(IndexError::InvalidBounds(format!("{b:?} exceeds world coordinates")));
        }
        Ok(b)
    }

    pub fn contains(&self, lon: f64, lat: f64) -> bool {
        lon >= self.min_lon && lon <= self.max_lon && lat >= self.min_lat && lat <= self.max_lat
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::WORLD
    }
}

#[derive(Debug, Clone)]
pub struct SpatialBinIndex {
    bounds: Bounds,
    cell_dx: f64,
    cell_dy: f64,
    ni: usize,
    nj: usize,
    links: Vec<usize>,
    heads: HashMap<usize, usize>,
    len: usize,
}

impl SpatialBinIndex {
    /// Empty index with square cells of `cell_size_km` (converted with the
    /// equatorial factor on both axes).
    pub fn build(cell_size_km: f64, bounds: Bounds) -> Result<Self, IndexError> {
        if !(cell_size_km > 0.0) || !cell_size_km.is_finite() {
            return Err(IndexError::NonPositiveCellSize(cell_size_km));
        }
        let bounds = Bounds::new(bounds.min_lon, bounds.min_lat, bounds.max_lon, bounds.max_lat)?;
        let cell = cell_size_km / KM_PER_DEGREE;
        let ni = (((bounds.max_lon - bounds.min_lon) / cell).ceil() as usize).max(1);
        let nj = (((bounds.max_lat - bounds.min_lat) / cell).ceil() as usize).max(1);
        if ni.checked_mul(nj).is_none() {
            return Err(IndexError::InvalidBounds(format!(
                "{ni} x {nj} cells overflow the bucket id range"
            )));
        }
        Ok(SpatialBinIndex {
            bounds,
            cell_dx: cell,
            cell_dy: cell,
            ni,
            nj,
            links: Vec::new(),
            heads: HashMap::new(),
            len: 0,
        })
    }

    /// Like [`build`](Self::build) with the links array pre-sized for item ids `0..items`.
    pub fn with_capacity(cell_size_km: f64, bounds: Bounds, items: usize) -> Result<Self, IndexError> {
        let mut index = Self::build(cell_size_km, bounds)?;
        index.links = vec![NIL; 3 * items];
        Ok(index)
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn cell_size_deg(&self) -> (f64, f64) {
        (self.cell_dx, self.cell_dy)
    }

    /// Bucket counts along lon and lat.
    pub fn dims(&self) -> (usize, usize) {
        (self.ni, self.nj)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Raw length of the links array (three slots per item id).
    pub fn links_len(&self) -> usize {
        self.links.len()
    }

    /// Number of item-id slots backed by the links array.
    pub fn slot_count(&self) -> usize {
        self.links.len() / 3
    }

    /// Number of non-empty buckets.
    pub fn occupied_buckets(&self) -> usize {
        self.heads.len()
    }

    pub fn bucket_of(&self, lon: f64, lat: f64) -> Result<usize, IndexError> {
        if !self.bounds.contains(lon, lat) {
            return Err(IndexError::OutOfBounds { lon, lat });
        }
        let (i, j) = self.cell_of_clamped(lon, lat);
        Ok(self.bucket_id(i, j))
    }

    /// Lattice cell of a point; points outside the bounds land in the nearest edge cell.
    pub fn cell_of_clamped(&self, lon: f64, lat: f64) -> (usize, usize) {
        let fi = ((lon - self.bounds.min_lon) / self.cell_dx).floor();
        let fj = ((lat - self.bounds.min_lat) / self.cell_dy).floor();
        let i = fi.max(0.0).min((self.ni - 1) as f64) as usize;
        let j = fj.max(0.0).min((self.nj - 1) as f64) as usize;
        (i, j)
    }

    pub fn bucket_id(&self, i: usize, j: usize) -> usize {
        self.ni * j + i
    }

    pub fn cell_of_bucket(&self, bucket: usize) -> (usize, usize) {
        (bucket % self.ni, bucket / self.ni)
    }

    pub fn contains(&self, item: usize) -> bool {
        self.bucket_of_item(item).is_some()
    }

    pub fn bucket_of_item(&self, item: usize) -> Option<usize> {
        let b = *self.links.get(3 * item + BUCKET)?;
        (b != NIL).then_some(b)
    }

    /// `(prev, next)` neighbors of an indexed item, `None` at chain ends.
    pub fn neighbors(&self, item: usize) -> Option<(Option<usize>, Option<usize>)> {
        self.bucket_of_item(item)?;
        let wrap = |v: usize| (v != NIL).then_some(v);
        Some((wrap(self.links[3 * item + PREV]), wrap(self.links[3 * item + NEXT])))
    }

    pub fn head(&self, bucket: usize) -> Option<usize> {
        self.heads.get(&bucket).copied()
    }

    pub fn insert(&mut self, item: usize, lon: f64, lat: f64) -> Result<(), IndexError> {
        let bucket = self.bucket_of(lon, lat)?;
        if self.contains(item) {
            return Err(IndexError::DuplicateItem(item));
        }
        if 3 * item >= self.links.len() {
            self.links.resize(3 * (item + 1), NIL);
        }
        let head = self.heads.insert(bucket, item).unwrap_or(NIL);
        let slot = 3 * item;
        self.links[slot + PREV] = NIL;
        self.links[slot + NEXT] = head;
        self.links[slot + BUCKET] = bucket;
        if head != NIL {
            self.links[3 * head + PREV] = item;
        }
        self.len += 1;
        Ok(())
    }

    pub fn remove(&mut self, item: usize) -> Result<(), IndexError> {
        let bucket = self.bucket_of_item(item).ok_or(IndexError::MissingItem(item))?;
        let slot = 3 * item;
        let (prev, next) = (self.links[slot + PREV], self.links[slot + NEXT]);
        if prev != NIL {
            self.links[3 * prev + NEXT] = next;
        } else if next != NIL {
            self.heads.insert(bucket, next);
        } else {
            self.heads.remove(&bucket);
        }
        if next != NIL {
            self.links[3 * next + PREV] = prev;
        }
        self.links[slot..slot + 3].fill(NIL);
        self.len -= 1;
        Ok(())
    }

    /// Items of one bucket, head first.
    pub fn chain(&self, bucket: usize) -> Chain<'_> {
        Chain {
            links: &self.links,
            cursor: self.head(bucket).unwrap_or(NIL),
        }
    }

    /// Items in `buckets` dilated by `extra_layers` rings of neighboring
    /// buckets (8-neighborhood per ring), clipped to the lattice.
    pub fn items_in_buckets<I>(&self, buckets: I, extra_layers: usize) -> BTreeSet<usize>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut window: HashSet<usize> = HashSet::new();
        for bucket in buckets {
            let (ci, cj) = self.cell_of_bucket(bucket);
            if cj >= self.nj {
                continue;
            }
            let (i0, i1) = (ci.saturating_sub(extra_layers), (ci + extra_layers).min(self.ni - 1));
            let (j0, j1) = (cj.saturating_sub(extra_layers), (cj + extra_layers).min(self.nj - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    window.insert(self.bucket_id(i, j));
                }
            }
        }
        window.into_iter().flat_map(|b| self.chain(b)).collect()
    }

    /// Calls `f` for every item whose bucket is at Chebyshev distance exactly
    /// `layer` from cell `(ci, cj)`. Returns false once the ring lies entirely
    /// outside the lattice.
    pub fn for_each_in_ring(&self, ci: usize, cj: usize, layer: usize, mut f: impl FnMut(usize)) -> bool {
        let (ci, cj, l) = (ci as i64, cj as i64, layer as i64);
        let (ni, nj) = (self.ni as i64, self.nj as i64);
        if ci - l < 0 && ci + l >= ni && cj - l < 0 && cj + l >= nj {
            return false;
        }
        let mut visit = |i: i64, j: i64| {
            if i >= 0 && i < ni && j >= 0 && j < nj {
                for item in self.chain(self.bucket_id(i as usize, j as usize)) {
                    f(item);
                }
            }
        };
        if l == 0 {
            visit(ci, cj);
            return true;
        }
        for i in (ci - l)..=(ci + l) {
            visit(i, cj - l);
            visit(i, cj + l);
        }
        for j in (cj - l + 1)..(cj + l) {
            visit(ci - l, j);
            visit(ci + l, j);
        }
        true
    }
}

pub struct Chain<'a> {
    links: &'a [usize],
    cursor: usize,
}

impl Iterator for Chain<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cursor == NIL {
            return None;
        }
        let item = self.cursor;
        self.cursor = self.links[3 * item + NEXT];
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_degree() -> SpatialBinIndex {
        SpatialBinIndex::build(KM_PER_DEGREE, Bounds::WORLD).unwrap()
    }

    #[test]
    fn default_cell_geometry() {
        let index = SpatialBinIndex::build(10.0, Bounds::WORLD).unwrap();
        let (dx, dy) = index.cell_size_deg();
        // 10 / 111.32 computed by hand: 0.0898311174...
        assert!((dx - 0.089_831_117_5).abs() < 1e-9);
        assert_eq!(dx, dy);
        assert_eq!(index.dims().0, 4008);
        assert_eq!(index.dims().1, 2004);
    }

    #[test]
    fn unit_degree_cells() {
        let index = one_degree();
        assert_eq!(index.cell_size_deg().0, 1.0);
        assert_eq!(index.dims(), (360, 180));
        assert_eq!(index.bucket_of(0.0, 0.0).unwrap(), 32580);
        assert_eq!(index.bucket_of(-180.0, -90.0).unwrap(), 0);
    }

    #[test]
    fn boundary_points_use_floor_and_max_is_clamped() {
        let index = one_degree();
        // lon 10.0 is the boundary between cells 189 and 190
        assert_eq!(index.bucket_of(10.0, -90.0).unwrap(), 190);
        assert_eq!(index.bucket_of(9.999_999, -90.0).unwrap(), 189);
        assert_eq!(index.bucket_of(180.0, 90.0).unwrap(), 360 * 180 - 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            SpatialBinIndex::build(0.0, Bounds::WORLD).unwrap_err(),
            IndexError::NonPositiveCellSize(0.0)
        );
        assert!(SpatialBinIndex::build(-1.0, Bounds::WORLD).is_err());
        assert!(Bounds::new(1.0, 0.0, 0.0, 1.0).is_err());
        let mut index = one_degree();
        assert!(matches!(
            index.bucket_of(181.0, 0.0),
            Err(IndexError::OutOfBounds { .. })
        ));
        assert!(index.insert(0, 0.0, 91.0).is_err());
        index.insert(4, 1.0, 1.0).unwrap();
        assert_eq!(index.insert(4, 2.0, 2.0), Err(IndexError::DuplicateItem(4)));
        assert_eq!(index.remove(5), Err(IndexError::MissingItem(5)));
        assert_eq!(index.remove(100), Err(IndexError::MissingItem(100)));
    }

    #[test]
    fn head_insertion_and_removal() {
        let mut index = one_degree();
        let b = index.bucket_of(0.5, 0.5).unwrap();
        index.insert(0, 0.5, 0.5).unwrap();
        assert_eq!(index.head(b), Some(0));
        assert_eq!(index.neighbors(0), Some((None, None)));

        index.insert(1, 0.6, 0.6).unwrap();
        index.insert(2, 0.7, 0.7).unwrap();
        assert_eq!(index.chain(b).collect::<Vec<_>>(), vec![2, 1, 0]);

        index.remove(1).unwrap();
        assert_eq!(index.chain(b).collect::<Vec<_>>(), vec![2, 0]);
        assert_eq!(index.neighbors(2), Some((None, Some(0))));
        assert_eq!(index.neighbors(0), Some((Some(2), None)));

        index.remove(2).unwrap();
        assert_eq!(index.head(b), Some(0));
        index.remove(0).unwrap();
        assert_eq!(index.head(b), None);
        assert_eq!(index.occupied_buckets(), 0);
        assert!(index.is_empty());
        assert_eq!(index.links_len(), 9);
    }

    #[test]
    fn layered_queries() {
        let mut index = one_degree();
        let center = index.bucket_of(0.5, 0.5).unwrap();
        assert!(index.items_in_buckets(std::iter::empty(), 1).is_empty());
        index.insert(0, 0.5, 0.5).unwrap();
        index.insert(1, 1.5, 1.5).unwrap();
        index.insert(2, 2.5, 0.5).unwrap();
        index.insert(3, -0.5, -0.5).unwrap();
        let zero: Vec<_> = index.items_in_buckets([center], 0).into_iter().collect();
        assert_eq!(zero, vec![0]);
        let one: Vec<_> = index.items_in_buckets([center], 1).into_iter().collect();
        assert_eq!(one, vec![0, 1, 3]);
        let two: Vec<_> = index.items_in_buckets([center], 2).into_iter().collect();
        assert_eq!(two, vec![0, 1, 2, 3]);
    }

    #[test]
    fn layers_clip_at_corner() {
        let mut index = one_degree();
        index.insert(7, -179.5, -89.5).unwrap();
        index.insert(8, -178.5, -88.5).unwrap();
        let got: Vec<_> = index.items_in_buckets([0], 1).into_iter().collect();
        assert_eq!(got, vec![7, 8]);
    }

    #[test]
    fn ring_walk_visits_perimeter_only() {
        let mut index = one_degree();
        for (id, (lon, lat)) in [(0.5, 0.5), (1.5, 0.5), (2.5, 2.5), (-1.5, 0.5)]
            .into_iter()
            .enumerate()
        {
            index.insert(id, lon, lat).unwrap();
        }
        let (ci, cj) = index.cell_of_clamped(0.5, 0.5);
        let mut ring = Vec::new();
        index.for_each_in_ring(ci, cj, 0, |i| ring.push(i));
        assert_eq!(ring, vec![0]);
        ring.clear();
        index.for_each_in_ring(ci, cj, 1, |i| ring.push(i));
        assert_eq!(ring, vec![1]);
        ring.clear();
        index.for_each_in_ring(ci, cj, 2, |i| ring.push(i));
        ring.sort();
        assert_eq!(ring, vec![2, 3]);
        assert!(!index.for_each_in_ring(ci, cj, 400, |_| {}));
    }
}
