//! Point clouds, distances and fixed-radius neighbor queries.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result, MAX_DIM};

/// Scattered sites `x_i` in 1, 2 or 3 dimensions with the values `h_i`
/// attached to them.
///
/// Construction rejects non-finite data and coincident sites, so every
/// `PointCloud` describes a well-posed interpolation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from row-major coordinates (`values.len() * dim`
    /// entries) and one value per site.
    pub fn new(dim: usize, coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::invalid_input(alloc::format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if values.is_empty() {
            return Err(Error::invalid_input("point cloud is empty"));
        }
        if coords.len() != values.len() * dim {
            return Err(Error::invalid_input(alloc::format!(
                "{} coordinates do not describe {} points in {dim}-D",
                coords.len(),
                values.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid_input(alloc::format!(
                "non-finite coordinate at point {}",
                i / dim
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_input(alloc::format!("non-finite value at point {i}")));
        }
        if let Some((first, second)) = find_duplicate(dim, &coords) {
            return Err(Error::DuplicatePoint { first, second });
        }
        Ok(PointCloud { dim, coords, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a cloud holds at least one site.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute coordinate over all sites.
    pub fn max_abs_coord(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Per-axis `(min, max)` of the sites.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bounds: Vec<(f64, f64)> = self.point(0).iter().map(|&c| (c, c)).collect();
        for p in self.points() {
            for (b, &c) in bounds.iter_mut().zip(p) {
                b.0 = b.0.min(c);
                b.1 = b.1.max(c);
            }
        }
        bounds
    }

    /// Same cloud with every coordinate passed through `f` (values kept).
    pub fn map_coords(&self, f: impl Fn(&[f64], &mut [f64])) -> Result<Self> {
        let mut coords = alloc::vec![0.0; self.coords.len()];
        for (src, dst) in self.points().zip(coords.chunks_exact_mut(self.dim)) {
            f(src, dst);
        }
        PointCloud::new(self.dim, coords, self.values.clone())
    }

    /// Same cloud shifted by `offset` along every axis.
    pub fn translated(&self, offset: f64) -> Result<Self> {
        self.map_coords(|src, dst| {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = s + offset;
            }
        })
    }
}

fn find_duplicate(dim: usize, coords: &[f64]) -> Option<(usize, usize)> {
    let n = coords.len() / dim;
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    let mut order: Vec<usize> = (0..n).collect();
    // partial_cmp so that 0.0 and -0.0 compare equal; all values are finite here.
    order.sort_by(|&a, &b| {
        point(a)
            .partial_cmp(point(b))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
        .windows(2)
        .find_map(|w| (point(w[0]) == point(w[1])).then(|| (w[0].min(w[1]), w[0].max(w[1]))))
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid_input(alloc::format!(
            "dimension mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(dist(p, q))
}

#[inline]
pub(crate) fn dist(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, b) in p.iter().zip(q) {
        let d = a - b;
        s += d * d;
    }
    libm::sqrt(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Below this many sites a linear scan beats building a grid.
pub const BRUTE_FORCE_LIMIT: usize = 256;

/// All sites strictly closer than `radius` to site `center`, in ascending
/// index order. The center itself is included with distance 0.
pub fn radius_neighbors(cloud: &PointCloud, center: usize, radius: f64) -> Result<Vec<Neighbor>> {
    check_query(cloud, center, radius)?;
    if cloud.len() < BRUTE_FORCE_LIMIT {
        Ok(scan(cloud, cloud.point(center), radius))
    } else {
        Ok(SpatialGrid::new(cloud, radius).neighbors_of(cloud.point(center), radius))
    }
}

fn check_query(cloud: &PointCloud, center: usize, radius: f64) -> Result<()> {
    if center >= cloud.len() {
        return Err(Error::invalid_input(alloc::format!(
            "point index {center} out of range for {} points",
            cloud.len()
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid_input(alloc::format!(
            "radius must be positive, got {radius}"
        )));
    }
    Ok(())
}

fn scan(cloud: &PointCloud, query: &[f64], radius: f64) -> Vec<Neighbor> {
    cloud
        .points()
        .enumerate()
        .filter_map(|(index, p)| {
            let distance = dist(query, p);
            (distance < radius).then_some(Neighbor { index, distance })
        })
        .collect()
}

type CellKey = [i64; MAX_DIM];

/// Uniform-grid spatial hash over a point cloud.
///
/// Sites are bucketed into cubic cells of a fixed edge length and kept in a
/// single array sorted by cell, so a query walks the `3^d` cells around the
/// query point with binary searches. Queries are exact for any radius up to
/// the cell size.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    dim: usize,
    cell: f64,
    entries: Vec<(CellKey, usize)>,
    coords: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(cloud: &PointCloud, cell: f64) -> Self {
        Self::from_coords(cloud.dim(), cloud.coords(), cell)
    }

    pub fn from_coords(dim: usize, coords: &[f64], cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "grid cell size must be positive");
        let mut entries: Vec<(CellKey, usize)> = coords
            .chunks_exact(dim)
            .enumerate()
            .map(|(i, p)| (cell_key(p, cell), i))
            .collect();
        entries.sort_unstable();
        SpatialGrid {
            dim,
            cell,
            entries,
            coords: coords.to_vec(),
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Sites strictly closer than `radius` to `query`, ascending by index.
    ///
    /// # Panics
    /// If `radius` exceeds the cell size.
    pub fn neighbors_of(&self, query: &[f64], radius: f64) -> Vec<Neighbor> {
        assert!(radius <= self.cell, "query radius exceeds grid cell size");
        let mut out = Vec::new();
        self.for_each_candidate(query, |index| {
            let distance = dist(query, &self.coords[index * self.dim..(index + 1) * self.dim]);
            if distance < radius {
                out.push(Neighbor { index, distance });
            }
        });
        out.sort_unstable_by_key(|n| n.index);
        out
    }

    /// Calls `f` with every site index in the cells adjacent to `query`.
    pub(crate) fn for_each_candidate(&self, query: &[f64], mut f: impl FnMut(usize)) {
        let base = cell_key(query, self.cell);
        let span = |axis: usize| if axis < self.dim { -1i64..=1 } else { 0..=0 };
        for dx in span(0) {
            for dy in span(1) {
                for dz in span(2) {
                    let key = [
                        base[0].saturating_add(dx),
                        base[1].saturating_add(dy),
                        base[2].saturating_add(dz),
                    ];
                    let start = self.entries.partition_point(|e| e.0 < key);
                    for &(k, index) in &self.entries[start..] {
                        if k != key {
                            break;
                        }
                        f(index);
                    }
                }
            }
        }
    }
}

fn cell_key(p: &[f64], cell: f64) -> CellKey {
    let mut key = [0i64; MAX_DIM];
    for (k, &c) in key.iter_mut().zip(p) {
        // `as` saturates, which keeps far-away points in boundary cells.
        *k = libm::floor(c / cell) as i64;
    }
    key
}
