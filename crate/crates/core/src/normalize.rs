//! Isotropic centering and scaling of the domain.
//!
//! Sites are mapped by `x' = (x - center) / half_extent`, which puts the
//! bounding box inside `[-1, 1]^d` while preserving angles and distance
//! ratios, so a single kernel shape stays meaningful after the map.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, PointCloud, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizeTransform {
    center: Vec<f64>,
    half_extent: f64,
}

impl NormalizeTransform {
    pub fn new(center: Vec<f64>, half_extent: f64) -> Result<Self> {
        if center.is_empty() || center.len() > crate::MAX_DIM {
            return Err(Error::invalid_input("transform center must have 1 to 3 components"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid_input("transform center must be finite"));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::invalid_input(alloc::format!(
                "half extent must be positive and finite, got {half_extent}"
            )));
        }
        Ok(NormalizeTransform { center, half_extent })
    }

    pub fn identity(dim: usize) -> Self {
        NormalizeTransform {
            center: vec![0.0; dim],
            half_extent: 1.0,
        }
    }

    /// Transform taking the cloud's bounding box into `[-1, 1]^d`: centered
    /// on the box midpoint and scaled by half the longest side. A cloud with
    /// zero extent gets a half extent of 1.
    pub fn fit(cloud: &PointCloud) -> Self {
        let bounds = cloud.bounding_box();
        let center = bounds.iter().map(|&(lo, hi)| lo + 0.5 * (hi - lo)).collect();
        let side = bounds.iter().map(|&(lo, hi)| hi - lo).fold(0.0, f64::max);
        let half_extent = if side > 0.0 { 0.5 * side } else { 1.0 };
        NormalizeTransform { center, half_extent }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn is_identity(&self) -> bool {
        self.half_extent == 1.0 && self.center.iter().all(|&c| c == 0.0)
    }

    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check(p)?;
        let mut out = vec![0.0; p.len()];
        self.apply_into(p, &mut out);
        Ok(out)
    }

    pub fn invert(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check(p)?;
        Ok(p.iter()
            .zip(&self.center)
            .map(|(x, c)| x * self.half_extent + c)
            .collect())
    }

    #[inline]
    pub(crate) fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        for ((o, x), c) in out.iter_mut().zip(p).zip(&self.center) {
            *o = (x - c) / self.half_extent;
        }
    }

    /// Applies the transform to every site of a cloud.
    pub fn apply_cloud(&self, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.dim() != self.dim() {
            return Err(self.mismatch(cloud.dim()));
        }
        cloud.map_coords(|src, dst| self.apply_into(src, dst))
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() == self.dim() {
            Ok(())
        } else {
            Err(self.mismatch(p.len()))
        }
    }

    fn mismatch(&self, got: usize) -> Error {
        Error::invalid_input(alloc::format!(
            "point has {got} coordinates, transform expects {}",
            self.dim()
        ))
    }
}
