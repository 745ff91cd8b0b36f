//! Radial kernels.
//!
//! Compactly supported kernels are the Wendland functions, written in the
//! scaled argument `t = shape * r`; they vanish identically for `t >= 1`, so
//! the support radius in domain units is `1 / shape`.

use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `r^2 ln r`, with the limit value 0 at `r = 0`.
    ThinPlateSpline,
    /// `exp(-(eps r)^2)`.
    Gaussian,
    /// Hardy multiquadric `sqrt(r^2 + c^2)`.
    Multiquadric,
    /// `(1 - t)_+^2`.
    WendlandC0,
    /// `(1 - t)_+^4 (4t + 1)`.
    WendlandC2,
    /// `(1 - t)_+^6 (35t^2 + 18t + 3) / 3`.
    WendlandC4,
}

impl KernelKind {
    pub const ALL: [KernelKind; 6] = [
        KernelKind::ThinPlateSpline,
        KernelKind::Gaussian,
        KernelKind::Multiquadric,
        KernelKind::WendlandC0,
        KernelKind::WendlandC2,
        KernelKind::WendlandC4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::ThinPlateSpline => "tps",
            KernelKind::Gaussian => "gaussian",
            KernelKind::Multiquadric => "multiquadric",
            KernelKind::WendlandC0 => "wendland-c0",
            KernelKind::WendlandC2 => "wendland-c2",
            KernelKind::WendlandC4 => "wendland-c4",
        }
    }

    pub fn is_compact(self) -> bool {
        matches!(
            self,
            KernelKind::WendlandC0 | KernelKind::WendlandC2 | KernelKind::WendlandC4
        )
    }

    /// Whether the interpolation matrix is positive definite for distinct
    /// sites without any polynomial augmentation.
    pub fn is_strictly_positive_definite(self) -> bool {
        self.is_compact() || self == KernelKind::Gaussian
    }

    /// Smallest polynomial degree the kernel needs for a uniquely solvable
    /// system, or `None` when no tail is required.
    pub fn min_poly_degree(self) -> Option<u8> {
        match self {
            KernelKind::ThinPlateSpline => Some(1),
            KernelKind::Multiquadric => Some(0),
            _ => None,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tps" | "thin-plate-spline" => Ok(KernelKind::ThinPlateSpline),
            "gaussian" => Ok(KernelKind::Gaussian),
            "multiquadric" => Ok(KernelKind::Multiquadric),
            "wendland-c0" => Ok(KernelKind::WendlandC0),
            "wendland-c2" => Ok(KernelKind::WendlandC2),
            "wendland-c4" => Ok(KernelKind::WendlandC4),
            other => Err(Error::invalid_config(alloc::format!(
                "unknown kernel `{other}` (expected tps, gaussian, multiquadric, wendland-c0, wendland-c2 or wendland-c4)"
            ))),
        }
    }
}

/// A radial kernel together with its shape parameter.
///
/// The shape is the support scaling `alpha` for Wendland kernels, `eps` for
/// the Gaussian and `c` for the multiquadric. The thin-plate spline has no
/// shape parameter and ignores the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    shape: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, shape: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::invalid_config(alloc::format!(
                "kernel shape must be positive and finite, got {shape}"
            )));
        }
        Ok(Kernel { kind, shape })
    }

    /// Wendland kernel whose support radius is `radius` domain units.
    pub fn with_support_radius(kind: KernelKind, radius: f64) -> Result<Self> {
        if !kind.is_compact() {
            return Err(Error::invalid_config(alloc::format!("{kind} has no compact support")));
        }
        Kernel::new(kind, 1.0 / radius)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn is_compact(&self) -> bool {
        self.kind.is_compact()
    }

    /// Support radius in domain units; infinite for global kernels.
    pub fn support_radius(&self) -> f64 {
        if self.is_compact() {
            1.0 / self.shape
        } else {
            f64::INFINITY
        }
    }

    /// True when `r` lies strictly inside the support.
    #[inline]
    pub fn in_support(&self, r: f64) -> bool {
        !self.is_compact() || self.shape * r < 1.0
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        match self.kind {
            KernelKind::ThinPlateSpline => {
                if r == 0.0 {
                    0.0
                } else {
                    r * r * libm::log(r)
                }
            }
            KernelKind::Gaussian => {
                let s = self.shape * r;
                libm::exp(-s * s)
            }
            KernelKind::Multiquadric => libm::sqrt(r * r + self.shape * self.shape),
            KernelKind::WendlandC0 | KernelKind::WendlandC2 | KernelKind::WendlandC4 => {
                wendland(self.kind, self.shape * r)
            }
        }
    }

    /// The kernel to use after the sites have been divided by
    /// `half_extent`, so that predictions in the original frame stay the same
    /// (up to a constant factor absorbed by the weights).
    ///
    /// The thin-plate spline is not scale covariant and is returned as is.
    pub fn rescaled(&self, half_extent: f64) -> Kernel {
        let shape = match self.kind {
            KernelKind::ThinPlateSpline => self.shape,
            KernelKind::Multiquadric => self.shape / half_extent,
            _ => self.shape * half_extent,
        };
        Kernel { kind: self.kind, shape }
    }
}

#[inline]
fn wendland(kind: KernelKind, t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - t;
    match kind {
        KernelKind::WendlandC0 => s * s,
        KernelKind::WendlandC2 => {
            let s2 = s * s;
            s2 * s2 * (4.0 * t + 1.0)
        }
        KernelKind::WendlandC4 => {
            let s2 = s * s;
            s2 * s2 * s2 * (35.0 * t * t + 18.0 * t + 3.0) / 3.0
        }
        _ => unreachable!(),
    }
}
