use alloc::vec::Vec;

use super::Matrix;

/// Signed determinant kept as sign and natural log of the magnitude, so that
/// products of many pivots neither overflow nor underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    /// -1, 0 or 1.
    pub sign: f64,
    /// `ln |det|`; `-inf` when the determinant is zero.
    pub log_abs: f64,
}

impl Determinant {
    pub const ONE: Determinant = Determinant {
        sign: 1.0,
        log_abs: 0.0,
    };

    pub const ZERO: Determinant = Determinant {
        sign: 0.0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Determinant::ZERO
        } else {
            Determinant {
                sign: v.signum(),
                log_abs: libm::log(v.abs()),
            }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * libm::exp(self.log_abs)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    /// `|self - other| / |self|`, evaluated in log space. Infinite when the
    /// signs disagree or `self` is zero while `other` is not.
    pub fn relative_difference(&self, other: &Determinant) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ if self.sign != other.sign => f64::INFINITY,
            _ => libm::fabs(libm::expm1(other.log_abs - self.log_abs)),
        }
    }
}

impl core::ops::Mul for Determinant {
    type Output = Determinant;

    fn mul(self, other: Determinant) -> Determinant {
        if self.is_zero() || other.is_zero() {
            Determinant::ZERO
        } else {
            Determinant {
                sign: self.sign * other.sign,
                log_abs: self.log_abs + other.log_abs,
            }
        }
    }
}

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Self {
        assert!(a.is_square());
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Lu { lu, perm, swaps }
    }

    pub fn determinant(&self) -> Determinant {
        let mut det = if self.swaps.is_multiple_of(2) {
            Determinant::ONE
        } else {
            Determinant {
                sign: -1.0,
                log_abs: 0.0,
            }
        };
        for i in 0..self.lu.rows() {
            det = det * Determinant::from_value(self.lu[(i, i)]);
        }
        det
    }

    /// Solves `A x = b`; entries are non-finite when `A` is singular.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}
