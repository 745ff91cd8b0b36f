use alloc::vec::Vec;

use super::Matrix;

/// `A = L L^T` for symmetric positive definite `A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Factors `a`, reading only its lower triangle. Fails with the offending
    /// pivot when a diagonal entry of the reduced matrix drops to
    /// `threshold` or below.
    pub fn factor(a: &Matrix, threshold: f64) -> Result<Self, f64> {
        assert!(a.is_square());
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > threshold) {
                return Err(d);
            }
            let djj = libm::sqrt(d);
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                let (ri, rj) = (l.row(i), l.row(j));
                for k in 0..j {
                    s -= ri[k] * rj[k];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let s: f64 = (0..i).map(|k| row[k] * x[k]).sum();
            x[i] = (x[i] - s) / row[i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[(k, i)] * x[k]).sum();
            x[i] = (x[i] - s) / self.l[(i, i)];
        }
        x
    }

    /// `ln det A`.
    pub fn log_det(&self) -> f64 {
        (0..self.dim()).map(|i| 2.0 * libm::log(self.l[(i, i)])).sum()
    }
}
