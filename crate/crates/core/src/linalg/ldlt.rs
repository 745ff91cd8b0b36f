//! Bunch–Kaufman symmetric indefinite factorization `P A P^T = L D L^T`,
//! with `D` block diagonal in 1x1 and 2x2 blocks.

use alloc::vec::Vec;

use super::{Determinant, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    One(usize),
    Two(usize),
}

#[derive(Debug, Clone)]
pub struct SymmetricIndefinite {
    /// Unit lower factor below the block diagonal; `D` on the block diagonal.
    a: Matrix,
    swaps: Vec<(usize, usize)>,
    blocks: Vec<Block>,
}

impl SymmetricIndefinite {
    /// Factors the symmetric matrix `a`. Fails with the magnitude of the
    /// offending pivot (for a 2x2 pivot, its smaller eigenvalue magnitude)
    /// once it is at or below `threshold`.
    pub fn factor(a: &Matrix, threshold: f64) -> Result<Self, f64> {
        assert!(a.is_square());
        let alpha = (1.0 + libm::sqrt(17.0)) / 8.0;
        let n = a.rows();
        let mut a = a.clone();
        let mut swaps = Vec::new();
        let mut blocks = Vec::new();
        let mut k = 0;
        while k < n {
            let absakk = a[(k, k)].abs();
            let (imax, colmax) =
                (k + 1..n)
                    .map(|i| (i, a[(i, k)].abs()))
                    .fold((k, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let scale = absakk.max(colmax);
            if !(scale > threshold) {
                return Err(scale);
            }
            let (kp, kstep) = if absakk >= alpha * colmax {
                (k, 1)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| a[(imax, j)].abs())
                    .fold(0.0, f64::max);
                if absakk * rowmax >= alpha * colmax * colmax {
                    (k, 1)
                } else if a[(imax, imax)].abs() >= alpha * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k + kstep - 1;
            if kp != kk {
                swap_symmetric(&mut a, kk, kp);
            }
            swaps.push((kk, kp));

            if kstep == 1 {
                let d = a[(k, k)];
                if !(d.abs() > threshold) {
                    return Err(d.abs());
                }
                let l: Vec<f64> = (k + 1..n).map(|i| a[(i, k)] / d).collect();
                for (ii, i) in (k + 1..n).enumerate() {
                    for j in k + 1..n {
                        a[(i, j)] -= l[ii] * a[(k, j)];
                    }
                }
                for (ii, i) in (k + 1..n).enumerate() {
                    a[(i, k)] = l[ii];
                }
                blocks.push(Block::One(k));
            } else {
                let (d11, d21, d22) = (a[(k, k)], a[(k + 1, k)], a[(k + 1, k + 1)]);
                let det = d11 * d22 - d21 * d21;
                let mean = 0.5 * (d11 + d22);
                let radius = libm::hypot(0.5 * (d11 - d22), d21);
                let smallest = det.abs() / (mean.abs() + radius);
                if !(smallest > threshold) {
                    return Err(smallest);
                }
                let mut l1 = Vec::with_capacity(n - k - 2);
                let mut l2 = Vec::with_capacity(n - k - 2);
                for i in k + 2..n {
                    let (c1, c2) = (a[(i, k)], a[(i, k + 1)]);
                    l1.push((d22 * c1 - d21 * c2) / det);
                    l2.push((d11 * c2 - d21 * c1) / det);
                }
                for (ii, i) in (k + 2..n).enumerate() {
                    for j in k + 2..n {
                        a[(i, j)] -= l1[ii] * a[(k, j)] + l2[ii] * a[(k + 1, j)];
                    }
                }
                for (ii, i) in (k + 2..n).enumerate() {
                    a[(i, k)] = l1[ii];
                    a[(i, k + 1)] = l2[ii];
                }
                blocks.push(Block::Two(k));
            }
            k += kstep;
        }
        Ok(SymmetricIndefinite { a, swaps, blocks })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let a = &self.a;
        let mut x = b.to_vec();
        for &(i, j) in &self.swaps {
            x.swap(i, j);
        }
        // L y = P b
        for &block in &self.blocks {
            match block {
                Block::One(k) => {
                    let xk = x[k];
                    for i in k + 1..n {
                        x[i] -= a[(i, k)] * xk;
                    }
                }
                Block::Two(k) => {
                    let (x1, x2) = (x[k], x[k + 1]);
                    for i in k + 2..n {
                        x[i] -= a[(i, k)] * x1 + a[(i, k + 1)] * x2;
                    }
                }
            }
        }
        // D z = y
        for &block in &self.blocks {
            match block {
                Block::One(k) => x[k] /= a[(k, k)],
                Block::Two(k) => {
                    let (d11, d21, d22) = (a[(k, k)], a[(k + 1, k)], a[(k + 1, k + 1)]);
                    let det = d11 * d22 - d21 * d21;
                    let (y1, y2) = (x[k], x[k + 1]);
                    x[k] = (d22 * y1 - d21 * y2) / det;
                    x[k + 1] = (d11 * y2 - d21 * y1) / det;
                }
            }
        }
        // L^T w = z
        for &block in self.blocks.iter().rev() {
            let (k, width) = match block {
                Block::One(k) => (k, 1),
                Block::Two(k) => (k, 2),
            };
            for c in k..k + width {
                let s: f64 = (k + width..n).map(|i| a[(i, c)] * x[i]).sum();
                x[c] -= s;
            }
        }
        for &(i, j) in self.swaps.iter().rev() {
            x.swap(i, j);
        }
        x
    }

    /// `det A = det D`.
    pub fn determinant(&self) -> Determinant {
        let a = &self.a;
        self.blocks.iter().fold(Determinant::ONE, |acc, &block| {
            let d = match block {
                Block::One(k) => a[(k, k)],
                Block::Two(k) => a[(k, k)] * a[(k + 1, k + 1)] - a[(k + 1, k)] * a[(k + 1, k)],
            };
            acc * Determinant::from_value(d)
        })
    }
}

fn swap_symmetric(a: &mut Matrix, p: usize, q: usize) {
    let n = a.rows();
    for j in 0..n {
        let t = a[(p, j)];
        a[(p, j)] = a[(q, j)];
        a[(q, j)] = t;
    }
    for i in 0..n {
        let t = a[(i, p)];
        a[(i, p)] = a[(i, q)];
        a[(i, q)] = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Lu;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
        a.matvec(x)
            .iter()
            .zip(b)
            .map(|(r, b)| (r - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_diagonal_needs_two_by_two_pivot() {
        let a = Matrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let f = SymmetricIndefinite::factor(&a, 1e-12).unwrap();
        assert_eq!(f.solve(&[3.0, 5.0]), vec![5.0, 3.0]);
        assert_eq!(f.determinant().value(), -1.0);
    }

    #[test]
    fn saddle_point_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(4..30);
            let m = rng.gen_range(0..4);
            let g = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let mut spd = g.transpose().matmul(&g);
            for i in 0..n {
                spd[(i, i)] += 1.0;
            }
            let p = Matrix::from_fn(n, m, |_, _| rng.gen_range(-3.0..3.0));
            let full = Matrix::from_fn(n + m, n + m, |i, j| match (i < n, j < n) {
                (true, true) => spd[(i, j)],
                (true, false) => p[(i, j - n)],
                (false, true) => p[(j, i - n)],
                (false, false) => 0.0,
            });
            let b: Vec<f64> = (0..n + m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = SymmetricIndefinite::factor(&full, 1e-12).unwrap();
            let x = f.solve(&b);
            assert!(residual(&full, &x, &b) < 1e-10);
            let det_lu = Lu::factor(&full).determinant();
            assert!(det_lu.relative_difference(&f.determinant()) < 1e-9);
        }
    }

    #[test]
    fn detects_singularity() {
        let a = Matrix::from_row_major(3, 3, vec![1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert!(SymmetricIndefinite::factor(&a, 1e-12).is_err());
    }
}
