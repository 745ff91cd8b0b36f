//! Singular values by one-sided (Hestenes) Jacobi rotations.

use alloc::vec::Vec;

use super::{dot, Matrix};

const MAX_SWEEPS: usize = 80;

/// Singular values of `a` in descending order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let (rows, cols) = (a.rows(), a.cols());
    // Work on A^T when A is wide so the orthogonalized vectors are the longer side.
    let cols_as_rows = if rows >= cols { a.transpose() } else { a.clone() };
    let k = cols_as_rows.rows();
    let mut u: Vec<Vec<f64>> = (0..k).map(|i| cols_as_rows.row(i).to_vec()).collect();
    let mut norms: Vec<f64> = u.iter().map(|c| dot(c, c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&u[p], &u[q]);
                if gamma.abs() <= f64::EPSILON * libm::sqrt(alpha) * libm::sqrt(beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let (head, tail) = u.split_at_mut(q);
                let (up, uq) = (&mut head[p], &mut tail[0]);
                for (x, y) in up.iter_mut().zip(uq.iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
                norms[p] = dot(up, up);
                norms[q] = dot(uq, uq);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<f64> = norms.iter().map(|&n| libm::sqrt(n)).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn diagonal_and_rectangular() {
        let d = Matrix::diagonal(&[1.0, -10.0, 3.0]);
        assert_eq!(singular_values(&d), vec![10.0, 3.0, 1.0]);
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5)
        let a = Matrix::from_row_major(2, 2, vec![3.0, 0.0, 4.0, 5.0]);
        let s = singular_values(&a);
        assert!((s[0] - 45f64.sqrt()).abs() < 1e-14);
        assert!((s[1] - 5f64.sqrt()).abs() < 1e-14);
        let wide = Matrix::from_row_major(1, 3, vec![1.0, 2.0, 2.0]);
        assert_eq!(singular_values(&wide), vec![3.0]);
    }
}
