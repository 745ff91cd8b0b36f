//! Assembly of the augmented interpolation system
//!
//! ```text
//! M = [ B   P ]    rhs = [ h ]
//!     [ P^T 0 ]          [ 0 ]
//! ```
//!
//! with `B_ij = phi(|x_i - x_j|)` and `P` holding the polynomial tail's
//! monomials evaluated at the sites.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{dist, SpatialGrid, BRUTE_FORCE_LIMIT};
use crate::linalg::{CsrMatrix, Matrix};
use crate::{Error, Kernel, NormalizeTransform, PointCloud, Result, MAX_DIM};

/// Polynomial tail of total degree at most `degree` in `dim` variables.
///
/// Monomials are in graded order, and lexicographic within a degree:
/// `1, x, y, z, x^2, xy, xz, y^2, yz, z^2` (truncated to the dimension and
/// degree). `degree == None` means no tail at all (`m = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyBasis {
    dim: usize,
    degree: Option<u8>,
    exponents: Vec<[u8; MAX_DIM]>,
}

impl PolyBasis {
    pub fn new(dim: usize, degree: Option<u8>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::invalid_config(alloc::format!(
                "polynomial dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if degree.is_some_and(|d| d > 2) {
            return Err(Error::invalid_config("polynomial degree must be 0, 1 or 2"));
        }
        let mut exponents = Vec::new();
        if let Some(max) = degree {
            for total in 0..=max {
                push_exponents(dim, total, &mut [0; MAX_DIM], 0, &mut exponents);
            }
        }
        Ok(PolyBasis { dim, degree, exponents })
    }

    pub fn none(dim: usize) -> Result<Self> {
        PolyBasis::new(dim, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> Option<u8> {
        self.degree
    }

    /// Number of monomials, `C(degree + dim, dim)`, or 0 without a tail.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Writes the monomials at `p` into `out` (length [`len`](Self::len)).
    pub fn eval_into(&self, p: &[f64], out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.exponents) {
            let mut v = 1.0;
            for (&x, &k) in p.iter().zip(e) {
                for _ in 0..k {
                    v *= x;
                }
            }
            *o = v;
        }
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }

    /// `sum_k coeffs[k] * monomial_k(p)`.
    pub fn eval_poly(&self, coeffs: &[f64], p: &[f64]) -> f64 {
        let mut buf = [0.0; 10];
        let mono = &mut buf[..self.len()];
        self.eval_into(p, mono);
        mono.iter().zip(coeffs).map(|(m, c)| m * c).sum()
    }

    /// Human-readable monomial names, e.g. `["1", "x", "y", "x^2", "xy", "y^2"]`.
    pub fn monomial_names(&self) -> Vec<alloc::string::String> {
        const AXES: [&str; 3] = ["x", "y", "z"];
        self.exponents
            .iter()
            .map(|e| {
                let mut s = alloc::string::String::new();
                for (axis, &k) in AXES.iter().zip(e) {
                    match k {
                        0 => {}
                        1 => s.push_str(axis),
                        _ => {
                            s.push_str(axis);
                            s.push('^');
                            s.push(char::from(b'0' + k));
                        }
                    }
                }
                if s.is_empty() {
                    s.push('1');
                }
                s
            })
            .collect()
    }
}

fn push_exponents(dim: usize, remaining: u8, current: &mut [u8; MAX_DIM], axis: usize, out: &mut Vec<[u8; MAX_DIM]>) {
    if axis + 1 == dim {
        current[axis] = remaining;
        out.push(*current);
        current[axis] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[axis] = k;
        push_exponents(dim, remaining - k, current, axis + 1, out);
    }
    current[axis] = 0;
}

/// Storage of the kernel block `B`.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockMatrix {
    Dense(Matrix),
    Sparse(CsrMatrix),
}

impl BlockMatrix {
    pub fn dim(&self) -> usize {
        match self {
            BlockMatrix::Dense(m) => m.rows(),
            BlockMatrix::Sparse(m) => m.dim(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            BlockMatrix::Dense(m) => m.matvec(x),
            BlockMatrix::Sparse(m) => m.matvec(x),
        }
    }

    pub fn to_dense(&self) -> Matrix {
        match self {
            BlockMatrix::Dense(m) => m.clone(),
            BlockMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        match self {
            BlockMatrix::Dense(m) => m.norm_inf(),
            BlockMatrix::Sparse(m) => m.norm_inf(),
        }
    }
}

/// An assembled interpolation problem ready for one of the solvers.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    kernel: Kernel,
    poly: PolyBasis,
    dim: usize,
    centers: Vec<f64>,
    b: BlockMatrix,
    p: Matrix,
    rhs: Vec<f64>,
    normalization: NormalizeTransform,
}

impl BlockSystem {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn poly(&self) -> &PolyBasis {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of sites.
    pub fn n(&self) -> usize {
        self.b.dim()
    }

    /// Number of polynomial terms.
    pub fn m(&self) -> usize {
        self.poly.len()
    }

    /// Order of the full system, `n + m`.
    pub fn size(&self) -> usize {
        self.n() + self.m()
    }

    /// Sites the system was assembled on (row-major).
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn b(&self) -> &BlockMatrix {
        &self.b
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// The `h` part of the right-hand side.
    pub fn values(&self) -> &[f64] {
        &self.rhs[..self.n()]
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.b, BlockMatrix::Sparse(_))
    }

    /// Transform that maps user coordinates onto [`centers`](Self::centers).
    pub fn normalization(&self) -> &NormalizeTransform {
        &self.normalization
    }

    pub(crate) fn with_normalization(mut self, t: NormalizeTransform) -> Self {
        self.normalization = t;
        self
    }

    /// The full `(n + m) x (n + m)` matrix `M`.
    pub fn full_matrix(&self) -> Matrix {
        let (n, m) = (self.n(), self.m());
        let mut full = Matrix::zeros(n + m, n + m);
        match &self.b {
            BlockMatrix::Dense(b) => {
                for i in 0..n {
                    full.row_mut(i)[..n].copy_from_slice(b.row(i));
                }
            }
            BlockMatrix::Sparse(b) => {
                for i in 0..n {
                    for (j, v) in b.row(i) {
                        full[(i, j)] = v;
                    }
                }
            }
        }
        for i in 0..n {
            for k in 0..m {
                full[(i, n + k)] = self.p[(i, k)];
                full[(n + k, i)] = self.p[(i, k)];
            }
        }
        full
    }

    /// `M x` for `x = [lambda; a]`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), self.size());
        let (lambda, a) = x.split_at(n);
        let mut out = self.b.matvec(lambda);
        for (o, pa) in out.iter_mut().zip(self.p.matvec(a)) {
            *o += pa;
        }
        out.extend(self.p.tr_matvec(lambda));
        out
    }

    /// `||M x - rhs||_inf`.
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .fold(0.0, |m, (r, b)| m.max((r - b).abs()))
    }

    pub fn norm_inf(&self) -> f64 {
        // Row sums of [B P] and of [P^T 0].
        let (n, m) = (self.n(), self.m());
        let mut norm: f64 = 0.0;
        match &self.b {
            BlockMatrix::Dense(b) => {
                for i in 0..n {
                    let s: f64 = b.row(i).iter().chain(self.p.row(i)).map(|v| v.abs()).sum();
                    norm = norm.max(s);
                }
            }
            BlockMatrix::Sparse(b) => {
                for i in 0..n {
                    let s: f64 = b.row(i).map(|(_, v)| v.abs()).sum::<f64>()
                        + self.p.row(i).iter().map(|v| v.abs()).sum::<f64>();
                    norm = norm.max(s);
                }
            }
        }
        for k in 0..m {
            norm = norm.max((0..n).map(|i| self.p[(i, k)].abs()).sum());
        }
        norm
    }
}

/// Rejects kernel/tail combinations without a unique interpolant.
pub fn check_compatibility(kernel: &Kernel, poly: &PolyBasis) -> Result<()> {
    match (kernel.kind().min_poly_degree(), poly.degree()) {
        (Some(min), None) => Err(Error::invalid_config(alloc::format!(
            "{} requires a polynomial tail of degree >= {min}",
            kernel.kind()
        ))),
        (Some(min), Some(d)) if d < min => Err(Error::invalid_config(alloc::format!(
            "{} requires a polynomial tail of degree >= {min}, got {d}",
            kernel.kind()
        ))),
        _ => Ok(()),
    }
}

fn check_inputs(cloud: &PointCloud, kernel: &Kernel, poly: &PolyBasis) -> Result<()> {
    if cloud.dim() != poly.dim() {
        return Err(Error::invalid_config(alloc::format!(
            "polynomial basis is {}-D but the cloud is {}-D",
            poly.dim(),
            cloud.dim()
        )));
    }
    check_compatibility(kernel, poly)
}

fn assemble_p(cloud: &PointCloud, poly: &PolyBasis) -> Matrix {
    let m = poly.len();
    let mut p = Matrix::zeros(cloud.len(), m);
    for (i, x) in cloud.points().enumerate() {
        poly.eval_into(x, p.row_mut(i));
    }
    p
}

fn finish(cloud: &PointCloud, kernel: &Kernel, poly: &PolyBasis, b: BlockMatrix) -> BlockSystem {
    let mut rhs = cloud.values().to_vec();
    rhs.resize(cloud.len() + poly.len(), 0.0);
    BlockSystem {
        kernel: *kernel,
        poly: poly.clone(),
        dim: cloud.dim(),
        centers: cloud.coords().to_vec(),
        b,
        p: assemble_p(cloud, poly),
        rhs,
        normalization: NormalizeTransform::identity(cloud.dim()),
    }
}

/// Kernel value for the unordered pair `{i, j}`; evaluated in a fixed
/// orientation so that both triangles see bit-identical values.
#[inline]
fn pair_value(cloud: &PointCloud, kernel: &Kernel, i: usize, j: usize) -> f64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    kernel.eval(dist(cloud.point(lo), cloud.point(hi)))
}

/// Assembles the system with a dense `B`.
pub fn assemble_dense(cloud: &PointCloud, kernel: &Kernel, poly: &PolyBasis) -> Result<BlockSystem> {
    check_inputs(cloud, kernel, poly)?;
    let n = cloud.len();
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = kernel.eval(0.0);
        for j in i + 1..n {
            let v = pair_value(cloud, kernel, i, j);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    Ok(finish(cloud, kernel, poly, BlockMatrix::Dense(b)))
}

/// Assembles the system with `B` in compressed rows. Only pairs inside the
/// kernel's support are stored, plus the full diagonal.
pub fn assemble_sparse(cloud: &PointCloud, kernel: &Kernel, poly: &PolyBasis) -> Result<BlockSystem> {
    check_inputs(cloud, kernel, poly)?;
    if !kernel.is_compact() {
        return Err(Error::invalid_config(alloc::format!(
            "sparse assembly needs a compactly supported kernel, got {}",
            kernel.kind()
        )));
    }
    let rows = support_rows(cloud, kernel)
        .into_iter()
        .enumerate()
        .map(|(i, cols)| {
            cols.into_iter()
                .map(|j| {
                    let v = if i == j {
                        kernel.eval(0.0)
                    } else {
                        pair_value(cloud, kernel, i, j)
                    };
                    (j, v)
                })
                .collect()
        })
        .collect();
    Ok(finish(
        cloud,
        kernel,
        poly,
        BlockMatrix::Sparse(CsrMatrix::from_rows(rows)),
    ))
}

/// For each site, the ascending indices `j` with `kernel.in_support(|x_i - x_j|)`.
pub(crate) fn support_rows(cloud: &PointCloud, kernel: &Kernel) -> Vec<Vec<usize>> {
    let n = cloud.len();
    let in_support = |i: usize, j: usize| i == j || kernel.in_support(dist(cloud.point(i), cloud.point(j)));
    let radius = kernel.support_radius();
    if n < BRUTE_FORCE_LIMIT || !radius.is_finite() {
        return (0..n).map(|i| (0..n).filter(|&j| in_support(i, j)).collect()).collect();
    }
    // Slightly enlarged cells so that rounding in `shape * r < 1` versus
    // `r < 1 / shape` cannot drop a candidate.
    let grid = SpatialGrid::new(cloud, radius * (1.0 + 1e-9));
    (0..n)
        .map(|i| {
            let mut cols = Vec::new();
            grid.for_each_candidate(cloud.point(i), |j| {
                if in_support(i, j) {
                    cols.push(j);
                }
            });
            cols.sort_unstable();
            cols
        })
        .collect()
}

/// `P^T lambda` for sites `centers` (row-major, `poly.dim()` per site).
pub fn side_condition_defect(poly: &PolyBasis, centers: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
    if centers.len() != lambda.len() * poly.dim() {
        return Err(Error::invalid_input(alloc::format!(
            "{} weights do not match {} coordinates in {}-D",
            lambda.len(),
            centers.len(),
            poly.dim()
        )));
    }
    let m = poly.len();
    let mut defect = vec![0.0; m];
    let mut mono = vec![0.0; m];
    for (x, &l) in centers.chunks_exact(poly.dim()).zip(lambda) {
        poly.eval_into(x, &mut mono);
        for (d, v) in defect.iter_mut().zip(&mono) {
            *d += l * v;
        }
    }
    Ok(defect)
}
