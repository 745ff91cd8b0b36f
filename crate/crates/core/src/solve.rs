//! Solvers for the assembled system and evaluation of the fitted interpolant.
//!
//! Three interchangeable paths produce the same [`InterpolantModel`]:
//!
//! * [`solve_direct`] factors the whole symmetric indefinite matrix with
//!   Bunch–Kaufman pivoting.
//! * [`solve_schur`] eliminates the kernel block first. With `G = P^T B^-1 P`
//!   (so the signed Schur complement of `B` is `S = -G`), the tail solves
//!   `G a = P^T B^-1 h` and the weights follow from `B lambda = h - P a`.
//! * [`solve_sparse_cg`] runs the same elimination with every `B` solve done
//!   by conjugate gradients on the sparse kernel block.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::assembly::{assemble_dense, assemble_sparse, side_condition_defect, BlockMatrix, BlockSystem};
use crate::geometry::{dist, SpatialGrid, BRUTE_FORCE_LIMIT};
use crate::linalg::{conjugate_gradient, pivot_threshold, Cholesky, CsrMatrix, Matrix, SymmetricIndefinite};
use crate::{Error, Kernel, NormalizeTransform, PointCloud, PolyBasis, Result};

pub const DEFAULT_CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Direct,
    Schur,
    Cg,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Direct => "direct",
            SolverKind::Schur => "schur",
            SolverKind::Cg => "cg",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SolverKind::Direct),
            "schur" => Ok(SolverKind::Schur),
            "cg" => Ok(SolverKind::Cg),
            other => Err(Error::invalid_config(alloc::format!(
                "unknown solver `{other}` (expected direct, schur or cg)"
            ))),
        }
    }
}

/// How a model was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub solver: SolverKind,
    /// `||M x - rhs||_inf` of the computed solution.
    pub residual: f64,
    /// Iteration count of every CG solve, in order; empty for dense solvers.
    pub cg_iterations: Vec<usize>,
}

/// A fitted interpolant
/// `f(x) = sum_j lambda_j phi(|x' - c_j|) + sum_k a_k monomial_k(x')`,
/// where `x'` is the query mapped through the stored normalization.
#[derive(Debug, Clone)]
pub struct InterpolantModel {
    kernel: Kernel,
    poly: PolyBasis,
    centers: Vec<f64>,
    lambda: Vec<f64>,
    poly_coeffs: Vec<f64>,
    normalization: NormalizeTransform,
    fit: FitReport,
    index: Option<SpatialGrid>,
}

impl PartialEq for InterpolantModel {
    fn eq(&self, other: &Self) -> bool {
        self.kernel == other.kernel
            && self.poly == other.poly
            && self.centers == other.centers
            && self.lambda == other.lambda
            && self.poly_coeffs == other.poly_coeffs
            && self.normalization == other.normalization
            && self.fit == other.fit
    }
}

impl InterpolantModel {
    /// Reassembles a model from its stored parts, checking that they fit
    /// together.
    pub fn from_parts(
        kernel: Kernel,
        poly: PolyBasis,
        centers: Vec<f64>,
        lambda: Vec<f64>,
        poly_coeffs: Vec<f64>,
        normalization: NormalizeTransform,
        fit: FitReport,
    ) -> Result<Self> {
        let dim = poly.dim();
        if lambda.is_empty() {
            return Err(Error::invalid_input("model has no centers"));
        }
        if centers.len() != lambda.len() * dim {
            return Err(Error::invalid_input(alloc::format!(
                "{} center coordinates do not match {} weights in {dim}-D",
                centers.len(),
                lambda.len()
            )));
        }
        if poly_coeffs.len() != poly.len() {
            return Err(Error::invalid_input(alloc::format!(
                "expected {} polynomial coefficients, got {}",
                poly.len(),
                poly_coeffs.len()
            )));
        }
        if normalization.dim() != dim {
            return Err(Error::invalid_input("normalization dimension differs from the model"));
        }
        if centers
            .iter()
            .chain(&lambda)
            .chain(&poly_coeffs)
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid_input("model contains non-finite numbers"));
        }
        let index = (kernel.is_compact() && lambda.len() >= BRUTE_FORCE_LIMIT)
            .then(|| SpatialGrid::from_coords(dim, &centers, kernel.support_radius() * (1.0 + 1e-9)));
        Ok(InterpolantModel {
            kernel,
            poly,
            centers,
            lambda,
            poly_coeffs,
            normalization,
            fit,
            index,
        })
    }

    fn from_solution(system: &BlockSystem, solver: SolverKind, x: Vec<f64>, cg_iterations: Vec<usize>) -> Result<Self> {
        let residual = system.residual_inf(&x);
        let mut lambda = x;
        let poly_coeffs = lambda.split_off(system.n());
        if lambda.iter().chain(&poly_coeffs).any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem { pivot: 0.0 });
        }
        InterpolantModel::from_parts(
            *system.kernel(),
            system.poly().clone(),
            system.centers().to_vec(),
            lambda,
            poly_coeffs,
            system.normalization().clone(),
            FitReport {
                solver,
                residual,
                cg_iterations,
            },
        )
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn poly(&self) -> &PolyBasis {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Centers in the normalized frame, row-major.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Tail coefficients in [`PolyBasis`] monomial order, normalized frame.
    pub fn poly_coeffs(&self) -> &[f64] {
        &self.poly_coeffs
    }

    pub fn normalization(&self) -> &NormalizeTransform {
        &self.normalization
    }

    pub fn fit_report(&self) -> &FitReport {
        &self.fit
    }

    /// `P^T lambda` over the model's centers.
    pub fn side_condition_defect(&self) -> Vec<f64> {
        side_condition_defect(&self.poly, &self.centers, &self.lambda).expect("model parts are consistent")
    }

    pub fn evaluate(&self, query: &[f64]) -> Result<f64> {
        let x = self.normalization.apply(query)?;
        let dim = self.dim();
        let center = |j: usize| &self.centers[j * dim..(j + 1) * dim];
        let mut sum = 0.0;
        match &self.index {
            Some(grid) => {
                let mut hits = Vec::new();
                grid.for_each_candidate(&x, |j| {
                    let r = dist(&x, center(j));
                    if self.kernel.in_support(r) {
                        hits.push((j, r));
                    }
                });
                hits.sort_unstable_by_key(|h| h.0);
                for (j, r) in hits {
                    sum += self.lambda[j] * self.kernel.eval(r);
                }
            }
            None => {
                for (j, &l) in self.lambda.iter().enumerate() {
                    let r = dist(&x, center(j));
                    if self.kernel.in_support(r) {
                        sum += l * self.kernel.eval(r);
                    }
                }
            }
        }
        Ok(sum + self.poly.eval_poly(&self.poly_coeffs, &x))
    }

    /// Values at every node of `grid`, in its row-major node order.
    pub fn evaluate_grid(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        if grid.dim() != self.dim() {
            return Err(Error::invalid_input(alloc::format!(
                "grid is {}-D but the model is {}-D",
                grid.dim(),
                self.dim()
            )));
        }
        let mut node = vec![0.0; grid.dim()];
        (0..grid.len())
            .map(|i| {
                grid.node_into(i, &mut node);
                self.evaluate(&node)
            })
            .collect()
    }
}

/// One axis of a Cartesian evaluation grid: `count` equally spaced nodes
/// from `min` to `max` inclusive (a single node sits at `min`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn node(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.min
        } else if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * (i as f64) / ((self.count - 1) as f64)
        }
    }
}

/// Cartesian grid; node order is row-major with the first axis varying
/// slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > crate::MAX_DIM {
            return Err(Error::invalid_input("grid must have 1 to 3 axes"));
        }
        for (k, a) in axes.iter().enumerate() {
            if a.count == 0 {
                return Err(Error::invalid_input(alloc::format!("grid axis {k} has no nodes")));
            }
            if !(a.min.is_finite() && a.max.is_finite()) || a.min > a.max {
                return Err(Error::invalid_input(alloc::format!(
                    "grid axis {k} has an invalid range {}..{}",
                    a.min,
                    a.max
                )));
            }
        }
        Ok(GridSpec { axes })
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node_into(&self, mut index: usize, out: &mut [f64]) {
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = axis.node(index % axis.count);
            index /= axis.count;
        }
    }

    pub fn node(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(index, &mut out);
        out
    }
}

/// Solves the full system with a pivoted symmetric indefinite factorization.
pub fn solve_direct(system: &BlockSystem) -> Result<InterpolantModel> {
    let threshold = pivot_threshold(system.norm_inf());
    let factor = SymmetricIndefinite::factor(&system.full_matrix(), threshold)
        .map_err(|pivot| Error::SingularSystem { pivot })?;
    let x = factor.solve(system.rhs());
    InterpolantModel::from_solution(system, SolverKind::Direct, x, Vec::new())
}

/// Block elimination through the Schur complement of the kernel block.
/// Needs a positive definite `B` (Gaussian or Wendland kernels).
pub fn solve_schur(system: &BlockSystem) -> Result<InterpolantModel> {
    let b = system.b().to_dense();
    let chol =
        Cholesky::factor(&b, pivot_threshold(b.norm_inf())).map_err(|pivot| Error::SingularKernelBlock { pivot })?;
    let (lambda, a) = eliminate(system, |rhs| Ok(chol.solve(rhs)))?;
    let mut x = lambda;
    x.extend(a);
    InterpolantModel::from_solution(system, SolverKind::Schur, x, Vec::new())
}

/// Schur elimination with every kernel-block solve done by Jacobi-
/// preconditioned CG on the sparse `B`.
pub fn solve_sparse_cg(system: &BlockSystem, tol: f64, max_iter: usize) -> Result<InterpolantModel> {
    let BlockMatrix::Sparse(b) = system.b() else {
        return Err(Error::invalid_config("the CG solver needs a sparse kernel block"));
    };
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::invalid_config(
            "CG tolerance and iteration limit must be positive",
        ));
    }
    let mut iterations = Vec::new();
    let (lambda, a) = eliminate(system, |rhs| cg_solve(b, rhs, tol, max_iter, &mut iterations))?;
    let mut x = lambda;
    x.extend(a);
    InterpolantModel::from_solution(system, SolverKind::Cg, x, iterations)
}

fn cg_solve(b: &CsrMatrix, rhs: &[f64], tol: f64, max_iter: usize, log: &mut Vec<usize>) -> Result<Vec<f64>> {
    match conjugate_gradient(b, rhs, tol, max_iter) {
        Ok(out) => {
            log.push(out.iterations);
            Ok(out.x)
        }
        Err(fail) => Err(Error::NoConvergence {
            iterations: fail.iterations,
            residual: fail.relative_residual,
        }),
    }
}

/// Returns `(lambda, a)` given a routine applying `B^-1`.
fn eliminate(
    system: &BlockSystem,
    mut b_solve: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, m) = (system.n(), system.m());
    let h = system.values();
    if m == 0 {
        return Ok((b_solve(h)?, Vec::new()));
    }
    let p = system.p();
    // W = B^-1 P, column by column.
    let mut w = Matrix::zeros(n, m);
    for k in 0..m {
        let col = b_solve(&p.column(k))?;
        for (i, v) in col.into_iter().enumerate() {
            w[(i, k)] = v;
        }
    }
    let y = b_solve(h)?;
    // G = P^T W = -S
    let g = p.transpose().matmul(&w);
    let g = Matrix::from_fn(m, m, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    let g_chol = Cholesky::factor(&g, pivot_threshold(g.norm_inf()))
        .map_err(|pivot| Error::RankDeficientPolynomial { pivot })?;
    let a = g_chol.solve(&p.tr_matvec(&y));
    let pa = p.matvec(&a);
    let reduced: Vec<f64> = h.iter().zip(&pa).map(|(h, pa)| h - pa).collect();
    Ok((b_solve(&reduced)?, a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub solver: SolverKind,
    /// Map the sites into `[-1, 1]^d` before assembly.
    pub normalize: bool,
    pub cg_tol: f64,
    /// Defaults to `10 N` when `None`.
    pub cg_max_iter: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            solver: SolverKind::Direct,
            normalize: true,
            cg_tol: DEFAULT_CG_TOL,
            cg_max_iter: None,
        }
    }
}

/// Assembles the system appropriate for `options` (in the normalized frame
/// when requested; the kernel shape is rescaled so its physical support and
/// width are preserved).
pub fn prepare_system(
    cloud: &PointCloud,
    kernel: &Kernel,
    poly: &PolyBasis,
    options: &FitOptions,
) -> Result<BlockSystem> {
    let (cloud, kernel, transform) = if options.normalize {
        let t = NormalizeTransform::fit(cloud);
        (t.apply_cloud(cloud)?, kernel.rescaled(t.half_extent()), t)
    } else {
        (cloud.clone(), *kernel, NormalizeTransform::identity(cloud.dim()))
    };
    let system = match options.solver {
        SolverKind::Cg => assemble_sparse(&cloud, &kernel, poly)?,
        SolverKind::Direct | SolverKind::Schur => assemble_dense(&cloud, &kernel, poly)?,
    };
    Ok(system.with_normalization(transform))
}

/// Fits an interpolant to `cloud` end to end.
pub fn fit(cloud: &PointCloud, kernel: &Kernel, poly: &PolyBasis, options: &FitOptions) -> Result<InterpolantModel> {
    let system = prepare_system(cloud, kernel, poly, options)?;
    match options.solver {
        SolverKind::Direct => solve_direct(&system),
        SolverKind::Schur => solve_schur(&system),
        SolverKind::Cg => {
            let max_iter = options.cg_max_iter.unwrap_or(10 * cloud.len());
            solve_sparse_cg(&system, options.cg_tol, max_iter)
        }
    }
}
