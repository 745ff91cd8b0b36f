//! Conditioning diagnostics for the augmented system.
//!
//! Block elimination gives `det M = det B * det S` with the signed Schur
//! complement `S = -P^T B^-1 P`. The polynomial block carries the absolute
//! position of the sites: translating every site by `T` leaves `det(P^T P)`
//! unchanged in exact arithmetic (it is a unit-determinant column operation
//! on `P`), but the entries of `P^T P` grow like `T^2` and the condition
//! number of `M` grows with them. [`translation_experiment`] measures that,
//! together with the same sweep run through the normalizing pipeline.

use alloc::vec::Vec;

use crate::assembly::{BlockMatrix, BlockSystem};
use crate::linalg::{singular_values, Determinant, Lu, Matrix};
use crate::solve::{prepare_system, solve_direct, FitOptions, SolverKind};
use crate::{Error, Kernel, PointCloud, PolyBasis, Result};

/// Largest system order for which determinants are computed.
pub const MAX_DETERMINANT_SIZE: usize = 1000;
/// Largest system order for which condition numbers are computed.
pub const MAX_CONDITION_SIZE: usize = 2000;

/// 2-norm condition number `sigma_max / sigma_min` from the full set of
/// singular values. Returns `f64::INFINITY` once `sigma_min` falls below
/// `eps * sigma_max`.
pub fn condition_estimate(matrix: &Matrix) -> Result<f64> {
    if !matrix.is_square() {
        return Err(Error::invalid_input(alloc::format!(
            "condition number needs a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if matrix.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_input("matrix contains non-finite entries"));
    }
    let sigma = singular_values(matrix);
    let (max, min) = match (sigma.first(), sigma.last()) {
        (Some(&max), Some(&min)) => (max, min),
        _ => return Ok(1.0),
    };
    if max == 0.0 || min < f64::EPSILON * max {
        return Ok(f64::INFINITY);
    }
    Ok((max / min).max(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantReport {
    pub det_b: Determinant,
    /// `det(-P^T B^-1 P)`; absent when `B` is singular.
    pub det_schur: Option<Determinant>,
    pub det_full: Determinant,
    /// `|det M - det B * det S| / |det M|`.
    pub identity_error: Option<f64>,
}

/// Computes `det B`, `det S` and `det M` from three independent LU
/// factorizations and checks `det M = det B * det S`.
pub fn determinant_report(system: &BlockSystem) -> Result<DeterminantReport> {
    if system.size() > MAX_DETERMINANT_SIZE {
        return Err(Error::invalid_input(alloc::format!(
            "determinants are computed densely up to order {MAX_DETERMINANT_SIZE}, system has {}",
            system.size()
        )));
    }
    let b = system.b().to_dense();
    let b_lu = Lu::factor(&b);
    let det_b = b_lu.determinant();
    let det_full = Lu::factor(&system.full_matrix()).determinant();
    let det_schur = (!det_b.is_zero()).then(|| {
        let s = signed_schur_complement(system.p(), |col| b_lu.solve(col));
        Lu::factor(&s).determinant()
    });
    let identity_error = det_schur.map(|s| det_full.relative_difference(&(det_b * s)));
    Ok(DeterminantReport {
        det_b,
        det_schur,
        det_full,
        identity_error,
    })
}

/// `-P^T B^-1 P` given a routine applying `B^-1` to a column.
fn signed_schur_complement(p: &Matrix, b_solve: impl Fn(&[f64]) -> Vec<f64>) -> Matrix {
    let m = p.cols();
    let mut s = Matrix::zeros(m, m);
    for j in 0..m {
        let w = b_solve(&p.column(j));
        let g = p.tr_matvec(&w);
        for i in 0..m {
            s[(i, j)] = -g[i];
        }
    }
    s
}

/// `P^T P` for the sites of `cloud`.
pub fn ptp_matrix(cloud: &PointCloud, poly: &PolyBasis) -> Matrix {
    let m = poly.len();
    let mut g = Matrix::zeros(m, m);
    let mut mono = alloc::vec![0.0; m];
    for x in cloud.points() {
        poly.eval_into(x, &mut mono);
        for i in 0..m {
            for j in 0..m {
                g[(i, j)] += mono[i] * mono[j];
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtpDrift {
    pub det_raw: f64,
    pub det_translated: f64,
    /// `|det_translated - det_raw| / |det_raw|`; zero in exact arithmetic.
    pub relative_drift: f64,
}

/// `det(P^T P)` for the linear tail before and after shifting every site by
/// `offset` along all axes.
pub fn ptp_translation_invariance_check(cloud: &PointCloud, offset: f64) -> Result<PtpDrift> {
    let poly = PolyBasis::new(cloud.dim(), Some(1))?;
    if cloud.len() < poly.len() {
        return Err(Error::invalid_input(alloc::format!(
            "need at least {} sites for a linear tail, got {}",
            poly.len(),
            cloud.len()
        )));
    }
    let det_raw = Lu::factor(&ptp_matrix(cloud, &poly)).determinant().value();
    let det_translated = if offset == 0.0 {
        det_raw
    } else {
        Lu::factor(&ptp_matrix(&cloud.translated(offset)?, &poly))
            .determinant()
            .value()
    };
    let diff = (det_translated - det_raw).abs();
    let relative_drift = if diff == 0.0 {
        0.0
    } else if det_raw == 0.0 {
        f64::INFINITY
    } else {
        diff / det_raw.abs()
    };
    Ok(PtpDrift {
        det_raw,
        det_translated,
        relative_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityReport {
    pub n: usize,
    pub nnz: usize,
    /// `nnz / n^2`.
    pub nnz_fraction: f64,
    /// Mean stored entries per row, the diagonal included.
    pub mean_row_nnz: f64,
    pub max_row_nnz: usize,
    pub bandwidth: usize,
    pub sparse_bytes: usize,
    pub dense_bytes: usize,
}

pub fn sparsity_report(system: &BlockSystem) -> Result<SparsityReport> {
    let BlockMatrix::Sparse(b) = system.b() else {
        return Err(Error::invalid_config("sparsity statistics need a sparse kernel block"));
    };
    let n = b.dim();
    let nnz = b.nnz();
    Ok(SparsityReport {
        n,
        nnz,
        nnz_fraction: nnz as f64 / (n as f64 * n as f64),
        mean_row_nnz: nnz as f64 / n as f64,
        max_row_nnz: (0..n).map(|i| b.row_len(i)).max().unwrap_or(0),
        bandwidth: b.bandwidth(),
        sparse_bytes: b.storage_bytes(),
        dense_bytes: n * n * core::mem::size_of::<f64>(),
    })
}

/// Everything the diagnostics suite reports for one assembled system.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub m: usize,
    /// Absent above [`MAX_CONDITION_SIZE`].
    pub cond_full: Option<f64>,
    pub cond_b: Option<f64>,
    /// Absent above [`MAX_DETERMINANT_SIZE`].
    pub determinants: Option<DeterminantReport>,
    /// `det(P^T P)`, the Schur determinant in the `B = I` regime up to sign.
    pub det_ptp: Option<f64>,
    pub max_ptp_entry: Option<f64>,
    /// `P^T lambda` after a direct solve.
    pub side_defect: Option<Vec<f64>>,
    pub fit_residual: Option<f64>,
    pub solve_error: Option<Error>,
    pub sparsity: Option<SparsityReport>,
}

pub fn diagnose(system: &BlockSystem) -> DiagnosticsReport {
    let size = system.size();
    let (cond_full, cond_b) = if size <= MAX_CONDITION_SIZE {
        (
            condition_estimate(&system.full_matrix()).ok(),
            condition_estimate(&system.b().to_dense()).ok(),
        )
    } else {
        (None, None)
    };
    let determinants = determinant_report(system).ok();
    let (det_ptp, max_ptp_entry) = if system.m() > 0 {
        let p = system.p();
        let g = p.transpose().matmul(p);
        (Some(Lu::factor(&g).determinant().value()), Some(g.max_abs()))
    } else {
        (None, None)
    };
    let (side_defect, fit_residual, solve_error) = match solve_direct(system) {
        Ok(model) => (
            Some(model.side_condition_defect()),
            Some(model.fit_report().residual),
            None,
        ),
        Err(e) => (None, None, Some(e)),
    };
    DiagnosticsReport {
        n: system.n(),
        m: system.m(),
        cond_full,
        cond_b,
        determinants,
        det_ptp,
        max_ptp_entry,
        side_defect,
        fit_residual,
        solve_error,
        sparsity: sparsity_report(system).ok(),
    }
}

/// Measurements for one offset of the translation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationRecord {
    pub offset: f64,
    /// `kappa(M)` assembled directly on the translated sites.
    pub cond_raw: f64,
    /// `kappa(M)` after normalizing the translated sites.
    pub cond_normalized: f64,
    pub det_ptp: f64,
    pub max_ptp_entry: f64,
    /// `||M x - rhs||_inf` of the direct solve on the raw system.
    pub residual: Option<f64>,
    /// The failure of this offset, if any.
    pub error: Option<Error>,
}

impl TranslationRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Shifts the cloud by `T` along every axis for each offset and records the
/// conditioning of the raw and the normalized systems. Per-offset failures
/// are recorded rather than returned.
pub fn translation_experiment(
    cloud: &PointCloud,
    kernel: &Kernel,
    poly: &PolyBasis,
    offsets: &[f64],
) -> Result<Vec<TranslationRecord>> {
    if !offsets.contains(&0.0) {
        return Err(Error::invalid_input("translation offsets must include 0"));
    }
    if let Some(bad) = offsets.iter().find(|o| !o.is_finite()) {
        return Err(Error::invalid_input(alloc::format!("offset {bad} is not finite")));
    }
    // Validates the kernel/tail combination once, up front.
    crate::assembly::check_compatibility(kernel, poly)?;
    Ok(offsets
        .iter()
        .map(|&offset| translation_record(cloud, kernel, poly, offset))
        .collect())
}

fn translation_record(cloud: &PointCloud, kernel: &Kernel, poly: &PolyBasis, offset: f64) -> TranslationRecord {
    let mut record = TranslationRecord {
        offset,
        cond_raw: f64::NAN,
        cond_normalized: f64::NAN,
        det_ptp: f64::NAN,
        max_ptp_entry: f64::NAN,
        residual: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let shifted = cloud.translated(offset)?;
        let g = ptp_matrix(&shifted, poly);
        record.det_ptp = Lu::factor(&g).determinant().value();
        record.max_ptp_entry = g.max_abs();

        let options = FitOptions {
            solver: SolverKind::Direct,
            normalize: false,
            ..FitOptions::default()
        };
        let raw = prepare_system(&shifted, kernel, poly, &options)?;
        record.cond_raw = condition_estimate(&raw.full_matrix())?;
        let normalized = prepare_system(
            &shifted,
            kernel,
            poly,
            &FitOptions {
                normalize: true,
                ..options
            },
        )?;
        record.cond_normalized = condition_estimate(&normalized.full_matrix())?;

        let model = solve_direct(&raw)?;
        record.residual = Some(model.fit_report().residual);
        Ok(())
    })();
    record.error = result.err();
    record
}
