//! JSON persistence of fitted models.
//!
//! ```json
//! {
//!   "version": 1,
//!   "kernel": {"kind": "wendland-c2", "shape": 0.5},
//!   "dim": 2,
//!   "centers": [[-1.0, -1.0], ...],
//!   "lambda": [...],
//!   "poly": {"degree": 1, "coeffs": [...]},
//!   "normalize": {"center": [0.5, 0.5], "half_extent": 0.5},
//!   "fit": {"solver": "direct", "residual": 1e-15, "cg_iterations": []}
//! }
//! ```
//!
//! Centers, weights and the kernel shape are stored in the normalized frame,
//! exactly as the model holds them. Floats are written in shortest
//! round-trip form, so a load reproduces every field bit for bit.

use std::path::Path;

use csrbf_core::solve::FitReport;
use csrbf_core::{InterpolantModel, Kernel, NormalizeTransform, PolyBasis};
use serde::{Deserialize, Serialize};

use crate::{write_atomic, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u32,
    kernel: KernelJson,
    dim: usize,
    centers: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    poly: PolyJson,
    normalize: NormalizeJson,
    fit: FitJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelJson {
    kind: String,
    shape: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    degree: Option<u8>,
    coeffs: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizeJson {
    center: Vec<f64>,
    half_extent: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitJson {
    solver: String,
    /// `null` when the residual is not finite.
    residual: Option<f64>,
    #[serde(default)]
    cg_iterations: Vec<usize>,
}

pub fn model_to_json(model: &InterpolantModel) -> String {
    let file = ModelFile {
        version: SCHEMA_VERSION,
        kernel: KernelJson {
            kind: model.kernel().kind().name().to_owned(),
            shape: model.kernel().shape(),
        },
        dim: model.dim(),
        centers: model.centers().chunks_exact(model.dim()).map(<[f64]>::to_vec).collect(),
        lambda: model.lambda().to_vec(),
        poly: PolyJson {
            degree: model.poly().degree(),
            coeffs: model.poly_coeffs().to_vec(),
        },
        normalize: NormalizeJson {
            center: model.normalization().center().to_vec(),
            half_extent: model.normalization().half_extent(),
        },
        fit: FitJson {
            solver: model.fit_report().solver.name().to_owned(),
            residual: Some(model.fit_report().residual).filter(|r| r.is_finite()),
            cg_iterations: model.fit_report().cg_iterations.clone(),
        },
    };
    let mut text = serde_json::to_string_pretty(&file).expect("model serialization cannot fail");
    text.push('\n');
    text
}

pub fn write_model_json(model: &InterpolantModel, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), model_to_json(model).as_bytes())
}

/// Parses a model; `path` only labels errors.
pub fn model_from_json(text: &str, path: &Path) -> Result<InterpolantModel> {
    let schema = |message: String| Error::ModelSchema {
        path: path.to_path_buf(),
        version: SCHEMA_VERSION,
        message,
    };
    let file: ModelFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    if file.version != SCHEMA_VERSION {
        return Err(schema(format!("unsupported version {}", file.version)));
    }
    if let Some((i, c)) = file.centers.iter().enumerate().find(|(_, c)| c.len() != file.dim) {
        return Err(schema(format!(
            "center {i} has {} coordinates, expected {}",
            c.len(),
            file.dim
        )));
    }
    let invalid = |e: csrbf_core::Error| schema(e.to_string());
    let kind = file.kernel.kind.parse().map_err(invalid)?;
    let kernel = Kernel::new(kind, file.kernel.shape).map_err(invalid)?;
    let poly = PolyBasis::new(file.dim, file.poly.degree).map_err(invalid)?;
    csrbf_core::assembly::check_compatibility(&kernel, &poly).map_err(invalid)?;
    let normalization = NormalizeTransform::new(file.normalize.center, file.normalize.half_extent).map_err(invalid)?;
    let fit = FitReport {
        solver: file.fit.solver.parse().map_err(invalid)?,
        residual: file.fit.residual.unwrap_or(f64::NAN),
        cg_iterations: file.fit.cg_iterations,
    };
    let centers = file.centers.into_iter().flatten().collect();
    InterpolantModel::from_parts(kernel, poly, centers, file.lambda, file.poly.coeffs, normalization, fit)
        .map_err(invalid)
}

pub fn read_model_json(path: impl AsRef<Path>) -> Result<InterpolantModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    model_from_json(&text, path)
}
