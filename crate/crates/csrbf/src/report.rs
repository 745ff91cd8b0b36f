//! JSON reports of the diagnostics commands. Non-finite numbers are written
//! as `null`.

use std::path::Path;

use csrbf_core::diagnostics::{DeterminantReport, DiagnosticsReport, SparsityReport, TranslationRecord};
use csrbf_core::linalg::Determinant;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{write_atomic, Result};

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn determinant(d: &Determinant) -> Value {
    json!({ "sign": d.sign, "log_abs": num(d.log_abs), "value": num(d.value()) })
}

fn determinants(r: &DeterminantReport) -> Value {
    json!({
        "det_b": determinant(&r.det_b),
        "det_schur": r.det_schur.as_ref().map_or(Value::Null, determinant),
        "det_full": determinant(&r.det_full),
        "identity_error": opt(r.identity_error),
    })
}

#[derive(Serialize)]
struct Sparsity {
    n: usize,
    nnz: usize,
    nnz_fraction: f64,
    mean_row_nnz: f64,
    max_row_nnz: usize,
    bandwidth: usize,
    sparse_bytes: usize,
    dense_bytes: usize,
}

impl From<&SparsityReport> for Sparsity {
    fn from(s: &SparsityReport) -> Self {
        Sparsity {
            n: s.n,
            nnz: s.nnz,
            nnz_fraction: s.nnz_fraction,
            mean_row_nnz: s.mean_row_nnz,
            max_row_nnz: s.max_row_nnz,
            bandwidth: s.bandwidth,
            sparse_bytes: s.sparse_bytes,
            dense_bytes: s.dense_bytes,
        }
    }
}

pub fn diagnostics_json(r: &DiagnosticsReport) -> Value {
    json!({
        "n": r.n,
        "m": r.m,
        "cond_full": opt(r.cond_full),
        "cond_b": opt(r.cond_b),
        "determinants": r.determinants.as_ref().map_or(Value::Null, determinants),
        "det_ptp": opt(r.det_ptp),
        "max_ptp_entry": opt(r.max_ptp_entry),
        "side_defect": r.side_defect.as_ref().map_or(Value::Null, |d| d.iter().copied().map(num).collect()),
        "fit_residual": opt(r.fit_residual),
        "status": status(r.solve_error.as_ref()),
        "sparsity": r.sparsity.as_ref().map(Sparsity::from),
    })
}

fn status(error: Option<&csrbf_core::Error>) -> String {
    match error {
        None => "ok".to_owned(),
        Some(e) => format!("failed: {e}"),
    }
}

pub fn translation_json(records: &[TranslationRecord]) -> Value {
    records
        .iter()
        .map(|r| {
            json!({
                "offset": r.offset,
                "cond_raw": num(r.cond_raw),
                "cond_normalized": num(r.cond_normalized),
                "det_ptp": num(r.det_ptp),
                "max_ptp_entry": num(r.max_ptp_entry),
                "residual": opt(r.residual),
                "status": status(r.error.as_ref()),
            })
        })
        .collect()
}

pub fn write_json(value: &Value, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_atomic(path.as_ref(), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use csrbf_core::diagnostics::{diagnose, translation_experiment};
    use csrbf_core::{assemble_sparse, Kernel, KernelKind, PointCloud, PolyBasis};

    #[test]
    fn translation_report_shape() {
        let cloud = PointCloud::new(1, vec![0.0, 0.4, 1.0], vec![1.0, 0.0, 2.0]).unwrap();
        let kernel = Kernel::new(KernelKind::WendlandC2, 1.0).unwrap();
        let poly = PolyBasis::new(1, Some(1)).unwrap();
        let recs = translation_experiment(&cloud, &kernel, &poly, &[0.0, 10.0]).unwrap();
        let v = translation_json(&recs);
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[1]["offset"], 10.0);
        assert_eq!(arr[0]["status"], "ok");
        let mut keys: Vec<&str> = arr[0].as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            [
                "cond_normalized",
                "cond_raw",
                "det_ptp",
                "max_ptp_entry",
                "offset",
                "residual",
                "status"
            ]
        );
    }

    #[test]
    fn diagnostics_report_nulls() {
        let cloud = PointCloud::new(1, vec![0.0, 0.3, 0.5, 0.9], vec![1.0, 0.0, 2.0, 1.0]).unwrap();
        let kernel = Kernel::new(KernelKind::WendlandC2, 2.0).unwrap();
        let sys = assemble_sparse(&cloud, &kernel, &PolyBasis::new(1, Some(1)).unwrap()).unwrap();
        let v = diagnostics_json(&diagnose(&sys));
        assert_eq!(v["n"], 4);
        assert_eq!(v["status"], "ok");
        assert!(v["sparsity"]["nnz"].as_u64().unwrap() >= 4);
        assert!(v["determinants"]["det_full"]["sign"].is_number());
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(determinant(&Determinant::ZERO)["log_abs"], Value::Null);
    }
}
