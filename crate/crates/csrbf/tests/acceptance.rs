//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p csrbf --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use csrbf::model_json::{read_model_json, write_model_json};
use csrbf_core::diagnostics::{
    determinant_report, ptp_translation_invariance_check, sparsity_report, translation_experiment,
};
use csrbf_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn mean_spacing(dim: usize, n: usize) -> f64 {
    (1.0 / n as f64).powf(1.0 / dim as f64)
}

fn well_spaced_coords(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<f64> {
    let min_sep = 0.4 * mean_spacing(dim, n);
    let mut coords: Vec<f64> = Vec::with_capacity(n * dim);
    while coords.len() < n * dim {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        if coords.chunks(dim).all(|q| {
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() >= min_sep
        }) {
            coords.extend(p);
        }
    }
    coords
}

fn smooth_values(coords: &[f64], dim: usize) -> Vec<f64> {
    coords
        .chunks(dim)
        .map(|p| {
            let s: f64 = p.iter().enumerate().map(|(k, x)| (3.0 + k as f64) * x).sum();
            4.0 * s.sin() + 0.5 * p[0] * p[0]
        })
        .collect()
}

struct Instance {
    cloud: PointCloud,
    kernel: Kernel,
    poly: PolyBasis,
}

/// N in 10..=200, d in 1..=3, Wendland C2 with support four mean spacings,
/// linear tail.
fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=3);
    let n = rng.gen_range(10..=200);
    let coords = well_spaced_coords(&mut rng, dim, n);
    let values = smooth_values(&coords, dim);
    Instance {
        cloud: PointCloud::new(dim, coords, values).unwrap(),
        kernel: Kernel::with_support_radius(KernelKind::WendlandC2, 4.0 * mean_spacing(dim, n)).unwrap(),
        poly: PolyBasis::new(dim, Some(1)).unwrap(),
    }
}

fn unit_box_cloud(seed: u64, n: usize) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let values = smooth_values(&coords, 2);
    PointCloud::new(2, coords, values).unwrap()
}

fn stacked(model: &InterpolantModel) -> Vec<f64> {
    model.lambda().iter().chain(model.poly_coeffs()).copied().collect()
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check(ok: bool, summary: String) -> Outcome {
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn fit_with(inst: &Instance, solver: SolverKind) -> InterpolantModel {
    let options = FitOptions {
        solver,
        cg_tol: 1e-10,
        ..FitOptions::default()
    };
    fit(&inst.cloud, &inst.kernel, &inst.poly, &options).unwrap()
}

fn interpolation() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let inst = instance(seed);
        let model = fit_with(&inst, SolverKind::Direct);
        let tol = 1e-8 * max_abs(inst.cloud.values()).max(1.0);
        for (x, h) in inst.cloud.points().zip(inst.cloud.values()) {
            worst = worst.max((model.evaluate(x).unwrap() - h).abs() / tol);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1.0 && secs < 30.0,
        format!("worst |f(x_i) - h_i| / tolerance = {worst:.2e} over 50 instances in {secs:.2} s"),
    )
}

fn solver_equivalence() -> Outcome {
    let (mut schur, mut cg) = (0.0f64, 0.0f64);
    for seed in 0..50 {
        let inst = instance(seed);
        let direct = stacked(&fit_with(&inst, SolverKind::Direct));
        schur = schur.max(rel_diff(&stacked(&fit_with(&inst, SolverKind::Schur)), &direct));
        cg = cg.max(rel_diff(&stacked(&fit_with(&inst, SolverKind::Cg)), &direct));
    }
    check(
        schur <= 1e-7 && cg <= 1e-7,
        format!("max relative difference from direct: schur {schur:.2e}, cg {cg:.2e}"),
    )
}

fn determinant_identity() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let dim = rng.gen_range(1..=3);
        let n = rng.gen_range(10..=100);
        let coords = well_spaced_coords(&mut rng, dim, n);
        let values = smooth_values(&coords, dim);
        let cloud = PointCloud::new(dim, coords, values).unwrap();
        let kernel = Kernel::with_support_radius(KernelKind::WendlandC2, 4.0 * mean_spacing(dim, n)).unwrap();
        let sys = assemble_dense(&cloud, &kernel, &PolyBasis::new(dim, Some(1)).unwrap()).unwrap();
        let err = determinant_report(&sys)
            .unwrap()
            .identity_error
            .unwrap_or(f64::INFINITY);
        worst = worst.max(err);
    }
    check(
        worst <= 1e-6,
        format!("max |det M - det B det S| / |det M| = {worst:.2e} over 50 instances"),
    )
}

fn side_conditions() -> Outcome {
    let mut worst = 0.0f64;
    let mut fits = 0;
    for seed in 0..50 {
        let inst = instance(seed);
        for solver in [SolverKind::Direct, SolverKind::Schur, SolverKind::Cg] {
            for normalize in [true, false] {
                let options = FitOptions {
                    solver,
                    normalize,
                    cg_tol: 1e-10,
                    ..FitOptions::default()
                };
                let model = fit(&inst.cloud, &inst.kernel, &inst.poly, &options).unwrap();
                let l1: f64 = model.lambda().iter().map(|l| l.abs()).sum();
                let bound = 1e-8 * l1 * max_abs(model.centers());
                worst = worst.max(max_abs(&model.side_condition_defect()) / bound);
                fits += 1;
            }
        }
    }
    check(
        worst <= 1.0,
        format!("worst |P^T lambda| / tolerance = {worst:.2e} over {fits} fits"),
    )
}

fn polynomial_reproduction() -> Outcome {
    let (mut worst_err, mut worst_lambda) = (0.0f64, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for degree in [1u8, 2] {
        for dim in 1..=3 {
            let n = 80;
            let poly = PolyBasis::new(dim, Some(degree)).unwrap();
            let coeffs: Vec<f64> = (0..poly.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let scale = max_abs(&coeffs).max(1.0);
            let coords = well_spaced_coords(&mut rng, dim, n);
            let values = coords.chunks(dim).map(|p| poly.eval_poly(&coeffs, p)).collect();
            let cloud = PointCloud::new(dim, coords, values).unwrap();
            let kernel = Kernel::with_support_radius(KernelKind::WendlandC2, 4.0 * mean_spacing(dim, n)).unwrap();
            let model = fit(&cloud, &kernel, &poly, &FitOptions::default()).unwrap();
            worst_lambda = worst_lambda.max(max_abs(model.lambda()) / (1e-7 * scale));
            for _ in 0..100 {
                let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
                let err = (model.evaluate(&q).unwrap() - poly.eval_poly(&coeffs, &q)).abs();
                worst_err = worst_err.max(err / (1e-7 * scale));
            }
        }
    }
    check(
        worst_err <= 1.0 && worst_lambda <= 1.0,
        format!("worst error / tolerance = {worst_err:.2e}, worst |lambda| / tolerance = {worst_lambda:.2e}"),
    )
}

const OFFSETS: [f64; 5] = [0.0, 10.0, 100.0, 1000.0, 10000.0];

fn seed_zero_sweep() -> Vec<diagnostics::TranslationRecord> {
    let cloud = unit_box_cloud(0, 50);
    let kernel = Kernel::with_support_radius(KernelKind::WendlandC2, 4.0 * mean_spacing(2, 50)).unwrap();
    translation_experiment(&cloud, &kernel, &PolyBasis::new(2, Some(1)).unwrap(), &OFFSETS).unwrap()
}

fn translation_instability() -> Outcome {
    let recs = seed_zero_sweep();
    let conds: Vec<String> = recs.iter().map(|r| format!("{:.2e}", r.cond_raw)).collect();
    let monotone = recs.windows(2).all(|w| w[1].cond_raw >= w[0].cond_raw);
    let growth = recs[4].cond_raw / recs[0].cond_raw;
    let ratios: Vec<f64> = recs
        .windows(2)
        .map(|w| w[1].max_ptp_entry / w[0].max_ptp_entry)
        .collect();
    let in_band = ratios.iter().all(|r| (50.0..=200.0).contains(r));
    let ratios_text: Vec<String> = ratios.iter().map(|r| format!("{r:.1}")).collect();
    check(
        monotone && growth >= 1e3 && in_band,
        format!(
            "raw kappa [{}], growth {growth:.2e}, max|P^T P| ratios [{}]",
            conds.join(", "),
            ratios_text.join(", ")
        ),
    )
}

fn normalization_mitigation() -> Outcome {
    let recs = seed_zero_sweep();
    let base = recs[0].cond_normalized;
    let spread = recs
        .iter()
        .map(|r| (r.cond_normalized - base).abs() / base)
        .fold(0.0, f64::max);
    check(
        spread <= 0.01,
        format!("normalized kappa {base:.4e}, max relative variation {spread:.2e}"),
    )
}

fn ptp_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let cloud = unit_box_cloud(seed, 50);
        for offset in [1.0, 10.0, 100.0] {
            worst = worst.max(ptp_translation_invariance_check(&cloud, offset).unwrap().relative_drift);
        }
    }
    check(
        worst <= 1e-9,
        format!("max relative drift of det(P^T P) for offsets <= 100: {worst:.2e}"),
    )
}

fn sparsity() -> Outcome {
    let line = PointCloud::new(1, (0..10).map(f64::from).collect(), vec![0.0; 10]).unwrap();
    let kernel = Kernel::with_support_radius(KernelKind::WendlandC2, 1.25).unwrap();
    let sys = assemble_sparse(&line, &kernel, &PolyBasis::none(1).unwrap()).unwrap();
    let nnz = sparsity_report(&sys).unwrap().nnz;
    let mut oracle = 0;
    for i in 0..10 {
        for j in 0..10 {
            if (i as f64 - j as f64).abs() < 1.25 {
                oracle += 1;
            }
        }
    }

    let mut mismatches = 0;
    let kinds = [KernelKind::WendlandC0, KernelKind::WendlandC2, KernelKind::WendlandC4];
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let dim = rng.gen_range(1..=3);
        let n = rng.gen_range(10..=300);
        let coords: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cloud = PointCloud::new(dim, coords, vec![0.0; n]).unwrap();
        let kernel = Kernel::with_support_radius(kinds[seed as usize % 3], rng.gen_range(0.1..1.0)).unwrap();
        let poly = PolyBasis::new(dim, Some(1)).unwrap();
        let dense = assemble_dense(&cloud, &kernel, &poly).unwrap();
        let sparse = assemble_sparse(&cloud, &kernel, &poly).unwrap();
        if dense.b().to_dense() != sparse.b().to_dense() || dense.p() != sparse.p() {
            mismatches += 1;
        }
    }
    check(
        nnz == 28 && oracle == 28 && mismatches == 0,
        format!("line nnz {nnz} (pair-count oracle {oracle}), sparse/dense mismatches {mismatches} of 50"),
    )
}

fn kernel_values() -> Outcome {
    let c2 = Kernel::with_support_radius(KernelKind::WendlandC2, 1.0).unwrap();
    let tps = Kernel::new(KernelKind::ThinPlateSpline, 1.0).unwrap();
    let gaussian = Kernel::new(KernelKind::Gaussian, 1.0).unwrap();
    let got = [c2.eval(0.0), c2.eval(0.5), c2.eval(1.0), c2.eval(1.5), c2.eval(1e6)];
    let outside_zero = (0..1000).all(|k| c2.eval(1.0 + k as f64 * 0.01).to_bits() == 0);
    check(
        got == [1.0, 0.1875, 0.0, 0.0, 0.0] && outside_zero && tps.eval(1.0) == 0.0 && gaussian.eval(0.0) == 1.0,
        format!(
            "wendland-c2 {got:?}, tps(1) = {}, gaussian(0) = {}",
            tps.eval(1.0),
            gaussian.eval(0.0)
        ),
    )
}

fn run_cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_csrbf"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn io_round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut differing = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (seed, solver) in [(0, SolverKind::Direct), (1, SolverKind::Schur), (2, SolverKind::Cg)] {
        let inst = instance(seed);
        let model = fit_with(&inst, solver);
        let path = dir.path().join(format!("model-{seed}.json"));
        write_model_json(&model, &path).unwrap();
        let loaded = read_model_json(&path).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..inst.cloud.dim()).map(|_| rng.gen_range(-0.1..1.1)).collect();
            if model.evaluate(&q).unwrap().to_bits() != loaded.evaluate(&q).unwrap().to_bits() {
                differing += 1;
            }
        }
    }

    let p = |name: &str| dir.path().join(name);
    let s = |path: &Path| path.to_str().unwrap().to_owned();
    let points = p("points.csv");
    let mut text = String::from("x,y,h\n");
    for i in 0..6 {
        for j in 0..6 {
            text.push_str(&format!("{},{},{}\n", i as f64 / 5.0, j as f64 / 5.0, i * j));
        }
    }
    std::fs::write(&points, text).unwrap();
    std::fs::write(p("dup.csv"), "x,h\n0,1\n0,2\n").unwrap();
    let (input, dup, missing, model) = (s(&points), s(&p("dup.csv")), s(&p("missing.csv")), s(&p("m.json")));
    let cases: [(&str, Vec<&str>, i32); 6] = [
        (
            "fit",
            vec![
                "fit",
                "--input",
                &input,
                "--kernel",
                "wendland-c2",
                "--shape",
                "3",
                "--output",
                &model,
            ],
            0,
        ),
        (
            "unknown kernel",
            vec!["fit", "--input", &input, "--kernel", "cubic", "--output", &model],
            2,
        ),
        (
            "tps without tail",
            vec![
                "fit", "--input", &input, "--kernel", "tps", "--degree", "none", "--output", &model,
            ],
            2,
        ),
        (
            "missing file",
            vec![
                "fit",
                "--input",
                &missing,
                "--kernel",
                "wendland-c2",
                "--output",
                &model,
            ],
            3,
        ),
        (
            "duplicate points",
            vec!["fit", "--input", &dup, "--kernel", "wendland-c2", "--output", &model],
            3,
        ),
        (
            "no convergence",
            vec![
                "fit",
                "--input",
                &input,
                "--kernel",
                "wendland-c2",
                "--shape",
                "0.5",
                "--solver",
                "cg",
                "--cg-max-iter",
                "1",
                "--output",
                &model,
            ],
            4,
        ),
    ];
    let mut wrong = Vec::new();
    for (name, args, expected) in &cases {
        let got = run_cli(args);
        if got != *expected {
            wrong.push(format!("{name}: exit {got}, expected {expected}"));
        }
    }
    check(
        differing == 0 && wrong.is_empty(),
        format!(
            "{differing} of 300 reloaded evaluations differ; exit codes {}",
            if wrong.is_empty() {
                "0/2/3/4 as documented".to_owned()
            } else {
                wrong.join("; ")
            }
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("interpolation property", interpolation),
        ("solver-path equivalence", solver_equivalence),
        ("determinant identity", determinant_identity),
        ("side conditions", side_conditions),
        ("polynomial reproduction", polynomial_reproduction),
        ("translation instability", translation_instability),
        ("normalization mitigation", normalization_mitigation),
        ("det(P^T P) translation invariance", ptp_invariance),
        ("sparsity", sparsity),
        ("kernel values", kernel_values),
        ("I/O round trip and exit codes", io_round_trip),
    ];
    let mut failed = Vec::new();
    for (k, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(summary) => println!("PASS {:>2} {name}: {summary}", k + 1),
            Err(summary) => {
                println!("FAIL {:>2} {name}: {summary}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
