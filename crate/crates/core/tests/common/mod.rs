#![allow(dead_code)]

use csrbf_core::{Kernel, KernelKind, PointCloud};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Mean spacing of `n` sites in the unit box of dimension `dim`.
pub fn mean_spacing(dim: usize, n: usize) -> f64 {
    (1.0 / n as f64).powf(1.0 / dim as f64)
}

/// Random sites in the unit box, no two closer than 0.4 mean spacings.
pub fn well_spaced_coords(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<f64> {
    let min_sep = 0.4 * mean_spacing(dim, n);
    let mut coords: Vec<f64> = Vec::with_capacity(n * dim);
    while coords.len() < n * dim {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let ok = coords.chunks(dim).all(|q| {
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() >= min_sep
        });
        if ok {
            coords.extend(p);
        }
    }
    coords
}

pub fn smooth_values(coords: &[f64], dim: usize) -> Vec<f64> {
    coords
        .chunks(dim)
        .map(|p| {
            let s: f64 = p.iter().enumerate().map(|(k, x)| (3.0 + k as f64) * x).sum();
            s.sin() + 0.5 * p[0] * p[0]
        })
        .collect()
}

pub struct Instance {
    pub cloud: PointCloud,
    pub kernel: Kernel,
}

/// Well-conditioned instance: Wendland C2 with support about four mean spacings.
pub fn instance(rng: &mut ChaCha8Rng) -> Instance {
    let dim = rng.gen_range(1..=3);
    let n = rng.gen_range(10..=200);
    let coords = well_spaced_coords(rng, dim, n);
    let values = smooth_values(&coords, dim);
    let cloud = PointCloud::new(dim, coords, values).unwrap();
    let kernel = Kernel::with_support_radius(KernelKind::WendlandC2, 4.0 * mean_spacing(dim, n)).unwrap();
    Instance { cloud, kernel }
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}
