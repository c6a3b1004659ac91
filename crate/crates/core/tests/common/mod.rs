//! Test-side oracles and instance generators. Nothing here calls the solver.
#![allow(dead_code)]

use ksvm::data::{Dataset, LabeledDataset, RegressionDataset};
use ksvm::kernel::{eval, FeatureVector, KernelSpec};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(v: &[f64]) -> FeatureVector {
    FeatureVector::dense(v.to_vec()).unwrap()
}

/// Small classification instance with both classes present.
pub struct Instance {
    pub data: LabeledDataset,
    pub kernel: KernelSpec,
    pub cost: f64,
}

pub fn random_kernel(r: &mut ChaCha8Rng) -> KernelSpec {
    match r.random_range(0..5u32) {
        0 => KernelSpec::Linear,
        1 => KernelSpec::polynomial(1.0, 2).unwrap(),
        2 => KernelSpec::polynomial(0.5, 3).unwrap(),
        3 => KernelSpec::gaussian(0.5).unwrap(),
        _ => KernelSpec::gaussian(2.0).unwrap(),
    }
}

pub fn random_points(r: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> Vec<FeatureVector> {
    (0..n)
        .map(|_| {
            dense(
                &(0..dim)
                    .map(|_| scale * (2.0 * r.random::<f64>() - 1.0))
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

pub fn random_labels(r: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut y: Vec<i64> = (0..n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    y[0] = 1;
    y[1] = -1;
    y
}

pub fn random_instance(seed: u64, max_n: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.random_range(2..=max_n);
    let dim = r.random_range(1..=3usize);
    let samples = random_points(&mut r, n, dim, 2.0);
    let labels = random_labels(&mut r, n);
    let kernel = random_kernel(&mut r);
    let cost = [0.1, 1.0, 10.0][r.random_range(0..3usize)];
    Instance {
        data: Dataset::new(samples, labels).unwrap(),
        kernel,
        cost,
    }
}

pub fn gram_of(kernel: &KernelSpec, xs: &[FeatureVector]) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|a| xs.iter().map(|b| eval(kernel, a, b).unwrap()).collect())
        .collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Regularized hinge objective `(1/n) Σ (1 − yᵢ f(xᵢ))₊ + μ αᵀKα` with
/// `f = Σⱼ αⱼ K(xⱼ, ·) + b` and `μ = 1/(2Cn)`.
pub fn regularized_hinge(k: &[Vec<f64>], y: &[f64], alpha: &[f64], b: f64, cost: f64) -> f64 {
    let n = y.len();
    let mu = 1.0 / (2.0 * cost * n as f64);
    let mut hinge = 0.0;
    let mut norm = 0.0;
    for i in 0..n {
        let ki: f64 = (0..n).map(|j| alpha[j] * k[i][j]).sum();
        hinge += (1.0 - y[i] * (ki + b)).max(0.0);
        norm += alpha[i] * ki;
    }
    hinge / n as f64 + mu * norm
}

/// `½‖w‖² + C Σ (1 − yᵢ f(xᵢ))₊` for `w = Σ αⱼ Φ(xⱼ)`.
pub fn svc_primal(k: &[Vec<f64>], y: &[f64], alpha: &[f64], b: f64, cost: f64) -> f64 {
    let n = y.len();
    let mut total = 0.0;
    for i in 0..n {
        let ki: f64 = (0..n).map(|j| alpha[j] * k[i][j]).sum();
        total += 0.5 * alpha[i] * ki + cost * (1.0 - y[i] * (ki + b)).max(0.0);
    }
    total
}

/// `½‖w‖² + C Σ (|w·xᵢ + b − yᵢ| − ε)₊` for explicit linear `w`.
pub fn svr_primal(xs: &[Vec<f64>], ys: &[f64], w: &[f64], b: f64, cost: f64, eps: f64) -> f64 {
    let reg: f64 = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let f: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
            ((f - y).abs() - eps).max(0.0)
        })
        .sum();
    reg + cost * loss
}

/// Exact minimum over `b` for fixed `w`: the objective is convex and
/// piecewise linear in `b`, so some breakpoint `yᵢ − w·xᵢ ± ε` attains it.
fn svr_best_bias(xs: &[Vec<f64>], ys: &[f64], w: &[f64], cost: f64, eps: f64) -> f64 {
    let mut best = f64::INFINITY;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        for b in [r - eps, r + eps] {
            best = best.min(svr_primal(xs, ys, w, b, cost, eps));
        }
    }
    best
}

fn ternary(mut lo: f64, mut hi: f64, f: &mut dyn FnMut(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi))
}

/// Minimum of the linear SVR primal in one or two input dimensions, by
/// nested ternary search over `w` (the partial minimum over `b` is convex).
pub fn svr_primal_minimum(xs: &[Vec<f64>], ys: &[f64], cost: f64, eps: f64) -> f64 {
    let d = xs[0].len();
    // ½‖w*‖² ≤ P(0, b*) bounds the search box.
    let radius = (2.0 * svr_best_bias(xs, ys, &vec![0.0; d], cost, eps)).sqrt() + 1e-9;
    match d {
        1 => ternary(-radius, radius, &mut |w| svr_best_bias(xs, ys, &[w], cost, eps)),
        2 => ternary(-radius, radius, &mut |w1| {
            ternary(-radius, radius, &mut |w2| svr_best_bias(xs, ys, &[w1, w2], cost, eps))
        }),
        _ => panic!("oracle supports one or two dimensions"),
    }
}

pub struct SvrInstance {
    pub data: RegressionDataset,
    pub xs: Vec<Vec<f64>>,
    pub cost: f64,
    pub epsilon: f64,
}

pub fn random_svr_instance(seed: u64) -> SvrInstance {
    let mut r = rng(seed);
    let n = r.random_range(2..=6usize);
    let d = r.random_range(1..=2usize);
    let xs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| 4.0 * r.random::<f64>() - 2.0).collect())
        .collect();
    let ys: Vec<f64> = (0..n).map(|_| 4.0 * r.random::<f64>() - 2.0).collect();
    let cost = [0.1, 1.0, 10.0][r.random_range(0..3usize)];
    let epsilon = [0.0, 0.1, 0.5][r.random_range(0..3usize)];
    SvrInstance {
        data: Dataset::new(xs.iter().map(|x| dense(x)).collect(), ys).unwrap(),
        xs,
        cost,
        epsilon,
    }
}
