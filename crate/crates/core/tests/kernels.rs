mod common;

use common::{dense, gram_of, random_points, rng, symmetric_eigenvalues};
use ksvm::kernel::{eval, gram, FeatureVector, KernelSpec};
use proptest::prelude::*;

fn kernels() -> Vec<KernelSpec> {
    vec![
        KernelSpec::Linear,
        KernelSpec::polynomial(0.0, 2).unwrap(),
        KernelSpec::polynomial(1.0, 3).unwrap(),
        KernelSpec::gaussian(0.3).unwrap(),
        KernelSpec::gaussian(5.0).unwrap(),
    ]
}

fn kernel_strategy() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        Just(KernelSpec::Linear),
        (0.0..3.0f64, 1u32..5).prop_map(|(c, d)| KernelSpec::polynomial(c, d).unwrap()),
        (0.05..10.0f64).prop_map(|c| KernelSpec::gaussian(c).unwrap()),
    ]
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

#[test]
fn jacobi_oracle_on_known_spectrum() {
    let mut e = symmetric_eigenvalues(vec![
        vec![2.0, 1.0, 0.0],
        vec![1.0, 2.0, 0.0],
        vec![0.0, 0.0, -4.0],
    ]);
    e.sort_by(f64::total_cmp);
    for (a, b) in e.iter().zip([-4.0, 1.0, 3.0]) {
        assert!((a - b).abs() < 1e-12, "{e:?}");
    }
}

#[test]
fn symmetric_on_random_pairs() {
    let mut r = rng(11);
    for spec in kernels() {
        let xs = random_points(&mut r, 200, 4, 3.0);
        let ys = random_points(&mut r, 200, 4, 3.0);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(eval(&spec, x, y).unwrap(), eval(&spec, y, x).unwrap());
        }
    }
}

#[test]
fn gram_matrices_are_positive_semidefinite() {
    let mut r = rng(12);
    for spec in kernels() {
        for n in [2, 7, 15, 30] {
            let xs = random_points(&mut r, n, 3, 2.0);
            let k = gram_of(&spec, &xs);
            let scale = k.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            let min = symmetric_eigenvalues(k).into_iter().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-8 * scale, "{spec} n={n}: min eigenvalue {min}");
        }
    }
}

#[test]
fn gram_agrees_with_pointwise_evaluation() {
    let mut r = rng(13);
    for spec in kernels() {
        let xs = random_points(&mut r, 25, 3, 2.0);
        let g = gram(&spec, &xs).unwrap();
        let k = gram_of(&spec, &xs);
        for i in 0..25 {
            for j in 0..25 {
                assert!((g.get(i, j) - k[i][j]).abs() <= 1e-12 * (1.0 + k[i][j].abs()));
            }
        }
    }
}

fn phi(x: &[f64], c: f64) -> Vec<f64> {
    // Degree-2 feature map of (x·y + c)² in two dimensions.
    let r2 = std::f64::consts::SQRT_2;
    vec![
        x[0] * x[0],
        x[1] * x[1],
        r2 * x[0] * x[1],
        r2 * c.sqrt() * x[0],
        r2 * c.sqrt() * x[1],
        c,
    ]
}

#[test]
fn polynomial_matches_explicit_feature_map() {
    let mut r = rng(14);
    for c in [0.0, 1.0, 2.5] {
        let spec = KernelSpec::polynomial(c, 2).unwrap();
        let xs = random_points(&mut r, 1000, 2, 3.0);
        let ys = random_points(&mut r, 1000, 2, 3.0);
        for (x, y) in xs.iter().zip(&ys) {
            let (a, b) = (x.to_dense(2), y.to_dense(2));
            let explicit: f64 = phi(&a, c).iter().zip(phi(&b, c)).map(|(u, v)| u * v).sum();
            let k = eval(&spec, x, y).unwrap();
            assert!((k - explicit).abs() <= 1e-10 * (1.0 + explicit.abs()), "{k} vs {explicit}");
        }
    }
}

#[test]
fn polynomial_example_values() {
    let spec = KernelSpec::polynomial(1.0, 2).unwrap();
    assert_eq!(eval(&spec, &dense(&[1.0, 2.0]), &dense(&[3.0, 4.0])).unwrap(), 144.0);
    let g = KernelSpec::gaussian(2.0).unwrap();
    let v = eval(&g, &dense(&[0.0, 0.0]), &dense(&[1.0, 1.0])).unwrap();
    assert!((v - (-1.0f64).exp()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn symmetric_and_cauchy_schwarz(spec in kernel_strategy(), x in point(3), y in point(3)) {
        let (x, y) = (dense(&x), dense(&y));
        let kxy = eval(&spec, &x, &y).unwrap();
        prop_assert_eq!(kxy, eval(&spec, &y, &x).unwrap());
        let kxx = eval(&spec, &x, &x).unwrap();
        let kyy = eval(&spec, &y, &y).unwrap();
        prop_assert!(kxy * kxy <= kxx * kyy * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn gaussian_is_bounded(c in 0.01..100.0f64, x in point(4), y in point(4)) {
        let spec = KernelSpec::gaussian(c).unwrap();
        let k = eval(&spec, &dense(&x), &dense(&y)).unwrap();
        prop_assert!((0.0..=1.0).contains(&k));
        prop_assert_eq!(eval(&spec, &dense(&x), &dense(&x)).unwrap(), 1.0);
    }

    #[test]
    fn sparse_and_dense_forms_agree(spec in kernel_strategy(), x in point(6), y in point(6)) {
        let sparse = |v: &[f64]| {
            FeatureVector::sparse(
                v.iter().enumerate().filter(|(i, _)| i % 2 == 0).map(|(i, &a)| (i as u32 + 1, a)),
            )
            .unwrap()
        };
        let masked = |v: &[f64]| -> Vec<f64> {
            v.iter().enumerate().map(|(i, &a)| if i % 2 == 0 { a } else { 0.0 }).collect()
        };
        let a = eval(&spec, &sparse(&x), &sparse(&y)).unwrap();
        let b = eval(&spec, &dense(&masked(&x)), &dense(&masked(&y))).unwrap();
        let c = eval(&spec, &sparse(&x), &dense(&masked(&y))).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        prop_assert!((c - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn spec_text_round_trips(spec in kernel_strategy()) {
        prop_assert_eq!(spec.to_string().parse::<KernelSpec>().unwrap(), spec);
    }
}
