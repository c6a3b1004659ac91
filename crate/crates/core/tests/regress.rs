mod common;

use common::{random_svr_instance, rng, svr_primal, svr_primal_minimum};
use ksvm::kernel::KernelSpec;
use ksvm::qp::SolverConfig;
use ksvm::regress::{epsilon_loss, predict_svr, train_svr, SvrModel};
use proptest::prelude::*;
use rand::RngExt;

/// Explicit `w = Σ βᵢ xᵢ` of a linear model.
fn weights(model: &SvrModel, d: usize) -> Vec<f64> {
    let mut w = vec![0.0; d];
    for (sv, b) in model.support_vectors.iter().zip(&model.coefficients) {
        for (k, wk) in w.iter_mut().enumerate() {
            *wk += b * sv.get(k + 1);
        }
    }
    w
}

#[test]
fn linear_models_match_the_primal_oracle() {
    let cfg = SolverConfig::with_tolerance(1e-9);
    for seed in 0..20 {
        let inst = random_svr_instance(seed);
        let m = train_svr(&inst.data, &KernelSpec::Linear, inst.cost, inst.epsilon, &cfg).unwrap();
        let d = inst.xs[0].len();
        let trained = svr_primal(&inst.xs, &inst.data.targets, &weights(&m, d), m.bias, inst.cost, inst.epsilon);
        let oracle = svr_primal_minimum(&inst.xs, &inst.data.targets, inst.cost, inst.epsilon);
        assert!(
            (trained - oracle).abs() <= 1e-4,
            "seed {seed}: trained {trained} oracle {oracle}"
        );
    }
}

#[test]
fn tube_complementarity_on_random_models() {
    let tau = 1e-6;
    let cfg = SolverConfig::with_tolerance(tau);
    for seed in 100..130 {
        let inst = random_svr_instance(seed);
        for kernel in [KernelSpec::Linear, KernelSpec::gaussian(1.0).unwrap()] {
            let m = train_svr(&inst.data, &kernel, inst.cost, inst.epsilon, &cfg).unwrap();
            let total: f64 = m.coefficients.iter().sum();
            assert!(total.abs() <= 1e-8 * inst.data.len() as f64 * inst.cost + 1e-12);
            for (sv, b) in m.support_vectors.iter().zip(&m.coefficients) {
                assert!(b.abs() <= inst.cost * (1.0 + 1e-12));
                let i = inst.data.samples.iter().position(|x| x == sv).unwrap();
                let r = (predict_svr(&m, sv).unwrap() - inst.data.targets[i]).abs();
                assert!(r >= inst.epsilon - 10.0 * tau, "seed {seed}: residual {r}");
            }
        }
    }
}

#[test]
fn zero_epsilon_is_absolute_loss() {
    let mut r = rng(8);
    for _ in 0..100 {
        let y = 10.0 * r.random::<f64>() - 5.0;
        let f = 10.0 * r.random::<f64>() - 5.0;
        assert_eq!(epsilon_loss(y, f, 0.0), (f - y).abs());
    }
}

proptest! {
    #[test]
    fn loss_is_zero_inside_the_tube(y in -5.0..5.0f64, f in -5.0..5.0f64, eps in 0.0..3.0f64) {
        let l = epsilon_loss(y, f, eps);
        prop_assert!(l >= 0.0);
        prop_assert_eq!(l == 0.0, (f - y).abs() <= eps);
    }
}
