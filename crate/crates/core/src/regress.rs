//! ε-insensitive support vector regression.
//!
//! The fitted function is `f(x) = Σᵢ βᵢ K(svᵢ, x) + b` with `|βᵢ| ≤ C` and
//! `Σᵢ βᵢ = 0`. Samples strictly inside the tube `|f(xᵢ) − yᵢ| < ε` end with
//! `βᵢ = 0` and are dropped from the model.

use crate::classify::{check_dim, expansion, TrainingInfo};
use crate::data::RegressionDataset;
use crate::error::{Result, SvmError};
use crate::kernel::{FeatureVector, KernelSpec};
use crate::qp::{solve_svr_dual, KernelMatrix, SolverConfig, SV_THRESHOLD};

#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub kernel: KernelSpec,
    pub support_vectors: Vec<FeatureVector>,
    /// `βᵢ = αᵢ − αᵢ′` per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub epsilon: f64,
    pub dim: usize,
    pub info: Option<TrainingInfo>,
}

impl SvrModel {
    pub fn n_support(&self) -> usize {
        self.support_vectors.len()
    }
}

pub fn train_svr(
    data: &RegressionDataset,
    kernel: &KernelSpec,
    cost: f64,
    epsilon: f64,
    config: &SolverConfig,
) -> Result<SvrModel> {
    if data.is_empty() {
        return Err(SvmError::InvalidParameter("empty dataset".into()));
    }
    let matrix = KernelMatrix::for_samples(kernel, &data.samples)?;
    let solution = solve_svr_dual(&matrix, &data.targets, cost, epsilon, config)?;

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (x, &b) in data.samples.iter().zip(&solution.beta) {
        if b.abs() > SV_THRESHOLD * cost {
            support_vectors.push(x.clone());
            coefficients.push(b);
        }
    }
    Ok(SvrModel {
        kernel: *kernel,
        support_vectors,
        coefficients,
        bias: solution.bias,
        epsilon,
        dim: data.dim(),
        info: Some(TrainingInfo {
            cost,
            tolerance: config.tolerance,
            n_samples: data.len(),
            iterations: solution.iterations,
            max_violation: solution.max_violation,
            objective: solution.objective,
            seed: None,
        }),
    })
}

/// `Σᵢ βᵢ K(svᵢ, x) + b`
pub fn predict_svr(model: &SvrModel, x: &FeatureVector) -> Result<f64> {
    check_dim(model.dim, x)?;
    expansion(
        &model.kernel,
        &model.support_vectors,
        &model.coefficients,
        model.bias,
        x,
    )
}

/// `(|f − y| − ε)₊`
pub fn epsilon_loss(y: f64, f: f64, epsilon: f64) -> f64 {
    ((f - y).abs() - epsilon).max(0.0)
}

/// Mean ε-insensitive loss of the model on `data` at the model's own ε.
pub fn epsilon_risk(model: &SvrModel, data: &RegressionDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(SvmError::InvalidParameter("empty dataset".into()));
    }
    let mut total = 0.0;
    for (x, &y) in data.samples.iter().zip(&data.targets) {
        total += epsilon_loss(y, predict_svr(model, x)?, model.epsilon);
    }
    Ok(total / data.len() as f64)
}
