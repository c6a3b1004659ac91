//! Binary soft-margin classification.
//!
//! Training solves the dual with [`solve_svc_dual`] and keeps only the
//! samples whose multiplier exceeds `1e-8 · C`. Each support vector stores
//! the single coefficient `λᵢyᵢ`, so the decision function is
//!
//! ```text
//! D(x) = Σᵢ coefᵢ K(svᵢ, x) + b
//! ```
//!
//! and the feature-space normal `w = Σᵢ coefᵢ Φ(svᵢ)` is only ever touched
//! through kernel values. Predictions take the sign of `D`, with `D = 0`
//! mapped to `+1`.

use crate::data::LabeledDataset;
use crate::error::{Result, SvmError};
use crate::kernel::{self, FeatureVector, KernelSpec};
use crate::qp::{
    bias_from_gradient, bound_state, solve_svc_dual, BoundState, KernelMatrix, SolverConfig,
    SvcDualProblem,
};

/// What the solver reported when a model was trained.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingInfo {
    pub cost: f64,
    pub tolerance: f64,
    pub n_samples: usize,
    pub iterations: u64,
    pub max_violation: f64,
    pub objective: f64,
    /// Seed of the data that produced the model, when known.
    pub seed: Option<u64>,
}

/// Trained binary classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct SvcModel {
    pub kernel: KernelSpec,
    pub support_vectors: Vec<FeatureVector>,
    /// `λᵢyᵢ` per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    /// Feature dimension of the training data.
    pub dim: usize,
    /// Absent on models loaded from disk.
    pub info: Option<TrainingInfo>,
}

/// An affine hyperplane `w·x + b = 0` in input space.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Hyperplane {
    /// Coefficients `(w₁, …, w_d, b)` rescaled so that `w[anchor] = 1`.
    pub fn scaled_to_weight(&self, anchor: usize) -> Vec<f64> {
        let s = self.weights[anchor];
        self.weights
            .iter()
            .chain(std::iter::once(&self.bias))
            .map(|v| v / s)
            .collect()
    }

    /// Coefficients rescaled so that the constant term is `−1`.
    pub fn scaled_to_intercept(&self) -> Vec<f64> {
        let s = -self.bias;
        self.weights
            .iter()
            .chain(std::iter::once(&self.bias))
            .map(|v| v / s)
            .collect()
    }
}

impl SvcModel {
    pub fn n_support(&self) -> usize {
        self.support_vectors.len()
    }

    /// Explicit normal vector, available for the linear kernel only.
    pub fn hyperplane(&self) -> Option<Hyperplane> {
        if !self.kernel.is_linear() {
            return None;
        }
        let mut w = vec![0.0; self.dim];
        for (sv, &c) in self.support_vectors.iter().zip(&self.coefficients) {
            for (i, v) in sv.nonzeros() {
                w[i as usize - 1] += c * v;
            }
        }
        Some(Hyperplane {
            weights: w,
            bias: self.bias,
        })
    }

    /// `‖w‖² = Σᵢ Σⱼ coefᵢ coefⱼ K(svᵢ, svⱼ)`.
    pub fn weight_norm_squared(&self) -> Result<f64> {
        let mut total = 0.0;
        for (i, (a, ca)) in self.support_vectors.iter().zip(&self.coefficients).enumerate() {
            total += ca * ca * kernel::eval(&self.kernel, a, a)?;
            for (b, cb) in self.support_vectors[..i].iter().zip(&self.coefficients) {
                total += 2.0 * ca * cb * kernel::eval(&self.kernel, a, b)?;
            }
        }
        Ok(total)
    }
}

pub(crate) fn check_dim(model_dim: usize, x: &FeatureVector) -> Result<()> {
    let found = x.dim();
    let ok = match x {
        FeatureVector::Dense(_) => found == model_dim,
        FeatureVector::Sparse(_) => found <= model_dim,
    };
    if ok {
        Ok(())
    } else {
        Err(SvmError::DimensionMismatch {
            expected: model_dim,
            found,
        })
    }
}

pub(crate) fn expansion(
    kernel: &KernelSpec,
    support_vectors: &[FeatureVector],
    coefficients: &[f64],
    bias: f64,
    x: &FeatureVector,
) -> Result<f64> {
    let mut sum = bias;
    for (sv, c) in support_vectors.iter().zip(coefficients) {
        sum += c * kernel::eval(kernel, sv, x)?;
    }
    Ok(sum)
}

/// Checks binary labels and returns them as `±1.0`.
fn binary_labels(data: &LabeledDataset) -> Result<Vec<f64>> {
    let mut pos = false;
    let mut neg = false;
    let mut out = Vec::with_capacity(data.len());
    for &y in &data.targets {
        match y {
            1 => pos = true,
            -1 => neg = true,
            other => return Err(SvmError::InvalidLabel(other.to_string())),
        }
        out.push(y as f64);
    }
    if !pos {
        return Err(SvmError::EmptyClass("+1".into()));
    }
    if !neg {
        return Err(SvmError::EmptyClass("-1".into()));
    }
    Ok(out)
}

/// Trains a soft-margin classifier on `±1` labels.
pub fn train_svc(
    data: &LabeledDataset,
    kernel: &KernelSpec,
    cost: f64,
    config: &SolverConfig,
) -> Result<SvcModel> {
    let labels = binary_labels(data)?;
    let matrix = KernelMatrix::for_samples(kernel, &data.samples)?;
    let problem = SvcDualProblem::new(matrix, labels, cost)?;
    let solution = solve_svc_dual(&problem, config)?;

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (i, &l) in solution.lambdas.iter().enumerate() {
        if bound_state(l, cost) != BoundState::Lower {
            support_vectors.push(data.samples[i].clone());
            coefficients.push(l * problem.labels()[i]);
        }
    }
    if support_vectors.is_empty() {
        return Err(SvmError::DegenerateFit);
    }
    Ok(SvcModel {
        kernel: *kernel,
        support_vectors,
        coefficients,
        bias: solution.bias,
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

/// Bias for given multipliers.
///
/// Averages `yᵢ − Σⱼ λⱼyⱼK(xⱼ, xᵢ)` over the free support vectors
/// (`0 < λᵢ < C`). With one free vector per class this is exactly
/// `b = −½ [Σⱼ λⱼyⱼK(xⱼ, x⁺) + Σⱼ λⱼyⱼK(xⱼ, x⁻)]`. When every support vector
/// is bounded, returns the midpoint of the interval of offsets that satisfy
/// the complementarity inequalities.
pub fn compute_bias(problem: &SvcDualProblem<'_>, lambdas: &[f64]) -> Result<f64> {
    if lambdas.len() != problem.order() {
        return Err(SvmError::DimensionMismatch {
            expected: problem.order(),
            found: lambdas.len(),
        });
    }
    if lambdas
        .iter()
        .all(|&l| bound_state(l, problem.cost()) == BoundState::Lower)
    {
        return Err(SvmError::DegenerateFit);
    }
    let grad = problem.gradient(lambdas)?;
    bias_from_gradient(problem.labels(), &grad, lambdas, problem.cost()).ok_or(SvmError::DegenerateFit)
}

/// `Σᵢ coefᵢ K(svᵢ, x) + b`.
pub fn decision_value(model: &SvcModel, x: &FeatureVector) -> Result<f64> {
    check_dim(model.dim, x)?;
    expansion(
        &model.kernel,
        &model.support_vectors,
        &model.coefficients,
        model.bias,
        x,
    )
}

/// Sign rule with the tie `D = 0 ↦ +1`.
pub fn label_of(decision: f64) -> i64 {
    if decision >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn predict(model: &SvcModel, x: &FeatureVector) -> Result<i64> {
    decision_value(model, x).map(label_of)
}

/// `(1 − y·f)₊`
pub fn hinge_loss(y: f64, f: f64) -> f64 {
    (1.0 - y * f).max(0.0)
}

/// Empirical quantities of a trained classifier on a labeled set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Risks {
    /// `(1/n) Σ (1 − yᵢ f(xᵢ))₊`
    pub hinge: f64,
    /// `μ = 1/(2Cn)`
    pub mu: f64,
    /// `hinge + μ‖w‖²`
    pub regularized: f64,
    pub misclassification: f64,
}

/// Hinge risk, the regularized objective at `μ = 1/(2Cn)` and the error rate.
///
/// `C` comes from the model's training info; pass it explicitly for models
/// without one.
pub fn empirical_risks(model: &SvcModel, data: &LabeledDataset, cost: Option<f64>) -> Result<Risks> {
    let cost = cost
        .or_else(|| model.info.as_ref().map(|i| i.cost))
        .ok_or_else(|| SvmError::InvalidParameter("C unknown for this model".into()))?;
    let n = data.len();
    if n == 0 {
        return Err(SvmError::InvalidParameter("empty dataset".into()));
    }
    let mut hinge = 0.0;
    let mut wrong = 0usize;
    for (x, &y) in data.samples.iter().zip(&data.targets) {
        let d = decision_value(model, x)?;
        hinge += hinge_loss(y as f64, d);
        if label_of(d) != y {
            wrong += 1;
        }
    }
    let hinge = hinge / n as f64;
    let mu = 1.0 / (2.0 * cost * n as f64);
    Ok(Risks {
        hinge,
        mu,
        regularized: hinge + mu * model.weight_norm_squared()?,
        misclassification: wrong as f64 / n as f64,
    })
}

/// Misclassification rate.
pub fn error_rate(model: &SvcModel, data: &LabeledDataset) -> Result<f64> {
    let mut wrong = 0usize;
    for (x, &y) in data.samples.iter().zip(&data.targets) {
        if predict(model, x)? != y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len().max(1) as f64)
}
