//! Dual quadratic programs for support vector training.
//!
//! The classification dual is
//!
//! ```text
//! min_λ  ½ Σᵢ Σⱼ λᵢ λⱼ yᵢ yⱼ K(xᵢ, xⱼ) − Σᵢ λᵢ
//! s.t.   Σᵢ yᵢ λᵢ = 0,   0 ≤ λᵢ ≤ C
//! ```
//!
//! and is solved by [`solve_svc_dual`], a sequential minimal optimization
//! loop over maximal violating pairs. [`solve_svr_dual`] handles the
//! ε-insensitive regression dual with the same machinery. [`brute_force_dual`]
//! is an independent projected-gradient solver for tiny instances, kept as a
//! cross-check.

mod cache;
mod oracle;
mod smo;

pub use oracle::{brute_force_dual, ORACLE_MAX_ORDER};
pub use smo::{solve_svc_dual, solve_svr_dual, SvrDualSolution};

use std::fmt;

use crate::error::{Result, SvmError};
use crate::kernel::{self, FeatureVector, GramMatrix, KernelSpec};

/// Problems up to this order keep the full Gram matrix in memory.
pub const FULL_GRAM_LIMIT: usize = 4000;

/// Multipliers at or below `SV_THRESHOLD · C` count as zero; at or above
/// `C − SV_THRESHOLD · C` as bounded.
pub const SV_THRESHOLD: f64 = 1e-8;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stopping tolerance on the maximal pairwise KKT violation.
    pub tolerance: f64,
    /// Budget of pair updates.
    pub max_iterations: u64,
    /// Kernel row cache budget, used only above [`FULL_GRAM_LIMIT`].
    pub cache_bytes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-3,
            max_iterations: 10_000_000,
            cache_bytes: 256 << 20,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        SolverConfig {
            tolerance,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(SvmError::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations < 1 {
            return Err(SvmError::InvalidParameter(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Kernel values for a training set: either a precomputed Gram matrix or
/// lazily evaluated rows over borrowed samples.
#[derive(Debug, Clone)]
pub enum KernelMatrix<'a> {
    Gram(GramMatrix),
    OnDemand {
        spec: KernelSpec,
        samples: &'a [FeatureVector],
    },
}

impl<'a> KernelMatrix<'a> {
    /// Precomputes the Gram matrix when the sample count is at most
    /// [`FULL_GRAM_LIMIT`], otherwise defers to a row cache.
    pub fn for_samples(spec: &KernelSpec, samples: &'a [FeatureVector]) -> Result<Self> {
        spec.validate()?;
        if samples.is_empty() {
            return Err(SvmError::InvalidParameter("empty sample list".into()));
        }
        if samples.len() <= FULL_GRAM_LIMIT {
            kernel::gram(spec, samples).map(KernelMatrix::Gram)
        } else {
            Ok(KernelMatrix::OnDemand {
                spec: *spec,
                samples,
            })
        }
    }

    pub fn order(&self) -> usize {
        match self {
            KernelMatrix::Gram(g) => g.order(),
            KernelMatrix::OnDemand { samples, .. } => samples.len(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        match self {
            KernelMatrix::Gram(g) => Ok(g.get(i, j)),
            KernelMatrix::OnDemand { spec, samples } => kernel::eval(spec, &samples[i], &samples[j]),
        }
    }

    pub(crate) fn diagonal(&self) -> Result<Vec<f64>> {
        (0..self.order()).map(|i| self.entry(i, i)).collect()
    }

    /// `Σⱼ weights[j] · K(xⱼ, xᵢ)` for every `i`.
    pub(crate) fn weighted_row_sums(&self, weights: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        let mut out = vec![0.0; n];
        for (j, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            match self {
                KernelMatrix::Gram(g) => {
                    for (o, k) in out.iter_mut().zip(g.row(j)) {
                        *o += w * k;
                    }
                }
                KernelMatrix::OnDemand { .. } => {
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += w * self.entry(j, i)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

impl From<GramMatrix> for KernelMatrix<'_> {
    fn from(g: GramMatrix) -> Self {
        KernelMatrix::Gram(g)
    }
}

/// The classification dual: kernel values, ±1 labels and the box bound `C`.
#[derive(Debug, Clone)]
pub struct SvcDualProblem<'a> {
    kernel: KernelMatrix<'a>,
    labels: Vec<f64>,
    cost: f64,
}

impl<'a> SvcDualProblem<'a> {
    pub fn new(kernel: impl Into<KernelMatrix<'a>>, labels: Vec<f64>, cost: f64) -> Result<Self> {
        let kernel = kernel.into();
        if kernel.order() != labels.len() {
            return Err(SvmError::DimensionMismatch {
                expected: kernel.order(),
                found: labels.len(),
            });
        }
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(SvmError::InvalidParameter(format!(
                "C must be finite and positive, got {cost}"
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(SvmError::InvalidLabel(bad.to_string()));
        }
        let has_pos = labels.iter().any(|&y| y > 0.0);
        let has_neg = labels.iter().any(|&y| y < 0.0);
        if !(has_pos && has_neg) {
            return Err(SvmError::SingleClass);
        }
        Ok(SvcDualProblem {
            kernel,
            labels,
            cost,
        })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn kernel(&self) -> &KernelMatrix<'a> {
        &self.kernel
    }

    /// Gradient of the dual objective, `(Qλ)ᵢ − 1` with `Qᵢⱼ = yᵢyⱼKᵢⱼ`.
    pub(crate) fn gradient(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        let weights: Vec<f64> = lambdas.iter().zip(&self.labels).map(|(l, y)| l * y).collect();
        let f = self.kernel.weighted_row_sums(&weights)?;
        Ok(f.iter().zip(&self.labels).map(|(fi, y)| y * fi - 1.0).collect())
    }
}

/// Multipliers, bias and diagnostics for one solved dual.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub lambdas: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub iterations: u64,
    /// Maximal pairwise KKT violation `m(λ) − M(λ)` at exit.
    pub max_violation: f64,
}

impl DualSolution {
    /// One-line diagnostic summary.
    pub fn summary(&self) -> String {
        format!(
            "iterations={} violation={:.3e} objective={:.10e}",
            self.iterations, self.max_violation, self.objective
        )
    }
}

impl fmt::Display for DualSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

/// `½ Σᵢ Σⱼ λᵢλⱼyᵢyⱼK(xᵢ,xⱼ) − Σᵢ λᵢ`.
pub fn dual_objective(problem: &SvcDualProblem<'_>, lambdas: &[f64]) -> Result<f64> {
    if lambdas.len() != problem.order() {
        return Err(SvmError::DimensionMismatch {
            expected: problem.order(),
            found: lambdas.len(),
        });
    }
    let grad = problem.gradient(lambdas)?;
    // ½λᵀQλ − eᵀλ = ½ λᵀ(Qλ − e) − ½ eᵀλ
    Ok(lambdas
        .iter()
        .zip(&grad)
        .map(|(l, g)| 0.5 * l * (g - 1.0))
        .sum())
}

/// Multiplier state relative to the box, with the [`SV_THRESHOLD`] slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundState {
    Lower,
    Free,
    Upper,
}

pub fn bound_state(lambda: f64, upper: f64) -> BoundState {
    let eps = SV_THRESHOLD * upper;
    if lambda <= eps {
        BoundState::Lower
    } else if lambda >= upper - eps {
        BoundState::Upper
    } else {
        BoundState::Free
    }
}

/// Bias from the dual gradient.
///
/// Averages `−yᵢ Gᵢ` over free variables. Without free variables, returns the
/// midpoint of the interval of offsets admitted by the KKT inequalities of the
/// bounded ones. `None` when every variable is at its lower bound and the
/// interval is unbounded on a side.
pub(crate) fn bias_from_gradient(
    signs: &[f64],
    grad: &[f64],
    alpha: &[f64],
    upper: f64,
) -> Option<f64> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for ((&y, &g), &a) in signs.iter().zip(grad).zip(alpha) {
        let v = -y * g;
        match (bound_state(a, upper), y > 0.0) {
            (BoundState::Free, _) => {
                free_sum += v;
                free_count += 1;
            }
            (BoundState::Lower, true) | (BoundState::Upper, false) => lo = lo.max(v),
            (BoundState::Lower, false) | (BoundState::Upper, true) => hi = hi.min(v),
        }
    }
    if free_count > 0 {
        Some(free_sum / free_count as f64)
    } else if lo.is_finite() && hi.is_finite() {
        Some(0.5 * (lo + hi))
    } else if lo.is_finite() {
        Some(lo)
    } else if hi.is_finite() {
        Some(hi)
    } else {
        None
    }
}

/// Per-sample complementarity violations of a classification solution.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub violations: Vec<f64>,
    pub max_violation: f64,
}

/// Checks, for every sample with margin `mᵢ = yᵢD(xᵢ)`:
/// `λᵢ = 0 ⇒ mᵢ ≥ 1`, `0 < λᵢ < C ⇒ mᵢ = 1`, `λᵢ = C ⇒ mᵢ ≤ 1`, and reports
/// the amount by which each fails.
pub fn kkt_report(problem: &SvcDualProblem<'_>, solution: &DualSolution) -> Result<KktReport> {
    let grad = problem.gradient(&solution.lambdas)?;
    let violations: Vec<f64> = grad
        .iter()
        .zip(problem.labels())
        .zip(&solution.lambdas)
        .map(|((&g, &y), &l)| {
            // yᵢD(xᵢ) − 1 = Gᵢ + yᵢb
            let slack = g + y * solution.bias;
            match bound_state(l, problem.cost()) {
                BoundState::Lower => (-slack).max(0.0),
                BoundState::Free => slack.abs(),
                BoundState::Upper => slack.max(0.0),
            }
        })
        .collect();
    let max_violation = violations.iter().copied().fold(0.0, f64::max);
    Ok(KktReport {
        violations,
        max_violation,
    })
}
