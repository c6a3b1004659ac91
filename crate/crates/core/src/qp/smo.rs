//! Sequential minimal optimization over maximal violating pairs.
//!
//! Both duals are instances of
//!
//! ```text
//! min_a  ½ aᵀQa + pᵀa   s.t.  sᵀa = 0,  0 ≤ aₜ ≤ C
//! ```
//!
//! with `sₜ ∈ {−1, +1}` and `Qₜᵤ = sₜ sᵤ K(x_{b(t)}, x_{b(u)})`, where `b` maps
//! a variable to its sample. Classification uses one variable per sample;
//! regression uses two (`b(t) = t mod n`).
//!
//! Each step picks `i = argmax_{I_up} −sᵢGᵢ` and `j = argmin_{I_low} −sⱼGⱼ`
//! (lowest index on ties) and solves the two-variable subproblem exactly.
//! The loop stops once `m − M ≤ τ`.

use super::cache::Rows;
use super::{bias_from_gradient, DualSolution, KernelMatrix, SolverConfig, SvcDualProblem};
use crate::error::{Result, SvmError};

const TAU: f64 = 1e-12;

struct Formulation<'p> {
    signs: &'p [f64],
    linear: &'p [f64],
    upper: f64,
    /// Number of samples; variable `t` uses sample `t % n`.
    n: usize,
}

struct SmoOutcome {
    alpha: Vec<f64>,
    grad: Vec<f64>,
    iterations: u64,
    violation: f64,
    converged: bool,
}

#[inline]
fn in_up(s: f64, a: f64, c: f64) -> bool {
    if s > 0.0 {
        a < c
    } else {
        a > 0.0
    }
}

#[inline]
fn in_low(s: f64, a: f64, c: f64) -> bool {
    if s > 0.0 {
        a > 0.0
    } else {
        a < c
    }
}

/// Returns `(i, m, j, M)`; indices are `None` when the set is empty.
fn select_pair(f: &Formulation<'_>, alpha: &[f64], grad: &[f64]) -> (Option<usize>, f64, Option<usize>, f64) {
    let mut i = None;
    let mut m = f64::NEG_INFINITY;
    let mut j = None;
    let mut big_m = f64::INFINITY;
    for t in 0..alpha.len() {
        let s = f.signs[t];
        let v = -s * grad[t];
        if in_up(s, alpha[t], f.upper) && v > m {
            m = v;
            i = Some(t);
        }
        if in_low(s, alpha[t], f.upper) && v < big_m {
            big_m = v;
            j = Some(t);
        }
    }
    (i, m, j, big_m)
}

fn run(
    matrix: &KernelMatrix<'_>,
    f: &Formulation<'_>,
    config: &SolverConfig,
) -> Result<SmoOutcome> {
    config.validate()?;
    let vars = f.signs.len();
    let n = f.n;
    let c = f.upper;
    let diag = matrix.diagonal()?;
    let mut rows = Rows::new(matrix, config.cache_bytes);

    let mut alpha = vec![0.0; vars];
    let mut grad = f.linear.to_vec();
    let mut iterations = 0u64;

    loop {
        let (sel_i, m, sel_j, big_m) = select_pair(f, &alpha, &grad);
        let violation = if sel_i.is_some() && sel_j.is_some() {
            m - big_m
        } else {
            0.0
        };
        let (i, j) = match (sel_i, sel_j) {
            (Some(i), Some(j)) if violation > config.tolerance => (i, j),
            _ => {
                return Ok(SmoOutcome {
                    alpha,
                    grad,
                    iterations,
                    violation: violation.max(0.0),
                    converged: true,
                })
            }
        };
        if iterations >= config.max_iterations {
            return Ok(SmoOutcome {
                alpha,
                grad,
                iterations,
                violation,
                converged: false,
            });
        }
        iterations += 1;

        let (si, sj) = (f.signs[i], f.signs[j]);
        let (bi, bj) = (i % n, j % n);
        let row_i = rows.row(bi)?;
        let row_j = rows.row(bj)?;
        let kii = diag[bi];
        let kjj = diag[bj];
        // Qᵢⱼ
        let qij = si * sj * row_i[bj];
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);

        if si != sj {
            let mut quad = kii + kjj + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = kii + kjj - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }

        alpha[i] = ai;
        alpha[j] = aj;
        let di = ai - old_i;
        let dj = aj - old_j;
        if di == 0.0 && dj == 0.0 {
            continue;
        }
        // Gₜ += Qₜᵢ Δaᵢ + Qₜⱼ Δaⱼ
        let wi = si * di;
        let wj = sj * dj;
        for (t, (g, s)) in grad.iter_mut().zip(f.signs).enumerate().take(vars) {
            let b = t % n;
            *g += s * (wi * row_i[b] + wj * row_j[b]);
        }
    }
}

fn objective(alpha: &[f64], grad: &[f64], linear: &[f64]) -> f64 {
    // ½aᵀQa + pᵀa = ½ aᵀ(G + p)
    alpha
        .iter()
        .zip(grad)
        .zip(linear)
        .map(|((a, g), p)| 0.5 * a * (g + p))
        .sum()
}

/// Solves the classification dual.
///
/// Fails with [`SvmError::IterationLimit`] (carrying the last iterate) when
/// the pair-update budget runs out before the violation drops to `τ`.
pub fn solve_svc_dual(problem: &SvcDualProblem<'_>, config: &SolverConfig) -> Result<DualSolution> {
    let n = problem.order();
    let linear = vec![-1.0; n];
    let f = Formulation {
        signs: problem.labels(),
        linear: &linear,
        upper: problem.cost(),
        n,
    };
    let out = run(problem.kernel(), &f, config)?;
    let bias = bias_from_gradient(f.signs, &out.grad, &out.alpha, f.upper).unwrap_or(0.0);
    let solution = DualSolution {
        objective: objective(&out.alpha, &out.grad, &linear),
        lambdas: out.alpha,
        bias,
        iterations: out.iterations,
        max_violation: out.violation,
    };
    if out.converged {
        Ok(solution)
    } else {
        Err(SvmError::IterationLimit {
            iterations: solution.iterations,
            violation: solution.max_violation,
            best: Box::new(solution),
        })
    }
}

/// Solution of the regression dual.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrDualSolution {
    /// `βᵢ = αᵢ − αᵢ′`; the regression function is `Σᵢ βᵢ K(xᵢ, ·) + b`.
    pub beta: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub iterations: u64,
    pub max_violation: f64,
}

/// Solves the ε-insensitive regression dual
///
/// ```text
/// min  ½ βᵀKβ + ε Σᵢ (αᵢ + αᵢ′) − Σᵢ yᵢ βᵢ
/// s.t. Σᵢ βᵢ = 0,  0 ≤ αᵢ, αᵢ′ ≤ C,  βᵢ = αᵢ − αᵢ′
/// ```
///
/// where `αᵢ` is the multiplier of `yᵢ − f(xᵢ) ≤ ε + ξᵢ′` and `αᵢ′` that of
/// `f(xᵢ) − yᵢ ≤ ε + ξᵢ`.
pub fn solve_svr_dual(
    kernel: &KernelMatrix<'_>,
    targets: &[f64],
    cost: f64,
    epsilon: f64,
    config: &SolverConfig,
) -> Result<SvrDualSolution> {
    let n = kernel.order();
    if targets.len() != n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            found: targets.len(),
        });
    }
    if !(cost > 0.0 && cost.is_finite()) {
        return Err(SvmError::InvalidParameter(format!(
            "C must be finite and positive, got {cost}"
        )));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(SvmError::InvalidParameter(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    if let Some(t) = targets.iter().find(|t| !t.is_finite()) {
        return Err(SvmError::NonFinite(format!("target {t}")));
    }

    let signs: Vec<f64> = (0..2 * n).map(|t| if t < n { 1.0 } else { -1.0 }).collect();
    let linear: Vec<f64> = (0..2 * n)
        .map(|t| {
            if t < n {
                epsilon - targets[t]
            } else {
                epsilon + targets[t - n]
            }
        })
        .collect();
    let f = Formulation {
        signs: &signs,
        linear: &linear,
        upper: cost,
        n,
    };
    let out = run(kernel, &f, config)?;
    let bias = bias_from_gradient(&signs, &out.grad, &out.alpha, cost).unwrap_or(0.0);
    let obj = objective(&out.alpha, &out.grad, &linear);
    if !out.converged {
        return Err(SvmError::IterationLimit {
            iterations: out.iterations,
            violation: out.violation,
            best: Box::new(DualSolution {
                lambdas: out.alpha,
                bias,
                objective: obj,
                iterations: out.iterations,
                max_violation: out.violation,
            }),
        });
    }
    let beta = (0..n).map(|i| out.alpha[i] - out.alpha[i + n]).collect();
    Ok(SvrDualSolution {
        beta,
        bias,
        objective: obj,
        iterations: out.iterations,
        max_violation: out.violation,
    })
}
