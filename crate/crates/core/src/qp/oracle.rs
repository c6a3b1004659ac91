//! Reference solver for tiny classification duals.
//!
//! Accelerated projected gradient with a constant `1/L` step and
//! function-value restarts. The projection onto
//! `{λ : Σ yᵢλᵢ = 0, 0 ≤ λᵢ ≤ C}` is exact: the multiplier of the equality
//! constraint solves a monotone piecewise-linear equation whose breakpoints
//! are enumerated. Nothing here is shared with the SMO path except the bias
//! rule.

use super::{bias_from_gradient, DualSolution, SvcDualProblem};
use crate::error::{Result, SvmError};

pub const ORACLE_MAX_ORDER: usize = 8;

const GRADIENT_MAPPING_TOL: f64 = 1e-9;
const MAX_ITERATIONS: u64 = 20_000_000;

/// Euclidean projection of `z` onto `{x : sᵀx = 0, 0 ≤ x ≤ c}`.
pub(crate) fn project(z: &[f64], signs: &[f64], c: f64) -> Vec<f64> {
    let at = |nu: f64| -> f64 {
        z.iter()
            .zip(signs)
            .map(|(&zi, &s)| s * (zi - nu * s).clamp(0.0, c))
            .sum()
    };
    // h(ν) = Σ sᵢ clip(zᵢ − ν sᵢ) is nonincreasing with kinks where a
    // component hits 0 or c.
    let mut knots: Vec<f64> = z
        .iter()
        .zip(signs)
        .flat_map(|(&zi, &s)| [s * zi, s * (zi - c)])
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let mut nu = knots[0];
    let mut h_prev = at(knots[0]);
    if h_prev > 0.0 {
        for w in knots.windows(2) {
            let h_next = at(w[1]);
            if h_next <= 0.0 {
                // Linear between consecutive knots.
                nu = if h_prev == h_next {
                    w[0]
                } else {
                    w[0] + (w[1] - w[0]) * h_prev / (h_prev - h_next)
                };
                break;
            }
            h_prev = h_next;
            nu = w[1];
        }
    }
    z.iter()
        .zip(signs)
        .map(|(&zi, &s)| (zi - nu * s).clamp(0.0, c))
        .collect()
}

fn quad_form(q: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    q.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn value(q: &[Vec<f64>], x: &[f64]) -> f64 {
    let qx = quad_form(q, x);
    x.iter().zip(&qx).map(|(a, b)| 0.5 * a * b - a).sum()
}

/// Solves the classification dual for at most [`ORACLE_MAX_ORDER`] samples.
///
/// Runs until the gradient mapping `L‖λ − P(λ − ∇f(λ)/L)‖` is at most `1e-9`.
/// Deterministic.
pub fn brute_force_dual(problem: &SvcDualProblem<'_>) -> Result<DualSolution> {
    let n = problem.order();
    if n > ORACLE_MAX_ORDER {
        return Err(SvmError::OracleTooLarge {
            n,
            max: ORACLE_MAX_ORDER,
        });
    }
    let y = problem.labels();
    let c = problem.cost();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = y[i] * y[j] * problem.kernel().entry(i, j)?;
        }
    }
    // Gershgorin bound on the largest eigenvalue.
    let lipschitz = q
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-12);

    let grad_at = |x: &[f64]| -> Vec<f64> { quad_form(&q, x).iter().map(|v| v - 1.0).collect() };
    let step = |x: &[f64], g: &[f64]| -> Vec<f64> {
        let z: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b / lipschitz).collect();
        project(&z, y, c)
    };
    let mapping_norm = |x: &[f64]| -> f64 {
        let p = step(x, &grad_at(x));
        lipschitz
            * x.iter()
                .zip(&p)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
    };

    let mut x = vec![0.0; n];
    let mut fx = 0.0;
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut iterations = 0u64;
    let mut residual = mapping_norm(&x);
    while residual > GRADIENT_MAPPING_TOL && iterations < MAX_ITERATIONS {
        iterations += 1;
        let x_next = step(&z, &grad_at(&z));
        let f_next = value(&q, &x_next);
        if f_next > fx && t > 1.0 {
            // Momentum overshot: restart from the last iterate. A step from
            // the iterate itself is plain projected gradient and is always
            // accepted, so rounding near the optimum cannot stall the loop.
            z = x.clone();
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        z = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        x = x_next;
        fx = f_next;
        t = t_next;
        residual = mapping_norm(&x);
    }

    let grad = grad_at(&x);
    let bias = bias_from_gradient(y, &grad, &x, c).unwrap_or(0.0);
    let solution = DualSolution {
        objective: value(&q, &x),
        lambdas: x,
        bias,
        iterations,
        max_violation: residual,
    };
    if residual > GRADIENT_MAPPING_TOL {
        return Err(SvmError::IterationLimit {
            iterations,
            violation: residual,
            best: Box::new(solution),
        });
    }
    Ok(solution)
}
