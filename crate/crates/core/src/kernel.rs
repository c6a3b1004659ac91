//! Closed-form Mercer kernels and Gram matrices.
//!
//! Three kernels are provided:
//!
//! - linear: `K(x, y) = x·y`
//! - polynomial: `K(x, y) = (c + x·y)^d`
//! - gaussian: `K(x, y) = exp(-‖x - y‖² / c)`
//!
//! The Gaussian width uses the *divisor* convention: `c` divides the squared
//! distance and there is no factor of two. It corresponds to the common
//! `γ` parametrization through `γ = 1 / c`, so `gauss:c=200` is the same
//! kernel as an RBF with `γ = 0.005`.
//!
//! Feature maps are never materialized. For the degree-2 polynomial kernel
//! with `c = 1` in two dimensions the implicit map is
//! `Φ(x) = (1, √2·x₁, √2·x₂, x₁², x₂², √2·x₁x₂)`; the tests check the kernel
//! against it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, SvmError};

/// Sparse vector with strictly increasing 1-based indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds a sparse vector from `(index, value)` pairs.
    ///
    /// Indices are 1-based and must be strictly increasing. Zero values are
    /// dropped.
    pub fn new(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut last = 0u32;
        for (idx, val) in pairs {
            if idx == 0 {
                return Err(SvmError::InvalidParameter(
                    "sparse indices are 1-based".into(),
                ));
            }
            if idx <= last {
                return Err(SvmError::InvalidParameter(format!(
                    "sparse indices must be strictly increasing ({idx} after {last})"
                )));
            }
            if !val.is_finite() {
                return Err(SvmError::NonFinite(format!("component {idx} = {val}")));
            }
            last = idx;
            if val != 0.0 {
                indices.push(idx);
                values.push(val);
            }
        }
        Ok(SparseVector { indices, values })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    fn dot_sparse(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut sum = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }

    fn dot_dense(&self, dense: &[f64]) -> Result<f64> {
        if let Some(&last) = self.indices.last() {
            if last as usize > dense.len() {
                return Err(SvmError::DimensionMismatch {
                    expected: dense.len(),
                    found: last as usize,
                });
            }
        }
        Ok(self
            .indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| v * dense[i as usize - 1])
            .sum())
    }
}

/// A sample point, dense or sparse.
///
/// All components are finite; constructors enforce it.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureVector {
    Dense(Vec<f64>),
    Sparse(SparseVector),
}

impl FeatureVector {
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SvmError::InvalidParameter(
                "dense vectors need at least one component".into(),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SvmError::NonFinite(format!("component {} = {v}", i + 1)));
        }
        Ok(FeatureVector::Dense(values))
    }

    pub fn sparse(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        SparseVector::new(pairs).map(FeatureVector::Sparse)
    }

    /// Nominal dimension: the length of a dense vector, the largest stored
    /// index of a sparse one.
    pub fn dim(&self) -> usize {
        match self {
            FeatureVector::Dense(v) => v.len(),
            FeatureVector::Sparse(s) => s.indices.last().map_or(0, |&i| i as usize),
        }
    }

    /// Iterates over nonzero components as `(1-based index, value)`.
    pub fn nonzeros(&self) -> Box<dyn Iterator<Item = (u32, f64)> + '_> {
        match self {
            FeatureVector::Dense(v) => Box::new(
                v.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0.0)
                    .map(|(i, &x)| (i as u32 + 1, x)),
            ),
            FeatureVector::Sparse(s) => {
                Box::new(s.indices.iter().copied().zip(s.values.iter().copied()))
            }
        }
    }

    /// Component at a 1-based index (zero when absent).
    pub fn get(&self, index: usize) -> f64 {
        match self {
            FeatureVector::Dense(v) => index
                .checked_sub(1)
                .and_then(|i| v.get(i))
                .copied()
                .unwrap_or(0.0),
            FeatureVector::Sparse(s) => match s.indices.binary_search(&(index as u32)) {
                Ok(p) => s.values[p],
                Err(_) => 0.0,
            },
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim.max(self.dim())];
        for (i, v) in self.nonzeros() {
            out[i as usize - 1] = v;
        }
        out
    }

    pub fn squared_norm(&self) -> f64 {
        match self {
            FeatureVector::Dense(v) => v.iter().map(|x| x * x).sum(),
            FeatureVector::Sparse(s) => s.values.iter().map(|x| x * x).sum(),
        }
    }

    /// Inner product. Dense operands must agree in length; a sparse operand
    /// may not reference an index past the end of a dense one.
    pub fn dot(&self, other: &FeatureVector) -> Result<f64> {
        match (self, other) {
            (FeatureVector::Dense(a), FeatureVector::Dense(b)) => {
                if a.len() != b.len() {
                    return Err(SvmError::DimensionMismatch {
                        expected: a.len(),
                        found: b.len(),
                    });
                }
                Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
            }
            (FeatureVector::Sparse(a), FeatureVector::Sparse(b)) => Ok(a.dot_sparse(b)),
            (FeatureVector::Sparse(s), FeatureVector::Dense(d))
            | (FeatureVector::Dense(d), FeatureVector::Sparse(s)) => s.dot_dense(d),
        }
    }
}

impl From<SparseVector> for FeatureVector {
    fn from(s: SparseVector) -> Self {
        FeatureVector::Sparse(s)
    }
}

/// Kernel selection plus parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    /// `(offset + x·y)^degree`
    Polynomial { offset: f64, degree: u32 },
    /// `exp(-‖x - y‖² / width)`
    Gaussian { width: f64 },
}

impl KernelSpec {
    pub fn polynomial(offset: f64, degree: u32) -> Result<Self> {
        let spec = KernelSpec::Polynomial { offset, degree };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        let spec = KernelSpec::Gaussian { width };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { offset, degree } => {
                if !offset.is_finite() || offset < 0.0 {
                    return Err(SvmError::InvalidParameter(format!(
                        "polynomial offset must be finite and >= 0, got {offset}"
                    )));
                }
                if degree < 1 {
                    return Err(SvmError::InvalidParameter(
                        "polynomial degree must be >= 1".into(),
                    ));
                }
                Ok(())
            }
            KernelSpec::Gaussian { width } => {
                if !width.is_finite() || width <= 0.0 {
                    return Err(SvmError::InvalidParameter(format!(
                        "gaussian width must be finite and > 0, got {width}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The equivalent `γ` for the Gaussian kernel (`γ = 1 / c`).
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            KernelSpec::Gaussian { width } => Some(1.0 / width),
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, KernelSpec::Linear)
    }

    /// Kernel value from the inner product and the two squared norms.
    #[inline]
    fn combine(&self, xy: f64, xx: f64, yy: f64) -> f64 {
        match *self {
            KernelSpec::Linear => xy,
            KernelSpec::Polynomial { offset, degree } => (offset + xy).powi(degree as i32),
            KernelSpec::Gaussian { width } => {
                // Summed as (xx + yy) so swapping the arguments is exact.
                let d2 = ((xx + yy) - 2.0 * xy).max(0.0);
                (-d2 / width).exp()
            }
        }
    }

    fn check(value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(SvmError::NonFinite(format!("kernel value {value}")))
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { offset, degree } => write!(f, "poly:c={offset},d={degree}"),
            KernelSpec::Gaussian { width } => write!(f, "gauss:c={width}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = SvmError;

    /// Parses `linear`, `poly:c=<real>,d=<int>` or `gauss:c=<real>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || SvmError::KernelSpec(s.to_string());
        let s = s.trim();
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k, p),
            None => (s, ""),
        };
        let mut c = None;
        let mut d = None;
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = kv.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "c" if c.is_none() => c = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
                "d" if d.is_none() => d = Some(value.trim().parse::<u32>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let spec = match kind {
            "linear" if c.is_none() && d.is_none() => KernelSpec::Linear,
            "poly" => KernelSpec::Polynomial {
                offset: c.ok_or_else(bad)?,
                degree: d.ok_or_else(bad)?,
            },
            "gauss" if d.is_none() => KernelSpec::Gaussian {
                width: c.ok_or_else(bad)?,
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Evaluates `K(x, y)`.
pub fn eval(spec: &KernelSpec, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    let xy = x.dot(y)?;
    let (xx, yy) = match spec {
        KernelSpec::Gaussian { .. } => (x.squared_norm(), y.squared_norm()),
        _ => (0.0, 0.0),
    };
    KernelSpec::check(spec.combine(xy, xx, yy))
}

/// Symmetric kernel matrix over a sample list, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    values: Vec<f64>,
    kernel: KernelSpec,
}

impl GramMatrix {
    /// Wraps precomputed values. `values` must be `n × n`, row-major and
    /// symmetric.
    pub fn from_values(kernel: KernelSpec, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(SvmError::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(SvmError::InvalidParameter(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(GramMatrix { n, values, kernel })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

/// Evaluates one kernel row `K(samples[i], samples[·])` given precomputed
/// squared norms.
pub(crate) fn kernel_row(
    spec: &KernelSpec,
    samples: &[FeatureVector],
    norms: &[f64],
    i: usize,
) -> Result<Vec<f64>> {
    let xi = &samples[i];
    samples
        .iter()
        .zip(norms)
        .map(|(xj, &nj)| KernelSpec::check(spec.combine(xi.dot(xj)?, norms[i], nj)))
        .collect()
}

pub(crate) fn squared_norms(samples: &[FeatureVector]) -> Vec<f64> {
    samples.iter().map(FeatureVector::squared_norm).collect()
}

/// Builds the full Gram matrix. Rows are filled in parallel; the result does
/// not depend on scheduling.
pub fn gram(spec: &KernelSpec, samples: &[FeatureVector]) -> Result<GramMatrix> {
    spec.validate()?;
    if samples.is_empty() {
        return Err(SvmError::InvalidParameter("empty sample list".into()));
    }
    let n = samples.len();
    let norms = squared_norms(samples);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &samples[i];
            (0..=i)
                .map(|j| {
                    KernelSpec::check(spec.combine(xi.dot(&samples[j])?, norms[i], norms[j]))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(GramMatrix {
        n,
        values,
        kernel: *spec,
    })
}
