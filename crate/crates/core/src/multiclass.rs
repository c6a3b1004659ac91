//! One-against-one multiclass classification.
//!
//! One binary machine per unordered class pair `(i, j)`, `i < j` in class
//! order, with `+1` standing for class `i`. Prediction takes one vote per
//! machine. Ties between the most-voted classes go to the larger sum of
//! `|D(x)|` over the votes each tied class won, then to the earlier class.

use rayon::prelude::*;

use crate::classify::{decision_value, label_of, train_svc, SvcModel};
use crate::data::LabeledDataset;
use crate::error::{Result, SvmError};
use crate::kernel::FeatureVector;
use crate::qp::SolverConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct PairModel {
    /// Position of the `+1` class in [`MulticlassModel::classes`].
    pub first: usize,
    /// Position of the `−1` class.
    pub second: usize,
    pub model: SvcModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassModel {
    pub classes: Vec<i64>,
    /// In lexicographic `(first, second)` order.
    pub pairs: Vec<PairModel>,
}

/// Tally behind one prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Votes {
    pub counts: Vec<u32>,
    /// Per class, `Σ |D(x)|` over the votes it won.
    pub strength: Vec<f64>,
    pub winner: i64,
}

impl MulticlassModel {
    /// Validates and assembles a model from pairwise machines.
    pub fn new(classes: Vec<i64>, pairs: Vec<PairModel>) -> Result<Self> {
        let k = classes.len();
        if k < 2 {
            return Err(SvmError::InvalidParameter("need at least two classes".into()));
        }
        let mut sorted = classes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err(SvmError::InvalidParameter("duplicate class label".into()));
        }
        let expected: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect();
        let found: Vec<(usize, usize)> = pairs.iter().map(|p| (p.first, p.second)).collect();
        if expected != found {
            return Err(SvmError::InvalidParameter(format!(
                "expected {} pairwise models in (i, j) order",
                expected.len()
            )));
        }
        Ok(MulticlassModel { classes, pairs })
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Distinct training samples that are a support vector of some pair.
    pub fn n_support(&self) -> usize {
        let mut seen: Vec<&FeatureVector> = Vec::new();
        for p in &self.pairs {
            for sv in &p.model.support_vectors {
                if !seen.contains(&sv) {
                    seen.push(sv);
                }
            }
        }
        seen.len()
    }
}

pub fn train_ovo(
    data: &LabeledDataset,
    kernel: &crate::kernel::KernelSpec,
    cost: f64,
    config: &SolverConfig,
) -> Result<MulticlassModel> {
    let classes = data.classes();
    if classes.len() < 2 {
        return Err(SvmError::SingleClass);
    }
    let k = classes.len();
    let jobs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let pairs = jobs
        .par_iter()
        .map(|&(i, j)| {
            let idx: Vec<usize> = (0..data.len())
                .filter(|&t| data.targets[t] == classes[i] || data.targets[t] == classes[j])
                .collect();
            let mut sub = data.subset(&idx);
            for t in sub.targets.iter_mut() {
                *t = if *t == classes[i] { 1 } else { -1 };
            }
            train_svc(&sub, kernel, cost, config).map(|model| PairModel {
                first: i,
                second: j,
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MulticlassModel::new(classes, pairs)
}

pub fn votes(model: &MulticlassModel, x: &FeatureVector) -> Result<Votes> {
    let k = model.n_classes();
    let mut counts = vec![0u32; k];
    let mut strength = vec![0.0; k];
    for p in &model.pairs {
        let d = decision_value(&p.model, x)?;
        let won = if label_of(d) == 1 { p.first } else { p.second };
        counts[won] += 1;
        strength[won] += d.abs();
    }
    let mut best = 0;
    for c in 1..k {
        if counts[c] > counts[best] || (counts[c] == counts[best] && strength[c] > strength[best]) {
            best = c;
        }
    }
    Ok(Votes {
        counts,
        strength,
        winner: model.classes[best],
    })
}

pub fn predict_vote(model: &MulticlassModel, x: &FeatureVector) -> Result<i64> {
    votes(model, x).map(|v| v.winner)
}

pub fn error_rate(model: &MulticlassModel, data: &LabeledDataset) -> Result<f64> {
    let wrong = data
        .samples
        .par_iter()
        .zip(&data.targets)
        .map(|(x, &y)| predict_vote(model, x).map(|p| usize::from(p != y)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(wrong as f64 / data.len().max(1) as f64)
}
