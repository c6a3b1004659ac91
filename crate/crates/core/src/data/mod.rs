//! Datasets, synthetic generators, file formats and splitting.

mod io;
mod synth;

pub use io::{read_csv, read_dataset, read_sparse, write_csv, write_sparse, parse_sparse, format_sparse};
pub use synth::{
    gen_blobs, gen_topics, gen_waveform, gen_waveform_with, waveform_basis, BlobSpec, TopicSpec,
    WaveformHooks, WaveformSpec, WAVEFORM_DIM,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SvmError};
use crate::kernel::FeatureVector;

/// Identifier of the pseudo-random generator and normal transform behind
/// every seeded operation. Recorded in experiment reports.
pub const RNG_ID: &str = "chacha8 (rand_chacha 0.10) + ziggurat normals (rand_distr 0.6)";

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a master seed (splitmix64 mix).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples paired with one target each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub samples: Vec<FeatureVector>,
    pub targets: Vec<T>,
}

/// Integer class labels (`±1` for binary problems).
pub type LabeledDataset = Dataset<i64>;
/// Real-valued regression targets.
pub type RegressionDataset = Dataset<f64>;

impl<T: Clone> Dataset<T> {
    pub fn new(samples: Vec<FeatureVector>, targets: Vec<T>) -> Result<Self> {
        if samples.len() != targets.len() {
            return Err(SvmError::DimensionMismatch {
                expected: samples.len(),
                found: targets.len(),
            });
        }
        let mut dense_len = None;
        for s in &samples {
            if let FeatureVector::Dense(v) = s {
                match dense_len {
                    None => dense_len = Some(v.len()),
                    Some(d) if d != v.len() => {
                        return Err(SvmError::DimensionMismatch {
                            expected: d,
                            found: v.len(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(Dataset { samples, targets })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest sample dimension.
    pub fn dim(&self) -> usize {
        self.samples.iter().map(FeatureVector::dim).max().unwrap_or(0)
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i].clone()).collect(),
        }
    }

    pub fn extend(&mut self, other: &Self) {
        self.samples.extend_from_slice(&other.samples);
        self.targets.extend_from_slice(&other.targets);
    }
}

impl RegressionDataset {
    /// Reinterprets real targets as integer labels.
    pub fn into_labeled(self) -> Result<LabeledDataset> {
        let targets = self
            .targets
            .iter()
            .map(|&t| {
                if t.fract() == 0.0 && t.abs() < 9.0e15 {
                    Ok(t as i64)
                } else {
                    Err(SvmError::InvalidLabel(t.to_string()))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Dataset {
            samples: self.samples,
            targets,
        })
    }
}

impl LabeledDataset {
    pub fn to_real(&self) -> RegressionDataset {
        Dataset {
            samples: self.samples.clone(),
            targets: self.targets.iter().map(|&t| t as f64).collect(),
        }
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<i64> {
        let mut c = self.targets.clone();
        c.sort_unstable();
        c.dedup();
        c
    }
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    idx
}

/// Shuffled partition with `round(n · fraction)` training samples.
pub fn split<T: Clone>(data: &Dataset<T>, train_fraction: f64, seed: u64) -> Result<(Dataset<T>, Dataset<T>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SvmError::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n_train = (data.len() as f64 * train_fraction).round() as usize;
    split_count(data, n_train, seed)
}

/// Shuffled partition with exactly `n_train` training samples.
pub fn split_count<T: Clone>(data: &Dataset<T>, n_train: usize, seed: u64) -> Result<(Dataset<T>, Dataset<T>)> {
    if n_train == 0 || n_train >= data.len() {
        return Err(SvmError::InvalidParameter(format!(
            "split of {} samples with {n_train} for training leaves a side empty",
            data.len()
        )));
    }
    let idx = shuffled_indices(data.len(), seed);
    Ok((data.subset(&idx[..n_train]), data.subset(&idx[n_train..])))
}
