//! Seeded synthetic data.

use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

use super::{rng, Dataset, LabeledDataset};
use crate::error::{Result, SvmError};
use crate::kernel::FeatureVector;

pub const WAVEFORM_DIM: usize = 21;

/// Triangular waveforms `(h₁(i), h₂(i), h₃(i))` at `i ∈ 1..=21`, where
/// `h₁(i) = max(6 − |i − 11|, 0)`, `h₂(i) = h₁(i − 4)`, `h₃(i) = h₁(i + 4)`.
pub fn waveform_basis(i: usize) -> Result<[f64; 3]> {
    if !(1..=WAVEFORM_DIM).contains(&i) {
        return Err(SvmError::InvalidParameter(format!(
            "waveform coordinate must lie in 1..=21, got {i}"
        )));
    }
    let h1 = |i: i64| (6 - (i - 11).abs()).max(0) as f64;
    let i = i as i64;
    Ok([h1(i), h1(i - 4), h1(i + 4)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSpec {
    pub n: usize,
    pub seed: u64,
}

/// Overrides for exactness tests.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WaveformHooks {
    pub u: Option<f64>,
    pub zero_noise: bool,
    pub class: Option<u8>,
}

/// Three-class waveform data with equal priors. Each sample draws its class,
/// one `u ~ U(0, 1)` and 21 independent standard normal noise terms:
///
/// ```text
/// class 1: xᵢ = u h₁(i) + (1 − u) h₂(i) + εᵢ
/// class 2: xᵢ = u h₁(i) + (1 − u) h₃(i) + εᵢ
/// class 3: xᵢ = u h₂(i) + (1 − u) h₃(i) + εᵢ
/// ```
pub fn gen_waveform(spec: &WaveformSpec) -> Result<LabeledDataset> {
    gen_waveform_with(spec, &WaveformHooks::default())
}

pub fn gen_waveform_with(spec: &WaveformSpec, hooks: &WaveformHooks) -> Result<LabeledDataset> {
    if spec.n < 3 {
        return Err(SvmError::InvalidParameter(format!(
            "waveform sample count must be >= 3, got {}",
            spec.n
        )));
    }
    if let Some(c) = hooks.class {
        if !(1..=3).contains(&c) {
            return Err(SvmError::InvalidParameter(format!("waveform class {c}")));
        }
    }
    let basis: Vec<[f64; 3]> = (1..=WAVEFORM_DIM)
        .map(waveform_basis)
        .collect::<Result<_>>()?;
    let mut r = rng(spec.seed);
    let mut samples = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let class: u8 = r.random_range(1..=3);
        let u: f64 = r.random();
        let class = hooks.class.unwrap_or(class);
        let u = hooks.u.unwrap_or(u);
        let (a, b) = match class {
            1 => (0, 1),
            2 => (0, 2),
            _ => (1, 2),
        };
        let x: Vec<f64> = basis
            .iter()
            .map(|h| {
                let noise: f64 = StandardNormal.sample(&mut r);
                let noise = if hooks.zero_noise { 0.0 } else { noise };
                u * h[a] + (1.0 - u) * h[b] + noise
            })
            .collect();
        samples.push(FeatureVector::dense(x)?);
        labels.push(class as i64);
    }
    Dataset::new(samples, labels)
}

/// Gaussian clouds `N(μₖ, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub means: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    pub seed: u64,
    /// Emits every sample exactly at its class mean.
    pub zero_noise: bool,
}

impl BlobSpec {
    pub fn new(means: Vec<Vec<f64>>, per_class: usize, seed: u64) -> Self {
        let counts = vec![per_class; means.len()];
        BlobSpec {
            means,
            counts,
            seed,
            zero_noise: false,
        }
    }
}

/// Samples each cloud in turn. Two clouds are labelled `−1` and `+1` in the
/// order given; more clouds are labelled `1..=k`.
pub fn gen_blobs(spec: &BlobSpec) -> Result<LabeledDataset> {
    let k = spec.means.len();
    if k < 2 || spec.counts.len() != k {
        return Err(SvmError::InvalidParameter(
            "need at least two means and one count per mean".into(),
        ));
    }
    let dim = spec.means[0].len();
    if dim == 0 || spec.means.iter().any(|m| m.len() != dim) {
        return Err(SvmError::InvalidParameter("means must share a nonzero dimension".into()));
    }
    if spec.means.iter().flatten().any(|v| !v.is_finite()) {
        return Err(SvmError::NonFinite("blob mean".into()));
    }
    if spec.counts.contains(&0) {
        return Err(SvmError::InvalidParameter("blob counts must be >= 1".into()));
    }
    let mut r = rng(spec.seed);
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (c, (mean, &count)) in spec.means.iter().zip(&spec.counts).enumerate() {
        let label = match (k, c) {
            (2, 0) => -1,
            (2, _) => 1,
            _ => c as i64 + 1,
        };
        for _ in 0..count {
            let x = mean
                .iter()
                .map(|m| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    if spec.zero_noise {
                        *m
                    } else {
                        m + z
                    }
                })
                .collect();
            samples.push(FeatureVector::dense(x)?);
            labels.push(label);
        }
    }
    Dataset::new(samples, labels)
}

/// Two-topic bag-of-words documents.
///
/// The vocabulary splits into two small topic blocks followed by a large
/// shared background block. Each document draws its topic uniformly, then
/// `doc_len` tokens: with probability `topic_rate` from its own topic block,
/// otherwise from the background, all uniformly. Features are raw term
/// counts, stored sparse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopicSpec {
    pub n: usize,
    pub vocab: usize,
    pub topic_words: usize,
    pub doc_len: usize,
    pub topic_rate: f64,
    pub seed: u64,
}

impl Default for TopicSpec {
    fn default() -> Self {
        TopicSpec {
            n: 1000,
            vocab: 700,
            topic_words: 35,
            doc_len: 40,
            topic_rate: 0.1,
            seed: 0,
        }
    }
}

pub fn gen_topics(spec: &TopicSpec) -> Result<LabeledDataset> {
    if spec.vocab <= 2 * spec.topic_words || spec.topic_words == 0 || spec.doc_len == 0 {
        return Err(SvmError::InvalidParameter("inconsistent topic vocabulary".into()));
    }
    if !(0.0..=1.0).contains(&spec.topic_rate) {
        return Err(SvmError::InvalidParameter("topic rate must lie in [0, 1]".into()));
    }
    let background = spec.vocab - 2 * spec.topic_words;
    let mut r = rng(spec.seed);
    let mut samples = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let topic: usize = r.random_range(0..2);
        let mut counts = vec![0u32; spec.vocab];
        for _ in 0..spec.doc_len {
            let word = if r.random::<f64>() < spec.topic_rate {
                topic * spec.topic_words + r.random_range(0..spec.topic_words)
            } else {
                2 * spec.topic_words + r.random_range(0..background)
            };
            counts[word] += 1;
        }
        let pairs = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32 + 1, c as f64));
        samples.push(FeatureVector::sparse(pairs)?);
        labels.push(if topic == 0 { -1 } else { 1 });
    }
    Dataset::new(samples, labels)
}
