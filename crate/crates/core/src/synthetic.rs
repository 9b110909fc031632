//! Synthetic illusionability labels from a known sparse linear model.
//!
//! Real per-word labels come from human listeners. For end-to-end checks the
//! trainer is fed `y = Xβ* + b* + ε` instead, where β* has a handful of
//! nonzero entries and ε is Gaussian.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::{extract_features, FeatureBits, IllusionFeatureVector, FEATURE_DIM};
use crate::phoneme::{phonemize, PronunciationLexicon};
use crate::ridge::{LabeledRecord, LabeledWord};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    pub coefficients: [f64; FEATURE_DIM],
    pub intercept: f64,
    pub noise_sigma: f64,
}

impl SyntheticModel {
    /// `nonzero` coefficients drawn uniformly from `[0.05, 0.35]`.
    pub fn random(nonzero: usize, noise_sigma: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coefficients = [0.0; FEATURE_DIM];
        for i in sample(&mut rng, FEATURE_DIM, nonzero.min(FEATURE_DIM)) {
            coefficients[i] = rng.gen_range(0.05..0.35);
        }
        Self {
            coefficients,
            intercept: 0.02,
            noise_sigma,
        }
    }

    pub fn signal(&self, features: &IllusionFeatureVector) -> f64 {
        self.intercept
            + features
                .bits
                .indices()
                .map(|i| self.coefficients[i])
                .sum::<f64>()
    }

    fn noise(&self, rng: &mut impl Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        self.noise_sigma * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn label(&self, features: &[IllusionFeatureVector], seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        features.iter().map(|f| self.signal(f) + self.noise(&mut rng)).collect()
    }
}

/// `n` synthetic words `w0000…` with independent Bernoulli(`density`) bits.
pub fn synthetic_words(n: usize, density: f64, model: &SyntheticModel, seed: u64) -> Vec<LabeledWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features: Vec<IllusionFeatureVector> = (0..n)
        .map(|i| {
            let bits = FeatureBits::from_indices((0..FEATURE_DIM).filter(|_| rng.gen_bool(density)));
            IllusionFeatureVector::new(format!("w{i:04}"), bits)
        })
        .collect();
    let labels = model.label(&features, rng.gen());
    features
        .into_iter()
        .zip(labels)
        .map(|(f, observed)| LabeledWord {
            word: f.word.clone(),
            features: f,
            observed,
        })
        .collect()
}

/// Labeled-data rows for real lexicon words. Each label is clamped to
/// `[−1, 1]` and split symmetrically into accuracies around 0.5. Words the
/// lexicon lacks are returned separately.
pub fn synthetic_records(
    words: &[String],
    lexicon: &PronunciationLexicon,
    model: &SyntheticModel,
    seed: u64,
) -> (Vec<LabeledRecord>, Vec<String>) {
    let mut known = Vec::new();
    let mut oov = Vec::new();
    for w in words {
        match phonemize(w, lexicon) {
            Ok(p) => known.push(extract_features(&p)),
            Err(_) => oov.push(w.clone()),
        }
    }
    let labels = model.label(&known, seed);
    let records = known
        .iter()
        .zip(labels)
        .map(|(f, y)| {
            let y = y.clamp(-1.0, 1.0);
            LabeledRecord {
                word: f.word.clone(),
                baseline_accuracy: (1.0 + y) / 2.0,
                illusory_accuracy: (1.0 - y) / 2.0,
            }
        })
        .collect();
    (records, oov)
}
