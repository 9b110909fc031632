//! Binary positional features over the ten illusionable phonemes.
//!
//! Feature `3·rank(phoneme) + rank(position)` is set when the phoneme occurs
//! at that position class anywhere in the word. Phonemes rank as
//! B, D, DH, F, L, M, P, TH, V, W; positions as initial, medial, final.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phoneme::{Phoneme, Position, Pronunciation};

pub const FEATURE_PHONEMES: [Phoneme; 10] = [
    Phoneme::B,
    Phoneme::D,
    Phoneme::Dh,
    Phoneme::F,
    Phoneme::L,
    Phoneme::M,
    Phoneme::P,
    Phoneme::Th,
    Phoneme::V,
    Phoneme::W,
];

pub const FEATURE_DIM: usize = FEATURE_PHONEMES.len() * 3;

pub fn feature_index(phoneme: Phoneme, position: Position) -> Result<usize> {
    let rank = FEATURE_PHONEMES
        .iter()
        .position(|&p| p == phoneme)
        .ok_or(Error::NotRulePhoneme(phoneme))?;
    Ok(3 * rank + position.rank())
}

/// `"B@initial"`-style name of each feature, in index order.
pub fn feature_names() -> Vec<String> {
    FEATURE_PHONEMES
        .iter()
        .flat_map(|p| Position::ALL.iter().map(move |pos| format!("{p}@{pos}")))
        .collect()
}

pub fn parse_feature_name(name: &str) -> Result<usize> {
    let (ph, pos) = name
        .split_once('@')
        .ok_or_else(|| Error::invalid(format!("feature name {name:?} lacks '@'")))?;
    let position = Position::ALL
        .into_iter()
        .find(|p| p.name() == pos)
        .ok_or_else(|| Error::invalid(format!("unknown position in feature {name:?}")))?;
    feature_index(ph.parse()?, position)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FeatureBits(u32);

impl FeatureBits {
    pub fn get(self, index: usize) -> bool {
        index < FEATURE_DIM && self.0 & (1 << index) != 0
    }

    pub fn set(&mut self, index: usize) {
        assert!(index < FEATURE_DIM, "feature index {index} out of range");
        self.0 |= 1 << index;
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..FEATURE_DIM).filter(move |&i| self.get(i))
    }

    pub fn to_dense(self) -> [f64; FEATURE_DIM] {
        let mut dense = [0.0; FEATURE_DIM];
        for i in self.indices() {
            dense[i] = 1.0;
        }
        dense
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = Self::default();
        for i in indices {
            bits.set(i);
        }
        bits
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IllusionFeatureVector {
    pub word: String,
    pub bits: FeatureBits,
}

impl IllusionFeatureVector {
    pub fn new(word: impl Into<String>, bits: FeatureBits) -> Self {
        Self {
            word: word.into(),
            bits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn dense(&self) -> [f64; FEATURE_DIM] {
        self.bits.to_dense()
    }

    pub fn set_names(&self) -> Vec<String> {
        let names = feature_names();
        self.bits.indices().map(|i| names[i].clone()).collect()
    }

    pub fn from_names(word: impl Into<String>, names: &[impl AsRef<str>]) -> Result<Self> {
        let indices = names
            .iter()
            .map(|n| parse_feature_name(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(word, FeatureBits::from_indices(indices)))
    }
}

impl fmt::Display for IllusionFeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.set_names()).map_err(|_| fmt::Error)?)
    }
}

impl Serialize for IllusionFeatureVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.set_names().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IllusionFeatureVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        Self::from_names("", &names).map_err(serde::de::Error::custom)
    }
}

pub fn extract_features(pron: &Pronunciation) -> IllusionFeatureVector {
    let mut bits = FeatureBits::default();
    for (p, pos) in pron.positions() {
        if let Ok(i) = feature_index(p, pos) {
            bits.set(i);
        }
    }
    IllusionFeatureVector::new(pron.word(), bits)
}
