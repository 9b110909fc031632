//! Sentence-level illusionability.
//!
//! The main rule scores a sentence by its most illusionable word. A variant
//! adds three mean-log-frequency features (words with no dub, dubbed words,
//! and the real words a dub could be heard as) through a small linear
//! correction. That variant has not been shown to beat the max rule and is
//! kept for comparison.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::{log_frequency, log_frequency_floor, FrequencyLexicon};
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::mcgurk::{enumerate_percepts, lexical_confusions, plan_dubs, PlanMode, RuleTable};
use crate::phoneme::{normalize_word, Pronunciation, PronunciationLexicon};
use crate::ridge::{fit_ridge, FeatureMatrix, WordPredictor};

/// Percept candidates examined per dubbed word when collecting confusions.
const PERCEPT_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    #[default]
    Skip,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentencePrediction {
    pub sentence: String,
    pub word_scores: Vec<(String, f64)>,
    pub score: f64,
    pub oov_words: Vec<String>,
}

impl SentencePrediction {
    pub fn argmax_word(&self) -> Option<&str> {
        self.word_scores
            .iter()
            .find(|(_, s)| *s == self.score)
            .map(|(w, _)| w.as_str())
    }
}

/// Whitespace split, surrounding punctuation stripped, lowercased.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(normalize_word)
        .filter(|w| !w.is_empty())
        .collect()
}

/// Looks a token up verbatim, then as its apostrophe-separated pieces
/// spoken back to back (`"jo's"` → `jo` + `s`).
pub fn phonemize_token(token: &str, lexicon: &PronunciationLexicon) -> Option<Pronunciation> {
    if let Some(p) = lexicon.pronunciations(token).and_then(|p| p.first()) {
        return Some(p.clone());
    }
    if !token.contains('\'') {
        return None;
    }
    let mut phonemes = Vec::new();
    for part in token.split('\'').filter(|p| !p.is_empty()) {
        phonemes.extend_from_slice(lexicon.pronunciations(part)?.first()?.phonemes());
    }
    Pronunciation::new(token, phonemes).ok()
}

pub fn score_sentence_max(
    sentence: &str,
    model: &dyn WordPredictor,
    lexicon: &PronunciationLexicon,
    oov_policy: OovPolicy,
) -> Result<SentencePrediction> {
    let tokens = tokenize(sentence);
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    let mut word_scores = Vec::new();
    let mut oov_words = Vec::new();
    for token in tokens {
        match phonemize_token(&token, lexicon) {
            Some(pron) => {
                let score = model.predict_word(&token, &extract_features(&pron))?;
                word_scores.push((token, score));
            }
            None if oov_policy == OovPolicy::Fail => return Err(Error::OutOfVocabulary(token)),
            None => oov_words.push(token),
        }
    }
    let score = word_scores
        .iter()
        .map(|(_, s)| *s)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
        .ok_or(Error::AllWordsOutOfVocabulary)?;
    Ok(SentencePrediction {
        sentence: sentence.to_string(),
        word_scores,
        score,
        oov_words,
    })
}

/// Mean log frequencies of the three word classes of a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyFeatures {
    pub not_attempted: f64,
    pub attempted: f64,
    pub percepts: f64,
}

impl FrequencyFeatures {
    pub fn as_array(&self) -> [f64; 3] {
        [self.not_attempted, self.attempted, self.percepts]
    }
}

pub fn frequency_features(
    sentence: &str,
    lexicon: &PronunciationLexicon,
    freq: &FrequencyLexicon,
    table: &RuleTable,
) -> FrequencyFeatures {
    let floor = log_frequency_floor(freq);
    let mean = |words: &[String]| {
        if words.is_empty() {
            floor
        } else {
            words.iter().map(|w| log_frequency(freq, w)).sum::<f64>() / words.len() as f64
        }
    };
    let mut not_attempted = Vec::new();
    let mut attempted = Vec::new();
    let mut percepts = BTreeSet::new();
    for token in tokenize(sentence) {
        let Some(pron) = phonemize_token(&token, lexicon) else {
            continue;
        };
        let plans = plan_dubs(&pron, PlanMode::AllSites, table);
        if plans.is_empty() {
            not_attempted.push(token);
            continue;
        }
        for plan in &plans {
            let candidates = enumerate_percepts(plan, PERCEPT_LIMIT);
            percepts.extend(lexical_confusions(&candidates, lexicon).into_iter().map(|(w, _)| w));
        }
        attempted.push(token);
    }
    let percepts: Vec<String> = percepts.into_iter().collect();
    FrequencyFeatures {
        not_attempted: mean(&not_attempted),
        attempted: mean(&attempted),
        percepts: mean(&percepts),
    }
}

/// Linear correction added to the max-rule score.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FrequencyAdjustment {
    pub bias: f64,
    pub weights: [f64; 3],
}

impl FrequencyAdjustment {
    pub fn apply(&self, max_score: f64, features: &FrequencyFeatures) -> f64 {
        max_score
            + self.bias
            + self
                .weights
                .iter()
                .zip(features.as_array())
                .map(|(w, f)| w * f)
                .sum::<f64>()
    }

    /// Ridge fit of `observed − max_score` on the three features.
    pub fn fit(samples: &[(FrequencyFeatures, f64, f64)], lambda: f64) -> Result<Self> {
        let rows: Vec<[f64; 3]> = samples.iter().map(|(f, _, _)| f.as_array()).collect();
        let targets: Vec<f64> = samples.iter().map(|(_, max, obs)| obs - max).collect();
        let model = fit_ridge(&FeatureMatrix::from_rows(&rows)?, &targets, lambda)?;
        Ok(Self {
            bias: model.intercept,
            weights: [model.coefficients[0], model.coefficients[1], model.coefficients[2]],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyScored {
    /// Prediction whose `score` includes the adjustment.
    pub prediction: SentencePrediction,
    pub max_score: f64,
    pub features: FrequencyFeatures,
}

/// Max-rule score plus the frequency correction; without an adjustment it
/// falls back to the max rule.
pub fn score_sentence_with_freq(
    sentence: &str,
    model: &dyn WordPredictor,
    lexicon: &PronunciationLexicon,
    freq: &FrequencyLexicon,
    table: &RuleTable,
    adjustment: Option<&FrequencyAdjustment>,
    oov_policy: OovPolicy,
) -> Result<FrequencyScored> {
    let mut prediction = score_sentence_max(sentence, model, lexicon, oov_policy)?;
    let features = frequency_features(sentence, lexicon, freq, table);
    let max_score = prediction.score;
    if let Some(adj) = adjustment {
        prediction.score = adj.apply(max_score, &features);
    }
    Ok(FrequencyScored {
        prediction,
        max_score,
        features,
    })
}

pub fn observed_sentence_illusionability(original_video_accuracy: f64, illusory_video_accuracy: f64) -> f64 {
    original_video_accuracy - illusory_video_accuracy
}

/// `sentence,score,argmax_word,oov_words` with OOV words space-separated.
pub fn sentence_report_csv(predictions: &[SentencePrediction]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["sentence", "score", "argmax_word", "oov_words"])?;
    for p in predictions {
        wtr.write_record([
            p.sentence.as_str(),
            &p.score.to_string(),
            p.argmax_word().unwrap_or(""),
            &p.oov_words.join(" "),
        ])?;
    }
    Ok(String::from_utf8(wtr.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8"))
}
