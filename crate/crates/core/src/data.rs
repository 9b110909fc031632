//! Data shipped with the crate: a CMU-style pronouncing dictionary, the
//! 200-word evaluation sample, the 32 evaluation sentences and a toy
//! frequency list.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::corpus::FrequencyLexicon;
use crate::phoneme::PronunciationLexicon;
use crate::ridge::{ModelFile, ModelPredictor};

pub const CMUDICT_TEXT: &str = include_str!("../data/cmudict.dict");
pub const EVALUATION_WORDS_CSV: &str = include_str!("../data/evaluation_words.csv");
pub const SENTENCES_CSV: &str = include_str!("../data/sentences.csv");
pub const TOY_FREQUENCIES_TEXT: &str = include_str!("../data/toy_frequencies.txt");
/// Synthetic labels for the 200-word sample (seed 7, six active features,
/// noise σ = 0.05) and the model trained on them with 10,000 trials.
pub const SYNTHETIC_LABELS_CSV: &str = include_str!("../data/synthetic_labels.csv");
pub const SHIPPED_MODEL_JSON: &str = include_str!("../data/model.json");

/// Published human-subject outcomes. They cannot be recomputed without
/// listeners; they are carried so the arithmetic around them can be checked.
pub mod reference {
    /// Word-level error rates, audio only and illusory video.
    pub const WORD_BASELINE_ERROR: f64 = 0.100;
    pub const WORD_ILLUSORY_ERROR: f64 = 0.248;
    /// Sentence-level error rates, original and illusory video.
    pub const SENTENCE_BASELINE_ERROR: f64 = 0.134;
    pub const SENTENCE_ILLUSORY_ERROR: f64 = 0.328;
    pub const WORD_OOF_CORRELATION: f64 = 0.57;
    pub const SENTENCE_OOF_CORRELATION: f64 = 0.33;
    pub const WORD_TRAIN_CORRELATION: (f64, f64) = (0.911, 0.006);
    pub const WORD_TEST_CORRELATION: (f64, f64) = (0.446, 0.289);
    pub const CALIBRATION_MEANS: [f64; 4] = crate::ridge::REFERENCE_CALIBRATION_MEANS;
    pub const TOP_10K_PREVALENCE: f64 = 0.806;
    pub const SAMPLE_ATTEMPTED: usize = 147;
    pub const SAMPLE_SIZE: usize = 200;
    pub const ILLUSIONABLE_SENTENCES: usize = 23;
}

static LEXICON: OnceLock<PronunciationLexicon> = OnceLock::new();

/// The bundled dictionary, parsed on first use.
pub fn reference_lexicon() -> &'static PronunciationLexicon {
    LEXICON.get_or_init(|| PronunciationLexicon::parse(CMUDICT_TEXT).expect("bundled dictionary parses"))
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct SampleWord {
    pub word: String,
    pub attempted: bool,
}

pub fn evaluation_words() -> Vec<SampleWord> {
    csv::Reader::from_reader(EVALUATION_WORDS_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled word list parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentenceGroup {
    Illusionable,
    NotIllusionable,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct SampleSentence {
    pub sentence: String,
    pub group: SentenceGroup,
}

pub fn sentences() -> Vec<SampleSentence> {
    csv::Reader::from_reader(SENTENCES_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled sentence list parses")
}

pub fn shipped_model() -> ModelPredictor {
    ModelPredictor::new(ModelFile::from_json(SHIPPED_MODEL_JSON).expect("bundled model parses")).expect("bundled model is valid")
}

pub fn toy_frequency_lexicon() -> FrequencyLexicon {
    FrequencyLexicon::parse(TOY_FREQUENCIES_TEXT).expect("bundled frequency list parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lists_have_expected_shape() {
        let words = evaluation_words();
        assert_eq!(words.len(), 200);
        assert_eq!(words.iter().filter(|w| w.attempted).count(), 147);
        let s = sentences();
        assert_eq!(s.len(), 32);
        assert_eq!(s.iter().filter(|s| s.group == SentenceGroup::Illusionable).count(), 23);
    }

    #[test]
    fn reference_aggregates() {
        use reference::*;
        let word = (1.0 - WORD_BASELINE_ERROR) - (1.0 - WORD_ILLUSORY_ERROR);
        assert!((word - 0.148).abs() < 1e-12);
        let sentence = (1.0 - SENTENCE_BASELINE_ERROR) - (1.0 - SENTENCE_ILLUSORY_ERROR);
        assert!((sentence - 0.194).abs() < 1e-12);
    }
}
