use illusion_core::corpus::{log_frequency, prevalence, sample_words, FrequencyLexicon};
use illusion_core::data::{self, reference_lexicon};
use illusion_core::features::extract_features;
use illusion_core::mcgurk::RuleTable;
use illusion_core::phoneme::phonemize;
use illusion_core::ridge::WordPredictor;
use illusion_core::sentence::{
    frequency_features, score_sentence_max, score_sentence_with_freq, sentence_report_csv, FrequencyAdjustment,
    OovPolicy,
};
use illusion_core::Error;

#[test]
fn of_course_i_am_takes_the_best_word() {
    let model = data::shipped_model();
    let lex = reference_lexicon();
    let pred = score_sentence_max("Of course I am!", &model, lex, OovPolicy::Skip).unwrap();
    let words: Vec<&str> = pred.word_scores.iter().map(|(w, _)| w.as_str()).collect();
    assert_eq!(words, ["of", "course", "i", "am"]);
    let best = ["of", "course", "i", "am"]
        .iter()
        .map(|w| {
            let p = phonemize(w, lex).unwrap();
            model.predict_word(w, &extract_features(&p)).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(pred.score, best);
}

#[test]
fn sentence_scoring_properties() {
    let model = data::shipped_model();
    let lex = reference_lexicon();
    let score = |s: &str| score_sentence_max(s, &model, lex, OovPolicy::Skip).unwrap().score;
    assert_eq!(score("that was the question"), score("question the was that"));
    assert!(score("that was the question") >= score("that was"));
    assert_eq!(score("that was zzxqy the question"), score("that was the question"));
    let single = phonemize("father", lex).unwrap();
    assert_eq!(score("Father."), model.predict_word("father", &extract_features(&single)).unwrap());
    assert!(matches!(
        score_sentence_max("zzxqy!", &model, lex, OovPolicy::Skip),
        Err(Error::AllWordsOutOfVocabulary)
    ));
    assert!(matches!(
        score_sentence_max("that zzxqy", &model, lex, OovPolicy::Fail),
        Err(Error::OutOfVocabulary(_))
    ));
    assert!(matches!(
        score_sentence_max(" ?! ", &model, lex, OovPolicy::Skip),
        Err(Error::EmptySentence)
    ));
}

#[test]
fn bundled_sentence_report() {
    let model = data::shipped_model();
    let preds: Vec<_> = data::sentences()
        .iter()
        .map(|s| score_sentence_max(&s.sentence, &model, reference_lexicon(), OovPolicy::Skip).unwrap())
        .collect();
    let csv = sentence_report_csv(&preds).unwrap();
    assert_eq!(csv.lines().count(), 33);
    assert!(csv.starts_with("sentence,score,argmax_word,oov_words\n"));
}

#[test]
fn frequency_variant_degenerates_to_max_rule() {
    let model = data::shipped_model();
    let lex = reference_lexicon();
    let freq = data::toy_frequency_lexicon();
    let table = RuleTable::builtin();
    let s = "What good times they had, to be sure";
    let plain = score_sentence_max(s, &model, lex, OovPolicy::Skip).unwrap();
    let none = score_sentence_with_freq(s, &model, lex, &freq, &table, None, OovPolicy::Skip).unwrap();
    assert_eq!(none.prediction.score, plain.score);
    let zero = FrequencyAdjustment::default();
    let z = score_sentence_with_freq(s, &model, lex, &freq, &table, Some(&zero), OovPolicy::Skip).unwrap();
    assert_eq!(z.prediction.score, plain.score);
}

#[test]
fn frequency_features_toy_example() {
    let freq = FrequencyLexicon::parse("the 100\ncat 10\nsees 4\n").unwrap();
    let table = RuleTable::builtin();
    // "the" starts with DH and can be dubbed; "cat" cannot
    let f = frequency_features("the cat", reference_lexicon(), &freq, &table);
    assert!((f.attempted - 100f64.ln()).abs() < 1e-12);
    assert!((f.not_attempted - 10f64.ln()).abs() < 1e-12);
    let g = frequency_features("cat sees", reference_lexicon(), &freq, &table);
    assert!((g.not_attempted - (10f64.ln() + 4f64.ln()) / 2.0).abs() < 1e-12);
    assert_eq!(g.attempted, g.percepts);
}

#[test]
fn corpus_examples() {
    let lex = FrequencyLexicon::parse("a 8\nb 1\nc 1\n").unwrap();
    assert!((prevalence(&lex, 1, None).unwrap() - 0.8).abs() < 1e-12);
    assert_eq!(prevalence(&lex, 3, None).unwrap(), 1.0);
    assert!(prevalence(&lex, 4, None).is_err());
    assert!((prevalence(&lex, 1, Some(16)).unwrap() - 0.5).abs() < 1e-12);
    let the = FrequencyLexicon::parse("the 100\nx 1\n").unwrap();
    assert!((log_frequency(&the, "the") - 100f64.ln()).abs() < 1e-12);
    assert_eq!(log_frequency(&the, "zzxqy"), 0.0);
}

#[test]
fn sampling_contracts() {
    let lex = FrequencyLexicon::parse("a 3\nb 1\n").unwrap();
    let draws = sample_words(&lex, 100_000, 2, false, 1).unwrap();
    let frac = draws.iter().filter(|w| *w == "a").count() as f64 / 1e5;
    assert!((frac - 0.75).abs() <= 0.01, "{frac}");
    assert_eq!(sample_words(&lex, 50, 2, false, 9).unwrap(), sample_words(&lex, 50, 2, false, 9).unwrap());
    assert_ne!(sample_words(&lex, 50, 2, false, 9).unwrap(), sample_words(&lex, 50, 2, false, 10).unwrap());
    let toy = data::toy_frequency_lexicon();
    let top: Vec<String> = toy.rank_order()[..10].to_vec();
    for w in sample_words(&toy, 500, 10, false, 3).unwrap() {
        assert!(top.contains(&w));
    }
    assert!(sample_words(&toy, 11, 10, true, 3).is_err());
    let mut all = sample_words(&toy, toy.len(), toy.len(), true, 4).unwrap();
    all.sort();
    let mut expected = toy.rank_order().to_vec();
    expected.sort();
    assert_eq!(all, expected);
}
