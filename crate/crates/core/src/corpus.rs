//! Word-frequency lists: loading, prevalence, frequency-proportional
//! sampling, and log-frequency lookup.
//!
//! List format is one `word<whitespace>count` pair per line with `#`
//! comments, as in the public Project Gutenberg frequency lists
//! (<https://en.wiktionary.org/wiki/Wiktionary:Frequency_lists#Project_Gutenberg>).

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::phoneme::{normalize_word, SkippedLine};

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyLexicon {
    counts: HashMap<String, u64>,
    total: u64,
    /// Descending count, ties alphabetical.
    rank_order: Vec<String>,
    min_count: u64,
    skipped: Vec<SkippedLine>,
}

impl FrequencyLexicon {
    pub fn from_counts(pairs: impl IntoIterator<Item = (String, u64)>) -> Result<Self> {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for (word, count) in pairs {
            if count == 0 {
                continue;
            }
            *counts.entry(word).or_default() += count;
        }
        Self::build(counts, Vec::new())
    }

    fn build(counts: HashMap<String, u64>, skipped: Vec<SkippedLine>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::NoValidEntries("frequency list".into()));
        }
        let mut rank_order: Vec<String> = counts.keys().cloned().collect();
        rank_order.sort_by(|a, b| counts[b].cmp(&counts[a]).then_with(|| a.cmp(b)));
        let total = counts.values().sum();
        let min_count = *counts.values().min().expect("nonempty");
        Ok(Self {
            counts,
            total,
            rank_order,
            min_count,
            skipped,
        })
    }

    /// Duplicate words are summed; malformed lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut skipped = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match parse_line(line) {
                Ok((word, count)) => *counts.entry(word).or_default() += count,
                Err(reason) => {
                    log::warn!("frequency list line {} skipped: {reason}", i + 1);
                    skipped.push(SkippedLine { line: i + 1, reason });
                }
            }
        }
        Self::build(counts, skipped)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn rank_order(&self) -> &[String] {
        &self.rank_order
    }

    pub fn skipped(&self) -> &[SkippedLine] {
        &self.skipped
    }
}

fn parse_line(line: &str) -> std::result::Result<(String, u64), String> {
    let mut parts = line.split_whitespace();
    let (Some(word), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("expected `word count`, found {line:?}"));
    };
    let count: u64 = count.parse().map_err(|_| format!("bad count {count:?}"))?;
    if count == 0 {
        return Err("count must be positive".into());
    }
    let word = normalize_word(word);
    if word.is_empty() {
        return Err("empty word".into());
    }
    Ok((word, count))
}

/// Share of corpus tokens covered by the `top_k` most frequent words.
/// `corpus_total` replaces the list sum when the list is itself a
/// truncation of a larger corpus.
pub fn prevalence(lex: &FrequencyLexicon, top_k: usize, corpus_total: Option<u64>) -> Result<f64> {
    if top_k == 0 || top_k > lex.len() {
        return Err(Error::invalid(format!(
            "top_k {top_k} outside 1..={}",
            lex.len()
        )));
    }
    let total = corpus_total.unwrap_or(lex.total);
    if total < lex.total {
        return Err(Error::invalid("corpus total is smaller than the list sum"));
    }
    let covered: u64 = lex.rank_order[..top_k].iter().map(|w| lex.counts[w]).sum();
    Ok(covered as f64 / total as f64)
}

/// Draws `n` words from the `top_k` most frequent in proportion to their
/// counts. Without replacement (`unique`), each draw renormalizes over the
/// words not yet chosen.
pub fn sample_words(lex: &FrequencyLexicon, n: usize, top_k: usize, unique: bool, seed: u64) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    if top_k == 0 || top_k > lex.len() {
        return Err(Error::invalid(format!("top_k {top_k} outside 1..={}", lex.len())));
    }
    if unique && n > top_k {
        return Err(Error::invalid(format!(
            "cannot draw {n} unique words from the top {top_k}"
        )));
    }
    let pool = &lex.rank_order[..top_k];
    let weights: Vec<u64> = pool.iter().map(|w| lex.counts[w]).collect();
    let mut dist = WeightedIndex::new(&weights).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let i = dist.sample(&mut rng);
        out.push(pool[i].clone());
        if unique && out.len() < n {
            dist.update_weights(&[(i, &0)])
                .map_err(|e| Error::invalid(e.to_string()))?;
        }
    }
    Ok(out)
}

/// Natural log of the word's count; out-of-vocabulary words get the log of
/// the smallest count in the list.
pub fn log_frequency(lex: &FrequencyLexicon, word: &str) -> f64 {
    (lex.count(word).unwrap_or(lex.min_count) as f64).ln()
}

pub fn log_frequency_floor(lex: &FrequencyLexicon) -> f64 {
    (lex.min_count as f64).ln()
}
