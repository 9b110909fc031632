//! Phoneme inventory, pronunciation lexicon, and positional classification.
//!
//! The inventory is the 44-phoneme American English set written in ARPAbet:
//! the 24 CMU consonants plus 20 vowels (the 15 CMU vowels and the reduced
//! vowels AX, AXR, IX, UX, AXH).
//!
//! Lexicon files use the CMU Pronouncing Dictionary layout:
//!
//! ```text
//! ;;; comment
//! READ  R IY1 D
//! READ(2)  R EH1 D
//! ```
//!
//! Stress digits are stripped at parse time and variant pronunciations keep
//! their file order.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhonemeClass {
    Vowel,
    Consonant,
}

macro_rules! inventory {
    ($( $variant:ident => $sym:literal, $class:ident; )*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Phoneme {
            $( $variant, )*
        }

        impl Phoneme {
            /// Every phoneme of the inventory, vowels first.
            pub const ALL: &'static [Phoneme] = &[ $( Phoneme::$variant, )* ];

            pub fn symbol(self) -> &'static str {
                match self {
                    $( Phoneme::$variant => $sym, )*
                }
            }

            pub fn class(self) -> PhonemeClass {
                match self {
                    $( Phoneme::$variant => PhonemeClass::$class, )*
                }
            }

            /// Looks up a bare symbol (no stress digit), case-insensitively.
            pub fn from_symbol(symbol: &str) -> Option<Phoneme> {
                let upper = symbol.to_ascii_uppercase();
                match upper.as_str() {
                    $( $sym => Some(Phoneme::$variant), )*
                    _ => None,
                }
            }
        }
    };
}

inventory! {
    Aa => "AA", Vowel;
    Ae => "AE", Vowel;
    Ah => "AH", Vowel;
    Ao => "AO", Vowel;
    Aw => "AW", Vowel;
    Ax => "AX", Vowel;
    Axh => "AXH", Vowel;
    Axr => "AXR", Vowel;
    Ay => "AY", Vowel;
    Eh => "EH", Vowel;
    Er => "ER", Vowel;
    Ey => "EY", Vowel;
    Ih => "IH", Vowel;
    Ix => "IX", Vowel;
    Iy => "IY", Vowel;
    Ow => "OW", Vowel;
    Oy => "OY", Vowel;
    Uh => "UH", Vowel;
    Uw => "UW", Vowel;
    Ux => "UX", Vowel;
    B => "B", Consonant;
    Ch => "CH", Consonant;
    D => "D", Consonant;
    Dh => "DH", Consonant;
    F => "F", Consonant;
    G => "G", Consonant;
    Hh => "HH", Consonant;
    Jh => "JH", Consonant;
    K => "K", Consonant;
    L => "L", Consonant;
    M => "M", Consonant;
    N => "N", Consonant;
    Ng => "NG", Consonant;
    P => "P", Consonant;
    R => "R", Consonant;
    S => "S", Consonant;
    Sh => "SH", Consonant;
    T => "T", Consonant;
    Th => "TH", Consonant;
    V => "V", Consonant;
    W => "W", Consonant;
    Y => "Y", Consonant;
    Z => "Z", Consonant;
    Zh => "ZH", Consonant;
}

impl Phoneme {
    pub fn is_vowel(self) -> bool {
        self.class() == PhonemeClass::Vowel
    }

    /// Representative of the phoneme's matching class. JH and ZH collapse
    /// into one class; every other phoneme is its own class.
    pub fn canonical(self) -> Phoneme {
        match self {
            Phoneme::Zh => Phoneme::Jh,
            other => other,
        }
    }

    pub fn equivalent(self, other: Phoneme) -> bool {
        self.canonical() == other.canonical()
    }

    /// Parses a lexicon token such as `AE1`, stripping a trailing stress
    /// digit. Digits are only accepted on vowels.
    pub fn parse_token(token: &str) -> Result<Phoneme> {
        let (base, stressed) = match token.as_bytes().last() {
            Some(b'0' | b'1' | b'2') => (&token[..token.len() - 1], true),
            _ => (token, false),
        };
        match Phoneme::from_symbol(base) {
            Some(p) if !stressed || p.is_vowel() => Ok(p),
            _ => Err(Error::UnknownPhoneme(token.to_string())),
        }
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Phoneme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Phoneme::from_symbol(s).ok_or_else(|| Error::UnknownPhoneme(s.to_string()))
    }
}

impl Serialize for Phoneme {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Phoneme {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a space-separated phoneme sequence such as `"N TH"`.
pub fn parse_sequence(text: &str) -> Result<Vec<Phoneme>> {
    text.split_whitespace().map(Phoneme::parse_token).collect()
}

pub fn format_sequence(phonemes: &[Phoneme]) -> String {
    let symbols: Vec<&str> = phonemes.iter().map(|p| p.symbol()).collect();
    symbols.join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pronunciation {
    word: String,
    phonemes: Vec<Phoneme>,
}

impl Pronunciation {
    pub fn new(word: impl Into<String>, phonemes: Vec<Phoneme>) -> Result<Self> {
        let word = word.into();
        if word.is_empty() {
            return Err(Error::invalid("pronunciation word is empty"));
        }
        if phonemes.is_empty() {
            return Err(Error::invalid(format!("pronunciation of {word:?} has no phonemes")));
        }
        Ok(Self {
            word: word.to_lowercase(),
            phonemes,
        })
    }

    /// A pronunciation not tied to a lexicon word; used for percept
    /// sequences and ad-hoc inputs.
    pub fn anonymous(phonemes: Vec<Phoneme>) -> Result<Self> {
        let word = format_sequence(&phonemes).to_lowercase();
        Self::new(if word.is_empty() { "_".to_string() } else { word }, phonemes)
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn phonemes(&self) -> &[Phoneme] {
        &self.phonemes
    }

    pub fn len(&self) -> usize {
        self.phonemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phonemes.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = (Phoneme, Position)> + '_ {
        let n = self.phonemes.len();
        self.phonemes
            .iter()
            .enumerate()
            .map(move |(i, &p)| (p, Position::classify(i, n)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Initial,
    Medial,
    Final,
}

impl Position {
    pub const ALL: [Position; 3] = [Position::Initial, Position::Medial, Position::Final];

    pub fn name(self) -> &'static str {
        match self {
            Position::Initial => "initial",
            Position::Medial => "medial",
            Position::Final => "final",
        }
    }

    pub fn rank(self) -> usize {
        self as usize
    }

    // A single-phoneme word is its own first phoneme.
    fn classify(index: usize, len: usize) -> Position {
        if index == 0 {
            Position::Initial
        } else if index + 1 == len {
            Position::Final
        } else {
            Position::Medial
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn position_of(pron: &Pronunciation, index: usize) -> Result<Position> {
    if index >= pron.len() {
        return Err(Error::IndexOutOfBounds {
            index,
            len: pron.len(),
        });
    }
    Ok(Position::classify(index, pron.len()))
}

/// Lowercases and strips surrounding punctuation. Inner apostrophes and
/// hyphens survive, so `"Don't,"` becomes `"don't"`.
pub fn normalize_word(raw: &str) -> String {
    raw.trim()
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// A line the lexicon parser rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct PronunciationLexicon {
    entries: HashMap<String, Vec<Pronunciation>>,
    reverse: HashMap<Vec<Phoneme>, Vec<String>>,
    skipped: Vec<SkippedLine>,
}

impl PronunciationLexicon {
    pub fn from_pronunciations(prons: impl IntoIterator<Item = Pronunciation>) -> Result<Self> {
        let mut lexicon = Self::default();
        for pron in prons {
            lexicon.insert(pron);
        }
        if lexicon.entries.is_empty() {
            return Err(Error::NoValidEntries("lexicon".into()));
        }
        Ok(lexicon)
    }

    /// Parses lexicon text. Malformed lines and lines with unknown phoneme
    /// symbols are skipped and recorded in [`skipped`](Self::skipped).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lexicon = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            match parse_entry(line) {
                Ok(pron) => lexicon.insert(pron),
                Err(reason) => {
                    log::warn!("lexicon line {line_no} skipped: {reason}");
                    lexicon.skipped.push(SkippedLine {
                        line: line_no,
                        reason,
                    });
                }
            }
        }
        if lexicon.entries.is_empty() {
            return Err(Error::NoValidEntries("lexicon".into()));
        }
        Ok(lexicon)
    }

    fn insert(&mut self, pron: Pronunciation) {
        let words = self.reverse.entry(pron.phonemes.clone()).or_default();
        if let Err(pos) = words.binary_search(&pron.word) {
            words.insert(pos, pron.word.clone());
        }
        self.entries.entry(pron.word.clone()).or_default().push(pron);
    }

    pub fn skipped(&self) -> &[SkippedLine] {
        &self.skipped
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// All pronunciations of an already-normalized word, in file order.
    pub fn pronunciations(&self, word: &str) -> Option<&[Pronunciation]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    /// Words whose pronunciation is exactly `phonemes`, alphabetically.
    pub fn words_for(&self, phonemes: &[Phoneme]) -> &[String] {
        self.reverse.get(phonemes).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Serializes back to lexicon text: words sorted, variants in order,
    /// with `(n)` suffixes on alternates.
    pub fn to_text(&self) -> String {
        let mut words: Vec<&String> = self.entries.keys().collect();
        words.sort();
        let mut out = String::new();
        for word in words {
            for (i, pron) in self.entries[word].iter().enumerate() {
                if i == 0 {
                    out.push_str(word);
                } else {
                    out.push_str(&format!("{word}({})", i + 1));
                }
                out.push_str("  ");
                out.push_str(&format_sequence(&pron.phonemes));
                out.push('\n');
            }
        }
        out
    }
}

fn parse_entry(line: &str) -> std::result::Result<Pronunciation, String> {
    let mut tokens = line.split_whitespace();
    let head = tokens.next().ok_or("empty line")?;
    let word = strip_variant_suffix(head).to_lowercase();
    if word.is_empty() {
        return Err(format!("missing word in {head:?}"));
    }
    let phonemes = tokens
        .map(|t| Phoneme::parse_token(t).map_err(|e| e.to_string()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Pronunciation::new(word, phonemes).map_err(|e| e.to_string())
}

fn strip_variant_suffix(head: &str) -> &str {
    if let Some(open) = head.rfind('(') {
        let inner = &head[open + 1..];
        if let Some(digits) = inner.strip_suffix(')') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) && open > 0 {
                return &head[..open];
            }
        }
    }
    head
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<PronunciationLexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lexicon = PronunciationLexicon::parse(&text)?;
    if !lexicon.skipped.is_empty() {
        log::warn!(
            "{}: skipped {} malformed line(s)",
            path.display(),
            lexicon.skipped.len()
        );
    }
    Ok(lexicon)
}

/// First listed pronunciation of the normalized word.
pub fn phonemize(word: &str, lexicon: &PronunciationLexicon) -> Result<Pronunciation> {
    let key = normalize_word(word);
    lexicon
        .pronunciations(&key)
        .and_then(|p| p.first())
        .cloned()
        .ok_or(Error::OutOfVocabulary(key))
}
