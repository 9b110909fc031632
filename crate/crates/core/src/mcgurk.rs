//! McGurk substitution rules and dub planning.
//!
//! A rule says: when the audio carries `audio` and the speaker visibly mouths
//! `lip`, viewers tend to hear one of `percepts`. A [`DubPlan`] lists the
//! phoneme occurrences of a word that get a visual dub, and
//! [`enumerate_percepts`] spells out what a viewer might hear instead.
//!
//! Rules files hold one rule per line:
//!
//! ```text
//! B | W | V, F, P
//! M | DH | N TH, N, M L
//! ```

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phoneme::{format_sequence, parse_sequence, Phoneme, Pronunciation, PronunciationLexicon};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McGurkRule {
    pub audio: Phoneme,
    pub lip: Phoneme,
    pub percepts: Vec<Vec<Phoneme>>,
}

impl McGurkRule {
    pub fn new(audio: Phoneme, lip: Phoneme, percepts: Vec<Vec<Phoneme>>) -> Result<Self> {
        if percepts.is_empty() {
            return Err(Error::invalid(format!("rule for {audio} has no percepts")));
        }
        for percept in &percepts {
            if percept.is_empty() {
                return Err(Error::invalid(format!("rule for {audio} has an empty percept")));
            }
            if percept.len() == 1 && percept[0].equivalent(audio) {
                return Err(Error::invalid(format!(
                    "rule for {audio} lists its own audio phoneme as a percept"
                )));
            }
        }
        Ok(Self {
            audio,
            lip,
            percepts,
        })
    }
}

impl fmt::Display for McGurkRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let percepts: Vec<String> = self.percepts.iter().map(|p| format_sequence(p)).collect();
        write!(f, "{} | {} | {}", self.audio, self.lip, percepts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    rules: Vec<McGurkRule>,
}

impl RuleTable {
    pub fn new(rules: Vec<McGurkRule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::NoValidEntries("rule table".into()));
        }
        for (i, rule) in rules.iter().enumerate() {
            if rules[..i].iter().any(|r| r.audio.equivalent(rule.audio)) {
                return Err(Error::invalid(format!("duplicate rule for {}", rule.audio)));
            }
        }
        Ok(Self { rules })
    }

    /// The ten speaker-tested rules, in published row order.
    pub fn builtin() -> Self {
        use Phoneme::*;
        let rule = |audio, lip, percepts: &[&[Phoneme]]| McGurkRule {
            audio,
            lip,
            percepts: percepts.iter().map(|p| p.to_vec()).collect(),
        };
        Self {
            rules: vec![
                rule(B, W, &[&[V], &[F], &[P]]),
                rule(Dh, B, &[&[B]]),
                rule(F, Z, &[&[Th], &[T], &[B]]),
                rule(M, Dh, &[&[N, Th], &[N], &[M, L]]),
                rule(P, T, &[&[T], &[K]]),
                rule(V, B, &[&[B]]),
                rule(D, V, &[&[V], &[T]]),
                rule(L, V, &[&[V]]),
                rule(Th, V, &[&[D], &[K], &[T], &[F]]),
                rule(W, L, &[&[L]]),
            ],
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            rules.push(parse_rule(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        Self::new(rules)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        self.rules.iter().map(|r| format!("{r}\n")).collect()
    }

    pub fn rules(&self) -> &[McGurkRule] {
        &self.rules
    }

    pub fn rule_for(&self, audio: Phoneme) -> Option<&McGurkRule> {
        self.rules.iter().find(|r| r.audio.equivalent(audio))
    }
}

impl Default for RuleTable {
    fn default() -> Self {
        Self::builtin()
    }
}

fn parse_rule(line: &str) -> Result<McGurkRule> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    let [audio, lip, percepts] = fields.as_slice() else {
        return Err(Error::invalid(format!(
            "expected `AUDIO | LIP | PERCEPTS`, found {} field(s)",
            fields.len()
        )));
    };
    let single = |s: &str| -> Result<Phoneme> {
        match parse_sequence(s)?.as_slice() {
            [p] => Ok(*p),
            _ => Err(Error::invalid(format!("expected one phoneme, found {s:?}"))),
        }
    };
    let percepts = percepts
        .split(',')
        .map(|p| parse_sequence(p.trim()))
        .collect::<Result<Vec<_>>>()?;
    McGurkRule::new(single(audio)?, single(lip)?, percepts)
}

/// Convenience for the built-in table.
pub fn builtin_table() -> Vec<McGurkRule> {
    RuleTable::builtin().rules
}

pub fn is_attemptable(pron: &Pronunciation, table: &RuleTable) -> bool {
    pron.phonemes().iter().any(|&p| table.rule_for(p).is_some())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlanMode {
    /// One plan dubbing every rule-covered occurrence at once.
    #[default]
    AllSites,
    /// One plan per rule-covered occurrence.
    SingleSite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DubSite {
    pub index: usize,
    pub rule: McGurkRule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DubPlan {
    pub word: String,
    pub pron: Pronunciation,
    pub sites: Vec<DubSite>,
}

pub fn plan_dubs(pron: &Pronunciation, mode: PlanMode, table: &RuleTable) -> Vec<DubPlan> {
    let sites: Vec<DubSite> = pron
        .phonemes()
        .iter()
        .enumerate()
        .filter_map(|(index, &p)| {
            table.rule_for(p).map(|rule| DubSite {
                index,
                rule: rule.clone(),
            })
        })
        .collect();
    if sites.is_empty() {
        return Vec::new();
    }
    let plan = |sites| DubPlan {
        word: pron.word().to_string(),
        pron: pron.clone(),
        sites,
    };
    match mode {
        PlanMode::AllSites => vec![plan(sites)],
        PlanMode::SingleSite => sites.into_iter().map(|s| plan(vec![s])).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerceptCandidate {
    pub phonemes: Vec<Phoneme>,
    /// Percept index chosen at each site of the plan.
    pub choices: Vec<usize>,
}

impl PerceptCandidate {
    fn build(plan: &DubPlan, choices: Vec<usize>) -> Self {
        let mut phonemes = Vec::with_capacity(plan.pron.len() + plan.sites.len());
        let mut sites = plan.sites.iter().zip(&choices).peekable();
        for (i, &p) in plan.pron.phonemes().iter().enumerate() {
            match sites.peek() {
                Some((site, &choice)) if site.index == i => {
                    phonemes.extend_from_slice(&site.rule.percepts[choice]);
                    sites.next();
                }
                _ => phonemes.push(p),
            }
        }
        Self { phonemes, choices }
    }
}

/// Cartesian product of per-site percepts with the first site most
/// significant, truncated to `limit`.
pub fn enumerate_percepts(plan: &DubPlan, limit: usize) -> Vec<PerceptCandidate> {
    if plan.sites.is_empty() || limit == 0 {
        return Vec::new();
    }
    let radices: Vec<usize> = plan.sites.iter().map(|s| s.rule.percepts.len()).collect();
    let mut choices = vec![0usize; radices.len()];
    let mut out = Vec::new();
    loop {
        out.push(PerceptCandidate::build(plan, choices.clone()));
        if out.len() >= limit {
            break;
        }
        // odometer increment, last site fastest
        let mut pos = radices.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            choices[pos] += 1;
            if choices[pos] < radices[pos] {
                break;
            }
            choices[pos] = 0;
        }
    }
    out
}

/// Candidates whose phoneme sequence is a real word, in candidate order and
/// then alphabetical word order.
pub fn lexical_confusions(
    candidates: &[PerceptCandidate],
    lexicon: &PronunciationLexicon,
) -> Vec<(String, PerceptCandidate)> {
    candidates
        .iter()
        .flat_map(|c| {
            lexicon
                .words_for(&c.phonemes)
                .iter()
                .map(move |w| (w.clone(), c.clone()))
        })
        .collect()
}
