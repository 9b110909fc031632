//! Flat `key = value` configuration files.
//!
//! Keys mirror the long flag names. Blank lines and `#` comments are
//! ignored; unknown keys are rejected so typos do not pass silently.

use std::path::{Path, PathBuf};

use illusion_core::audio::{StretchMode, DEFAULT_ATTEN_DB, DEFAULT_CUTOFF_HZ, DEFAULT_FACTORS, DEFAULT_HOP, DEFAULT_WINDOW};
use illusion_core::{Error, Result};

pub const CONFIG_ENV: &str = "ILLUSION_CONFIG";

/// Values read from a config file; anything absent falls through to the
/// built-in default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub lexicon: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub freq: Option<PathBuf>,
    pub window: Option<usize>,
    pub hop: Option<usize>,
    pub cutoff: Option<f64>,
    pub atten: Option<f64>,
    pub factors: Option<Vec<f64>>,
    pub mode: Option<StretchMode>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Error::Parse {
        line,
        message: format!("bad value for {key}: {e}"),
    })
}

pub fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    let items: Vec<f64> = value
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if items.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(items)
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: "expected key = value".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("empty value for {key}"),
                });
            }
            match key {
                "lexicon" => cfg.lexicon = Some(value.into()),
                "rules" => cfg.rules = Some(value.into()),
                "model" => cfg.model = Some(value.into()),
                "freq" => cfg.freq = Some(value.into()),
                "window" => cfg.window = Some(parse_value(line, key, value)?),
                "hop" => cfg.hop = Some(parse_value(line, key, value)?),
                "cutoff" => cfg.cutoff = Some(parse_value(line, key, value)?),
                "atten" => cfg.atten = Some(parse_value(line, key, value)?),
                "factors" => {
                    cfg.factors = Some(parse_list(value).map_err(|message| Error::Parse { line, message })?)
                }
                "mode" => cfg.mode = Some(parse_value(line, key, value)?),
                "seed" => cfg.seed = Some(parse_value(line, key, value)?),
                "threads" => cfg.threads = Some(parse_value(line, key, value)?),
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }
}

/// Fully resolved settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    /// `None` selects the bundled dictionary.
    pub lexicon_path: Option<PathBuf>,
    pub rules_path: Option<PathBuf>,
    pub model_path: Option<PathBuf>,
    /// `None` selects the bundled toy frequency list.
    pub freq_path: Option<PathBuf>,
    pub window: usize,
    pub hop: usize,
    pub cutoff: f64,
    pub atten: f64,
    pub factors: Vec<f64>,
    pub mode: StretchMode,
    pub seed: u64,
    /// `None` uses every available core.
    pub threads: Option<usize>,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            lexicon_path: None,
            rules_path: None,
            model_path: None,
            freq_path: None,
            window: DEFAULT_WINDOW,
            hop: DEFAULT_HOP,
            cutoff: DEFAULT_CUTOFF_HZ,
            atten: DEFAULT_ATTEN_DB,
            factors: DEFAULT_FACTORS.to_vec(),
            mode: StretchMode::Resample,
            seed: 0,
            threads: None,
        }
    }
}

impl CliConfig {
    /// Layers `overrides` (from flags) over `file` over the defaults.
    pub fn resolve(file: &ConfigFile, overrides: &ConfigFile) -> Self {
        let d = Self::default();
        macro_rules! pick {
            ($f:ident) => {
                overrides.$f.clone().or_else(|| file.$f.clone())
            };
        }
        Self {
            lexicon_path: pick!(lexicon),
            rules_path: pick!(rules),
            model_path: pick!(model),
            freq_path: pick!(freq),
            window: pick!(window).unwrap_or(d.window),
            hop: pick!(hop).unwrap_or(d.hop),
            cutoff: pick!(cutoff).unwrap_or(d.cutoff),
            atten: pick!(atten).unwrap_or(d.atten),
            factors: pick!(factors).unwrap_or(d.factors),
            mode: pick!(mode).unwrap_or(d.mode),
            seed: pick!(seed).unwrap_or(d.seed),
            threads: pick!(threads).or(d.threads),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg = ConfigFile::parse("# defaults\nseed = 7\nfactors = 1.3, 1.5\nmode = phase-vocoder\n\nlexicon=/x/dict # trailing\n").unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.factors, Some(vec![1.3, 1.5]));
        assert_eq!(cfg.mode, Some(StretchMode::PhaseVocoder));
        assert_eq!(cfg.lexicon, Some(PathBuf::from("/x/dict")));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(ConfigFile::parse("seed 7"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ConfigFile::parse("\ncolour = red"), Err(Error::Parse { line: 2, .. })));
        assert!(ConfigFile::parse("seed = -1").is_err());
        assert!(ConfigFile::parse("factors = 1.3,,1.5").is_err());
        assert!(ConfigFile::parse("cutoff =").is_err());
    }

    #[test]
    fn precedence() {
        let file = ConfigFile {
            seed: Some(3),
            cutoff: Some(500.0),
            ..Default::default()
        };
        let flags = ConfigFile {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = CliConfig::resolve(&file, &flags);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.cutoff, 500.0);
        assert_eq!(cfg.hop, DEFAULT_HOP);
    }
}
