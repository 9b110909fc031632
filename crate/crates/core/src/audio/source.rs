use std::path::PathBuf;
use std::process::Command;

use super::{read_wav, AudioClip};
use crate::error::{Error, Result};

/// Something that can produce a spoken rendition of a word.
pub trait AudioSource {
    fn fetch(&self, word: &str) -> Result<AudioClip>;
}

/// Pre-rendered clips stored as `<dir>/<word>.wav`.
#[derive(Debug, Clone)]
pub struct DirectorySource {
    pub dir: PathBuf,
    pub downmix: bool,
}

impl DirectorySource {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            downmix: false,
        }
    }

    pub fn path_for(&self, word: &str) -> PathBuf {
        self.dir.join(format!("{word}.wav"))
    }
}

fn check_word(word: &str) -> Result<()> {
    if word.is_empty() || word.contains(['/', '\\']) || word.starts_with('.') {
        return Err(Error::AudioSource {
            word: word.to_string(),
            message: "not a usable file stem".into(),
        });
    }
    Ok(())
}

impl AudioSource for DirectorySource {
    fn fetch(&self, word: &str) -> Result<AudioClip> {
        check_word(word)?;
        let path = self.path_for(word);
        if !path.is_file() {
            return Err(Error::AudioSource {
                word: word.to_string(),
                message: format!("{} not found", path.display()),
            });
        }
        read_wav(path, self.downmix)
    }
}

/// Runs an external program per word. The template is split on
/// whitespace; `{word}` and `{out}` are substituted in each argument, and
/// the program must leave a WAV file at `{out}`.
#[derive(Debug, Clone)]
pub struct CommandTemplateSource {
    pub template: String,
    pub work_dir: PathBuf,
}

impl CommandTemplateSource {
    pub fn new(template: impl Into<String>, work_dir: impl Into<PathBuf>) -> Result<Self> {
        let template = template.into();
        if template.split_whitespace().next().is_none() {
            return Err(Error::invalid("empty command template"));
        }
        if !template.contains("{out}") {
            return Err(Error::invalid("command template must mention {out}"));
        }
        Ok(Self {
            template,
            work_dir: work_dir.into(),
        })
    }
}

impl AudioSource for CommandTemplateSource {
    fn fetch(&self, word: &str) -> Result<AudioClip> {
        check_word(word)?;
        let out = self.work_dir.join(format!("{word}.wav"));
        let out_str = out.to_string_lossy();
        let mut args = self
            .template
            .split_whitespace()
            .map(|a| a.replace("{word}", word).replace("{out}", &out_str));
        let program = args.next().expect("template checked nonempty");
        let fail = |message: String| Error::AudioSource {
            word: word.to_string(),
            message,
        };
        let output = Command::new(&program)
            .args(args)
            .output()
            .map_err(|e| fail(format!("could not run {program}: {e}")))?;
        if !output.status.success() {
            return Err(fail(format!(
                "{program} exited with {}: {}",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        read_wav(&out, false)
    }
}
