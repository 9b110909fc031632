//! Yanny/Laurel-style auditory illusion candidates.
//!
//! Candidate words are profiled by how their spectrogram energy splits
//! around a cutoff, ranked by closeness to a reference clip, then damped
//! below the cutoff and slowed down.

mod filter;
mod profile;
mod source;
mod stft;
mod stretch;
mod sweep;
mod wav;

pub use filter::{damp_low, LowShelf};
pub use profile::{rank_candidates, ranking_report_csv, spectral_profile, RankedCandidate, SpectralProfile};
pub use source::{AudioSource, CommandTemplateSource, DirectorySource};
pub use stft::{dominant_frequency, hann_window, stft, Spectrogram, DEFAULT_HOP, DEFAULT_WINDOW};
pub use stretch::{time_stretch, StretchMode};
pub use sweep::{generate_sweep, sweep_file_name, SweepEntry, SweepGrid, DEFAULT_FACTORS};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CUTOFF_HZ: f64 = 1000.0;
pub const DEFAULT_ATTEN_DB: f64 = -12.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    /// Samples beyond ±1 are clipped with a warning.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("audio clip has no samples"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("audio samples"));
        }
        let mut clip = Self {
            samples,
            sample_rate,
        };
        clip.clip_to_unit();
        Ok(clip)
    }

    fn clip_to_unit(&mut self) {
        let mut clipped = 0usize;
        for s in &mut self.samples {
            if s.abs() > 1.0 {
                *s = s.clamp(-1.0, 1.0);
                clipped += 1;
            }
        }
        if clipped > 0 {
            log::warn!("clipped {clipped} sample(s) to [-1, 1]");
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate as f64 / 2.0
    }

    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|s| s * gain).collect(), self.sample_rate)
    }

    /// Sine tone helper for tests and demos.
    pub fn sine(freq_hz: f64, amplitude: f64, duration_secs: f64, sample_rate: u32) -> Result<Self> {
        let n = (duration_secs * sample_rate as f64).round() as usize;
        let w = std::f64::consts::TAU * freq_hz / sample_rate as f64;
        Self::new((0..n).map(|i| amplitude * (w * i as f64).sin()).collect(), sample_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub damp_cutoff: f64,
    pub damp_atten_db: f64,
    pub stretch_factor: f64,
    pub stretch_mode: StretchMode,
}

impl Default for TransformParams {
    fn default() -> Self {
        Self {
            damp_cutoff: DEFAULT_CUTOFF_HZ,
            damp_atten_db: DEFAULT_ATTEN_DB,
            stretch_factor: 1.5,
            stretch_mode: StretchMode::Resample,
        }
    }
}

impl TransformParams {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.damp_cutoff > 0.0 && self.damp_cutoff < nyquist) {
            return Err(Error::invalid(format!(
                "cutoff {} Hz outside (0, {nyquist})",
                self.damp_cutoff
            )));
        }
        if !(self.damp_atten_db <= 0.0) {
            return Err(Error::invalid(format!(
                "attenuation {} dB must be <= 0",
                self.damp_atten_db
            )));
        }
        stretch::check_factor(self.stretch_factor)
    }

    /// Damp, then stretch.
    pub fn apply(&self, clip: &AudioClip) -> Result<AudioClip> {
        self.validate(clip.sample_rate())?;
        let damped = damp_low(clip, self.damp_cutoff, self.damp_atten_db)?;
        time_stretch(&damped, self.stretch_factor, self.stretch_mode)
    }
}
