use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::stft::{hann_window, FrameTransform};
use super::AudioClip;
use crate::error::{Error, Result};

const SINC_HALF_WIDTH: i64 = 16;
const PV_WINDOW: usize = 1024;
const PV_HOP: usize = 256;

/// `Resample` slows playback, lowering pitch by the same factor.
/// `PhaseVocoder` lengthens the clip at constant pitch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StretchMode {
    #[default]
    Resample,
    PhaseVocoder,
}

impl std::str::FromStr for StretchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "resample" => Ok(Self::Resample),
            "phase-vocoder" | "phase_vocoder" | "vocoder" | "pv" => Ok(Self::PhaseVocoder),
            other => Err(Error::invalid(format!(
                "unknown stretch mode {other:?} (expected resample or phase-vocoder)"
            ))),
        }
    }
}

impl std::fmt::Display for StretchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Resample => "resample",
            Self::PhaseVocoder => "phase-vocoder",
        })
    }
}

pub(crate) fn check_factor(factor: f64) -> Result<()> {
    if !(1.0..=3.0).contains(&factor) {
        return Err(Error::invalid(format!("stretch factor {factor} outside [1, 3]")));
    }
    Ok(())
}

/// Output has `round(n · factor)` samples.
pub fn time_stretch(clip: &AudioClip, factor: f64, mode: StretchMode) -> Result<AudioClip> {
    check_factor(factor)?;
    let out_len = ((clip.len() as f64 * factor).round() as usize).max(1);
    let samples = match mode {
        StretchMode::Resample => resample(clip.samples(), factor, out_len),
        StretchMode::PhaseVocoder => phase_vocoder(clip.samples(), factor, out_len),
    };
    AudioClip::new(samples, clip.sample_rate())
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Band-limited interpolation at `i / factor` with a Hann-tapered sinc.
fn resample(input: &[f64], factor: f64, out_len: usize) -> Vec<f64> {
    let n = input.len() as i64;
    let half = SINC_HALF_WIDTH as f64;
    (0..out_len)
        .map(|i| {
            let x = i as f64 / factor;
            let base = x.floor() as i64;
            let frac = x - base as f64;
            if frac == 0.0 {
                return input.get(base as usize).copied().unwrap_or(0.0);
            }
            let mut acc = 0.0;
            for k in (base - SINC_HALF_WIDTH + 1)..=(base + SINC_HALF_WIDTH) {
                if k < 0 || k >= n {
                    continue;
                }
                let d = x - k as f64;
                let taper = 0.5 + 0.5 * (PI * d / half).cos();
                acc += input[k as usize] * sinc(d) * taper;
            }
            acc
        })
        .collect()
}

fn princarg(phase: f64) -> f64 {
    phase - TAU * ((phase + PI) / TAU).floor()
}

fn phase_vocoder(input: &[f64], factor: f64, out_len: usize) -> Vec<f64> {
    let n_win = PV_WINDOW;
    let hs = PV_HOP as f64;
    let bins = n_win / 2 + 1;
    let mut padded = vec![0.0; n_win];
    padded.extend_from_slice(input);
    padded.extend(std::iter::repeat(0.0).take(n_win));

    let start = (n_win as f64 * factor).round() as usize;
    let needed = start + out_len;
    let frames = needed.saturating_sub(n_win).div_ceil(PV_HOP) + 2;
    let total = (frames - 1) * PV_HOP + n_win;

    let window = hann_window(n_win);
    let mut transform = FrameTransform::new(n_win);
    let inverse = FftPlanner::new().plan_fft_inverse(n_win);
    let omega: Vec<f64> = (0..bins).map(|k| TAU * k as f64 / n_win as f64).collect();

    let mut out = vec![0.0; total];
    let mut norm = vec![0.0; total];
    let mut prev_phase = vec![0.0; bins];
    let mut synth_phase = vec![0.0; bins];
    let mut prev_pos = 0usize;
    let mut buf = vec![Complex::default(); n_win];

    for t in 0..frames {
        let pos = (t as f64 * hs / factor).round() as usize;
        let spectrum = transform.spectrum(&padded, pos);
        for k in 0..bins {
            let (mag, phase) = spectrum[k].to_polar();
            if t == 0 {
                synth_phase[k] = phase;
            } else {
                let da = (pos - prev_pos) as f64;
                let dev = princarg(phase - prev_phase[k] - omega[k] * da);
                synth_phase[k] += hs * (omega[k] + dev / da);
            }
            prev_phase[k] = phase;
            buf[k] = Complex::from_polar(mag, synth_phase[k]);
        }
        for k in 1..n_win / 2 {
            buf[n_win - k] = buf[k].conj();
        }
        // DC and Nyquist bins of a real signal are real
        buf[0] = Complex::new(buf[0].re, 0.0);
        buf[n_win / 2] = Complex::new(buf[n_win / 2].re, 0.0);
        inverse.process(&mut buf);
        let offset = t * PV_HOP;
        for i in 0..n_win {
            out[offset + i] += buf[i].re / n_win as f64 * window[i];
            norm[offset + i] += window[i] * window[i];
        }
        prev_pos = pos;
    }
    out[start..start + out_len]
        .iter()
        .zip(&norm[start..start + out_len])
        .map(|(s, w)| if *w > 1e-8 { s / w } else { 0.0 })
        .collect()
}
