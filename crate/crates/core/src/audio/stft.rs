use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::AudioClip;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 1024;
pub const DEFAULT_HOP: usize = 256;

/// Periodic Hann window, which overlap-adds to a constant at hop N/4.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// `frames × bins`, row-major.
    magnitudes: Vec<f64>,
    frames: usize,
    pub window_size: usize,
    pub hop: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        let b = self.bins();
        &self.magnitudes[t * b..(t + 1) * b]
    }

    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.window_size as f64
    }
}

pub(crate) fn check_window(window_size: usize, hop: usize) -> Result<()> {
    if window_size < 64 || !window_size.is_power_of_two() {
        return Err(Error::invalid(format!(
            "window size {window_size} must be a power of two >= 64"
        )));
    }
    if hop == 0 || hop > window_size {
        return Err(Error::invalid(format!("hop {hop} must lie in 1..={window_size}")));
    }
    Ok(())
}

pub(crate) struct FrameTransform {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    buf: Vec<Complex<f64>>,
}

impl FrameTransform {
    pub(crate) fn new(window_size: usize) -> Self {
        Self {
            fft: FftPlanner::new().plan_fft_forward(window_size),
            window: hann_window(window_size),
            buf: vec![Complex::default(); window_size],
        }
    }

    /// Windowed spectrum of `samples[start..start + N]`, zero beyond the end.
    pub(crate) fn spectrum(&mut self, samples: &[f64], start: usize) -> &[Complex<f64>] {
        for (i, slot) in self.buf.iter_mut().enumerate() {
            let s = samples.get(start + i).copied().unwrap_or(0.0);
            *slot = Complex::new(s * self.window[i], 0.0);
        }
        self.fft.process(&mut self.buf);
        &self.buf
    }
}

/// Hann-windowed magnitude STFT with `⌊(n − N)/hop⌋ + 1` frames. A clip
/// shorter than one window becomes a single zero-padded frame.
pub fn stft(clip: &AudioClip, window_size: usize, hop: usize) -> Result<Spectrogram> {
    check_window(window_size, hop)?;
    let n = clip.len();
    let frames = if n < window_size {
        log::warn!("clip of {n} samples is shorter than one {window_size}-sample window; zero-padding");
        1
    } else {
        (n - window_size) / hop + 1
    };
    let bins = window_size / 2 + 1;
    let mut transform = FrameTransform::new(window_size);
    let mut magnitudes = Vec::with_capacity(frames * bins);
    for t in 0..frames {
        let spectrum = transform.spectrum(clip.samples(), t * hop);
        magnitudes.extend(spectrum[..bins].iter().map(|c| c.norm()));
    }
    Ok(Spectrogram {
        magnitudes,
        frames,
        window_size,
        hop,
        sample_rate: clip.sample_rate(),
    })
}

/// Frequency of the strongest spectral peak of the whole clip, refined by
/// parabolic interpolation on the log magnitude.
pub fn dominant_frequency(clip: &AudioClip) -> f64 {
    let n = clip.len().next_power_of_two().max(64) * 4;
    let window = hann_window(clip.len());
    let mut buf: Vec<Complex<f64>> = clip
        .samples()
        .iter()
        .zip(&window)
        .map(|(s, w)| Complex::new(s * w, 0.0))
        .chain(std::iter::repeat(Complex::default()))
        .take(n)
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    let k = mags
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(k, _)| k);
    let mut offset = 0.0;
    if k > 0 && k + 1 < mags.len() {
        let (a, b, c) = (mags[k - 1].max(1e-300).ln(), mags[k].ln(), mags[k + 1].max(1e-300).ln());
        let denom = a - 2.0 * b + c;
        if denom.abs() > 1e-12 {
            offset = 0.5 * (a - c) / denom;
        }
    }
    (k as f64 + offset) * clip.sample_rate() as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_count_formula() {
        let clip = AudioClip::new(vec![0.1; 5000], 22050).unwrap();
        let s = stft(&clip, 1024, 256).unwrap();
        assert_eq!(s.frames(), (5000 - 1024) / 256 + 1);
        assert_eq!(s.bins(), 513);
        let short = AudioClip::new(vec![0.1; 100], 22050).unwrap();
        assert_eq!(stft(&short, 1024, 256).unwrap().frames(), 1);
    }

    #[test]
    fn rejects_bad_geometry() {
        let clip = AudioClip::new(vec![0.0; 4096], 22050).unwrap();
        assert!(stft(&clip, 1000, 256).is_err());
        assert!(stft(&clip, 32, 16).is_err());
        assert!(stft(&clip, 1024, 2048).is_err());
        assert!(stft(&clip, 1024, 0).is_err());
    }

    #[test]
    fn sine_peaks_at_expected_bin() {
        let clip = AudioClip::sine(1000.0, 0.5, 1.0, 22050).unwrap();
        let s = stft(&clip, 1024, 256).unwrap();
        let expected = (1000.0f64 * 1024.0 / 22050.0).round() as usize;
        assert_eq!(expected, 46);
        for t in 0..s.frames() {
            let frame = s.frame(t);
            let k = (0..frame.len()).max_by(|&a, &b| frame[a].total_cmp(&frame[b])).unwrap();
            assert_eq!(k, expected, "frame {t}");
        }
    }

    #[test]
    fn silence_has_zero_magnitude() {
        let clip = AudioClip::new(vec![0.0; 3000], 16000).unwrap();
        let s = stft(&clip, 512, 128).unwrap();
        assert!((0..s.frames()).all(|t| s.frame(t).iter().all(|&m| m == 0.0)));
    }

    #[test]
    fn parseval_holds_per_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let clip = AudioClip::new((0..8192).map(|_| rng.gen_range(-0.5..0.5)).collect(), 16000).unwrap();
        let n = 1024;
        let s = stft(&clip, n, 256).unwrap();
        let window = hann_window(n);
        for t in 0..s.frames() {
            let time: f64 = (0..n)
                .map(|i| (clip.samples()[t * 256 + i] * window[i]).powi(2))
                .sum();
            let m = s.frame(t);
            let interior: f64 = m[1..n / 2].iter().map(|v| v * v).sum();
            let freq = (m[0] * m[0] + m[n / 2] * m[n / 2] + 2.0 * interior) / n as f64;
            assert!(((time - freq) / time).abs() < 1e-6, "frame {t}: {time} vs {freq}");
        }
    }

    #[test]
    fn dominant_frequency_of_a_tone() {
        let clip = AudioClip::sine(440.0, 0.5, 0.5, 22050).unwrap();
        assert!((dominant_frequency(&clip) - 440.0).abs() < 0.5);
    }
}
