use super::AudioClip;
use crate::error::{Error, Result};

/// Second-order low-shelf (RBJ cookbook, shelf slope 1). Gain at DC is
/// `gain_db`, half of it at `corner_hz`, and unity toward Nyquist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowShelf {
    b: [f64; 3],
    a: [f64; 2],
}

impl LowShelf {
    pub fn new(corner_hz: f64, gain_db: f64, sample_rate: u32) -> Result<Self> {
        let fs = sample_rate as f64;
        if !(corner_hz > 0.0 && corner_hz < fs / 2.0) {
            return Err(Error::invalid(format!(
                "shelf corner {corner_hz} Hz outside (0, {})",
                fs / 2.0
            )));
        }
        if !gain_db.is_finite() {
            return Err(Error::NonFinite("shelf gain"));
        }
        let a = 10f64.powf(gain_db / 40.0);
        let w0 = std::f64::consts::TAU * corner_hz / fs;
        let (sin, cos) = w0.sin_cos();
        // slope S = 1 makes the sqrt term exactly 2
        let alpha = sin / 2.0 * 2f64.sqrt();
        let sa = 2.0 * a.sqrt() * alpha;
        let b0 = a * ((a + 1.0) - (a - 1.0) * cos + sa);
        let b1 = 2.0 * a * ((a - 1.0) - (a + 1.0) * cos);
        let b2 = a * ((a + 1.0) - (a - 1.0) * cos - sa);
        let a0 = (a + 1.0) + (a - 1.0) * cos + sa;
        let a1 = -2.0 * ((a - 1.0) + (a + 1.0) * cos);
        let a2 = (a + 1.0) + (a - 1.0) * cos - sa;
        Ok(Self {
            b: [b0 / a0, b1 / a0, b2 / a0],
            a: [a1 / a0, a2 / a0],
        })
    }

    /// Magnitude response in dB at `freq_hz`.
    pub fn response_db(&self, freq_hz: f64, sample_rate: u32) -> f64 {
        let w = std::f64::consts::TAU * freq_hz / sample_rate as f64;
        let eval = |c0: f64, c1: f64, c2: f64| {
            let re = c0 + c1 * w.cos() + c2 * (2.0 * w).cos();
            let im = -(c1 * w.sin() + c2 * (2.0 * w).sin());
            (re * re + im * im).sqrt()
        };
        let num = eval(self.b[0], self.b[1], self.b[2]);
        let den = eval(1.0, self.a[0], self.a[1]);
        20.0 * (num / den).log10()
    }

    /// Direct form I from rest.
    pub fn process(&self, input: &[f64]) -> Vec<f64> {
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        input
            .iter()
            .map(|&x| {
                let y = self.b[0] * x + self.b[1] * x1 + self.b[2] * x2 - self.a[0] * y1 - self.a[1] * y2;
                x2 = x1;
                x1 = x;
                y2 = y1;
                y1 = y;
                y
            })
            .collect()
    }
}

/// Attenuates content below `cutoff` by `atten_db` (≤ 0).
pub fn damp_low(clip: &AudioClip, cutoff: f64, atten_db: f64) -> Result<AudioClip> {
    if !(atten_db <= 0.0) {
        return Err(Error::invalid(format!("attenuation {atten_db} dB must be <= 0")));
    }
    let shelf = LowShelf::new(cutoff, atten_db, clip.sample_rate())?;
    AudioClip::new(shelf.process(clip.samples()), clip.sample_rate())
}
