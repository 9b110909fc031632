use serde::Serialize;

use super::stft::Spectrogram;
use crate::error::{Error, Result};

const ENERGY_FLOOR: f64 = 1e-12;
const SILENCE_RATIO: f64 = 1e-10;

/// Low/high spectral balance of a clip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralProfile {
    pub cutoff: f64,
    /// Mean over frames of `ln((E_low + ε) / (E_high + ε))`.
    pub ratio_mean: f64,
    pub ratio_std: f64,
    /// Energy-weighted mean frequency over retained frames.
    pub centroid: f64,
}

impl SpectralProfile {
    fn vector(&self) -> [f64; 3] {
        [self.ratio_mean, self.ratio_std, self.centroid]
    }
}

pub fn spectral_profile(spec: &Spectrogram, cutoff: f64) -> Result<SpectralProfile> {
    let nyquist = spec.sample_rate as f64 / 2.0;
    if !(cutoff > 0.0 && cutoff < nyquist) {
        return Err(Error::invalid(format!("cutoff {cutoff} Hz outside (0, {nyquist})")));
    }
    let bins = spec.bins();
    let split = (0..bins).take_while(|&k| spec.bin_frequency(k) < cutoff).count();
    let energies: Vec<(f64, f64, f64)> = (0..spec.frames())
        .map(|t| {
            let frame = spec.frame(t);
            let low: f64 = frame[..split].iter().map(|m| m * m).sum();
            let high: f64 = frame[split..].iter().map(|m| m * m).sum();
            let weighted: f64 = frame
                .iter()
                .enumerate()
                .map(|(k, m)| spec.bin_frequency(k) * m * m)
                .sum();
            (low, high, weighted)
        })
        .collect();
    let loudest = energies.iter().map(|(l, h, _)| l + h).fold(0.0, f64::max);
    if loudest <= 0.0 {
        return Err(Error::AllSilent);
    }
    let retained: Vec<&(f64, f64, f64)> = energies
        .iter()
        .filter(|(l, h, _)| l + h >= SILENCE_RATIO * loudest)
        .collect();
    let ratios: Vec<f64> = retained
        .iter()
        .map(|(l, h, _)| ((l + ENERGY_FLOOR) / (h + ENERGY_FLOOR)).ln())
        .collect();
    let n = ratios.len() as f64;
    let ratio_mean = ratios.iter().sum::<f64>() / n;
    let ratio_std = (ratios.iter().map(|r| (r - ratio_mean).powi(2)).sum::<f64>() / n).sqrt();
    let total: f64 = retained.iter().map(|(l, h, _)| l + h).sum();
    let centroid = retained.iter().map(|(_, _, w)| w).sum::<f64>() / total;
    Ok(SpectralProfile {
        cutoff,
        ratio_mean,
        ratio_std,
        centroid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub name: String,
    pub distance: f64,
    pub profile: SpectralProfile,
}

/// Orders candidates by Euclidean distance to the reference over the
/// z-normalized (ratio_mean, ratio_std, centroid) triple. Normalization
/// statistics come from the candidate set; ties break alphabetically.
pub fn rank_candidates(
    reference: &SpectralProfile,
    candidates: &[(String, SpectralProfile)],
    top: Option<usize>,
) -> Result<Vec<RankedCandidate>> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidates to rank"));
    }
    if let Some((name, _)) = candidates.iter().find(|(_, p)| p.cutoff != reference.cutoff) {
        return Err(Error::invalid(format!(
            "candidate {name:?} was profiled at a different cutoff"
        )));
    }
    let n = candidates.len() as f64;
    let mut mean = [0.0; 3];
    for (_, p) in candidates {
        for (m, v) in mean.iter_mut().zip(p.vector()) {
            *m += v / n;
        }
    }
    let mut scale = [0.0; 3];
    for (_, p) in candidates {
        for ((s, v), m) in scale.iter_mut().zip(p.vector()).zip(mean) {
            *s += (v - m).powi(2) / n;
        }
    }
    let scale = scale.map(|v| if v > 0.0 { v.sqrt() } else { 1.0 });
    let r = reference.vector();
    let mut ranked: Vec<RankedCandidate> = candidates
        .iter()
        .map(|(name, p)| {
            let distance = p
                .vector()
                .iter()
                .zip(r)
                .zip(scale)
                .map(|((v, rv), s)| ((v - rv) / s).powi(2))
                .sum::<f64>()
                .sqrt();
            RankedCandidate {
                name: name.clone(),
                distance,
                profile: *p,
            }
        })
        .collect();
    ranked.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.name.cmp(&b.name)));
    if let Some(k) = top {
        ranked.truncate(k);
    }
    Ok(ranked)
}

/// `rank,name,distance,ratio_mean,ratio_std,centroid_hz`, ranks from 1.
pub fn ranking_report_csv(ranked: &[RankedCandidate]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["rank", "name", "distance", "ratio_mean", "ratio_std", "centroid_hz"])?;
    for (i, c) in ranked.iter().enumerate() {
        wtr.write_record([
            (i + 1).to_string(),
            c.name.clone(),
            c.distance.to_string(),
            c.profile.ratio_mean.to_string(),
            c.profile.ratio_std.to_string(),
            c.profile.centroid.to_string(),
        ])?;
    }
    Ok(String::from_utf8(wtr.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8"))
}
