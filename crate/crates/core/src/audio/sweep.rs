use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{encode_wav, AudioClip, StretchMode, TransformParams, DEFAULT_ATTEN_DB, DEFAULT_CUTOFF_HZ};
use crate::error::{Error, Result};

pub const DEFAULT_FACTORS: [f64; 4] = [1.3, 1.5, 1.7, 1.9];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub cutoffs: Vec<f64>,
    pub attens: Vec<f64>,
    pub factors: Vec<f64>,
    pub mode: StretchMode,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            cutoffs: vec![DEFAULT_CUTOFF_HZ],
            attens: vec![DEFAULT_ATTEN_DB],
            factors: DEFAULT_FACTORS.to_vec(),
            mode: StretchMode::Resample,
        }
    }
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.cutoffs.len() * self.attens.len() * self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cutoff-major, then attenuation, then factor.
    pub fn params(&self) -> Vec<TransformParams> {
        let mut out = Vec::with_capacity(self.len());
        for &damp_cutoff in &self.cutoffs {
            for &damp_atten_db in &self.attens {
                for &stretch_factor in &self.factors {
                    out.push(TransformParams {
                        damp_cutoff,
                        damp_atten_db,
                        stretch_factor,
                        stretch_mode: self.mode,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub params: TransformParams,
    pub path: PathBuf,
}

pub fn sweep_file_name(stem: &str, cutoff: f64, atten: f64, factor: f64) -> String {
    format!("{stem}_c{cutoff}_a{atten}_x{factor}.wav")
}

/// Renders every grid point to `out_dir` and writes `manifest.csv` beside
/// them. Rendering runs in parallel; files are written afterwards in grid
/// order.
pub fn generate_sweep(clip: &AudioClip, stem: &str, grid: &SweepGrid, out_dir: &Path) -> Result<Vec<SweepEntry>> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid has an empty axis"));
    }
    let params = grid.params();
    for p in &params {
        p.validate(clip.sample_rate())?;
    }
    let rendered: Vec<Vec<u8>> = params
        .par_iter()
        .map(|p| p.apply(clip).and_then(|c| encode_wav(&c)))
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut entries = Vec::with_capacity(params.len());
    let mut manifest = csv::Writer::from_writer(Vec::new());
    manifest.write_record(["file", "cutoff_hz", "atten_db", "factor", "mode"])?;
    for (p, bytes) in params.into_iter().zip(rendered) {
        let name = sweep_file_name(stem, p.damp_cutoff, p.damp_atten_db, p.stretch_factor);
        let path = out_dir.join(&name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        manifest.write_record([
            name,
            p.damp_cutoff.to_string(),
            p.damp_atten_db.to_string(),
            p.stretch_factor.to_string(),
            p.stretch_mode.to_string(),
        ])?;
        entries.push(SweepEntry { params: p, path });
    }
    let manifest_path = out_dir.join("manifest.csv");
    let bytes = manifest.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    std::fs::write(&manifest_path, bytes).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(entries)
}
