//! 16-bit PCM WAV input and output.

use std::fs::File;
use std::io::{BufReader, Cursor, Read};
use std::path::Path;

use hound::{SampleFormat, WavSpec};

use super::AudioClip;
use crate::error::{Error, Result};

const FULL_SCALE: f64 = 32768.0;

fn map_hound(err: hound::Error) -> Error {
    match err {
        hound::Error::Unsupported => Error::UnsupportedEncoding("unsupported WAV layout".into()),
        hound::Error::FormatError(msg) => Error::MalformedAudio(msg.to_string()),
        hound::Error::IoError(e) => Error::MalformedAudio(format!("truncated or unreadable data: {e}")),
        other => Error::MalformedAudio(other.to_string()),
    }
}

/// Decodes 16-bit integer PCM. Stereo is averaged to mono only when
/// `downmix` is set.
pub fn decode_wav(reader: impl Read, downmix: bool) -> Result<AudioClip> {
    let mut wav = hound::WavReader::new(reader).map_err(map_hound)?;
    let spec = wav.spec();
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedEncoding(format!(
            "{}-bit {:?} samples; only 16-bit PCM is supported",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    let channels = spec.channels as usize;
    match channels {
        1 => {}
        2 if downmix => {}
        2 => return Err(Error::UnsupportedEncoding("stereo input needs downmixing".into())),
        n => return Err(Error::UnsupportedEncoding(format!("{n} channels"))),
    }
    let raw = wav
        .samples::<i16>()
        .map(|s| s.map(|v| v as f64 / FULL_SCALE))
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(map_hound)?;
    let samples = if channels == 1 {
        raw
    } else {
        raw.chunks(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect()
    };
    if samples.is_empty() {
        return Err(Error::MalformedAudio("WAV file has no samples".into()));
    }
    AudioClip::new(samples, spec.sample_rate)
}

pub fn read_wav(path: impl AsRef<Path>, downmix: bool) -> Result<AudioClip> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    decode_wav(BufReader::new(file), downmix)
}

fn quantize(s: f64) -> i16 {
    (s * FULL_SCALE).round().clamp(-FULL_SCALE, FULL_SCALE - 1.0) as i16
}

/// Mono 16-bit PCM bytes.
pub fn encode_wav(clip: &AudioClip) -> Result<Vec<u8>> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut cursor = Cursor::new(Vec::new());
    {
        let mut writer = hound::WavWriter::new(&mut cursor, spec).map_err(map_hound)?;
        let mut w = writer.get_i16_writer(clip.len() as u32);
        for &s in clip.samples() {
            w.write_sample(quantize(s));
        }
        w.flush().map_err(map_hound)?;
        writer.finalize().map_err(map_hound)?;
    }
    Ok(cursor.into_inner())
}

pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_wav(clip)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
