//! Multichannel WAV ingestion and export.
//!
//! Accepted encodings: 16-bit PCM and 32-bit IEEE float. Channel order is
//! the ring-major mic layout; sample-rate conversion is out of scope, so
//! readers must check the rate against their frame config.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::AudioClip;

/// Read a multichannel WAV into channel-major f64 buffers.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let reader =
        hound::WavReader::open(path.as_ref()).map_err(|e| Error::Wav(e.to_string()))?;
    let spec = reader.spec();
    let n_channels = spec.channels as usize;
    if n_channels == 0 {
        return Err(Error::Wav("zero channels".into()));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Wav(e.to_string()))?,
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Wav(e.to_string()))?,
        (fmt, bits) => {
            return Err(Error::Wav(format!(
                "unsupported encoding {fmt:?}/{bits} bit (want PCM16 or float32)"
            )))
        }
    };
    let n_frames = interleaved.len() / n_channels;
    let mut channels = vec![Vec::with_capacity(n_frames); n_channels];
    for (i, v) in interleaved.into_iter().enumerate() {
        channels[i % n_channels].push(v);
    }
    AudioClip::new(channels, spec.sample_rate as f64)
}

/// Write a clip as 32-bit float WAV.
pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    let spec = hound::WavSpec {
        channels: clip.n_channels() as u16,
        sample_rate: clip.sample_rate().round() as u32,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer =
        hound::WavWriter::create(path.as_ref(), spec).map_err(|e| Error::Wav(e.to_string()))?;
    for i in 0..clip.n_samples() {
        for ch in clip.channels() {
            writer
                .write_sample(ch[i] as f32)
                .map_err(|e| Error::Wav(e.to_string()))?;
        }
    }
    writer.finalize().map_err(|e| Error::Wav(e.to_string()))?;
    Ok(())
}

/// Write a clip as 16-bit PCM WAV (values clipped to [-1, 1]).
pub fn write_wav_pcm16(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    let spec = hound::WavSpec {
        channels: clip.n_channels() as u16,
        sample_rate: clip.sample_rate().round() as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer =
        hound::WavWriter::create(path.as_ref(), spec).map_err(|e| Error::Wav(e.to_string()))?;
    for i in 0..clip.n_samples() {
        for ch in clip.channels() {
            let v = (ch[i].clamp(-1.0, 1.0) * 32767.0).round() as i16;
            writer
                .write_sample(v)
                .map_err(|e| Error::Wav(e.to_string()))?;
        }
    }
    writer.finalize().map_err(|e| Error::Wav(e.to_string()))?;
    Ok(())
}
