//! Frame-based spectral front end.
//!
//! Multichannel audio is cut into non-overlapping 512-sample frames
//! (32 ms at 16 kHz), tapered with a Blackman window, transformed with an
//! un-normalized forward FFT and restricted to the configured band. One
//! frame is the latency unit of the whole system: the steering result for
//! frame `n` must be ready before frame `n+1` finishes acquisition, which
//! the two-stage runner below models with a bounded queue of depth 1.

use std::sync::mpsc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multichannel time-domain audio, all channels equally long.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    channels: Vec<Vec<f64>>,
    sample_rate: f64,
}

impl AudioClip {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: f64) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::FrameConfig("clip needs at least one channel".into()));
        }
        if sample_rate <= 0.0 || !sample_rate.is_finite() {
            return Err(Error::FrameConfig(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        let want = channels[0].len();
        for (i, ch) in channels.iter().enumerate() {
            if ch.len() != want {
                return Err(Error::ChannelLength {
                    channel: i,
                    got: ch.len(),
                    want,
                });
            }
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_samples(&self) -> usize {
        self.channels[0].len()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sample_rate
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }
}

/// Tapering window applied before the DFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Symmetric Blackman, a0 = 0.42, a1 = 0.5, a2 = 0.08.
    #[default]
    Blackman,
    /// Symmetric Hann.
    Hann,
    Rectangular,
}

impl WindowKind {
    /// Symmetric window coefficients of the given length.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        let m = (len - 1) as f64;
        (0..len)
            .map(|n| {
                let x = n as f64 / m;
                match self {
                    WindowKind::Blackman => {
                        0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos()
                    }
                    WindowKind::Hann => 0.5 - 0.5 * (2.0 * PI * x).cos(),
                    WindowKind::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

/// Framing and band parameters of the spectral front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    pub sample_rate: f64,
    pub frame_len: usize,
    pub window: WindowKind,
    /// Processed band `(f0, f1)` in Hz, `0 <= f0 < f1 <= sample_rate / 2`.
    pub band: (f64, f64),
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            sample_rate: 16_000.0,
            frame_len: 512,
            window: WindowKind::Blackman,
            band: (2_000.0, 4_000.0),
        }
    }
}

impl FrameConfig {
    pub fn new(sample_rate: f64, frame_len: usize, window: WindowKind, band: (f64, f64)) -> Result<Self> {
        let cfg = Self {
            sample_rate,
            frame_len,
            window,
            band,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate <= 0.0 || !self.sample_rate.is_finite() {
            return Err(Error::FrameConfig(format!(
                "sample rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if !self.frame_len.is_power_of_two() || self.frame_len < 2 {
            return Err(Error::FrameConfig(format!(
                "frame length must be a power of two, got {}",
                self.frame_len
            )));
        }
        let (f0, f1) = self.band;
        if !f0.is_finite() || !f1.is_finite() || f0 < 0.0 || f0 >= f1 || f1 > self.sample_rate / 2.0 {
            return Err(Error::FrameConfig(format!(
                "band must satisfy 0 <= f0 < f1 <= fs/2, got [{f0}, {f1}] at fs {}",
                self.sample_rate
            )));
        }
        Ok(())
    }

    /// Width of one DFT bin in Hz.
    pub fn bin_hz(&self) -> f64 {
        self.sample_rate / self.frame_len as f64
    }

    /// Frame duration in seconds; also the end-to-end latency budget.
    pub fn frame_duration_s(&self) -> f64 {
        self.frame_len as f64 / self.sample_rate
    }
}

/// One-frame latency budget: the SRP result for frame `n` must be ready
/// before frame `n+1` completes acquisition.
pub fn pipeline_latency_budget(config: &FrameConfig) -> f64 {
    config.frame_duration_s()
}

/// Inclusive range of DFT bins, with the bin width they were taken at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRange {
    first: usize,
    last: usize,
    bin_hz: f64,
}

impl BinRange {
    pub fn new(first: usize, last: usize, bin_hz: f64) -> Result<Self> {
        if first > last || bin_hz <= 0.0 || bin_hz.is_nan() {
            return Err(Error::FrameConfig(format!(
                "invalid bin range [{first}, {last}] at {bin_hz} Hz/bin"
            )));
        }
        Ok(Self {
            first,
            last,
            bin_hz,
        })
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> usize {
        self.last
    }

    pub fn bin_hz(&self) -> f64 {
        self.bin_hz
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Center frequency of local bin `i` (0 = first bin of the range).
    pub fn freq_hz(&self, i: usize) -> f64 {
        (self.first + i) as f64 * self.bin_hz
    }

    /// Offset of `other` inside `self` when `other` is fully contained
    /// and shares the bin width.
    pub fn local_offset_of(&self, other: &BinRange) -> Option<usize> {
        if other.bin_hz == self.bin_hz && other.first >= self.first && other.last <= self.last {
            Some(other.first - self.first)
        } else {
            None
        }
    }
}

/// Inclusive bin indices `[ceil(f0 / bin_hz), floor(f1 / bin_hz)]` for
/// the config's band.
pub fn select_band(config: &FrameConfig) -> Result<BinRange> {
    config.validate()?;
    let bin_hz = config.bin_hz();
    let (f0, f1) = config.band;
    // Guard against float dust on exact multiples.
    let first = (f0 / bin_hz - 1e-9).ceil().max(0.0) as usize;
    let last = (f1 / bin_hz + 1e-9).floor() as usize;
    if first > last {
        return Err(Error::EmptyBand { f0, f1 });
    }
    BinRange::new(first, last.min(config.frame_len / 2), bin_hz)
}

/// Complex spectra of one frame, per channel, restricted to a bin range.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrame {
    pub frame_index: usize,
    pub bins: BinRange,
    /// One spectrum per channel, `bins.len()` values each.
    pub channels: Vec<Vec<Complex64>>,
}

/// Reusable window + FFT plan for one frame configuration.
pub struct SpectralAnalyzer {
    config: FrameConfig,
    window: Vec<f64>,
    bins: BinRange,
    fft: Arc<dyn Fft<f64>>,
}

impl SpectralAnalyzer {
    pub fn new(config: FrameConfig) -> Result<Self> {
        config.validate()?;
        let bins = select_band(&config)?;
        let window = config.window.coefficients(config.frame_len);
        let fft = FftPlanner::new().plan_fft_forward(config.frame_len);
        Ok(Self {
            config,
            window,
            bins,
            fft,
        })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.config
    }

    pub fn bins(&self) -> &BinRange {
        &self.bins
    }

    /// Window + DFT one raw frame (one slice per channel, each exactly
    /// `frame_len` samples).
    pub fn analyze(&self, frame_index: usize, channels: &[&[f64]]) -> Result<SpectralFrame> {
        let mut out = Vec::with_capacity(channels.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.config.frame_len];
        for (i, ch) in channels.iter().enumerate() {
            if ch.len() != self.config.frame_len {
                return Err(Error::ChannelLength {
                    channel: i,
                    got: ch.len(),
                    want: self.config.frame_len,
                });
            }
            for ((b, x), w) in buf.iter_mut().zip(ch.iter()).zip(self.window.iter()) {
                *b = Complex64::new(x * w, 0.0);
            }
            self.fft.process(&mut buf);
            out.push(buf[self.bins.first()..=self.bins.last()].to_vec());
        }
        Ok(SpectralFrame {
            frame_index,
            bins: self.bins.clone(),
            channels: out,
        })
    }

    /// Iterate spectral frames over a clip. The clip's sample rate must
    /// equal the config's (no resampling).
    pub fn frames<'a>(
        &'a self,
        clip: &'a AudioClip,
    ) -> Result<impl Iterator<Item = SpectralFrame> + 'a> {
        if clip.sample_rate() != self.config.sample_rate {
            return Err(Error::SampleRateMismatch {
                got: clip.sample_rate(),
                want: self.config.sample_rate,
            });
        }
        let frame_len = self.config.frame_len;
        let n_frames = clip.n_samples() / frame_len;
        Ok((0..n_frames).map(move |i| {
            let views: Vec<&[f64]> = clip
                .channels()
                .iter()
                .map(|ch| &ch[i * frame_len..(i + 1) * frame_len])
                .collect();
            self.analyze(i, &views).expect("frame bounds are exact")
        }))
    }
}

/// Cut a clip into consecutive non-overlapping raw frames (borrowed
/// views, one slice per channel). The trailing remainder is discarded.
pub fn frame_stream<'a>(
    clip: &'a AudioClip,
    config: &FrameConfig,
) -> Result<impl Iterator<Item = Vec<&'a [f64]>>> {
    config.validate()?;
    if clip.sample_rate() != config.sample_rate {
        return Err(Error::SampleRateMismatch {
            got: clip.sample_rate(),
            want: config.sample_rate,
        });
    }
    let frame_len = config.frame_len;
    let n_frames = clip.n_samples() / frame_len;
    Ok((0..n_frames).map(move |i| {
        clip.channels()
            .iter()
            .map(|ch| &ch[i * frame_len..(i + 1) * frame_len])
            .collect()
    }))
}

/// One-shot window + DFT of a single raw frame.
pub fn window_and_dft(
    channels: &[&[f64]],
    frame_index: usize,
    config: &FrameConfig,
) -> Result<SpectralFrame> {
    SpectralAnalyzer::new(config.clone())?.analyze(frame_index, channels)
}

/// Run acquisition (stage A: framing + window + DFT) and processing
/// (stage B: the consumer) concurrently on successive frames, passing
/// immutable spectral frames through a bounded queue of depth 1.
///
/// Single-threaded execution via [`run_single_stage`] produces identical
/// results.
pub fn run_two_stage<F>(
    clip: &AudioClip,
    analyzer: &SpectralAnalyzer,
    mut consume: F,
) -> Result<()>
where
    F: FnMut(SpectralFrame) -> Result<()>,
{
    // Validate up front so stage A cannot panic in its thread.
    let frames = analyzer.frames(clip)?;
    drop(frames);
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<SpectralFrame>(1);
        scope.spawn(move || {
            let frames = analyzer
                .frames(clip)
                .expect("validated before spawning");
            for frame in frames {
                if tx.send(frame).is_err() {
                    break; // consumer bailed out
                }
            }
        });
        for frame in rx {
            consume(frame)?;
        }
        Ok(())
    })
}

/// Sequential reference execution of the same two-stage contract.
pub fn run_single_stage<F>(
    clip: &AudioClip,
    analyzer: &SpectralAnalyzer,
    mut consume: F,
) -> Result<()>
where
    F: FnMut(SpectralFrame) -> Result<()>,
{
    for frame in analyzer.frames(clip)? {
        consume(frame)?;
    }
    Ok(())
}
