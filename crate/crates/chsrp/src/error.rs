//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry construction, filter design, the frame
/// pipeline, the simulator and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("Bessel order {order} outside supported range |l| <= {max}")]
    OrderOutOfRange { order: i32, max: i32 },

    #[error("Bessel argument must be finite and non-negative, got {0}")]
    BesselArgument(f64),

    /// Harmonic order cap violated: a ring with `n_mics` elements resolves
    /// at most `floor((n_mics - 1) / 2)` orders.
    #[error("order limit exceeded: max order {l_max} needs 2*{l_max}+1 = {} mics, ring has {n_mics}", 2 * l_max + 1)]
    OrderLimit { n_mics: usize, l_max: usize },

    #[error("channel count mismatch: got {got}, geometry needs {want}")]
    ChannelMismatch { got: usize, want: usize },

    #[error("channel length mismatch: channel {channel} has {got} samples, expected {want}")]
    ChannelLength {
        channel: usize,
        got: usize,
        want: usize,
    },

    #[error("invalid frame config: {0}")]
    FrameConfig(String),

    #[error("empty frequency band: no bin centers inside [{f0} Hz, {f1} Hz]")]
    EmptyBand { f0: f64, f1: f64 },

    /// Two harmonic-domain objects (coefficients, filter bank, steering
    /// grid) were combined but disagree on rings, orders or bins.
    #[error("incompatible operands: {0}")]
    Mismatch(String),

    /// Every bin of one order is singular, so the bank cannot compensate
    /// that order anywhere in the band.
    #[error("filter bank degenerate: order {order} is singular at every bin in the band")]
    SingularOrder { order: i32 },

    #[error("no usable (order, bin) entries left for the SRP sum")]
    NoUsableBins,

    #[error("cannot reach a finite SNR on an all-zero signal")]
    ZeroSignal,

    #[error("reflection delay {delay_s} s exceeds the synthesized clip of {duration_s} s")]
    DelayExceedsBuffer { delay_s: f64, duration_s: f64 },

    #[error("sample rate mismatch: file has {got} Hz, config wants {want} Hz (no resampling)")]
    SampleRateMismatch { got: f64, want: f64 },

    #[error("unsupported or malformed WAV: {0}")]
    Wav(String),

    #[error("empty estimate list")]
    EmptyEstimates,

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
