// Index loops over parallel (ring, order, bin) tables read better than
// zipped iterators here.
#![allow(clippy::needless_range_loop)]

//! Azimuth estimation for circular microphone arrays with
//! circular-harmonics steered-response power.
//!
//! The processing chain: multichannel audio is framed and transformed
//! ([`pipeline`]), each ring's spectra are decomposed into circular
//! harmonics ([`harmonics`]), per-order compensating filters remove the
//! `j^l J_l(kr)` mode coloration ([`filters`]), and the compensated
//! coefficients are steered over a 3-degree azimuth grid to a power
//! spectrum whose argmax is the estimate ([`srp`]). A free-field
//! simulator ([`simulator`]) and an experiment harness ([`bench`])
//! reproduce parameter studies and UCA-vs-UCCA comparisons on synthetic
//! scenes.

pub mod bench;
pub mod bessel;
pub mod config;
pub mod error;
pub mod filters;
pub mod geometry;
pub mod harmonics;
pub mod pipeline;
pub mod simulator;
pub mod srp;
pub mod wav;

pub use error::{Error, Result};
pub use geometry::{ArrayGeometry, MicLayout, Ring};
pub use pipeline::{AudioClip, BinRange, FrameConfig, SpectralFrame, WindowKind};
