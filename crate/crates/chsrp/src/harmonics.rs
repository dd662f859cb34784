//! Circular-harmonic field model and spatial decomposition.
//!
//! A far-field plane wave of amplitude `S` arriving from azimuth
//! `theta_i` produces the pressure `S exp(j k r cos(theta - theta_i))`
//! on a ring of radius `r`. Expanding that field in circular waves gives
//! per-order coefficients `S j^l J_l(kr) exp(-j l theta_i)`; sampling the
//! ring with `N` mics and taking a length-`N` spatial DFT recovers them
//! up to the usual `l +- N` aliasing.
//!
//! DFT normalization is `1/N` on analysis, so a pure spatial mode
//! `exp(j l theta)` decomposes to exactly `C_l = 1`.

use num_complex::Complex64;

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Ring};
use crate::pipeline::{BinRange, SpectralFrame};

/// Acoustic wavenumber `k = 2 pi f / c`, rad/m.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::BesselArgument(k));
        }
        Ok(Self(k))
    }

    pub fn from_frequency(freq_hz: f64, sound_speed: f64) -> Result<Self> {
        Self::new(2.0 * std::f64::consts::PI * freq_hz / sound_speed)
    }

    pub fn rad_per_m(self) -> f64 {
        self.0
    }
}

/// `j^l` for any integer `l` (period 4).
pub(crate) fn j_pow(l: i32) -> Complex64 {
    match l.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Plane-wave pressure `S exp(j k r cos(theta - theta_i))` at angle
/// `theta` on the ring.
pub fn ideal_pressure(
    k: Wavenumber,
    ring: &Ring,
    theta: f64,
    theta_i: f64,
    amplitude: Complex64,
) -> Complex64 {
    let phase = k.rad_per_m() * ring.radius_m * (theta - theta_i).cos();
    amplitude * Complex64::new(0.0, phase).exp()
}

/// Closed-form decomposition coefficient `S j^l J_l(kr) exp(-j l theta_i)`.
pub fn analytic_coefficient(
    l: i32,
    k: Wavenumber,
    ring: &Ring,
    theta_i: f64,
    amplitude: Complex64,
) -> Result<Complex64> {
    let jl = bessel_j(l, k.rad_per_m() * ring.radius_m)?;
    let phase = Complex64::new(0.0, -(l as f64) * theta_i).exp();
    Ok(amplitude * j_pow(l) * jl * phase)
}

/// Spatial DFT of one ring's pressures over orders `-l_max ..= l_max`:
/// `C_l = (1/N) sum_n x(theta_n) exp(-j l theta_n)` with the physical mic
/// angles (ring offset included).
///
/// Requires `2 l_max + 1 <= N`.
pub fn decompose_ring(
    ring: &Ring,
    pressures: &[Complex64],
    l_max: usize,
) -> Result<Vec<Complex64>> {
    if pressures.len() != ring.n_mics {
        return Err(Error::ChannelMismatch {
            got: pressures.len(),
            want: ring.n_mics,
        });
    }
    if 2 * l_max + 1 > ring.n_mics {
        return Err(Error::OrderLimit {
            n_mics: ring.n_mics,
            l_max,
        });
    }
    let n = ring.n_mics as f64;
    let mut coeffs = Vec::with_capacity(2 * l_max + 1);
    for l in -(l_max as i32)..=(l_max as i32) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, x) in pressures.iter().enumerate() {
            let theta = ring.mic_angle(idx);
            acc += x * Complex64::new(0.0, -(l as f64) * theta).exp();
        }
        coeffs.push(acc / n);
    }
    Ok(coeffs)
}

/// Per-ring, per-order, per-bin decomposition coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients {
    n_rings: usize,
    l_max: usize,
    bins: BinRange,
    /// Layout: ring-major, then order (`l + l_max`), then bin.
    data: Vec<Complex64>,
}

impl HarmonicCoefficients {
    pub fn zeros(n_rings: usize, l_max: usize, bins: BinRange) -> Self {
        let len = n_rings * (2 * l_max + 1) * bins.len();
        Self {
            n_rings,
            l_max,
            bins,
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn n_rings(&self) -> usize {
        self.n_rings
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_orders(&self) -> usize {
        2 * self.l_max + 1
    }

    pub fn bins(&self) -> &BinRange {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn index(&self, ring: usize, l: i32, bin: usize) -> usize {
        debug_assert!(ring < self.n_rings);
        debug_assert!(l.unsigned_abs() as usize <= self.l_max);
        debug_assert!(bin < self.bins.len());
        let o = (l + self.l_max as i32) as usize;
        (ring * self.n_orders() + o) * self.bins.len() + bin
    }

    /// Coefficient for (ring, order, local bin index).
    pub fn get(&self, ring: usize, l: i32, bin: usize) -> Complex64 {
        self.data[self.index(ring, l, bin)]
    }

    pub fn set(&mut self, ring: usize, l: i32, bin: usize, value: Complex64) {
        let i = self.index(ring, l, bin);
        self.data[i] = value;
    }

    /// Orders in storage sequence, `-l_max ..= l_max`.
    pub fn orders(&self) -> impl Iterator<Item = i32> {
        let l = self.l_max as i32;
        -l..=l
    }
}

/// Decompose every ring of an array over the selected bins of a spectral
/// frame. The frame's channels must follow the ring-major mic layout.
pub fn decompose_array(
    frame: &SpectralFrame,
    geometry: &ArrayGeometry,
    l_max: usize,
    bins: &BinRange,
) -> Result<HarmonicCoefficients> {
    if frame.channels.len() != geometry.total_mics() {
        return Err(Error::ChannelMismatch {
            got: frame.channels.len(),
            want: geometry.total_mics(),
        });
    }
    if l_max > geometry.max_order() {
        let worst = geometry
            .rings()
            .iter()
            .min_by_key(|r| r.n_mics)
            .expect("geometry has rings");
        return Err(Error::OrderLimit {
            n_mics: worst.n_mics,
            l_max,
        });
    }
    let offset = frame.bins.local_offset_of(bins).ok_or_else(|| {
        Error::Mismatch(format!(
            "requested bins {:?} not contained in frame bins {:?}",
            bins, frame.bins
        ))
    })?;

    let mut out = HarmonicCoefficients::zeros(geometry.n_rings(), l_max, bins.clone());
    let mut pressures: Vec<Complex64> = Vec::new();
    for (p, ring) in geometry.rings().iter().enumerate() {
        let ch0 = geometry.ring_channel_offset(p);
        for b in 0..bins.len() {
            pressures.clear();
            pressures.extend(
                (0..ring.n_mics).map(|m| frame.channels[ch0 + m][offset + b]),
            );
            let coeffs = decompose_ring(ring, &pressures, l_max)?;
            for (o, l) in out.orders().enumerate() {
                out.set(p, l, b, coeffs[o]);
            }
        }
    }
    Ok(out)
}
