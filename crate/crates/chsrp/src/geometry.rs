//! Circular array geometry: rings of equispaced microphones and the
//! physical limits they impose (inter-element spacing, spatial aliasing
//! frequency, maximum resolvable harmonic order).
//!
//! Azimuths are counterclockwise from the +x axis. Public APIs speak
//! degrees; everything internal is radians.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default speed of sound in m/s, configurable per geometry.
pub const DEFAULT_SOUND_SPEED: f64 = 343.0;

/// One circle of `n_mics` equispaced microphones.
///
/// Mic `n` sits at angle `angular_offset + 2*pi*n / n_mics`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    /// Ring radius in meters.
    pub radius_m: f64,
    /// Number of microphones on the ring.
    pub n_mics: usize,
    /// Angle of mic index 0, radians.
    pub angular_offset: f64,
}

impl Ring {
    pub fn new(radius_m: f64, n_mics: usize, angular_offset: f64) -> Result<Self> {
        if radius_m <= 0.0 || !radius_m.is_finite() {
            return Err(Error::Geometry(format!(
                "ring radius must be positive and finite, got {radius_m}"
            )));
        }
        if n_mics < 3 {
            return Err(Error::Geometry(format!(
                "ring needs at least 3 mics, got {n_mics}"
            )));
        }
        if !angular_offset.is_finite() {
            return Err(Error::Geometry("angular offset must be finite".into()));
        }
        Ok(Self {
            radius_m,
            n_mics,
            angular_offset,
        })
    }

    /// Physical angle of mic `n`, radians.
    pub fn mic_angle(&self, n: usize) -> f64 {
        self.angular_offset + 2.0 * PI * n as f64 / self.n_mics as f64
    }

    /// All mic angles in index order.
    pub fn mic_angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_mics).map(move |n| self.mic_angle(n))
    }

    /// Chord distance between adjacent mics, `2 r sin(pi / N)`.
    pub fn inter_element_distance(&self) -> f64 {
        chord_length(self.radius_m, self.n_mics)
    }

    /// Spatial aliasing frequency `c / (2 d)` for this ring.
    pub fn aliasing_frequency(&self, sound_speed: f64) -> f64 {
        sound_speed / (2.0 * self.inter_element_distance())
    }

    /// Highest harmonic order this ring resolves, `floor((N - 1) / 2)`.
    pub fn max_order(&self) -> usize {
        (self.n_mics - 1) / 2
    }
}

/// Chord between adjacent points of `n` equispaced points on a circle of
/// radius `r`. Defined for any `n >= 2` (at `n = 2` it is the diameter).
pub fn chord_length(radius_m: f64, n: usize) -> f64 {
    2.0 * radius_m * (PI / n as f64).sin()
}

/// A UCA (one ring) or UCCA (several concentric rings), outermost first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    rings: Vec<Ring>,
    sound_speed: f64,
}

impl ArrayGeometry {
    pub fn new(rings: Vec<Ring>, sound_speed: f64) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::Geometry("geometry needs at least one ring".into()));
        }
        if sound_speed <= 0.0 || !sound_speed.is_finite() {
            return Err(Error::Geometry(format!(
                "sound speed must be positive, got {sound_speed}"
            )));
        }
        for (i, a) in rings.iter().enumerate() {
            for b in &rings[i + 1..] {
                if a.radius_m == b.radius_m {
                    return Err(Error::Geometry(format!(
                        "ring radii must be distinct, {} m repeats",
                        a.radius_m
                    )));
                }
            }
        }
        Ok(Self { rings, sound_speed })
    }

    /// Single-ring helper.
    pub fn uca(radius_m: f64, n_mics: usize, sound_speed: f64) -> Result<Self> {
        Self::new(vec![Ring::new(radius_m, n_mics, 0.0)?], sound_speed)
    }

    /// 7 mics on a 4 cm ring.
    pub fn uca_small() -> Self {
        Self::uca(0.04, 7, DEFAULT_SOUND_SPEED).expect("static geometry")
    }

    /// 9 mics on a 6 cm ring.
    pub fn uca_large() -> Self {
        Self::uca(0.06, 9, DEFAULT_SOUND_SPEED).expect("static geometry")
    }

    /// Two-ring concentric array: 9 mics at 6 cm plus 7 mics at 4 cm.
    pub fn ucca() -> Self {
        Self::new(
            vec![
                Ring::new(0.06, 9, 0.0).expect("static ring"),
                Ring::new(0.04, 7, 0.0).expect("static ring"),
            ],
            DEFAULT_SOUND_SPEED,
        )
        .expect("static geometry")
    }

    /// Look up one of the named presets: `uca_s`, `uca_l`, `ucca`.
    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "uca_s" | "uca-s" | "ucas" => Ok(Self::uca_small()),
            "uca_l" | "uca-l" | "ucal" => Ok(Self::uca_large()),
            "ucca" => Ok(Self::ucca()),
            other => Err(Error::Config(format!(
                "unknown geometry preset `{other}` (expected uca_s, uca_l or ucca)"
            ))),
        }
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn n_rings(&self) -> usize {
        self.rings.len()
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn total_mics(&self) -> usize {
        self.rings.iter().map(|r| r.n_mics).sum()
    }

    /// Highest order every ring can resolve: `min_p floor((N_p - 1) / 2)`.
    pub fn max_order(&self) -> usize {
        self.rings.iter().map(Ring::max_order).min().unwrap_or(0)
    }

    /// Lowest aliasing frequency across rings; the usable upper band edge.
    pub fn aliasing_frequency(&self) -> f64 {
        self.rings
            .iter()
            .map(|r| r.aliasing_frequency(self.sound_speed))
            .fold(f64::INFINITY, f64::min)
    }

    /// Channel index of mic 0 of ring `p` in the ring-major layout.
    pub fn ring_channel_offset(&self, p: usize) -> usize {
        self.rings[..p].iter().map(|r| r.n_mics).sum()
    }

    pub fn mic_positions(&self) -> MicLayout {
        mic_positions(self)
    }
}

/// Planar mic coordinates in meters, ring-major then mic-index order.
/// This ordering is the channel-order contract for WAV files and the
/// simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct MicLayout {
    pub positions: Vec<[f64; 2]>,
}

impl MicLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Mic coordinates `(r_p cos(theta_n), r_p sin(theta_n))` in channel order.
pub fn mic_positions(geometry: &ArrayGeometry) -> MicLayout {
    let mut positions = Vec::with_capacity(geometry.total_mics());
    for ring in geometry.rings() {
        for theta in ring.mic_angles() {
            positions.push([ring.radius_m * theta.cos(), ring.radius_m * theta.sin()]);
        }
    }
    MicLayout { positions }
}

/// Chord distance between adjacent mics of a ring.
pub fn inter_element_distance(ring: &Ring) -> f64 {
    ring.inter_element_distance()
}

/// Spatial aliasing frequency `c / (2 d)`.
pub fn aliasing_frequency(ring: &Ring, sound_speed: f64) -> f64 {
    ring.aliasing_frequency(sound_speed)
}

/// Highest order the whole array supports.
pub fn max_order(geometry: &ArrayGeometry) -> usize {
    geometry.max_order()
}

/// Wrap an angle in degrees onto `[0, 360)`.
pub fn wrap_deg(deg: f64) -> f64 {
    let mut a = deg % 360.0;
    if a < 0.0 {
        a += 360.0;
    }
    a
}

/// Circular distance between two azimuths in degrees, in `[0, 180]`.
pub fn circular_distance_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}
