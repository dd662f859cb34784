//! Compensating-filter design.
//!
//! A decomposed coefficient of order `l` on ring `p` carries the mode
//! coloration `j^l J_l(k r_p)`. The per-order, per-bin filters here remove
//! it so that compensated coefficients reduce to `S exp(-j l theta_i)`,
//! frequency-invariant and ready for harmonic-domain steering:
//!
//! * `inverse` — plain reciprocal `(j^l J_l(kr))^{-1}` for a single ring;
//!   singular wherever `J_l` has a zero.
//! * `tikhonov` — regularized `(-j)^l J_l(kr) / (J_l(kr)^2 + alpha)`;
//!   finite everywhere, biased near zeros.
//! * `minnorm` — the minimum-norm solution of the unit-compensation
//!   constraint `sum_p j^l J_l(k r_p) H_l^p = 1` across rings,
//!   `H_l^p = (-j)^l J_l(k r_p) / sum_q J_l(k r_q)^2`. With two or more
//!   rings of distinct radii the per-ring Bessel zeros no longer
//!   coincide, so the band keeps finite gain throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::harmonics::j_pow;
use crate::pipeline::BinRange;

/// |J_l| below this counts as a zero: far under any in-band mode level
/// except in the immediate neighborhood of a true root.
pub const EPS_ZERO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMethod {
    Inverse,
    Tikhonov { alpha: f64 },
    MinNorm,
}

impl FilterMethod {
    pub fn name(&self) -> &'static str {
        match self {
            FilterMethod::Inverse => "inverse",
            FilterMethod::Tikhonov { .. } => "tikhonov",
            FilterMethod::MinNorm => "minnorm",
        }
    }
}

/// Per-(ring, order, bin) compensating filters plus a usability mask for
/// bins where the design is singular or infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    method: FilterMethod,
    radii: Vec<f64>,
    l_max: usize,
    bins: BinRange,
    /// Ring-major, then order, then bin (same layout as coefficients).
    values: Vec<Complex64>,
    /// Per (order, bin): false where the entry must be skipped.
    usable: Vec<bool>,
}

impl FilterBank {
    pub fn method(&self) -> FilterMethod {
        self.method
    }

    pub fn n_rings(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
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

    pub fn orders(&self) -> impl Iterator<Item = i32> {
        let l = self.l_max as i32;
        -l..=l
    }

    fn vidx(&self, ring: usize, l: i32, bin: usize) -> usize {
        let o = (l + self.l_max as i32) as usize;
        (ring * self.n_orders() + o) * self.bins.len() + bin
    }

    fn uidx(&self, l: i32, bin: usize) -> usize {
        let o = (l + self.l_max as i32) as usize;
        o * self.bins.len() + bin
    }

    /// Filter value for (ring, order, local bin).
    pub fn get(&self, ring: usize, l: i32, bin: usize) -> Complex64 {
        self.values[self.vidx(ring, l, bin)]
    }

    /// Whether the (order, bin) entry may enter the SRP sum.
    pub fn usable(&self, l: i32, bin: usize) -> bool {
        self.usable[self.uidx(l, bin)]
    }

    /// Number of unusable (order, bin) entries.
    pub fn n_flagged(&self) -> usize {
        self.usable.iter().filter(|u| !**u).count()
    }
}

fn bessel_table(geometry: &ArrayGeometry, l_max: usize, bins: &BinRange) -> Result<Vec<Vec<Vec<f64>>>> {
    // [ring][order][bin]
    let c = geometry.sound_speed();
    geometry
        .rings()
        .iter()
        .map(|ring| {
            (-(l_max as i32)..=l_max as i32)
                .map(|l| {
                    (0..bins.len())
                        .map(|b| {
                            let k = 2.0 * std::f64::consts::PI * bins.freq_hz(b) / c;
                            bessel_j(l, k * ring.radius_m)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Plain single-ring inverse, `H_l = (j^l J_l(kr))^{-1}`.
///
/// Bins with `|J_l| < EPS_ZERO` are flagged unusable; if that happens on
/// every bin of some order the whole bank is rejected.
pub fn design_inverse(geometry: &ArrayGeometry, l_max: usize, bins: &BinRange) -> Result<FilterBank> {
    require_single_ring(geometry, "inverse")?;
    check_order(geometry, l_max)?;
    let table = bessel_table(geometry, l_max, bins)?;
    let n_orders = 2 * l_max + 1;
    let mut values = vec![Complex64::new(0.0, 0.0); n_orders * bins.len()];
    let mut usable = vec![true; n_orders * bins.len()];
    for (o, l) in (-(l_max as i32)..=l_max as i32).enumerate() {
        let mut any = false;
        for b in 0..bins.len() {
            let jl = table[0][o][b];
            let idx = o * bins.len() + b;
            if jl.abs() < EPS_ZERO {
                usable[idx] = false;
            } else {
                values[idx] = j_pow(-l) / jl;
                any = true;
            }
        }
        if !any {
            return Err(Error::SingularOrder { order: l });
        }
    }
    Ok(FilterBank {
        method: FilterMethod::Inverse,
        radii: vec![geometry.rings()[0].radius_m],
        l_max,
        bins: bins.clone(),
        values,
        usable,
    })
}

/// Tikhonov-regularized single-ring design,
/// `H_l = (-j)^l J_l(kr) / (J_l(kr)^2 + alpha)`.
///
/// Finite at every bin for `alpha > 0`; at `alpha = 0` it reduces to the
/// plain inverse and inherits its singular-bin flags.
pub fn design_tikhonov(
    geometry: &ArrayGeometry,
    l_max: usize,
    bins: &BinRange,
    alpha: f64,
) -> Result<FilterBank> {
    require_single_ring(geometry, "tikhonov")?;
    check_order(geometry, l_max)?;
    if alpha < 0.0 || !alpha.is_finite() {
        return Err(Error::Config(format!(
            "tikhonov alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let table = bessel_table(geometry, l_max, bins)?;
    let n_orders = 2 * l_max + 1;
    let mut values = vec![Complex64::new(0.0, 0.0); n_orders * bins.len()];
    let mut usable = vec![true; n_orders * bins.len()];
    for (o, l) in (-(l_max as i32)..=l_max as i32).enumerate() {
        for b in 0..bins.len() {
            let jl = table[0][o][b];
            let denom = jl * jl + alpha;
            let idx = o * bins.len() + b;
            if denom < EPS_ZERO * EPS_ZERO {
                usable[idx] = false;
            } else {
                values[idx] = j_pow(-l) * (jl / denom);
            }
        }
    }
    Ok(FilterBank {
        method: FilterMethod::Tikhonov { alpha },
        radii: vec![geometry.rings()[0].radius_m],
        l_max,
        bins: bins.clone(),
        values,
        usable,
    })
}

/// Minimum-norm multi-ring design,
/// `H_l^p = (-j)^l J_l(k r_p) / sum_q J_l(k r_q)^2`.
///
/// This is the smallest-norm filter vector satisfying the unit
/// compensation constraint `sum_p j^l J_l(k r_p) H_l^p = 1` per (order,
/// bin). A bin is infeasible only when every ring sits on a Bessel zero
/// simultaneously.
pub fn design_minnorm(geometry: &ArrayGeometry, l_max: usize, bins: &BinRange) -> Result<FilterBank> {
    check_order(geometry, l_max)?;
    let table = bessel_table(geometry, l_max, bins)?;
    let n_rings = geometry.n_rings();
    let n_orders = 2 * l_max + 1;
    let mut values = vec![Complex64::new(0.0, 0.0); n_rings * n_orders * bins.len()];
    let mut usable = vec![true; n_orders * bins.len()];
    for (o, l) in (-(l_max as i32)..=l_max as i32).enumerate() {
        for b in 0..bins.len() {
            let norm_sq: f64 = (0..n_rings).map(|p| table[p][o][b] * table[p][o][b]).sum();
            if norm_sq < EPS_ZERO * EPS_ZERO {
                usable[o * bins.len() + b] = false;
                continue;
            }
            for p in 0..n_rings {
                values[(p * n_orders + o) * bins.len() + b] =
                    j_pow(-l) * (table[p][o][b] / norm_sq);
            }
        }
    }
    Ok(FilterBank {
        method: FilterMethod::MinNorm,
        radii: geometry.rings().iter().map(|r| r.radius_m).collect(),
        l_max,
        bins: bins.clone(),
        values,
        usable,
    })
}

/// Dispatch on the method enum.
pub fn design(
    method: FilterMethod,
    geometry: &ArrayGeometry,
    l_max: usize,
    bins: &BinRange,
) -> Result<FilterBank> {
    match method {
        FilterMethod::Inverse => design_inverse(geometry, l_max, bins),
        FilterMethod::Tikhonov { alpha } => design_tikhonov(geometry, l_max, bins, alpha),
        FilterMethod::MinNorm => design_minnorm(geometry, l_max, bins),
    }
}

/// `1 / ||H_l(bin)||` per (order, bin); for multi-ring banks the norm is
/// across the ring vector. Flagged entries emit 0. This is the quantity
/// whose dips expose low white-noise gain and whose zeros expose the
/// singular bins of a plain inverse design.
pub fn reciprocal_magnitude_curve(bank: &FilterBank) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; bank.bins().len()]; bank.n_orders()];
    for (o, l) in bank.orders().enumerate() {
        for b in 0..bank.bins().len() {
            if !bank.usable(l, b) {
                continue;
            }
            let norm_sq: f64 = (0..bank.n_rings())
                .map(|p| bank.get(p, l, b).norm_sqr())
                .sum();
            let norm = norm_sq.sqrt();
            if norm > 0.0 {
                out[o][b] = 1.0 / norm;
            }
        }
    }
    out
}

fn require_single_ring(geometry: &ArrayGeometry, what: &str) -> Result<()> {
    if geometry.n_rings() != 1 {
        return Err(Error::Config(format!(
            "{what} design is defined for a single ring, geometry has {}",
            geometry.n_rings()
        )));
    }
    Ok(())
}

fn check_order(geometry: &ArrayGeometry, l_max: usize) -> Result<()> {
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
    Ok(())
}
