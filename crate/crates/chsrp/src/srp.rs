//! Steered-response power in the harmonic domain.
//!
//! Compensated coefficients `C~_l(bin) = sum_p C_l^p(bin) H_l^p(bin)` are
//! steered with the unit-modulus vector `A(theta) = [e^{j l theta}]` and
//! accumulated over the band:
//!
//! `P(theta) = sum_bins | sum_l C~_l(bin) e^{j l theta} |^2`
//!
//! For a unit plane wave from `theta_i` the inner sum is the Dirichlet
//! kernel, peaking at `(2L+1)^2` exactly on the source azimuth. Bins the
//! filter bank flagged singular are excluded from the sum rather than
//! zero-filled, so a plain-inverse UCA degrades gracefully near Bessel
//! zeros instead of collapsing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filters::FilterBank;
use crate::geometry::wrap_deg;
use crate::harmonics::HarmonicCoefficients;
use crate::pipeline::{BinRange, SpectralFrame};

/// Azimuth scan grid with precomputed steering vectors.
#[derive(Debug, Clone)]
pub struct SteeringGrid {
    step_deg: f64,
    l_max: usize,
    /// Per grid angle: `e^{j l theta}` for `l = -L ..= L`.
    vectors: Vec<Vec<Complex64>>,
}

impl SteeringGrid {
    /// `step_deg` must divide 360 into a whole number of angles.
    pub fn new(step_deg: f64, l_max: usize) -> Result<Self> {
        if step_deg <= 0.0 || !step_deg.is_finite() {
            return Err(Error::Config(format!(
                "grid step must be positive, got {step_deg}"
            )));
        }
        let n = 360.0 / step_deg;
        if (n - n.round()).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "360 must be divisible by the grid step, got {step_deg}"
            )));
        }
        let n = n.round() as usize;
        let vectors = (0..n)
            .map(|i| steering_vector((i as f64 * step_deg).to_radians(), l_max))
            .collect();
        Ok(Self {
            step_deg,
            l_max,
            vectors,
        })
    }

    pub fn step_deg(&self) -> f64 {
        self.step_deg
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_angles(&self) -> usize {
        self.vectors.len()
    }

    pub fn angle_deg(&self, i: usize) -> f64 {
        i as f64 * self.step_deg
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }
}

/// Steering vector `[e^{j l theta}]` for `l = -L ..= L`.
pub fn steering_vector(theta_rad: f64, l_max: usize) -> Vec<Complex64> {
    (-(l_max as i32)..=l_max as i32)
        .map(|l| Complex64::new(0.0, l as f64 * theta_rad).exp())
        .collect()
}

/// Coefficients after per-ring compensation, summed across rings.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensatedCoefficients {
    l_max: usize,
    bins: BinRange,
    /// Order-major, then bin.
    values: Vec<Complex64>,
    usable: Vec<bool>,
}

impl CompensatedCoefficients {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_orders(&self) -> usize {
        2 * self.l_max + 1
    }

    pub fn bins(&self) -> &BinRange {
        &self.bins
    }

    fn idx(&self, l: i32, bin: usize) -> usize {
        ((l + self.l_max as i32) as usize) * self.bins.len() + bin
    }

    pub fn get(&self, l: i32, bin: usize) -> Complex64 {
        self.values[self.idx(l, bin)]
    }

    pub fn usable(&self, l: i32, bin: usize) -> bool {
        self.usable[self.idx(l, bin)]
    }

    /// Count of (order, bin) entries excluded by the bank.
    pub fn n_excluded(&self) -> usize {
        self.usable.iter().filter(|u| !**u).count()
    }

    /// Orders whose every bin is excluded; a degraded band the caller
    /// should surface.
    pub fn fully_excluded_orders(&self) -> Vec<i32> {
        let l = self.l_max as i32;
        (-l..=l)
            .filter(|&ord| (0..self.bins.len()).all(|b| !self.usable(ord, b)))
            .collect()
    }

    fn orders_enumerated(&self) -> impl Iterator<Item = (usize, i32)> {
        let l = self.l_max as i32;
        (-l..=l).enumerate()
    }
}

/// Apply a filter bank to decomposed coefficients:
/// `C~_l(bin) = sum_p C_l^p(bin) H_l^p(bin)`.
///
/// Flagged (order, bin) entries are skipped and recorded in the output's
/// usability mask.
pub fn compensate(
    coeffs: &HarmonicCoefficients,
    bank: &FilterBank,
) -> Result<CompensatedCoefficients> {
    if coeffs.n_rings() != bank.n_rings() {
        return Err(Error::Mismatch(format!(
            "coefficients cover {} rings, bank {}",
            coeffs.n_rings(),
            bank.n_rings()
        )));
    }
    if coeffs.l_max() != bank.l_max() {
        return Err(Error::Mismatch(format!(
            "coefficients go to order {}, bank to {}",
            coeffs.l_max(),
            bank.l_max()
        )));
    }
    if coeffs.bins() != bank.bins() {
        return Err(Error::Mismatch(
            "coefficients and bank cover different bins".into(),
        ));
    }
    let l_max = coeffs.l_max();
    let n_bins = coeffs.bins().len();
    let mut values = vec![Complex64::new(0.0, 0.0); (2 * l_max + 1) * n_bins];
    let mut usable = vec![true; (2 * l_max + 1) * n_bins];
    for (o, l) in coeffs.orders().enumerate() {
        for b in 0..n_bins {
            let idx = o * n_bins + b;
            if !bank.usable(l, b) {
                usable[idx] = false;
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..coeffs.n_rings() {
                acc += coeffs.get(p, l, b) * bank.get(p, l, b);
            }
            values[idx] = acc;
        }
    }
    Ok(CompensatedCoefficients {
        l_max,
        bins: coeffs.bins().clone(),
        values,
        usable,
    })
}

/// Non-negative steered power over the scan grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSpectrum {
    /// Index of the frame (or of the last frame of an averaging window).
    pub frame_index: usize,
    step_deg: f64,
    values: Vec<f64>,
}

impl SpatialSpectrum {
    pub fn step_deg(&self) -> f64 {
        self.step_deg
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn angle_deg(&self, i: usize) -> f64 {
        i as f64 * self.step_deg
    }

    /// Peak power value.
    pub fn peak(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Scan the grid: `P(theta) = sum_bins |sum_l C~_l(bin) e^{j l theta}|^2`,
/// skipping excluded (order, bin) entries.
pub fn srp_spectrum(
    comp: &CompensatedCoefficients,
    grid: &SteeringGrid,
    frame_index: usize,
) -> Result<SpatialSpectrum> {
    if grid.l_max() != comp.l_max() {
        return Err(Error::Mismatch(format!(
            "grid steers {} orders, coefficients carry {}",
            2 * grid.l_max() + 1,
            comp.n_orders()
        )));
    }
    let n_bins = comp.bins().len();
    let n_orders = comp.n_orders();
    if (0..n_orders).all(|o| {
        (0..n_bins).all(|b| !comp.usable(o as i32 - comp.l_max() as i32, b))
    }) {
        return Err(Error::NoUsableBins);
    }
    let mut values = vec![0.0; grid.n_angles()];
    for (a, steer) in grid.vectors().iter().enumerate() {
        let mut power = 0.0;
        for b in 0..n_bins {
            let mut response = Complex64::new(0.0, 0.0);
            for (o, l) in comp.orders_enumerated() {
                if comp.usable(l, b) {
                    response += comp.values[o * n_bins + b] * steer[o];
                }
            }
            power += response.norm_sqr();
        }
        values[a] = power;
    }
    Ok(SpatialSpectrum {
        frame_index,
        step_deg: grid.step_deg(),
        values,
    })
}

/// Grid angle of the spectrum maximum, ties broken toward the lowest
/// angle.
pub fn argmax_azimuth(spectrum: &SpatialSpectrum) -> f64 {
    let mut best = 0usize;
    for (i, v) in spectrum.values().iter().enumerate() {
        if *v > spectrum.values()[best] {
            best = i;
        }
    }
    wrap_deg(spectrum.angle_deg(best))
}

/// Element-wise mean of the most recent `window` spectra. Returns `None`
/// while fewer than `window` spectra are available (warm-up).
pub fn temporal_average(spectra: &[SpatialSpectrum], window: usize) -> Result<Option<SpatialSpectrum>> {
    if window == 0 {
        return Err(Error::Config("averaging window must be >= 1".into()));
    }
    if spectra.len() < window {
        return Ok(None);
    }
    let tail = &spectra[spectra.len() - window..];
    let step = tail[0].step_deg();
    let len = tail[0].len();
    for s in tail {
        if s.len() != len || s.step_deg() != step {
            return Err(Error::Mismatch("spectra use different grids".into()));
        }
    }
    let mut values = vec![0.0; len];
    for s in tail {
        for (acc, v) in values.iter_mut().zip(s.values()) {
            *acc += v;
        }
    }
    for v in &mut values {
        *v /= window as f64;
    }
    Ok(Some(SpatialSpectrum {
        frame_index: tail[window - 1].frame_index,
        step_deg: step,
        values,
    }))
}

/// Streaming block averager: accumulates `window` spectra, then emits
/// their mean and resets. With the default 32 ms frames and window 10 an
/// averaged spectrum comes out every 0.32 s.
#[derive(Debug, Clone)]
pub struct Averager {
    window: usize,
    acc: Vec<f64>,
    count: usize,
    step_deg: f64,
}

impl Averager {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::Config("averaging window must be >= 1".into()));
        }
        Ok(Self {
            window,
            acc: Vec::new(),
            count: 0,
            step_deg: 0.0,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Feed one spectrum; yields the block mean on every `window`-th call.
    pub fn push(&mut self, spectrum: &SpatialSpectrum) -> Option<SpatialSpectrum> {
        if self.acc.len() != spectrum.len() {
            self.acc = vec![0.0; spectrum.len()];
            self.count = 0;
        }
        self.step_deg = spectrum.step_deg();
        for (a, v) in self.acc.iter_mut().zip(spectrum.values()) {
            *a += v;
        }
        self.count += 1;
        if self.count == self.window {
            let values: Vec<f64> = self.acc.iter().map(|v| v / self.window as f64).collect();
            self.acc.iter_mut().for_each(|v| *v = 0.0);
            self.count = 0;
            Some(SpatialSpectrum {
                frame_index: spectrum.frame_index,
                step_deg: self.step_deg,
                values,
            })
        } else {
            None
        }
    }
}

/// One emitted localization result (after averaging).
#[derive(Debug, Clone)]
pub struct Estimate {
    /// Index of the last frame in the averaging window.
    pub frame_index: usize,
    pub azimuth_deg: f64,
    pub spectrum: SpatialSpectrum,
}

/// Stateful per-frame driver: decompose, compensate, steer, average.
///
/// Holds the only mutable state of the processing stage (the averaging
/// buffer); geometry, bank and grid are read-only and shareable.
pub struct Localizer {
    geometry: crate::geometry::ArrayGeometry,
    l_max: usize,
    bank: FilterBank,
    grid: SteeringGrid,
    averager: Averager,
    warnings: Vec<String>,
    checked: bool,
}

impl Localizer {
    pub fn new(
        geometry: crate::geometry::ArrayGeometry,
        l_max: usize,
        bank: FilterBank,
        grid: SteeringGrid,
        average_window: usize,
    ) -> Result<Self> {
        if bank.l_max() != l_max || grid.l_max() != l_max {
            return Err(Error::Mismatch(format!(
                "orders disagree: localizer {l_max}, bank {}, grid {}",
                bank.l_max(),
                grid.l_max()
            )));
        }
        if bank.n_rings() != geometry.n_rings() {
            return Err(Error::Mismatch(format!(
                "bank covers {} rings, geometry {}",
                bank.n_rings(),
                geometry.n_rings()
            )));
        }
        Ok(Self {
            geometry,
            l_max,
            bank,
            grid,
            averager: Averager::new(average_window)?,
            warnings: Vec::new(),
            checked: false,
        })
    }

    pub fn bank(&self) -> &FilterBank {
        &self.bank
    }

    pub fn grid(&self) -> &SteeringGrid {
        &self.grid
    }

    /// Degraded-band warnings collected while processing.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Feed one spectral frame; yields an estimate whenever the
    /// averaging window completes.
    pub fn process_frame(&mut self, frame: &SpectralFrame) -> Result<Option<Estimate>> {
        let coeffs =
            crate::harmonics::decompose_array(frame, &self.geometry, self.l_max, self.bank.bins())?;
        let comp = compensate(&coeffs, &self.bank)?;
        if !self.checked {
            self.checked = true;
            let dead = comp.fully_excluded_orders();
            if !dead.is_empty() {
                self.warnings.push(format!(
                    "degraded band: orders {dead:?} excluded at every bin"
                ));
            }
        }
        let spectrum = srp_spectrum(&comp, &self.grid, frame.frame_index)?;
        Ok(self.averager.push(&spectrum).map(|avg| Estimate {
            frame_index: avg.frame_index,
            azimuth_deg: argmax_azimuth(&avg),
            spectrum: avg,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::design_minnorm;
    use crate::geometry::ArrayGeometry;
    use crate::pipeline::BinRange;

    fn unit_compensated(l_max: usize, bins: BinRange, theta_i_rad: f64) -> CompensatedCoefficients {
        let n_bins = bins.len();
        let mut values = Vec::new();
        for l in -(l_max as i32)..=l_max as i32 {
            for _ in 0..n_bins {
                values.push(Complex64::new(0.0, -(l as f64) * theta_i_rad).exp());
            }
        }
        CompensatedCoefficients {
            l_max,
            bins,
            values,
            usable: vec![true; (2 * l_max + 1) * n_bins],
        }
    }

    #[test]
    fn steering_vector_values() {
        let v = steering_vector(0.0, 3);
        assert!(v.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));

        let v = steering_vector(std::f64::consts::FRAC_PI_2, 1);
        let want = [
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for (a, b) in v.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-15);
        }

        // conj(A(theta)) = A(-theta)
        let t = 0.77;
        let a: Vec<Complex64> = steering_vector(t, 4).iter().map(|z| z.conj()).collect();
        let b = steering_vector(-t, 4);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn grid_step_must_divide_circle() {
        assert!(SteeringGrid::new(3.0, 3).is_ok());
        assert_eq!(SteeringGrid::new(3.0, 3).unwrap().n_angles(), 120);
        assert!(SteeringGrid::new(7.0, 3).is_err());
        assert!(SteeringGrid::new(0.0, 3).is_err());
    }

    #[test]
    fn dirichlet_peak_for_unit_wave() {
        // One usable bin, L = 3, on-grid source: peak is (2L+1)^2 = 49.
        let bins = BinRange::new(64, 64, 31.25).unwrap();
        let theta = 120f64.to_radians();
        let comp = unit_compensated(3, bins, theta);
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        let spec = srp_spectrum(&comp, &grid, 0).unwrap();
        let est = argmax_azimuth(&spec);
        assert_eq!(est, 120.0);
        assert!((spec.peak() - 49.0).abs() < 1e-9);
        assert!(spec.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn zero_coefficients_zero_spectrum() {
        let bins = BinRange::new(64, 70, 31.25).unwrap();
        let comp = CompensatedCoefficients {
            l_max: 2,
            bins: bins.clone(),
            values: vec![Complex64::new(0.0, 0.0); 5 * bins.len()],
            usable: vec![true; 5 * bins.len()],
        };
        let grid = SteeringGrid::new(3.0, 2).unwrap();
        let spec = srp_spectrum(&comp, &grid, 7).unwrap();
        assert!(spec.values().iter().all(|v| *v == 0.0));
        assert_eq!(spec.frame_index, 7);
        // Uniform spectrum: tie-break reports the lowest angle.
        assert_eq!(argmax_azimuth(&spec), 0.0);
    }

    #[test]
    fn all_excluded_is_an_error() {
        let bins = BinRange::new(64, 64, 31.25).unwrap();
        let comp = CompensatedCoefficients {
            l_max: 1,
            bins,
            values: vec![Complex64::new(1.0, 0.0); 3],
            usable: vec![false; 3],
        };
        let grid = SteeringGrid::new(3.0, 1).unwrap();
        assert!(matches!(
            srp_spectrum(&comp, &grid, 0),
            Err(Error::NoUsableBins)
        ));
    }

    #[test]
    fn compensated_plane_wave_is_pure_phase() {
        // Per-ring analytic coefficients of a unit plane wave through the
        // minnorm bank collapse to exp(-j l theta_i) at every usable bin;
        // this is the compensation identity end to end.
        use crate::harmonics::{analytic_coefficient, HarmonicCoefficients, Wavenumber};
        let g = ArrayGeometry::ucca();
        let bins = BinRange::new(64, 128, 31.25).unwrap();
        let theta_i = 120f64.to_radians();
        let one = Complex64::new(1.0, 0.0);
        let mut coeffs = HarmonicCoefficients::zeros(2, 3, bins.clone());
        for (p, ring) in g.rings().iter().enumerate() {
            for l in -3i32..=3 {
                for b in 0..bins.len() {
                    let k = Wavenumber::from_frequency(bins.freq_hz(b), g.sound_speed()).unwrap();
                    let c = analytic_coefficient(l, k, ring, theta_i, one).unwrap();
                    coeffs.set(p, l, b, c);
                }
            }
        }
        let bank = design_minnorm(&g, 3, &bins).unwrap();
        let comp = compensate(&coeffs, &bank).unwrap();
        assert_eq!(comp.fully_excluded_orders(), Vec::<i32>::new());
        assert_eq!(comp.n_excluded(), 0);
        for l in -3i32..=3 {
            for b in 0..bins.len() {
                let want = Complex64::new(0.0, -(l as f64) * theta_i).exp();
                let got = comp.get(l, b);
                assert!(
                    (got - want).norm() < 1e-6,
                    "l={l} b={b} got {got} want {want}"
                );
            }
        }
    }

    #[test]
    fn srp_scale_invariance() {
        let bins = BinRange::new(64, 66, 31.25).unwrap();
        let theta = 240f64.to_radians();
        let comp = unit_compensated(3, bins.clone(), theta);
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        let base = srp_spectrum(&comp, &grid, 0).unwrap();

        let scaled = CompensatedCoefficients {
            l_max: comp.l_max,
            bins,
            values: comp.values.iter().map(|v| v * 3.5).collect(),
            usable: comp.usable.clone(),
        };
        let s = srp_spectrum(&scaled, &grid, 0).unwrap();
        assert_eq!(argmax_azimuth(&base), argmax_azimuth(&s));
        for (a, b) in base.values().iter().zip(s.values()) {
            assert!((b - a * 3.5 * 3.5).abs() < 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn two_sources_two_peaks() {
        // Incoherent superposition of two unit waves at 120 and 240
        // degrees: local maxima at both grid angles.
        let bins = BinRange::new(64, 64, 31.25).unwrap();
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        let a = unit_compensated(3, bins.clone(), 120f64.to_radians());
        let b = unit_compensated(3, bins, 240f64.to_radians());
        let sa = srp_spectrum(&a, &grid, 0).unwrap();
        let sb = srp_spectrum(&b, &grid, 0).unwrap();
        let sum: Vec<f64> = sa
            .values()
            .iter()
            .zip(sb.values())
            .map(|(x, y)| x + y)
            .collect();
        for target in [120.0 / 3.0, 240.0 / 3.0] {
            let i = target as usize;
            let n = sum.len();
            assert!(sum[i] > sum[(i + 1) % n] && sum[i] > sum[(i + n - 1) % n]);
        }
    }

    #[test]
    fn peak_dominance_matches_dirichlet_sidelobes() {
        // Closed-form kernel: D(phi) = sin((2L+1)phi/2)/sin(phi/2).
        let l_max = 3usize;
        let grid = SteeringGrid::new(3.0, l_max).unwrap();
        let bins = BinRange::new(64, 128, 31.25).unwrap();
        let comp = unit_compensated(l_max, bins, 120f64.to_radians());
        let spec = srp_spectrum(&comp, &grid, 0).unwrap();
        let kernel = |phi: f64| -> f64 {
            if phi.abs() < 1e-12 {
                (2 * l_max + 1) as f64
            } else {
                ((2 * l_max + 1) as f64 * phi / 2.0).sin() / (phi / 2.0).sin()
            }
        };
        let mut worst_kernel: f64 = 0.0;
        let mut worst_measured: f64 = 0.0;
        for i in 0..spec.len() {
            let d = crate::geometry::circular_distance_deg(spec.angle_deg(i), 120.0);
            if d > 30.0 {
                worst_kernel = worst_kernel.max(kernel(d.to_radians()).powi(2));
                worst_measured = worst_measured.max(spec.values()[i]);
            }
        }
        let peak = spec.peak();
        let expect_ratio = 49.0 / worst_kernel;
        let got_ratio = peak / worst_measured;
        assert!(
            got_ratio >= expect_ratio * (1.0 - 1e-9),
            "ratio {got_ratio} below kernel bound {expect_ratio}"
        );
    }

    #[test]
    fn averaging_identity_and_warmup() {
        let bins = BinRange::new(64, 64, 31.25).unwrap();
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        let comp = unit_compensated(3, bins, 33f64.to_radians());
        let spec = srp_spectrum(&comp, &grid, 0).unwrap();

        assert!(temporal_average(&[], 1).unwrap().is_none());
        let id = temporal_average(std::slice::from_ref(&spec), 1)
            .unwrap()
            .unwrap();
        assert_eq!(id.values(), spec.values());

        let ten = vec![spec.clone(); 10];
        let avg = temporal_average(&ten, 10).unwrap().unwrap();
        for (a, b) in avg.values().iter().zip(spec.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(temporal_average(&ten[..9], 10).unwrap().is_none());
    }

    #[test]
    fn block_averager_cadence() {
        let bins = BinRange::new(64, 64, 31.25).unwrap();
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        let comp = unit_compensated(3, bins, 0.0);
        let mut avg = Averager::new(10).unwrap();
        let mut emitted = Vec::new();
        for i in 0..35 {
            let mut s = srp_spectrum(&comp, &grid, i).unwrap();
            s.frame_index = i;
            if let Some(out) = avg.push(&s) {
                emitted.push(out.frame_index);
            }
        }
        assert_eq!(emitted, vec![9, 19, 29]);
    }

    #[test]
    fn averaging_reduces_argmax_variance() {
        // Monte-Carlo: fixed kernel peak plus iid noise per angle. The
        // variance of the argmax under a 10-frame average is strictly
        // below the single-frame variance over 100 draws.
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        let bins = BinRange::new(64, 64, 31.25).unwrap();
        let comp = unit_compensated(3, bins, 120f64.to_radians());
        let clean = srp_spectrum(&comp, &grid, 0).unwrap();
        let mut state = 0xD1B54A32D192ED03u64;
        let mut rnd = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let noisy = |rnd: &mut dyn FnMut() -> f64| -> SpatialSpectrum {
            SpatialSpectrum {
                frame_index: 0,
                step_deg: clean.step_deg(),
                values: clean
                    .values()
                    .iter()
                    .map(|v| v + 60.0 * rnd())
                    .collect(),
            }
        };
        let err = |est: f64| crate::geometry::circular_distance_deg(est, 120.0).powi(2);
        let mut single = 0.0;
        let mut averaged = 0.0;
        for _ in 0..100 {
            let frames: Vec<SpatialSpectrum> = (0..10).map(|_| noisy(&mut rnd)).collect();
            single += err(argmax_azimuth(&frames[0]));
            let avg = temporal_average(&frames, 10).unwrap().unwrap();
            averaged += err(argmax_azimuth(&avg));
        }
        assert!(
            averaged < single,
            "averaged sq-err {averaged} not below single {single}"
        );
    }

    #[test]
    fn grid_rotation_consistency() {
        // Shifting the source by one grid step shifts the argmax by one
        // grid step.
        let bins = BinRange::new(64, 80, 31.25).unwrap();
        let grid = SteeringGrid::new(3.0, 3).unwrap();
        for base in [0.0f64, 117.0, 240.0, 357.0] {
            let a = unit_compensated(3, bins.clone(), base.to_radians());
            let b = unit_compensated(3, bins.clone(), (base + 3.0).to_radians());
            let ea = argmax_azimuth(&srp_spectrum(&a, &grid, 0).unwrap());
            let eb = argmax_azimuth(&srp_spectrum(&b, &grid, 0).unwrap());
            assert_eq!(wrap_deg(ea + 3.0), eb, "base {base}");
        }
    }
}
