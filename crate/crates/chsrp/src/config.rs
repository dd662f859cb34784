//! Experiment configuration: TOML file keys, defaults and resolution
//! into the runtime types the harness consumes.
//!
//! Every key is optional in the file and every CLI flag overrides the
//! file value. Defaults follow the optimized operating point: max order
//! 3, band [2000, 4000] Hz, 10-frame averaging, 3-degree grid.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterMethod;
use crate::geometry::{ArrayGeometry, Ring, DEFAULT_SOUND_SPEED};
use crate::pipeline::{FrameConfig, WindowKind};
use crate::simulator::{self, SceneSpec};

/// Geometry selection in a config file: a named preset or custom rings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingSpec {
    pub radius_m: f64,
    pub n_mics: usize,
    #[serde(default)]
    pub offset_deg: f64,
}

/// Raw, file-shaped experiment configuration. All fields optional;
/// [`ExperimentConfig::resolve`] applies defaults and validates.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `uca_s`, `uca_l` or `ucca`; ignored when `rings` is present.
    pub geometry: Option<String>,
    /// Custom geometry, outermost ring first.
    pub rings: Option<Vec<RingSpec>>,
    pub sound_speed_mps: Option<f64>,
    pub max_order: Option<usize>,
    /// `[f0, f1]` in Hz.
    pub band_hz: Option<[f64; 2]>,
    /// `inverse`, `tikhonov` or `minnorm`.
    pub filter: Option<String>,
    pub tikhonov_alpha: Option<f64>,
    pub grid_step_deg: Option<f64>,
    /// Spectra averaged per emitted estimate; 1 disables averaging.
    pub average_window: Option<usize>,
    /// Scene preset name or path to a scene TOML file.
    pub scene: Option<String>,
    pub n_frames: Option<usize>,
    pub seed: Option<u64>,
    /// Per-channel SNR in dB; `inf` disables the noise floor.
    pub snr_db: Option<f64>,
    pub sample_rate_hz: Option<f64>,
    pub frame_len: Option<usize>,
    pub window: Option<WindowKind>,
    /// Success tolerance for reports, degrees.
    pub success_tol_deg: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    /// Apply defaults, validate, and produce the runtime configuration.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let geometry = match (&self.rings, &self.geometry) {
            (Some(rings), _) => {
                let rings: Vec<Ring> = rings
                    .iter()
                    .map(|r| Ring::new(r.radius_m, r.n_mics, r.offset_deg.to_radians()))
                    .collect::<Result<_>>()?;
                ArrayGeometry::new(rings, self.sound_speed_mps.unwrap_or(DEFAULT_SOUND_SPEED))?
            }
            (None, Some(name)) => ArrayGeometry::preset(name)?,
            (None, None) => ArrayGeometry::ucca(),
        };

        let l_max = self.max_order.unwrap_or(3);
        if l_max > geometry.max_order() {
            return Err(Error::OrderLimit {
                n_mics: geometry
                    .rings()
                    .iter()
                    .map(|r| r.n_mics)
                    .min()
                    .unwrap_or(0),
                l_max,
            });
        }

        let band = self.band_hz.unwrap_or([2000.0, 4000.0]);
        let frame = FrameConfig::new(
            self.sample_rate_hz.unwrap_or(16_000.0),
            self.frame_len.unwrap_or(512),
            self.window.unwrap_or_default(),
            (band[0], band[1]),
        )?;

        let alpha = self.tikhonov_alpha.unwrap_or(1e-2);
        let filter = match self.filter.as_deref() {
            None | Some("minnorm") => FilterMethod::MinNorm,
            Some("inverse") => FilterMethod::Inverse,
            Some("tikhonov") => FilterMethod::Tikhonov { alpha },
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown filter method `{other}` (expected inverse, tikhonov or minnorm)"
                )))
            }
        };
        if matches!(filter, FilterMethod::Inverse | FilterMethod::Tikhonov { .. })
            && geometry.n_rings() != 1
        {
            return Err(Error::Config(format!(
                "{} filters need a single-ring geometry; use minnorm for {} rings",
                filter.name(),
                geometry.n_rings()
            )));
        }

        let scene_ref = self.scene.as_deref().unwrap_or("near_source");
        let mut scene = load_scene(scene_ref)?;
        if let Some(snr) = self.snr_db {
            scene.snr_db = snr;
        }
        if let Some(seed) = self.seed {
            scene.seed = seed;
        }
        let n_frames = self.n_frames.unwrap_or(1024);
        if n_frames == 0 {
            return Err(Error::Config("n_frames must be >= 1".into()));
        }
        // Cover exactly the requested frames.
        scene.duration_s = n_frames as f64 * frame.frame_duration_s();

        let average_window = self.average_window.unwrap_or(10);
        if average_window == 0 {
            return Err(Error::Config("average_window must be >= 1".into()));
        }
        if n_frames < average_window {
            return Err(Error::Config(format!(
                "n_frames = {n_frames} never fills the {average_window}-frame averaging window"
            )));
        }

        Ok(ResolvedConfig {
            label: self.label(),
            geometry,
            l_max,
            frame,
            filter,
            grid_step_deg: self.grid_step_deg.unwrap_or(3.0),
            average_window,
            scene,
            scene_name: scene_ref.to_string(),
            n_frames,
            success_tol_deg: self.success_tol_deg.unwrap_or(3.0),
        })
    }

    fn label(&self) -> String {
        let geom = if self.rings.is_some() {
            "custom".to_string()
        } else {
            self.geometry.clone().unwrap_or_else(|| "ucca".into())
        };
        let band = self.band_hz.unwrap_or([2000.0, 4000.0]);
        format!(
            "{}/L{}/[{:.0},{:.0}]Hz/{}",
            geom,
            self.max_order.unwrap_or(3),
            band[0],
            band[1],
            self.filter.as_deref().unwrap_or("minnorm"),
        )
    }
}

/// Load a scene preset by name, or a scene TOML file by path.
pub fn load_scene(name_or_path: &str) -> Result<SceneSpec> {
    if let Ok(scene) = simulator::preset(name_or_path) {
        return Ok(scene);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let scene: SceneSpec =
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        scene.validate()?;
        return Ok(scene);
    }
    Err(Error::Config(format!(
        "`{name_or_path}` is neither a scene preset nor a readable scene file"
    )))
}

/// Fully validated runtime configuration.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub label: String,
    pub geometry: ArrayGeometry,
    pub l_max: usize,
    pub frame: FrameConfig,
    pub filter: FilterMethod,
    pub grid_step_deg: f64,
    pub average_window: usize,
    pub scene: SceneSpec,
    pub scene_name: String,
    pub n_frames: usize,
    pub success_tol_deg: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_optimized_setting() {
        let cfg = ExperimentConfig::default().resolve().unwrap();
        assert_eq!(cfg.l_max, 3);
        assert_eq!(cfg.frame.band, (2000.0, 4000.0));
        assert_eq!(cfg.average_window, 10);
        assert_eq!(cfg.grid_step_deg, 3.0);
        assert_eq!(cfg.geometry.n_rings(), 2);
        assert!(matches!(cfg.filter, FilterMethod::MinNorm));
        assert_eq!(cfg.success_tol_deg, 3.0);
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        let text = r#"
            geometry = "uca_l"
            max_order = 2
            band_hz = [1000.0, 2000.0]
            filter = "tikhonov"
            tikhonov_alpha = 0.05
            average_window = 1
            scene = "far_source_reflective"
            n_frames = 128
            seed = 9
            snr_db = 20.0
        "#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        let resolved = cfg.resolve().unwrap();
        assert_eq!(resolved.l_max, 2);
        assert_eq!(resolved.geometry.n_rings(), 1);
        assert!(matches!(
            resolved.filter,
            FilterMethod::Tikhonov { alpha } if (alpha - 0.05).abs() < 1e-15
        ));
        assert_eq!(resolved.scene.snr_db, 20.0);
        assert_eq!(resolved.scene.seed, 9);
        assert_eq!(resolved.scene.sources[0].azimuth_deg, 240.0);
        // Duration covers exactly n_frames.
        let want = 128.0 * 512.0 / 16_000.0;
        assert!((resolved.scene.duration_s - want).abs() < 1e-12);
    }

    #[test]
    fn custom_rings_win_over_preset_name() {
        let text = r#"
            geometry = "uca_s"
            rings = [
                { radius_m = 0.06, n_mics = 9 },
                { radius_m = 0.04, n_mics = 7, offset_deg = 10.0 },
            ]
            sound_speed_mps = 340.0
        "#;
        let resolved = ExperimentConfig::from_toml_str(text).unwrap().resolve().unwrap();
        assert_eq!(resolved.geometry.n_rings(), 2);
        assert_eq!(resolved.geometry.sound_speed(), 340.0);
        let offset = resolved.geometry.rings()[1].angular_offset;
        assert!((offset - 10f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn order_beyond_geometry_rejected() {
        let text = "geometry = \"ucca\"\nmax_order = 4\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap().resolve();
        assert!(matches!(err, Err(Error::OrderLimit { n_mics: 7, l_max: 4 })));
    }

    #[test]
    fn single_ring_filters_rejected_on_ucca() {
        let text = "geometry = \"ucca\"\nfilter = \"inverse\"\n";
        assert!(ExperimentConfig::from_toml_str(text).unwrap().resolve().is_err());
        let text = "geometry = \"uca_s\"\nfilter = \"inverse\"\n";
        assert!(ExperimentConfig::from_toml_str(text).unwrap().resolve().is_ok());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml_str("no_such_key = 1\n").is_err());
    }

    #[test]
    fn infinite_snr_parses() {
        let cfg = ExperimentConfig::from_toml_str("snr_db = inf\n").unwrap();
        let resolved = cfg.resolve().unwrap();
        assert_eq!(resolved.scene.snr_db, f64::INFINITY);
    }

    #[test]
    fn window_longer_than_run_rejected() {
        let cfg = ExperimentConfig::from_toml_str("n_frames = 5\naverage_window = 10\n").unwrap();
        assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
    }
}
