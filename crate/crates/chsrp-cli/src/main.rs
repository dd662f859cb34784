//! Command-line frontend: scene synthesis, filter design, localization
//! of WAV files, experiment sweeps and Bessel-zero tables.
//!
//! Exit codes: 0 on success, 1 for configuration problems, 2 for runtime
//! failures.

// (order, bin, ring) CSV emission reads best as index loops.
#![allow(clippy::needless_range_loop)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chsrp::bench::{self, run_experiment, table1_grid};
use chsrp::bessel::bessel_zeros;
use chsrp::config::{ExperimentConfig, ResolvedConfig};
use chsrp::error::Error;
use chsrp::filters::{design, reciprocal_magnitude_curve};
use chsrp::pipeline::{run_two_stage, SpectralAnalyzer};
use chsrp::simulator::synth_time_domain;
use chsrp::srp::{Localizer, SteeringGrid};
use chsrp::wav;

#[derive(Parser)]
#[command(name = "chsrp", version, about = "Circular-harmonics SRP azimuth estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of the (optional) config file.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Config file (TOML). Flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Geometry preset: uca_s, uca_l or ucca.
    #[arg(long)]
    geometry: Option<String>,
    /// Maximum harmonic order L.
    #[arg(long)]
    max_order: Option<usize>,
    /// Frequency band as f0:f1 in Hz, e.g. 2000:4000.
    #[arg(long, value_parser = parse_band)]
    band: Option<(f64, f64)>,
    /// Filter method: inverse, tikhonov or minnorm.
    #[arg(long)]
    filter: Option<String>,
    /// Tikhonov regularization constant.
    #[arg(long)]
    alpha: Option<f64>,
    /// Azimuth grid step in degrees.
    #[arg(long)]
    grid_step: Option<f64>,
    /// Averaging window in frames (1 disables averaging).
    #[arg(long)]
    average_window: Option<usize>,
    /// Scene preset name or scene TOML path.
    #[arg(long)]
    scene: Option<String>,
    /// Number of frames to synthesize/process.
    #[arg(long)]
    n_frames: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-channel SNR in dB (inf disables noise).
    #[arg(long)]
    snr_db: Option<f64>,
}

impl Overrides {
    fn resolve(&self) -> Result<ResolvedConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if self.geometry.is_some() {
            cfg.geometry = self.geometry.clone();
            cfg.rings = None;
        }
        if self.max_order.is_some() {
            cfg.max_order = self.max_order;
        }
        if let Some((f0, f1)) = self.band {
            cfg.band_hz = Some([f0, f1]);
        }
        if self.filter.is_some() {
            cfg.filter = self.filter.clone();
        }
        if self.alpha.is_some() {
            cfg.tikhonov_alpha = self.alpha;
        }
        if self.grid_step.is_some() {
            cfg.grid_step_deg = self.grid_step;
        }
        if self.average_window.is_some() {
            cfg.average_window = self.average_window;
        }
        if self.scene.is_some() {
            cfg.scene = self.scene.clone();
        }
        if self.n_frames.is_some() {
            cfg.n_frames = self.n_frames;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.snr_db.is_some() {
            cfg.snr_db = self.snr_db;
        }
        cfg.resolve()
    }
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("band must look like f0:f1, got `{s}`"))?;
    let f0: f64 = a.trim().parse().map_err(|e| format!("bad f0: {e}"))?;
    let f1: f64 = b.trim().parse().map_err(|e| format!("bad f1: {e}"))?;
    Ok((f0, f1))
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a scene and export it as multichannel WAV.
    Simulate {
        #[command(flatten)]
        overrides: Overrides,
        /// Output WAV path (32-bit float).
        #[arg(long)]
        out: PathBuf,
    },
    /// Design compensating filters and emit them with the reciprocal
    /// magnitude curves as CSV.
    DesignFilters {
        #[command(flatten)]
        overrides: Overrides,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Localize a multichannel WAV and emit averaged spatial spectra (and
    /// optionally per-window azimuth estimates) as CSV.
    Localize {
        #[command(flatten)]
        overrides: Overrides,
        /// Input WAV (channel order = ring-major mic layout).
        #[arg(long = "in")]
        input: PathBuf,
        /// Spatial-spectra CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional estimates CSV path.
        #[arg(long)]
        estimates: Option<PathBuf>,
    },
    /// Run an experiment (or the 27-cell table1 sweep) and write a report.
    Bench {
        #[command(flatten)]
        overrides: Overrides,
        /// Run a named sweep instead of a single experiment.
        #[arg(long)]
        sweep: Option<String>,
        /// Report CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Also measure mean per-frame processing time over >= 1000
        /// frames and print it.
        #[arg(long)]
        latency: bool,
    },
    /// Print Bessel-zero frequencies per ring and order for a geometry.
    Zeros {
        #[command(flatten)]
        overrides: Overrides,
        /// Optional CSV output path (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum AppError {
    Config(String),
    Runtime(String),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::Geometry(_)
            | Error::FrameConfig(_)
            | Error::OrderLimit { .. }
            | Error::EmptyBand { .. } => AppError::Config(e.to_string()),
            other => AppError::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Simulate { overrides, out } => simulate(&overrides, &out),
        Command::DesignFilters { overrides, out } => design_filters(&overrides, &out),
        Command::Localize {
            overrides,
            input,
            out,
            estimates,
        } => localize(&overrides, &input, &out, estimates.as_deref()),
        Command::Bench {
            overrides,
            sweep,
            out,
            latency,
        } => run_bench(&overrides, sweep.as_deref(), &out, latency),
        Command::Zeros { overrides, out } => zeros(&overrides, out.as_deref()),
    }
}

fn simulate(overrides: &Overrides, out: &std::path::Path) -> Result<(), AppError> {
    let cfg = overrides.resolve()?;
    let clip = synth_time_domain(&cfg.scene, &cfg.geometry, &cfg.frame)
        .map_err(AppError::from)?;
    wav::write_wav(out, &clip).map_err(runtime)?;
    println!(
        "wrote {} ({} channels, {:.2} s at {} Hz, scene `{}`)",
        out.display(),
        clip.n_channels(),
        clip.duration_s(),
        clip.sample_rate(),
        cfg.scene_name,
    );
    Ok(())
}

fn design_filters(overrides: &Overrides, out: &std::path::Path) -> Result<(), AppError> {
    let cfg = overrides.resolve()?;
    let analyzer = SpectralAnalyzer::new(cfg.frame.clone()).map_err(AppError::from)?;
    let bank =
        design(cfg.filter, &cfg.geometry, cfg.l_max, analyzer.bins()).map_err(AppError::from)?;
    let curves = reciprocal_magnitude_curve(&bank);
    let file = std::fs::File::create(out).map_err(|e| runtime(Error::Io(e)))?;
    let mut w = std::io::BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "method,order,freq_hz,ring,re,im,recip_mag")?;
        for (o, l) in bank.orders().enumerate() {
            for b in 0..bank.bins().len() {
                for ring in 0..bank.n_rings() {
                    let h = bank.get(ring, l, b);
                    writeln!(
                        w,
                        "{},{},{},{},{:.12e},{:.12e},{:.12e}",
                        bank.method().name(),
                        l,
                        bank.bins().freq_hz(b),
                        ring,
                        h.re,
                        h.im,
                        curves[o][b],
                    )?;
                }
            }
        }
        Ok(())
    })()
    .map_err(|e| runtime(Error::Io(e)))?;
    println!(
        "wrote {} ({} orders x {} bins x {} rings, method {})",
        out.display(),
        bank.n_orders(),
        bank.bins().len(),
        bank.n_rings(),
        bank.method().name(),
    );
    Ok(())
}

fn localize(
    overrides: &Overrides,
    input: &std::path::Path,
    out: &std::path::Path,
    estimates_path: Option<&std::path::Path>,
) -> Result<(), AppError> {
    let cfg = overrides.resolve()?;
    let clip = wav::read_wav(input).map_err(runtime)?;
    if clip.sample_rate() != cfg.frame.sample_rate {
        return Err(runtime(Error::SampleRateMismatch {
            got: clip.sample_rate(),
            want: cfg.frame.sample_rate,
        }));
    }
    let analyzer = SpectralAnalyzer::new(cfg.frame.clone()).map_err(AppError::from)?;
    let bank =
        design(cfg.filter, &cfg.geometry, cfg.l_max, analyzer.bins()).map_err(AppError::from)?;
    let grid = SteeringGrid::new(cfg.grid_step_deg, cfg.l_max).map_err(AppError::from)?;
    let mut localizer = Localizer::new(
        cfg.geometry.clone(),
        cfg.l_max,
        bank,
        grid,
        cfg.average_window,
    )
    .map_err(AppError::from)?;

    let spectra_file = std::fs::File::create(out).map_err(|e| runtime(Error::Io(e)))?;
    let mut spectra = std::io::BufWriter::new(spectra_file);
    let mut est_writer = match estimates_path {
        Some(p) => Some(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| runtime(Error::Io(e)))?,
        )),
        None => None,
    };
    writeln!(spectra, "frame_index,angle_deg,power").map_err(|e| runtime(Error::Io(e)))?;
    if let Some(w) = est_writer.as_mut() {
        writeln!(w, "frame_index,time_s,azimuth_deg,peak_power")
            .map_err(|e| runtime(Error::Io(e)))?;
    }

    let frame_s = cfg.frame.frame_duration_s();
    let mut n_estimates = 0usize;
    run_two_stage(&clip, &analyzer, |frame| {
        if let Some(est) = localizer.process_frame(&frame)? {
            for i in 0..est.spectrum.len() {
                writeln!(
                    spectra,
                    "{},{},{:.12e}",
                    est.frame_index,
                    est.spectrum.angle_deg(i),
                    est.spectrum.values()[i],
                )?;
            }
            if let Some(w) = est_writer.as_mut() {
                writeln!(
                    w,
                    "{},{:.4},{},{:.12e}",
                    est.frame_index,
                    (est.frame_index + 1) as f64 * frame_s,
                    est.azimuth_deg,
                    est.spectrum.peak(),
                )?;
            }
            n_estimates += 1;
        }
        Ok(())
    })
    .map_err(AppError::from)?;

    for warning in localizer.warnings() {
        eprintln!("warning: {warning}");
    }
    println!(
        "wrote {} ({} estimates, window {})",
        out.display(),
        n_estimates,
        cfg.average_window,
    );
    Ok(())
}

fn run_bench(
    overrides: &Overrides,
    sweep_name: Option<&str>,
    out: &std::path::Path,
    latency: bool,
) -> Result<(), AppError> {
    let base = match &overrides.config {
        Some(path) => ExperimentConfig::from_file(path).map_err(AppError::from)?,
        None => ExperimentConfig::default(),
    };
    let rows = match sweep_name {
        None => {
            let cfg = overrides.resolve()?;
            let label = cfg.label.clone();
            vec![(label, run_experiment(&cfg))]
        }
        Some("table1") => {
            let configs: Vec<ResolvedConfig> = table1_grid(&base)
                .iter()
                .map(|c| c.resolve())
                .collect::<Result<_, _>>()
                .map_err(AppError::from)?;
            bench::sweep(&configs)
        }
        Some(other) => {
            return Err(AppError::Config(format!(
                "unknown sweep `{other}` (expected table1)"
            )))
        }
    };
    bench::write_report_csv_file(out, &rows).map_err(AppError::from)?;
    for (label, result) in &rows {
        match result {
            Ok(r) => println!(
                "{label}: {} estimates, mean {}, std {:.3} deg, success {}",
                r.estimates_deg.len(),
                r.stats
                    .mean_deg
                    .map(|m| format!("{m:.1} deg"))
                    .unwrap_or_else(|| "undefined".into()),
                r.stats.std_deg,
                r.success_rate
                    .map(|s| format!("{s:.3}"))
                    .unwrap_or_else(|| "n/a".into()),
            ),
            Err(e) => println!("{label}: failed: {e}"),
        }
    }
    if latency {
        let cfg = overrides.resolve()?;
        let secs = bench::benchmark_latency(&cfg, 1000).map_err(AppError::from)?;
        let budget = cfg.frame.frame_duration_s();
        println!(
            "latency: {:.3} ms per frame (budget {:.1} ms, {})",
            secs * 1e3,
            budget * 1e3,
            if secs <= budget { "real-time" } else { "over budget" },
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn zeros(overrides: &Overrides, out: Option<&std::path::Path>) -> Result<(), AppError> {
    let cfg = overrides.resolve()?;
    let (f0, f1) = cfg.frame.band;
    let c = cfg.geometry.sound_speed();
    let mut lines = vec!["ring,radius_m,order,kr_zero,freq_hz".to_string()];
    for (p, ring) in cfg.geometry.rings().iter().enumerate() {
        let kr_max = 2.0 * std::f64::consts::PI * f1 * ring.radius_m / c;
        for l in 0..=cfg.l_max as i32 {
            for z in bessel_zeros(l, kr_max).map_err(AppError::from)? {
                let f = z * c / (2.0 * std::f64::consts::PI * ring.radius_m);
                if f >= f0 {
                    lines.push(format!("{p},{},{l},{z:.9},{f:.3}", ring.radius_m));
                }
            }
        }
    }
    let text = lines.join("\n") + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| runtime(Error::Io(e)))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn runtime(e: Error) -> AppError {
    AppError::Runtime(e.to_string())
}
