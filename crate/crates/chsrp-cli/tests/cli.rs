//! End-to-end checks of the CLI surface: subcommands, CSV shapes, exit
//! codes and the config-file/flag override contract.

use std::path::Path;
use std::process::Command;

fn chsrp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chsrp"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn simulate_then_localize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("scene.wav");
    let spectra = dir.path().join("spectra.csv");
    let estimates = dir.path().join("estimates.csv");

    let out = chsrp()
        .args(["simulate", "--scene", "near_source", "--n-frames", "64"])
        .args(["--seed", "7", "--snr-db", "20", "--out"])
        .arg(&wav)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(wav.exists());

    let out = chsrp()
        .args(["localize", "--in"])
        .arg(&wav)
        .args(["--out"])
        .arg(&spectra)
        .args(["--estimates"])
        .arg(&estimates)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let spec_text = read(&spectra);
    let mut lines = spec_text.lines();
    assert_eq!(lines.next().unwrap(), "frame_index,angle_deg,power");
    // 64 frames / window 10 = 6 estimates x 120 angles.
    assert_eq!(spec_text.lines().count() - 1, 6 * 120);

    let est_text = read(&estimates);
    let mut est_lines = est_text.lines();
    assert_eq!(
        est_lines.next().unwrap(),
        "frame_index,time_s,azimuth_deg,peak_power"
    );
    let first: Vec<&str> = est_lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "9");
    assert_eq!(first[1], "0.3200");
    assert_eq!(first[2], "120"); // clean 20 dB scene localizes exactly
}

#[test]
fn design_filters_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("filters.csv");
    let out = chsrp()
        .args(["design-filters", "--geometry", "ucca", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = read(&csv);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,order,freq_hz,ring,re,im,recip_mag"
    );
    // 7 orders x 65 bins x 2 rings.
    assert_eq!(text.lines().count() - 1, 7 * 65 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("minnorm,-3,2000,0,"));
}

#[test]
fn zeros_lists_first_j0_zero() {
    let out = chsrp()
        .args(["zeros", "--geometry", "uca_s", "--band", "1000:4000"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().next().unwrap().contains("ring,radius_m,order,kr_zero,freq_hz"));
    // J_0's first zero for r = 4 cm at c = 343 m/s sits near 3282 Hz.
    assert!(text.contains("3281.99"), "missing J_0 zero line:\n{text}");
}

#[test]
fn bench_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = chsrp()
        .args(["bench", "--geometry", "uca_l", "--filter", "tikhonov"])
        .args(["--n-frames", "50", "--seed", "5", "--snr-db", "10", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&csv);
    assert!(text.starts_with("label,scene,snr_db,seed,n_frames,n_estimates"));
    assert!(text.contains(",ok"));
}

#[test]
fn config_file_plus_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("experiment.toml");
    std::fs::write(
        &cfg,
        "geometry = \"uca_l\"\nfilter = \"tikhonov\"\nn_frames = 30\nsnr_db = inf\nseed = 2\n",
    )
    .unwrap();
    let report = dir.path().join("report.csv");
    // Flag overrides the file's geometry; tikhonov stays from the file.
    let out = chsrp()
        .args(["bench", "--config"])
        .arg(&cfg)
        .args(["--geometry", "uca_s", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read(&report).contains("uca_s/L3"));
}

#[test]
fn exit_codes() {
    // Config problems exit 1.
    let dir = tempfile::tempdir().unwrap();
    let out = chsrp()
        .args(["bench", "--geometry", "ucca", "--max-order", "4", "--out"])
        .arg(dir.path().join("r.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "order-limit should exit 1");

    let out = chsrp()
        .args(["zeros", "--geometry", "seven_sided_ring"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "bad preset should exit 1");

    // Runtime problems exit 2.
    let out = chsrp()
        .args(["localize", "--in", "/nonexistent/audio.wav", "--out"])
        .arg(dir.path().join("s.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "missing input should exit 2");

    // Usage problems exit 1; help exits 0.
    let out = chsrp().args(["bench"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "missing --out should exit 1");
    let out = chsrp().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn scene_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene.toml");
    std::fs::write(
        &scene,
        r#"
duration_s = 1.0
seed = 11
snr_db = inf

[[sources]]
azimuth_deg = 33.0
signal = "white_noise"
level_db = 0.0

[[sources.reflections]]
azimuth_deg = 200.0
delay_s = 0.01
gain = 0.4
"#,
    )
    .unwrap();
    let wav = dir.path().join("custom.wav");
    let out = chsrp()
        .args(["simulate", "--scene"])
        .arg(&scene)
        .args(["--n-frames", "32", "--out"])
        .arg(&wav)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(wav.exists());
}
