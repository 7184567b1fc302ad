//! End-to-end runs of the binary: exit codes, artifact shapes, and the
//! byte-identity contract.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quenchlab"))
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("binary spawns")
}

fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Data lines of a CSV: everything after the `#` preamble and the header.
fn csv_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn header_line(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

const SMALL_COMB: &str = "[spectrum]\nkind = comb\nn_modes = 50\n\n[grid]\nend = 3.0\npoints = 3000\n";

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "run.cfg", SMALL_COMB);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        run_ok(&[
            "rate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(read(&a, "rate.csv"), read(&b, "rate.csv"));
    assert_eq!(read(&a, "rate.json"), read(&b, "rate.json"));

    // Manifests agree in everything but the measured wall time.
    let mut ma: serde_json::Value = serde_json::from_str(&read(&a, "manifest.json")).unwrap();
    let mut mb: serde_json::Value = serde_json::from_str(&read(&b, "manifest.json")).unwrap();
    ma["wall_time"] = serde_json::Value::Null;
    mb["wall_time"] = serde_json::Value::Null;
    assert_eq!(ma, mb);
    assert_eq!(ma["outputs"], serde_json::json!(["rate.csv", "rate.json"]));
}

#[test]
fn missing_config_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "rate",
        "--config",
        tmp.path().join("absent.cfg").to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists(), "no partial output on config failure");
}

#[test]
fn unknown_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "run.cfg",
        "[spectrum]\nkind = comb\nn_modes = 50\nbogus = 1\n\n[grid]\nend = 1.0\npoints = 10\n",
    );
    let out = run(&["rate", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bogus"), "stderr names the offender: {msg}");
}

#[test]
fn degenerate_fisher_region_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "run.cfg",
        "[spectrum]\nkind = comb\nn_modes = 50\n\n[fisher]\nre_min = 1.0\nre_max = 1.0\nim_min = -0.1\nim_max = 0.1\n",
    );
    let out = run(&["fisher", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_out_dir_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "run.cfg", SMALL_COMB);
    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "a file, not a directory").unwrap();
    let out = run(&[
        "rate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rate_grid_shape_and_thermal_coherence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cold.cfg", SMALL_COMB);
    let cold = tmp.path().join("cold");
    run_ok(&["rate", "--config", cfg.to_str().unwrap(), "--out", cold.to_str().unwrap()]);
    let cold_csv = read(&cold, "rate.csv");
    assert_eq!(header_line(&cold_csv), "t,gamma,d1,d2");
    let rows = csv_rows(&cold_csv);
    assert_eq!(rows.len(), 3000);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "0", "rate starts at exactly zero");

    let warm_cfg = write_cfg(
        tmp.path(),
        "warm.cfg",
        &format!("{SMALL_COMB}\n[thermal]\nn_th = 10\n"),
    );
    let warm = tmp.path().join("warm");
    run_ok(&["rate", "--config", warm_cfg.to_str().unwrap(), "--out", warm.to_str().unwrap()]);
    let warm_csv = read(&warm, "rate.csv");
    assert_eq!(header_line(&warm_csv), "t,gamma,d1,d2,coherence");

    // Thermal coherence never exceeds what the T = 0 rate would permit.
    for (cold_row, warm_row) in csv_rows(&cold_csv).iter().zip(csv_rows(&warm_csv)) {
        let g0: f64 = cold_row.split(',').nth(1).unwrap().parse().unwrap();
        let c: f64 = warm_row.split(',').nth(4).unwrap().parse().unwrap();
        assert!(c <= 0.5 * (-g0).exp() + 1e-15, "row {cold_row} vs {warm_row}");
    }
}

#[test]
fn fisher_artifacts_and_revival_crossing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "run.cfg",
        "[spectrum]\nkind = comb\nn_modes = 100\n\n[fisher]\nre_min = 0.8\nre_max = 1.2\nim_min = -0.05\nim_max = 0.05\nnx = 100\nny = 100\n",
    );
    run_ok(&["fisher", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);

    let zeros = read(tmp.path(), "fisher_zeros.csv");
    assert_eq!(header_line(&zeros), "re_z,im_z,residual,branch,iterations");
    assert!(!csv_rows(&zeros).is_empty());
    assert!(zeros.starts_with("# quenchlab fisher\n# config_hash = "));

    let crossings = read(tmp.path(), "fisher_crossings.csv");
    assert_eq!(header_line(&crossings), "branch,t_crossing,im_z");
    let revival = csv_rows(&crossings)
        .iter()
        .map(|r| r.split(',').collect::<Vec<_>>())
        .find(|f| f[0] == "2")
        .expect("branch 2 present");
    let t: f64 = revival[1].parse().unwrap();
    let im: f64 = revival[2].parse().unwrap();
    assert!((t - 1.0).abs() < 1e-6, "crossing at t = {t}");
    assert!(im.abs() < 1e-6, "on the axis, im = {im}");

    let sidecar: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "fisher.json")).unwrap();
    assert!(sidecar["zero_count"].as_u64().unwrap() > 0);
    assert!(sidecar["crossing_count"].as_u64().unwrap() >= 1);
}

#[test]
fn spectrum_round_trips_through_kind_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "emit.cfg",
        "[spectrum]\nkind = comb\nn_modes = 40\nalpha = -1.0\ndensity_bins = 8\n",
    );
    let emit = tmp.path().join("emit");
    run_ok(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", emit.to_str().unwrap()]);
    let density = read(&emit, "spectrum_density.csv");
    assert_eq!(header_line(&density), "omega_lo,omega_hi,mass");
    assert_eq!(csv_rows(&density).len(), 8);

    // Feed the emitted table back in as a file spectrum.
    let table = emit.join("spectrum.json");
    let reuse = write_cfg(
        tmp.path(),
        "reuse.cfg",
        &format!(
            "[spectrum]\nkind = file\npath = {}\n\n[grid]\nend = 1.0\npoints = 64\n",
            table.display()
        ),
    );
    let second = tmp.path().join("second");
    run_ok(&["rate", "--config", reuse.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    let csv = read(&second, "rate.csv");
    assert_eq!(csv_rows(&csv).len(), 64);

    let sidecar: serde_json::Value = serde_json::from_str(&read(&second, "rate.json")).unwrap();
    assert_eq!(sidecar["spectrum_meta"]["kind"], "Comb");
    assert_eq!(sidecar["spectrum_meta"]["size"], 40);
    assert_eq!(sidecar["spectrum_meta"]["alpha"], -1.0);
}

#[test]
fn membrane_table_and_fundamental_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "run.cfg",
        "[membrane]\nfundamental_hz = 2e7\nn_modes = 10\n",
    );
    run_ok(&["membrane", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    let csv = read(tmp.path(), "membrane.csv");
    assert_eq!(
        header_line(&csv),
        "n,zeta,omega_rad_s,mass_kg,xzpf_m,lambda_rad_s"
    );
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 10);
    let omegas: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(omegas.windows(2).all(|w| w[0] < w[1]));
    let target = 2.0 * std::f64::consts::PI * 2e7;
    assert!(
        (omegas[0] - target).abs() / target < 1e-6,
        "fundamental {} vs {target}",
        omegas[0]
    );
}

#[test]
fn geomphase_flag_is_part_of_the_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "run.cfg",
        "[spectrum]\nkind = comb\nn_modes = 30\n\n[grid]\nstart = 0.05\nend = 0.95\npoints = 40\n",
    );
    let plain = tmp.path().join("plain");
    let linear = tmp.path().join("linear");
    run_ok(&["geomphase", "--config", cfg.to_str().unwrap(), "--out", plain.to_str().unwrap()]);
    run_ok(&[
        "geomphase",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        linear.to_str().unwrap(),
        "--include-linear",
    ]);
    let a = read(&plain, "geomphase.csv");
    let b = read(&linear, "geomphase.csv");
    assert_eq!(header_line(&a), "t,phi_g");
    assert_ne!(csv_rows(&a), csv_rows(&b), "the winding term changes the data");

    let ja: serde_json::Value = serde_json::from_str(&read(&plain, "geomphase.json")).unwrap();
    let jb: serde_json::Value = serde_json::from_str(&read(&linear, "geomphase.json")).unwrap();
    assert_ne!(ja["config_hash"], jb["config_hash"], "the flag is hashed");
    assert_eq!(jb["include_linear"], true);
}

#[test]
fn scaling_fit_recovers_the_flat_comb_exponent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "run.cfg",
        "[spectrum]\nkind = comb\nn_modes = 10000\n\n[scaling]\nmode = fit\nt_c = 1.0\nwindow_lo = 1e-4\nwindow_hi = 1e-2\nn_samples = 60\n",
    );
    run_ok(&["scaling", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    let sweep = read(tmp.path(), "scaling_sweep.csv");
    assert_eq!(header_line(&sweep), "tau,delta_gamma");
    assert_eq!(csv_rows(&sweep).len(), 60);

    let sidecar: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "scaling.json")).unwrap();
    let xi = sidecar["fit"]["exponent"].as_f64().expect("power-law fit");
    assert!((xi - 1.0).abs() < 0.1, "xi = {xi}");
    assert_eq!(sidecar["fit"]["window"], serde_json::json!([1e-4, 1e-2]));
}
