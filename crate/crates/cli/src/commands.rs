//! One function per subcommand. Every command follows the same shape:
//! resolve the config into core-library calls, compute everything, then
//! write the artifacts. Nothing is written until the computation has
//! succeeded, so a failing run leaves no partial tables.

use std::fs;

use serde_json::{Map, Value};

use crate::config::Config;
use crate::output::{fmt_f64, sidecar, OutDir};
use crate::CliError;
use quenchlab_core::dynamics::{
    fid_series, geometric_phase, rate_series, ThermalState, TimeGrid,
};
use quenchlab_core::fisher::{crossing_report, find_fisher_zeros, Region};
use quenchlab_core::membrane::{mode_table, MembraneParams};
use quenchlab_core::scaling::{
    fit_scaling, sample_delta, short_time_crossover, size_scaling, Side,
};
use quenchlab_core::spectrum::spectral_density;
use quenchlab_core::ModeSpectrum;

// ---------------------------------------------------------------------------
// Config vocabulary.
// ---------------------------------------------------------------------------

const SPECTRUM_KEYS: &[&str] = &[
    "kind",
    "n_modes",
    "tau0",
    "alpha",
    "coupling_scale",
    "omega0",
    "beta",
    "path",
    "density_bins",
];
const MEMBRANE_KEYS: &[&str] = &[
    "radius",
    "fundamental_hz",
    "n_modes",
    "thickness",
    "young_modulus",
    "density_2d",
    "strain",
    "gradient",
    "g_factor",
];
const GRID_KEYS: &[&str] = &["start", "end", "points"];
const THERMAL_KEYS: &[&str] = &["n_th", "kelvin"];
const FISHER_KEYS: &[&str] = &[
    "re_min",
    "re_max",
    "im_min",
    "im_max",
    "nx",
    "ny",
    "axis_tolerance",
];
const SCALING_KEYS: &[&str] = &[
    "mode",
    "t_c",
    "window_lo",
    "window_hi",
    "n_samples",
    "side",
    "sizes",
    "tau",
    "t_c_index",
    "alpha",
];

/// Reject unknown sections and keys for the given subcommand. The
/// `[membrane]` section is in the vocabulary only when something in the run
/// actually reads it.
pub fn ensure_known(sub: &str, cfg: &Config) -> Result<(), CliError> {
    let mut allowed: Vec<(&str, &[&str])> = Vec::new();
    if sub != "membrane" {
        allowed.push(("spectrum", SPECTRUM_KEYS));
    }
    if sub == "membrane" || cfg.opt_str("spectrum", "kind") == Some("membrane") {
        allowed.push(("membrane", MEMBRANE_KEYS));
    }
    match sub {
        "rate" => {
            allowed.push(("grid", GRID_KEYS));
            allowed.push(("thermal", THERMAL_KEYS));
            allowed.push(("rate", &["derivatives", "initial_coherence"]));
        }
        "fid" => {
            allowed.push(("grid", GRID_KEYS));
            allowed.push(("thermal", THERMAL_KEYS));
            allowed.push(("fid", &["initial_coherence"]));
        }
        "geomphase" => {
            allowed.push(("grid", GRID_KEYS));
            allowed.push(("geomphase", &["include_linear"]));
        }
        "fisher" => allowed.push(("fisher", FISHER_KEYS)),
        "scaling" => {
            allowed.push(("scaling", SCALING_KEYS));
            allowed.push(("thermal", THERMAL_KEYS));
        }
        _ => {}
    }
    cfg.ensure_known(&allowed).map_err(CliError::from)
}

// ---------------------------------------------------------------------------
// Shared loaders.
// ---------------------------------------------------------------------------

fn load_spectrum(cfg: &Config) -> Result<ModeSpectrum, CliError> {
    let kind = cfg.get_str("spectrum", "kind")?;
    match kind {
        "comb" => {
            let n = cfg.get_usize("spectrum", "n_modes")?;
            let tau0 = cfg.opt_f64("spectrum", "tau0")?.unwrap_or(1.0);
            let alpha = cfg.opt_f64("spectrum", "alpha")?.unwrap_or(0.0);
            let scale = cfg.opt_f64("spectrum", "coupling_scale")?.unwrap_or(1.0);
            Ok(ModeSpectrum::comb(n, tau0, alpha, scale)?)
        }
        "powerlaw" => {
            let n = cfg.get_usize("spectrum", "n_modes")?;
            let omega0 = cfg.opt_f64("spectrum", "omega0")?.unwrap_or(1.0);
            let beta = cfg.opt_f64("spectrum", "beta")?.unwrap_or(1.0);
            let alpha = cfg.opt_f64("spectrum", "alpha")?.unwrap_or(0.0);
            let scale = cfg.opt_f64("spectrum", "coupling_scale")?.unwrap_or(1.0);
            Ok(ModeSpectrum::power_law(n, omega0, beta, alpha, scale)?)
        }
        "membrane" => {
            let params = membrane_params(cfg)?;
            let n = cfg.get_usize("membrane", "n_modes")?;
            let table = mode_table(&params, n)?;
            Ok(ModeSpectrum::from_membrane(&table)?)
        }
        "file" => {
            let path = cfg.get_path("spectrum", "path")?;
            let text = fs::read_to_string(&path).map_err(|e| {
                CliError::Config(format!("spectrum file {}: {e}", path.display()))
            })?;
            let s: ModeSpectrum = serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!("spectrum file {}: {e}", path.display()))
            })?;
            Ok(s.checked()?)
        }
        other => Err(CliError::Config(format!(
            "[spectrum] kind must be comb, powerlaw, membrane, or file; got {other:?}"
        ))),
    }
}

/// Membrane parameters: the stock material with either the radius given or
/// the radius solved from a target fundamental, plus per-field overrides.
fn membrane_params(cfg: &Config) -> Result<MembraneParams, CliError> {
    let radius = cfg.opt_f64("membrane", "radius")?;
    let fundamental = cfg.opt_f64("membrane", "fundamental_hz")?;
    let mut p = match (radius, fundamental) {
        (Some(r), None) => MembraneParams::hbn(r),
        (None, Some(f)) => MembraneParams::hbn_with_fundamental(f)?,
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "[membrane] radius and fundamental_hz are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config(
                "[membrane] needs either radius or fundamental_hz".into(),
            ))
        }
    };
    for (key, field) in [
        ("thickness", &mut p.thickness as &mut f64),
        ("young_modulus", &mut p.young_modulus),
        ("density_2d", &mut p.density_2d),
        ("strain", &mut p.strain),
        ("gradient", &mut p.gradient),
        ("g_factor", &mut p.g_factor),
    ] {
        if let Some(v) = cfg.opt_f64("membrane", key)? {
            *field = v;
        }
    }
    Ok(p)
}

fn load_grid(cfg: &Config) -> Result<TimeGrid, CliError> {
    let start = cfg.opt_f64("grid", "start")?.unwrap_or(0.0);
    let end = cfg.get_f64("grid", "end")?;
    let points = cfg.get_usize("grid", "points")?;
    Ok(TimeGrid::new(start, end, points)?)
}

/// Optional thermal state: `n_th` pins the occupation of the fundamental
/// mode, `kelvin` pins the temperature directly. Giving both is an error.
fn load_thermal(cfg: &Config, spectrum: &ModeSpectrum) -> Result<Option<ThermalState>, CliError> {
    let n_th = cfg.opt_f64("thermal", "n_th")?;
    let kelvin = cfg.opt_f64("thermal", "kelvin")?;
    match (n_th, kelvin) {
        (None, None) => Ok(None),
        (Some(n), None) => Ok(Some(ThermalState::from_fundamental_occupation(
            spectrum.frequencies[0],
            n,
        )?)),
        (None, Some(k)) => Ok(Some(ThermalState::from_temperature_si(k)?)),
        (Some(_), Some(_)) => Err(CliError::Config(
            "[thermal] n_th and kelvin are mutually exclusive".into(),
        )),
    }
}

fn load_side(cfg: &Config) -> Result<Side, CliError> {
    match cfg.opt_str("scaling", "side").unwrap_or("above") {
        "above" => Ok(Side::Above),
        "below" => Ok(Side::Below),
        "both" => Ok(Side::Both),
        other => Err(CliError::Config(format!(
            "[scaling] side must be above, below, or both; got {other:?}"
        ))),
    }
}

fn initial_coherence(cfg: &Config, section: &str) -> Result<f64, CliError> {
    Ok(cfg.opt_f64(section, "initial_coherence")?.unwrap_or(0.5))
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

pub fn rate(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let grid = load_grid(cfg)?;
    let thermal = load_thermal(cfg, &s)?;
    let derivatives = cfg.opt_bool("rate", "derivatives")?.unwrap_or(true);
    let c0 = initial_coherence(cfg, "rate")?;
    let series = rate_series(&s, &grid, thermal.as_ref(), derivatives)?;

    let coherence: Option<Vec<f64>> = thermal
        .as_ref()
        .map(|_| series.gamma.iter().map(|&g| c0 * (-g).exp()).collect());
    let mut header = String::from("t,gamma");
    if derivatives {
        header.push_str(",d1,d2");
    }
    if coherence.is_some() {
        header.push_str(",coherence");
    }
    let rows = (0..series.times.len()).map(|i| {
        let mut row = format!("{},{}", fmt_f64(series.times[i]), fmt_f64(series.gamma[i]));
        if let (Some(d1), Some(d2)) = (&series.d1, &series.d2) {
            row.push_str(&format!(",{},{}", fmt_f64(d1[i]), fmt_f64(d2[i])));
        }
        if let Some(c) = &coherence {
            row.push_str(&format!(",{}", fmt_f64(c[i])));
        }
        row
    });
    out.write_csv("rate.csv", "rate", hash, &header, rows)?;

    let mut extra = Map::new();
    extra.insert("derivatives".into(), Value::from(derivatives));
    if let Some(tag) = series.temperature_tag {
        extra.insert("temperature_tag".into(), Value::from(tag));
        extra.insert("initial_coherence".into(), Value::from(c0));
    }
    out.write_json("rate.json", &sidecar("rate", hash, cfg, Some(&s), extra))
}

pub fn fid(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let grid = load_grid(cfg)?;
    let thermal = load_thermal(cfg, &s)?.unwrap_or_else(ThermalState::zero);
    let c0 = initial_coherence(cfg, "fid")?;
    let series = fid_series(&s, &grid, &thermal, c0)?;

    let rows = (0..series.rate.times.len()).map(|i| {
        format!(
            "{},{},{}",
            fmt_f64(series.rate.times[i]),
            fmt_f64(series.rate.gamma[i]),
            fmt_f64(series.coherence[i])
        )
    });
    out.write_csv("fid.csv", "fid", hash, "t,gamma,coherence", rows)?;

    let mut extra = Map::new();
    extra.insert("initial_coherence".into(), Value::from(c0));
    if let Some(tag) = series.rate.temperature_tag {
        extra.insert("temperature_tag".into(), Value::from(tag));
    }
    out.write_json("fid.json", &sidecar("fid", hash, cfg, Some(&s), extra))
}

pub fn geomphase(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let grid = load_grid(cfg)?;
    let include_linear = cfg.opt_bool("geomphase", "include_linear")?.unwrap_or(false);
    let times = grid.times();
    let phases: Vec<f64> = times
        .iter()
        .map(|&t| geometric_phase(&s, t, include_linear))
        .collect();

    let rows = times
        .iter()
        .zip(&phases)
        .map(|(&t, &p)| format!("{},{}", fmt_f64(t), fmt_f64(p)));
    out.write_csv("geomphase.csv", "geomphase", hash, "t,phi_g", rows)?;

    let mut extra = Map::new();
    extra.insert("include_linear".into(), Value::from(include_linear));
    out.write_json(
        "geomphase.json",
        &sidecar("geomphase", hash, cfg, Some(&s), extra),
    )
}

pub fn fisher(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let region = Region::new(
        cfg.get_f64("fisher", "re_min")?,
        cfg.get_f64("fisher", "re_max")?,
        cfg.get_f64("fisher", "im_min")?,
        cfg.get_f64("fisher", "im_max")?,
    )?;
    let nx = cfg.opt_usize("fisher", "nx")?.unwrap_or(400);
    let ny = cfg.opt_usize("fisher", "ny")?.unwrap_or(400);
    let tolerance = cfg.opt_f64("fisher", "axis_tolerance")?.unwrap_or(1e-6);

    let zeros = find_fisher_zeros(&s, &region, nx, ny)?;
    let crossings = crossing_report(&zeros, tolerance)?;

    let zero_rows = zeros.iter().map(|z| {
        format!(
            "{},{},{},{},{}",
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(z.residual),
            z.branch,
            z.iterations
        )
    });
    out.write_csv(
        "fisher_zeros.csv",
        "fisher",
        hash,
        "re_z,im_z,residual,branch,iterations",
        zero_rows,
    )?;

    let crossing_rows = crossings.iter().map(|c| {
        format!("{},{},{}", c.branch, fmt_f64(c.t_crossing), fmt_f64(c.im_z))
    });
    out.write_csv(
        "fisher_crossings.csv",
        "fisher",
        hash,
        "branch,t_crossing,im_z",
        crossing_rows,
    )?;

    let mut extra = Map::new();
    extra.insert(
        "region".into(),
        serde_json::json!({
            "re_min": region.re_min, "re_max": region.re_max,
            "im_min": region.im_min, "im_max": region.im_max,
        }),
    );
    extra.insert("nx".into(), Value::from(nx));
    extra.insert("ny".into(), Value::from(ny));
    extra.insert("axis_tolerance".into(), Value::from(tolerance));
    extra.insert("zero_count".into(), Value::from(zeros.len()));
    extra.insert(
        "crossing_count".into(),
        Value::from(crossings.iter().filter(|c| c.is_crossing).count()),
    );
    out.write_json("fisher.json", &sidecar("fisher", hash, cfg, Some(&s), extra))
}

pub fn scaling(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    match cfg.opt_str("scaling", "mode").unwrap_or("fit") {
        "fit" => scaling_fit(cfg, hash, out),
        "crossover" => scaling_crossover(cfg, hash, out),
        "sizes" => scaling_sizes(cfg, hash, out),
        other => Err(CliError::Config(format!(
            "[scaling] mode must be fit, crossover, or sizes; got {other:?}"
        ))),
    }
}

fn scaling_window(cfg: &Config) -> Result<(f64, f64), CliError> {
    Ok((
        cfg.opt_f64("scaling", "window_lo")?.unwrap_or(1e-4),
        cfg.opt_f64("scaling", "window_hi")?.unwrap_or(1e-2),
    ))
}

fn scaling_fit(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let t_c = cfg.opt_f64("scaling", "t_c")?.unwrap_or(1.0);
    let window = scaling_window(cfg)?;
    let n_samples = cfg.opt_usize("scaling", "n_samples")?.unwrap_or(100);
    let side = load_side(cfg)?;
    let thermal = load_thermal(cfg, &s)?;

    let fit = fit_scaling(&s, t_c, window, n_samples, thermal.as_ref(), side)?;
    let (taus, deltas) = sample_delta(&s, t_c, window, n_samples, thermal.as_ref(), side)?;

    let rows = taus
        .iter()
        .zip(&deltas)
        .map(|(&tau, &d)| format!("{},{}", fmt_f64(tau), fmt_f64(d)));
    out.write_csv("scaling_sweep.csv", "scaling", hash, "tau,delta_gamma", rows)?;

    let mut extra = Map::new();
    extra.insert(
        "fit".into(),
        serde_json::to_value(&fit).map_err(|e| CliError::Io(e.to_string()))?,
    );
    if let Some(th) = &thermal {
        extra.insert(
            "temperature_tag".into(),
            Value::from(th.occupation(s.frequencies[0])),
        );
    }
    out.write_json("scaling.json", &sidecar("scaling", hash, cfg, Some(&s), extra))
}

fn scaling_crossover(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let t_c = cfg.opt_f64("scaling", "t_c")?.unwrap_or(1.0);
    let n_samples = cfg.opt_usize("scaling", "n_samples")?.unwrap_or(100);
    let (tau_break, inner_exponent) = short_time_crossover(&s, t_c)?;

    // Sweep spanning both sides of the break: from well inside the
    // quadratic core (1/100 of a mode spacing) out to a tenth of the period.
    let window = (1e-2 / s.size as f64, 1e-1);
    let (taus, deltas) = sample_delta(&s, t_c, window, n_samples, None, Side::Above)?;
    let rows = taus
        .iter()
        .zip(&deltas)
        .map(|(&tau, &d)| format!("{},{}", fmt_f64(tau), fmt_f64(d)));
    out.write_csv("scaling_sweep.csv", "scaling", hash, "tau,delta_gamma", rows)?;

    let mut extra = Map::new();
    extra.insert("t_c".into(), Value::from(t_c));
    extra.insert("tau_break".into(), Value::from(tau_break));
    extra.insert("inner_exponent".into(), Value::from(inner_exponent));
    out.write_json("scaling.json", &sidecar("scaling", hash, cfg, Some(&s), extra))
}

fn scaling_sizes(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let alpha = cfg.opt_f64("scaling", "alpha")?.unwrap_or(0.0);
    let sizes = cfg.get_usize_list("scaling", "sizes")?;
    let tau = cfg.get_f64("scaling", "tau")?;
    let t_c_index = cfg.opt_usize("scaling", "t_c_index")?.unwrap_or(1);

    let points = size_scaling(alpha, &sizes, tau, t_c_index)?;
    let rows = points
        .iter()
        .map(|&(l, g)| format!("{l},{},{}", fmt_f64(tau), fmt_f64(g)));
    out.write_csv("scaling_sizes.csv", "scaling", hash, "size,tau,gamma", rows)?;

    let mut extra = Map::new();
    extra.insert("alpha".into(), Value::from(alpha));
    extra.insert("tau".into(), Value::from(tau));
    extra.insert("t_c_index".into(), Value::from(t_c_index));
    out.write_json("scaling.json", &sidecar("scaling", hash, cfg, None, extra))
}

pub fn membrane(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let params = membrane_params(cfg)?;
    let n = cfg.get_usize("membrane", "n_modes")?;
    let table = mode_table(&params, n)?;

    let rows = (0..table.zeta.len()).map(|i| {
        format!(
            "{},{},{},{},{},{}",
            i + 1,
            fmt_f64(table.zeta[i]),
            fmt_f64(table.omega[i]),
            fmt_f64(table.mass[i]),
            fmt_f64(table.xzpf[i]),
            fmt_f64(table.coupling[i])
        )
    });
    out.write_csv(
        "membrane.csv",
        "membrane",
        hash,
        "n,zeta,omega_rad_s,mass_kg,xzpf_m,lambda_rad_s",
        rows,
    )?;

    let mut extra = Map::new();
    extra.insert(
        "params".into(),
        serde_json::to_value(params).map_err(|e| CliError::Io(e.to_string()))?,
    );
    extra.insert("delta_rad_s".into(), Value::from(table.delta));
    out.write_json("membrane.json", &sidecar("membrane", hash, cfg, None, extra))
}

pub fn spectrum(cfg: &Config, hash: &str, out: &mut OutDir) -> Result<(), CliError> {
    let s = load_spectrum(cfg)?;
    let density = match cfg.opt_usize("spectrum", "density_bins")? {
        Some(bins) => Some(spectral_density(&s, bins)?),
        None => None,
    };
    // The canonical table itself, loadable back through kind = file.
    out.write_json_struct("spectrum.json", &s)?;
    if let Some(h) = density {
        let rows = (0..h.mass.len()).map(|i| {
            format!(
                "{},{},{}",
                fmt_f64(h.bin_edges[i]),
                fmt_f64(h.bin_edges[i + 1]),
                fmt_f64(h.mass[i])
            )
        });
        out.write_csv(
            "spectrum_density.csv",
            "spectrum",
            hash,
            "omega_lo,omega_hi,mass",
            rows,
        )?;
    }
    Ok(())
}
