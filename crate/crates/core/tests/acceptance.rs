//! Release gate: every headline behavior of the library, checked at its
//! stated tolerance, one verdict line per entry. Run with `--nocapture` to
//! see the table on a green run; on a red run the harness prints it anyway.
//!
//! Entries that measure known physics disagreements are asserted at their
//! stated targets on purpose: a red line here means the measurement
//! disagrees with the target, and the detail string carries the measured
//! value so the disagreement is auditable, not hidden.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use quenchlab_core::dynamics::{
    decoherence_rate, geometric_phase, return_rate, return_rate_complex, ThermalState, TimeGrid,
};
use quenchlab_core::fisher::{crossing_report, find_fisher_zeros, refine_zero, Region};
use quenchlab_core::membrane::{anharmonicity_ratio, mode_table, MembraneParams};
use quenchlab_core::numerics::bessel_j0_zeros;
use quenchlab_core::scaling::{
    fit_models, fit_scaling, first_derivative_jump, short_time_crossover, size_scaling,
    transition_order, ScalingModel, Side, TransitionOrder,
};
use quenchlab_core::ModeSpectrum;

type Verdict = Result<String, String>;

fn comb(n: usize, alpha: f64) -> ModeSpectrum {
    ModeSpectrum::comb(n, 1.0, alpha, 1.0).expect("comb construction")
}

fn membrane(n: usize) -> ModeSpectrum {
    let table = mode_table(&MembraneParams::hbn(15e-6), n).expect("mode table");
    ModeSpectrum::from_membrane(&table).expect("membrane spectrum")
}

/// The large membrane spectrum is used by two entries; build it once.
fn big_membrane() -> &'static ModeSpectrum {
    static CELL: OnceLock<ModeSpectrum> = OnceLock::new();
    CELL.get_or_init(|| membrane(100_000))
}

// -------------------------------------------------------------------------
// 1-3: critical exponents of the comb families on the standard window.
// -------------------------------------------------------------------------

const WINDOW: (f64, f64) = (1e-4, 1e-2);
const SAMPLES: usize = 100; // 50 per decade over two decades

fn exponent_criterion(alpha: f64, target: f64, tol: f64) -> Verdict {
    let s = comb(1_000_000, alpha);
    let fit = fit_scaling(&s, 1.0, WINDOW, SAMPLES, None, Side::Above)
        .map_err(|e| format!("fit failed: {e}"))?;
    let xi = fit
        .exponent
        .ok_or_else(|| format!("log model won (r2 {:.6} vs {:.6})", fit.r2_log, fit.r2_power))?;
    let detail = format!("xi = {xi:.4} (target {target} +/- {tol}), r2 = {:.6}", fit.r2_power);
    if (xi - target).abs() <= tol {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c01() -> Verdict {
    exponent_criterion(0.0, 1.00, 0.05)
}

fn c02() -> Verdict {
    exponent_criterion(-1.0, 1.85, 0.10)
}

fn c03() -> Verdict {
    let s = comb(1_000_000, 1.0);
    let fit = fit_scaling(&s, 1.0, WINDOW, SAMPLES, None, Side::Above)
        .map_err(|e| format!("fit failed: {e}"))?;
    let detail = format!(
        "model {:?}, r2_log = {:.6}, r2_power = {:.6}",
        fit.model, fit.r2_log, fit.r2_power
    );
    if fit.model == ScalingModel::Logarithmic && fit.r2_log >= 0.99 && fit.r2_log > fit.r2_power {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 4: comb zeros touch the axis at every revival.
// -------------------------------------------------------------------------

fn c04() -> Verdict {
    let s = comb(1000, 0.0);
    // The revival roots sit exactly on the axis; the lowest off-axis string
    // stays above 1.3/N for this comb. A band of +/- 1/N therefore isolates
    // the axis roots, and they are still seeded reliably: straight above
    // each revival the real part of gamma turns negative (every mode's
    // cosh outruns its cos there), so the wall cells flag and the refiner
    // walks down that wall onto the double root.
    let band = 1.0 / s.size as f64;
    let mut zeros = Vec::new();
    for n in 1..=3 {
        let region = Region::new(n as f64 - 0.5, n as f64 + 0.5, -band, band)
            .map_err(|e| e.to_string())?;
        zeros.extend(find_fisher_zeros(&s, &region, 400, 400).map_err(|e| e.to_string())?);
    }
    // Independent residual re-check straight through the public evaluator.
    let bound = 1e-10 * s.weight_sum();
    for z in &zeros {
        let g = return_rate_complex(&s, Complex64::new(z.re, z.im) * s.period_hint)
            .map_err(|e| e.to_string())?;
        if g.norm() > bound {
            return Err(format!(
                "zero at ({}, {}) re-evaluates to |gamma| = {:e} > {bound:e}",
                z.re,
                z.im,
                g.norm()
            ));
        }
    }
    let crossings = crossing_report(&zeros, 1e-6).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut ok = true;
    for n in 1..=3i64 {
        match crossings.iter().find(|c| c.branch == 2 * n) {
            Some(c) => {
                let hit = c.is_crossing && (c.t_crossing - n as f64).abs() <= 1e-6;
                ok &= hit;
                details.push(format!("t={n}: |Im| = {:.1e} at Re = {:.9}", c.im_z, c.t_crossing));
            }
            None => {
                ok = false;
                details.push(format!("t={n}: no zero found"));
            }
        }
    }
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 5: zeros retreat from the axis as the coupling exponent drops.
// -------------------------------------------------------------------------

fn c05() -> Verdict {
    // Window between the first two revivals; the axis-touching double roots
    // at integer times are excluded so only the string zeros count. The
    // height covers the lowest string of all three combs (they bottom out
    // between 1.3/N and 3/N) without dragging in the dense field above,
    // which would multiply the seed count without moving the minimum.
    let region = Region::new(1.05, 1.95, 0.0, 0.004).map_err(|e| e.to_string())?;
    let mut mins = Vec::new();
    for alpha in [1.0, 0.0, -1.0] {
        let s = comb(1000, alpha);
        let zeros = find_fisher_zeros(&s, &region, 400, 200).map_err(|e| e.to_string())?;
        let m = zeros.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min);
        if !m.is_finite() {
            return Err(format!("no zeros found for alpha = {alpha}"));
        }
        mins.push(m);
    }
    let detail = format!(
        "min|Im z|: alpha=+1 {:.2e}, alpha=0 {:.2e}, alpha=-1 {:.2e}",
        mins[0], mins[1], mins[2]
    );
    if mins[0] < mins[1] && mins[1] < mins[2] {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 6: membrane near-crossing positions and their approach to the axis.
// -------------------------------------------------------------------------

/// Lowest zero string above the axis, mapped column by column: at each Re a
/// couple of seeds at string height are polished by the damped Newton
/// refiner and the lowest converged zero is kept. A full 2-D scan at
/// N = 10^4 would need cells finer than the fastest mode's oscillation; the
/// column map measures the same envelope at a fraction of the cost.
fn lowest_string(s: &ModeSpectrum, re_lo: f64, re_hi: f64, columns: usize) -> Vec<(f64, f64)> {
    let cap = 0.9 * s.max_admissible_im() / s.period_hint;
    let base = 1.0 / s.size as f64;
    let region = Region::new(re_lo, re_hi, 0.0, (16.0 * base).min(cap)).expect("region");
    (0..=columns)
        .into_par_iter()
        .filter_map(|i| {
            let re = re_lo + (re_hi - re_lo) * i as f64 / columns as f64;
            let mut best: Option<(f64, f64)> = None;
            for scale in [1.5, 4.0] {
                let seed = Complex64::new(re, (scale * base).min(cap));
                if let Ok(z) = refine_zero(s, seed, &region) {
                    if z.im.abs() > 0.0 && (best.is_none() || z.im.abs() < best.unwrap().1) {
                        best = Some((z.re, z.im.abs()));
                    }
                }
            }
            best
        })
        .collect()
}

fn c06() -> Verdict {
    let mut details = Vec::new();
    let mut global_mins = Vec::new();
    let mut positions_ok = [true, true];
    for n in [100usize, 1000, 10_000] {
        let s = membrane(n);
        // One band covering both half-period cells m = 1, 2; converged zeros
        // are bucketed by round(2 re) so a refinement that drifts across a
        // cell edge still lands in the branch it belongs to. Positions are
        // quoted in half-period units.
        let mut branch_min = [f64::INFINITY; 2];
        let mut branch_pos = [f64::NAN; 2];
        for (re, im) in lowest_string(&s, 0.26, 1.24, 700) {
            let m = (2.0 * re).round() as i64;
            if !(1..=2).contains(&m) {
                continue;
            }
            let b = (m - 1) as usize;
            if im < branch_min[b] {
                branch_min[b] = im;
                branch_pos[b] = 2.0 * re;
            }
        }
        for m in 0..2 {
            if (branch_pos[m] - (m as f64 + 1.0)).abs() > 0.02 {
                positions_ok[m] = false;
            }
        }
        global_mins.push(branch_min[0].min(branch_min[1]));
        details.push(format!(
            "N={n}: min|Im| at pos {:.4} and {:.4} (half-period units), depths {:.1e} / {:.1e}",
            branch_pos[0], branch_pos[1], branch_min[0], branch_min[1]
        ));
    }
    let decreasing = global_mins.windows(2).all(|w| w[1] < w[0]);
    details.push(format!(
        "global min|Im| by size: {:.2e} > {:.2e} > {:.2e} ({})",
        global_mins[0],
        global_mins[1],
        global_mins[2],
        if decreasing { "decreasing" } else { "NOT decreasing" }
    ));
    let detail = details.join("\n    ");
    if positions_ok[0] && positions_ok[1] && decreasing {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 7: membrane critical exponents at the full and half recurrence.
// -------------------------------------------------------------------------

fn membrane_exponent(s: &ModeSpectrum, t_c: f64) -> Result<(f64, f64), String> {
    let fit = fit_scaling(s, t_c, WINDOW, SAMPLES, None, Side::Above).map_err(|e| e.to_string())?;
    match fit.exponent {
        Some(xi) => Ok((xi, fit.r2_power)),
        None => Err(format!("log model won at t_c = {t_c}")),
    }
}

fn c07() -> Verdict {
    let s = big_membrane();
    let (xi_full, r2f) = membrane_exponent(s, 1.0)?;
    let (xi_half, r2h) = membrane_exponent(s, 0.5)?;
    let detail = format!(
        "Xi(full recurrence) = {xi_full:.4} (target 1.00 +/- 0.05, r2 {r2f:.4}); \
         Xi(half) = {xi_half:.4} (target 0.85 +/- 0.05, r2 {r2h:.4})"
    );
    if (xi_full - 1.00).abs() <= 0.05 && (xi_half - 0.85).abs() <= 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 8: the exponent survives finite temperature.
// -------------------------------------------------------------------------

fn c08() -> Verdict {
    let s = big_membrane();
    let omega0 = s.frequencies[0];
    let mut xis = vec![membrane_exponent(s, 1.0)?.0];
    let mut r2s = Vec::new();
    for n_th in [1.0, 10.0, 100.0] {
        let th = ThermalState::from_fundamental_occupation(omega0, n_th)
            .map_err(|e| e.to_string())?;
        let fit = fit_scaling(s, 1.0, WINDOW, SAMPLES, Some(&th), Side::Above)
            .map_err(|e| e.to_string())?;
        if fit.model != ScalingModel::PowerLaw {
            return Err(format!("log model won at n_th = {n_th}"));
        }
        xis.push(fit.exponent.expect("power-law fit has an exponent"));
        r2s.push(fit.r2_power);
    }
    let increasing = xis.windows(2).all(|w| w[1] > w[0]);
    let decreasing = xis.windows(2).all(|w| w[1] < w[0]);
    let r2_ok = r2s.iter().all(|&r| r >= 0.95);
    let detail = format!(
        "Xi drift 0 -> 1 -> 10 -> 100: {:.4} -> {:.4} -> {:.4} -> {:.4}; min r2 = {:.4}",
        xis[0],
        xis[1],
        xis[2],
        xis[3],
        r2s.iter().cloned().fold(f64::INFINITY, f64::min)
    );
    if (increasing || decreasing) && r2_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 9: transition-order ladder.
// -------------------------------------------------------------------------

fn c09() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for (alpha, want) in [(1.0, 0u8), (0.0, 1), (-1.0, 2)] {
        let got = transition_order(&comb(2000, alpha), 1.0).map_err(|e| e.to_string())?;
        ok &= got == TransitionOrder::Order(want);
        details.push(format!("comb alpha={alpha:+}: {got:?} (want Order({want}))"));
    }
    let s = membrane(10_000);
    for (t_c, want, label) in [(1.0, 1u8), (0.5, 2)].map(|(t, w)| (t, w, t)) {
        let got = transition_order(&s, t_c).map_err(|e| e.to_string())?;
        ok &= got == TransitionOrder::Order(want);
        details.push(format!("membrane t_c={label}: {got:?} (want Order({want}))"));
    }
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 10: the kink needs a strictly linear dispersion.
// -------------------------------------------------------------------------

fn c10() -> Verdict {
    let jump = |beta: f64| -> Result<f64, String> {
        let s = ModeSpectrum::power_law(1000, 1.0, beta, 0.0, 1.0).map_err(|e| e.to_string())?;
        let (intercept, _, _) = first_derivative_jump(&s, 1.0).map_err(|e| e.to_string())?;
        Ok(intercept.max(0.0))
    };
    let (j_low, j_lin, j_high) = (jump(0.9)?, jump(1.0)?, jump(1.1)?);
    let detail = format!(
        "derivative jump: beta=0.9 {:.3e}, beta=1 {:.3e}, beta=1.1 {:.3e}",
        j_low, j_lin, j_high
    );
    if j_lin >= 10.0 * j_low && j_lin >= 10.0 * j_high {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 11: rate grows linearly with bath size, then saturates.
// -------------------------------------------------------------------------

fn c11() -> Verdict {
    let tau = 1e-3;
    let linear: Vec<(usize, f64)> =
        size_scaling(0.0, &[100, 1000], tau, 1).map_err(|e| e.to_string())?;
    let slope = (linear[1].1 / linear[0].1).ln() / 10f64.ln();
    let flat: Vec<(usize, f64)> =
        size_scaling(0.0, &[10_000, 100_000], tau, 1).map_err(|e| e.to_string())?;
    let ratio = flat[1].1 / flat[0].1;
    let detail =
        format!("log-log slope over L=1e2..1e3: {slope:.4} (want 1 +/- 0.1); plateau ratio {ratio:.4}");
    if (slope - 1.0).abs() <= 0.1 && (ratio - 1.0).abs() <= 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 12: quadratic short-time regime below the finite-size floor.
// -------------------------------------------------------------------------

fn c12() -> Verdict {
    let s = comb(10_000, 0.0);
    let (tau_break, xi_inner) = short_time_crossover(&s, 1.0).map_err(|e| e.to_string())?;
    let detail = format!("inner exponent {xi_inner:.4} (want 2.0 +/- 0.1), break at tau = {tau_break:.2e}");
    if (xi_inner - 2.0).abs() <= 0.1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 13: anharmonicity constant, radius-independent under the strain rule.
// -------------------------------------------------------------------------

fn c13() -> Verdict {
    let zetas = bessel_j0_zeros(5).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for radius in [5e-6, 15e-6, 50e-6] {
        let p = MembraneParams::hbn(radius);
        for (n, occ) in [(1usize, 1.0), (1, 10.0), (5, 1.0), (5, 10.0)] {
            let got = anharmonicity_ratio(&p, n, occ).map_err(|e| e.to_string())?;
            let want = 4.69e-16 * zetas[n - 1] * occ * occ;
            worst = worst.max((got / want - 1.0).abs());
        }
    }
    // Radius independence, far tighter than the 2% on the constant itself.
    let a = anharmonicity_ratio(&MembraneParams::hbn(5e-6), 3, 2.0).map_err(|e| e.to_string())?;
    let b = anharmonicity_ratio(&MembraneParams::hbn(50e-6), 3, 2.0).map_err(|e| e.to_string())?;
    let drift = (a / b - 1.0).abs();
    let detail = format!("worst deviation {:.3}% (cap 2%), radius drift {drift:.1e}", 100.0 * worst);
    if worst <= 0.02 && drift <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// -------------------------------------------------------------------------
// 14: compact re-run of the cross-module invariants.
// -------------------------------------------------------------------------

fn c14() -> Verdict {
    // Conjugate closure of the zero list, exact as a multiset.
    let s = comb(100, 0.0);
    let region = Region::new(0.5, 1.5, -0.05, 0.05).map_err(|e| e.to_string())?;
    let zeros = find_fisher_zeros(&s, &region, 200, 200).map_err(|e| e.to_string())?;
    for z in &zeros {
        if !zeros.iter().any(|u| u.re == z.re && u.im == -z.im) {
            return Err(format!("zero ({}, {}) lacks its mirror", z.re, z.im));
        }
    }

    // Rate positivity, thermal dominance, and periodicity on a comb.
    let big = comb(500, 0.0);
    let th = ThermalState::from_fundamental_occupation(big.frequencies[0], 5.0)
        .map_err(|e| e.to_string())?;
    let tol = 1e-9 * big.weight_sum();
    for t in TimeGrid::new(0.0, 3.0, 601).map_err(|e| e.to_string())?.times() {
        let g = return_rate(&big, t);
        let gamma_thermal = decoherence_rate(&big, t, &th);
        if g < 0.0 {
            return Err(format!("gamma({t}) = {g} < 0"));
        }
        if gamma_thermal < g - 1e-12 * big.weight_sum() {
            return Err(format!("thermal rate below T=0 rate at t = {t}"));
        }
        if (return_rate(&big, t + 1.0) - g).abs() > tol {
            return Err(format!("periodicity broken at t = {t}"));
        }
    }

    // Bessel-zero spacing approaches pi from below at one part in 1e6.
    let zetas = bessel_j0_zeros(2000).map_err(|e| e.to_string())?;
    let gap = zetas[1999] - zetas[1998];
    if (gap - std::f64::consts::PI).abs() > 1e-6 {
        return Err(format!("high-order zero gap {gap} is not pi"));
    }

    // Synthetic exponent recovery at 1e-6.
    let taus: Vec<f64> = (0..50).map(|i| 1e-4 * 10f64.powf(i as f64 / 24.5)).collect();
    let deltas: Vec<f64> = taus.iter().map(|&t| 2.5 * t.powf(1.37)).collect();
    let fits = fit_models(&taus, &deltas).map_err(|e| e.to_string())?;
    if (fits.power.slope - 1.37).abs() > 1e-6 {
        return Err(format!("synthetic exponent {} != 1.37", fits.power.slope));
    }

    // Zero completeness on a small comb: every local minimum of |gamma| on
    // a brute grid refines onto a zero the pipeline already reported.
    let small = comb(60, 0.0);
    let reg = Region::new(0.3, 1.7, 0.0, 0.05).map_err(|e| e.to_string())?;
    let pipeline = find_fisher_zeros(&small, &reg, 500, 500).map_err(|e| e.to_string())?;
    let (nx, ny) = (1400usize, 500usize);
    let mut grid = vec![0.0f64; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            let z = Complex64::new(
                0.3 + 1.4 * i as f64 / nx as f64,
                0.05 * j as f64 / ny as f64,
            );
            grid[j * (nx + 1) + i] =
                return_rate_complex(&small, z * small.period_hint).map_err(|e| e.to_string())?.norm();
        }
    }
    let mut brute = 0usize;
    for j in 1..ny {
        for i in 1..nx {
            let v = grid[j * (nx + 1) + i];
            let neighbors = [
                grid[j * (nx + 1) + i - 1],
                grid[j * (nx + 1) + i + 1],
                grid[(j - 1) * (nx + 1) + i],
                grid[(j + 1) * (nx + 1) + i],
            ];
            // The cap only prunes plateau minima; the refiner below is the
            // actual zero test. It must clear the grid granularity: the
            // sample nearest a true zero still reads |gamma| of roughly
            // |gamma'| * dx / 2, a few 1e-3 of the weight sum here.
            if v < 1e-2 * small.weight_sum() && neighbors.iter().all(|&u| v <= u) {
                let seed = Complex64::new(
                    0.3 + 1.4 * i as f64 / nx as f64,
                    0.05 * j as f64 / ny as f64,
                );
                if let Ok(z) = refine_zero(&small, seed, &reg) {
                    brute += 1;
                    let covered = pipeline
                        .iter()
                        .any(|p| ((p.re - z.re).powi(2) + (p.im - z.im.abs()).powi(2)).sqrt() <= 1e-4);
                    if !covered {
                        return Err(format!(
                            "brute-force zero at ({}, {}) missing from the pipeline",
                            z.re, z.im
                        ));
                    }
                }
            }
        }
    }
    if brute == 0 {
        return Err("brute-force sweep found no zeros to compare".into());
    }

    // Determinism: an identical call gives identical bits.
    let rerun = find_fisher_zeros(&s, &region, 200, 200).map_err(|e| e.to_string())?;
    if rerun.len() != zeros.len()
        || rerun
            .iter()
            .zip(&zeros)
            .any(|(a, b)| a.re != b.re || a.im != b.im || a.residual != b.residual)
    {
        return Err("zero pipeline rerun differs".into());
    }
    let phase = geometric_phase(&big, 1.618, true);
    if phase != geometric_phase(&big, 1.618, true) {
        return Err("geometric phase rerun differs".into());
    }

    Ok(format!(
        "closure ({} zeros), positivity/dominance/periodicity (601 pts), zero gap -> pi, \
         exponent recovery, completeness ({brute} brute minima covered), bitwise reruns",
        zeros.len()
    ))
}

// -------------------------------------------------------------------------

#[test]
fn acceptance_gate() {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("white-noise comb exponent", c01),
        ("pink-noise comb exponent", c02),
        ("ohmic comb goes logarithmic", c03),
        ("comb zeros touch the axis at revivals", c04),
        ("zero distance ordered by coupling exponent", c05),
        ("membrane near-crossing positions and approach", c06),
        ("membrane exponents at full/half recurrence", c07),
        ("exponent survives finite temperature", c08),
        ("transition-order ladder", c09),
        ("kink exclusive to linear dispersion", c10),
        ("size scaling: linear then plateau", c11),
        ("short-time quadratic crossover", c12),
        ("anharmonicity constant under the strain rule", c13),
        ("cross-module invariants", c14),
    ];
    let mut failed = Vec::new();
    for (i, (label, run)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        let verdict = run();
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => {
                println!("criterion {:02}: PASS  {label} [{secs:.1}s]\n    {detail}", i + 1)
            }
            Err(detail) => {
                println!("criterion {:02}: FAIL  {label} [{secs:.1}s]\n    {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(
        failed.is_empty(),
        "acceptance criteria failed: {failed:?} (see the verdict table above)"
    );
}
