//! Complex-time zeros of the rate function.
//!
//! For a finite bath the echo `G(z) = exp(-gamma(z))` never vanishes, so the
//! operational object is the zero set of `gamma(z)` itself: the points where
//! the analytically continued rate returns to zero. Those curves are what
//! pinch the real axis at the critical times as the mode count grows.
//!
//! Pipeline: a rectangle is scanned on a uniform grid and every cell whose
//! corners bracket a simultaneous sign change of Re gamma and Im gamma
//! becomes a seed; seeds are polished by damped Newton with the analytic
//! derivative; results are snapped to the axis when they land within the
//! dedup radius of it, merged, completed into exact conjugate pairs, and
//! sorted. Everything is in units of the spectrum's `period_hint`.

use crate::dynamics::{rate_complex_unchecked, rate_derivative_unchecked};
use crate::error::{Error, Result};
use crate::spectrum::ModeSpectrum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Axis-aligned search rectangle, in units of `period_hint`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        for v in [re_min, re_max, im_min, im_max] {
            if !v.is_finite() {
                return Err(Error::Domain("region bounds must be finite".into()));
            }
        }
        if !(re_max > re_min) || !(im_max > im_min) {
            return Err(Error::Domain(format!(
                "region must have positive extent, got re [{re_min}, {re_max}], im [{im_min}, {im_max}]"
            )));
        }
        Ok(r)
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Rectangle scaled about its center.
    fn expanded(&self, factor: f64) -> Region {
        let cx = 0.5 * (self.re_min + self.re_max);
        let cy = 0.5 * (self.im_min + self.im_max);
        let hx = 0.5 * (self.re_max - self.re_min) * factor;
        let hy = 0.5 * (self.im_max - self.im_min) * factor;
        Region {
            re_min: cx - hx,
            re_max: cx + hx,
            im_min: cy - hy,
            im_max: cy + hy,
        }
    }

    /// Overflow guard for a region in period units.
    fn check_guard(&self, spectrum: &ModeSpectrum) -> Result<()> {
        let t = spectrum.period_hint;
        let worst = self.im_min.abs().max(self.im_max.abs()) * t;
        let max_im = spectrum.max_admissible_im();
        if worst > max_im {
            return Err(Error::ImagOverflow {
                requested: worst,
                max_im,
            });
        }
        Ok(())
    }
}

/// A refined zero of the rate function, in units of `period_hint`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FisherZero {
    pub re: f64,
    pub im: f64,
    /// |gamma| re-evaluated at the stored point (not the refiner's last
    /// internal value).
    pub residual: f64,
    /// Nearest integer to Re z / (period_hint / 2): integer branches sit at
    /// full revivals, odd branches halfway between.
    pub branch: i64,
    pub iterations: u32,
}

impl FisherZero {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Why a seed failed to refine. Reported per seed, never fatal to a search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RefineFailure {
    /// Seed was non-finite or beyond the overflow guard.
    BadSeed,
    /// |gamma'| fell below 1e-30; Newton direction undefined.
    SingularJacobian { at: Complex64 },
    /// An accepted iterate left twice the scan region.
    LeftTrustRegion { at: Complex64 },
    /// Damping exhausted without decreasing the residual.
    Stalled { residual: f64 },
    /// 100 iterations without reaching the acceptance bound.
    MaxIterations { residual: f64 },
}

fn branch_of(re: f64) -> i64 {
    (2.0 * re).round() as i64
}

/// Evaluate gamma and |gamma| at a point in period units.
#[inline]
fn gamma_units(spectrum: &ModeSpectrum, z: Complex64) -> Complex64 {
    rate_complex_unchecked(spectrum, z * spectrum.period_hint)
}

/// Grid scan: centers of all cells whose corner values of Re gamma and
/// Im gamma both straddle zero (sign change or exact zero). Row-major order.
pub fn scan_candidates(
    spectrum: &ModeSpectrum,
    region: &Region,
    nx: usize,
    ny: usize,
) -> Result<Vec<Complex64>> {
    if nx < 2 || ny < 2 {
        return Err(Error::Domain(format!(
            "scan resolution must be at least 2x2 cells, got {nx}x{ny}"
        )));
    }
    region.check_guard(spectrum)?;
    let dx = (region.re_max - region.re_min) / nx as f64;
    let dy = (region.im_max - region.im_min) / ny as f64;

    // Corner values, parallel over rows; each row is summed in fixed mode
    // order so the scan is bit-stable.
    let rows: Vec<Vec<Complex64>> = (0..=ny)
        .into_par_iter()
        .map(|j| {
            let y = region.im_min + j as f64 * dy;
            (0..=nx)
                .map(|i| {
                    let x = region.re_min + i as f64 * dx;
                    gamma_units(spectrum, Complex64::new(x, y))
                })
                .collect()
        })
        .collect();

    let mut seeds = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let quad = [rows[j][i], rows[j][i + 1], rows[j + 1][i], rows[j + 1][i + 1]];
            let (mut re_lo, mut re_hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut im_lo, mut im_hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for g in quad {
                re_lo = re_lo.min(g.re);
                re_hi = re_hi.max(g.re);
                im_lo = im_lo.min(g.im);
                im_hi = im_hi.max(g.im);
            }
            if re_lo <= 0.0 && re_hi >= 0.0 && im_lo <= 0.0 && im_hi >= 0.0 {
                seeds.push(Complex64::new(
                    region.re_min + (i as f64 + 0.5) * dx,
                    region.im_min + (j as f64 + 0.5) * dy,
                ));
            }
        }
    }
    Ok(seeds)
}

/// Damped Newton polish of one seed.
///
/// Acceptance is on the residual, not the step size: at integer combs the
/// axis zeros are double roots (gamma and gamma' vanish together), where
/// plain Newton thrashes; halving the step whenever |gamma| fails to
/// decrease recovers linear convergence there. An iterate that lands
/// outside twice the scan region is rejected outright.
pub fn refine_zero(
    spectrum: &ModeSpectrum,
    seed: Complex64,
    scan_region: &Region,
) -> std::result::Result<FisherZero, RefineFailure> {
    let t = spectrum.period_hint;
    if !seed.re.is_finite() || !seed.im.is_finite() {
        return Err(RefineFailure::BadSeed);
    }
    if seed.im.abs() * t > spectrum.max_admissible_im() {
        return Err(RefineFailure::BadSeed);
    }
    let trust = scan_region.expanded(2.0);
    let bound = 1e-10 * spectrum.weight_sum();

    let mut w = seed;
    let mut g = gamma_units(spectrum, w);
    let mut r = g.norm();
    let mut accepted = false;
    let mut iterations = 0u32;
    for _ in 0..100 {
        if r <= bound {
            accepted = true;
        }
        // Derivative in period units: d(gamma)/dz_units = T * gamma'(T z).
        let d = rate_derivative_unchecked(spectrum, w * t) * t;
        if d.norm() < 1e-30 {
            if accepted {
                break;
            }
            return Err(RefineFailure::SingularJacobian { at: w });
        }
        let step = g / d;
        // Past the acceptance bound a step only counts if it halves the
        // residual; plain strict decrease would crawl along rounding noise
        // forever. A true Newton step near a root cuts it by 4x or more,
        // so the polish phase tries the full step only: damping cannot
        // rescue a full step that has hit the rounding floor.
        let goal = if accepted { 0.5 * r } else { r };
        let halvings = if accepted { 1 } else { 25 };
        let mut h = 1.0;
        let mut advanced = false;
        // 25 halvings take the step to ~3e-8 of the Newton length; if that
        // still does not improve the residual the iterate has stalled, and
        // more halvings only burn evaluations.
        for _ in 0..halvings {
            let cand = w - step * h;
            let gc = gamma_units(spectrum, cand);
            let rc = gc.norm();
            if rc.is_finite() && rc < goal {
                if !trust.contains(cand) {
                    if accepted {
                        break;
                    }
                    return Err(RefineFailure::LeftTrustRegion { at: cand });
                }
                w = cand;
                g = gc;
                r = rc;
                advanced = true;
                iterations += 1;
                break;
            }
            h *= 0.5;
        }
        if !advanced {
            // No step improves the residual: either we are done (at a
            // multiple root the improving steps only dry up at rounding
            // level, far below the acceptance bound) or the seed stalled
            // short of any zero.
            if accepted {
                break;
            }
            return Err(RefineFailure::Stalled { residual: r });
        }
    }
    if accepted || r <= bound {
        return Ok(FisherZero {
            re: w.re,
            im: w.im,
            residual: r,
            branch: branch_of(w.re),
            iterations,
        });
    }
    Err(RefineFailure::MaxIterations { residual: r })
}

/// Merge radius, in period units: zeros closer than this collapse to the
/// first (in sorted order), and anything within it of the real axis snaps
/// onto the axis.
const DEDUP_RADIUS: f64 = 1e-6;

fn sort_key(a: &FisherZero, b: &FisherZero) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Full search: scan, refine in parallel, snap, merge, complete conjugates.
///
/// The returned list is sorted by (Re z, Im z), exactly closed under
/// conjugation, and every residual has been re-evaluated at the stored
/// coordinates.
pub fn find_fisher_zeros(
    spectrum: &ModeSpectrum,
    region: &Region,
    nx: usize,
    ny: usize,
) -> Result<Vec<FisherZero>> {
    let seeds = scan_candidates(spectrum, region, nx, ny)?;
    let mut zeros: Vec<FisherZero> = seeds
        .par_iter()
        .map(|&seed| refine_zero(spectrum, seed, region))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    // Snap near-axis zeros onto the axis, then fold everything into the
    // closed upper half plane: gamma(conj z) = conj gamma(z), so a zero and
    // its reflection are the same object with the same residual. Merging on
    // the folded set and mirroring afterwards makes the conjugate closure
    // exact by construction.
    for z in &mut zeros {
        if z.im.abs() <= DEDUP_RADIUS {
            z.im = 0.0;
        } else if z.im < 0.0 {
            z.im = -z.im;
        }
    }
    zeros.sort_by(sort_key);

    let mut merged: Vec<FisherZero> = Vec::with_capacity(zeros.len());
    for z in zeros {
        let dup = merged
            .iter()
            .rev()
            .take_while(|u| z.re - u.re <= DEDUP_RADIUS)
            .any(|u| {
                let dr = z.re - u.re;
                let di = z.im - u.im;
                (dr * dr + di * di).sqrt() <= DEDUP_RADIUS
            });
        if !dup {
            merged.push(z);
        }
    }

    // Re-evaluate residuals at the stored (possibly snapped) coordinates and
    // enforce the acceptance bound there too, then emit mirrors.
    let bound = 1e-10 * spectrum.weight_sum();
    let mut full: Vec<FisherZero> = Vec::with_capacity(2 * merged.len());
    for mut z in merged {
        let r = gamma_units(spectrum, z.z()).norm();
        if r <= bound {
            z.residual = r;
            full.push(z);
            if z.im != 0.0 {
                full.push(FisherZero { im: -z.im, ..z });
            }
        }
    }
    full.sort_by(sort_key);
    Ok(full)
}

/// Per-branch closest approach to the real axis.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Crossing {
    pub branch: i64,
    /// Re z of the branch's closest zero, in period units.
    pub t_crossing: f64,
    /// |Im z| of that zero.
    pub im_z: f64,
    /// Whether the approach is within the caller's axis tolerance.
    pub is_crossing: bool,
}

/// For each branch present in `zeros`, report the zero with smallest |Im z|
/// (ties broken toward smaller Re z), flagged when within `axis_tolerance`
/// of the axis. Sorted by branch.
pub fn crossing_report(zeros: &[FisherZero], axis_tolerance: f64) -> Result<Vec<Crossing>> {
    if !(axis_tolerance > 0.0) {
        return Err(Error::Domain(format!(
            "axis_tolerance must be positive, got {axis_tolerance}"
        )));
    }
    let mut best: std::collections::BTreeMap<i64, (f64, f64)> = std::collections::BTreeMap::new();
    for z in zeros {
        let entry = best.entry(z.branch).or_insert((f64::INFINITY, f64::INFINITY));
        let key = (z.im.abs(), z.re);
        if key.0 < entry.0 || (key.0 == entry.0 && key.1 < entry.1) {
            *entry = key;
        }
    }
    Ok(best
        .into_iter()
        .map(|(branch, (im_abs, re))| Crossing {
            branch,
            t_crossing: re,
            im_z: im_abs,
            is_crossing: im_abs <= axis_tolerance,
        })
        .collect())
}
