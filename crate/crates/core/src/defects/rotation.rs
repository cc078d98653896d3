//! Rigid alignment of azimuth patterns.
//!
//! Two azimuth patterns `beta_a`, `beta_b` on a circle are related by a rigid
//! rotation `alpha` when `beta_b(theta) = beta_a(theta - alpha) + alpha`. The
//! alignment angle is found on a fixed grid over `[0, 2 pi)` and refined by
//! golden-section search. Patterns with rotational symmetry have several
//! equally good alignments, so a long interval is split into substeps small
//! enough that the increment nearest zero is the continuous one.

use std::f64::consts::PI;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::grid::{wrap_angle, SpaceTimePoint};
use crate::models::DisclinationModel;

/// Number of grid points used for the global alignment search.
pub const ALIGNMENT_GRID: usize = 4096;

/// Largest azimuth change at any sample point allowed within one substep.
const MAX_STEP_CHANGE: f64 = PI / 8.0;
const MAX_SUBSTEPS: usize = 1 << 16;
const RESIDUAL_LIMIT: f64 = 1e-6;
const GOLDEN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationFit {
    /// Accumulated rotation angle, not reduced modulo 2 pi.
    pub angle: f64,
    /// Largest RMS wrapped-angle misfit over all substeps.
    pub residual: f64,
    pub substeps: usize,
}

fn objective(
    pattern: &impl Fn(f64, f64) -> Result<f64>,
    thetas: &[f64],
    target: &[f64],
    s: f64,
    alpha: f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for (&th, &b) in thetas.iter().zip(target) {
        let d = wrap_angle(pattern(th - alpha, s)? + alpha - b);
        acc += d * d;
    }
    Ok(acc)
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// Best alignment increment from `sa` to `sb`, chosen nearest zero among equally good minima.
fn align_step(pattern: &impl Fn(f64, f64) -> Result<f64>, thetas: &[f64], sa: f64, sb: f64) -> Result<(f64, f64)> {
    let target: Vec<f64> = thetas.iter().map(|&th| pattern(th, sb)).collect::<Result<_>>()?;
    let step = 2.0 * PI / ALIGNMENT_GRID as f64;
    let values: Vec<f64> = (0..ALIGNMENT_GRID)
        .map(|g| objective(pattern, thetas, &target, sa, g as f64 * step))
        .collect::<Result<_>>()?;
    let grid_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let n = thetas.len() as f64;
    let mut candidates = Vec::new();
    for g in 0..ALIGNMENT_GRID {
        let prev = values[(g + ALIGNMENT_GRID - 1) % ALIGNMENT_GRID];
        let next = values[(g + 1) % ALIGNMENT_GRID];
        if values[g] <= prev && values[g] <= next && values[g] <= grid_min + 1e-4 * n {
            let centre = g as f64 * step;
            candidates.push(golden_section(
                |a| objective(pattern, thetas, &target, sa, a),
                centre - step,
                centre + step,
            )?);
        }
    }
    let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let (alpha, value) = candidates
        .into_iter()
        .filter(|c| c.1 <= best + 1e-9 * n)
        .map(|(a, v)| (wrap_angle(a), v))
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .expect("the grid always has a minimum");
    Ok((alpha, (value / n).sqrt()))
}

/// Track the rigid rotation of `pattern(theta, s)` as `s` goes from `s0` to `s1`.
pub(crate) fn track_rotation(
    pattern: impl Fn(f64, f64) -> Result<f64>,
    s0: f64,
    s1: f64,
    n_theta: usize,
) -> Result<RotationFit> {
    if n_theta < 16 {
        return Err(Error::InvalidParameter(format!("n_theta = {n_theta} must be at least 16")));
    }
    if !(s0.is_finite() && s1.is_finite()) || s1 < s0 {
        return Err(Error::InvalidParameter(format!("interval [{s0}, {s1}] is not increasing")));
    }
    if s1 == s0 {
        return Ok(RotationFit {
            angle: 0.0,
            residual: 0.0,
            substeps: 0,
        });
    }
    let thetas: Vec<f64> = (0..n_theta).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / n_theta as f64).collect();

    let knots_for = |n: usize| -> Vec<f64> { (0..=n).map(|i| s0 + (s1 - s0) * i as f64 / n as f64).collect() };
    let largest_change = |n: usize| -> Result<f64> {
        let samples: Vec<Vec<f64>> = knots_for(n)
            .iter()
            .map(|&s| thetas.iter().map(|&th| pattern(th, s)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(samples
            .windows(2)
            .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| wrap_angle(b - a).abs()))
            .fold(0.0, f64::max))
    };
    // A pattern that returns to itself over one substep looks unchanged, so the
    // criterion must also hold with twice as many substeps.
    let mut substeps = 1;
    let mut coarse_ok = largest_change(substeps)? <= MAX_STEP_CHANGE;
    loop {
        let fine_ok = largest_change(2 * substeps)? <= MAX_STEP_CHANGE;
        if coarse_ok && fine_ok {
            break;
        }
        substeps *= 2;
        coarse_ok = fine_ok;
        if substeps > MAX_SUBSTEPS {
            return Err(Error::InvalidParameter("pattern changes too fast to track".into()));
        }
    }
    let knots = knots_for(substeps);

    let mut angle = 0.0;
    let mut residual: f64 = 0.0;
    for w in knots.windows(2) {
        let (inc, res) = align_step(&pattern, &thetas, w[0], w[1])?;
        angle += inc;
        residual = residual.max(res);
    }
    if residual > RESIDUAL_LIMIT {
        return Err(Error::NotRigidRotation(residual));
    }
    Ok(RotationFit {
        angle,
        residual,
        substeps,
    })
}

/// Rigid rotation of the z = 0 azimuth pattern on the unit circle between `t0` and `t1`.
pub fn pattern_rotation(model: &DisclinationModel, t0: f64, t1: f64, n_theta: usize) -> Result<RotationFit> {
    track_rotation(
        |theta, t| model.azimuth(&SpaceTimePoint::cylindrical(1.0, theta, 0.0, t)),
        t0,
        t1,
        n_theta,
    )
}

/// Angular velocity of the z = 0 pattern (rad / time); 0 when `t1 == t0`.
pub fn pattern_rotation_rate(model: &DisclinationModel, t0: f64, t1: f64, n_theta: usize) -> Result<f64> {
    let fit = pattern_rotation(model, t0, t1, n_theta)?;
    Ok(if t1 == t0 { 0.0 } else { fit.angle / (t1 - t0) })
}

/// Rigid twist of the azimuth pattern between slices `z0` and `z1` at time `t`.
pub fn axial_twist(model: &DisclinationModel, z0: f64, z1: f64, t: f64, n_theta: usize) -> Result<RotationFit> {
    track_rotation(
        |theta, z| model.azimuth(&SpaceTimePoint::cylindrical(1.0, theta, z, t)),
        z0,
        z1,
        n_theta,
    )
}

/// Signed twist rate `d alpha / d z` (rad / length); 0 when `z1 == z0`.
pub fn axial_twist_per_length(model: &DisclinationModel, z0: f64, z1: f64, t: f64, n_theta: usize) -> Result<f64> {
    let fit = axial_twist(model, z0, z1, t, n_theta)?;
    Ok(if z1 == z0 { 0.0 } else { fit.angle / (z1 - z0) })
}

/// Snap `x` to `p/q` with `q <= max_den` when within `tol`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<Ratio<i64>> {
    (1..=max_den).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= tol).then(|| Ratio::new(p as i64, q))
    })
}

/// Pattern rotation over one period divided by omega, before snapping.
pub fn tifold_index_raw(model: &DisclinationModel) -> Result<f64> {
    let omega = model.params.omega;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::UndefinedIndex(format!("omega = {omega}")));
    }
    let period = 2.0 * PI / omega;
    Ok(pattern_rotation_rate(model, 0.0, period, 32)? / omega)
}

/// Time index of the disclination: rotation angle per period over 2 pi.
pub fn tifold_index(model: &DisclinationModel) -> Result<Ratio<i64>> {
    let raw = tifold_index_raw(model)?;
    snap_rational(raw, 4, 1e-9).ok_or(Error::NonRationalIndex(raw))
}
