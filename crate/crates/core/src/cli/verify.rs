//! The eight-check claim suite run by `verify`.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::defects::{axial_twist, pattern_rotation_rate, phase_winding, tifold_index, LoopPath};
use crate::error::{Error, Result};
use crate::field::{sample_potential, Component};
use crate::gauge::{
    convergence_order, lorentz_residual, transverse_divergence, wave_residual, ResidualReport, SampleSet,
    TimeStencil,
};
use crate::grid::GridSpec;
use crate::ledger::{PhotonLedger, UnitSystem};
use crate::models::{AnalyticModel, DisclinationModel};

/// One row of the verify CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub h: Option<f64>,
    pub order: Option<f64>,
    pub pass: bool,
}

impl CheckRow {
    fn new(check: &str, measured: f64, expected: f64, tolerance: f64, pass: bool) -> Self {
        CheckRow {
            check: check.to_string(),
            measured,
            expected,
            tolerance,
            h: None,
            order: None,
            pass,
        }
    }

    fn within(check: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self::new(check, measured, expected, tolerance, pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub rows: Vec<CheckRow>,
    /// Lorentz, transverse divergence and each wave refinement level.
    pub residuals: Vec<ResidualReport>,
}

const ORDER_TARGET: f64 = 2.0;
const ORDER_SLACK: f64 = 0.3;
const WAVE_REL_TOL: f64 = 1e-2;
const N_THETA: usize = 32;

pub fn claim_suite(model: &DisclinationModel, refinements: usize) -> Result<SuiteOutcome> {
    if refinements == 0 {
        return Err(Error::InvalidParameter("at least one refinement level is needed".into()));
    }
    let p = model.params;
    let k = p.k;
    let wrapped = AnalyticModel::Disclination(*model);
    let mut rows = Vec::new();
    let mut residuals = Vec::new();

    // gauge condition: FD truncation on Az is about k |az| (k h)^2 / 6
    let h = 1e-5 / k;
    let grid = GridSpec::centered([5; 3], [h; 3], [0.3 / k, -0.2 / k, 0.1 / k])?;
    let field = sample_potential(&wrapped, &grid, 0.0)?;
    let lorentz = lorentz_residual(&field, &wrapped)?;
    let tol = 1e-9 * (k * p.az.norm()).max(1.0);
    let mut row = CheckRow::new("lorentz", lorentz.interior_max, 0.0, tol, lorentz.interior_max <= tol);
    row.h = Some(h);
    rows.push(row);
    residuals.push(lorentz);

    let grid = GridSpec::centered([7, 7, 5], [0.1 / k; 3], [0.2 / k, 0.1 / k, 0.0])?;
    let td = transverse_divergence(&sample_potential(&wrapped, &grid, 0.0)?)?;
    let tol = 1e-10 * p.a.abs().max(1.0);
    let mut row = CheckRow::new("transverse_divergence", td.interior_max, 0.0, tol, td.interior_max <= tol);
    row.h = Some(grid.spacing[0]);
    rows.push(row);
    residuals.push(td);

    rows.push(wave_check(&wrapped, k, refinements, &mut residuals)?);

    let period = 2.0 * PI / p.omega;
    let rate = pattern_rotation_rate(model, 0.0, 0.3 * period, N_THETA)?;
    rows.push(CheckRow::within("rotation_rate", rate / p.omega, 0.5, 1e-6));

    let twist = axial_twist(model, 0.0, p.wavelength(), 0.0, N_THETA)?.angle;
    rows.push(CheckRow::within("twist", twist.abs(), PI, 1e-6));

    let index = tifold_index(model)?;
    let half = Ratio::new(1, 2);
    rows.push(CheckRow::new(
        "tifold_index",
        *index.numer() as f64 / *index.denom() as f64,
        0.5,
        0.0,
        index == half,
    ));

    let grid = GridSpec::centered([33, 33, 1], [0.1 / k, 0.1 / k, 1.0], [0.0; 3])?;
    let ax = sample_potential(&wrapped, &grid, 0.0)?.component_field(Component::Ax);
    let around = phase_winding(&ax, &LoopPath::node_rectangle(4, 4, 28, 28, 0)?)?;
    let beside = phase_winding(&ax, &LoopPath::node_rectangle(20, 20, 30, 30, 0)?)?;
    rows.push(CheckRow::new("orbifold_winding", around as f64, 1.0, 0.0, around == 1 && beside == 0));

    let ledger = PhotonLedger::from_frequency(p.omega / (2.0 * PI), UnitSystem::Geometric)?;
    let e = ledger.total_energy();
    let ratio = e.internal / e.total;
    rows.push(CheckRow::new("energy_partition", ratio, 0.5, 0.0, ratio == 0.5 && e.internal == e.translational));

    Ok(SuiteOutcome { rows, residuals })
}

/// Wave residual relative to `k² max|f|` at the finest spacing, plus the
/// observed order between successive halvings.
fn wave_check(
    model: &AnalyticModel,
    k: f64,
    refinements: usize,
    residuals: &mut Vec<ResidualReport>,
) -> Result<CheckRow> {
    let points: Vec<[f64; 3]> = [[0.7, 0.2, 0.1], [-0.3, 0.5, 1.2], [1.0, -1.0, -0.4]]
        .iter()
        .map(|q| q.map(|v| v / k))
        .collect();
    let t = 0.3;
    let scale = points
        .iter()
        .flat_map(|&q| model.eval(&crate::grid::SpaceTimePoint::at(q, t)).components())
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        * k
        * k;
    let mut levels = Vec::new();
    for j in 0..refinements {
        let h = 0.1 / (k * 2f64.powi(j as i32));
        let mut r = wave_residual(model, &SampleSet::new(points.clone(), h)?, t, TimeStencil::Analytic)?;
        if let Some(prev) = levels.last() {
            let prev: &ResidualReport = prev;
            r.observed_order = Some(convergence_order(prev.interior_max, r.interior_max));
        }
        levels.push(r);
    }
    let finest = levels.last().expect("at least one refinement");
    let relative = finest.interior_max / scale;
    let orders_ok = levels
        .iter()
        .filter_map(|r| r.observed_order)
        .all(|o| (o - ORDER_TARGET).abs() <= ORDER_SLACK);
    let mut row = CheckRow::new("wave", relative, 0.0, WAVE_REL_TOL, relative <= WAVE_REL_TOL && orders_ok);
    row.h = Some(finest.grid_spacing);
    row.order = finest.observed_order;
    residuals.extend(levels);
    Ok(row)
}
