//! Residual checks: electric and magnetic fields of sampled potentials, the
//! Lorentz gauge condition, and the wave equation.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diff;
use crate::error::{Error, Result};
use crate::field::{sample_potential, sample_scalar, Component, ComplexScalarField, FieldKind, PotentialField};
use crate::grid::{Axis, GridSpec, SpaceTimePoint};
use crate::models::{AnalyticModel, ModelValue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub interior_max: f64,
    pub interior_rms: f64,
    pub grid_spacing: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_order: Option<f64>,
}

impl ResidualReport {
    /// Max and rms of residual magnitudes.
    pub fn from_magnitudes(name: impl Into<String>, magnitudes: &[f64], grid_spacing: f64) -> Self {
        let max = magnitudes.iter().copied().fold(0.0, f64::max);
        let rms = if magnitudes.is_empty() {
            0.0
        } else {
            (magnitudes.iter().map(|m| m * m).sum::<f64>() / magnitudes.len() as f64).sqrt()
        };
        ResidualReport {
            name: name.into(),
            interior_max: max,
            // rounding can push the rms a hair above the max for constant data
            interior_rms: rms.min(max),
            grid_spacing,
            observed_order: None,
        }
    }

    /// Statistics over the interior nodes of a residual field.
    pub fn interior(name: impl Into<String>, residual: &ComplexScalarField) -> Result<Self> {
        Self::interior_of(name, &residual.grid, |idx| residual.values[idx].norm())
    }

    fn interior_of(name: impl Into<String>, grid: &GridSpec, magnitude: impl Fn(usize) -> f64) -> Result<Self> {
        let interior = grid.interior_indices();
        if interior.is_empty() {
            return Err(Error::InvalidGrid(format!(
                "grid {:?} has no nodes two cells away from the boundary",
                grid.dims
            )));
        }
        let mags: Vec<f64> = interior.into_iter().map(magnitude).collect();
        Ok(Self::from_magnitudes(name, &mags, grid.max_spacing()))
    }
}

/// `log2(coarse / fine)` for a residual measured at spacing `h` and `h / 2`.
pub fn convergence_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Fill `observed_order` of each report from its predecessor, assuming the
/// reports are ordered by halving spacing.
pub fn with_observed_orders(mut reports: Vec<ResidualReport>) -> Vec<ResidualReport> {
    for i in 1..reports.len() {
        let ratio = reports[i - 1].grid_spacing / reports[i].grid_spacing;
        let order = (reports[i - 1].interior_max / reports[i].interior_max).ln() / ratio.ln();
        reports[i].observed_order = Some(order);
    }
    reports
}

/// Grid covering `[-half_width, half_width]` about `center` with `cells` cells
/// per axis, padded by two cells on every side so that the interior nodes are
/// exactly the nodes of the unpadded box at every refinement level.
pub fn padded_grid(center: [f64; 3], half_width: f64, cells: usize) -> Result<GridSpec> {
    let h = 2.0 * half_width / cells as f64;
    let n = cells + 1 + 4;
    GridSpec::centered([n; 3], [h; 3], center)
}

pub fn write_reports_csv(path: &Path, reports: &[ResidualReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    w.write_record(["name", "h", "max", "rms", "order"])
        .map_err(|e| Error::format(path, e.to_string()))?;
    for r in reports {
        let order = r.observed_order.map(|o| o.to_string()).unwrap_or_default();
        w.write_record([
            r.name.clone(),
            r.grid_spacing.to_string(),
            r.interior_max.to_string(),
            r.interior_rms.to_string(),
            order,
        ])
        .map_err(|e| Error::format(path, e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// How `∂/∂t` of a sampled potential is obtained.
#[derive(Clone, Copy, Debug)]
pub enum TimeDerivative<'a> {
    /// `-i ω f` from the generating model.
    Analytic(&'a AnalyticModel),
    /// Central difference of the generating model with step `dt`.
    Central(&'a AnalyticModel, f64),
    /// Time-independent field.
    Static,
}

fn require_potential(model: &AnalyticModel) -> Result<()> {
    if model.kind() != FieldKind::Potential {
        return Err(Error::UnsupportedModel(format!(
            "{} model does not describe a potential",
            model.name()
        )));
    }
    Ok(())
}

/// `∂/∂t` of all four components at every node, at the field's time.
fn potential_time_derivative(field: &PotentialField, mode: TimeDerivative) -> Result<[Vec<Complex64>; 4]> {
    let n = field.grid.node_count();
    let mut out: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]);
    let (model, dt) = match mode {
        TimeDerivative::Static => return Ok(out),
        TimeDerivative::Analytic(m) => (m, None),
        TimeDerivative::Central(m, dt) => (m, Some(dt)),
    };
    require_potential(model)?;
    let values: Vec<ModelValue> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let p = SpaceTimePoint::at(field.grid.position_of(idx), field.time);
            match dt {
                None => Ok(model.time_derivative_analytic(&p)),
                Some(dt) => diff::time_derivative(model, &p, dt),
            }
        })
        .collect::<Result<_>>()?;
    for (idx, v) in values.into_iter().enumerate() {
        if let ModelValue::Potential(d) = v {
            for c in 0..4 {
                out[c][idx] = d[c];
            }
        }
    }
    Ok(out)
}

fn speed(mode: TimeDerivative) -> f64 {
    match mode {
        TimeDerivative::Analytic(m) | TimeDerivative::Central(m, _) => m.wave_speed(),
        TimeDerivative::Static => 1.0,
    }
}

/// `E = -∇Φ - (1/c) ∂A/∂t` with the analytic time derivative of `model`.
pub fn electric_field(field: &PotentialField, model: &AnalyticModel) -> Result<[ComplexScalarField; 3]> {
    electric_field_with(field, TimeDerivative::Analytic(model))
}

pub fn electric_field_with(field: &PotentialField, mode: TimeDerivative) -> Result<[ComplexScalarField; 3]> {
    let grad_phi = diff::gradient(&field.component_field(Component::Phi))?;
    let dadt = potential_time_derivative(field, mode)?;
    let c = speed(mode);
    let [gx, gy, gz] = grad_phi;
    let e = |g: ComplexScalarField, d: &[Complex64]| ComplexScalarField {
        values: g.values.iter().zip(d).map(|(g, d)| -g - d / c).collect(),
        ..g
    };
    Ok([e(gx, &dadt[0]), e(gy, &dadt[1]), e(gz, &dadt[2])])
}

/// `B = ∇ × A`; needs at least three nodes on every axis.
pub fn magnetic_field(field: &PotentialField) -> Result<[ComplexScalarField; 3]> {
    for axis in Axis::ALL {
        field.grid.require_axis(axis, 3)?;
    }
    diff::curl(field)
}

/// Interior statistics of `|v|` for a vector field given by components.
pub fn vector_report(name: impl Into<String>, v: &[ComplexScalarField; 3]) -> Result<ResidualReport> {
    ResidualReport::interior_of(name, &v[0].grid, |idx| {
        v.iter().map(|c| c.values[idx].norm_sqr()).sum::<f64>().sqrt()
    })
}

/// `∇·A + (1/c) ∂Φ/∂t` at every node.
pub fn lorentz_residual_field(field: &PotentialField, model: &AnalyticModel) -> Result<ComplexScalarField> {
    lorentz_residual_field_with(field, TimeDerivative::Analytic(model))
}

pub fn lorentz_residual_field_with(field: &PotentialField, mode: TimeDerivative) -> Result<ComplexScalarField> {
    let div = diff::divergence(field)?;
    let dt = potential_time_derivative(field, mode)?;
    let c = speed(mode);
    let values = div.values.iter().zip(&dt[3]).map(|(d, p)| d + p / c).collect();
    Ok(ComplexScalarField { values, ..div })
}

pub fn lorentz_residual(field: &PotentialField, model: &AnalyticModel) -> Result<ResidualReport> {
    ResidualReport::interior("lorentz", &lorentz_residual_field(field, model)?)
}

/// `∂Ax/∂x + ∂Ay/∂y`.
pub fn transverse_divergence(field: &PotentialField) -> Result<ResidualReport> {
    field.grid.require_axis(Axis::X, 3)?;
    field.grid.require_axis(Axis::Y, 3)?;
    let r = diff::transverse_divergence_field(field)?;
    ResidualReport::interior("transverse_divergence", &r)
}

/// Points at which the wave residual is evaluated, with the Laplacian spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub points: Vec<[f64; 3]>,
    pub h: f64,
}

impl SampleSet {
    pub fn new(points: Vec<[f64; 3]>, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing {h} must be positive")));
        }
        if points.is_empty() {
            return Err(Error::InvalidParameter("no sample points".into()));
        }
        Ok(SampleSet { points, h })
    }

    /// Interior nodes of a grid, with the grid's spacing.
    pub fn interior_of(grid: &GridSpec) -> Result<Self> {
        let points = grid.interior_indices().into_iter().map(|i| grid.position_of(i)).collect();
        Self::new(points, grid.max_spacing())
    }
}

/// Temporal part of the wave operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStencil {
    /// `-ω² f`.
    Analytic,
    /// `(f(t + dt) - 2 f(t) + f(t - dt)) / dt²`.
    Central(f64),
}

fn model_components(model: &AnalyticModel, p: &SpaceTimePoint) -> Vec<Complex64> {
    model.eval(p).components()
}

/// `∇²f - (1/c²) ∂²f/∂t²` per point and component. The Laplacian is the
/// sampled one on a 3×3×3 grid of spacing `h` centred on the point.
pub fn wave_residual_values(
    model: &AnalyticModel,
    samples: &SampleSet,
    t: f64,
    stencil: TimeStencil,
) -> Result<Vec<Vec<Complex64>>> {
    model.validate()?;
    if let TimeStencil::Central(dt) = stencil {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
    }
    let c2 = model.wave_speed().powi(2);
    samples
        .points
        .par_iter()
        .map(|&center| {
            let grid = GridSpec::centered([3; 3], [samples.h; 3], center)?;
            let centre = grid.index(1, 1, 1);
            let laplacians: Vec<Complex64> = match model.kind() {
                FieldKind::Scalar => vec![diff::laplacian(&sample_scalar(model, &grid, t)?)?.values[centre]],
                FieldKind::Potential => {
                    let f = sample_potential(model, &grid, t)?;
                    [Component::Ax, Component::Ay, Component::Az, Component::Phi]
                        .iter()
                        .map(|&c| Ok(diff::laplacian(&f.component_field(c))?.values[centre]))
                        .collect::<Result<_>>()?
                }
            };
            let p = SpaceTimePoint::at(center, t);
            let dtt: Vec<Complex64> = match stencil {
                TimeStencil::Analytic => model.second_time_derivative_analytic(&p).components(),
                TimeStencil::Central(dt) => {
                    let ahead = model_components(model, &p.at_time(t + dt));
                    let now = model_components(model, &p);
                    let behind = model_components(model, &p.at_time(t - dt));
                    (0..now.len())
                        .map(|i| (ahead[i] - 2.0 * now[i] + behind[i]) / (dt * dt))
                        .collect()
                }
            };
            Ok(laplacians.iter().zip(&dtt).map(|(l, d)| l - d / c2).collect())
        })
        .collect()
}

/// Wave residual statistics; each point contributes its largest component magnitude.
pub fn wave_residual(
    model: &AnalyticModel,
    samples: &SampleSet,
    t: f64,
    stencil: TimeStencil,
) -> Result<ResidualReport> {
    let values = wave_residual_values(model, samples, t, stencil)?;
    let mags: Vec<f64> = values
        .iter()
        .map(|v| v.iter().map(|c| c.norm()).fold(0.0, f64::max))
        .collect();
    Ok(ResidualReport::from_magnitudes("wave", &mags, samples.h))
}
