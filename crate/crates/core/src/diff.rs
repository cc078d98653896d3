//! Second-order finite differences on uniform grids.
//!
//! Interior nodes use central stencils; boundary nodes use one-sided
//! second-order stencils, so every output is defined on the full grid.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Component, ComplexScalarField, PotentialField};
use crate::grid::{Axis, GridSpec, SpaceTimePoint};
use crate::models::{AnalyticModel, ModelValue};

fn first_derivative(grid: &GridSpec, values: &[Complex64], axis: Axis) -> Result<Vec<Complex64>> {
    grid.require_axis(axis, 2)?;
    let a = axis.index();
    let len = grid.dims[a];
    let s = grid.stride(axis);
    let h = grid.spacing[a];
    let out = (0..values.len())
        .into_par_iter()
        .map(|idx| {
            let n = grid.unravel(idx)[a];
            let f = |offset: isize| values[(idx as isize + offset * s as isize) as usize];
            if len == 2 {
                let base = if n == 0 { 0 } else { -1 };
                (f(base + 1) - f(base)) / h
            } else if n == 0 {
                (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
            } else if n == len - 1 {
                (3.0 * f(0) - 4.0 * f(-1) + f(-2)) / (2.0 * h)
            } else {
                (f(1) - f(-1)) / (2.0 * h)
            }
        })
        .collect();
    Ok(out)
}

fn second_derivative(grid: &GridSpec, values: &[Complex64], axis: Axis) -> Result<Vec<Complex64>> {
    grid.require_axis(axis, 3)?;
    let a = axis.index();
    let len = grid.dims[a];
    let s = grid.stride(axis);
    let h2 = grid.spacing[a] * grid.spacing[a];
    let out = (0..values.len())
        .into_par_iter()
        .map(|idx| {
            let n = grid.unravel(idx)[a];
            let f = |offset: isize| values[(idx as isize + offset * s as isize) as usize];
            if n > 0 && n < len - 1 {
                (f(1) - 2.0 * f(0) + f(-1)) / h2
            } else if len == 3 {
                let c = if n == 0 { 1 } else { -1 };
                (f(c + 1) - 2.0 * f(c) + f(c - 1)) / h2
            } else {
                let d: isize = if n == 0 { 1 } else { -1 };
                (2.0 * f(0) - 5.0 * f(d) + 4.0 * f(2 * d) - f(3 * d)) / h2
            }
        })
        .collect();
    Ok(out)
}

fn with_values(field: &ComplexScalarField, values: Vec<Complex64>) -> ComplexScalarField {
    ComplexScalarField {
        grid: field.grid,
        time: field.time,
        values,
    }
}

pub fn central_diff(field: &ComplexScalarField, axis: Axis) -> Result<ComplexScalarField> {
    Ok(with_values(field, first_derivative(&field.grid, &field.values, axis)?))
}

pub fn second_diff(field: &ComplexScalarField, axis: Axis) -> Result<ComplexScalarField> {
    Ok(with_values(field, second_derivative(&field.grid, &field.values, axis)?))
}

pub fn gradient(field: &ComplexScalarField) -> Result<[ComplexScalarField; 3]> {
    Ok([
        central_diff(field, Axis::X)?,
        central_diff(field, Axis::Y)?,
        central_diff(field, Axis::Z)?,
    ])
}

fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scalar_of(field: &PotentialField, values: Vec<Complex64>) -> ComplexScalarField {
    ComplexScalarField {
        grid: field.grid,
        time: field.time,
        values,
    }
}

/// Spatial divergence of `(Ax, Ay, Az)`.
pub fn divergence(field: &PotentialField) -> Result<ComplexScalarField> {
    let g = &field.grid;
    let dx = first_derivative(g, field.component(Component::Ax), Axis::X)?;
    let dy = first_derivative(g, field.component(Component::Ay), Axis::Y)?;
    let dz = first_derivative(g, field.component(Component::Az), Axis::Z)?;
    Ok(scalar_of(field, add(&add(&dx, &dy), &dz)))
}

/// `dAx/dx + dAy/dy`; only the x and y axes need to be resolved.
pub fn transverse_divergence_field(field: &PotentialField) -> Result<ComplexScalarField> {
    let g = &field.grid;
    let dx = first_derivative(g, field.component(Component::Ax), Axis::X)?;
    let dy = first_derivative(g, field.component(Component::Ay), Axis::Y)?;
    Ok(scalar_of(field, add(&dx, &dy)))
}

pub fn curl(field: &PotentialField) -> Result<[ComplexScalarField; 3]> {
    let g = &field.grid;
    let d = |c: Component, axis: Axis| first_derivative(g, field.component(c), axis);
    let cx = sub(&d(Component::Az, Axis::Y)?, &d(Component::Ay, Axis::Z)?);
    let cy = sub(&d(Component::Ax, Axis::Z)?, &d(Component::Az, Axis::X)?);
    let cz = sub(&d(Component::Ay, Axis::X)?, &d(Component::Ax, Axis::Y)?);
    Ok([scalar_of(field, cx), scalar_of(field, cy), scalar_of(field, cz)])
}

pub fn laplacian(field: &ComplexScalarField) -> Result<ComplexScalarField> {
    let g = &field.grid;
    let xx = second_derivative(g, &field.values, Axis::X)?;
    let yy = second_derivative(g, &field.values, Axis::Y)?;
    let zz = second_derivative(g, &field.values, Axis::Z)?;
    Ok(with_values(field, add(&add(&xx, &yy), &zz)))
}

/// Central difference `(f(t + dt) - f(t - dt)) / (2 dt)` of a model at a point.
pub fn time_derivative(model: &AnalyticModel, point: &SpaceTimePoint, dt: f64) -> Result<ModelValue> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let ahead = model.eval(&point.at_time(point.t + dt));
    let behind = model.eval(&point.at_time(point.t - dt));
    let d = ahead.combine(behind, |a, b| (a - b) / (2.0 * dt));
    if !d.is_finite() {
        return Err(Error::InvalidParameter("non-finite model evaluation".into()));
    }
    Ok(d)
}
