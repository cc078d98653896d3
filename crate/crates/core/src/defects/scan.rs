//! Plaquette scans over one z slice.
//!
//! Each 2x2 plaquette is tested by the wrapped phase sum around its four
//! edges. A zero sitting exactly on a node makes the adjacent plaquettes
//! ill-defined; such nodes are measured instead on the ring of their eight
//! neighbours and reported at the node itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;

use super::{DefectKind, DefectRecord, TOL_AMP};
use crate::error::{Error, Result};
use crate::field::{Component, ComplexScalarField, PotentialField};
use crate::grid::{wrap_angle, GridSpec};

/// Wrapped-phase winding around a closed ring of values (last = first implied).
fn ring_winding(values: &[Complex64]) -> i64 {
    let n = values.len();
    let total: f64 = (0..n)
        .map(|a| wrap_angle((values[(a + 1) % n] * values[a].conj()).arg()))
        .sum();
    (total / (2.0 * PI)).round() as i64
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

struct Slice<'a> {
    grid: &'a GridSpec,
    k: usize,
    primary: &'a [Complex64],
    secondary: Option<&'a [Complex64]>,
    threshold: f64,
}

impl Slice<'_> {
    fn idx(&self, i: usize, j: usize) -> usize {
        self.grid.index(i, j, self.k)
    }

    fn is_zero(&self, idx: usize) -> bool {
        self.primary[idx].norm() < self.threshold
            && self.secondary.is_none_or(|s| s[idx].norm() < self.threshold)
    }

    fn amplitude(&self, idx: usize) -> f64 {
        match self.secondary {
            Some(s) => self.primary[idx].norm().min(s[idx].norm()),
            None => self.primary[idx].norm(),
        }
    }

    /// Index of a closed ring of nodes, or `None` if the ring carries no defect.
    fn measure(&self, ring: &[usize]) -> Option<(i64, f64)> {
        let values: Vec<Complex64> = ring.iter().map(|&i| self.primary[i]).collect();
        let index = ring_winding(&values);
        if index == 0 {
            return None;
        }
        if let Some(sec) = self.secondary {
            let values: Vec<Complex64> = ring.iter().map(|&i| sec[i]).collect();
            if ring_winding(&values) == 0 {
                return None;
            }
        }
        let confidence = ring.iter().map(|&i| self.amplitude(i)).fold(f64::INFINITY, f64::min);
        Some((index, confidence))
    }

    fn scan(&self, kind: DefectKind) -> Vec<DefectRecord> {
        let [nx, ny, _] = self.grid.dims;
        let plaquettes = (0..(nx - 1) * (ny - 1)).into_par_iter().filter_map(|p| {
            let (i, j) = (p % (nx - 1), p / (nx - 1));
            let ring = [self.idx(i, j), self.idx(i + 1, j), self.idx(i + 1, j + 1), self.idx(i, j + 1)];
            if ring.iter().any(|&r| self.primary[r].norm() < self.threshold) {
                return None;
            }
            let (index, confidence) = self.measure(&ring)?;
            let a = self.grid.position(i, j, self.k);
            let b = self.grid.position(i + 1, j + 1, self.k);
            Some(DefectRecord {
                kind,
                position: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), a[2]],
                index: Ratio::from_integer(index),
                confidence,
            })
        });
        let nodes = (0..nx * ny).into_par_iter().filter_map(|p| {
            let (i, j) = (p % nx, p / nx);
            if i == 0 || j == 0 || i + 1 >= nx || j + 1 >= ny || !self.is_zero(self.idx(i, j)) {
                return None;
            }
            let ring = [
                self.idx(i - 1, j - 1),
                self.idx(i, j - 1),
                self.idx(i + 1, j - 1),
                self.idx(i + 1, j),
                self.idx(i + 1, j + 1),
                self.idx(i, j + 1),
                self.idx(i - 1, j + 1),
                self.idx(i - 1, j),
            ];
            if ring.iter().any(|&r| self.primary[r].norm() < self.threshold) {
                return None;
            }
            let (index, confidence) = self.measure(&ring)?;
            Some(DefectRecord {
                kind,
                position: self.grid.position(i, j, self.k),
                index: Ratio::from_integer(index),
                confidence,
            })
        });
        let mut records: Vec<DefectRecord> = plaquettes.chain(nodes).collect();
        records.sort_by(|a, b| {
            a.position[0]
                .total_cmp(&b.position[0])
                .then(a.position[1].total_cmp(&b.position[1]))
                .then(a.position[2].total_cmp(&b.position[2]))
        });
        records
    }
}

fn check_slice(grid: &GridSpec, z_slice: usize) -> Result<()> {
    grid.require_axis(crate::grid::Axis::X, 2)?;
    grid.require_axis(crate::grid::Axis::Y, 2)?;
    if z_slice >= grid.dims[2] {
        return Err(Error::InvalidParameter(format!(
            "slice {z_slice} is outside 0..{}",
            grid.dims[2]
        )));
    }
    Ok(())
}

fn slice_amplitudes(grid: &GridSpec, k: usize, amp: impl Fn(usize) -> f64) -> Vec<f64> {
    let [nx, ny, _] = grid.dims;
    (0..nx * ny).map(|p| amp(grid.index(p % nx, p / nx, k))).collect()
}

/// Phase singularities of a scalar field in slice `z_slice`, sorted by position.
pub fn find_dislocations(field: &ComplexScalarField, z_slice: usize) -> Result<Vec<DefectRecord>> {
    check_slice(&field.grid, z_slice)?;
    let scale = median(slice_amplitudes(&field.grid, z_slice, |i| field.values[i].norm()));
    let slice = Slice {
        grid: &field.grid,
        k: z_slice,
        primary: &field.values,
        secondary: None,
        threshold: TOL_AMP * scale,
    };
    Ok(slice.scan(DefectKind::Dislocation))
}

/// Lines where `Ax = Ay = 0` crossing slice `z_slice`; the index is the winding of `Ax`.
pub fn find_disclinations(field: &PotentialField, z_slice: usize) -> Result<Vec<DefectRecord>> {
    check_slice(&field.grid, z_slice)?;
    let ax = field.component(Component::Ax);
    let ay = field.component(Component::Ay);
    let scale = median(slice_amplitudes(&field.grid, z_slice, |i| ax[i].norm().hypot(ay[i].norm())));
    let slice = Slice {
        grid: &field.grid,
        k: z_slice,
        primary: ax,
        secondary: Some(ay),
        threshold: TOL_AMP * scale,
    };
    Ok(slice.scan(DefectKind::Disclination))
}
