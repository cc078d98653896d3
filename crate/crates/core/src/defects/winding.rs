use std::f64::consts::PI;

use num_complex::Complex64;

use super::TOL_AMP;
use crate::error::{Error, Result};
use crate::field::ComplexScalarField;

#[derive(Clone, Debug, PartialEq)]
enum Vertices {
    Nodes(Vec<[usize; 3]>),
    Points(Vec<[f64; 3]>),
}

/// Closed polyline (first vertex repeated at the end), either through grid
/// nodes or through continuous points. Counterclockwise about +z is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPath {
    vertices: Vertices,
}

impl LoopPath {
    pub fn from_nodes(nodes: Vec<[usize; 3]>) -> Result<Self> {
        let xy: Vec<[f64; 2]> = nodes.iter().map(|n| [n[0] as f64, n[1] as f64]).collect();
        validate(&xy, nodes.first() == nodes.last())?;
        Ok(LoopPath {
            vertices: Vertices::Nodes(nodes),
        })
    }

    pub fn from_points(points: Vec<[f64; 3]>) -> Result<Self> {
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLoop("non-finite vertex".into()));
        }
        let xy: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
        validate(&xy, points.first() == points.last())?;
        Ok(LoopPath {
            vertices: Vertices::Points(points),
        })
    }

    /// Counterclockwise circle of `vertices` distinct points in the plane `z`.
    pub fn circle(center: [f64; 2], radius: f64, vertices: usize, z: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidLoop(format!("radius {radius} must be positive")));
        }
        let mut pts: Vec<[f64; 3]> = (0..vertices)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / vertices as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin(), z]
            })
            .collect();
        if let Some(&first) = pts.first() {
            pts.push(first);
        }
        Self::from_points(pts)
    }

    /// Counterclockwise perimeter of the node rectangle `[i0, i1] x [j0, j1]` in slice `k`,
    /// visiting every boundary node.
    pub fn node_rectangle(i0: usize, j0: usize, i1: usize, j1: usize, k: usize) -> Result<Self> {
        if i1 <= i0 || j1 <= j0 {
            return Err(Error::InvalidLoop("rectangle must have positive extent".into()));
        }
        let mut nodes = Vec::new();
        nodes.extend((i0..i1).map(|i| [i, j0, k]));
        nodes.extend((j0..j1).map(|j| [i1, j, k]));
        nodes.extend((i0 + 1..=i1).rev().map(|i| [i, j1, k]));
        nodes.extend((j0 + 1..=j1).rev().map(|j| [i0, j, k]));
        nodes.push([i0, j0, k]);
        Self::from_nodes(nodes)
    }

    pub fn reversed(&self) -> Self {
        let vertices = match &self.vertices {
            Vertices::Nodes(v) => Vertices::Nodes(v.iter().rev().copied().collect()),
            Vertices::Points(v) => Vertices::Points(v.iter().rev().copied().collect()),
        };
        LoopPath { vertices }
    }

    /// Number of vertices including the repeated closing vertex.
    pub fn len(&self) -> usize {
        match &self.vertices {
            Vertices::Nodes(v) => v.len(),
            Vertices::Points(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Field values at the loop vertices (interpolated for continuous points).
    pub fn values(&self, field: &ComplexScalarField) -> Result<Vec<Complex64>> {
        match &self.vertices {
            Vertices::Nodes(nodes) => nodes
                .iter()
                .map(|&[i, j, k]| {
                    let d = field.grid.dims;
                    if i >= d[0] || j >= d[1] || k >= d[2] {
                        Err(Error::InvalidLoop(format!("node ({i}, {j}, {k}) is outside the grid")))
                    } else {
                        Ok(field.at(i, j, k))
                    }
                })
                .collect(),
            Vertices::Points(points) => points.iter().map(|p| field.interpolate(*p)).collect(),
        }
    }

    /// Vertex positions in the xy plane (grid-index units for node loops).
    pub fn planar_vertices(&self) -> Vec<[f64; 2]> {
        match &self.vertices {
            Vertices::Nodes(v) => v.iter().map(|n| [n[0] as f64, n[1] as f64]).collect(),
            Vertices::Points(v) => v.iter().map(|p| [p[0], p[1]]).collect(),
        }
    }
}

fn validate(xy: &[[f64; 2]], closed: bool) -> Result<()> {
    if !closed || xy.len() < 2 {
        return Err(Error::InvalidLoop("first and last vertex must coincide".into()));
    }
    let ring = &xy[..xy.len() - 1];
    let mut distinct: Vec<[f64; 2]> = ring.to_vec();
    distinct.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    distinct.dedup();
    if distinct.len() != ring.len() {
        return Err(Error::InvalidLoop("repeated vertex".into()));
    }
    if ring.len() < 4 {
        return Err(Error::InvalidLoop(format!("{} distinct vertices, need at least 4", ring.len())));
    }
    let n = ring.len();
    for a in 0..n {
        for b in a + 2..n {
            if a == 0 && b == n - 1 {
                continue;
            }
            if segments_intersect(xy[a], xy[a + 1], xy[b], xy[b + 1]) {
                return Err(Error::InvalidLoop(format!("segments {a} and {b} intersect")));
            }
        }
    }
    Ok(())
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> bool {
    r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Winding number of a closed sequence of complex values (first = last).
pub fn winding_of_values(values: &[Complex64], tol_amp: f64) -> Result<i64> {
    if let Some((vertex, v)) = values.iter().enumerate().find(|(_, v)| !(v.norm() > tol_amp)) {
        return Err(Error::NearZeroOnLoop {
            vertex,
            amplitude: v.norm(),
            tolerance: tol_amp,
        });
    }
    let mut total = 0.0;
    for (vertex, pair) in values.windows(2).enumerate() {
        let step = crate::grid::wrap_angle((pair[1] * pair[0].conj()).arg());
        if (step.abs() - PI).abs() <= 1e-9 {
            return Err(Error::AmbiguousStep { vertex });
        }
        total += step;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-9 {
        return Err(Error::NonIntegerWinding(turns));
    }
    Ok(rounded as i64)
}

/// Phase winding of `field` around `path`, with the default amplitude tolerance.
pub fn phase_winding(field: &ComplexScalarField, path: &LoopPath) -> Result<i64> {
    phase_winding_with_tolerance(field, path, TOL_AMP)
}

pub fn phase_winding_with_tolerance(field: &ComplexScalarField, path: &LoopPath, tol_amp: f64) -> Result<i64> {
    winding_of_values(&path.values(field)?, tol_amp)
}
