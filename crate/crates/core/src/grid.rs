//! Regular rectilinear grids and space-time points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Uniform grid geometry. Node `(i, j, k)` sits at `origin + (i dx, j dy, k dz)`
/// and nodes are stored with x varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
}

impl GridSpec {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        let grid = GridSpec {
            dims,
            spacing,
            origin,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid with `dims` nodes whose node positions are symmetric about `center`.
    pub fn centered(dims: [usize; 3], spacing: [f64; 3], center: [f64; 3]) -> Result<Self> {
        let mut origin = [0.0; 3];
        for a in 0..3 {
            origin[a] = center[a] - 0.5 * (dims[a].saturating_sub(1)) as f64 * spacing[a];
        }
        Self::new(dims, spacing, origin)
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..3 {
            if self.dims[a] == 0 {
                return Err(Error::InvalidGrid(format!("dims[{a}] must be positive")));
            }
            if !(self.spacing[a].is_finite() && self.spacing[a] > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "spacing[{a}] = {} must be finite and positive",
                    self.spacing[a]
                )));
            }
            if !self.origin[a].is_finite() {
                return Err(Error::InvalidGrid(format!("origin[{a}] is not finite")));
            }
        }
        self.dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGrid("node count overflows".into()))?;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
            self.origin[2] + k as f64 * self.spacing[2],
        ]
    }

    pub fn position_of(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        self.position(i, j, k)
    }

    /// Index stride between neighbours along `axis`.
    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => 1,
            Axis::Y => self.dims[0],
            Axis::Z => self.dims[0] * self.dims[1],
        }
    }

    pub fn require_axis(&self, axis: Axis, required: usize) -> Result<()> {
        let len = self.dims[axis.index()];
        if len < required {
            return Err(Error::Dimension {
                axis: axis.name(),
                len,
                required,
            });
        }
        Ok(())
    }

    /// Interior nodes: at least two cells from every boundary of each axis
    /// that has more than one node. Single-node axes impose no restriction.
    pub fn is_interior(&self, i: usize, j: usize, k: usize) -> bool {
        [i, j, k].iter().zip(self.dims.iter()).all(|(&n, &len)| {
            len == 1 || (n >= 2 && n + 2 < len)
        })
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&idx| {
                let [i, j, k] = self.unravel(idx);
                self.is_interior(i, j, k)
            })
            .collect()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }
}

/// A point in space and time, with a cylindrical view about the z axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        SpaceTimePoint { x, y, z, t }
    }

    pub fn at(position: [f64; 3], t: f64) -> Self {
        SpaceTimePoint::new(position[0], position[1], position[2], t)
    }

    /// Point given by cylindrical coordinates.
    pub fn cylindrical(r: f64, theta: f64, z: f64, t: f64) -> Self {
        SpaceTimePoint::new(r * theta.cos(), r * theta.sin(), z, t)
    }

    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth in (-pi, pi]; 0 on the axis.
    pub fn theta(&self) -> f64 {
        let th = self.y.atan2(self.x);
        if th == -PI {
            PI
        } else if self.x == 0.0 && self.y == 0.0 {
            0.0
        } else {
            th
        }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn shifted(&self, axis: Axis, delta: f64) -> Self {
        let mut p = *self;
        match axis {
            Axis::X => p.x += delta,
            Axis::Y => p.y += delta,
            Axis::Z => p.z += delta,
        }
        p
    }

    pub fn at_time(&self, t: f64) -> Self {
        SpaceTimePoint { t, ..*self }
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = a - two_pi * (a / two_pi).round();
    if w <= -PI {
        w += two_pi;
    } else if w > PI {
        w -= two_pi;
    }
    w
}
