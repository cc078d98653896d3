//! Sampled field containers.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpaceTimePoint};
use crate::models::{AnalyticModel, ModelValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Scalar,
    Potential,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Potential => "potential",
        }
    }

    pub fn component_count(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Potential => 4,
        }
    }
}

/// Components of the four-potential, in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Ax,
    Ay,
    Az,
    Phi,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::Ax, Component::Ay, Component::Az, Component::Phi];

    pub fn index(self) -> usize {
        match self {
            Component::Ax => 0,
            Component::Ay => 1,
            Component::Az => 2,
            Component::Phi => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexScalarField {
    pub grid: GridSpec,
    pub time: f64,
    pub values: Vec<Complex64>,
}

impl ComplexScalarField {
    pub fn new(grid: GridSpec, time: f64, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let [i, j, k] = grid.unravel(idx);
            return Err(Error::Sampling { i, j, k });
        }
        Ok(ComplexScalarField { grid, time, values })
    }

    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn([f64; 3]) -> Complex64 + Sync) -> Result<Self> {
        let values = (0..grid.node_count())
            .into_par_iter()
            .map(|idx| f(grid.position_of(idx)))
            .collect();
        Self::new(grid, time, values)
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[self.grid.index(i, j, k)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync + Send) -> ComplexScalarField {
        ComplexScalarField {
            grid: self.grid,
            time: self.time,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
        }
    }

    /// Bilinear/trilinear interpolation at a continuous position. Axes with a
    /// single node are not interpolated.
    pub fn interpolate(&self, position: [f64; 3]) -> Result<Complex64> {
        let g = &self.grid;
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            if g.dims[a] == 1 {
                continue;
            }
            let s = (position[a] - g.origin[a]) / g.spacing[a];
            let max = (g.dims[a] - 1) as f64;
            if !(s >= -1e-9 && s <= max + 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "position {position:?} is outside the grid"
                )));
            }
            let s = s.clamp(0.0, max);
            let b = (s.floor() as usize).min(g.dims[a] - 2);
            base[a] = b;
            frac[a] = s - b as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            let mut skip = false;
            for a in 0..3 {
                let bit = (corner >> a) & 1;
                if g.dims[a] == 1 {
                    if bit == 1 {
                        skip = true;
                    }
                    idx[a] = 0;
                    continue;
                }
                idx[a] = base[a] + bit;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if skip || w == 0.0 {
                continue;
            }
            acc += w * self.at(idx[0], idx[1], idx[2]);
        }
        Ok(acc)
    }
}

/// Four-component potential samples `(Ax, Ay, Az, Phi)` on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    pub grid: GridSpec,
    pub time: f64,
    pub components: [Vec<Complex64>; 4],
}

impl PotentialField {
    pub fn new(grid: GridSpec, time: f64, components: [Vec<Complex64>; 4]) -> Result<Self> {
        grid.validate()?;
        for c in &components {
            if c.len() != grid.node_count() {
                return Err(Error::InvalidGrid(format!(
                    "component has {} values for {} nodes",
                    c.len(),
                    grid.node_count()
                )));
            }
            if let Some(idx) = c.iter().position(|v| !v.is_finite()) {
                let [i, j, k] = grid.unravel(idx);
                return Err(Error::Sampling { i, j, k });
            }
        }
        Ok(PotentialField {
            grid,
            time,
            components,
        })
    }

    pub fn component(&self, c: Component) -> &[Complex64] {
        &self.components[c.index()]
    }

    pub fn component_field(&self, c: Component) -> ComplexScalarField {
        ComplexScalarField {
            grid: self.grid,
            time: self.time,
            values: self.components[c.index()].clone(),
        }
    }

    pub fn with_component_zeroed(mut self, c: Component) -> Self {
        self.components[c.index()].iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        self
    }
}

fn sample_values(model: &AnalyticModel, grid: &GridSpec, t: f64) -> Result<Vec<ModelValue>> {
    grid.validate()?;
    let values: Vec<ModelValue> = (0..grid.node_count())
        .into_par_iter()
        .map(|idx| model.eval(&SpaceTimePoint::at(grid.position_of(idx), t)))
        .collect();
    if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
        let [i, j, k] = grid.unravel(idx);
        return Err(Error::Sampling { i, j, k });
    }
    Ok(values)
}

/// Evaluate a scalar model at every node of `grid` at time `t`.
pub fn sample_scalar(model: &AnalyticModel, grid: &GridSpec, t: f64) -> Result<ComplexScalarField> {
    if model.kind() != FieldKind::Scalar {
        return Err(Error::WrongKind {
            expected: "scalar",
            found: model.kind().name(),
        });
    }
    let values = sample_values(model, grid, t)?
        .into_iter()
        .map(|v| match v {
            ModelValue::Scalar(s) => s,
            ModelValue::Potential(_) => unreachable!("kind checked above"),
        })
        .collect();
    Ok(ComplexScalarField {
        grid: *grid,
        time: t,
        values,
    })
}

/// Evaluate a potential model at every node of `grid` at time `t`.
pub fn sample_potential(model: &AnalyticModel, grid: &GridSpec, t: f64) -> Result<PotentialField> {
    if model.kind() != FieldKind::Potential {
        return Err(Error::WrongKind {
            expected: "potential",
            found: model.kind().name(),
        });
    }
    let n = grid.node_count();
    let mut components: [Vec<Complex64>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
    for v in sample_values(model, grid, t)? {
        match v {
            ModelValue::Potential(p) => {
                for (c, x) in components.iter_mut().zip(p) {
                    c.push(x);
                }
            }
            ModelValue::Scalar(_) => unreachable!("kind checked above"),
        }
    }
    Ok(PotentialField {
        grid: *grid,
        time: t,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DisclinationModel, DislocationModel, PlaneWave, WaveParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_model_samples_constant() {
        let g = GridSpec::new([4, 3, 2], [0.5, 0.25, 1.0], [-1.0, 0.0, 2.0]).unwrap();
        let f = sample_scalar(&AnalyticModel::Constant { value: c(1.0, 0.0) }, &g, 0.3).unwrap();
        assert!(f.values.iter().all(|&v| v == c(1.0, 0.0)));
        assert_eq!(f.values.len(), 24);
    }

    #[test]
    fn dislocation_is_zero_at_center_node() {
        let g = GridSpec::centered([3, 3, 1], [1.0; 3], [0.0; 3]).unwrap();
        let m = AnalyticModel::Dislocation(DislocationModel::new(1, 1.0, 1.0, 1.0));
        let f = sample_scalar(&m, &g, 0.0).unwrap();
        assert_eq!(f.at(1, 1, 0), c(0.0, 0.0));
        assert!(f.at(0, 1, 0).norm() > 0.5);
    }

    #[test]
    fn plane_wave_at_pi() {
        let g = GridSpec::new([1, 1, 2], [1.0, 1.0, std::f64::consts::PI], [0.0; 3]).unwrap();
        let f = sample_scalar(&AnalyticModel::PlaneWave(PlaneWave::along_z(1.0, 1.0)), &g, 0.0).unwrap();
        assert!((f.at(0, 0, 1) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sampling_reproduces_model_bitwise() {
        let g = GridSpec::centered([5, 4, 3], [0.3, 0.2, 0.1], [0.1, 0.0, 0.2]).unwrap();
        let m = AnalyticModel::Disclination(DisclinationModel::new(WaveParams::on_shell(1.5, 1.0).unwrap()));
        let f = sample_potential(&m, &g, 0.7).unwrap();
        for idx in 0..g.node_count() {
            let v = m.eval_potential(&SpaceTimePoint::at(g.position_of(idx), 0.7)).unwrap();
            for comp in Component::ALL {
                assert_eq!(f.component(comp)[idx].re.to_bits(), v[comp.index()].re.to_bits());
                assert_eq!(f.component(comp)[idx].im.to_bits(), v[comp.index()].im.to_bits());
            }
        }
    }

    #[test]
    fn potential_samples_on_axis_and_unit_node() {
        let g = GridSpec::centered([3, 3, 3], [1.0; 3], [0.0; 3]).unwrap();
        let m = AnalyticModel::Disclination(DisclinationModel::new(WaveParams::on_shell(1.0, 1.0).unwrap()));
        let f = sample_potential(&m, &g, 0.0).unwrap();
        for k in 0..3 {
            let idx = g.index(1, 1, k);
            assert_eq!(f.component(Component::Ax)[idx], c(0.0, 0.0));
            assert_eq!(f.component(Component::Ay)[idx], c(0.0, 0.0));
        }
        let idx = g.index(2, 1, 1);
        assert_eq!(f.component(Component::Ax)[idx], c(1.0, 0.0));
        assert_eq!(f.component(Component::Ay)[idx], c(0.0, 1.0));
    }

    #[test]
    fn zero_potential_model() {
        let g = GridSpec::centered([3, 3, 3], [1.0; 3], [0.0; 3]).unwrap();
        let zero = AnalyticModel::PureGauge {
            psi: Box::new(AnalyticModel::Constant { value: c(3.0, 1.0) }),
            c: 1.0,
        };
        let f = sample_potential(&zero, &g, 1.0).unwrap();
        assert!(f.components.iter().flatten().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn kind_mismatch_and_non_finite() {
        let g = GridSpec::centered([3, 3, 1], [1.0; 3], [0.0; 3]).unwrap();
        let scalar = AnalyticModel::Constant { value: c(1.0, 0.0) };
        assert!(matches!(sample_potential(&scalar, &g, 0.0), Err(Error::WrongKind { .. })));
        let bad = AnalyticModel::Constant { value: c(f64::NAN, 0.0) };
        assert!(matches!(sample_scalar(&bad, &g, 0.0), Err(Error::Sampling { i: 0, j: 0, k: 0 })));
    }

    #[test]
    fn interpolation_is_exact_on_bilinear() {
        let g = GridSpec::centered([6, 5, 1], [0.4, 0.3, 1.0], [0.0; 3]).unwrap();
        let f = ComplexScalarField::from_fn(g, 0.0, |[x, y, _]| c(2.0 * x - y + 0.5 * x * y, x + 3.0)).unwrap();
        let v = f.interpolate([0.13, -0.21, 0.0]).unwrap();
        let (x, y) = (0.13, -0.21);
        assert!((v - c(2.0 * x - y + 0.5 * x * y, x + 3.0)).norm() < 1e-13);
        assert!(f.interpolate([5.0, 0.0, 0.0]).is_err());
    }
}
