//! Closed-form field generators.
//!
//! Every model here is monochromatic: its value at `(x, t)` is `g(x) e^{-i omega t}`.
//! That gives exact time derivatives for free (`d/dt = -i omega`), which the
//! gauge checks rely on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Component, FieldKind};
use crate::grid::{wrap_angle, SpaceTimePoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn unit_speed() -> f64 {
    1.0
}

/// Parameters shared by the disclination family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWaveParams")]
pub struct WaveParams {
    /// Wavenumber (rad / length).
    pub k: f64,
    /// Angular frequency (rad / time).
    pub omega: f64,
    /// Wave speed.
    pub c: f64,
    /// Transverse amplitude coefficient.
    pub a: f64,
    /// Axial amplitude coefficient.
    pub az: Complex64,
}

#[derive(Deserialize)]
struct RawWaveParams {
    k: f64,
    omega: Option<f64>,
    #[serde(default = "unit_speed")]
    c: f64,
    a: Option<f64>,
    #[serde(default = "one")]
    az: Complex64,
}

impl TryFrom<RawWaveParams> for WaveParams {
    type Error = Error;

    fn try_from(raw: RawWaveParams) -> Result<Self> {
        WaveParams::new(
            raw.k,
            raw.omega.unwrap_or(raw.k * raw.c),
            raw.c,
            raw.a.unwrap_or(raw.k),
            raw.az,
        )
    }
}

impl WaveParams {
    pub fn new(k: f64, omega: f64, c: f64, a: f64, az: Complex64) -> Result<Self> {
        let params = WaveParams { k, omega, c, a, az };
        params.validate()?;
        Ok(params)
    }

    /// On-shell parameters (`omega = k c`) with the literal amplitude `a = k`
    /// and unit axial amplitude.
    pub fn on_shell(k: f64, c: f64) -> Result<Self> {
        Self::new(k, k * c, c, k, one())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k", self.k), ("omega", self.omega), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
        if !self.a.is_finite() || !self.az.is_finite() {
            return Err(Error::InvalidParameter("amplitudes must be finite".into()));
        }
        Ok(())
    }

    pub fn on_shell_flag(&self) -> bool {
        (self.omega - self.k * self.c).abs() <= 1e-12 * self.omega
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }
}

/// The pure screw disclination in the vector potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisclinationModel {
    #[serde(flatten)]
    pub params: WaveParams,
}

impl DisclinationModel {
    pub fn new(params: WaveParams) -> Self {
        DisclinationModel { params }
    }

    /// `(Ax, Ay, Az, Phi)` at `point`.
    pub fn eval(&self, point: &SpaceTimePoint) -> [Complex64; 4] {
        let WaveParams { k, omega, c, a, az } = self.params;
        let carrier = Complex64::cis(k * point.z - omega * point.t);
        // r e^{i theta} = x + i y, so the transverse part is exactly linear.
        let ax = a * Complex64::new(point.x, point.y) * carrier;
        let ay = I * ax;
        let az = az * carrier;
        let phi = (k * c / omega) * az;
        [ax, ay, az, phi]
    }

    pub fn chi(&self, point: &SpaceTimePoint) -> f64 {
        chi(&self.params, point)
    }

    /// Azimuth of the real transverse field at `point`.
    pub fn azimuth(&self, point: &SpaceTimePoint) -> Result<f64> {
        let [ax, ay, _, _] = self.eval(point);
        azimuth_beta(ax, ay)
    }
}

/// Screw dislocation `a r^{|n|} e^{i(n theta + k z - omega t)}` about `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DislocationModel {
    pub n: i32,
    pub k: f64,
    pub omega: f64,
    #[serde(default = "unit_amplitude")]
    pub a: f64,
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default = "unit_speed")]
    pub c: f64,
}

fn unit_amplitude() -> f64 {
    1.0
}

impl DislocationModel {
    pub fn new(n: i32, k: f64, omega: f64, a: f64) -> Self {
        DislocationModel {
            n,
            k,
            omega,
            a,
            center: [0.0, 0.0],
            c: 1.0,
        }
    }

    pub fn centered_at(mut self, x: f64, y: f64) -> Self {
        self.center = [x, y];
        self
    }

    pub fn eval(&self, point: &SpaceTimePoint) -> Complex64 {
        self.value_and_gradient(point).0
    }

    fn value_and_gradient(&self, p: &SpaceTimePoint) -> (Complex64, [Complex64; 3]) {
        let carrier = Complex64::cis(self.k * p.z - self.omega * p.t);
        let (w, dwdy) = core_factor(self.n, self.center, p);
        let m = self.n.unsigned_abs() as i32;
        let value = self.a * w.powi(m) * carrier;
        let (gx, gy) = if m == 0 {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            let d = self.a * f64::from(m) * w.powi(m - 1) * carrier;
            (d, d * dwdy)
        };
        (value, [gx, gy, I * self.k * value])
    }
}

/// `w = (x - x0) + i s (y - y0)` and `dw/dy = i s`, with `s` the sign of the charge.
fn core_factor(n: i32, center: [f64; 2], p: &SpaceTimePoint) -> (Complex64, Complex64) {
    let s = if n < 0 { -1.0 } else { 1.0 };
    (
        Complex64::new(p.x - center[0], s * (p.y - center[1])),
        Complex64::new(0.0, s),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Charge {
    pub n: i32,
    pub center: [f64; 2],
}

/// Product of several dislocation cores sharing one carrier wave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DislocationSet {
    pub charges: Vec<Charge>,
    pub k: f64,
    pub omega: f64,
    #[serde(default = "unit_amplitude")]
    pub a: f64,
    #[serde(default = "unit_speed")]
    pub c: f64,
}

impl DislocationSet {
    pub fn total_charge(&self) -> i64 {
        self.charges.iter().map(|q| i64::from(q.n)).sum()
    }

    fn value_and_gradient(&self, p: &SpaceTimePoint) -> (Complex64, [Complex64; 3]) {
        let carrier = Complex64::cis(self.k * p.z - self.omega * p.t);
        let factors: Vec<(Complex64, Complex64, i32)> = self
            .charges
            .iter()
            .map(|q| {
                let (w, dwdy) = core_factor(q.n, q.center, p);
                (w, dwdy, q.n.unsigned_abs() as i32)
            })
            .collect();
        let product: Complex64 = factors.iter().map(|(w, _, m)| w.powi(*m)).product();
        let mut gx = Complex64::new(0.0, 0.0);
        let mut gy = Complex64::new(0.0, 0.0);
        for (j, (wj, dwdy, mj)) in factors.iter().enumerate() {
            if *mj == 0 {
                continue;
            }
            let others: Complex64 = factors
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, (w, _, m))| w.powi(*m))
                .product();
            let d = f64::from(*mj) * wj.powi(mj - 1) * others;
            gx += d;
            gy += d * dwdy;
        }
        let scale = self.a * carrier;
        let value = scale * product;
        (value, [scale * gx, scale * gy, I * self.k * value])
    }
}

/// Scalar plane wave `amplitude e^{i(k.x - omega t)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneWave {
    pub wavevector: [f64; 3],
    pub omega: f64,
    #[serde(default = "one")]
    pub amplitude: Complex64,
    #[serde(default = "unit_speed")]
    pub c: f64,
}

impl PlaneWave {
    pub fn along_z(k: f64, omega: f64) -> Self {
        PlaneWave {
            wavevector: [0.0, 0.0, k],
            omega,
            amplitude: one(),
            c: 1.0,
        }
    }

    fn phase(&self, p: &SpaceTimePoint) -> f64 {
        let [kx, ky, kz] = self.wavevector;
        kx * p.x + ky * p.y + kz * p.z - self.omega * p.t
    }

    fn value_and_gradient(&self, p: &SpaceTimePoint) -> (Complex64, [Complex64; 3]) {
        let value = self.amplitude * Complex64::cis(self.phase(p));
        let [kx, ky, kz] = self.wavevector;
        (value, [I * kx * value, I * ky * value, I * kz * value])
    }
}

/// Four-component plane wave `polarization e^{i(k.x - omega t)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizedWave {
    pub polarization: [Complex64; 4],
    pub wavevector: [f64; 3],
    pub omega: f64,
    #[serde(default = "unit_speed")]
    pub c: f64,
}

/// Closed-form scalar or potential model, serialised as a tagged JSON descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AnalyticModel {
    Constant {
        value: Complex64,
    },
    PlaneWave(PlaneWave),
    Dislocation(DislocationModel),
    Dislocations(DislocationSet),
    Disclination(DisclinationModel),
    PolarizedWave(PolarizedWave),
    /// `A = grad psi`, `Phi = -(1/c) d psi / dt`.
    PureGauge {
        psi: Box<AnalyticModel>,
        #[serde(default = "unit_speed")]
        c: f64,
    },
    /// Another potential model with some components forced to zero.
    Zeroed {
        base: Box<AnalyticModel>,
        components: Vec<Component>,
    },
}

/// Value of a model at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelValue {
    Scalar(Complex64),
    Potential([Complex64; 4]),
}

impl ModelValue {
    pub fn components(&self) -> Vec<Complex64> {
        match self {
            ModelValue::Scalar(v) => vec![*v],
            ModelValue::Potential(v) => v.to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }

    fn map(self, f: impl Fn(Complex64) -> Complex64) -> ModelValue {
        match self {
            ModelValue::Scalar(v) => ModelValue::Scalar(f(v)),
            ModelValue::Potential(v) => ModelValue::Potential(v.map(f)),
        }
    }

    pub(crate) fn combine(self, other: ModelValue, f: impl Fn(Complex64, Complex64) -> Complex64) -> ModelValue {
        match (self, other) {
            (ModelValue::Scalar(a), ModelValue::Scalar(b)) => ModelValue::Scalar(f(a, b)),
            (ModelValue::Potential(a), ModelValue::Potential(b)) => {
                ModelValue::Potential(std::array::from_fn(|i| f(a[i], b[i])))
            }
            _ => panic!("cannot combine scalar and potential values"),
        }
    }
}

impl AnalyticModel {
    pub fn kind(&self) -> FieldKind {
        match self {
            AnalyticModel::Constant { .. }
            | AnalyticModel::PlaneWave(_)
            | AnalyticModel::Dislocation(_)
            | AnalyticModel::Dislocations(_) => FieldKind::Scalar,
            AnalyticModel::Disclination(_)
            | AnalyticModel::PolarizedWave(_)
            | AnalyticModel::PureGauge { .. } => FieldKind::Potential,
            AnalyticModel::Zeroed { base, .. } => base.kind(),
        }
    }

    /// Validate parameters and structural requirements of a descriptor.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must be finite and positive")))
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must be finite and non-negative")))
            }
        };
        match self {
            AnalyticModel::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidParameter("constant value must be finite".into()));
                }
            }
            AnalyticModel::PlaneWave(w) => {
                non_negative("omega", w.omega)?;
                positive("c", w.c)?;
            }
            AnalyticModel::Dislocation(d) => {
                non_negative("omega", d.omega)?;
                positive("c", d.c)?;
            }
            AnalyticModel::Dislocations(d) => {
                non_negative("omega", d.omega)?;
                positive("c", d.c)?;
            }
            AnalyticModel::Disclination(d) => d.params.validate()?,
            AnalyticModel::PolarizedWave(w) => {
                non_negative("omega", w.omega)?;
                positive("c", w.c)?;
            }
            AnalyticModel::PureGauge { psi, c } => {
                positive("c", *c)?;
                psi.validate()?;
                if psi.kind() != FieldKind::Scalar {
                    return Err(Error::UnsupportedModel(
                        "pure gauge generator must be a scalar model".into(),
                    ));
                }
            }
            AnalyticModel::Zeroed { base, .. } => {
                base.validate()?;
                if base.kind() != FieldKind::Potential {
                    return Err(Error::UnsupportedModel(
                        "only potential models have components to zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn angular_frequency(&self) -> f64 {
        match self {
            AnalyticModel::Constant { .. } => 0.0,
            AnalyticModel::PlaneWave(w) => w.omega,
            AnalyticModel::Dislocation(d) => d.omega,
            AnalyticModel::Dislocations(d) => d.omega,
            AnalyticModel::Disclination(d) => d.params.omega,
            AnalyticModel::PolarizedWave(w) => w.omega,
            AnalyticModel::PureGauge { psi, .. } => psi.angular_frequency(),
            AnalyticModel::Zeroed { base, .. } => base.angular_frequency(),
        }
    }

    pub fn wave_speed(&self) -> f64 {
        match self {
            AnalyticModel::Constant { .. } => 1.0,
            AnalyticModel::PlaneWave(w) => w.c,
            AnalyticModel::Dislocation(d) => d.c,
            AnalyticModel::Dislocations(d) => d.c,
            AnalyticModel::Disclination(d) => d.params.c,
            AnalyticModel::PolarizedWave(w) => w.c,
            AnalyticModel::PureGauge { c, .. } => *c,
            AnalyticModel::Zeroed { base, .. } => base.wave_speed(),
        }
    }

    pub fn eval(&self, p: &SpaceTimePoint) -> ModelValue {
        match self {
            AnalyticModel::Constant { value } => ModelValue::Scalar(*value),
            AnalyticModel::PlaneWave(w) => ModelValue::Scalar(w.value_and_gradient(p).0),
            AnalyticModel::Dislocation(d) => ModelValue::Scalar(d.eval(p)),
            AnalyticModel::Dislocations(d) => ModelValue::Scalar(d.value_and_gradient(p).0),
            AnalyticModel::Disclination(d) => ModelValue::Potential(d.eval(p)),
            AnalyticModel::PolarizedWave(w) => {
                let [kx, ky, kz] = w.wavevector;
                let carrier = Complex64::cis(kx * p.x + ky * p.y + kz * p.z - w.omega * p.t);
                ModelValue::Potential(w.polarization.map(|e| e * carrier))
            }
            AnalyticModel::PureGauge { psi, c } => match pure_gauge_from_scalar(psi, p, *c) {
                Ok(v) => ModelValue::Potential(v),
                Err(_) => ModelValue::Potential([Complex64::new(f64::NAN, f64::NAN); 4]),
            },
            AnalyticModel::Zeroed { base, components } => {
                let mut v = base.eval(p);
                if let ModelValue::Potential(ref mut c) = v {
                    for comp in components {
                        c[comp.index()] = Complex64::new(0.0, 0.0);
                    }
                }
                v
            }
        }
    }

    pub fn eval_scalar(&self, p: &SpaceTimePoint) -> Result<Complex64> {
        match self.eval(p) {
            ModelValue::Scalar(v) => Ok(v),
            ModelValue::Potential(_) => Err(Error::WrongKind {
                expected: "scalar",
                found: "potential",
            }),
        }
    }

    pub fn eval_potential(&self, p: &SpaceTimePoint) -> Result<[Complex64; 4]> {
        match self.eval(p) {
            ModelValue::Potential(v) => Ok(v),
            ModelValue::Scalar(_) => Err(Error::WrongKind {
                expected: "potential",
                found: "scalar",
            }),
        }
    }

    /// Exact spatial gradient of a scalar model.
    pub fn scalar_gradient(&self, p: &SpaceTimePoint) -> Result<[Complex64; 3]> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            AnalyticModel::Constant { .. } => Ok([zero; 3]),
            AnalyticModel::PlaneWave(w) => Ok(w.value_and_gradient(p).1),
            AnalyticModel::Dislocation(d) => Ok(d.value_and_gradient(p).1),
            AnalyticModel::Dislocations(d) => Ok(d.value_and_gradient(p).1),
            _ => Err(Error::UnsupportedModel(format!(
                "{} model has no analytic scalar gradient",
                self.name()
            ))),
        }
    }

    /// Exact time derivative `-i omega f`.
    pub fn time_derivative_analytic(&self, p: &SpaceTimePoint) -> ModelValue {
        let factor = -I * self.angular_frequency();
        self.eval(p).map(|v| factor * v)
    }

    /// Exact second time derivative `-omega^2 f`.
    pub fn second_time_derivative_analytic(&self, p: &SpaceTimePoint) -> ModelValue {
        let w = self.angular_frequency();
        self.eval(p).map(|v| -(w * w) * v)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticModel::Constant { .. } => "constant",
            AnalyticModel::PlaneWave(_) => "plane_wave",
            AnalyticModel::Dislocation(_) => "dislocation",
            AnalyticModel::Dislocations(_) => "dislocations",
            AnalyticModel::Disclination(_) => "disclination",
            AnalyticModel::PolarizedWave(_) => "polarized_wave",
            AnalyticModel::PureGauge { .. } => "pure_gauge",
            AnalyticModel::Zeroed { .. } => "zeroed",
        }
    }

    /// The disclination this model is built from, if any.
    pub fn as_disclination(&self) -> Option<&DisclinationModel> {
        match self {
            AnalyticModel::Disclination(d) => Some(d),
            _ => None,
        }
    }
}

/// `theta + k z - omega t`, not reduced modulo 2 pi.
pub fn chi(params: &WaveParams, point: &SpaceTimePoint) -> f64 {
    point.theta() + params.k * point.z - params.omega * point.t
}

/// Direction of the real transverse vector `(Re Ax, Re Ay)`, in (-pi, pi].
pub fn azimuth_beta(ax: Complex64, ay: Complex64) -> Result<f64> {
    if ax.re == 0.0 && ay.re == 0.0 {
        return Err(Error::IndeterminateAzimuth);
    }
    Ok(wrap_angle(ay.re.atan2(ax.re)))
}

/// Pure-gauge potential `(grad psi, -(1/c) d psi / dt)` generated by a scalar model.
pub fn pure_gauge_from_scalar(
    psi: &AnalyticModel,
    point: &SpaceTimePoint,
    c: f64,
) -> Result<[Complex64; 4]> {
    let [gx, gy, gz] = psi.scalar_gradient(point)?;
    let dpsi_dt = match psi.time_derivative_analytic(point) {
        ModelValue::Scalar(v) => v,
        ModelValue::Potential(_) => {
            return Err(Error::UnsupportedModel("pure gauge generator must be scalar".into()))
        }
    };
    Ok([gx, gy, gz, -dpsi_dt / c])
}
