use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type CurveFn = Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>;

const MIN_SINGULAR_DISTANCE: f64 = 1e-6;
const CLOSURE_TOL: f64 = 1e-12;

/// Continuous 1-form `a_x dx + a_y dy` with its known singular points.
#[derive(Clone)]
pub struct OneForm {
    ax: PlaneFn,
    ay: PlaneFn,
    pub singularities: Vec<[f64; 2]>,
}

impl OneForm {
    pub fn new(
        ax: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        ay: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        OneForm {
            ax: Arc::new(ax),
            ay: Arc::new(ay),
            singularities: Vec::new(),
        }
    }

    pub fn with_singularity(mut self, point: [f64; 2]) -> Self {
        self.singularities.push(point);
        self
    }

    /// `dθ = (-(y - y0) dx + (x - x0) dy) / r²` about `center`.
    pub fn angle(center: [f64; 2]) -> Self {
        let [x0, y0] = center;
        OneForm::new(
            move |x, y| -(y - y0) / ((x - x0).powi(2) + (y - y0).powi(2)),
            move |x, y| (x - x0) / ((x - x0).powi(2) + (y - y0).powi(2)),
        )
        .with_singularity(center)
    }

    /// `p dq` on the (q, p) phase plane.
    pub fn liouville() -> Self {
        OneForm::new(|_, p| p, |_, _| 0.0)
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        [(self.ax)(x, y), (self.ay)(x, y)]
    }
}

impl std::fmt::Debug for OneForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OneForm")
            .field("singularities", &self.singularities)
            .finish_non_exhaustive()
    }
}

/// Closed curve `γ: [0, 1] -> R²` with its derivative and sample count.
#[derive(Clone)]
pub struct ParametricCycle {
    curve: CurveFn,
    velocity: CurveFn,
    pub samples: usize,
}

impl std::fmt::Debug for ParametricCycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricCycle")
            .field("samples", &self.samples)
            .finish_non_exhaustive()
    }
}

impl ParametricCycle {
    pub fn new(
        curve: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        velocity: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        samples: usize,
    ) -> Result<Self> {
        if samples < 16 {
            return Err(Error::InvalidLoop(format!("{samples} samples, need at least 16")));
        }
        let (a, b) = (curve(0.0), curve(1.0));
        let gap = (a[0] - b[0]).hypot(a[1] - b[1]);
        let scale = a[0].abs().max(a[1].abs()).max(1.0);
        if !(gap <= CLOSURE_TOL * scale) {
            return Err(Error::InvalidLoop(format!("curve does not close (gap {gap:e})")));
        }
        Ok(ParametricCycle {
            curve: Arc::new(curve),
            velocity: Arc::new(velocity),
            samples,
        })
    }

    /// Circle traversed `turns` times; negative turns run clockwise.
    pub fn circle(center: [f64; 2], radius: f64, turns: i32, samples: usize) -> Result<Self> {
        Self::ellipse(center, radius, radius, turns, samples)
    }

    pub fn ellipse(center: [f64; 2], semi_x: f64, semi_y: f64, turns: i32, samples: usize) -> Result<Self> {
        if !(semi_x > 0.0 && semi_y > 0.0) || turns == 0 {
            return Err(Error::InvalidLoop("ellipse needs positive semi-axes and nonzero turns".into()));
        }
        let w = 2.0 * PI * f64::from(turns);
        let [cx, cy] = center;
        Self::new(
            move |s| {
                let (sn, cs) = (w * s).sin_cos();
                [cx + semi_x * cs, cy + semi_y * sn]
            },
            move |s| {
                let (sn, cs) = (w * s).sin_cos();
                [-w * semi_x * sn, w * semi_y * cs]
            },
            samples,
        )
    }

    /// Star-shaped curve `r(φ) = r0 + Σ a_k cos(kφ) + b_k sin(kφ)` about `center`,
    /// traversed `turns` times. Requires `r > 0` everywhere.
    pub fn star(
        center: [f64; 2],
        r0: f64,
        harmonics: Vec<(f64, f64)>,
        turns: i32,
        samples: usize,
    ) -> Result<Self> {
        if turns == 0 {
            return Err(Error::InvalidLoop("star cycle needs nonzero turns".into()));
        }
        let bound: f64 = harmonics.iter().map(|(a, b)| a.abs() + b.abs()).sum();
        if !(r0 > bound) {
            return Err(Error::InvalidLoop("star radius must stay positive".into()));
        }
        let w = 2.0 * PI * f64::from(turns);
        let [cx, cy] = center;
        let h = Arc::new(harmonics);
        let h2 = Arc::clone(&h);
        let radius = move |phi: f64, h: &[(f64, f64)]| {
            let mut r = r0;
            let mut dr = 0.0;
            for (k, (a, b)) in h.iter().enumerate() {
                let kf = (k + 1) as f64;
                let (sn, cs) = (kf * phi).sin_cos();
                r += a * cs + b * sn;
                dr += kf * (b * cs - a * sn);
            }
            (r, dr)
        };
        Self::new(
            move |s| {
                let phi = w * s;
                let (r, _) = radius(phi, &h);
                [cx + r * phi.cos(), cy + r * phi.sin()]
            },
            move |s| {
                let phi = w * s;
                let (r, dr) = radius(phi, &h2);
                let (sn, cs) = phi.sin_cos();
                [w * (dr * cs - r * sn), w * (dr * sn + r * cs)]
            },
            samples,
        )
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        (self.curve)(s)
    }

    pub fn velocity(&self, s: f64) -> [f64; 2] {
        (self.velocity)(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodIntegral {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// Composite rule with the full sample count.
    pub fine: f64,
    /// Composite rule with half the samples.
    pub coarse: f64,
    pub warning: Option<String>,
}

fn composite(form: &OneForm, cycle: &ParametricCycle, m: usize) -> f64 {
    let ds = 1.0 / m as f64;
    (0..m)
        .map(|j| {
            let s = j as f64 * ds;
            let [x, y] = cycle.point(s);
            let [vx, vy] = cycle.velocity(s);
            let [ax, ay] = form.eval(x, y);
            ax * vx + ay * vy
        })
        .sum::<f64>()
        * ds
}

/// `∮_γ ω` by the composite rule on the periodic parameter, extrapolated once
/// from `m/2` and `m` samples. A half-size level `m/4` drives a ratio test;
/// when the differences do not shrink a warning is attached.
pub fn period_integral(form: &OneForm, cycle: &ParametricCycle) -> Result<PeriodIntegral> {
    let m = cycle.samples;
    // proximity is checked on a grid finer than the quadrature
    let probe = 4 * m;
    for j in 0..probe {
        let [x, y] = cycle.point(j as f64 / probe as f64);
        for s in &form.singularities {
            let d = (x - s[0]).hypot(y - s[1]);
            if !(d > MIN_SINGULAR_DISTANCE) {
                return Err(Error::SingularityProximity { distance: d });
            }
        }
    }
    let fine = composite(form, cycle, m);
    let coarse = composite(form, cycle, m / 2);
    let coarser = composite(form, cycle, m / 4);
    let value = (4.0 * fine - coarse) / 3.0;
    let d1 = coarser - coarse;
    let d2 = coarse - fine;
    let floor = 1e-12 * fine.abs().max(1.0);
    let warning = if d2.abs() > floor && !(d1.abs() >= 3.0 * d2.abs()) {
        Some(format!(
            "quadrature not converging: successive differences {d1:e}, {d2:e}"
        ))
    } else {
        None
    };
    if !value.is_finite() {
        return Err(Error::SingularityProximity { distance: 0.0 });
    }
    Ok(PeriodIntegral {
        value,
        fine,
        coarse,
        warning,
    })
}

/// `∮ p dq` over the clockwise phase-space orbit of a harmonic oscillator with
/// energy `E`, frequency `ν` and mass `m`.
pub fn ws_integral(energy: f64, frequency: f64, mass: f64) -> Result<f64> {
    for (name, v) in [("energy", energy), ("frequency", frequency), ("mass", mass)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let q_amp = (2.0 * energy / mass).sqrt() / (2.0 * PI * frequency);
    let p_amp = (2.0 * mass * energy).sqrt();
    // clockwise in the (q, p) plane: q = A cos, p = -B sin
    let cycle = ParametricCycle::ellipse([0.0, 0.0], q_amp, p_amp, -1, 256)?;
    Ok(period_integral(&OneForm::liouville(), &cycle)?.value)
}
