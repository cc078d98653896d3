//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

use defectfield::defects::{
    axial_twist, pattern_rotation, pattern_rotation_rate, phase_winding, tifold_index, LoopPath,
};
use defectfield::forms::{period_integral, ws_integral, Chain, CubicalComplex, DiscreteForm, OneForm, ParametricCycle};
use defectfield::gauge::{
    convergence_order, electric_field, lorentz_residual, magnetic_field, padded_grid, transverse_divergence,
    vector_report, wave_residual, wave_residual_values, SampleSet, TimeStencil,
};
use defectfield::ledger::{PhotonLedger, UnitSystem};
use defectfield::models::{Charge, DislocationSet, PlaneWave};
use defectfield::{
    sample_potential, AnalyticModel, Component, DisclinationModel, DislocationModel, GridSpec, SpaceTimePoint,
    WaveParams,
};
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn disclination(k: f64, omega: f64, c: f64, a: f64, az: Complex64) -> DisclinationModel {
    DisclinationModel::new(WaveParams::new(k, omega, c, a, az).unwrap())
}

fn on_shell(k: f64) -> DisclinationModel {
    disclination(k, k, 1.0, k, Complex64::new(1.0, 0.0))
}

fn orbifold_index() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 129;
    let h = 0.05;
    let half = (n as f64 - 1.0) / 2.0 * h;
    let mut checked = 0;
    for trial in 0..2 {
        let k = rng.gen_range(0.5..2.0);
        let model = AnalyticModel::Disclination(on_shell(k));
        let z = rng.gen_range(-1.0..1.0);
        let t = rng.gen_range(0.0..5.0);
        let grid = GridSpec::centered([n, n, 1], [h, h, 1.0], [0.0, 0.0, z]).unwrap();
        let ax = sample_potential(&model, &grid, t).unwrap().component_field(Component::Ax);
        let mut enclosing = 0;
        let mut outside = 0;
        while enclosing < 10 || outside < 10 {
            let circle = rng.gen_bool(0.5);
            let (path, encloses) = if circle {
                let radius = rng.gen_range(0.3..2.5);
                let center: [f64; 2] = [rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5)];
                let d = center[0].hypot(center[1]);
                if (d - radius).abs() < 0.1 || d + radius > half - 0.2 {
                    continue;
                }
                (LoopPath::circle(center, radius, 256, z).unwrap(), d < radius)
            } else {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let (c, d) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let (i0, i1, j0, j1) = (a.min(b), a.max(b), c.min(d), c.max(d));
                if i1 - i0 < 2 || j1 - j0 < 2 {
                    continue;
                }
                let axis = (n - 1) / 2;
                // the axis node itself is a zero of Ax and may not lie on the loop
                if [i0, i1].contains(&axis) && (j0..=j1).contains(&axis) || [j0, j1].contains(&axis) && (i0..=i1).contains(&axis) {
                    continue;
                }
                let inside = i0 < axis && axis < i1 && j0 < axis && axis < j1;
                (LoopPath::node_rectangle(i0, j0, i1, j1, 0).unwrap(), inside)
            };
            if encloses && enclosing >= 10 || !encloses && outside >= 10 {
                continue;
            }
            let w = phase_winding(&ax, &path).map_err(|e| format!("trial {trial}: {e}"))?;
            let expected = i64::from(encloses);
            ensure(w == expected, || format!("trial {trial}: winding {w}, expected {expected}"))?;
            if encloses {
                enclosing += 1;
            } else {
                outside += 1;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} loops: +1 around the axis, 0 elsewhere"))
}

fn tifold() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut models = vec![on_shell(1.0)];
    for _ in 0..4 {
        let k = rng.gen_range(0.2..5.0);
        let c = rng.gen_range(0.5..2.0);
        models.push(disclination(k, k * c, c, rng.gen_range(0.1..3.0), Complex64::new(rng.gen_range(-1.0..1.0), 0.5)));
    }
    let mut worst: f64 = 0.0;
    for m in &models {
        let index = tifold_index(m).map_err(|e| e.to_string())?;
        ensure(index == Ratio::new(1, 2), || format!("index {index}"))?;
        let fit = pattern_rotation(m, 0.0, 2.0 * PI / m.params.omega, 32).map_err(|e| e.to_string())?;
        ensure(fit.residual <= 1e-6, || format!("residual {:e}", fit.residual))?;
        worst = worst.max(fit.residual);
    }
    Ok(format!("index 1/2 for {} models, max fit residual {worst:.1e}", models.len()))
}

fn rigid_rotation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let k = rng.gen_range(0.2..5.0);
        let c = rng.gen_range(0.5..2.0);
        let m = disclination(k, k * c, c, rng.gen_range(0.1..3.0), Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let period = 2.0 * PI / m.params.omega;
        let t0 = rng.gen_range(-period..period);
        let t1 = t0 + rng.gen_range(0.05..2.0) * period;
        let rate = pattern_rotation_rate(&m, t0, t1, 32).map_err(|e| e.to_string())?;
        let err = (rate / m.params.omega - 0.5).abs();
        ensure(err <= 1e-6, || format!("rate/omega = {}", rate / m.params.omega))?;
        worst = worst.max(err);
    }
    Ok(format!("rate/omega = 0.5 for 5 random sets, max error {worst:.1e}"))
}

fn twist() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1.0, 0.37, 2.0, 4.5] {
        let m = on_shell(k);
        let angle = axial_twist(&m, 0.0, m.params.wavelength(), 0.0, 32).map_err(|e| e.to_string())?.angle;
        let err = (angle.abs() - PI).abs();
        ensure(err <= 1e-6, || format!("k = {k}: twist {angle}"))?;
        worst = worst.max(err);
    }
    Ok(format!("|twist per wavelength| = pi, max error {worst:.1e}"))
}

fn gauge_reduction() -> Outcome {
    let mut lines = Vec::new();
    for (k, az) in [(1.0, Complex64::new(1.0, 0.0)), (2.0, Complex64::new(0.5, 0.5)), (0.6, Complex64::new(-1.5, 0.2))] {
        let base = AnalyticModel::Disclination(disclination(k, k, 1.0, k, az));
        let grid = GridSpec::centered([7, 7, 5], [0.1 / k; 3], [0.2 / k, 0.1 / k, 0.0]).unwrap();
        let td = transverse_divergence(&sample_potential(&base, &grid, 0.3).unwrap()).unwrap();
        ensure(td.interior_max <= 1e-10, || format!("transverse divergence {:e}", td.interior_max))?;

        let grid = GridSpec::centered([5; 3], [1e-5 / k; 3], [0.3 / k, -0.2 / k, 0.1 / k]).unwrap();
        let lorentz = lorentz_residual(&sample_potential(&base, &grid, 0.3).unwrap(), &base).unwrap();
        ensure(lorentz.interior_max <= 1e-9, || format!("lorentz {:e}", lorentz.interior_max))?;

        let broken = AnalyticModel::Zeroed { base: Box::new(base), components: vec![Component::Phi] };
        let r = lorentz_residual(&sample_potential(&broken, &grid, 0.3).unwrap(), &broken).unwrap();
        let target = k * az.norm();
        ensure((r.interior_max - target).abs() <= 0.05 * target, || format!("broken {} vs {target}", r.interior_max))?;
        lines.push(format!("k={k}: div_t {:.0e}, lorentz {:.0e}, broken {:.4}/{target:.4}", td.interior_max, lorentz.interior_max, r.interior_max));
    }
    Ok(lines.join("; "))
}

fn wave_equation() -> Outcome {
    let points = [[0.7, 0.2, 0.1], [-0.3, 0.5, 1.2], [1.0, -1.0, -0.4], [0.05, 0.1, 2.0]];
    let mut report = Vec::new();
    for k in [1.0, 2.5] {
        let model = AnalyticModel::Disclination(on_shell(k));
        let pts: Vec<[f64; 3]> = points.iter().map(|p| p.map(|v| v / k)).collect();
        let maxima: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|h| wave_residual(&model, &SampleSet::new(pts.clone(), h / k).unwrap(), 0.4, TimeStencil::Analytic).unwrap().interior_max)
            .collect();
        for w in maxima.windows(2) {
            let order = convergence_order(w[0], w[1]);
            ensure((order - 2.0).abs() <= 0.3, || format!("k = {k}: order {order}"))?;
        }
        report.push(format!("k={k} orders {:.3},{:.3}", convergence_order(maxima[0], maxima[1]), convergence_order(maxima[1], maxima[2])));

        let off = AnalyticModel::Disclination(disclination(k, 2.0 * k, 1.0, k, Complex64::new(1.0, 0.0)));
        let samples = SampleSet::new(pts.clone(), 1e-3 / k).unwrap();
        for stencil in [TimeStencil::Analytic, TimeStencil::Central(1e-3 / k)] {
            let values = wave_residual_values(&off, &samples, 0.4, stencil).unwrap();
            for (p, residual) in pts.iter().zip(&values) {
                let f = off.eval(&SpaceTimePoint::at(*p, 0.4)).components();
                for (r, f) in residual.iter().zip(&f) {
                    let target = 3.0 * k * k * f.norm();
                    ensure((r.norm() - target).abs() <= 0.05 * target, || format!("off-shell {} vs {target}", r.norm()))?;
                }
            }
        }
    }
    Ok(format!("{}; off-shell residual 3k^2|f| within 5%", report.join("; ")))
}

fn pure_gauge() -> Outcome {
    let generators = [
        AnalyticModel::PlaneWave(PlaneWave { wavevector: [0.9, -1.3, 0.6], omega: 1.1, amplitude: Complex64::new(1.0, 0.3), c: 1.0 }),
        AnalyticModel::Dislocation(DislocationModel::new(2, 1.3, 0.7, 1.0).centered_at(-1.5, -1.0)),
        AnalyticModel::Dislocations(DislocationSet {
            charges: vec![Charge { n: 1, center: [-1.2, 0.4] }, Charge { n: -1, center: [1.4, -0.9] }],
            k: 0.8,
            omega: 1.6,
            a: 1.0,
            c: 1.0,
        }),
    ];
    let mut lines = Vec::new();
    for psi in generators {
        let name = psi.name();
        let model = AnalyticModel::PureGauge { psi: Box::new(psi), c: 1.0 };
        let mut e = Vec::new();
        let mut b = Vec::new();
        for cells in [8, 16, 32] {
            let grid = padded_grid([0.2, 0.1, 0.3], 0.4, cells).unwrap();
            let f = sample_potential(&model, &grid, 0.3).unwrap();
            e.push(vector_report("e", &electric_field(&f, &model).unwrap()).unwrap().interior_max);
            b.push(vector_report("b", &magnetic_field(&f).unwrap()).unwrap().interior_max);
        }
        let mut orders = Vec::new();
        for (label, series) in [("E", &e), ("B", &b)] {
            for w in series.windows(2) {
                let order = convergence_order(w[0], w[1]);
                ensure((order - 2.0).abs() <= 0.3, || format!("{name} {label} order {order}"))?;
                orders.push(format!("{label}{order:.2}"));
            }
        }
        lines.push(format!("{name} {}", orders.join(",")));
    }
    Ok(lines.join("; "))
}

fn energy_ledger() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let nu = 10f64.powf(rng.gen_range(-6.0..18.0));
        for units in [UnitSystem::Geometric, UnitSystem::Si] {
            let e = PhotonLedger::from_frequency(nu, units).unwrap().total_energy();
            ensure(e.internal / e.total == 0.5, || format!("E_i/E at nu = {nu}"))?;
        }
        let g = PhotonLedger::from_frequency(nu, UnitSystem::Geometric).unwrap();
        ensure(g.momentum() * g.c == g.total_energy().total, || format!("geometric p c != E at nu = {nu}"))?;
    }
    let si = PhotonLedger::from_frequency(5e14, UnitSystem::Si).unwrap();
    let spin = si.spin_energy();
    ensure((spin - 1.65652e-19).abs() <= 1e-24, || format!("spin energy {spin:e}"))?;
    ensure(si.momentum() * si.c == si.total_energy().total, || "SI p c != E at 5e14 Hz".into())?;
    Ok(format!("E_i/E = 1/2 exactly; spin energy at 5e14 Hz = {spin:e} J; p c = E"))
}

fn forms_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for n in 0..1000 {
        let (nx, ny) = (rng.gen_range(2..10), rng.gen_range(2..10));
        let grid = GridSpec::centered([nx, ny, 1], [0.5, 0.5, 1.0], [0.0; 3]).unwrap();
        let cx = CubicalComplex::new(grid).unwrap();
        // dyadic values keep every floating-point operation exact, so d d f must be exactly 0
        let f0 = DiscreteForm { degree: 0, values: (0..cx.cell_count(0)).map(|_| f64::from(rng.gen_range(-10240..=10240)) / 1024.0).collect() };
        let dd = cx.coboundary(&cx.coboundary(&f0).unwrap()).unwrap();
        ensure(dd.values.iter().all(|&v| v == 0.0), || format!("d d f != 0 on input {n}"))?;
        // arbitrary doubles: zero up to rounding
        let g0 = DiscreteForm { degree: 0, values: (0..cx.cell_count(0)).map(|_| rng.gen_range(-10.0..10.0)).collect() };
        let dd = cx.coboundary(&cx.coboundary(&g0).unwrap()).unwrap();
        ensure(dd.values.iter().all(|v| v.abs() <= 1e-13), || format!("d d g rounding exceeds 1e-13 on input {n}"))?;
        let c2 = Chain::from_cells(2, (0..cx.cell_count(2)).map(|i| (i, rng.gen_range(-5i64..=5))));
        ensure(cx.boundary(&cx.boundary(&c2).unwrap()).unwrap().is_zero(), || format!("boundary^2 != 0 on input {n}"))?;
        let degree = n % 2;
        let form = DiscreteForm { degree, values: (0..cx.cell_count(degree)).map(|_| rng.gen_range(-10.0..10.0)).collect() };
        let chain = Chain::from_cells(degree + 1, (0..cx.cell_count(degree + 1)).map(|i| (i, rng.gen_range(-3i64..=3))));
        let norm = form.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rel = cx.stokes_residual(&form, &chain).unwrap().abs() / norm;
        ensure(rel <= 1e-12, || format!("Stokes residual {rel:e}"))?;
        worst = worst.max(rel);
    }
    for turns in [-3, -2, -1, 1, 2, 3] {
        let cycle = ParametricCycle::circle([0.1, -0.05], 0.8, turns, 256 * turns.unsigned_abs() as usize).unwrap();
        let p = period_integral(&OneForm::angle([0.0, 0.0]), &cycle).unwrap().value;
        let expected = 2.0 * PI * f64::from(turns);
        ensure((p - expected).abs() <= 1e-9, || format!("{turns} turns: period {p}"))?;
    }
    for (e, nu, m) in [(1.0, 1.0, 1.0), (2.5, 0.3, 7.0), (0.01, 40.0, 0.2)] {
        let w = ws_integral(e, nu, m).unwrap();
        ensure((w - e / nu).abs() <= 1e-9, || format!("ws({e}, {nu}, {m}) = {w}"))?;
    }
    for units in [UnitSystem::Geometric, UnitSystem::Si] {
        let h = units.planck();
        let nu = 2.0;
        for n in 1..=3 {
            let w = ws_integral(f64::from(n) * h * nu, nu, 1.0).unwrap();
            let target = f64::from(n) * h;
            ensure((w - target).abs() <= 1e-9 * target, || format!("ws for n = {n}: {w} vs {target}"))?;
        }
    }
    Ok(format!("dd = 0, boundary^2 = 0 on 1000 inputs; max Stokes residual {worst:.1e}; periods and W-S integrals exact"))
}

fn detection() -> Outcome {
    let mut loops = 0;
    for seed in 0..10 {
        loops += common::check_scene(seed)?;
        common::check_scan(1000 + seed)?;
    }
    Ok(format!("10 multi-defect fields, {loops} loops match enclosed charge sums"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("orbifold index", orbifold_index),
        ("tifold index", tifold),
        ("rigid rotation", rigid_rotation),
        ("axial twist", twist),
        ("gauge reduction", gauge_reduction),
        ("wave equation", wave_equation),
        ("pure gauge", pure_gauge),
        ("energy ledger", energy_ledger),
        ("forms engine", forms_engine),
        ("detection", detection),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
