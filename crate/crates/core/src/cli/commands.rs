use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::manifest::{run_manifest_path, CheckOutcome, RunManifest};
use super::verify::claim_suite;
use super::{CliError, CliResult, Command, Demo, EXIT_CLAIM, EXIT_PASS};
use crate::defects::{find_disclinations, find_dislocations, format_index, DefectKind, DefectRecord};
use crate::error::Error;
use crate::field::{sample_potential, sample_scalar, FieldKind};
use crate::forms::{period_integral, ws_integral, Chain, CubicalComplex, DiscreteForm, OneForm, ParametricCycle};
use crate::gauge::write_reports_csv;
use crate::grid::GridSpec;
use crate::io::{read_field, write_field, SampledField};
use crate::ledger::{PhotonLedger, UnitSystem};
use crate::models::AnalyticModel;

pub(super) fn dispatch(command: Command) -> CliResult<i32> {
    let start = Instant::now();
    match command {
        Command::Generate { model, dims, spacing, center, time, out } => {
            generate(&model, &dims, &spacing, &center, time, &out, start)
        }
        Command::Detect { field, slice, out } => detect(&field, slice, out.as_deref(), start),
        Command::Verify { model, refinements, out, residuals } => {
            verify(&model, refinements, &out, residuals.as_deref(), start)
        }
        Command::Forms { demo, energy, nu, mass, turns, pairs, seed, out } => {
            let (report, passed) = match demo {
                Demo::Stokes => stokes_demo(pairs, seed)?,
                Demo::Period => period_demo(turns)?,
                Demo::Ws => ws_demo(energy, nu, mass)?,
            };
            let manifest = RunManifest::new("forms")
                .param("demo", format!("{demo:?}").to_lowercase())
                .param("energy", energy)
                .param("nu", nu)
                .param("mass", mass)
                .param("turns", turns)
                .param("pairs", pairs)
                .param("seed", seed);
            let check = CheckOutcome {
                name: format!("forms_{}", format!("{demo:?}").to_lowercase()),
                passed,
                detail: report.to_string(),
            };
            emit_json(&report, out.as_deref(), manifest, vec![check], start)?;
            Ok(if passed { EXIT_PASS } else { EXIT_CLAIM })
        }
        Command::Ledger { nu, wavelength, units, out } => ledger(nu, wavelength, units.into(), out.as_deref(), start),
        Command::Report { inputs, out } => report(&inputs, out.as_deref(), start),
    }
}

fn finish(mut manifest: RunManifest, out: &Path, checks: Vec<CheckOutcome>, start: Instant) -> CliResult<()> {
    manifest.checks = checks;
    manifest.duration_seconds = start.elapsed().as_secs_f64();
    manifest.write(&run_manifest_path(out)).map_err(CliError::output)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::output(Error::io(path, e)))
}

/// Pretty JSON to `out` (plus its run manifest) or to stdout.
fn emit_json(
    value: &impl Serialize,
    out: Option<&Path>,
    manifest: RunManifest,
    checks: Vec<CheckOutcome>,
    start: Instant,
) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("report serialises") + "\n";
    match out {
        Some(path) => {
            write_text(path, &text)?;
            finish(manifest.param("out", path), path, checks, start)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A descriptor given inline (`{...}`) or as a file path.
fn read_descriptor(arg: &str) -> CliResult<AnalyticModel> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::input(Error::io(Path::new(arg), e)))?
    };
    let model: AnalyticModel =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid model descriptor: {e}")))?;
    model.validate().map_err(CliError::input)?;
    Ok(model)
}

fn triple<T: Copy>(name: &str, v: &[T]) -> CliResult<[T; 3]> {
    match v {
        &[a, b, c] => Ok([a, b, c]),
        _ => Err(CliError::usage(format!("--{name} takes exactly three comma-separated values"))),
    }
}

fn generate(
    model_arg: &str,
    dims: &[usize],
    spacing: &[f64],
    center: &[f64],
    time: f64,
    out: &Path,
    start: Instant,
) -> CliResult<i32> {
    let model = read_descriptor(model_arg)?;
    let grid = GridSpec::centered(triple("dims", dims)?, triple("spacing", spacing)?, triple("center", center)?).map_err(CliError::input)?;
    let field = match model.kind() {
        FieldKind::Scalar => SampledField::Scalar(sample_scalar(&model, &grid, time).map_err(CliError::input)?),
        FieldKind::Potential => {
            SampledField::Potential(sample_potential(&model, &grid, time).map_err(CliError::input)?)
        }
    };
    let data = write_field(out, &field).map_err(CliError::output)?;
    let mut manifest = RunManifest::new("generate")
        .param("model", &model)
        .param("dims", grid.dims)
        .param("spacing", grid.spacing)
        .param("origin", grid.origin)
        .param("time", time);
    if !model_arg.trim_start().starts_with('{') {
        manifest.inputs.push(model_arg.to_string());
    }
    manifest.outputs = vec![path_string(out), path_string(&data)];
    finish(manifest, out, Vec::new(), start)?;
    println!(
        "{}",
        json!({ "manifest": path_string(out), "data": path_string(&data), "kind": model.kind().name(), "nodes": grid.node_count() })
    );
    Ok(EXIT_PASS)
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry {
    pub kind: DefectKind,
    pub position: [f64; 3],
    pub index: String,
    pub confidence: f64,
}

impl From<&DefectRecord> for DefectEntry {
    fn from(r: &DefectRecord) -> Self {
        DefectEntry {
            kind: r.kind,
            position: r.position,
            index: format_index(&r.index),
            confidence: r.confidence,
        }
    }
}

/// Output of `detect`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub field: String,
    pub slice: usize,
    pub defects: Vec<DefectEntry>,
}

fn detect(path: &Path, slice: usize, out: Option<&Path>, start: Instant) -> CliResult<i32> {
    let field = read_field(path).map_err(CliError::input)?;
    let records = match &field {
        SampledField::Scalar(f) => find_dislocations(f, slice),
        SampledField::Potential(f) => find_disclinations(f, slice),
    }
    .map_err(CliError::input)?;
    let report = DefectReport {
        field: path_string(path),
        slice,
        defects: records.iter().map(DefectEntry::from).collect(),
    };
    let mut manifest = RunManifest::new("detect").param("slice", slice);
    manifest.inputs.push(path_string(path));
    if let Some(o) = out {
        manifest.outputs.push(path_string(o));
    }
    emit_json(&report, out, manifest, Vec::new(), start)?;
    Ok(EXIT_PASS)
}

fn verify(model_arg: &str, refinements: usize, out: &Path, residuals: Option<&Path>, start: Instant) -> CliResult<i32> {
    if refinements == 0 {
        return Err(CliError::usage("--refinements must be at least 1"));
    }
    let model = read_descriptor(model_arg)?;
    let disclination = model
        .as_disclination()
        .ok_or_else(|| CliError::usage(format!("verify needs a disclination descriptor, got {}", model.name())))?;
    let suite = claim_suite(disclination, refinements).map_err(CliError::input)?;

    let csv_err = |e: csv::Error| CliError::output(Error::format(out, e.to_string()));
    let mut w = csv::Writer::from_path(out).map_err(csv_err)?;
    for row in &suite.rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::output(Error::io(out, e)))?;
    let mut manifest = RunManifest::new("verify").param("model", &model).param("refinements", refinements);
    manifest.outputs.push(path_string(out));
    if let Some(r) = residuals {
        write_reports_csv(r, &suite.residuals).map_err(CliError::output)?;
        manifest.outputs.push(path_string(r));
    }
    if !model_arg.trim_start().starts_with('{') {
        manifest.inputs.push(model_arg.to_string());
    }
    let checks: Vec<CheckOutcome> = suite
        .rows
        .iter()
        .map(|r| CheckOutcome {
            name: r.check.clone(),
            passed: r.pass,
            detail: format!("measured {:e}, expected {:e}, tolerance {:e}", r.measured, r.expected, r.tolerance),
        })
        .collect();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let all = checks.iter().all(|c| c.passed);
    finish(manifest, out, checks, start)?;
    Ok(if all { EXIT_PASS } else { EXIT_CLAIM })
}

fn stokes_demo(pairs: usize, seed: u64) -> CliResult<(serde_json::Value, bool)> {
    let grid = GridSpec::centered([9, 7, 1], [0.5, 0.5, 1.0], [0.0; 3]).map_err(CliError::input)?;
    let complex = CubicalComplex::new(grid).map_err(CliError::input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_relative: f64 = 0.0;
    let mut nilpotent = true;
    for n in 0..pairs {
        let degree = n % 2;
        let form = DiscreteForm {
            degree,
            values: (0..complex.cell_count(degree)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let chain = Chain::from_cells(
            degree + 1,
            (0..complex.cell_count(degree + 1)).map(|i| (i, rng.gen_range(-3i64..=3))),
        );
        let norm = form.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = complex.stokes_residual(&form, &chain).map_err(CliError::input)?;
        max_relative = max_relative.max(r.abs() / norm);
        if degree == 0 {
            // dyadic samples make every operation exact, so d d must vanish bitwise
            let dyadic = DiscreteForm {
                degree: 0,
                values: (0..complex.cell_count(0)).map(|_| f64::from(rng.gen_range(-1024..=1024)) / 1024.0).collect(),
            };
            let dd = complex
                .coboundary(&complex.coboundary(&dyadic).map_err(CliError::input)?)
                .map_err(CliError::input)?;
            nilpotent &= dd.values.iter().all(|&v| v == 0.0);
        } else {
            let bb = complex
                .boundary(&complex.boundary(&chain).map_err(CliError::input)?)
                .map_err(CliError::input)?;
            nilpotent &= bb.is_zero();
        }
    }
    let passed = max_relative <= 1e-12 && nilpotent;
    Ok((
        json!({
            "demo": "stokes",
            "pairs": pairs,
            "seed": seed,
            "max_relative_residual": max_relative,
            "tolerance": 1e-12,
            "nilpotent": nilpotent,
            "pass": passed,
        }),
        passed,
    ))
}

fn period_demo(turns: i32) -> CliResult<(serde_json::Value, bool)> {
    if turns == 0 {
        return Err(CliError::usage("--turns must be nonzero"));
    }
    let samples = 256 * turns.unsigned_abs() as usize;
    let cycle = ParametricCycle::circle([0.0, 0.0], 1.0, turns, samples).map_err(CliError::input)?;
    let p = period_integral(&OneForm::angle([0.0, 0.0]), &cycle).map_err(CliError::input)?;
    let expected = 2.0 * PI * f64::from(turns);
    let error = (p.value - expected).abs();
    let passed = error <= 1e-9;
    Ok((
        json!({
            "demo": "period",
            "turns": turns,
            "samples": samples,
            "value": p.value,
            "expected": expected,
            "normalized": p.value / (2.0 * PI),
            "error": error,
            "warning": p.warning,
            "pass": passed,
        }),
        passed,
    ))
}

fn ws_demo(energy: f64, nu: f64, mass: f64) -> CliResult<(serde_json::Value, bool)> {
    let value = ws_integral(energy, nu, mass).map_err(CliError::input)?;
    let expected = energy / nu;
    let passed = (value - expected).abs() <= 1e-9 * expected.max(1.0);
    Ok((
        json!({
            "demo": "ws",
            "energy": energy,
            "nu": nu,
            "mass": mass,
            "value": value,
            "expected": expected,
            "pass": passed,
        }),
        passed,
    ))
}

fn ledger(nu: Option<f64>, wavelength: Option<f64>, units: UnitSystem, out: Option<&Path>, start: Instant) -> CliResult<i32> {
    let l = match (nu, wavelength) {
        (Some(nu), _) => PhotonLedger::from_frequency(nu, units),
        (None, Some(lambda)) => PhotonLedger::from_wavelength(lambda, units),
        (None, None) => return Err(CliError::usage("give --nu or --wavelength")),
    }
    .map_err(CliError::input)?;
    let e = l.total_energy();
    let p = l.momentum();
    let dispersion = l.dispersion_check();
    let partition = e.internal == e.translational && e.internal / e.total == 0.5 || e.total == 0.0;
    // p c equals E exactly for most inputs; SI rounding can leave one ulp
    let momentum_ok = (p * l.c - e.total).abs() <= f64::EPSILON * e.total;
    let report = json!({
        "ledger": l,
        "spin_energy": l.spin_energy(),
        "energy": e,
        "momentum": p,
        "dispersion": dispersion,
    });
    let checks = vec![
        CheckOutcome { name: "energy_partition".into(), passed: partition, detail: format!("E_i = {:e}, E = {:e}", e.internal, e.total) },
        CheckOutcome { name: "momentum".into(), passed: momentum_ok, detail: format!("p c = {:e}, E = {:e}", p * l.c, e.total) },
        CheckOutcome { name: "dispersion".into(), passed: dispersion.on_shell, detail: format!("relative error {:e}", dispersion.relative_error) },
    ];
    let passed = checks.iter().all(|c| c.passed);
    let manifest = RunManifest::new("ledger").param("nu", nu).param("wavelength", wavelength).param("units", units);
    emit_json(&report, out, manifest, checks, start)?;
    Ok(if passed { EXIT_PASS } else { EXIT_CLAIM })
}

#[derive(Serialize)]
struct ReportRow<'a> {
    command: &'a str,
    check: &'a str,
    result: &'a str,
    detail: &'a str,
}

fn report(inputs: &[PathBuf], out: Option<&Path>, start: Instant) -> CliResult<i32> {
    if inputs.is_empty() {
        return Err(CliError::usage("report needs at least one --inputs manifest"));
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut runs = Vec::new();
    for path in inputs {
        let m = RunManifest::read(path).map_err(CliError::input)?;
        if seen.insert(m.content_hash()) {
            runs.push(m);
        }
    }
    let rows: Vec<ReportRow> = runs
        .iter()
        .flat_map(|m| {
            m.checks.iter().map(move |c| ReportRow {
                command: &m.command,
                check: &c.name,
                result: if c.passed { "pass" } else { "FAIL" },
                detail: &c.detail,
            })
        })
        .collect();
    let failed = rows.iter().filter(|r| r.result != "pass").count();
    let as_csv = out.is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    let text = if as_csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &rows {
            w.serialize(r).map_err(|e| CliError::usage(e.to_string()))?;
        }
        String::from_utf8(w.into_inner().map_err(|e| CliError::usage(e.to_string()))?).expect("csv is utf-8")
    } else {
        let mut s = format!(
            "# Claim checks\n\n{} runs, {} checks, {} failed\n\n| command | check | result | detail |\n|---|---|---|---|\n",
            runs.len(),
            rows.len(),
            failed
        );
        for r in &rows {
            s += &format!("| {} | {} | {} | {} |\n", r.command, r.check, r.result, r.detail.replace('|', "\\|"));
        }
        s
    };
    match out {
        Some(path) => {
            write_text(path, &text)?;
            let mut manifest = RunManifest::new("report");
            manifest.inputs = inputs.iter().map(|p| path_string(p)).collect();
            manifest.outputs.push(path_string(path));
            finish(manifest, path, Vec::new(), start)?;
        }
        None => print!("{text}"),
    }
    Ok(if failed == 0 { EXIT_PASS } else { EXIT_CLAIM })
}

