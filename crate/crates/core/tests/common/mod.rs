#![allow(dead_code)]

use defectfield::defects::{find_dislocations, phase_winding, LoopPath};
use defectfield::models::{Charge, DislocationSet};
use defectfield::{sample_scalar, AnalyticModel, ComplexScalarField, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NODES: usize = 121;
pub const SPACING: f64 = 0.05;
const MIN_SEPARATION: f64 = 0.8;
const LOOP_MARGIN: f64 = 0.2;

pub struct DefectScene {
    pub charges: Vec<Charge>,
    pub field: ComplexScalarField,
}

/// Random product of 2 to 4 dislocation cores inside `[-2, 2]²`.
pub fn random_scene(seed: u64, unit_charges: bool) -> DefectScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(2..=4);
    let mut charges: Vec<Charge> = Vec::new();
    while charges.len() < count {
        let center = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let far = charges
            .iter()
            .all(|q| (q.center[0] - center[0]).hypot(q.center[1] - center[1]) >= MIN_SEPARATION);
        if !far {
            continue;
        }
        let magnitude = if unit_charges { 1 } else { rng.gen_range(1..=2) };
        let n = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
        charges.push(Charge { n, center });
    }
    let model = AnalyticModel::Dislocations(DislocationSet {
        charges: charges.clone(),
        k: 1.0,
        omega: 1.0,
        a: 1.0,
        c: 1.0,
    });
    let grid = GridSpec::centered([NODES, NODES, 1], [SPACING, SPACING, 1.0], [0.0; 3]).unwrap();
    let field = sample_scalar(&model, &grid, rng.gen_range(0.0..6.0)).unwrap();
    DefectScene { charges, field }
}

fn node_coord(i: usize) -> f64 {
    -(NODES as f64 - 1.0) / 2.0 * SPACING + i as f64 * SPACING
}

/// Sum of charges strictly inside the node rectangle, or `None` when a core
/// sits within the margin of its boundary.
fn enclosed_in_rectangle(charges: &[Charge], i0: usize, j0: usize, i1: usize, j1: usize) -> Option<i64> {
    let (x0, x1, y0, y1) = (node_coord(i0), node_coord(i1), node_coord(j0), node_coord(j1));
    let mut total = 0;
    for q in charges {
        let [x, y] = q.center;
        let dx = (x - x0).min(x1 - x);
        let dy = (y - y0).min(y1 - y);
        let inside = dx > 0.0 && dy > 0.0;
        // distance to the rectangle boundary, inside or out
        let gap = if inside {
            dx.min(dy)
        } else {
            let ox = (x0 - x).max(x - x1).max(0.0);
            let oy = (y0 - y).max(y - y1).max(0.0);
            ox.hypot(oy)
        };
        if gap < LOOP_MARGIN {
            return None;
        }
        if inside {
            total += i64::from(q.n);
        }
    }
    Some(total)
}

fn enclosed_in_circle(charges: &[Charge], center: [f64; 2], radius: f64) -> Option<i64> {
    let mut total = 0;
    for q in charges {
        let d = (q.center[0] - center[0]).hypot(q.center[1] - center[1]);
        if (d - radius).abs() < LOOP_MARGIN {
            return None;
        }
        if d < radius {
            total += i64::from(q.n);
        }
    }
    Some(total)
}

/// Charge additivity and loop-deformation invariance on one scene.
/// Returns the number of loops checked.
pub fn check_scene(seed: u64) -> Result<usize, String> {
    let scene = random_scene(seed, false);
    let total: i64 = scene.charges.iter().map(|q| i64::from(q.n)).sum();
    let field = &scene.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut checked = 0;

    let outer = LoopPath::node_rectangle(2, 2, NODES - 3, NODES - 3, 0).map_err(|e| e.to_string())?;
    let w = phase_winding(field, &outer).map_err(|e| e.to_string())?;
    if w != total {
        return Err(format!("seed {seed}: outer loop winding {w}, total charge {total}"));
    }
    checked += 1;

    for q in &scene.charges {
        let to_node = |v: f64| ((v - node_coord(0)) / SPACING).round() as usize;
        let (ci, cj) = (to_node(q.center[0]), to_node(q.center[1]));
        for half in [6usize, 10] {
            let path = LoopPath::node_rectangle(ci - half, cj - half, ci + half, cj + half, 0).map_err(|e| e.to_string())?;
            let w = phase_winding(field, &path).map_err(|e| e.to_string())?;
            if w != i64::from(q.n) {
                return Err(format!("seed {seed}: core {:?} loop winding {w}", q));
            }
            let back = phase_winding(field, &path.reversed()).map_err(|e| e.to_string())?;
            if back != -w {
                return Err(format!("seed {seed}: reversed loop gave {back}"));
            }
            checked += 1;
        }
    }

    let mut rectangles = 0;
    while rectangles < 10 {
        let (a, b) = (rng.gen_range(2..NODES - 2), rng.gen_range(2..NODES - 2));
        let (c, d) = (rng.gen_range(2..NODES - 2), rng.gen_range(2..NODES - 2));
        let (i0, i1, j0, j1) = (a.min(b), a.max(b), c.min(d), c.max(d));
        if i1 - i0 < 4 || j1 - j0 < 4 {
            continue;
        }
        let Some(expected) = enclosed_in_rectangle(&scene.charges, i0, j0, i1, j1) else {
            continue;
        };
        let path = LoopPath::node_rectangle(i0, j0, i1, j1, 0).map_err(|e| e.to_string())?;
        let w = phase_winding(field, &path).map_err(|e| e.to_string())?;
        if w != expected {
            return Err(format!("seed {seed}: rectangle ({i0},{j0})-({i1},{j1}) winding {w}, enclosed {expected}"));
        }
        rectangles += 1;
        checked += 1;
    }

    let mut circles = 0;
    while circles < 10 {
        let center = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        let radius = rng.gen_range(0.3..1.4);
        let Some(expected) = enclosed_in_circle(&scene.charges, center, radius) else {
            continue;
        };
        let path = LoopPath::circle(center, radius, 256, 0.0).map_err(|e| e.to_string())?;
        let w = phase_winding(field, &path).map_err(|e| e.to_string())?;
        if w != expected {
            return Err(format!("seed {seed}: circle {center:?} r={radius} winding {w}, enclosed {expected}"));
        }
        circles += 1;
        checked += 1;
    }
    Ok(checked)
}

/// The plaquette scan of a unit-charge scene recovers every core and the total charge.
pub fn check_scan(seed: u64) -> Result<(), String> {
    let scene = random_scene(seed, true);
    let records = find_dislocations(&scene.field, 0).map_err(|e| e.to_string())?;
    if records.len() != scene.charges.len() {
        return Err(format!("seed {seed}: {} records for {} cores", records.len(), scene.charges.len()));
    }
    let found: i64 = records.iter().map(|r| *r.index.numer()).sum();
    let total: i64 = scene.charges.iter().map(|q| i64::from(q.n)).sum();
    if found != total {
        return Err(format!("seed {seed}: detected charge {found}, total {total}"));
    }
    let diagonal = SPACING * std::f64::consts::SQRT_2;
    for q in &scene.charges {
        let hit = records.iter().any(|r| {
            (r.position[0] - q.center[0]).hypot(r.position[1] - q.center[1]) <= diagonal
                && *r.index.numer() == i64::from(q.n)
        });
        if !hit {
            return Err(format!("seed {seed}: core {q:?} not detected"));
        }
    }
    Ok(())
}
