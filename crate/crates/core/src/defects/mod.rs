//! Defect location and topological indices.

mod rotation;
mod scan;
mod winding;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use rotation::{
    axial_twist, axial_twist_per_length, pattern_rotation, pattern_rotation_rate, snap_rational,
    tifold_index, tifold_index_raw, RotationFit, ALIGNMENT_GRID,
};
pub use scan::{find_disclinations, find_dislocations};
pub use winding::{phase_winding, phase_winding_with_tolerance, winding_of_values, LoopPath};

/// Absolute amplitude below which a field value counts as zero.
pub const TOL_AMP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectKind {
    Dislocation,
    Disclination,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectRecord {
    pub kind: DefectKind,
    pub position: [f64; 3],
    pub index: Ratio<i64>,
    /// Smallest field amplitude on the loop used to measure the index.
    pub confidence: f64,
}

/// `"+1"`, `"-2"`, `"0"`, `"+1/2"`.
pub fn format_index(index: &Ratio<i64>) -> String {
    let sign = if *index.numer() > 0 { "+" } else { "" };
    if index.is_integer() {
        format!("{sign}{}", index.numer())
    } else {
        format!("{sign}{}/{}", index.numer(), index.denom())
    }
}

/// Inverse of [`format_index`].
pub fn parse_index(text: &str) -> Option<Ratio<i64>> {
    let t = text.trim().trim_start_matches('+');
    match t.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().ok()?;
            let q: i64 = q.parse().ok()?;
            (q != 0).then(|| Ratio::new(p, q))
        }
        None => Some(Ratio::from_integer(t.parse().ok()?)),
    }
}
