//! Field files: a JSON manifest next to a raw little-endian binary payload.
//!
//! The payload holds `(re, im)` f64 pairs, node-major with x fastest; for
//! potential fields the four components `Ax, Ay, Az, Phi` of a node are
//! stored contiguously before the next node.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexScalarField, FieldKind, PotentialField};
use crate::grid::GridSpec;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldManifest {
    pub version: u32,
    pub kind: FieldKind,
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub time: f64,
    /// Payload path, relative to the manifest's directory.
    pub data: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampledField {
    Scalar(ComplexScalarField),
    Potential(PotentialField),
}

impl SampledField {
    pub fn kind(&self) -> FieldKind {
        match self {
            SampledField::Scalar(_) => FieldKind::Scalar,
            SampledField::Potential(_) => FieldKind::Potential,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        match self {
            SampledField::Scalar(f) => &f.grid,
            SampledField::Potential(f) => &f.grid,
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            SampledField::Scalar(f) => f.time,
            SampledField::Potential(f) => f.time,
        }
    }

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut push = |v: &Complex64| {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        };
        match self {
            SampledField::Scalar(f) => f.values.iter().for_each(&mut push),
            SampledField::Potential(f) => {
                for idx in 0..f.grid.node_count() {
                    for comp in &f.components {
                        push(&comp[idx]);
                    }
                }
            }
        }
        out
    }
}

/// Payload path used for a manifest at `manifest`: same stem, `.bin` extension.
pub fn data_path_for(manifest: &Path) -> PathBuf {
    manifest.with_extension("bin")
}

/// Write `field` as `manifest` plus its binary payload. Returns the payload path.
pub fn write_field(manifest: &Path, field: &SampledField) -> Result<PathBuf> {
    let data = data_path_for(manifest);
    let data_name = data
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::format(manifest, "manifest path has no usable file name"))?
        .to_string();
    let grid = field.grid();
    let m = FieldManifest {
        version: FORMAT_VERSION,
        kind: field.kind(),
        dims: grid.dims,
        spacing: grid.spacing,
        origin: grid.origin,
        time: field.time(),
        data: data_name,
    };
    let json = serde_json::to_string_pretty(&m).expect("manifest serialises");
    fs::write(&data, field.encode()).map_err(|e| Error::io(&data, e))?;
    fs::write(manifest, json + "\n").map_err(|e| Error::io(manifest, e))?;
    Ok(data)
}

pub fn read_manifest(path: &Path) -> Result<FieldManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let m: FieldManifest = serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    if m.version != FORMAT_VERSION {
        return Err(Error::format(path, format!("unsupported version {}", m.version)));
    }
    Ok(m)
}

pub fn read_field(path: &Path) -> Result<SampledField> {
    let m = read_manifest(path)?;
    let grid = GridSpec::new(m.dims, m.spacing, m.origin).map_err(|e| Error::format(path, e.to_string()))?;
    let data = path.parent().unwrap_or_else(|| Path::new("")).join(&m.data);
    let bytes = fs::read(&data).map_err(|e| Error::io(&data, e))?;
    let ncomp = m.kind.component_count();
    let expected = grid.node_count() * ncomp * 16;
    if bytes.len() != expected {
        return Err(Error::format(
            &data,
            format!("payload has {} bytes, expected {expected}", bytes.len()),
        ));
    }
    let values: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    let invalid = |e: Error| Error::format(&data, e.to_string());
    match m.kind {
        FieldKind::Scalar => Ok(SampledField::Scalar(
            ComplexScalarField::new(grid, m.time, values).map_err(invalid)?,
        )),
        FieldKind::Potential => {
            let comps = std::array::from_fn(|c| values.iter().skip(c).step_by(4).copied().collect());
            Ok(SampledField::Potential(
                PotentialField::new(grid, m.time, comps).map_err(invalid)?,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_potential, sample_scalar};
    use crate::models::{AnalyticModel, DisclinationModel, DislocationModel, WaveParams};

    #[test]
    fn potential_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::centered([5, 4, 3], [0.1, 0.2, 0.3], [0.0; 3]).unwrap();
        let m = AnalyticModel::Disclination(DisclinationModel::new(WaveParams::on_shell(1.0, 1.0).unwrap()));
        let field = SampledField::Potential(sample_potential(&m, &g, 0.25).unwrap());
        let path = dir.path().join("a.json");
        let data = write_field(&path, &field).unwrap();
        assert_eq!(fs::metadata(&data).unwrap().len() as usize, g.node_count() * 4 * 16);
        assert_eq!(read_field(&path).unwrap(), field);

        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(manifest["kind"], "potential");
        assert_eq!(manifest["version"], 1);
        assert_eq!(manifest["data"], "a.bin");
    }

    #[test]
    fn payload_layout_interleaves_components_per_node() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new([2, 1, 1], [1.0; 3], [0.0; 3]).unwrap();
        let comps = std::array::from_fn(|c| vec![Complex64::new(c as f64, 10.0), Complex64::new(c as f64 + 100.0, 0.0)]);
        let field = SampledField::Potential(PotentialField::new(g, 0.0, comps).unwrap());
        let path = dir.path().join("p.json");
        let data = write_field(&path, &field).unwrap();
        let bytes = fs::read(data).unwrap();
        let f = |n: usize| f64::from_le_bytes(bytes[8 * n..8 * n + 8].try_into().unwrap());
        assert_eq!((f(0), f(1)), (0.0, 10.0));
        assert_eq!((f(2), f(3)), (1.0, 10.0));
        assert_eq!(f(8), 100.0);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::centered([4, 4, 1], [0.1; 3], [0.0; 3]).unwrap();
        let m = AnalyticModel::Dislocation(DislocationModel::new(1, 1.0, 1.0, 1.0));
        let field = SampledField::Scalar(sample_scalar(&m, &g, 0.0).unwrap());
        let path = dir.path().join("s.json");
        let data = write_field(&path, &field).unwrap();
        let bytes = fs::read(&data).unwrap();
        fs::write(&data, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(read_field(&path), Err(Error::Format { .. })));
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(read_field(&path), Err(Error::Format { .. })));
    }
}
