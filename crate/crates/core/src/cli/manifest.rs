use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Record of one CLI invocation, written next to its primary output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub version: String,
    pub duration_seconds: f64,
    #[serde(default)]
    pub checks: Vec<CheckOutcome>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: 0.0,
            checks: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("parameter serialises"));
        self
    }

    /// Hex sha256 of the manifest's canonical JSON with the duration removed.
    pub fn content_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serialises");
        if let Value::Object(map) = &mut v {
            map.remove("duration_seconds");
        }
        let bytes = serde_json::to_vec(&v).expect("manifest serialises");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }
}

/// `<out>.run.json`.
pub fn run_manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".run.json");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_duration_only() {
        let a = RunManifest::new("verify").param("refinements", 3);
        let mut b = a.clone();
        b.duration_seconds = 12.5;
        assert_eq!(a.content_hash(), b.content_hash());
        let c = a.clone().param("refinements", 2);
        assert_ne!(a.content_hash(), c.content_hash());
        assert_eq!(run_manifest_path(Path::new("out/v.csv")), PathBuf::from("out/v.csv.run.json"));
    }
}
