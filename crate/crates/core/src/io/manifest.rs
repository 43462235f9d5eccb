//! Run manifests: a versioned TOML document describing one invocation and hashing
//! every file it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::GroupSpec;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub command: Vec<String>,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default)]
    pub grids: Vec<String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub artifacts: Vec<ArtifactHash>,
    /// Excluded from reproducibility comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            manifest_version: MANIFEST_VERSION,
            command,
            exit_code: 0,
            group: None,
            domain: None,
            grids: Vec::new(),
            tolerances: BTreeMap::new(),
            artifacts: Vec::new(),
            timing: None,
        }
    }

    /// Hashes a written file and records it.
    pub fn add_artifact(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path)?;
        self.artifacts.push(ArtifactHash { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        Ok(())
    }

    pub fn render(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("manifest serialisation: {e}")))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: Self = toml::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        if m.manifest_version != MANIFEST_VERSION {
            return Err(Error::Parse(format!("unsupported manifest version {}", m.manifest_version)));
        }
        Ok(m)
    }

    /// The manifest without wall-clock data.
    pub fn reproducible_view(&self) -> Self {
        Self { timing: None, ..self.clone() }
    }

    /// True when two runs agree on everything except timing.
    pub fn reproduces(&self, other: &Self) -> bool {
        self.reproducible_view() == other.reproducible_view()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn round_trip_and_timing_exclusion() {
        let mut m = RunManifest::new(vec!["helix-mse".into(), "solve".into()]);
        m.group = Some(GroupSpec::standard(1.0, 1.0, 3).unwrap());
        m.tolerances.insert("abs_tol".into(), 1e-12);
        m.artifacts.push(ArtifactHash { path: "f.csv".into(), sha256: sha256_hex(b"x") });
        m.timing = Some(Timing { wall_time_s: 1.5 });
        let back = RunManifest::parse(&m.render().unwrap()).unwrap();
        assert_eq!(back, m);
        let mut other = m.clone();
        other.timing = Some(Timing { wall_time_s: 2.5 });
        assert!(m.reproduces(&other));
        other.artifacts[0].sha256 = sha256_hex(b"y");
        assert!(!m.reproduces(&other));
    }
}
