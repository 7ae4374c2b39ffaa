use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// What produced a result file. Hashing covers every field, so re-running the
/// same manifest reproduces the same hash and the same CSV bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment: String,
    pub family_file: Option<String>,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

/// The manifest file written next to a result: the manifest itself plus its
/// hash, the digests of the outputs and a creation time that no hash covers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub manifest: ExperimentManifest,
    pub manifest_sha256: String,
    pub output_sha256: BTreeMap<String, String>,
    pub created_unix: u64,
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

impl ExperimentManifest {
    pub fn new(experiment: &str, family_file: Option<&str>, seed: Option<u64>) -> Self {
        ExperimentManifest {
            experiment: experiment.to_string(),
            family_file: family_file.map(str::to_string),
            params: BTreeMap::new(),
            seed,
            outputs: vec![],
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn hash(&self) -> String {
        sha256(serde_json::to_string(self).expect("manifests serialize").as_bytes())
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Write the result text to `out` (or stdout) and, for files, the manifest
/// record beside it.
pub fn emit(
    mut manifest: ExperimentManifest,
    out: Option<&Path>,
    render: impl FnOnce(&str) -> Result<String>,
) -> Result<()> {
    if let Some(p) = out {
        manifest.outputs = vec![p.display().to_string()];
    }
    let hash = manifest.hash();
    let text = render(&hash)?;
    match out {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
        Some(p) => {
            fs::write(p, &text).with_context(|| format!("cannot write {}", p.display()))?;
            let mut digests = BTreeMap::new();
            digests.insert(p.display().to_string(), sha256(text.as_bytes()));
            let rec = ManifestRecord {
                manifest,
                manifest_sha256: hash,
                output_sha256: digests,
                created_unix: std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            let mp = manifest_path(p);
            fs::write(&mp, serde_json::to_string_pretty(&rec)?)
                .with_context(|| format!("cannot write {}", mp.display()))?;
        }
    }
    Ok(())
}

/// CSV text with the manifest hash and a units line as leading comments.
pub fn csv_text(hash: &str, units: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut out = format!("# manifest sha256={hash}\n# units: {units}\n");
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    out.push_str(std::str::from_utf8(&w.into_inner()?)?);
    Ok(out)
}

pub fn read_record(path: &Path) -> Result<ManifestRecord> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let rec: ManifestRecord =
        serde_json::from_str(&text).with_context(|| format!("{} is not a manifest", path.display()))?;
    if rec.manifest.hash() != rec.manifest_sha256 {
        bail!("{}: manifest hash does not match its contents", path.display());
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_nothing_but_is_stable() {
        let a = ExperimentManifest::new("estimate", Some("fa2f"), Some(1)).param("q", 0.3);
        let b = ExperimentManifest::new("estimate", Some("fa2f"), Some(1)).param("q", 0.3);
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), b.param("q", 0.4).hash());
    }

    #[test]
    fn csv_has_comment_lines() {
        let t = csv_text("abc", "q probability", &["q"], &[vec!["0.5".into()]]).unwrap();
        assert_eq!(t, "# manifest sha256=abc\n# units: q probability\nq\n0.5\n");
    }
}
