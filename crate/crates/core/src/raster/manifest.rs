//! Band manifests: UTF-8 text, one `<label>\t<pgm path>` per line.
//!
//! Paths are relative to the manifest's directory and blank lines are
//! ignored. Labels are limited to `[A-Za-z0-9_/]` so they can be written
//! to CSV unquoted.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{load_pgm, BandStack};

pub fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '/')
}

pub fn load_band_stack(manifest_path: impl AsRef<Path>) -> Result<BandStack> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(manifest_path.to_path_buf())
        } else {
            Error::IoFailure {
                path: manifest_path.to_path_buf(),
                source: e,
            }
        }
    })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut stack = BandStack::new(Vec::new(), Vec::new())?;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (label, rel) = line
            .split_once('\t')
            .ok_or_else(|| Error::MalformedManifest {
                line: idx + 1,
                reason: "expected <label><TAB><path>".into(),
            })?;
        if !is_valid_label(label) {
            return Err(Error::MalformedManifest {
                line: idx + 1,
                reason: format!("label {label:?} must match [A-Za-z0-9_/]+"),
            });
        }
        if stack.labels().iter().any(|l| l == label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        let band = load_pgm(base.join(rel.trim()))?;
        stack.push(label, band)?;
    }
    Ok(stack)
}
