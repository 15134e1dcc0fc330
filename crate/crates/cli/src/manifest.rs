//! The atlas manifest pins every cached cap by a hash of its canonical
//! form, so edits to a cap file are caught even when the file still parses.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use capset_core::canon;
use capset_core::cap::CapSet;
use capset_core::space::Space;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capfile;

#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct Manifest {
    pub version: u32,
    pub entries: BTreeMap<String, Entry>,
}

#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct Entry {
    pub dim: usize,
    pub size: usize,
    /// sha256 of the canonical form, serialized as a cap file.
    pub canonical_sha256: String,
}

/// Hash of the canonical form: equal exactly for equivalent caps.
pub fn canonical_hash(space: &Space, cap: &CapSet) -> Result<String> {
    let cert = canon::canonical_form(space, cap)
        .map_err(|_| anyhow::anyhow!("the cap does not span its space"))?;
    let mask = CapSet::new(space, cert.mask).expect("canonical forms are caps");
    let text = capfile::format_cap(space, &mask);
    Ok(hex(&Sha256::digest(text.as_bytes())))
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn entry_for(space: &Space, cap: &CapSet) -> Result<Entry> {
    Ok(Entry {
        dim: space.n(),
        size: cap.len(),
        canonical_sha256: canonical_hash(space, cap)?,
    })
}

pub fn read(path: &Path) -> Result<Manifest> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: Manifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if m.version != 1 {
        bail!("{}: unsupported manifest version {}", path.display(), m.version);
    }
    Ok(m)
}

pub fn write(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    capfile::write_atomic(path, text.as_bytes())
}
