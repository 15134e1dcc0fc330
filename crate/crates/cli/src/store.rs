//! The on-disk atlas: one cap file per entry plus the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use capset_core::atlas::{self, Atlas, ATLAS_NAMES};
use capset_core::cap::CapSet;
use capset_core::space::Space;

use crate::capfile;
use crate::manifest::{self, Manifest};

pub const ENV_ROOT: &str = "CAPSET_ATLAS_DIR";
pub const DEFAULT_ROOT: &str = "atlas";

/// Flag value beats the environment, which beats `atlas` in the working
/// directory.
pub fn resolve_root(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(ENV_ROOT) {
        if !p.is_empty() {
            return PathBuf::from(p);
        }
    }
    PathBuf::from(DEFAULT_ROOT)
}

pub fn cap_path(root: &Path, name: &str) -> PathBuf {
    root.join(format!("{name}.cap"))
}

pub fn manifest_path(root: &Path) -> PathBuf {
    root.join("manifest.json")
}

pub fn read_entry(root: &Path, name: &str) -> Result<(Space, CapSet)> {
    capfile::read_cap(&cap_path(root, name))
}

pub fn load_atlas(root: &Path) -> Result<Atlas> {
    let mut caps: BTreeMap<&str, CapSet> = BTreeMap::new();
    for name in ATLAS_NAMES {
        let (_, cap) = read_entry(root, name).with_context(|| {
            format!(
                "loading atlas entry {name} (run `capset atlas build` to populate {})",
                root.display()
            )
        })?;
        caps.insert(name, cap);
    }
    let mut take = |name: &str| caps.remove(name).unwrap();
    Ok(Atlas {
        cube: take("dim3-cube"),
        ninecap: take("dim3-9cap"),
        pyramid: take("dim3-pyramid"),
        tetracentre: take("dim3-tetracentre"),
        cap20: take("dim4-20cap"),
        cap882a2: take("dim4-882A2"),
        cap45: take("dim5-45cap"),
        delta686: take("dim5-delta686"),
        cap40: take("dim5-40cap"),
        cap96: take("dim6-96cap"),
        cap112: take("dim6-112cap"),
    })
}

/// Writes the named caps and upserts their manifest rows, keeping rows of
/// entries not written this time.
pub fn save_entries(root: &Path, entries: &[(&str, &CapSet)]) -> Result<()> {
    let mpath = manifest_path(root);
    let mut m = if mpath.exists() {
        manifest::read(&mpath)?
    } else {
        Manifest { version: 1, entries: BTreeMap::new() }
    };
    for (name, cap) in entries {
        let space = Space::new(cap.dim());
        capfile::write_cap(&cap_path(root, name), &space, cap)?;
        m.entries.insert(name.to_string(), manifest::entry_for(&space, cap)?);
    }
    manifest::write(&mpath, &m)
}

/// Re-derives every manifest row from the cap files. Detail lines and the
/// first failure come back for the report; `Ok(None)` means all rows match.
pub fn check_manifest(root: &Path) -> Result<(Vec<String>, Option<String>)> {
    let m = manifest::read(&manifest_path(root))?;
    let mut details = Vec::new();
    let mut witness = None;
    fn flag(details: &mut Vec<String>, witness: &mut Option<String>, line: String) {
        if witness.is_none() {
            *witness = Some(line.clone());
        }
        details.push(line);
    }
    for name in ATLAS_NAMES {
        let entry = match m.entries.get(name) {
            Some(e) => e,
            None => {
                flag(&mut details, &mut witness, format!("{name}: missing manifest row"));
                continue;
            }
        };
        let (space, cap) = match read_entry(root, name) {
            Ok(x) => x,
            Err(e) => {
                flag(&mut details, &mut witness, format!("{name}: {e}"));
                continue;
            }
        };
        if space.n() != entry.dim || cap.len() != entry.size {
            flag(
                &mut details,
                &mut witness,
                format!(
                    "{name}: file is a {}-point dim-{} cap, manifest says {} points dim {}",
                    cap.len(),
                    space.n(),
                    entry.size,
                    entry.dim
                ),
            );
            continue;
        }
        let h = manifest::canonical_hash(&space, &cap)?;
        if h != entry.canonical_sha256 {
            flag(&mut details, &mut witness, format!("{name}: canonical hash mismatch"));
        } else {
            details.push(format!("{name}: ok ({} points, dim {})", cap.len(), space.n()));
        }
    }
    for name in m.entries.keys() {
        if !ATLAS_NAMES.contains(&name.as_str()) {
            flag(&mut details, &mut witness, format!("{name}: unknown manifest row"));
        }
    }
    Ok((details, witness))
}

/// Builds one entry and everything it depends on, reusing work across
/// calls through `memo`.
pub fn build_entry(name: &str, memo: &mut BTreeMap<String, CapSet>) -> Result<CapSet> {
    if let Some(c) = memo.get(name) {
        return Ok(c.clone());
    }
    let built = match name {
        "dim3-cube" => atlas::build_cube(),
        "dim3-9cap" => atlas::build_9cap(),
        "dim4-20cap" => atlas::build_20cap(),
        "dim4-882A2" => atlas::build_882a2(),
        "dim5-45cap" => {
            let a2 = build_entry("dim4-882A2", memo)?;
            atlas::build_45cap(&a2)
        }
        "dim3-pyramid" | "dim3-tetracentre" => {
            let cap45 = build_entry("dim5-45cap", memo)?;
            let (pyr, tet) = atlas::extract_dim3_types(&cap45);
            memo.insert("dim3-pyramid".to_string(), pyr);
            memo.insert("dim3-tetracentre".to_string(), tet);
            return Ok(memo.get(name).unwrap().clone());
        }
        "dim5-delta686" => {
            let cap20 = build_entry("dim4-20cap", memo)?;
            atlas::build_delta686(&cap20)
        }
        "dim5-40cap" => {
            let cap112 = build_entry("dim6-112cap", memo)?;
            atlas::extract_40cap(&cap112)
        }
        "dim6-96cap" => {
            let cap45 = build_entry("dim5-45cap", memo)?;
            atlas::build_96cap(&cap45)
        }
        "dim6-112cap" => {
            let cap45 = build_entry("dim5-45cap", memo)?;
            atlas::build_112cap(&cap45)
        }
        _ => bail!(
            "unknown atlas entry `{name}` (known: {})",
            ATLAS_NAMES.join(", ")
        ),
    };
    memo.insert(name.to_string(), built);
    Ok(memo.get(name).unwrap().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_resolution_prefers_the_flag() {
        let flagged = resolve_root(Some(Path::new("/x/y")));
        assert_eq!(flagged, PathBuf::from("/x/y"));
        // without a flag the result is the env value or the default; both
        // are absolute statements about this process's environment
        let fallback = resolve_root(None);
        match std::env::var_os(ENV_ROOT) {
            Some(v) if !v.is_empty() => assert_eq!(fallback, PathBuf::from(v)),
            _ => assert_eq!(fallback, PathBuf::from(DEFAULT_ROOT)),
        }
    }

    #[test]
    fn save_load_and_manifest_check_agree() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        let cube = atlas::build_cube();
        let nine = atlas::build_9cap();
        save_entries(root, &[("dim3-cube", &cube)]).unwrap();
        save_entries(root, &[("dim3-9cap", &nine)]).unwrap();
        let m = manifest::read(&manifest_path(root)).unwrap();
        assert_eq!(m.entries.len(), 2, "upsert keeps earlier rows");

        let (_, back) = read_entry(root, "dim3-cube").unwrap();
        assert_eq!(back.to_vec(), cube.to_vec());

        // a well-formed file holding an inequivalent cap flips the hash:
        // the 9-cap minus a point is incomplete, the cube is not
        let space = Space::new(3);
        let mut other = nine.to_vec();
        other.pop();
        let other = CapSet::from_points(&space, other).unwrap();
        capfile::write_cap(&cap_path(root, "dim3-cube"), &space, &other).unwrap();
        let (_, witness) = check_manifest(root).unwrap();
        assert_eq!(witness.as_deref(), Some("dim3-cube: canonical hash mismatch"));
    }
}
