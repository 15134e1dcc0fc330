//! Cap files: the one text format every saved point set uses.
//!
//! Line 1 `capset v1`, line 2 `dim <n>`, line 3 the point count, then one
//! point per line as n digits over {0,1,2} with coordinate 1 first, sorted
//! ascending by base-3 index. Trailing newline required.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use capset_core::cap::CapSet;
use capset_core::space::{Space, MAX_DIM};

pub const MAGIC: &str = "capset v1";

pub fn format_cap(space: &Space, cap: &CapSet) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "dim {}", space.n()).unwrap();
    writeln!(out, "{}", cap.len()).unwrap();
    for p in cap.iter() {
        for &d in space.digits(p) {
            out.push((b'0' + d) as char);
        }
        out.push('\n');
    }
    out
}

/// Parses the format, naming `origin` and a 1-based line in every error.
pub fn parse_cap(text: &str, origin: &str) -> Result<(Space, CapSet)> {
    let mut lines = text.split('\n');
    let mut lineno = 0usize;
    let mut next = |what: &str| {
        lineno += 1;
        lines
            .next()
            .ok_or_else(|| anyhow!("{origin}:{lineno}: missing {what}"))
    };

    let magic = next("header")?;
    if magic != MAGIC {
        bail!("{origin}:1: expected `{MAGIC}`, found `{magic}`");
    }
    let dim_line = next("dimension line")?;
    let n: usize = dim_line
        .strip_prefix("dim ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| anyhow!("{origin}:2: expected `dim <n>`, found `{dim_line}`"))?;
    if n < 1 || n > MAX_DIM {
        bail!("{origin}:2: dimension {n} is outside 1..={MAX_DIM}");
    }
    let count_line = next("point count")?;
    let count: usize = count_line
        .parse()
        .map_err(|_| anyhow!("{origin}:3: expected a point count, found `{count_line}`"))?;

    let space = Space::new(n);
    let mut points = Vec::with_capacity(count);
    let mut digits = vec![0u8; n];
    for i in 0..count {
        let line = next("point line")?;
        let lineno = 4 + i;
        if line.len() != n || !line.bytes().all(|b| (b'0'..=b'2').contains(&b)) {
            bail!("{origin}:{lineno}: expected {n} digits over 0,1,2, found `{line}`");
        }
        for (d, b) in digits.iter_mut().zip(line.bytes()) {
            *d = b - b'0';
        }
        let p = space.index_from_digits(&digits);
        if let Some(&prev) = points.last() {
            if p <= prev {
                bail!("{origin}:{lineno}: points must be strictly ascending");
            }
        }
        points.push(p);
    }
    match lines.next() {
        Some("") => {}
        Some(extra) => {
            bail!("{origin}:{}: unexpected extra line `{extra}`", 4 + count)
        }
        None => bail!("{origin}:{}: missing trailing newline", 3 + count),
    }
    if let Some(extra) = lines.next() {
        bail!("{origin}:{}: unexpected extra line `{extra}`", 5 + count);
    }

    let cap = CapSet::from_points(&space, points.iter().copied())
        .map_err(|_| anyhow!("{origin}: three of the points are collinear"))?;
    Ok((space, cap))
}

pub fn read_cap(path: &Path) -> Result<(Space, CapSet)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_cap(&text, &path.display().to_string())
}

/// Writes atomically: a dot-prefixed temp file in the target directory,
/// then a rename.
pub fn write_cap(path: &Path, space: &Space, cap: &CapSet) -> Result<()> {
    write_atomic(path, format_cap(space, cap).as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| anyhow!("{} has no file name", path.display()))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}
