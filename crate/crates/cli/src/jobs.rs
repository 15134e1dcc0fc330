//! JSON job files for the two batch subcommands, and the placement sweep's
//! checkpointing. Schemas are documented in the README.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use capset_core::cap::CapSet;
use capset_core::directions::DirectionSpec;
use capset_core::placement::{self, SweepCensus, SweepHit};
use capset_core::search::{extend_dfs, ExtendSpec};
use capset_core::space::Space;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capfile;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchJob {
    pub dimension: usize,
    pub target: usize,
    /// Cap file the search grows from; empty seed when absent.
    #[serde(default)]
    pub seed: Option<PathBuf>,
    /// Embeds the seed on this level of a new first coordinate, so a seed
    /// one dimension down can pin a fiber.
    #[serde(default)]
    pub embed_seed_at_level: Option<u8>,
    /// Per-fiber point quotas: one row of functional weights for codim 1,
    /// two for codim 2; quotas indexed by value (3 entries) or by
    /// 3*v1+v2 (9 entries).
    #[serde(default)]
    pub fiber: Option<FiberQuota>,
    #[serde(default)]
    pub isomorph_free: bool,
    /// Stop after this many caps; 0 exhausts the search.
    #[serde(default = "default_limit")]
    pub limit: usize,
    /// Results land in `<output>-<index>.cap`.
    pub output: PathBuf,
}

fn default_limit() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberQuota {
    pub rows: Vec<Vec<u8>>,
    pub quotas: Vec<usize>,
}

pub fn read_search_job(path: &Path) -> Result<SearchJob> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let job: SearchJob =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if job.dimension < 1 || job.dimension > capset_core::space::MAX_DIM {
        bail!("{}: dimension {} is out of range", path.display(), job.dimension);
    }
    Ok(job)
}

pub fn run_search(job: &SearchJob) -> Result<Vec<PathBuf>> {
    let space = Space::new(job.dimension);
    let seed = match &job.seed {
        None => CapSet::empty(&space),
        Some(p) => {
            let (sspace, cap) = capfile::read_cap(p)?;
            match job.embed_seed_at_level {
                None => {
                    if sspace.n() != job.dimension {
                        bail!(
                            "seed {} has dimension {}, the job says {}",
                            p.display(),
                            sspace.n(),
                            job.dimension
                        );
                    }
                    cap
                }
                Some(level) => {
                    if level > 2 {
                        bail!("embed level {level} is not a digit over 0,1,2");
                    }
                    if sspace.n() + 1 != job.dimension {
                        bail!(
                            "seed {} has dimension {}, embedding needs {}",
                            p.display(),
                            sspace.n(),
                            job.dimension - 1
                        );
                    }
                    cap.embed_at_level(level)
                }
            }
        }
    };
    let fiber = match &job.fiber {
        None => None,
        Some(f) => {
            let d = match f.rows.len() {
                1 => DirectionSpec::codim1(job.dimension, &f.rows[0]),
                2 => DirectionSpec::codim2(job.dimension, &f.rows[0], &f.rows[1]),
                k => bail!("fiber needs 1 or 2 rows, found {k}"),
            }
            .ok_or_else(|| anyhow!("fiber rows are not independent functionals"))?;
            let want = if f.rows.len() == 1 { 3 } else { 9 };
            if f.quotas.len() != want {
                bail!("fiber quotas need {want} entries, found {}", f.quotas.len());
            }
            if f.quotas.iter().sum::<usize>() < job.target {
                bail!("fiber quotas sum below the target size");
            }
            Some((d, f.quotas.clone()))
        }
    };
    let spec = ExtendSpec {
        seed: &seed,
        target: job.target,
        fiber,
        isomorph_free: job.isomorph_free,
    };
    let limit = if job.limit == 0 { None } else { Some(job.limit) };
    let found = extend_dfs(&space, &spec, limit);
    let mut written = Vec::new();
    for (i, cap) in found.iter().enumerate() {
        let path = PathBuf::from(format!("{}-{i:03}.cap", job.output.display()));
        capfile::write_cap(&path, &space, cap)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementsJob {
    /// The fixed cap; the sweep enumerates companions against it.
    pub cap: PathBuf,
    /// Functional weights of the split direction. The sweep convention
    /// requires the plain first coordinate.
    pub direction: Vec<u8>,
    /// Chunk subrange [start, end); the full range when absent.
    #[serde(default)]
    pub chunks: Option<ChunkRange>,
    /// Report path; stdout carries a summary either way.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct ChunkRange {
    pub start: usize,
    pub end: usize,
}

pub fn read_placements_job(path: &Path) -> Result<PlacementsJob> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let job: PlacementsJob =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if job.direction != [1, 0, 0, 0, 0] {
        bail!(
            "{}: the sweep is defined for direction [1,0,0,0,0] on a dimension-5 cap",
            path.display()
        );
    }
    if let Some(r) = job.chunks {
        if r.start >= r.end || r.end > placement::SWEEP_CHUNK_COUNT {
            bail!(
                "{}: chunk range must satisfy start < end <= {}",
                path.display(),
                placement::SWEEP_CHUNK_COUNT
            );
        }
    }
    Ok(job)
}

#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct HitOut {
    pub cols: [u8; 4],
    pub shift: u8,
    pub n0: u16,
    pub n2: u16,
}

impl From<&SweepHit> for HitOut {
    fn from(h: &SweepHit) -> Self {
        HitOut { cols: h.cols, shift: h.shift, n0: h.n0, n2: h.n2 }
    }
}

#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
pub struct SweepReport {
    pub chunk_start: usize,
    pub chunk_end: usize,
    pub scanned: u64,
    /// Profile census rows as (n0, n2, count), ascending by profile.
    pub profiles: Vec<(u16, u16, u64)>,
    pub named: Vec<HitOut>,
    pub violations: Vec<HitOut>,
}

fn census_to_report(range: (usize, usize), census: &SweepCensus) -> SweepReport {
    SweepReport {
        chunk_start: range.0,
        chunk_end: range.1,
        scanned: census.scanned,
        profiles: census.counts.iter().map(|(&(a, b), &c)| (a, b, c)).collect(),
        named: census.named.iter().map(HitOut::from).collect(),
        violations: census.violations.iter().map(HitOut::from).collect(),
    }
}

/// Checkpoint state: the merged census so far plus the next chunk index,
/// keyed by a job fingerprint so a stale file is never resumed.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    job_key: String,
    next_chunk: usize,
    report: SweepReport,
}

fn report_to_census(rep: &SweepReport) -> SweepCensus {
    let mut counts = BTreeMap::new();
    for &(a, b, c) in &rep.profiles {
        counts.insert((a, b), c);
    }
    SweepCensus {
        counts,
        named: rep
            .named
            .iter()
            .map(|h| SweepHit { cols: h.cols, shift: h.shift, n0: h.n0, n2: h.n2 })
            .collect(),
        violations: rep
            .violations
            .iter()
            .map(|h| SweepHit { cols: h.cols, shift: h.shift, n0: h.n0, n2: h.n2 })
            .collect(),
        scanned: rep.scanned,
    }
}

fn job_key(cap_text: &str, range: (usize, usize)) -> String {
    let mut h = Sha256::new();
    h.update(cap_text.as_bytes());
    h.update(format!("chunks {}..{}", range.0, range.1).as_bytes());
    format!("{:x}", h.finalize())
}

/// Chunks between checkpoint writes; one chunk is ~315k placements.
const CHECKPOINT_EVERY: usize = 64;

pub fn run_placements(
    job: &PlacementsJob,
    checkpoint_dir: Option<&Path>,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepReport> {
    let (space, cap) = capfile::read_cap(&job.cap)?;
    if space.n() != 5 {
        bail!("{}: the sweep needs a dimension-5 cap", job.cap.display());
    }
    let d = DirectionSpec::codim1(5, &job.direction).expect("validated on read");
    let range = match job.chunks {
        Some(r) => (r.start, r.end),
        None => (0, placement::SWEEP_CHUNK_COUNT),
    };
    let key = job_key(&capfile::format_cap(&space, &cap), range);
    let ckpt_path = checkpoint_dir.map(|d| d.join("placements-checkpoint.json"));

    let mut census = SweepCensus::empty();
    let mut start = range.0;
    if let Some(path) = &ckpt_path {
        if path.exists() {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let ck: Checkpoint = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            if ck.job_key == key && ck.next_chunk > range.0 && ck.next_chunk <= range.1 {
                census = report_to_census(&ck.report);
                start = ck.next_chunk;
            }
        }
    }

    let input = placement::sweep_input(&space, &cap, &d);
    for chunk in start..range.1 {
        census.merge(placement::sweep_chunk(&input, chunk));
        progress(chunk + 1 - range.0, range.1 - range.0);
        let done = chunk + 1;
        if let Some(path) = &ckpt_path {
            if done % CHECKPOINT_EVERY == 0 && done < range.1 {
                let ck = Checkpoint {
                    job_key: key.clone(),
                    next_chunk: done,
                    report: census_to_report(range, &census),
                };
                let mut text = serde_json::to_string(&ck)?;
                text.push('\n');
                capfile::write_atomic(path, text.as_bytes())?;
            }
        }
    }
    if let Some(path) = &ckpt_path {
        if path.exists() {
            let _ = fs::remove_file(path);
        }
    }
    let report = census_to_report(range, &census);
    if let Some(out) = &job.output {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        capfile::write_atomic(out, text.as_bytes())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use capset_core::atlas;

    fn write_job(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn search_job_reproduces_the_20cap_count() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let path = write_job(
            dir.path(),
            "job.json",
            &format!(
                r#"{{"dimension": 3, "target": 9, "isomorph_free": true,
                    "limit": 0, "output": "{}"}}"#,
                out.display()
            ),
        );
        let job = read_search_job(&path).unwrap();
        let written = run_search(&job).unwrap();
        assert_eq!(written.len(), 1, "one 9-cap class in dimension 3");
        let (_, cap) = capfile::read_cap(&written[0]).unwrap();
        assert_eq!(cap.len(), 9);
    }

    #[test]
    fn search_job_honors_fiber_quotas() {
        let dir = tempfile::tempdir().unwrap();
        let space = Space::new(3);
        let nine = atlas::build_9cap();
        let seed_path = dir.path().join("seed.cap");
        capfile::write_cap(&seed_path, &space, &nine).unwrap();
        let out = dir.path().join("got");
        let path = write_job(
            dir.path(),
            "job.json",
            &format!(
                r#"{{"dimension": 4, "target": 20,
                    "seed": "{}", "embed_seed_at_level": 1,
                    "fiber": {{"rows": [[1,0,0,0]], "quotas": [2, 9, 9]}},
                    "limit": 1, "output": "{}"}}"#,
                seed_path.display(),
                out.display()
            ),
        );
        let job = read_search_job(&path).unwrap();
        let written = run_search(&job).unwrap();
        assert_eq!(written.len(), 1);
        let (s4, cap) = capfile::read_cap(&written[0]).unwrap();
        assert_eq!((s4.n(), cap.len()), (4, 20));
    }

    #[test]
    fn placements_checkpoint_resumes_to_the_same_report() {
        let dir = tempfile::tempdir().unwrap();
        let space = Space::new(5);
        let a2 = atlas::build_882a2();
        let cap45 = atlas::build_45cap(&a2);
        let cap_path = dir.path().join("cap45.cap");
        capfile::write_cap(&cap_path, &space, &cap45).unwrap();
        let jobtext = format!(
            r#"{{"cap": "{}", "direction": [1,0,0,0,0],
                "chunks": {{"start": 0, "end": 130}}}}"#,
            cap_path.display()
        );
        let path = write_job(dir.path(), "job.json", &jobtext);
        let job = read_placements_job(&path).unwrap();

        let straight = run_placements(&job, None, &mut |_, _| {}).unwrap();

        // interrupt after the first checkpoint write, then resume
        let ckdir = dir.path().join("ck");
        fs::create_dir_all(&ckdir).unwrap();
        let err = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            let mut calls = 0usize;
            let _ = run_placements(
                &job,
                Some(&ckdir),
                &mut |done, _| {
                    calls += 1;
                    if done == CHECKPOINT_EVERY + 1 {
                        panic!("interrupt");
                    }
                },
            );
        }));
        assert!(err.is_err(), "the interruption fired");
        assert!(ckdir.join("placements-checkpoint.json").exists());
        let resumed = run_placements(&job, Some(&ckdir), &mut |_, _| {}).unwrap();
        assert_eq!(resumed, straight);
        assert!(
            !ckdir.join("placements-checkpoint.json").exists(),
            "a finished run clears its checkpoint"
        );
    }
}
