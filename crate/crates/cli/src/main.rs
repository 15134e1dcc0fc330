//! Command-line surface over the library: atlas management, cap file
//! analysis, canonical forms, batch jobs, and the claim registry.
//!
//! Exit codes: 0 success, 1 a check or equivalence query failed, 2 usage
//! or input errors.

use capset_cli::{capfile, jobs, manifest, store};

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use capset_core::atlas::{self, ATLAS_NAMES};
use capset_core::cap::CapSet;
use capset_core::canon;
use capset_core::directions::{canon_matrix, canon_triple, direction_point_count, DirectionSpec};
use capset_core::space::{Point, Space};
use capset_core::verify::{self, Runtime};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "capset",
    version,
    about = "Exact computation with caps in affine space over the three-element field"
)]
struct Cli {
    /// Atlas directory; beats CAPSET_ATLAS_DIR, which beats `./atlas`
    #[arg(long, value_name = "DIR", global = true)]
    atlas: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Manage the cached reference caps
    Atlas {
        #[command(subcommand)]
        cmd: AtlasCmd,
    },
    /// Size, spans, completeness, and direction censuses of a cap file
    Analyze {
        cap: PathBuf,
        /// Census the directions of this codimension (1 or 2)
        #[arg(long, value_name = "C")]
        codim: Option<usize>,
        /// Also report canonical data and recognized substructure
        #[arg(long)]
        features: bool,
    },
    /// Canonical data of one cap, or an equivalence query on two
    Canon {
        cap_a: PathBuf,
        cap_b: Option<PathBuf>,
    },
    /// Run a JSON-described extension search, writing found caps
    Search { job: PathBuf },
    /// Run a JSON-described placement sweep
    Placements {
        job: PathBuf,
        /// Directory for resumable progress snapshots
        #[arg(long, value_name = "DIR")]
        checkpoint: Option<PathBuf>,
    },
    /// Re-derive recorded claims against the cached atlas
    Verify {
        /// One check by id (see --list)
        #[arg(long, value_name = "ID", conflicts_with_all = ["all", "list"])]
        id: Option<String>,
        /// Every check within the runtime budget
        #[arg(long)]
        all: bool,
        /// Runtime budget for --all: fast, medium, or long
        #[arg(long, value_name = "CLASS", default_value = "medium")]
        max_runtime: String,
        /// Print the known check ids and exit
        #[arg(long, conflicts_with = "all")]
        list: bool,
        /// Also write the report to this path as JSON
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AtlasCmd {
    /// Derive the reference caps and write them under the atlas root
    Build {
        /// Build one entry; its dependencies are built in memory only
        #[arg(long, value_name = "NAME")]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let root = store::resolve_root(cli.atlas.as_deref());
    let out = match cli.cmd {
        Cmd::Atlas { cmd: AtlasCmd::Build { only } } => cmd_atlas_build(&root, only.as_deref()),
        Cmd::Analyze { cap, codim, features } => cmd_analyze(&cap, codim, features),
        Cmd::Canon { cap_a, cap_b } => cmd_canon(&cap_a, cap_b.as_deref()),
        Cmd::Search { job } => cmd_search(&job),
        Cmd::Placements { job, checkpoint } => cmd_placements(&job, checkpoint.as_deref()),
        Cmd::Verify { id, all, max_runtime, list, json } => {
            cmd_verify(&root, id.as_deref(), all, &max_runtime, list, json.as_deref())
        }
    };
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn fmt_point(space: &Space, p: Point) -> String {
    space.digits(p).iter().map(|&d| char::from(b'0' + d)).collect()
}

fn fmt_points<I: IntoIterator<Item = Point>>(space: &Space, pts: I) -> String {
    let mut parts: Vec<String> = pts.into_iter().map(|p| fmt_point(space, p)).collect();
    parts.sort();
    format!("{{{}}}", parts.join(", "))
}

fn fmt_rows(d: &DirectionSpec) -> String {
    let mut s = format!("{:?}", d.row(0));
    if d.codim() == 2 {
        s.push_str(&format!(" / {:?}", d.row(1)));
    }
    s
}

fn cmd_atlas_build(root: &Path, only: Option<&str>) -> Result<bool> {
    let names: Vec<&str> = match only {
        Some(name) => {
            if !ATLAS_NAMES.contains(&name) {
                bail!("unknown atlas entry `{name}` (known: {})", ATLAS_NAMES.join(", "));
            }
            vec![name]
        }
        None => ATLAS_NAMES.to_vec(),
    };
    let mut memo = BTreeMap::new();
    let mut built = Vec::new();
    for name in names {
        let t = Instant::now();
        let cap = store::build_entry(name, &mut memo)?;
        eprintln!(
            "built {name}: {} points, dim {} ({:.1}s)",
            cap.len(),
            cap.dim(),
            t.elapsed().as_secs_f64()
        );
        built.push((name, cap));
    }
    let refs: Vec<(&str, &CapSet)> = built.iter().map(|(n, c)| (*n, c)).collect();
    store::save_entries(root, &refs)?;
    for (name, _) in &built {
        println!("wrote {}", store::cap_path(root, name).display());
    }
    println!("wrote {}", store::manifest_path(root).display());
    Ok(true)
}

fn cmd_analyze(path: &Path, codim: Option<usize>, features: bool) -> Result<bool> {
    let (space, cap) = capfile::read_cap(path)?;
    println!("file: {}", path.display());
    let mut traits = Vec::new();
    if cap.spans(&space) {
        traits.push("spanning");
    } else {
        traits.push("non-spanning");
    }
    if cap.is_complete(&space) {
        traits.push("complete");
    }
    println!("dim {}, {} points, {}", space.n(), cap.len(), traits.join(", "));

    if let Some(c) = codim {
        if !(c == 1 || c == 2) || c >= space.n() {
            bail!("--codim must be 1 or 2 and below the dimension");
        }
        let mut tally: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for d in DirectionSpec::enumerate(space.n(), c) {
            let pc = direction_point_count(&space, cap.points(), &d);
            let key: Vec<u32> = if c == 1 {
                canon_triple(pc.triple()).to_vec()
            } else {
                canon_matrix(&pc.matrix()).to_vec()
            };
            *tally.entry(key).or_insert(0) += 1;
        }
        println!("codim-{c} census ({} directions):", DirectionSpec::count(space.n(), c));
        for (key, count) in tally.iter().rev() {
            let shown = if c == 1 {
                format!("{{{},{},{}}}", key[0], key[1], key[2])
            } else {
                format!(
                    "[[{},{},{}],[{},{},{}],[{},{},{}]]",
                    key[0], key[1], key[2], key[3], key[4], key[5], key[6], key[7], key[8]
                )
            };
            println!("  {shown}: {count}");
        }
    }

    if features {
        if cap.spans(&space) {
            println!("canonical sha256: {}", manifest::canonical_hash(&space, &cap)?);
            let auts = canon::automorphisms(&space, &cap)
                .map_err(|_| anyhow::anyhow!("automorphism search failed"))?;
            println!("automorphism group order: {}", auts.len());
        } else {
            println!("canonical data: skipped (cap does not span; project it first)");
        }
        if space.n() == 4 && cap.len() == 18 {
            match atlas::features_882a2(&space, &cap) {
                Ok(f) => {
                    println!("18-point landmarks:");
                    println!("  two-per-flat 2-flat direction: rows {}", fmt_rows(&f.nine2s));
                    println!("  cube-fiber {{8,5,5}} direction: row {}", fmt_rows(&f.d855));
                    println!("  cube-fiber {{8,8,2}} direction: row {}", fmt_rows(&f.d882));
                    println!(
                        "  standard squares: {} and {}",
                        fmt_points(&space, f.squares[0].iter()),
                        fmt_points(&space, f.squares[1].iter())
                    );
                    println!("  midpoint square: {}", fmt_points(&space, f.midsquare.iter()));
                }
                Err(e) => println!("18-point landmarks: not recognized ({e})"),
            }
        }
    }
    Ok(true)
}

fn cmd_canon(path_a: &Path, path_b: Option<&Path>) -> Result<bool> {
    let (space_a, cap_a) = capfile::read_cap(path_a)?;
    let Some(path_b) = path_b else {
        println!("file: {}", path_a.display());
        println!("dim {}, {} points", space_a.n(), cap_a.len());
        if cap_a.spans(&space_a) {
            println!("canonical sha256: {}", manifest::canonical_hash(&space_a, &cap_a)?);
            let auts = canon::automorphisms(&space_a, &cap_a)
                .map_err(|_| anyhow::anyhow!("automorphism search failed"))?;
            println!("automorphism group order: {}", auts.len());
        } else {
            let (hull, hull_dim, _) = canon::project_to_hull(&space_a, &cap_a);
            let hull_space = Space::new(hull_dim);
            println!("spans only a {hull_dim}-flat; canonical data of the projection:");
            println!("canonical sha256: {}", manifest::canonical_hash(&hull_space, &hull)?);
        }
        return Ok(true);
    };

    let (space_b, cap_b) = capfile::read_cap(path_b)?;
    if space_a.n() != space_b.n() {
        bail!(
            "{} is dim {} but {} is dim {}; equivalence queries need one ambient space",
            path_a.display(),
            space_a.n(),
            path_b.display(),
            space_b.n()
        );
    }
    match canon::are_isomorphic(&space_a, &cap_a, &cap_b) {
        Some(map) => {
            assert_eq!(
                cap_a.apply(&space_a, &map).to_vec(),
                cap_b.to_vec(),
                "the witness must carry one cap onto the other"
            );
            println!("isomorphic");
            let n = space_a.n();
            println!("witness (x maps to Mx + t, rows of M):");
            for r in 0..n {
                println!("  {:?}", map.matrix().row(r));
            }
            println!("  t = {:?}", &map.translation_part()[..n]);
            Ok(true)
        }
        None => {
            println!("not isomorphic");
            Ok(false)
        }
    }
}

fn cmd_search(job_path: &Path) -> Result<bool> {
    let job = jobs::read_search_job(job_path)?;
    let t = Instant::now();
    let written = jobs::run_search(&job)?;
    eprintln!("search finished in {:.1}s", t.elapsed().as_secs_f64());
    println!("found {} caps", written.len());
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(true)
}

fn cmd_placements(job_path: &Path, checkpoint: Option<&Path>) -> Result<bool> {
    let job = jobs::read_placements_job(job_path)?;
    let t = Instant::now();
    let mut last_pct = 0;
    let report = jobs::run_placements(&job, checkpoint, &mut |done, total| {
        let pct = done * 100 / total;
        if pct > last_pct {
            last_pct = pct;
            eprintln!("  {pct}% ({:.0}s)", t.elapsed().as_secs_f64());
        }
    })?;
    println!(
        "chunks {}..{}: scanned {} placements",
        report.chunk_start, report.chunk_end, report.scanned
    );
    println!("profiles:");
    for (n0, n2, count) in &report.profiles {
        println!("  ({n0}, {n2}): {count}");
    }
    println!("named hits: {}", report.named.len());
    println!("violations: {}", report.violations.len());
    Ok(report.violations.is_empty())
}

#[derive(Serialize)]
struct ReportRow {
    id: String,
    pass: bool,
    details: Vec<String>,
    witness: Option<String>,
}

#[derive(Serialize)]
struct ReportOut {
    checks: Vec<ReportRow>,
}

/// The cache integrity check owned by the CLI; core checks assume a loaded
/// atlas, this one pins the files the atlas came from.
const MANIFEST_CHECK: &str = "atlas-manifest";

fn known_ids() -> Vec<&'static str> {
    let mut ids = vec![MANIFEST_CHECK];
    ids.extend(verify::CHECKS.iter().map(|c| c.id));
    ids
}

fn cmd_verify(
    root: &Path,
    id: Option<&str>,
    all: bool,
    max_runtime: &str,
    list: bool,
    json: Option<&Path>,
) -> Result<bool> {
    if list {
        println!("{MANIFEST_CHECK} (fast): cap files match their manifest hashes");
        for c in verify::CHECKS.iter() {
            println!("{} ({}): {}", c.id, c.runtime.name(), c.summary);
        }
        return Ok(true);
    }
    let selected: Vec<&str> = match (id, all) {
        (Some(id), _) => {
            if !known_ids().contains(&id) {
                bail!("unknown check id `{id}`; run `capset verify --list`");
            }
            vec![id]
        }
        (None, true) => {
            let budget = Runtime::parse(max_runtime)
                .ok_or_else(|| anyhow::anyhow!("--max-runtime must be fast, medium, or long"))?;
            known_ids()
                .into_iter()
                .filter(|&id| {
                    id == MANIFEST_CHECK || verify::info(id).is_some_and(|c| c.runtime <= budget)
                })
                .collect()
        }
        (None, false) => bail!("pass --id <id>, --all, or --list"),
    };

    let needs_atlas = selected.iter().any(|&s| s != MANIFEST_CHECK);
    let atlas = if needs_atlas { Some(store::load_atlas(root)?) } else { None };

    let mut rows = Vec::new();
    for id in selected {
        let t = Instant::now();
        let row = if id == MANIFEST_CHECK {
            let (details, witness) = store::check_manifest(root)?;
            ReportRow { id: id.to_string(), pass: witness.is_none(), details, witness }
        } else {
            let mut last_pct = 0;
            let mut progress = |done: u64, total: u64| {
                let pct = done * 100 / total;
                if pct > last_pct {
                    last_pct = pct;
                    eprintln!("  [{id}] {pct}% ({:.0}s)", t.elapsed().as_secs_f64());
                }
            };
            let rep = verify::run_check(id, atlas.as_ref().unwrap(), &mut progress)
                .expect("selected ids are known");
            ReportRow {
                id: id.to_string(),
                pass: rep.pass,
                details: rep.details,
                witness: rep.witness,
            }
        };
        eprintln!("{} finished in {:.2}s", id, t.elapsed().as_secs_f64());
        let v = if row.pass { "PASS" } else { "FAIL" };
        println!("{v} {}", row.id);
        for line in &row.details {
            println!("    {line}");
        }
        if let Some(w) = &row.witness {
            println!("    witness: {w}");
        }
        std::io::stdout().flush().ok();
        rows.push(row);
    }

    let pass = rows.iter().all(|r| r.pass);
    let fails = rows.iter().filter(|r| !r.pass).count();
    println!("{} checks, {} failing", rows.len(), fails);
    if let Some(path) = json {
        let mut text = serde_json::to_string_pretty(&ReportOut { checks: rows })?;
        text.push('\n');
        capfile::write_atomic(path, text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(pass)
}
