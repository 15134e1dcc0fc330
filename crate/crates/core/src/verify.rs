//! Registry of recorded claims about the atlas caps, each re-derived from
//! scratch against the cached representatives.
//!
//! Every check has a stable id, a runtime class, and a report whose detail
//! lines are produced in a deterministic order, so two runs over the same
//! atlas emit byte-identical output.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::affine::AffineMap;
use crate::atlas::{self, Atlas};
use crate::canon;
use crate::cap::CapSet;
use crate::directions::{
    canon_matrix, canon_triple, direction_point_count, moment_identities, spectrum, CountKey,
    DirectionSpec, Spectrum,
};
use crate::fibration::Fibration;
use crate::placement;
use crate::search;
use crate::space::{Point, Space};
use crate::pointset::PointSet;

/// Wall-clock class a check is budgeted for: `Fast` finishes in seconds,
/// `Medium` in minutes, `Long` is the full placement sweep.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Runtime {
    Fast,
    Medium,
    Long,
}

impl Runtime {
    pub fn name(self) -> &'static str {
        match self {
            Runtime::Fast => "fast",
            Runtime::Medium => "medium",
            Runtime::Long => "long",
        }
    }

    pub fn parse(s: &str) -> Option<Runtime> {
        match s {
            "fast" => Some(Runtime::Fast),
            "medium" => Some(Runtime::Medium),
            "long" => Some(Runtime::Long),
            _ => None,
        }
    }
}

pub struct CheckInfo {
    pub id: &'static str,
    pub runtime: Runtime,
    pub summary: &'static str,
}

pub const CHECKS: [CheckInfo; 19] = [
    CheckInfo {
        id: "D1-counts",
        runtime: Runtime::Fast,
        summary: "direction counts in dimensions 5 and 6",
    },
    CheckInfo {
        id: "A-882A2",
        runtime: Runtime::Fast,
        summary: "landmark directions and count matrix of the 882A2 cap",
    },
    CheckInfo {
        id: "L2.2-census",
        runtime: Runtime::Fast,
        summary: "hyperplane categories, special directions and axis of the 45-cap",
    },
    CheckInfo {
        id: "L2.3-k1",
        runtime: Runtime::Fast,
        summary: "1-point exchanges of the 882A2 cap are all trivial",
    },
    CheckInfo {
        id: "L2.3-k2",
        runtime: Runtime::Fast,
        summary: "2-point exchanges of the 882A2 cap are all trivial",
    },
    CheckInfo {
        id: "L2.3-k3",
        runtime: Runtime::Fast,
        summary: "3-point exchanges of the 882A2 cap are all trivial",
    },
    CheckInfo {
        id: "L2.3-k4",
        runtime: Runtime::Fast,
        summary: "a nontrivial 4-point exchange of the 882A2 cap exists",
    },
    CheckInfo {
        id: "L2.4-parallel",
        runtime: Runtime::Fast,
        summary: "landmark alignment across every paired hyperplane of the 45-cap",
    },
    CheckInfo {
        id: "L2.5a",
        runtime: Runtime::Fast,
        summary: "midpoint profile of the 882A2 cap against each of its translates",
    },
    CheckInfo {
        id: "L2.5b",
        runtime: Runtime::Fast,
        summary: "midpoint profile of the 882A2 cap against each reflected translate",
    },
    CheckInfo {
        id: "L3.1a",
        runtime: Runtime::Fast,
        summary: "hyperplane census of the 112-cap",
    },
    CheckInfo {
        id: "L3.1c",
        runtime: Runtime::Fast,
        summary: "codim-2 census of the 112-cap",
    },
    CheckInfo {
        id: "L3.1d",
        runtime: Runtime::Fast,
        summary: "heavy codim-2 class equals the pairwise spans of {45,45,22} directions",
    },
    CheckInfo {
        id: "L3.2-design",
        runtime: Runtime::Fast,
        summary: "census of the 90 dual vectors of the paired directions",
    },
    CheckInfo {
        id: "P3.6-cases",
        runtime: Runtime::Medium,
        summary: "full midpoint-profile sweep over all affine second placements",
    },
    CheckInfo {
        id: "P40-census",
        runtime: Runtime::Fast,
        summary: "census and fiber types of the 40-cap",
    },
    CheckInfo {
        id: "P3.7-dir",
        runtime: Runtime::Fast,
        summary: "the delta686 census is unreachable from the 45-cap by 3 removals",
    },
    CheckInfo {
        id: "P4.1a-opt1",
        runtime: Runtime::Fast,
        summary: "midpoint profiles of all 486 sheared placements of the 112-cap",
    },
    CheckInfo {
        id: "T1-delta686",
        runtime: Runtime::Fast,
        summary: "hyperplane census of the delta686 cap",
    },
];

pub fn info(id: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.id == id)
}

/// Expected values each check compares against.
pub mod expected {
    /// Hyperplane direction counts by dimension, (3^n - 1)/2.
    pub const DIRS_DIM5_CODIM1: usize = 121;
    pub const DIRS_DIM6_CODIM1: usize = 364;
    /// Codim-2 direction count in dimension 6, (3^6 - 1)(3^5 - 1) / 16.
    pub const DIRS_DIM6_CODIM2: usize = 11011;

    /// Hyperplane categories of the 45-cap, in the order: {18,18,9} with
    /// plain 18-fibers, {18,18,9} with two 882A2 fibers, {15,15,15}
    /// containing the axis, {15,15,15} missing it.
    pub const CAP45_CATEGORIES: [usize; 4] = [10, 45, 30, 36];
    pub const CAP45_SPECIAL_DIRS: usize = 45;
    pub const CAP45_DIRS_THROUGH_AXIS: usize = 40;

    /// Trivial exchange counts C(18,k) for k = 1, 2, 3.
    pub const EXCHANGES_SMALL: [usize; 3] = [18, 153, 816];

    pub const CENSUS_112_CODIM1: [([u32; 3], u32); 2] = [([45, 45, 22], 56), ([40, 36, 36], 308)];
    /// The three codim-2 fiber matrices of the 112-cap with their counts,
    /// written with row = first value, column = second value.
    pub const CLASS_1540: [[u32; 3]; 3] = [[18, 9, 18], [9, 4, 9], [18, 9, 18]];
    pub const CLASS_3696: [[u32; 3]; 3] = [[15, 6, 15], [15, 10, 15], [15, 6, 15]];
    pub const CLASS_5775: [[u32; 3]; 3] = [[12, 12, 12], [12, 16, 12], [12, 12, 12]];
    pub const CENSUS_112_CODIM2: [u32; 3] = [1540, 3696, 5775];

    /// Hyperplane census of the 90 dual vectors, descending key order.
    pub const DUAL_CENSUS: [([u32; 3], u32); 4] = [
        ([45, 45, 0], 1),
        ([36, 36, 18], 10),
        ([36, 27, 27], 20),
        ([30, 30, 30], 90),
    ];
    /// Joint fiber matrix of the empty-fiber direction with each of the
    /// twenty {36,27,27} directions.
    pub const DUAL_Z_MATRIX: [[u32; 3]; 3] = [[9, 0, 18], [18, 0, 18], [18, 0, 9]];

    pub const SWEEP_TOTAL: u64 = 1_965_150_720;
    /// Multiplicity of each named midpoint profile over the full sweep.
    pub const SWEEP_COUNTS: [((u16, u16), u64); 4] =
        [((0, 45), 8), ((22, 22), 8), ((6, 6), 32), ((2, 14), 176)];

    pub const CENSUS_DELTA686: [([u32; 3], u32); 8] = [
        ([20, 16, 6], 3),
        ([18, 18, 6], 4),
        ([18, 17, 7], 18),
        ([18, 12, 12], 6),
        ([16, 15, 11], 24),
        ([16, 14, 12], 36),
        ([15, 15, 12], 3),
        ([14, 14, 14], 27),
    ];
    pub const DELTA686_HEAVY_DIRS: usize = 3;

    pub const CAP40_HEAVY_DIRS: usize = 10;
    pub const FAMILY_PLACEMENTS: usize = 486;
    pub const FAMILY_TRANSLATIONS: usize = 2;
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub id: &'static str,
    pub pass: bool,
    pub details: Vec<String>,
    pub witness: Option<String>,
}

struct Ctx {
    details: Vec<String>,
    pass: bool,
    witness: Option<String>,
}

impl Ctx {
    fn new() -> Ctx {
        Ctx { details: Vec::new(), pass: true, witness: None }
    }

    fn fail(&mut self, w: String) {
        self.pass = false;
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    fn eq<T: PartialEq + core::fmt::Debug>(&mut self, what: &str, observed: T, expected: T) -> bool {
        let ok = observed == expected;
        self.details
            .push(format!("{what}: observed {observed:?}, expected {expected:?}"));
        if !ok {
            self.fail(format!("{what}: observed {observed:?}, expected {expected:?}"));
        }
        ok
    }

    fn check(&mut self, what: &str, ok: bool) -> bool {
        self.details
            .push(format!("{what}: {}", if ok { "holds" } else { "FAILS" }));
        if !ok {
            self.fail(String::from(what));
        }
        ok
    }

    fn note(&mut self, line: String) {
        self.details.push(line);
    }

    fn report(self, id: &'static str) -> CheckReport {
        CheckReport { id, pass: self.pass, details: self.details, witness: self.witness }
    }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Observed spectrum rows as notes, then one equality line.
fn eq_census(ctx: &mut Ctx, what: &str, sp: &Spectrum, expected: &[(CountKey, u32)]) {
    for (key, mult) in &sp.census {
        ctx.note(format!("  {:?} x {}", key.as_slice(), mult));
    }
    let ok = sp.census.as_slice() == expected;
    ctx.check(&format!("{what} matches the recorded census"), ok);
}

fn triple_census(rows: &[([u32; 3], u32)]) -> Vec<(CountKey, u32)> {
    rows.iter().map(|&(t, m)| (CountKey::Triple(t), m)).collect()
}

/// Classified hyperplane directions of the 45-cap, its special codim-2
/// directions, and the line directions common to every special kernel.
struct Cap45Structure {
    plain18: Vec<DirectionSpec>,
    paired18: Vec<DirectionSpec>,
    mixed18: Vec<DirectionSpec>,
    level15: Vec<DirectionSpec>,
    other: Vec<DirectionSpec>,
    special: Vec<DirectionSpec>,
    axis_candidates: Vec<Point>,
}

impl Cap45Structure {
    fn axis(&self) -> Option<Point> {
        if self.axis_candidates.len() == 1 {
            Some(self.axis_candidates[0])
        } else {
            None
        }
    }
}

fn cap45_structure(s5: &Space, cap45: &CapSet, a2: &CapSet) -> Result<Cap45Structure, String> {
    let s4 = Space::new(4);
    let a2_mask = canon::canonical_form(&s4, a2)
        .map_err(|_| String::from("reference 18-cap has no canonical form"))?
        .mask;
    let mut st = Cap45Structure {
        plain18: Vec::new(),
        paired18: Vec::new(),
        mixed18: Vec::new(),
        level15: Vec::new(),
        other: Vec::new(),
        special: Vec::new(),
        axis_candidates: Vec::new(),
    };
    for d in DirectionSpec::enumerate(5, 1) {
        let t = canon_triple(direction_point_count(s5, cap45.points(), &d).triple());
        if t == [18, 18, 9] {
            let fib = Fibration::new(d);
            let mut hits = 0;
            for v in 0..3u8 {
                let f = fib.fiber_cap(s5, cap45, &[v]);
                if f.len() != 18 {
                    continue;
                }
                let mask = canon::canonical_form(&s4, &f)
                    .map_err(|_| String::from("18-fiber has no canonical form"))?
                    .mask;
                if mask == a2_mask {
                    hits += 1;
                }
            }
            match hits {
                2 => st.paired18.push(d),
                0 => st.plain18.push(d),
                _ => st.mixed18.push(d),
            }
        } else if t == [15, 15, 15] {
            st.level15.push(d);
        } else {
            st.other.push(d);
        }
    }
    // Special 2-flat directions: all nine fibers have 5 points, and the nine
    // fiber shapes split into two classes with multiplicities eight and one.
    // All-fives directions with a single uniform class exist too and do not
    // qualify.
    let s3 = Space::new(3);
    for d in DirectionSpec::enumerate(5, 2) {
        let m = direction_point_count(s5, cap45.points(), &d).matrix();
        if !m.iter().all(|row| row.iter().all(|&c| c == 5)) {
            continue;
        }
        let fib = Fibration::new(d);
        let mut tally: BTreeMap<Vec<Point>, u32> = BTreeMap::new();
        for v1 in 0..3u8 {
            for v2 in 0..3u8 {
                let f = fib.fiber_cap(s5, cap45, &[v1, v2]);
                let mask = canon::canonical_form(&s3, &f)
                    .map_err(|_| String::from("5-point fiber has no canonical form"))?
                    .mask;
                *tally.entry(mask.to_vec()).or_insert(0) += 1;
            }
        }
        let mut counts: Vec<u32> = tally.values().copied().collect();
        counts.sort_unstable();
        if counts == [1, 8] {
            st.special.push(d);
        }
    }
    for v in s5.line_directions() {
        if st.special.iter().all(|d| d.kernel_contains(s5, v)) {
            st.axis_candidates.push(v);
        }
    }
    Ok(st)
}

fn d1_counts(ctx: &mut Ctx) {
    ctx.eq(
        "hyperplane directions in dimension 5",
        DirectionSpec::count(5, 1),
        expected::DIRS_DIM5_CODIM1,
    );
    ctx.eq(
        "hyperplane directions in dimension 6",
        DirectionSpec::count(6, 1),
        expected::DIRS_DIM6_CODIM1,
    );
    ctx.eq(
        "codim-2 directions in dimension 6",
        DirectionSpec::count(6, 2),
        expected::DIRS_DIM6_CODIM2,
    );
    ctx.eq(
        "enumerated hyperplane directions in dimension 6",
        DirectionSpec::enumerate(6, 1).len(),
        expected::DIRS_DIM6_CODIM1,
    );
    ctx.eq(
        "enumerated codim-2 directions in dimension 6",
        DirectionSpec::enumerate(6, 2).len(),
        expected::DIRS_DIM6_CODIM2,
    );
}

fn a_882a2(ctx: &mut Ctx, atlas: &Atlas) {
    let s4 = Space::new(4);
    let cap = &atlas.cap882a2;
    ctx.eq("cap size", cap.len(), 18);
    ctx.check("cap is complete", cap.is_complete(&s4));
    match atlas::features_882a2(&s4, cap) {
        Ok(f) => {
            ctx.note(format!(
                "unique all-2s codim-2 direction: rows {:?} {:?}",
                f.nine2s.row(0),
                f.nine2s.row(1)
            ));
            ctx.note(format!(
                "unique {{8,5,5}} direction with cube 8-fiber: row {:?}",
                f.d855.row(0)
            ));
            ctx.note(format!(
                "unique {{8,8,2}} direction with two cube 8-fibers: row {:?}",
                f.d882.row(0)
            ));
            ctx.eq(
                "joint count matrix of the distinguished pair",
                f.counts,
                atlas::PAIR_COUNTS,
            );
            ctx.check("4-point fibers are squares and translates of each other", true);
            ctx.check("corner-fiber midpoints form a square", true);
            ctx.check(
                "midpoint-square flat holds both square centres and one point per 1-fiber",
                true,
            );
        }
        Err(e) => {
            ctx.check(&format!("landmark features: {e}"), false);
        }
    }
}

fn l22_census(ctx: &mut Ctx, atlas: &Atlas) {
    let s5 = Space::new(5);
    let s3 = Space::new(3);
    let cap = &atlas.cap45;
    ctx.eq("cap size", cap.len(), 45);
    ctx.check("cap is complete", cap.is_complete(&s5));
    let st = match cap45_structure(&s5, cap, &atlas.cap882a2) {
        Ok(st) => st,
        Err(e) => {
            ctx.check(&e, false);
            return;
        }
    };
    ctx.eq("directions with an unexpected fiber census", st.other.len(), 0);
    ctx.eq("directions mixing one 882A2 fiber with one other", st.mixed18.len(), 0);
    ctx.eq(
        "special codim-2 directions with nine 5-point fibers",
        st.special.len(),
        expected::CAP45_SPECIAL_DIRS,
    );

    // fiber types inside each special direction
    let pyr_mask = canon::canonical_form(&s3, &atlas.pyramid).map(|c| c.mask);
    let tet_mask = canon::canonical_form(&s3, &atlas.tetracentre).map(|c| c.mask);
    let mut split_ok = 0usize;
    if let (Ok(pyr), Ok(tet)) = (pyr_mask, tet_mask) {
        for d in &st.special {
            let fib = Fibration::new(*d);
            let mut pyramids = 0;
            let mut apexes = 0;
            for v1 in 0..3u8 {
                for v2 in 0..3u8 {
                    let f = fib.fiber_cap(&s5, cap, &[v1, v2]);
                    match canon::canonical_form(&s3, &f).map(|c| c.mask) {
                        Ok(m) if m == pyr => pyramids += 1,
                        Ok(m) if m == tet => apexes += 1,
                        _ => {}
                    }
                }
            }
            if pyramids == 8 && apexes == 1 {
                split_ok += 1;
            } else {
                ctx.fail(format!(
                    "special direction rows {:?} {:?}: {pyramids} pyramid and {apexes} apex fibers",
                    d.row(0),
                    d.row(1)
                ));
            }
        }
    } else {
        ctx.check("dimension-3 reference types have canonical forms", false);
    }
    ctx.eq(
        "special directions splitting 8 pyramid + 1 apex",
        split_ok,
        expected::CAP45_SPECIAL_DIRS,
    );

    ctx.eq("line directions in every special kernel", st.axis_candidates.len(), 1);
    let axis = match st.axis() {
        Some(a) => a,
        None => return,
    };
    ctx.note(format!("axis line direction: point {axis}"));
    let with_axis: Vec<DirectionSpec> = st
        .level15
        .iter()
        .copied()
        .filter(|d| d.kernel_contains(&s5, axis))
        .collect();
    let cats: [usize; 4] = [
        st.plain18.len(),
        st.paired18.len(),
        with_axis.len(),
        st.level15.len() - with_axis.len(),
    ];
    ctx.eq("category sizes", cats, expected::CAP45_CATEGORIES);
    let through_axis = DirectionSpec::enumerate(5, 1)
        .into_iter()
        .filter(|d| d.kernel_contains(&s5, axis))
        .count();
    ctx.eq(
        "hyperplane directions containing the axis",
        through_axis,
        expected::CAP45_DIRS_THROUGH_AXIS,
    );

    // each category is a single orbit of the cap's symmetry group
    let dirs = DirectionSpec::enumerate(5, 1);
    match canon::direction_orbits(&s5, cap, &dirs) {
        Ok(orbits) => {
            ctx.eq("direction orbits", orbits.len(), 4);
            let category = |d: &DirectionSpec| -> usize {
                if st.plain18.contains(d) {
                    0
                } else if st.paired18.contains(d) {
                    1
                } else if with_axis.contains(d) {
                    2
                } else {
                    3
                }
            };
            let mut sizes = [0usize; 4];
            let mut uniform = true;
            for orbit in &orbits {
                let c = category(&dirs[orbit[0]]);
                if orbit.iter().any(|&i| category(&dirs[i]) != c) {
                    uniform = false;
                }
                sizes[c] += orbit.len();
            }
            ctx.check("each orbit lies in one category", uniform);
            ctx.eq("orbit sizes by category", sizes, expected::CAP45_CATEGORIES);
        }
        Err(_) => {
            ctx.check("direction orbits computable", false);
        }
    }
}

fn has_nine_point_hyperplane_fiber(
    space: &Space,
    cap: &CapSet,
    dirs: &[DirectionSpec],
) -> bool {
    dirs.iter().any(|d| {
        direction_point_count(space, cap.points(), d)
            .triple()
            .iter()
            .any(|&c| c == 9)
    })
}

fn l23_exchanges(ctx: &mut Ctx, atlas: &Atlas, k: usize) {
    let s4 = Space::new(4);
    let dirs = DirectionSpec::enumerate(4, 1);
    let sols = search::replace_points(&s4, &atlas.cap882a2, k, |sp, c| {
        has_nine_point_hyperplane_fiber(sp, c, &dirs)
    });
    let trivial = sols.iter().filter(|(rem, add)| rem == add).count();
    let nontrivial = sols.len() - trivial;
    ctx.eq("exchanges that keep the original points", trivial, binom(18, k));
    if k <= 3 {
        ctx.eq("total solution count", sols.len(), expected::EXCHANGES_SMALL[k - 1]);
        ctx.eq("exchanges moving at least one point", nontrivial, 0);
    } else {
        ctx.note(format!("exchanges moving at least one point: {nontrivial}"));
        ctx.check("an exchange moving at least one point exists", nontrivial >= 1);
    }
}

fn l24_parallel(ctx: &mut Ctx, atlas: &Atlas) {
    let s5 = Space::new(5);
    let s4 = Space::new(4);
    let st = match cap45_structure(&s5, &atlas.cap45, &atlas.cap882a2) {
        Ok(st) => st,
        Err(e) => {
            ctx.check(&e, false);
            return;
        }
    };
    ctx.eq("paired directions", st.paired18.len(), expected::CAP45_CATEGORIES[1]);
    let mut ok_nine2s = 0usize;
    let mut ok_cubes = 0usize;
    let mut ok_squares = 0usize;
    for d in &st.paired18 {
        let fib = Fibration::new(*d);
        let mut fibers: Vec<CapSet> = Vec::new();
        for v in 0..3u8 {
            let f = fib.fiber_cap(&s5, &atlas.cap45, &[v]);
            if f.len() == 18 {
                fibers.push(f);
            }
        }
        if fibers.len() != 2 {
            ctx.fail(format!("direction row {:?}: expected two 18-fibers", d.row(0)));
            continue;
        }
        let fa = atlas::features_882a2(&s4, &fibers[0]);
        let fb = atlas::features_882a2(&s4, &fibers[1]);
        let (fa, fb) = match (fa, fb) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                ctx.fail(format!("direction row {:?}: fiber landmarks missing", d.row(0)));
                continue;
            }
        };
        if fa.nine2s == fb.nine2s {
            ok_nine2s += 1;
        } else {
            ctx.fail(format!("direction row {:?}: all-2s directions differ", d.row(0)));
        }
        if fa.d882 == fb.d855 && fb.d882 == fa.d855 {
            ok_cubes += 1;
        } else {
            ctx.fail(format!("direction row {:?}: cube directions not swapped", d.row(0)));
        }
        let mut swapped = true;
        for sa in &fa.squares {
            for sb in &fb.squares {
                let (sides_a, diags_a) = atlas::square_sides_diagonals(&s4, sa);
                let (sides_b, diags_b) = atlas::square_sides_diagonals(&s4, sb);
                if sides_a != diags_b || sides_b != diags_a {
                    swapped = false;
                }
            }
        }
        if swapped {
            ok_squares += 1;
        } else {
            ctx.fail(format!(
                "direction row {:?}: square sides and diagonals not swapped",
                d.row(0)
            ));
        }
    }
    let n = st.paired18.len();
    ctx.eq("directions with matching all-2s fibers", ok_nine2s, n);
    ctx.eq("directions with cube directions swapped across fibers", ok_cubes, n);
    ctx.eq("directions with square sides matching opposite diagonals", ok_squares, n);
}

fn translate_sorted(space: &Space, pts: &PointSet, t: Point) -> Vec<Point> {
    let mut out: Vec<Point> = pts.iter().map(|p| space.add(p, t)).collect();
    out.sort_unstable();
    out
}

fn set_from(space: &Space, pts: &[Point]) -> PointSet {
    let mut s = PointSet::empty(space.size());
    for &p in pts {
        s.insert(p);
    }
    s
}

/// Tagged union of the two side sets at q: (0, p) for points of a,
/// (1, r) for points of b.
fn tagged_sides(space: &Space, a: &CapSet, b: &CapSet, q: Point) -> BTreeSet<(u8, Point)> {
    let mut x = BTreeSet::new();
    for p in search::side_set(space, a, b, q) {
        x.insert((0u8, p));
    }
    for r in search::side_set(space, b, a, q) {
        x.insert((1u8, r));
    }
    x
}

fn l25a(ctx: &mut Ctx, atlas: &Atlas) {
    let s4 = Space::new(4);
    let a = &atlas.cap882a2;
    let f = match atlas::features_882a2(&s4, a) {
        Ok(f) => f,
        Err(e) => {
            ctx.check(&format!("landmark features: {e}"), false);
            return;
        }
    };
    let total = s4.size();
    let mut ok_n1set = 0usize;
    let mut ok_n1seg = 0usize;
    let mut ok_n2set = 0usize;
    let mut ok_ends = 0usize;
    let mut ok_pairs = 0usize;
    let mut ok_low = 0usize;
    for t in 0..total {
        let t2 = s4.add(t, t);
        let b = a.translate(&s4, t);
        let prof = search::midpoint_profile(&s4, a, &b);

        let n1 = prof.points_where(|n| n == 1);
        if n1 == translate_sorted(&s4, b.points(), t) {
            ok_n1set += 1;
        } else {
            ctx.fail(format!("offset {t}: count-1 midpoints differ from the shifted cap"));
        }
        let mut segs_ok = true;
        for &q in &n1 {
            let segs = search::segments_through(&s4, a, &b, q);
            if segs != [(s4.add(q, t), s4.add(q, t2))] {
                segs_ok = false;
            }
        }
        if segs_ok {
            ok_n1seg += 1;
        } else {
            ctx.fail(format!("offset {t}: a count-1 segment misses its aligned endpoints"));
        }

        let n2 = prof.points_where(|n| n == 2);
        if n2 == translate_sorted(&s4, &f.midsquare, t2) {
            ok_n2set += 1;
        } else {
            ctx.fail(format!("offset {t}: count-2 midpoints differ from the shifted midsquare"));
        }
        let mut a_ends: BTreeSet<Point> = BTreeSet::new();
        let mut b_ends: BTreeSet<Point> = BTreeSet::new();
        let mut nseg = 0usize;
        for &q in &n2 {
            for (p, r) in search::segments_through(&s4, a, &b, q) {
                a_ends.insert(p);
                b_ends.insert(r);
                nseg += 1;
            }
        }
        if nseg == 8 && a_ends.len() == 8 && b_ends.len() == 8 {
            ok_ends += 1;
        } else {
            ctx.fail(format!("offset {t}: count-2 segments share endpoints"));
        }
        let mut pairs_ok = true;
        for &q in &n2 {
            // side in a closes at q after shifting by -t, side in b after +t
            for (side, shift) in [(search::side_set(&s4, a, &b, q), t2),
                                  (search::side_set(&s4, &b, a, q), t)] {
                if side.len() != 2 {
                    pairs_ok = false;
                    continue;
                }
                if f.nine2s.values(&s4, side[0]) == f.nine2s.values(&s4, side[1]) {
                    pairs_ok = false;
                }
                if s4.add(s4.third(side[0], side[1]), shift) != q {
                    pairs_ok = false;
                }
            }
        }
        if pairs_ok {
            ok_pairs += 1;
        } else {
            ctx.fail(format!("offset {t}: a count-2 side pair misbehaves"));
        }

        let low = prof.points_where(|n| n <= 3);
        if low.len() == n1.len() + n2.len() {
            ok_low += 1;
        } else {
            ctx.fail(format!("offset {t}: a midpoint outside the named sets has count below 4"));
        }
    }
    ctx.eq("offsets where count-1 midpoints equal the shifted cap", ok_n1set, total);
    ctx.eq("offsets where count-1 segments are aligned", ok_n1seg, total);
    ctx.eq("offsets where count-2 midpoints equal the shifted midsquare", ok_n2set, total);
    ctx.eq("offsets with 8 endpoint-disjoint count-2 segments", ok_ends, total);
    ctx.eq("offsets where count-2 side pairs split values and close up", ok_pairs, total);
    ctx.eq("offsets with every other count at least 4", ok_low, total);
}

fn l25b(ctx: &mut Ctx, atlas: &Atlas) {
    let s4 = Space::new(4);
    let a = &atlas.cap882a2;
    let fa = match atlas::features_882a2(&s4, a) {
        Ok(f) => f,
        Err(e) => {
            ctx.check(&format!("landmark features: {e}"), false);
            return;
        }
    };
    let neg_a = a.apply(&s4, &AffineMap::point_reflection(&s4, 0));
    let msq_a: Vec<Point> = fa.midsquare.to_vec();
    let total = s4.size();
    let mut ok_feat = 0usize;
    let mut ok_u = 0usize;
    let mut ok_n0 = 0usize;
    let mut ok_star = 0usize;
    let mut ok_ends = 0usize;
    let mut ok_counts = 0usize;
    let mut ok_cross = 0usize;
    let mut ok_pairs3 = 0usize;
    for s in 0..total {
        let b = neg_a.translate(&s4, s);
        let fb = match atlas::features_882a2(&s4, &b) {
            Ok(f) => f,
            Err(_) => {
                ctx.fail(format!("offset {s}: reflected cap lost its landmarks"));
                continue;
            }
        };
        ok_feat += 1;
        let msq_b: Vec<Point> = fb.midsquare.to_vec();
        let shifts: Vec<Point> = (0..total)
            .filter(|&w| {
                let mut moved: Vec<Point> = msq_a.iter().map(|&p| s4.add(p, w)).collect();
                moved.sort_unstable();
                moved == msq_b
            })
            .collect();
        if shifts.len() != 1 {
            ctx.fail(format!("offset {s}: midsquare shift not unique"));
            continue;
        }
        ok_u += 1;
        let u = shifts[0];
        let prof = search::midpoint_profile(&s4, a, &b);

        let n0 = prof.points_where(|n| n == 0);
        if n0 == translate_sorted(&s4, &fb.midsquare, u) {
            ok_n0 += 1;
        } else {
            ctx.fail(format!("offset {s}: untouched midpoints differ from the shifted midsquare"));
        }

        let n2 = prof.points_where(|n| n == 2);
        let n3 = prof.points_where(|n| n == 3);
        let low = prof.points_where(|n| n <= 3);
        if n0.len() == 4 && n2.len() == 4 && n3.len() == 24 && low.len() == 32 {
            ok_counts += 1;
        } else {
            ctx.fail(format!(
                "offset {s}: low-count profile is ({}, {}, {}) of {}",
                n0.len(),
                n2.len(),
                n3.len(),
                low.len()
            ));
        }

        let star = set_from(&s4, &n2);
        let mut star_ok = atlas::is_square(&s4, &star);
        for sq in [&fa.squares[0], &fa.squares[1], &fb.squares[0], &fb.squares[1]] {
            if placement::translation_between(&s4, sq, &star).is_none() {
                star_ok = false;
            }
        }
        if star.len() == 4
            && atlas::square_centre(&s4, &star)
                != s4.add(atlas::square_centre(&s4, &fb.midsquare), u)
        {
            star_ok = false;
        }
        if star_ok {
            ok_star += 1;
        } else {
            ctx.fail(format!("offset {s}: count-2 square misplaced"));
        }

        let mut a_ends: BTreeSet<Point> = BTreeSet::new();
        let mut b_ends: BTreeSet<Point> = BTreeSet::new();
        let mut nseg = 0usize;
        for &q in &n2 {
            for (p, r) in search::segments_through(&s4, a, &b, q) {
                a_ends.insert(p);
                b_ends.insert(r);
                nseg += 1;
            }
        }
        if nseg == 8 && a_ends.len() == 8 && b_ends.len() == 8 {
            ok_ends += 1;
        } else {
            ctx.fail(format!("offset {s}: count-2 segments share endpoints"));
        }

        let x2: Vec<(Point, BTreeSet<(u8, Point)>)> =
            n2.iter().map(|&q| (q, tagged_sides(&s4, a, &b, q))).collect();
        let x3: Vec<(Point, BTreeSet<(u8, Point)>)> =
            n3.iter().map(|&q| (q, tagged_sides(&s4, a, &b, q))).collect();
        let mut cross_ok = true;
        for (_, xq2) in &x2 {
            for (q3, xq3) in &x3 {
                let inter: Vec<(u8, Point)> = xq2.intersection(xq3).copied().collect();
                if inter.len() <= 1 {
                    continue;
                }
                let aligned = inter.len() == 2
                    && inter[0].0 == 0
                    && inter[1].0 == 1
                    && s4.third(inter[0].1, inter[1].1) == *q3;
                if !aligned {
                    cross_ok = false;
                }
            }
        }
        if cross_ok {
            ok_cross += 1;
        } else {
            ctx.fail(format!("offset {s}: a count-2/count-3 overlap misbehaves"));
        }
        let mut pairs_ok = true;
        let mut seen: BTreeMap<Vec<(u8, Point)>, (Point, Point)> = BTreeMap::new();
        for i in 0..x3.len() {
            for j in i + 1..x3.len() {
                let inter: Vec<(u8, Point)> =
                    x3[i].1.intersection(&x3[j].1).copied().collect();
                if inter.len() <= 2 {
                    continue;
                }
                if inter.len() != 3 {
                    pairs_ok = false;
                    continue;
                }
                let pair = (x3[i].0, x3[j].0);
                if let Some(prev) = seen.insert(inter, pair) {
                    if prev != pair {
                        pairs_ok = false;
                    }
                }
                if prof.count(s4.third(pair.0, pair.1)) != 0 {
                    pairs_ok = false;
                }
            }
        }
        if pairs_ok {
            ok_pairs3 += 1;
        } else {
            ctx.fail(format!("offset {s}: count-3 overlap triples misbehave"));
        }
    }
    ctx.eq("offsets where the reflected cap keeps its landmarks", ok_feat, total);
    ctx.eq("offsets with a unique midsquare shift", ok_u, total);
    ctx.eq("offsets where untouched midpoints equal the shifted midsquare", ok_n0, total);
    ctx.eq("offsets with low-count profile 4 / 4 / 24", ok_counts, total);
    ctx.eq("offsets where the count-2 square sits over the midsquare", ok_star, total);
    ctx.eq("offsets with 8 endpoint-disjoint count-2 segments", ok_ends, total);
    ctx.eq("offsets where count-2 and count-3 sides overlap cleanly", ok_cross, total);
    ctx.eq("offsets where count-3 triple overlaps determine their pair", ok_pairs3, total);
}

fn l31a(ctx: &mut Ctx, atlas: &Atlas) {
    let s6 = Space::new(6);
    let cap = &atlas.cap112;
    ctx.eq("cap size", cap.len(), 112);
    ctx.check("cap is complete", cap.is_complete(&s6));
    let sp = spectrum(&s6, cap.points(), 1);
    eq_census(ctx, "hyperplane census", &sp, &triple_census(&expected::CENSUS_112_CODIM1));
    ctx.check(
        "census satisfies the double-counting identities",
        moment_identities(&sp, cap.len(), 6).is_ok(),
    );
}

fn l31c(ctx: &mut Ctx, atlas: &Atlas) {
    let s6 = Space::new(6);
    let sp = spectrum(&s6, atlas.cap112.points(), 2);
    let mut want: Vec<(CountKey, u32)> = [
        (expected::CLASS_1540, expected::CENSUS_112_CODIM2[0]),
        (expected::CLASS_3696, expected::CENSUS_112_CODIM2[1]),
        (expected::CLASS_5775, expected::CENSUS_112_CODIM2[2]),
    ]
    .iter()
    .map(|&(m, c)| (CountKey::Matrix(canon_matrix(&m)), c))
    .collect();
    want.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    eq_census(ctx, "codim-2 census", &sp, &want);
    ctx.eq("codim-2 direction total", sp.total() as usize, expected::DIRS_DIM6_CODIM2);
}

fn l31d(ctx: &mut Ctx, atlas: &Atlas) {
    let s6 = Space::new(6);
    let cap = &atlas.cap112;
    let heavy: Vec<DirectionSpec> = DirectionSpec::enumerate(6, 1)
        .into_iter()
        .filter(|d| {
            canon_triple(direction_point_count(&s6, cap.points(), d).triple()) == [45, 45, 22]
        })
        .collect();
    ctx.eq("{45,45,22} directions", heavy.len(), 56);
    let mut spans: BTreeSet<DirectionSpec> = BTreeSet::new();
    for i in 0..heavy.len() {
        for j in i + 1..heavy.len() {
            match heavy[i].span(&heavy[j]) {
                Some(d) => {
                    spans.insert(d);
                }
                None => ctx.fail(String::from("two heavy directions failed to span")),
            }
        }
    }
    ctx.eq("distinct pairwise spans", spans.len(), 1540);
    let key = CountKey::Matrix(canon_matrix(&expected::CLASS_1540));
    let class: BTreeSet<DirectionSpec> = DirectionSpec::enumerate(6, 2)
        .into_iter()
        .filter(|d| direction_point_count(&s6, cap.points(), d).key() == key)
        .collect();
    ctx.eq("directions in the heavy codim-2 class", class.len(), 1540);
    ctx.check("pairwise spans equal the heavy codim-2 class", spans == class);
}

/// Nine points of a 27-point space coverable by three pairwise disjoint
/// full lines.
fn three_disjoint_lines(space: &Space, pts: &PointSet) -> bool {
    if pts.len() != 9 {
        return false;
    }
    let inside: Vec<[Point; 3]> = space
        .lines()
        .filter(|l| l.iter().all(|&p| pts.contains(p)))
        .collect();
    fn cover(remaining: &PointSet, inside: &[[Point; 3]]) -> bool {
        let p = match remaining.next_at_or_after(0) {
            Some(p) => p,
            None => return true,
        };
        for l in inside {
            if l.contains(&p) && l.iter().all(|&q| remaining.contains(q)) {
                let mut rest = remaining.clone();
                for &q in l {
                    rest.remove(q);
                }
                if cover(&rest, inside) {
                    return true;
                }
            }
        }
        false
    }
    cover(pts, &inside)
}

fn l32_design(ctx: &mut Ctx, atlas: &Atlas) {
    let s5 = Space::new(5);
    let s3 = Space::new(3);
    let st = match cap45_structure(&s5, &atlas.cap45, &atlas.cap882a2) {
        Ok(st) => st,
        Err(e) => {
            ctx.check(&e, false);
            return;
        }
    };
    ctx.eq("paired directions", st.paired18.len(), expected::CAP45_CATEGORIES[1]);
    let mut dual = PointSet::empty(s5.size());
    for d in &st.paired18 {
        let v = d.row_as_point(0);
        dual.insert(v);
        dual.insert(s5.neg(v));
    }
    ctx.eq("dual vectors", dual.len(), 90);
    let sp = spectrum(&s5, &dual, 1);
    eq_census(ctx, "dual hyperplane census", &sp, &triple_census(&expected::DUAL_CENSUS));

    let empties: Vec<DirectionSpec> = DirectionSpec::enumerate(5, 1)
        .into_iter()
        .filter(|d| canon_triple(direction_point_count(&s5, &dual, d).triple()) == [45, 45, 0])
        .collect();
    ctx.eq("directions with an empty dual fiber", empties.len(), 1);
    if empties.len() != 1 {
        return;
    }
    let dstar = empties[0];
    let w = dstar.row_as_point(0);
    let wc = w.min(s5.neg(w));
    match st.axis() {
        Some(axis) => {
            ctx.eq("empty-fiber functional as a line direction", wc, axis);
            let ad = s5.digits(axis);
            let duals: Vec<Point> = dual.to_vec();
            let mut mismatches = 0usize;
            for i in 0..duals.len() {
                for j in i + 1..duals.len() {
                    let dd = s5.digits(s5.sub(duals[i], duals[j]));
                    let dot: u32 = (0..5).map(|k| (dd[k] * ad[k]) as u32).sum();
                    let same_fiber =
                        dstar.value(&s5, duals[i]) == dstar.value(&s5, duals[j]);
                    if (dot % 3 == 0) != same_fiber {
                        mismatches += 1;
                    }
                }
            }
            ctx.eq("dual pairs violating the axis criterion", mismatches, 0);
        }
        None => {
            ctx.check("axis direction is unique", false);
        }
    }

    let zdirs: Vec<DirectionSpec> = DirectionSpec::enumerate(5, 1)
        .into_iter()
        .filter(|d| canon_triple(direction_point_count(&s5, &dual, d).triple()) == [36, 27, 27])
        .collect();
    ctx.eq("{36,27,27} dual directions", zdirs.len(), 20);
    let target = CountKey::Matrix(canon_matrix(&expected::DUAL_Z_MATRIX));
    let mut ok_matrix = 0usize;
    let mut ok_flats = 0usize;
    for z in &zdirs {
        let span = match dstar.span(z) {
            Some(sp) => sp,
            None => {
                ctx.fail(String::from("a z-direction coincides with the empty-fiber one"));
                continue;
            }
        };
        let pcm = direction_point_count(&s5, &dual, &span);
        if pcm.key() == target {
            ok_matrix += 1;
        } else {
            ctx.fail(format!("z-direction row {:?}: joint matrix differs", z.row(0)));
        }
        let fib = Fibration::new(span);
        let m = pcm.matrix();
        let mut flats_ok = true;
        for v1 in 0..3u8 {
            for v2 in 0..3u8 {
                let flat = fib.fiber_set(&s5, &dual, &[v1, v2]);
                let good = match m[v1 as usize][v2 as usize] {
                    18 => {
                        let comp = flat.complement();
                        comp.len() == 9 && three_disjoint_lines(&s3, &comp)
                    }
                    9 => crate::cap::is_cap(&s3, &flat),
                    0 => flat.is_empty(),
                    _ => false,
                };
                if !good {
                    flats_ok = false;
                }
            }
        }
        if flats_ok {
            ok_flats += 1;
        } else {
            ctx.fail(format!("z-direction row {:?}: a 3-flat misbehaves", z.row(0)));
        }
    }
    ctx.eq("z-directions with the recorded joint matrix", ok_matrix, 20);
    ctx.eq("z-directions whose 3-flats are structured as recorded", ok_flats, 20);
}

fn p40_census(ctx: &mut Ctx, atlas: &Atlas) {
    let s5 = Space::new(5);
    let s4 = Space::new(4);
    let cap = &atlas.cap40;
    ctx.eq("cap size", cap.len(), 40);
    ctx.check("cap spans the space", cap.spans(&s5));
    ctx.check("cap is complete", cap.is_complete(&s5));
    let sp = spectrum(&s5, cap.points(), 1);
    for (key, mult) in &sp.census {
        ctx.note(format!("  {:?} x {}", key.as_slice(), mult));
    }
    let heavy = atlas::find_codim1(&s5, cap, [18, 18, 4]);
    ctx.eq("{18,18,4} directions", heavy.len(), expected::CAP40_HEAVY_DIRS);
    match canon::direction_orbits(&s5, cap, &heavy) {
        Ok(orbits) => {
            ctx.eq("orbits of the heavy directions", orbits.len(), 1);
        }
        Err(_) => {
            ctx.check("direction orbits computable", false);
        }
    }
    match canon::canonical_form(&s4, &atlas.cap882a2) {
        Ok(cert) => {
            let mut ok = 0usize;
            for d in &heavy {
                let fib = Fibration::new(*d);
                let mut hits = 0;
                for v in 0..3u8 {
                    let f = fib.fiber_cap(&s5, cap, &[v]);
                    if f.len() == 18 {
                        if let Ok(c) = canon::canonical_form(&s4, &f) {
                            if c.mask == cert.mask {
                                hits += 1;
                            }
                        }
                    }
                }
                if hits == 2 {
                    ok += 1;
                } else {
                    ctx.fail(format!("direction row {:?}: 18-fibers not both 882A2", d.row(0)));
                }
            }
            ctx.eq("heavy directions with two 882A2-type fibers", ok, expected::CAP40_HEAVY_DIRS);
        }
        Err(_) => {
            ctx.check("reference 18-cap has a canonical form", false);
        }
    }
}

fn p37_dir(ctx: &mut Ctx, atlas: &Atlas) {
    let s5 = Space::new(5);
    let heavy = atlas::find_codim1(&s5, &atlas.delta686, [20, 16, 6]);
    ctx.eq("{20,16,6} directions of the delta686 cap", heavy.len(), expected::DELTA686_HEAVY_DIRS);

    // no 3-point removal from the 45-cap reproduces the delta686 census
    let dirs = DirectionSpec::enumerate(5, 1);
    let pts = atlas.cap45.to_vec();
    let base: Vec<[u32; 3]> = dirs
        .iter()
        .map(|d| direction_point_count(&s5, atlas.cap45.points(), d).triple())
        .collect();
    let vals: Vec<Vec<u8>> = dirs
        .iter()
        .map(|d| pts.iter().map(|&p| d.value(&s5, p)).collect())
        .collect();
    let rows: Vec<[u32; 3]> = expected::CENSUS_DELTA686.iter().map(|&(t, _)| t).collect();
    let mults: Vec<u32> = expected::CENSUS_DELTA686.iter().map(|&(_, m)| m).collect();
    let mut matching = 0u64;
    let mut scanned = 0u64;
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                scanned += 1;
                let mut used = [0u32; 8];
                let mut ok = true;
                for (di, _) in dirs.iter().enumerate() {
                    let mut t = base[di];
                    t[vals[di][i] as usize] -= 1;
                    t[vals[di][j] as usize] -= 1;
                    t[vals[di][k] as usize] -= 1;
                    let t = canon_triple(t);
                    match rows.iter().position(|&r| r == t) {
                        Some(pos) if used[pos] < mults[pos] => used[pos] += 1,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && used.iter().zip(&mults).all(|(u, m)| u == m) {
                    matching += 1;
                }
            }
        }
    }
    ctx.eq("3-point subsets considered", scanned, binom(45, 3) as u64);
    ctx.eq("removals matching the delta686 census", matching, 0);
}

fn t1_delta686(ctx: &mut Ctx, atlas: &Atlas) {
    let s5 = Space::new(5);
    let cap = &atlas.delta686;
    ctx.eq("cap size", cap.len(), 42);
    ctx.check("cap is complete", cap.is_complete(&s5));
    let sp = spectrum(&s5, cap.points(), 1);
    eq_census(ctx, "hyperplane census", &sp, &triple_census(&expected::CENSUS_DELTA686));
    ctx.check(
        "census satisfies the double-counting identities",
        moment_identities(&sp, cap.len(), 5).is_ok(),
    );
}

/// Claims a second cap equal to `a + u` as a set must satisfy: midpoints of
/// count 1 are exactly the doubly shifted set, each joining q + u in a to
/// q + 2u in b, and no other midpoint has count 2 or less.
fn translation_claims(space: &Space, a: &CapSet, b: &CapSet, u: Point) -> Result<(), String> {
    let u2 = space.add(u, u);
    let prof = search::midpoint_profile(space, a, b);
    let n1 = prof.points_where(|n| n == 1);
    if n1 != translate_sorted(space, b.points(), u) {
        return Err(String::from("count-1 midpoints differ from the shifted set"));
    }
    if prof.points_where(|n| n <= 2).len() != n1.len() {
        return Err(String::from("an extra midpoint has count 2 or less"));
    }
    for &q in &n1 {
        let segs = search::segments_through(space, a, b, q);
        if segs != [(space.add(q, u), space.add(q, u2))] {
            return Err(String::from("a count-1 segment misses its aligned endpoints"));
        }
    }
    Ok(())
}

fn p41a_opt1(ctx: &mut Ctx, atlas: &Atlas) {
    let s6 = Space::new(6);
    let cap = &atlas.cap112;
    // a hyperplane direction whose 22-point fiber sits at value 0
    let d = DirectionSpec::enumerate(6, 1)
        .into_iter()
        .find(|d| direction_point_count(&s6, cap.points(), d).triple() == [22, 45, 45]);
    let d = match d {
        Some(d) => d,
        None => {
            ctx.check("a direction with the 22-fiber at value 0 exists", false);
            return;
        }
    };
    ctx.note(format!("family direction row: {:?}", d.row(0)));
    let fam = placement::shear_family(&s6, cap, &d);
    ctx.eq("family size", fam.len(), expected::FAMILY_PLACEMENTS);
    let mut ok_zero = 0usize;
    let mut translations = 0usize;
    let mut ok_trans = 0usize;
    let mut ok_sparse = 0usize;
    let mut others = 0usize;
    for pl in &fam {
        let tag = format!("reflected={} shear={}", pl.reflected, pl.shear);
        let prof = search::midpoint_profile(&s6, cap, &pl.second);
        if prof.points_where(|n| n == 0).is_empty() {
            ok_zero += 1;
        } else {
            ctx.fail(format!("placement {tag}: an untouched midpoint exists"));
        }
        match placement::translation_between(&s6, cap.points(), pl.second.points()) {
            Some(u) => {
                translations += 1;
                ctx.note(format!("translation placement: {tag}"));
                match translation_claims(&s6, cap, &pl.second, u) {
                    Ok(()) => ok_trans += 1,
                    Err(e) => ctx.fail(format!("placement {tag}: {e}")),
                }
            }
            None => {
                others += 1;
                if prof.points_where(|n| n <= 2).len() <= 2 {
                    ok_sparse += 1;
                } else {
                    ctx.fail(format!("placement {tag}: too many low-count midpoints"));
                }
            }
        }
    }
    ctx.eq("placements with every midpoint touched", ok_zero, fam.len());
    ctx.eq("translation placements", translations, expected::FAMILY_TRANSLATIONS);
    ctx.eq("translation placements with aligned count-1 structure", ok_trans, translations);
    ctx.eq("other placements with at most two low-count midpoints", ok_sparse, others);
}

/// Stacks two dimension-5 caps and a middle set on levels 2, 1, 0 of a new
/// coordinate, reporting failures instead of panicking.
fn stack_checked(
    s6: &Space,
    a: &CapSet,
    b: &CapSet,
    middle: &[Point],
    size: usize,
) -> Result<CapSet, String> {
    let s5 = Space::new(5);
    let m = CapSet::from_points(&s5, middle.iter().copied())
        .map_err(|_| String::from("middle set is not a cap"))?;
    let mut pts: Vec<Point> = a.embed_at_level(2).to_vec();
    pts.extend(b.embed_at_level(1).iter());
    pts.extend(m.embed_at_level(0).iter());
    let cap = CapSet::from_points(s6, pts).map_err(|_| String::from("stack is not a cap"))?;
    if cap.len() != size {
        return Err(format!("stack has {} points, expected {size}", cap.len()));
    }
    if !cap.is_complete(s6) {
        return Err(String::from("stack is not complete"));
    }
    Ok(cap)
}

fn p36_cases(ctx: &mut Ctx, atlas: &Atlas, progress: &mut dyn FnMut(u64, u64)) {
    let s5 = Space::new(5);
    let s6 = Space::new(6);
    let d = match DirectionSpec::codim1(5, &[1, 0, 0, 0, 0]) {
        Some(d) => d,
        None => return,
    };
    let input = placement::sweep_input(&s5, &atlas.cap45, &d);
    let mut census = placement::SweepCensus::empty();
    let total_chunks = placement::SWEEP_CHUNK_COUNT as u64;
    for chunk in 0..placement::SWEEP_CHUNK_COUNT {
        census.merge(placement::sweep_chunk(&input, chunk));
        progress(chunk as u64 + 1, total_chunks);
    }
    ctx.eq("transformations scanned", census.scanned, expected::SWEEP_TOTAL);
    let counted: u64 = census.counts.values().sum();
    ctx.eq("profiles tallied", counted, expected::SWEEP_TOTAL);
    ctx.eq("profiles outside the allowed region", census.violations.len(), 0);
    for &(profile, count) in &expected::SWEEP_COUNTS {
        ctx.eq(
            &format!("count of profile {profile:?}"),
            census.counts.get(&profile).copied().unwrap_or(0),
            count,
        );
    }
    let named_total: u64 = expected::SWEEP_COUNTS.iter().map(|&(_, c)| c).sum();
    ctx.eq("named hits recorded", census.named.len() as u64, named_total);

    let mut by_profile: BTreeMap<(u16, u16), Vec<&placement::SweepHit>> = BTreeMap::new();
    for h in &census.named {
        by_profile.entry((h.n0, h.n2)).or_default().push(h);
    }
    let empty: Vec<&placement::SweepHit> = Vec::new();

    // (0,45): the second cap is a translate with aligned count-1 midpoints
    let mut ok = 0usize;
    let hits = by_profile.get(&(0, 45)).unwrap_or(&empty);
    for h in hits {
        let second = placement::hit_second(&s5, &atlas.cap45, h);
        match placement::translation_between(&s5, atlas.cap45.points(), second.points()) {
            Some(u) => match translation_claims(&s5, &atlas.cap45, &second, u) {
                Ok(()) => ok += 1,
                Err(e) => ctx.fail(format!("hit {h:?}: {e}")),
            },
            None => ctx.fail(format!("hit {h:?}: second cap is not a translate")),
        }
    }
    ctx.eq("(0, 45) hits that are aligned translates", ok, hits.len());

    // (22,22): stacking the pair over its untouched midpoints rebuilds the
    // 112-cap up to affine maps
    let mask112 = canon::canonical_form(&s6, &atlas.cap112).map(|c| c.mask);
    let mut ok = 0usize;
    let hits = by_profile.get(&(22, 22)).unwrap_or(&empty);
    for h in hits {
        let second = placement::hit_second(&s5, &atlas.cap45, h);
        let prof = search::midpoint_profile(&s5, &atlas.cap45, &second);
        let middle = prof.points_where(|n| n == 0);
        match stack_checked(&s6, &atlas.cap45, &second, &middle, 112) {
            Ok(stacked) => {
                let same = match (&mask112, canon::canonical_form(&s6, &stacked)) {
                    (Ok(m), Ok(c)) => *m == c.mask,
                    _ => false,
                };
                if same {
                    ok += 1;
                } else {
                    ctx.fail(format!("hit {h:?}: stack is not the 112-cap"));
                }
            }
            Err(e) => ctx.fail(format!("hit {h:?}: {e}")),
        }
    }
    ctx.eq("(22, 22) hits stacking to the 112-cap", ok, hits.len());

    // (6,6): stacking rebuilds the 96-cap, which shows a {45,45,6} direction
    let mask96 = canon::canonical_form(&s6, &atlas.cap96).map(|c| c.mask);
    let d0 = DirectionSpec::codim1(6, &[1, 0, 0, 0, 0, 0]);
    let mut ok = 0usize;
    let hits = by_profile.get(&(6, 6)).unwrap_or(&empty);
    for h in hits {
        let second = placement::hit_second(&s5, &atlas.cap45, h);
        let prof = search::midpoint_profile(&s5, &atlas.cap45, &second);
        let middle = prof.points_where(|n| n == 0);
        match stack_checked(&s6, &atlas.cap45, &second, &middle, 96) {
            Ok(stacked) => {
                let same = match (&mask96, canon::canonical_form(&s6, &stacked)) {
                    (Ok(m), Ok(c)) => *m == c.mask,
                    _ => false,
                };
                let triple = d0.map(|d| {
                    canon_triple(direction_point_count(&s6, stacked.points(), &d).triple())
                });
                if same && triple == Some([45, 45, 6]) {
                    ok += 1;
                } else {
                    ctx.fail(format!("hit {h:?}: stack is not the 96-cap"));
                }
            }
            Err(e) => ctx.fail(format!("hit {h:?}: {e}")),
        }
    }
    ctx.eq("(6, 6) hits stacking to the 96-cap", ok, hits.len());
}

/// Runs one check against the atlas. `progress` is ticked by long checks.
pub fn run_check(
    id: &str,
    atlas: &Atlas,
    progress: &mut dyn FnMut(u64, u64),
) -> Option<CheckReport> {
    let inf = info(id)?;
    let mut ctx = Ctx::new();
    match inf.id {
        "D1-counts" => d1_counts(&mut ctx),
        "A-882A2" => a_882a2(&mut ctx, atlas),
        "L2.2-census" => l22_census(&mut ctx, atlas),
        "L2.3-k1" => l23_exchanges(&mut ctx, atlas, 1),
        "L2.3-k2" => l23_exchanges(&mut ctx, atlas, 2),
        "L2.3-k3" => l23_exchanges(&mut ctx, atlas, 3),
        "L2.3-k4" => l23_exchanges(&mut ctx, atlas, 4),
        "L2.4-parallel" => l24_parallel(&mut ctx, atlas),
        "L2.5a" => l25a(&mut ctx, atlas),
        "L2.5b" => l25b(&mut ctx, atlas),
        "L3.1a" => l31a(&mut ctx, atlas),
        "L3.1c" => l31c(&mut ctx, atlas),
        "L3.1d" => l31d(&mut ctx, atlas),
        "L3.2-design" => l32_design(&mut ctx, atlas),
        "P3.6-cases" => p36_cases(&mut ctx, atlas, progress),
        "P40-census" => p40_census(&mut ctx, atlas),
        "P3.7-dir" => p37_dir(&mut ctx, atlas),
        "P4.1a-opt1" => p41a_opt1(&mut ctx, atlas),
        "T1-delta686" => t1_delta686(&mut ctx, atlas),
        _ => return None,
    }
    Some(ctx.report(inf.id))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_resolvable() {
        let mut seen = BTreeSet::new();
        for c in &CHECKS {
            assert!(seen.insert(c.id), "duplicate id {}", c.id);
            assert_eq!(info(c.id).unwrap().id, c.id);
        }
        assert!(info("no-such-check").is_none());
        assert_eq!(Runtime::parse("fast"), Some(Runtime::Fast));
        assert_eq!(Runtime::parse("medium"), Some(Runtime::Medium));
        assert_eq!(Runtime::parse("long"), Some(Runtime::Long));
        assert_eq!(Runtime::parse("slow"), None);
        assert!(Runtime::Fast < Runtime::Medium && Runtime::Medium < Runtime::Long);
    }

    #[test]
    fn context_reports_first_failure_as_witness() {
        let mut ctx = Ctx::new();
        ctx.eq("a", 1, 1);
        ctx.eq("b", 2, 3);
        ctx.check("c", false);
        let rep = ctx.report("D1-counts");
        assert!(!rep.pass);
        assert_eq!(rep.details.len(), 3);
        assert_eq!(rep.witness.as_deref(), Some("b: observed 2, expected 3"));
    }

    #[test]
    fn binomials_match_pascal() {
        assert_eq!(binom(18, 1), 18);
        assert_eq!(binom(18, 2), 153);
        assert_eq!(binom(18, 3), 816);
        assert_eq!(binom(18, 4), 3060);
        assert_eq!(binom(45, 3), 14190);
        assert_eq!(binom(56, 2), 1540);
        assert_eq!(binom(3, 5), 0);
    }

    #[test]
    fn disjoint_line_cover_detected() {
        let s3 = Space::new(3);
        // a plane: all points with top digit 0
        let mut plane = PointSet::empty(s3.size());
        for p in 0..9 {
            plane.insert(p);
        }
        assert!(three_disjoint_lines(&s3, &plane));
        // a 9-point cap holds no line at all
        let nine = atlas::build_9cap();
        assert!(!three_disjoint_lines(&s3, nine.points()));
        let mut eight = plane.clone();
        eight.remove(0);
        assert!(!three_disjoint_lines(&s3, &eight));
    }

    #[test]
    fn translation_claims_accept_nine_caps_and_flag_defects() {
        // a 9-cap meets every other midpoint in exactly 4 segments, so its
        // translates have the sparse low-count structure the claims need
        let s3 = Space::new(3);
        let nine = atlas::build_9cap();
        let b = nine.translate(&s3, 14);
        assert!(translation_claims(&s3, &nine, &b, 14).is_ok());
        assert!(translation_claims(&s3, &nine, &b, 5).is_err());
        // a 4-cap translate keeps count-1 alignment but leaks count-2 points
        let s2 = Space::new(2);
        let four = CapSet::from_points(&s2, [0, 1, 3, 4]).unwrap();
        let c = four.translate(&s2, 7);
        assert_eq!(
            translation_claims(&s2, &four, &c, 7).unwrap_err(),
            "an extra midpoint has count 2 or less"
        );
    }

    #[test]
    fn count_check_is_deterministic_and_green() {
        let mut first: Option<Vec<String>> = None;
        for _ in 0..2 {
            let mut ctx = Ctx::new();
            d1_counts(&mut ctx);
            let rep = ctx.report("D1-counts");
            assert!(rep.pass, "{:?}", rep.witness);
            match &first {
                None => first = Some(rep.details),
                Some(d) => assert_eq!(*d, rep.details),
            }
        }
    }
}
