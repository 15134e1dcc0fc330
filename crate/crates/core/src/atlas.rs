//! Reference caps. Every representative is derived by search or by an
//! explicit construction from smaller representatives, never transcribed,
//! so a rebuilt atlas reproduces byte-identical point sets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::affine::AffineMap;
use crate::canon;
use crate::cap::CapSet;
use crate::directions::{canon_triple, direction_point_count, DirectionSpec};
use crate::fibration::Fibration;
use crate::placement::{self, translation_between};
use crate::pointset::PointSet;
use crate::search::{self, ExtendSpec};
use crate::space::{Point, Space};

/// Atlas entry names, in build order.
pub const ATLAS_NAMES: [&str; 11] = [
    "dim3-cube",
    "dim3-9cap",
    "dim3-pyramid",
    "dim3-tetracentre",
    "dim4-20cap",
    "dim4-882A2",
    "dim5-45cap",
    "dim5-delta686",
    "dim5-40cap",
    "dim6-96cap",
    "dim6-112cap",
];

pub struct Atlas {
    pub cube: CapSet,
    pub ninecap: CapSet,
    pub pyramid: CapSet,
    pub tetracentre: CapSet,
    pub cap20: CapSet,
    pub cap882a2: CapSet,
    pub cap45: CapSet,
    pub delta686: CapSet,
    pub cap40: CapSet,
    pub cap96: CapSet,
    pub cap112: CapSet,
}

impl Atlas {
    pub fn get(&self, name: &str) -> Option<&CapSet> {
        let e = match name {
            "dim3-cube" => &self.cube,
            "dim3-9cap" => &self.ninecap,
            "dim3-pyramid" => &self.pyramid,
            "dim3-tetracentre" => &self.tetracentre,
            "dim4-20cap" => &self.cap20,
            "dim4-882A2" => &self.cap882a2,
            "dim5-45cap" => &self.cap45,
            "dim5-delta686" => &self.delta686,
            "dim5-40cap" => &self.cap40,
            "dim6-96cap" => &self.cap96,
            "dim6-112cap" => &self.cap112,
            _ => return None,
        };
        Some(e)
    }

    pub fn entries(&self) -> Vec<(&'static str, &CapSet)> {
        ATLAS_NAMES
            .iter()
            .map(|&name| (name, self.get(name).unwrap()))
            .collect()
    }
}

/// The eight points with no zero coordinate.
pub fn build_cube() -> CapSet {
    let space = Space::new(3);
    let pts = (0..space.size()).filter(|&p| space.digits(p).iter().all(|&d| d != 0));
    CapSet::from_points(&space, pts).expect("the no-zero-digit set is a cap")
}

/// First 9-point cap in dimension 3, by exhaustive ascent.
pub fn build_9cap() -> CapSet {
    let space = Space::new(3);
    let empty = CapSet::empty(&space);
    let spec = ExtendSpec { seed: &empty, target: 9, fiber: None, isomorph_free: false };
    search::extend_dfs(&space, &spec, Some(1))
        .pop()
        .expect("dimension 3 holds a 9-cap")
}

/// First 20-point cap in dimension 4.
pub fn build_20cap() -> CapSet {
    let space = Space::new(4);
    let empty = CapSet::empty(&space);
    let spec = ExtendSpec { seed: &empty, target: 20, fiber: None, isomorph_free: false };
    search::extend_dfs(&space, &spec, Some(1))
        .pop()
        .expect("dimension 4 holds a 20-cap")
}

/// Structural landmarks of an 18-point representative: the unique 2-flat
/// direction with two cap points per flat, the two distinguished hyperplane
/// directions whose large fibers are cubes, the standard squares, and the
/// square of midpoints.
pub struct Features882 {
    pub nine2s: DirectionSpec,
    pub d855: DirectionSpec,
    pub d882: DirectionSpec,
    /// The two 4-point fibers, at recentered values (0, 1) and (0, 2).
    pub squares: [PointSet; 2],
    pub midsquare: PointSet,
    /// Fiber sizes by value pair, recentered so the cube 8-fiber of d855
    /// and the 2-fiber of d882 both sit at value 0.
    pub counts: [[u32; 3]; 3],
}

/// Fiber sizes the distinguished coordinate pair must produce.
pub const PAIR_COUNTS: [[u32; 3]; 3] = [[0, 4, 4], [1, 2, 2], [1, 2, 2]];

/// Four points of a cap spanning exactly a 2-flat.
pub fn is_square(space: &Space, set: &PointSet) -> bool {
    if set.len() != 4 || !crate::cap::is_cap(space, set) {
        return false;
    }
    let cap = CapSet::from_validated(space.n(), set.clone());
    match cap.affine_hull(space) {
        Some((_, basis)) => basis.len() == 2,
        None => false,
    }
}

/// Common midpoint of the diagonals, which equals the sum of the four
/// points.
pub fn square_centre(space: &Space, sq: &PointSet) -> Point {
    debug_assert_eq!(sq.len(), 4);
    let mut s = 0;
    for p in sq.iter() {
        s = space.add(s, p);
    }
    s
}

/// Line directions of the sides (each carried by two point pairs) and the
/// diagonals (one pair each), as canonical vectors.
pub fn square_sides_diagonals(space: &Space, sq: &PointSet) -> ([Point; 2], [Point; 2]) {
    let pts = sq.to_vec();
    assert_eq!(pts.len(), 4);
    let mut tally: BTreeMap<Point, u32> = BTreeMap::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let d = space.sub(pts[i], pts[j]);
            let dir = d.min(space.neg(d));
            *tally.entry(dir).or_insert(0) += 1;
        }
    }
    let sides: Vec<Point> = tally.iter().filter(|&(_, &c)| c == 2).map(|(&d, _)| d).collect();
    let diags: Vec<Point> = tally.iter().filter(|&(_, &c)| c == 1).map(|(&d, _)| d).collect();
    assert_eq!((sides.len(), diags.len()), (2, 2), "four points in a 2-flat pair up as a square");
    ([sides[0], sides[1]], [diags[0], diags[1]])
}

/// Whether p lies in the affine flat through `origin` spanned by `basis`.
pub fn flat_contains(space: &Space, origin: Point, basis: &[Point], p: Point) -> bool {
    let d = space.sub(p, origin);
    // small flats only: walk all linear combinations
    fn walk(space: &Space, basis: &[Point], acc: Point, d: Point) -> bool {
        match basis.split_first() {
            None => acc == d,
            Some((&b, rest)) => (0..3u8).any(|s| walk(space, rest, space.add(acc, space.scale(b, s)), d)),
        }
    }
    walk(space, basis, 0, d)
}

fn cube_mask(space3: &Space) -> PointSet {
    canon::canonical_form(space3, &build_cube())
        .expect("the cube spans")
        .mask
}

/// Extracts the landmarks, or reports which uniqueness claim failed. The
/// error path makes this usable as a search filter.
pub fn features_882a2(space: &Space, cap: &CapSet) -> Result<Features882, String> {
    assert_eq!(space.n(), 4);
    if cap.len() != 18 {
        return Err(format!("size {} is not 18", cap.len()));
    }
    let space3 = Space::new(3);
    let cube = cube_mask(&space3);
    let is_cube = |spec: &DirectionSpec, v: u8| -> bool {
        let fiber = Fibration::new(*spec).fiber_cap(space, cap, &[v]);
        fiber.len() == 8
            && canon::canonical_form(&space3, &fiber).map(|c| c.mask) == Ok(cube.clone())
    };

    let mut nine2s = Vec::new();
    for d in DirectionSpec::enumerate(4, 2) {
        if direction_point_count(space, cap.points(), &d).matrix() == [[2; 3]; 3] {
            nine2s.push(d);
        }
    }
    if nine2s.len() != 1 {
        return Err(format!("{} directions have two points in every 2-flat", nine2s.len()));
    }

    let mut d855 = Vec::new();
    let mut d882 = Vec::new();
    for d in DirectionSpec::enumerate(4, 1) {
        let t = direction_point_count(space, cap.points(), &d).triple();
        match canon_triple(t) {
            [8, 5, 5] => {
                let v = (0..3u8).find(|&v| t[v as usize] == 8).unwrap();
                if is_cube(&d, v) {
                    d855.push((d, v));
                }
            }
            [8, 8, 2] => {
                if (0..3).filter(|&v| t[v as usize] == 8).all(|v| is_cube(&d, v)) {
                    let v = (0..3u8).find(|&v| t[v as usize] == 2).unwrap();
                    d882.push((d, v));
                }
            }
            _ => {}
        }
    }
    if d855.len() != 1 {
        return Err(format!("{} {{8,5,5}} directions have a cube fiber", d855.len()));
    }
    if d882.len() != 1 {
        return Err(format!("{} {{8,8,2}} directions have two cube fibers", d882.len()));
    }
    let ((d855, base855), (d882, base882)) = (d855[0], d882[0]);

    // Values are tallied relative to the cube 8-fiber of one direction and
    // the 2-fiber of the other, so position does not matter; the leftover
    // freedom is negating either value, which fixes the count matrix.
    let mut counts = [[0u32; 3]; 3];
    let mut fibers: [[Vec<Point>; 3]; 3] = Default::default();
    for p in cap.iter() {
        let v1 = (3 + d855.value(space, p) - base855) as usize % 3;
        let v2 = (3 + d882.value(space, p) - base882) as usize % 3;
        counts[v1][v2] += 1;
        fibers[v1][v2].push(p);
    }
    if counts != PAIR_COUNTS {
        return Err(format!("pair counts {:?}", counts));
    }

    let squares = [
        PointSet::from_points(space.size(), fibers[0][1].iter().copied()),
        PointSet::from_points(space.size(), fibers[0][2].iter().copied()),
    ];
    for sq in &squares {
        if !is_square(space, sq) {
            return Err(String::from("a 4-point fiber is not a square"));
        }
    }
    if translation_between(space, &squares[0], &squares[1]).is_none() {
        return Err(String::from("the 4-point fibers are not translates"));
    }

    let mut midsquare = PointSet::empty(space.size());
    for v1 in 1..3 {
        for v2 in 1..3 {
            let pair = &fibers[v1][v2];
            midsquare.insert(space.third(pair[0], pair[1]));
        }
    }
    if midsquare.len() != 4 || !is_square(space, &midsquare) {
        return Err(String::from("corner midpoints do not form a square"));
    }

    let mid_cap = CapSet::from_validated(space.n(), midsquare.clone());
    let (origin, basis) = mid_cap.affine_hull(space).unwrap();
    let mut must_lie_in_flat = alloc::vec![
        square_centre(space, &squares[0]),
        square_centre(space, &squares[1]),
    ];
    must_lie_in_flat.push(fibers[1][0][0]);
    must_lie_in_flat.push(fibers[2][0][0]);
    for p in must_lie_in_flat {
        if !flat_contains(space, origin, &basis, p) {
            return Err(String::from("midpoint 2-flat misses a required point"));
        }
    }

    Ok(Features882 { nine2s: nine2s[0], d855, d882, squares, midsquare, counts })
}

/// Search for the 18-point representative: complete the empty cap under the
/// distinguished coordinate-pair fiber sizes, then keep the first result
/// whose landmarks all exist.
pub fn build_882a2() -> CapSet {
    let space = Space::new(4);
    let d = DirectionSpec::codim2(4, &[1, 0, 0, 0], &[0, 1, 0, 0]).unwrap();
    let quotas: Vec<usize> = PAIR_COUNTS.iter().flatten().map(|&c| c as usize).collect();
    let empty = CapSet::empty(&space);
    let spec = ExtendSpec { seed: &empty, target: 18, fiber: Some((d, quotas)), isomorph_free: false };
    let mut found = None;
    search::extend_dfs_visit(&space, &spec, |set| {
        let cand = CapSet::from_validated(4, set.clone());
        if features_882a2(&space, &cand).is_ok() {
            found = Some(cand);
            false
        } else {
            true
        }
    });
    found.expect("an 18-cap with the distinguished fiber sizes exists")
}

/// Extend the 18-point representative, placed on the outer level of a new
/// first coordinate, to a 45-cap with fiber sizes (9, 18, 18).
pub fn build_45cap(a2: &CapSet) -> CapSet {
    let space = Space::new(5);
    let seed = a2.embed_at_level(2);
    let d = DirectionSpec::codim1(5, &[1, 0, 0, 0, 0]).unwrap();
    let spec = ExtendSpec {
        seed: &seed,
        target: 45,
        fiber: Some((d, alloc::vec![9, 18, 18])),
        isomorph_free: false,
    };
    search::extend_dfs(&space, &spec, Some(1))
        .pop()
        .expect("the 18-cap extends to a 45-cap")
}

/// Extend a 20-cap, placed on the middle level of a new first coordinate,
/// to a 42-cap with fiber sizes (6, 20, 16).
pub fn build_delta686(cap20: &CapSet) -> CapSet {
    let space = Space::new(5);
    let seed = cap20.embed_at_level(1);
    let d = DirectionSpec::codim1(5, &[1, 0, 0, 0, 0]).unwrap();
    let spec = ExtendSpec {
        seed: &seed,
        target: 42,
        fiber: Some((d, alloc::vec![6, 20, 16])),
        isomorph_free: false,
    };
    let cap = search::extend_dfs(&space, &spec, Some(1))
        .pop()
        .expect("the 20-cap extends to a (6,20,16) 42-cap");
    assert!(cap.is_complete(&space), "the 42-cap must be complete");
    cap
}

/// The 45-cap, a point reflection of it, and the 22 middle points no cross
/// segment bisects, stacked on the levels of a new first coordinate.
pub fn build_112cap(cap45: &CapSet) -> CapSet {
    let space = Space::new(5);
    let reflect = AffineMap::point_reflection(&space, 0);
    let negated = cap45.apply(&space, &reflect);
    for s in 0..space.size() {
        let b = negated.translate(&space, s);
        let prof = search::midpoint_profile(&space, cap45, &b);
        let empty = prof.points_where(|n| n == 0);
        if empty.len() != 22 {
            continue;
        }
        assert_eq!(prof.points_where(|n| n <= 2).len(), 22);
        let middle = CapSet::from_points(&space, empty.iter().copied())
            .expect("the 22 unused midpoints form a cap");
        return stack_levels(cap45, &b, &middle, 112);
    }
    panic!("some point reflection pairs with the 45-cap");
}

/// Stacks a, b, m on levels 2, 1, 0 of a new first coordinate and validates
/// the union.
pub fn stack_levels(a: &CapSet, b: &CapSet, m: &CapSet, size: usize) -> CapSet {
    let big = Space::new(a.dim() + 1);
    let mut set = a.embed_at_level(2).points().clone();
    set.union_with(b.embed_at_level(1).points());
    set.union_with(m.embed_at_level(0).points());
    let cap = CapSet::new(&big, set).expect("stacked levels form a cap");
    assert_eq!(cap.len(), size);
    assert!(cap.is_complete(&big));
    cap
}

/// The 45-cap, its first sweep companion bisecting only six middle points,
/// and those six points, stacked on the levels of a new first coordinate.
pub fn build_96cap(cap45: &CapSet) -> CapSet {
    let space = Space::new(5);
    let d = DirectionSpec::codim1(5, &[1, 0, 0, 0, 0]).unwrap();
    let input = placement::sweep_input(&space, cap45, &d);
    let hit = placement::sweep_find(&input, (6, 6), placement::SWEEP_CHUNK_COUNT)
        .expect("the sweep reaches a (6,6) companion");
    let b = placement::hit_second(&space, cap45, &hit);
    let prof = search::midpoint_profile(&space, cap45, &b);
    let empty = prof.points_where(|n| n == 0);
    let middle = CapSet::from_points(&space, empty.iter().copied())
        .expect("the six unused midpoints form a cap");
    stack_levels(cap45, &b, &middle, 96)
}

/// Directions of one codimension whose canonical fiber sizes match `key`,
/// in enumeration order.
pub fn find_codim1(space: &Space, cap: &CapSet, key: [u32; 3]) -> Vec<DirectionSpec> {
    DirectionSpec::enumerate(space.n(), 1)
        .into_iter()
        .filter(|d| canon_triple(direction_point_count(space, cap.points(), d).triple()) == key)
        .collect()
}

/// The 40-point fiber of the first {40,36,36} hyperplane direction,
/// projected to its own five-dimensional space.
pub fn extract_40cap(cap112: &CapSet) -> CapSet {
    let space = Space::new(6);
    let d = find_codim1(&space, cap112, [40, 36, 36])
        .into_iter()
        .next()
        .expect("a {40,36,36} direction exists");
    let t = direction_point_count(&space, cap112.points(), &d).triple();
    let v = (0..3).find(|&v| t[v as usize] == 40).unwrap();
    let cap = Fibration::new(d).fiber_cap(&space, cap112, &[v]);
    assert_eq!(cap.len(), 40);
    assert!(cap.spans(&Space::new(5)));
    cap
}

/// The two 5-point classes seen in the all-fives 2-flat directions of the
/// 45-cap: per direction, eight fibers of one kind and one of the other.
/// Returns (majority, minority) as canonical masks in dimension 3.
pub fn extract_dim3_types(cap45: &CapSet) -> (CapSet, CapSet) {
    let space = Space::new(5);
    let space3 = Space::new(3);
    for d in DirectionSpec::enumerate(5, 2) {
        if direction_point_count(&space, cap45.points(), &d).matrix() != [[5; 3]; 3] {
            continue;
        }
        let fib = Fibration::new(d);
        let mut tally: BTreeMap<Vec<Point>, u32> = BTreeMap::new();
        for v1 in 0..3 {
            for v2 in 0..3 {
                let fiber = fib.fiber_cap(&space, cap45, &[v1, v2]);
                let mask = canon::canonical_form(&space3, &fiber)
                    .expect("five points span a 3-flat")
                    .mask;
                *tally.entry(mask.to_vec()).or_insert(0) += 1;
            }
        }
        // Skip all-fives directions whose nine fibers are one class; only the
        // eight-plus-one splits carry both types.
        let counts: Vec<u32> = tally.values().copied().collect();
        if counts != [1, 8] && counts != [8, 1] {
            continue;
        }
        let mut majority = None;
        let mut minority = None;
        for (mask, count) in tally {
            let cap = CapSet::from_points(&space3, mask).unwrap();
            match count {
                8 => majority = Some(cap),
                1 => minority = Some(cap),
                c => panic!("fiber class multiplicity {c}"),
            }
        }
        return (majority.unwrap(), minority.unwrap());
    }
    panic!("the 45-cap has an all-fives 2-flat direction with split fiber classes");
}

/// Canonical masks of every 5-point cap class in dimension 3, with labeled
/// counts.
pub fn classify_dim3_5caps() -> Vec<(PointSet, u64)> {
    let space = Space::new(3);
    let mut tally: BTreeMap<Vec<Point>, u64> = BTreeMap::new();
    for pts in crate::brute::all_caps_of_size(&space, 5) {
        let cap = CapSet::from_points(&space, pts).unwrap();
        let mask = canon::canonical_form(&space, &cap).expect("5-caps span").mask;
        *tally.entry(mask.to_vec()).or_insert(0) += 1;
    }
    tally
        .into_iter()
        .map(|(mask, c)| (PointSet::from_points(space.size(), mask), c))
        .collect()
}

/// Builds every atlas entry from scratch, in dependency order.
pub fn build_all() -> Atlas {
    let cube = build_cube();
    let ninecap = build_9cap();
    let cap20 = build_20cap();
    let cap882a2 = build_882a2();
    let cap45 = build_45cap(&cap882a2);
    let (pyramid, tetracentre) = extract_dim3_types(&cap45);
    let delta686 = build_delta686(&cap20);
    let cap112 = build_112cap(&cap45);
    let cap96 = build_96cap(&cap45);
    let cap40 = extract_40cap(&cap112);
    Atlas {
        cube,
        ninecap,
        pyramid,
        tetracentre,
        cap20,
        cap882a2,
        cap45,
        delta686,
        cap40,
        cap96,
        cap112,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_is_a_complete_spanning_8cap() {
        let space = Space::new(3);
        let cube = build_cube();
        assert_eq!(cube.len(), 8);
        assert!(cube.spans(&space));
        assert!(cube.is_complete(&space));
    }

    #[test]
    fn first_9cap_is_complete_and_spans() {
        let space = Space::new(3);
        let cap = build_9cap();
        assert_eq!(cap.len(), 9);
        assert!(cap.spans(&space));
        assert!(cap.is_complete(&space));
    }

    #[test]
    fn square_helpers_agree_on_a_known_square() {
        // the four points with nonzero second coordinate
        let space = Space::new(2);
        let sq = PointSet::from_points(9, [1, 2, 4, 5]);
        assert!(is_square(&space, &sq));
        let c = square_centre(&space, &sq);
        let (sides, diags) = square_sides_diagonals(&space, &sq);
        for d in sides.iter().chain(diags.iter()) {
            assert_eq!(*d, (*d).min(space.neg(*d)));
        }
        // the centre completes each diagonal pair
        let pts = sq.to_vec();
        let diag_mids: Vec<Point> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let d = space.sub(pts[i], pts[j]);
                diags.contains(&d.min(space.neg(d)))
            })
            .map(|(i, j)| space.third(pts[i], pts[j]))
            .collect();
        assert_eq!(diag_mids, alloc::vec![c, c]);
    }

    #[test]
    fn flat_membership_matches_enumeration() {
        let space = Space::new(3);
        let origin = 4;
        let basis = [1, 9];
        let mut members = alloc::vec::Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                members.push(space.add(
                    origin,
                    space.add(space.scale(basis[0], a), space.scale(basis[1], b)),
                ));
            }
        }
        for p in 0..space.size() {
            assert_eq!(flat_contains(&space, origin, &basis, p), members.contains(&p));
        }
    }

    #[test]
    fn five_point_classes_in_dimension_three() {
        let classes = classify_dim3_5caps();
        assert_eq!(classes.len(), 2);
        let total: u64 = classes.iter().map(|&(_, c)| c).sum();
        // orbit sizes: affine group order divided by each stabilizer order
        let agl3: u64 = 11_232 * 27;
        let sum: u64 = classes
            .iter()
            .map(|(mask, _)| {
                let space = Space::new(3);
                agl3 / crate::brute::automorphism_count(&space, mask) as u64
            })
            .sum();
        assert_eq!(total, sum);
    }
}
