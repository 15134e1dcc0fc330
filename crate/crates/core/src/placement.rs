//! Placement engines: a cap and a companion copy sit on opposite parallel
//! hyperflats, and every point of the middle flat is graded by how many
//! cross segments it bisects.
//!
//! Two generators are provided. `shear_family` produces the 2 * 3^(n-1)
//! companions obtained from a copy or a point reflection followed by
//! fiber-wise shears along a distinguished coordinate. The sweep functions
//! enumerate every companion of the form (x1, y) -> (x1, A y + x1 c) over a
//! five-dimensional cap, chunked so long scans can checkpoint.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::affine::{AffineMap, Matrix};
use crate::cap::CapSet;
use crate::directions::DirectionSpec;
use crate::pointset::PointSet;
use crate::space::{Point, Space};

/// One member of the shear family.
pub struct FamilyPlacement {
    pub reflected: bool,
    pub shear: Point,
    pub second: CapSet,
}

/// Companions of `cap` across a middle flat: start from a plain copy or the
/// point reflection through the origin, then add `level * v` to each point,
/// where the level is the image point's value along `d` and `v` runs over
/// the kernel hyperplane of `d`.
pub fn shear_family(space: &Space, cap: &CapSet, d: &DirectionSpec) -> Vec<FamilyPlacement> {
    assert_eq!(d.codim(), 1);
    assert_eq!(d.n(), space.n());
    let mut out = Vec::new();
    for reflected in [false, true] {
        let base: Vec<Point> = cap
            .iter()
            .map(|p| if reflected { space.neg(p) } else { p })
            .collect();
        for v in 0..space.size() {
            if !d.kernel_contains(space, v) {
                continue;
            }
            let mut set = PointSet::empty(space.size());
            for &b in &base {
                let lvl = d.value(space, b);
                set.insert(space.add(b, space.scale(v, lvl)));
            }
            // an affine image of a cap is again a cap
            out.push(FamilyPlacement {
                reflected,
                shear: v,
                second: CapSet::from_validated(space.n(), set),
            });
        }
    }
    out
}

/// The shift u with b == a + u, when the two sets are translates.
pub fn translation_between(space: &Space, a: &PointSet, b: &PointSet) -> Option<Point> {
    if a.len() != b.len() {
        return None;
    }
    let p0 = match a.iter().next() {
        Some(p) => p,
        None => return Some(0),
    };
    'outer: for q in b.iter() {
        let u = space.sub(q, p0);
        for p in a.iter() {
            if !b.contains(space.add(p, u)) {
                continue 'outer;
            }
        }
        return Some(u);
    }
    None
}

const SUB: usize = 81;

/// A five-dimensional spanning cap split along its first coordinate, with
/// each fiber projected to the four-dimensional hyperplane. Carries the
/// arithmetic tables the sweep loops index into.
pub struct SweepInput {
    fibers: [Vec<u8>; 3],
    add: Vec<u8>,    // add[p * 81 + q] = p + q
    negadd: Vec<u8>, // negadd[s * 81 + u] = -(u + s)
    prev: [u8; SUB],
    ucol: [u8; SUB], // column hit by the lowest nonzero digit
}

/// Splits `cap` along `d`, which must be the plain first-coordinate
/// functional so the sweep's matrix action is unambiguous.
pub fn sweep_input(space: &Space, cap: &CapSet, d: &DirectionSpec) -> SweepInput {
    assert_eq!(space.n(), 5);
    assert_eq!(d.codim(), 1);
    assert_eq!(d.row(0), [1, 0, 0, 0, 0]);
    let mut fibers: [Vec<u8>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for p in cap.iter() {
        // first coordinate is the most significant digit
        fibers[p / SUB].push((p % SUB) as u8);
    }
    let sub = Space::new(4);
    let mut add = alloc::vec![0u8; SUB * SUB];
    let mut negadd = alloc::vec![0u8; SUB * SUB];
    for p in 0..SUB {
        for q in 0..SUB {
            let s = sub.add(p, q);
            add[p * SUB + q] = s as u8;
            negadd[p * SUB + q] = sub.neg(s) as u8;
        }
    }
    let mut prev = [0u8; SUB];
    let mut ucol = [0u8; SUB];
    for y in 1..SUB {
        let mut stride = 1;
        let mut digit = 0;
        while (y / stride) % 3 == 0 {
            stride *= 3;
            digit += 1;
        }
        prev[y] = (y - stride) as u8;
        ucol[y] = (3 - digit) as u8;
    }
    SweepInput { fibers, add, negadd, prev, ucol }
}

impl SweepInput {
    pub fn fiber_sizes(&self) -> [usize; 3] {
        [self.fibers[0].len(), self.fibers[1].len(), self.fibers[2].len()]
    }

    /// Images of all 81 hyperplane points under the matrix with the given
    /// columns (images of the unit vectors, most significant coordinate
    /// first).
    fn image_table(&self, cols: [u8; 4]) -> [u8; SUB] {
        let mut img = [0u8; SUB];
        for y in 1..SUB {
            let p = img[self.prev[y] as usize] as usize;
            img[y] = self.add[p * SUB + cols[self.ucol[y] as usize] as usize];
        }
        img
    }

    /// Pair-sum histograms: h[(3a + b) * 81 + w] counts pairs (p, q) in
    /// fiber_a x fiber_b with p + img[q] == w.
    fn histograms(&self, img: &[u8; SUB]) -> [u8; 9 * SUB] {
        let mut imgf: [Vec<u8>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for b in 0..3 {
            imgf[b] = self.fibers[b].iter().map(|&y| img[y as usize]).collect();
        }
        let mut h = [0u8; 9 * SUB];
        for a in 0..3 {
            for b in 0..3 {
                let base = (3 * a + b) * SUB;
                for &yp in &self.fibers[a] {
                    let row = &self.add[yp as usize * SUB..][..SUB];
                    for &iq in &imgf[b] {
                        h[base + row[iq as usize] as usize] += 1;
                    }
                }
            }
        }
        h
    }

    /// Midpoint profile of one companion: the number of middle-flat points
    /// bisecting zero cross segments and at most two cross segments.
    fn profile(&self, h: &[u8; 9 * SUB], shift: u8) -> (u16, u16) {
        let c = shift as usize;
        let shifts = [0usize, c, self.add[c * SUB + c] as usize];
        let mut n0 = 0u16;
        let mut n2 = 0u16;
        for e in 0..3usize {
            // level pairs (a, b) with a + b + e == 0 mod 3
            let trio = [(0, (3 - e) % 3), (1, (5 - e) % 3), (2, (4 - e) % 3)];
            let r0 = &self.negadd[shifts[trio[0].1] * SUB..][..SUB];
            let r1 = &self.negadd[shifts[trio[1].1] * SUB..][..SUB];
            let r2 = &self.negadd[shifts[trio[2].1] * SUB..][..SUB];
            let h0 = &h[(3 * trio[0].0 + trio[0].1) * SUB..][..SUB];
            let h1 = &h[(3 * trio[1].0 + trio[1].1) * SUB..][..SUB];
            let h2 = &h[(3 * trio[2].0 + trio[2].1) * SUB..][..SUB];
            for u in 0..SUB {
                let n = h0[r0[u] as usize] + h1[r1[u] as usize] + h2[r2[u] as usize];
                n0 += u16::from(n == 0);
                n2 += u16::from(n <= 2);
            }
        }
        (n0, n2)
    }
}

/// Profile of a single companion, for spot checks and reconstruction.
pub fn sweep_profile(input: &SweepInput, cols: [u8; 4], shift: u8) -> (u16, u16) {
    let img = input.image_table(cols);
    let h = input.histograms(&img);
    input.profile(&h, shift)
}

/// Number of chunks the full sweep splits into: one per choice of the first
/// two matrix columns.
pub const SWEEP_CHUNK_COUNT: usize = 80 * 78;

/// Profiles every placement must fall in: the four named cases, or the
/// bounded leftover region.
pub const SWEEP_NAMED: [(u16, u16); 4] = [(0, 45), (22, 22), (6, 6), (2, 14)];
pub const SWEEP_LEFTOVER_MAX: (u16, u16) = (5, 13);

/// One placement worth reporting: the matrix columns, the shift, and the
/// profile observed there.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SweepHit {
    pub cols: [u8; 4],
    pub shift: u8,
    pub n0: u16,
    pub n2: u16,
}

/// Census of one chunk (or a merge of several).
pub struct SweepCensus {
    pub counts: BTreeMap<(u16, u16), u64>,
    pub named: Vec<SweepHit>,
    pub violations: Vec<SweepHit>,
    pub scanned: u64,
}

impl SweepCensus {
    pub fn empty() -> Self {
        SweepCensus {
            counts: BTreeMap::new(),
            named: Vec::new(),
            violations: Vec::new(),
            scanned: 0,
        }
    }

    pub fn merge(&mut self, other: SweepCensus) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.named.extend(other.named);
        self.violations.extend(other.violations);
        self.scanned += other.scanned;
    }
}

fn span_mask(pts: &[u8], sub: &Space) -> u128 {
    // all linear combinations of the given hyperplane vectors
    let mut mask: u128 = 1;
    for &p in pts {
        let mut next = mask;
        let mut q = 0u128;
        for b in 0..SUB {
            if mask >> b & 1 == 1 {
                q |= 1 << sub.add(b, p as usize);
            }
        }
        next |= q;
        let mut q2 = 0u128;
        let p2 = sub.add(p as usize, p as usize);
        for b in 0..SUB {
            if mask >> b & 1 == 1 {
                q2 |= 1 << sub.add(b, p2);
            }
        }
        next |= q2;
        mask = next;
    }
    mask
}

/// First two matrix columns for a chunk index: the i-th nonzero point and
/// the j-th point outside its line.
fn chunk_prefix(chunk: usize, sub: &Space) -> (u8, u8) {
    assert!(chunk < SWEEP_CHUNK_COUNT);
    let c1 = (chunk / 78 + 1) as u8;
    let line = span_mask(&[c1], sub);
    let mut left = chunk % 78;
    for p in 0..SUB {
        if line >> p & 1 == 1 {
            continue;
        }
        if left == 0 {
            return (c1, p as u8);
        }
        left -= 1;
    }
    unreachable!("78 points lie outside a line");
}

/// Scans the chunk's 72 * 54 * 81 companions (all matrices whose first two
/// columns are the chunk prefix, times all shifts), in ascending column
/// order. Results are deterministic and chunks partition the full sweep.
pub fn sweep_chunk(input: &SweepInput, chunk: usize) -> SweepCensus {
    let sub = Space::new(4);
    let (c1, c2) = chunk_prefix(chunk, &sub);
    let span2 = span_mask(&[c1, c2], &sub);
    let mut dense = alloc::vec![0u64; 244 * 244];
    let mut named = Vec::new();
    let mut violations = Vec::new();
    let mut scanned = 0u64;
    for c3 in 0..SUB as u8 {
        if span2 >> c3 & 1 == 1 {
            continue;
        }
        let span3 = span_mask(&[c1, c2, c3], &sub);
        for c4 in 0..SUB as u8 {
            if span3 >> c4 & 1 == 1 {
                continue;
            }
            let cols = [c1, c2, c3, c4];
            let img = input.image_table(cols);
            let h = input.histograms(&img);
            for shift in 0..SUB as u8 {
                let (n0, n2) = input.profile(&h, shift);
                dense[n0 as usize * 244 + n2 as usize] += 1;
                scanned += 1;
                if SWEEP_NAMED.contains(&(n0, n2)) {
                    if named.len() < 100_000 {
                        named.push(SweepHit { cols, shift, n0, n2 });
                    }
                } else if (n0 > SWEEP_LEFTOVER_MAX.0 || n2 > SWEEP_LEFTOVER_MAX.1)
                    && violations.len() < 1000
                {
                    violations.push(SweepHit { cols, shift, n0, n2 });
                }
            }
        }
    }
    let mut counts = BTreeMap::new();
    for n0 in 0..244 {
        for n2 in 0..244 {
            let c = dense[n0 * 244 + n2];
            if c > 0 {
                counts.insert((n0 as u16, n2 as u16), c);
            }
        }
    }
    SweepCensus { counts, named, violations, scanned }
}

/// Scans chunks in order until a placement with the requested profile
/// appears; returns the first one.
pub fn sweep_find(input: &SweepInput, profile: (u16, u16), max_chunks: usize) -> Option<SweepHit> {
    for chunk in 0..SWEEP_CHUNK_COUNT.min(max_chunks) {
        let census = sweep_chunk(input, chunk);
        if let Some(hit) = census
            .named
            .iter()
            .chain(census.violations.iter())
            .find(|h| (h.n0, h.n2) == profile)
        {
            return Some(*hit);
        }
    }
    None
}

/// The five-dimensional map (x1, y) -> (x1, A y + x1 c) encoded by a hit.
pub fn hit_map(space: &Space, hit: &SweepHit) -> AffineMap {
    assert_eq!(space.n(), 5);
    let sub = Space::new(4);
    let mut m = Matrix::zero(5);
    m.set(0, 0, 1);
    for r in 0..4 {
        m.set(r + 1, 0, sub.digits(hit.shift as usize)[r]);
        for k in 0..4 {
            m.set(r + 1, k + 1, sub.digits(hit.cols[k] as usize)[r]);
        }
    }
    AffineMap::new(m, [0; crate::space::MAX_DIM]).expect("sweep matrices are invertible")
}

/// The companion cap a hit denotes.
pub fn hit_second(space: &Space, cap: &CapSet, hit: &SweepHit) -> CapSet {
    cap.apply(space, &hit_map(space, hit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::midpoint_profile;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_cap5() -> (Space, CapSet) {
        // a spanning dim-5 cap with a nontrivial fiber split
        let space = Space::new(5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        loop {
            let cap = crate::testutil::random_cap(&space, &mut rng, 14);
            let sizes = [0, 1, 2].map(|l| cap.iter().filter(|&p| p / 81 == l).count());
            if cap.spans(&space) && sizes.iter().all(|&s| s > 0) {
                return (space, cap);
            }
        }
    }

    #[test]
    fn family_has_two_halves_of_kernel_size() {
        let space = Space::new(3);
        let cap = CapSet::from_points(&space, [0, 1, 3, 9, 13]).unwrap();
        let d = DirectionSpec::codim1(3, &[1, 0, 0]).unwrap();
        let fam = shear_family(&space, &cap, &d);
        assert_eq!(fam.len(), 2 * 9);
        // v = 0 in the unreflected half is the cap itself
        assert_eq!(fam[0].second.points(), cap.points());
        assert!(!fam[0].reflected);
        // shears move points only inside their level, reflection swaps the
        // outer levels
        for pl in &fam {
            assert_eq!(pl.second.len(), cap.len());
            let lv = [0, 1, 2]
                .map(|l| pl.second.iter().filter(|&p| d.value(&space, p) == l as u8).count());
            let mut orig = [0, 1, 2]
                .map(|l| cap.iter().filter(|&p| d.value(&space, p) == l as u8).count());
            if pl.reflected {
                orig.swap(1, 2);
            }
            assert_eq!(lv, orig);
        }
    }

    #[test]
    fn translations_are_detected_exactly() {
        let space = Space::new(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cap = crate::testutil::random_cap(&space, &mut rng, 9);
        for _ in 0..5 {
            let u = rng.gen_range(0..space.size());
            let shifted = cap.translate(&space, u);
            assert_eq!(
                translation_between(&space, cap.points(), shifted.points()),
                Some(u)
            );
        }
        let mut other = cap.clone();
        let p = cap.iter().next().unwrap();
        other.remove(p);
        let q = other
            .addable_points(&space)
            .iter()
            .find(|&q| q != p)
            .unwrap();
        other.insert_checked(&space, q).unwrap();
        assert_eq!(translation_between(&space, cap.points(), other.points()), None);
    }

    #[test]
    fn chunk_prefixes_enumerate_independent_pairs_once() {
        let sub = Space::new(4);
        let mut seen = alloc::collections::BTreeSet::new();
        for chunk in (0..SWEEP_CHUNK_COUNT).step_by(511) {
            let (c1, c2) = chunk_prefix(chunk, &sub);
            assert_ne!(c1, 0);
            let line = span_mask(&[c1], &sub);
            assert_eq!(line >> c2 & 1, 0);
            assert!(seen.insert((c1, c2)));
        }
    }

    #[test]
    fn sweep_profile_matches_a_direct_midpoint_count() {
        let (space, cap) = sample_cap5();
        let d = DirectionSpec::codim1(5, &[1, 0, 0, 0, 0]).unwrap();
        let input = sweep_input(&space, &cap, &d);
        assert_eq!(input.fiber_sizes().iter().sum::<usize>(), cap.len());
        let sub = Space::new(4);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..12 {
            // random invertible columns by rejection
            let cols = loop {
                let cand = [0; 4].map(|_| rng.gen_range(0..81) as u8);
                let pts: Vec<usize> = cand.iter().map(|&c| c as usize).collect();
                let mask = span_mask(&cand, &sub);
                if pts.iter().all(|&p| p != 0) && u128::count_ones(mask) == 81 {
                    break cand;
                }
            };
            let shift = rng.gen_range(0..81) as u8;
            let hit = SweepHit { cols, shift, n0: 0, n2: 0 };
            let second = hit_second(&space, &cap, &hit);
            let prof = midpoint_profile(&space, &cap, &second);
            let n0 = prof.points_where(|n| n == 0).len() as u16;
            let n2 = prof.points_where(|n| n <= 2).len() as u16;
            assert_eq!(sweep_profile(&input, cols, shift), (n0, n2));
        }
    }

    #[test]
    fn one_chunk_census_is_reproducible_and_counts_everything() {
        let (space, cap) = sample_cap5();
        let d = DirectionSpec::codim1(5, &[1, 0, 0, 0, 0]).unwrap();
        let input = sweep_input(&space, &cap, &d);
        let a = sweep_chunk(&input, 0);
        let b = sweep_chunk(&input, 0);
        assert_eq!(a.scanned, 72 * 54 * 81);
        assert_eq!(a.scanned, b.scanned);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.values().sum::<u64>(), a.scanned);
    }
}
