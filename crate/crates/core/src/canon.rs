//! Canonical forms, isomorphism tests, and automorphism groups of caps.
//!
//! Canonicalization runs in two stages. First a partition refinement
//! assigns every point of the space a color: the initial color records cap
//! membership and the line-type counts through the point, and each round
//! refines by the sorted multiset of color pairs on lines through the
//! point, to a fixpoint. Color ids are ranks of the sorted invariant keys,
//! so they are comparable across caps, and cap classes rank before
//! non-cap classes.
//!
//! Second, a backtracking search over ordered affine frames (origin o,
//! basis b1..bn) minimizes the color sequence of the frame's grid read in
//! the fixed base-3 index order. Index order makes the last coordinate
//! vary fastest, so the search chooses bn first and each new basis vector
//! appends the colors of grid+v and grid+2v as one block. Two caps are
//! affinely equivalent exactly when their minimal colored sequences, and
//! hence their canonical membership masks, coincide; frames attaining the
//! minimum are a torsor under the automorphism group, which yields both
//! generator discovery and a complete enumeration.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::affine::{AffineMap, Matrix};
use crate::cap::CapSet;
use crate::directions::DirectionSpec;
use crate::pointset::PointSet;
use crate::space::{Point, Space, MAX_DIM, POW3};

/// Upper bound on stored automorphism generators (each discovery stores the
/// map and its inverse). Overflow only weakens pruning; it is recorded so
/// orbit computations can refuse to run on an incomplete generating set.
const GEN_CAP: usize = 128;

#[derive(Clone, PartialEq, Eq)]
pub struct CanonicalCertificate {
    /// canonical membership mask; equal masks characterize equivalence
    pub mask: PointSet,
    /// map with witness(cap) = mask
    pub witness: AffineMap,
    /// sorted final colors of all points, a cheap equivalence invariant
    pub fingerprint: Vec<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CanonError {
    NotSpanning { hull_dim: usize },
}

impl fmt::Debug for CanonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonError::NotSpanning { hull_dim } => {
                write!(f, "cap does not span its space (affine hull dimension {hull_dim})")
            }
        }
    }
}

impl fmt::Display for CanonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Stable point colors from partition refinement.
pub struct Coloring {
    pub colors: Vec<u32>,
    pub classes: usize,
    /// colors below this bound are cap classes
    pub cap_classes: u32,
}

/// Refines point colors to a fixpoint. Color ids are canonical: equivalent
/// caps induce identical color multisets and identical id assignment.
pub fn color_points(space: &Space, cap: &CapSet) -> Coloring {
    let size = space.size();
    // initial invariant: membership, then counts of lines through the point
    // carrying one and two other cap points
    let mut keys: Vec<(u8, u32, u32)> = Vec::with_capacity(size);
    for p in 0..size {
        let mut ones = 0u32;
        let mut twos = 0u32;
        for q in cap.iter() {
            if q == p {
                continue;
            }
            if cap.contains(space.third(p, q)) {
                twos += 1;
            } else {
                ones += 1;
            }
        }
        keys.push((if cap.contains(p) { 0 } else { 1 }, ones, twos / 2));
    }
    let mut colors = rank_by_key(&keys);
    let mut classes = count_classes(&colors);
    loop {
        let mut round_keys: Vec<(u32, Vec<(u32, u32)>)> = Vec::with_capacity(size);
        for p in 0..size {
            let mut pairs: Vec<(u32, u32)> = Vec::with_capacity((size - 1) / 2);
            for q in 0..size {
                if q == p {
                    continue;
                }
                let r = space.third(p, q);
                if q < r {
                    let (a, b) = (colors[q], colors[r]);
                    pairs.push(if a <= b { (a, b) } else { (b, a) });
                }
            }
            pairs.sort_unstable();
            round_keys.push((colors[p], pairs));
        }
        colors = rank_by_key(&round_keys);
        let now = count_classes(&colors);
        if now == classes {
            break;
        }
        classes = now;
    }
    let cap_classes = cap.iter().map(|p| colors[p]).max().map_or(0, |c| c + 1);
    debug_assert!((0..size).all(|p| (colors[p] < cap_classes) == cap.contains(p)));
    Coloring { colors, classes, cap_classes }
}

fn rank_by_key<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_unstable_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut colors = alloc::vec![0u32; keys.len()];
    let mut current = 0u32;
    for w in 0..order.len() {
        if w > 0 && keys[order[w]] != keys[order[w - 1]] {
            current += 1;
        }
        colors[order[w]] = current;
    }
    colors
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().copied().max().map_or(0, |c| c as usize + 1)
}

struct Gen {
    pmap: Vec<u16>,
    map: AffineMap,
}

struct MinSearch<'a> {
    space: &'a Space,
    colors: &'a [u32],
    cap_points: &'a PointSet,
    n: usize,
    size: usize,
    best_seq: Vec<u32>,
    best_origin: Point,
    best_basis: Vec<Point>,
    gens: Vec<Gen>,
    gens_complete: bool,
}

fn frame_map(space: &Space, o: Point, bs_rev: &[Point]) -> AffineMap {
    // bs_rev[k] was chosen at stage k and is the basis vector of
    // coordinate n-k (index order varies the last coordinate fastest)
    let n = space.n();
    let mut basis = alloc::vec![0 as Point; n];
    for (k, &v) in bs_rev.iter().enumerate() {
        basis[n - 1 - k] = v;
    }
    AffineMap::from_frame(space, o, &basis).expect("frame vectors are kept independent")
}

impl<'a> MinSearch<'a> {
    fn block_of(&self, grid: &[Point], v: Point) -> Vec<u32> {
        let w2 = self.space.neg(v);
        let mut blk = Vec::with_capacity(2 * grid.len());
        for &x in grid {
            blk.push(self.colors[self.space.add(x, v)]);
        }
        for &x in grid {
            blk.push(self.colors[self.space.add(x, w2)]);
        }
        blk
    }

    /// Block of colors for candidate v, or None when it lexicographically
    /// exceeds the incumbent slice for this stage.
    fn block_not_greater(&self, grid: &[Point], v: Point, seg: usize) -> Option<Vec<u32>> {
        let slice = &self.best_seq[seg..3 * seg];
        let w2 = self.space.neg(v);
        let mut blk = Vec::with_capacity(2 * grid.len());
        let mut decided = false;
        for u in [v, w2] {
            for &x in grid {
                let c = self.colors[self.space.add(x, u)];
                if !decided {
                    match c.cmp(&slice[blk.len()]) {
                        Ordering::Greater => return None,
                        Ordering::Less => decided = true,
                        Ordering::Equal => {}
                    }
                }
                blk.push(c);
            }
        }
        Some(blk)
    }

    fn extend(&self, grid: &mut Vec<Point>, vspan: &mut PointSet, bs: &mut Vec<Point>, v: Point) {
        let seg = grid.len();
        let w2 = self.space.neg(v);
        for i in 0..seg {
            let x = grid[i];
            grid.push(self.space.add(x, v));
        }
        for i in 0..seg {
            let x = grid[i];
            grid.push(self.space.add(x, w2));
        }
        let members = vspan.to_vec();
        for &u in &members {
            vspan.insert(self.space.add(u, v));
            vspan.insert(self.space.add(u, w2));
        }
        bs.push(v);
    }

    /// Completes the frame greedily, writing the remaining sequence
    /// segments and installing the resulting frame as the incumbent.
    fn greedy_fill(&mut self, o: Point, grid: &mut Vec<Point>, vspan: &mut PointSet, bs: &mut Vec<Point>) {
        while bs.len() < self.n {
            let seg = POW3[bs.len()];
            let mut best: Option<(Vec<u32>, Point)> = None;
            for v in 1..self.size {
                if vspan.contains(v) {
                    continue;
                }
                let blk = self.block_of(grid, v);
                match &best {
                    Some((b, _)) if *b <= blk => {}
                    _ => best = Some((blk, v)),
                }
            }
            let (blk, v) = best.expect("a proper span always has outside vectors");
            self.best_seq[seg..3 * seg].copy_from_slice(&blk);
            self.extend(grid, vspan, bs, v);
        }
        self.best_origin = o;
        self.best_basis = bs.clone();
    }

    fn record_generator(&mut self, o: Point, bs: &[Point]) {
        if self.gens.len() + 2 > GEN_CAP {
            self.gens_complete = false;
            return;
        }
        let psi0 = frame_map(self.space, self.best_origin, &self.best_basis);
        let psif = frame_map(self.space, o, bs);
        let g = psi0.inverse().then(&psif);
        debug_assert_eq!(&g.apply_set(self.space, self.cap_points), self.cap_points);
        let ginv = g.inverse();
        for m in [g, ginv] {
            let pmap = m.point_map(self.space);
            self.gens.push(Gen { pmap, map: m });
        }
    }

    fn dfs(&mut self, o: Point, grid: &mut Vec<Point>, vspan: &mut PointSet, bs: &mut Vec<Point>) {
        let m = bs.len();
        if m == self.n {
            if o != self.best_origin || bs[..] != self.best_basis[..] {
                self.record_generator(o, bs);
            }
            return;
        }
        let seg = POW3[m];
        let mut cands: Vec<(Vec<u32>, Point)> = Vec::new();
        for v in 1..self.size {
            if !vspan.contains(v) {
                if let Some(blk) = self.block_not_greater(grid, v, seg) {
                    cands.push((blk, v));
                }
            }
        }
        cands.sort_unstable();
        let mut fixing: Vec<usize> = Vec::new();
        let mut gens_seen = 0usize;
        let mut explored = PointSet::empty(self.size);
        for ci in 0..cands.len() {
            let v = cands[ci].1;
            match cands[ci].0.as_slice().cmp(&self.best_seq[seg..3 * seg]) {
                // candidates are sorted, so nothing later can tie either
                Ordering::Greater => break,
                Ordering::Less => {
                    // new incumbent: this block plus a greedy completion
                    self.best_seq[seg..3 * seg].copy_from_slice(&cands[ci].0);
                    let mut g2 = grid.clone();
                    let mut vs2 = vspan.clone();
                    let mut bs2 = bs.clone();
                    self.extend(&mut g2, &mut vs2, &mut bs2, v);
                    self.greedy_fill(o, &mut g2, &mut vs2, &mut bs2);
                }
                Ordering::Equal => {}
            }
            // orbit pruning: skip v when a discovered automorphism fixing
            // the grid pointwise maps it into an already processed branch
            while gens_seen < self.gens.len() {
                if grid.iter().all(|&x| self.gens[gens_seen].pmap[x] as Point == x) {
                    fixing.push(gens_seen);
                }
                gens_seen += 1;
            }
            let ov = self.space.add(o, v);
            let pruned = fixing.iter().any(|&gi| {
                let w = self.gens[gi].pmap[ov] as Point;
                explored.contains(self.space.sub(w, o))
            });
            if !pruned {
                let saved = vspan.clone();
                self.extend(grid, vspan, bs, v);
                self.dfs(o, grid, vspan, bs);
                grid.truncate(seg);
                bs.pop();
                *vspan = saved;
            }
            explored.insert(v);
        }
    }
}

struct MinResult {
    seq: Vec<u32>,
    origin: Point,
    basis_rev: Vec<Point>,
    generators: Vec<AffineMap>,
    generators_complete: bool,
    colors: Vec<u32>,
}

fn min_search(space: &Space, cap: &CapSet) -> Result<MinResult, CanonError> {
    match cap.affine_hull(space) {
        Some((_, basis)) if basis.len() == space.n() => {}
        Some((_, basis)) => return Err(CanonError::NotSpanning { hull_dim: basis.len() }),
        None => return Err(CanonError::NotSpanning { hull_dim: 0 }),
    }
    let coloring = color_points(space, cap);
    let size = space.size();
    let mut s = MinSearch {
        space,
        colors: &coloring.colors,
        cap_points: cap.points(),
        n: space.n(),
        size,
        best_seq: alloc::vec![u32::MAX; size],
        best_origin: 0,
        best_basis: Vec::new(),
        gens: Vec::new(),
        gens_complete: true,
    };
    let origins: Vec<Point> = (0..size).filter(|&p| coloring.colors[p] == 0).collect();
    // seed the incumbent with a greedy descent from the first origin
    s.best_seq[0] = 0;
    let o0 = origins[0];
    {
        let mut grid = alloc::vec![o0];
        let mut vspan = PointSet::empty(size);
        vspan.insert(0);
        let mut bs = Vec::new();
        s.greedy_fill(o0, &mut grid, &mut vspan, &mut bs);
    }
    let mut explored = PointSet::empty(size);
    for &o in &origins {
        let pruned = s
            .gens
            .iter()
            .any(|g| explored.contains(g.pmap[o] as Point));
        if !pruned {
            let mut grid = alloc::vec![o];
            let mut vspan = PointSet::empty(size);
            vspan.insert(0);
            let mut bs = Vec::new();
            s.dfs(o, &mut grid, &mut vspan, &mut bs);
        }
        explored.insert(o);
    }
    Ok(MinResult {
        seq: s.best_seq,
        origin: s.best_origin,
        basis_rev: s.best_basis,
        generators: s.gens.into_iter().map(|g| g.map).collect(),
        generators_complete: s.gens_complete,
        colors: coloring.colors,
    })
}

/// Canonical form of a spanning cap.
pub fn canonical_form(space: &Space, cap: &CapSet) -> Result<CanonicalCertificate, CanonError> {
    let r = min_search(space, cap)?;
    let psi = frame_map(space, r.origin, &r.basis_rev);
    let witness = psi.inverse();
    let mask = witness.apply_set(space, cap.points());
    let mut fingerprint = r.colors;
    fingerprint.sort_unstable();
    Ok(CanonicalCertificate { mask, witness, fingerprint })
}

/// Generators of the automorphism group (the identity is omitted; the
/// returned maps together with inverses generate the full group).
pub fn automorphism_generators(space: &Space, cap: &CapSet) -> Result<Vec<AffineMap>, CanonError> {
    let r = min_search(space, cap)?;
    assert!(r.generators_complete, "automorphism generator store overflowed");
    Ok(r.generators)
}

struct EqSearch<'a> {
    space: &'a Space,
    colors: &'a [u32],
    n: usize,
    size: usize,
    target: &'a [u32],
    witness: &'a AffineMap,
    out: Vec<AffineMap>,
}

impl<'a> EqSearch<'a> {
    fn block_matches(&self, grid: &[Point], v: Point, seg: usize) -> bool {
        let slice = &self.target[seg..3 * seg];
        let w2 = self.space.neg(v);
        let mut i = 0;
        for u in [v, w2] {
            for &x in grid {
                if self.colors[self.space.add(x, u)] != slice[i] {
                    return false;
                }
                i += 1;
            }
        }
        true
    }

    fn dfs(&mut self, o: Point, grid: &mut Vec<Point>, vspan: &mut PointSet, bs: &mut Vec<Point>) {
        let m = bs.len();
        if m == self.n {
            let psif = frame_map(self.space, o, bs);
            self.out.push(self.witness.then(&psif));
            return;
        }
        let seg = POW3[m];
        for v in 1..self.size {
            if vspan.contains(v) || !self.block_matches(grid, v, seg) {
                continue;
            }
            let saved = vspan.clone();
            let glen = grid.len();
            let w2 = self.space.neg(v);
            for i in 0..glen {
                let x = grid[i];
                grid.push(self.space.add(x, v));
            }
            for i in 0..glen {
                let x = grid[i];
                grid.push(self.space.add(x, w2));
            }
            let members = vspan.to_vec();
            for &u in &members {
                vspan.insert(self.space.add(u, v));
                vspan.insert(self.space.add(u, w2));
            }
            bs.push(v);
            self.dfs(o, grid, vspan, bs);
            bs.pop();
            grid.truncate(glen);
            *vspan = saved;
        }
    }
}

/// The full automorphism group, as the list of all affine maps fixing the
/// cap setwise. Every attaining frame of the canonical sequence yields one
/// automorphism, so the enumeration is complete.
pub fn automorphisms(space: &Space, cap: &CapSet) -> Result<Vec<AffineMap>, CanonError> {
    let r = min_search(space, cap)?;
    let psi = frame_map(space, r.origin, &r.basis_rev);
    let witness = psi.inverse();
    let mut s = EqSearch {
        space,
        colors: &r.colors,
        n: space.n(),
        size: space.size(),
        target: &r.seq,
        witness: &witness,
        out: Vec::new(),
    };
    for o in 0..space.size() {
        if r.colors[o] != r.seq[0] {
            continue;
        }
        let mut grid = alloc::vec![o];
        let mut vspan = PointSet::empty(space.size());
        vspan.insert(0);
        let mut bs = Vec::new();
        s.dfs(o, &mut grid, &mut vspan, &mut bs);
    }
    debug_assert!(s.out.iter().any(|m| m.is_identity()));
    Ok(s.out)
}

/// Finds an affine map sending a onto b, handling non-spanning caps by
/// projecting both to their affine hulls.
pub fn are_isomorphic(space: &Space, a: &CapSet, b: &CapSet) -> Option<AffineMap> {
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some(AffineMap::identity(space.n()));
    }
    if a.len() == 1 {
        let pa = a.iter().next().unwrap();
        let pb = b.iter().next().unwrap();
        return Some(AffineMap::translation(space, space.sub(pb, pa)));
    }
    let ha = a.affine_hull(space).map(|(_, bs)| bs.len()).unwrap();
    let hb = b.affine_hull(space).map(|(_, bs)| bs.len()).unwrap();
    if ha != hb {
        return None;
    }
    if ha == space.n() {
        let ca = canonical_form(space, a).expect("hull was checked full");
        let cb = canonical_form(space, b).expect("hull was checked full");
        if ca.mask != cb.mask {
            return None;
        }
        let m = ca.witness.then(&cb.witness.inverse());
        debug_assert_eq!(&m.apply_set(space, a.points()), b.points());
        return Some(m);
    }
    let (pa, h, psi_a) = project_to_hull(space, a);
    let (pb, _, psi_b) = project_to_hull(space, b);
    let sub = Space::new(h);
    let w = are_isomorphic(&sub, &pa, &pb)?;
    // act by w on the leading h coordinates, identity on the rest
    let n = space.n();
    let mut mat = Matrix::identity(n);
    for r in 0..h {
        for c in 0..h {
            mat.set(r, c, w.matrix().get(r, c));
        }
    }
    let mut t = [0u8; MAX_DIM];
    t[..h].copy_from_slice(w.translation_part());
    let wfull = AffineMap::new(mat, t).expect("block map with invertible blocks");
    let m = psi_a.inverse().then(&wfull).then(&psi_b);
    debug_assert_eq!(&m.apply_set(space, a.points()), b.points());
    Some(m)
}

/// Rewrites a cap in coordinates adapted to its affine hull: returns the
/// cap expressed in hull coordinates, the hull dimension h, and the frame
/// map psi with cap = psi(hull_cap * 3^(n-h)).
pub fn project_to_hull(space: &Space, cap: &CapSet) -> (CapSet, usize, AffineMap) {
    let (origin, mut basis) = cap.affine_hull(space).expect("cap must be nonempty");
    let h = basis.len();
    let mut span = PointSet::empty(space.size());
    span.insert(0);
    let grow = |span: &mut PointSet, v: Point| {
        let members = span.to_vec();
        for &u in &members {
            span.insert(space.add(u, v));
            span.insert(space.add(u, space.neg(v)));
        }
    };
    for i in 0..h {
        let v = basis[i];
        grow(&mut span, v);
    }
    for k in 0..space.n() {
        if basis.len() == space.n() {
            break;
        }
        let e = POW3[space.n() - 1 - k];
        if !span.contains(e) {
            grow(&mut span, e);
            basis.push(e);
        }
    }
    let psi = AffineMap::from_frame(space, origin, &basis).expect("completed to a basis");
    let inv = psi.inverse();
    let scale = POW3[space.n() - h];
    let pts = cap.iter().map(|p| {
        let q = inv.apply(space, p);
        debug_assert_eq!(q % scale, 0, "hull coordinates end in zeros");
        q / scale
    });
    (
        CapSet::from_validated(h, PointSet::from_points(POW3[h], pts)),
        h,
        psi,
    )
}

/// Partition of the given directions into orbits under the automorphism
/// group of the cap. Orbits and their members are sorted by input index.
pub fn direction_orbits(
    space: &Space,
    cap: &CapSet,
    dirs: &[DirectionSpec],
) -> Result<Vec<Vec<usize>>, CanonError> {
    let gens = automorphism_generators(space, cap)?;
    let mut index: BTreeMap<DirectionSpec, usize> = BTreeMap::new();
    for (i, d) in dirs.iter().enumerate() {
        index.insert(*d, i);
    }
    let mut seen = alloc::vec![false; dirs.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..dirs.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = alloc::vec![start];
        let mut stack = alloc::vec![start];
        while let Some(j) = stack.pop() {
            for g in &gens {
                let img = dirs[j].apply_map(g);
                let &k = index
                    .get(&img)
                    .expect("direction list must be closed under the automorphism group");
                if !seen[k] {
                    seen[k] = true;
                    orbit.push(k);
                    stack.push(k);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use crate::testutil::{random_cap, random_map};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn cube(space: &Space) -> CapSet {
        CapSet::from_points(
            space,
            (0..space.size()).filter(|&p| space.digits(p).iter().all(|&d| d != 0)),
        )
        .unwrap()
    }

    #[test]
    fn canonical_mask_is_affine_invariant_and_idempotent() {
        let mut rng = StdRng::seed_from_u64(31);
        for n in 2..=3 {
            let space = Space::new(n);
            let mut done = 0;
            while done < 12 {
                let cap = random_cap(&space, &mut rng, 4 + n);
                if !cap.spans(&space) {
                    continue;
                }
                done += 1;
                let cert = canonical_form(&space, &cap).unwrap();
                assert_eq!(cert.witness.apply_set(&space, cap.points()), cert.mask);
                for _ in 0..5 {
                    let m = random_map(&space, &mut rng);
                    let moved = cap.apply(&space, &m);
                    let cert2 = canonical_form(&space, &moved).unwrap();
                    assert_eq!(cert2.mask, cert.mask);
                    assert_eq!(cert2.fingerprint, cert.fingerprint);
                }
                let canon_cap = CapSet::new(&space, cert.mask.clone()).unwrap();
                let cert3 = canonical_form(&space, &canon_cap).unwrap();
                assert_eq!(cert3.mask, cert.mask);
            }
        }
    }

    #[test]
    fn fingerprints_are_sorted() {
        let space = Space::new(3);
        let cert = canonical_form(&space, &cube(&space)).unwrap();
        assert!(cert.fingerprint.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(cert.fingerprint.len(), space.size());
    }

    #[test]
    fn equivalence_agrees_with_exhaustive_oracle() {
        let mut rng = StdRng::seed_from_u64(47);
        let space = Space::new(3);
        let mut checked = 0;
        while checked < 8 {
            let a = random_cap(&space, &mut rng, 6);
            let b = if checked % 2 == 0 {
                a.apply(&space, &random_map(&space, &mut rng))
            } else {
                random_cap(&space, &mut rng, a.len())
            };
            if !a.spans(&space) || !b.spans(&space) || a.len() != b.len() {
                continue;
            }
            checked += 1;
            let fast = are_isomorphic(&space, &a, &b);
            let slow = brute::equivalent_by_exhaustion(&space, a.points(), b.points());
            assert_eq!(fast.is_some(), slow.is_some());
            if let Some(m) = fast {
                assert_eq!(&m.apply_set(&space, a.points()), b.points());
            }
        }
    }

    #[test]
    fn five_caps_in_dim_three_split_into_two_classes() {
        let space = Space::new(3);
        let all = brute::all_caps_of_size(&space, 5);
        let total = all.len();
        let first = CapSet::from_points(&space, all[0].iter().copied()).unwrap();
        let mask1 = canonical_form(&space, &first).unwrap().mask;
        let mut second = None;
        for pts in &all[1..] {
            let c = CapSet::from_points(&space, pts.iter().copied()).unwrap();
            if canonical_form(&space, &c).unwrap().mask != mask1 {
                second = Some(c);
                break;
            }
        }
        let second = second.expect("two classes of 5-caps exist");
        // orbit sizes from the independent exhaustive oracle cover everything,
        // so there is no third class
        let aut1 = brute::automorphism_count(&space, first.points());
        let aut2 = brute::automorphism_count(&space, second.points());
        let agl3 = 11232 * 27;
        assert_eq!(agl3 / aut1 + agl3 / aut2, total);
        // the two classes really are the two full-group orbits
        assert_eq!(automorphisms(&space, &first).unwrap().len(), aut1);
        assert_eq!(automorphisms(&space, &second).unwrap().len(), aut2);
    }

    #[test]
    fn automorphism_lists_are_groups() {
        let sp2 = Space::new(2);
        let four = CapSet::from_points(&sp2, [0, 1, 3, 4]).unwrap();
        let auts = automorphisms(&sp2, &four).unwrap();
        assert_eq!(auts.len(), brute::automorphism_count(&sp2, four.points()));
        assert!(auts.iter().any(|m| m.is_identity()));
        for a in &auts {
            assert!(auts.contains(&a.inverse()));
            for b in &auts {
                assert!(auts.contains(&a.then(b)));
            }
        }
        let sp3 = Space::new(3);
        let c = cube(&sp3);
        let auts3 = automorphisms(&sp3, &c).unwrap();
        assert_eq!(auts3.len(), brute::automorphism_count(&sp3, c.points()));
        assert!(auts3.len() >= 48);
        for m in &auts3 {
            assert_eq!(&m.apply_set(&sp3, c.points()), c.points());
        }
    }

    #[test]
    fn generators_generate_the_full_group() {
        let space = Space::new(3);
        let c = cube(&space);
        let gens = automorphism_generators(&space, &c).unwrap();
        let full = automorphisms(&space, &c).unwrap();
        // closure of the generators by repeated composition
        let mut closure: Vec<AffineMap> = alloc::vec![AffineMap::identity(3)];
        let mut frontier = closure.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for f in &frontier {
                for g in &gens {
                    let h = f.then(g);
                    if !closure.contains(&h) {
                        closure.push(h);
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(closure.len(), full.len());
    }

    #[test]
    fn direction_orbits_on_the_cube() {
        let space = Space::new(3);
        let c = cube(&space);
        let dirs = DirectionSpec::enumerate(3, 1);
        let orbits = direction_orbits(&space, &c, &dirs).unwrap();
        let total: usize = orbits.iter().map(|o| o.len()).sum();
        assert_eq!(total, dirs.len());
        // fiber counts are constant on orbits
        for orbit in &orbits {
            let key = crate::directions::direction_point_count(&space, c.points(), &dirs[orbit[0]]).key();
            for &i in orbit {
                assert_eq!(
                    crate::directions::direction_point_count(&space, c.points(), &dirs[i]).key(),
                    key
                );
            }
        }
        // orbit-stabilizer over the full group
        let auts = automorphisms(&space, &c).unwrap();
        for orbit in &orbits {
            let d = &dirs[orbit[0]];
            let stab = auts.iter().filter(|m| d.apply_map(m) == *d).count();
            assert_eq!(orbit.len() * stab, auts.len());
        }
    }

    #[test]
    fn trivial_group_gives_singleton_orbits() {
        // every cap in dimension 3 inherits symmetry from its completions,
        // so asymmetric examples start in dimension 4
        let space = Space::new(4);
        let mut rng = StdRng::seed_from_u64(23);
        let cap = (0..200)
            .map(|_| random_cap(&space, &mut rng, 8))
            .find(|c| {
                c.len() == 8
                    && c.spans(&space)
                    && automorphisms(&space, c).map(|a| a.len()) == Ok(1)
            })
            .expect("an asymmetric 8-cap should appear quickly");
        let dirs = DirectionSpec::enumerate(4, 1);
        let orbits = direction_orbits(&space, &cap, &dirs).unwrap();
        assert_eq!(orbits.len(), dirs.len());
    }

    #[test]
    fn non_spanning_caps_are_rejected_with_hull_dimension() {
        let space = Space::new(3);
        let flat = CapSet::from_points(&space, [0, 1, 3, 4]).unwrap();
        assert_eq!(
            canonical_form(&space, &flat).map(|_| ()).unwrap_err(),
            CanonError::NotSpanning { hull_dim: 2 }
        );
    }

    #[test]
    fn hull_projection_and_lifted_witnesses() {
        let sp2 = Space::new(2);
        let sp3 = Space::new(3);
        let four = CapSet::from_points(&sp2, [0, 1, 3, 4]).unwrap();
        let a = four.embed_at_level(1);
        let b = four.embed_at_level(2).translate(&sp3, 7);
        let (pa, ha, psi) = project_to_hull(&sp3, &a);
        assert_eq!(ha, 2);
        assert_eq!(pa.len(), 4);
        // psi reconstructs the original points from hull coordinates
        let rebuilt =
            PointSet::from_points(sp3.size(), pa.iter().map(|q| psi.apply(&sp3, q * 3)));
        assert_eq!(&rebuilt, a.points());
        let w = are_isomorphic(&sp3, &a, &b).expect("both are embedded 4-caps");
        assert_eq!(&w.apply_set(&sp3, a.points()), b.points());
        // different hull dimensions never match
        let line_like = CapSet::from_points(&sp3, [0, 1]).unwrap();
        let spread = CapSet::from_points(&sp3, [0, 9]).unwrap();
        assert!(are_isomorphic(&sp3, &line_like, &spread).is_some());
        let planar = CapSet::from_points(&sp3, [0, 1, 3, 4]).unwrap();
        let spatial = CapSet::from_points(&sp3, [0, 1, 3, 9]).unwrap();
        assert!(are_isomorphic(&sp3, &planar, &spatial).is_none());
    }
}
