//! Depth-first cap searches and midpoint profiles between parallel caps.
//!
//! All searches branch on the smallest-index candidate still legal, so result
//! order is deterministic and two runs produce identical lists.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::canon;
use crate::cap::CapSet;
use crate::directions::DirectionSpec;
use crate::pointset::PointSet;
use crate::space::{Point, Space};

/// Largest cap size per dimension, dimensions 0 through 6.
pub const MAX_CAP: [usize; 7] = [1, 2, 4, 9, 20, 45, 112];

/// Extension request: grow `seed` to exactly `target` points.
///
/// `fiber` optionally fixes the number of points on each fiber of a
/// direction; quotas are indexed by value for codim 1 and by
/// `3 * v1 + v2` for codim 2. `isomorph_free` keeps one representative per
/// affine equivalence class of the results.
pub struct ExtendSpec<'a> {
    pub seed: &'a CapSet,
    pub target: usize,
    pub fiber: Option<(DirectionSpec, Vec<usize>)>,
    pub isomorph_free: bool,
}

fn class_of(space: &Space, d: &DirectionSpec, p: Point) -> usize {
    if d.codim() == 1 {
        d.value(space, p) as usize
    } else {
        let (a, b) = d.values(space, p);
        a as usize * 3 + b as usize
    }
}

struct Dfs<'a, F: FnMut(&PointSet) -> bool> {
    space: &'a Space,
    target: usize,
    fiber: Option<(&'a DirectionSpec, &'a [usize])>,
    visit: F,
}

impl<'a, F: FnMut(&PointSet) -> bool> Dfs<'a, F> {
    /// Returns false once the visitor asks to stop.
    fn run(
        &mut self,
        cur: &mut Vec<Point>,
        cur_set: &mut PointSet,
        counts: &mut [usize; 9],
        addable: &PointSet,
        start: Point,
    ) -> bool {
        if cur.len() == self.target {
            return (self.visit)(cur_set);
        }
        let need = self.target - cur.len();
        let mut from = start;
        while let Some(p) = addable.next_at_or_after(from) {
            from = p + 1;
            if addable.len_from(p) < need {
                break;
            }
            let cls = match self.fiber {
                Some((d, quotas)) => {
                    let c = class_of(self.space, d, p);
                    if counts[c] >= quotas[c] {
                        continue;
                    }
                    c
                }
                None => 0,
            };
            let mut child = addable.clone();
            child.remove(p);
            for &x in cur.iter() {
                child.remove(self.space.third(x, p));
            }
            if cur.len() + 1 + child.len_from(from) < self.target {
                continue;
            }
            if let Some((d, quotas)) = self.fiber {
                let mut avail = [0usize; 9];
                let mut scan = from;
                while let Some(r) = child.next_at_or_after(scan) {
                    scan = r + 1;
                    avail[class_of(self.space, d, r)] += 1;
                }
                let mut feasible = true;
                for (k, &q) in quotas.iter().enumerate() {
                    let have = counts[k] + usize::from(k == cls);
                    if have + avail[k] < q {
                        feasible = false;
                        break;
                    }
                }
                if !feasible {
                    continue;
                }
            }
            cur.push(p);
            cur_set.insert(p);
            counts[cls] += 1;
            let keep_going = self.run(cur, cur_set, counts, &child, from);
            counts[cls] -= 1;
            cur_set.remove(p);
            cur.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Streams every completion to `visit` in ascending lexicographic order of
/// the added point list; `visit` returns false to stop early. Unreachable
/// targets simply produce no calls.
pub fn extend_dfs_visit<F: FnMut(&PointSet) -> bool>(
    space: &Space,
    spec: &ExtendSpec<'_>,
    visit: F,
) {
    let seed = spec.seed;
    assert_eq!(seed.dim(), space.n(), "seed dimension must match the space");
    if seed.len() > spec.target {
        return;
    }
    let mut counts = [0usize; 9];
    if let Some((d, quotas)) = &spec.fiber {
        assert_eq!(d.n(), space.n(), "fiber direction must match the space");
        assert_eq!(quotas.len(), if d.codim() == 1 { 3 } else { 9 });
        if quotas.iter().sum::<usize>() != spec.target {
            return;
        }
        for p in seed.iter() {
            counts[class_of(space, d, p)] += 1;
        }
        for (k, &q) in quotas.iter().enumerate() {
            if counts[k] > q {
                return;
            }
        }
    }
    let addable = seed.addable_points(space);
    let mut cur = seed.to_vec();
    let mut cur_set = seed.points().clone();
    let mut dfs = Dfs {
        space,
        target: spec.target,
        fiber: spec.fiber.as_ref().map(|(d, q)| (d, q.as_slice())),
        visit,
    };
    dfs.run(&mut cur, &mut cur_set, &mut counts, &addable, 0);
}

/// Equivalence key usable for any cap, spanning or not: hull dimension plus
/// the canonical mask inside the hull.
fn canon_key(space: &Space, set: &PointSet) -> (usize, Vec<Point>) {
    let cap = CapSet::from_validated(space.n(), set.clone());
    if cap.is_empty() {
        return (0, Vec::new());
    }
    let (hull_cap, hull_dim, _) = canon::project_to_hull(space, &cap);
    if hull_dim == 0 {
        return (0, alloc::vec![0]);
    }
    let sub = Space::new(hull_dim);
    let cert = canon::canonical_form(&sub, &hull_cap).expect("hull projection spans");
    (hull_dim, cert.mask.to_vec())
}

/// Collects completions of `spec`, at most `limit` of them if given.
pub fn extend_dfs(space: &Space, spec: &ExtendSpec<'_>, limit: Option<usize>) -> Vec<CapSet> {
    let mut out: Vec<CapSet> = Vec::new();
    let mut seen: BTreeSet<(usize, Vec<Point>)> = BTreeSet::new();
    if limit == Some(0) {
        return out;
    }
    extend_dfs_visit(space, spec, |set| {
        if spec.isomorph_free && !seen.insert(canon_key(space, set)) {
            return true;
        }
        out.push(CapSet::from_validated(space.n(), set.clone()));
        match limit {
            Some(m) => out.len() < m,
            None => true,
        }
    });
    out
}

/// All ways to remove `k` points from `cap` and add `k` fresh ones so the
/// result is again a cap with `forbid(result) == false`. Removed points may
/// be re-added, so the `k` trivial exchanges are always present when `forbid`
/// passes the cap itself. Pairs come out sorted by (removed, added) lists.
pub fn replace_points<F: Fn(&Space, &CapSet) -> bool>(
    space: &Space,
    cap: &CapSet,
    k: usize,
    forbid: F,
) -> Vec<(Vec<Point>, Vec<Point>)> {
    let pts = cap.to_vec();
    let mut out = Vec::new();
    if k > pts.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let removed: Vec<Point> = idx.iter().map(|&i| pts[i]).collect();
        let mut base = cap.clone();
        for &p in &removed {
            base.remove(p);
        }
        let spec = ExtendSpec {
            seed: &base,
            target: cap.len(),
            fiber: None,
            isomorph_free: false,
        };
        extend_dfs_visit(space, &spec, |set| {
            let result = CapSet::from_validated(space.n(), set.clone());
            if !forbid(space, &result) {
                let mut added: Vec<Point> = Vec::with_capacity(k);
                let mut scan = 0;
                while let Some(p) = set.next_at_or_after(scan) {
                    scan = p + 1;
                    if !base.contains(p) {
                        added.push(p);
                    }
                }
                out.push((removed.clone(), added));
            }
            true
        });
        // next k-combination in lexicographic order
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if idx[j] != pts.len() - k + j {
                break;
            }
        }
        idx[j] += 1;
        for t in j + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Midpoint incidence counts between two caps lying on opposite parallel
/// flats: `count(q)` is the number of pairs (p, r) in A x B whose affine
/// line closes at q on the middle flat.
pub struct MidpointProfile {
    counts: Vec<u32>,
}

pub fn midpoint_profile(space: &Space, a: &CapSet, b: &CapSet) -> MidpointProfile {
    let mut counts = alloc::vec![0u32; space.size()];
    for p in a.iter() {
        for r in b.iter() {
            counts[space.third(p, r)] += 1;
        }
    }
    MidpointProfile { counts }
}

impl MidpointProfile {
    pub fn count(&self, q: Point) -> u32 {
        self.counts[q]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    /// Points whose count satisfies the predicate, ascending.
    pub fn points_where<F: Fn(u32) -> bool>(&self, f: F) -> Vec<Point> {
        (0..self.counts.len()).filter(|&q| f(self.counts[q])).collect()
    }
}

/// Points of `a` whose segment to `q` closes inside `b`.
pub fn side_set(space: &Space, a: &CapSet, b: &CapSet, q: Point) -> Vec<Point> {
    a.iter().filter(|&p| b.contains(space.third(p, q))).collect()
}

/// The segments (p, r) in A x B with midpoint `q`.
pub fn segments_through(space: &Space, a: &CapSet, b: &CapSet, q: Point) -> Vec<(Point, Point)> {
    side_set(space, a, b, q)
        .into_iter()
        .map(|p| (p, space.third(p, q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use crate::testutil;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimension_two_completions_from_empty() {
        let space = Space::new(2);
        let empty = CapSet::empty(&space);
        let spec = ExtendSpec { seed: &empty, target: 4, fiber: None, isomorph_free: false };
        let found = extend_dfs(&space, &spec, None);
        let all = brute::all_caps_of_size(&space, 4);
        assert_eq!(found.len(), all.len());
        for (f, a) in found.iter().zip(all.iter()) {
            assert_eq!(f.to_vec(), *a);
        }
        for cap in &found {
            assert!(cap.is_complete(&space));
        }
        let one = ExtendSpec { seed: &empty, target: 4, fiber: None, isomorph_free: true };
        assert_eq!(extend_dfs(&space, &one, None).len(), 1);
    }

    #[test]
    fn unreachable_targets_yield_nothing() {
        let space = Space::new(2);
        let empty = CapSet::empty(&space);
        let spec = ExtendSpec { seed: &empty, target: 5, fiber: None, isomorph_free: false };
        assert!(extend_dfs(&space, &spec, None).is_empty());
    }

    #[test]
    fn fiber_quotas_match_a_filtered_enumeration() {
        let space = Space::new(2);
        let d = DirectionSpec::codim1(2, &[1, 0]).unwrap();
        let empty = CapSet::empty(&space);
        let spec = ExtendSpec {
            seed: &empty,
            target: 4,
            fiber: Some((d.clone(), alloc::vec![2, 1, 1])),
            isomorph_free: false,
        };
        let found = extend_dfs(&space, &spec, None);
        let expected: Vec<Vec<Point>> = brute::all_caps_of_size(&space, 4)
            .into_iter()
            .filter(|c| {
                let mut counts = [0usize; 3];
                for &p in c.iter() {
                    counts[d.value(&space, p) as usize] += 1;
                }
                counts == [2, 1, 1]
            })
            .collect();
        assert!(!found.is_empty());
        assert_eq!(found.len(), expected.len());
        for (f, e) in found.iter().zip(expected.iter()) {
            assert_eq!(f.to_vec(), *e);
        }
    }

    #[test]
    fn limits_truncate_the_same_stream() {
        let space = Space::new(3);
        let empty = CapSet::empty(&space);
        let spec = ExtendSpec { seed: &empty, target: 6, fiber: None, isomorph_free: false };
        let first = extend_dfs(&space, &spec, Some(5));
        let again = extend_dfs(&space, &spec, Some(5));
        assert_eq!(first.len(), 5);
        for (a, b) in first.iter().zip(again.iter()) {
            assert_eq!(a.to_vec(), b.to_vec());
        }
    }

    #[test]
    fn replacements_include_all_trivial_exchanges() {
        let space = Space::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let cap = testutil::random_cap(&space, &mut rng, 7);
        for k in 1..=2 {
            let sols = replace_points(&space, &cap, k, |_, _| false);
            let trivial: Vec<_> =
                sols.iter().filter(|(rem, add)| rem == add).collect();
            // every k-subset can be removed and put back
            let mut binom = 1usize;
            for i in 0..k {
                binom = binom * (cap.len() - i) / (i + 1);
            }
            assert_eq!(trivial.len(), binom);
            for (rem, add) in &sols {
                let mut result = cap.clone();
                for &p in rem {
                    result.remove(p);
                }
                for &p in add {
                    result.insert_checked(&space, p).unwrap();
                }
                assert_eq!(result.len(), cap.len());
            }
        }
    }

    #[test]
    fn replacements_agree_with_direct_enumeration_for_k_one() {
        let space = Space::new(2);
        let cap = CapSet::from_points(&space, [0, 1, 3, 4]).unwrap();
        let sols = replace_points(&space, &cap, 1, |_, _| false);
        let mut expected = Vec::new();
        for p in cap.iter() {
            let mut base = cap.clone();
            base.remove(p);
            for q in 0..space.size() {
                if base.contains(q) {
                    continue;
                }
                let mut t = base.clone();
                if t.insert_checked(&space, q).is_ok() {
                    expected.push((alloc::vec![p], alloc::vec![q]));
                }
            }
        }
        expected.sort();
        assert_eq!(sols, expected);
    }

    #[test]
    fn forbid_filters_results() {
        let space = Space::new(2);
        let cap = CapSet::from_points(&space, [0, 1, 3, 4]).unwrap();
        let all = replace_points(&space, &cap, 1, |_, _| false);
        let none = replace_points(&space, &cap, 1, |_, _| true);
        let nontrivial = replace_points(&space, &cap, 1, |_, c| c.to_vec() == cap.to_vec());
        assert!(none.is_empty());
        assert_eq!(all.len(), nontrivial.len() + 4);
        for (rem, add) in &nontrivial {
            assert_ne!(rem, add);
        }
    }

    #[test]
    fn single_point_profile_marks_one_midpoint() {
        let space = Space::new(3);
        let a = CapSet::from_points(&space, [5]).unwrap();
        let b = CapSet::from_points(&space, [11]).unwrap();
        let prof = midpoint_profile(&space, &a, &b);
        let q = space.third(5, 11);
        for p in 0..space.size() {
            assert_eq!(prof.count(p), u32::from(p == q));
        }
        assert_eq!(side_set(&space, &a, &b, q), alloc::vec![5]);
        assert_eq!(segments_through(&space, &a, &b, q), alloc::vec![(5, 11)]);
    }

    #[test]
    fn profile_totals_and_side_sets_are_consistent() {
        let space = Space::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let la = 1 + rng.gen_range(0..8);
            let lb = 1 + rng.gen_range(0..8);
            let a = testutil::random_cap(&space, &mut rng, la);
            let b = testutil::random_cap(&space, &mut rng, lb);
            let prof = midpoint_profile(&space, &a, &b);
            assert_eq!(prof.total(), (a.len() * b.len()) as u64);
            for q in 0..space.size() {
                let left = side_set(&space, &a, &b, q);
                let segs = segments_through(&space, &a, &b, q);
                assert_eq!(left.len() as u32, prof.count(q));
                assert_eq!(segs.len() as u32, prof.count(q));
                for &(p, r) in &segs {
                    assert!(a.contains(p) && b.contains(r));
                    assert_eq!(space.third(p, r), q);
                }
            }
        }
    }
}
