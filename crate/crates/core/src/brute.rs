//! Brute-force oracles for small dimensions.
//!
//! Everything here recomputes from digit arithmetic and exhaustive loops,
//! deliberately bypassing the table-driven paths, so the fast
//! implementations can be tested against an independent reference.
//! Affine-group exhaustion is practical for n <= 3 (|AGL(3,3)| = 303264).

use alloc::vec::Vec;

use crate::affine::{AffineMap, Matrix};
use crate::pointset::PointSet;
use crate::space::{Point, Space, MAX_DIM};

/// Collinearity straight from the definition: coordinates sum to 0 mod 3.
pub fn collinear(space: &Space, p: Point, q: Point, r: Point) -> bool {
    if p == q || q == r || p == r {
        return false;
    }
    let (dp, dq, dr) = (space.digits(p), space.digits(q), space.digits(r));
    (0..space.n()).all(|k| (dp[k] + dq[k] + dr[k]) % 3 == 0)
}

/// Cap test by the full triple loop.
pub fn is_cap_triples(space: &Space, set: &PointSet) -> bool {
    let pts = set.to_vec();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                if collinear(space, pts[i], pts[j], pts[k]) {
                    return false;
                }
            }
        }
    }
    true
}

fn third_by_digits(space: &Space, p: Point, q: Point) -> Point {
    let (dp, dq) = (space.digits(p), space.digits(q));
    let mut acc = 0usize;
    for k in 0..space.n() {
        acc = acc * 3 + ((6 - dp[k] - dq[k]) % 3) as usize;
    }
    acc
}

/// Every cap of exactly k points, as sorted member lists in lexicographic
/// order. Exhaustive; intended for n <= 3.
pub fn all_caps_of_size(space: &Space, k: usize) -> Vec<Vec<Point>> {
    let mut out = Vec::new();
    let mut cur: Vec<Point> = Vec::new();
    fn extend(space: &Space, cur: &mut Vec<Point>, k: usize, out: &mut Vec<Vec<Point>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(0, |&p| p + 1);
        for p in start..space.size() {
            let mut ok = true;
            for i in 0..cur.len() {
                let r = third_by_digits(space, cur[i], p);
                if r != p && r != cur[i] && cur.contains(&r) {
                    ok = false;
                    break;
                }
            }
            if ok {
                cur.push(p);
                extend(space, cur, k, out);
                cur.pop();
            }
        }
    }
    extend(space, &mut cur, k, &mut out);
    out
}

/// Size of the largest cap, by exhaustive depth-first search. n <= 3.
pub fn max_cap_size(space: &Space) -> usize {
    assert!(space.n() <= 3);
    fn extend(space: &Space, cur: &mut Vec<Point>, best: &mut usize) {
        *best = (*best).max(cur.len());
        let start = cur.last().map_or(0, |&p| p + 1);
        for p in start..space.size() {
            let ok = cur.iter().all(|&q| {
                let r = third_by_digits(space, q, p);
                r == p || r == q || !cur.contains(&r)
            });
            if ok {
                cur.push(p);
                extend(space, cur, best);
                cur.pop();
            }
        }
    }
    let mut best = 0;
    extend(space, &mut Vec::new(), &mut best);
    best
}

/// All invertible n x n matrices over GF(3). n <= 3.
pub fn invertible_matrices(n: usize) -> Vec<Matrix> {
    assert!(n <= 3);
    let cells = n * n;
    let total = 3usize.pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut m = Matrix::zero(n);
        let mut rest = code;
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, (rest % 3) as u8);
                rest /= 3;
            }
        }
        if m.is_invertible() {
            out.push(m);
        }
    }
    out
}

/// Every invertible affine map of the space, exhaustively. n <= 3.
pub fn affine_maps<'a>(space: &'a Space) -> impl Iterator<Item = AffineMap> + 'a {
    let mats = invertible_matrices(space.n());
    mats.into_iter().flat_map(move |m| {
        (0..space.size()).map(move |tv| {
            let mut t = [0u8; MAX_DIM];
            t[..space.n()].copy_from_slice(space.digits(tv));
            AffineMap::new(m, t).expect("matrix filtered invertible")
        })
    })
}

/// Some affine map sending a onto b, if one exists.
pub fn equivalent_by_exhaustion(space: &Space, a: &PointSet, b: &PointSet) -> Option<AffineMap> {
    if a.len() != b.len() {
        return None;
    }
    affine_maps(space).find(|m| &m.apply_set(space, a) == b)
}

/// Order of the setwise stabilizer of the set in the affine group.
pub fn automorphism_count(space: &Space, set: &PointSet) -> usize {
    affine_maps(space).filter(|m| &m.apply_set(space, set) == set).count()
}

/// Least image of the set over the whole affine group, in member order.
/// Two sets are affinely equivalent exactly when their least images match.
pub fn min_image(space: &Space, set: &PointSet) -> PointSet {
    let mut best = set.clone();
    for m in affine_maps(space) {
        let img = m.apply_set(space, set);
        if img.cmp_members(&best) == core::cmp::Ordering::Less {
            best = img;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn group_orders() {
        assert_eq!(invertible_matrices(1).len(), 2);
        assert_eq!(invertible_matrices(2).len(), 48);
        assert_eq!(invertible_matrices(3).len(), 11232);
        let sp = Space::new(2);
        assert_eq!(affine_maps(&sp).count(), 48 * 9);
    }

    #[test]
    fn small_dimension_maxima() {
        assert_eq!(max_cap_size(&Space::new(1)), 2);
        assert_eq!(max_cap_size(&Space::new(2)), 4);
        assert_eq!(max_cap_size(&Space::new(3)), 9);
    }

    #[test]
    fn triple_loop_agrees_with_pair_construction() {
        let sp = Space::new(2);
        let caps = all_caps_of_size(&sp, 4);
        for pts in &caps {
            let set = PointSet::from_points(sp.size(), pts.iter().copied());
            assert!(is_cap_triples(&sp, &set));
        }
        // a set containing a full line fails
        let line = PointSet::from_points(sp.size(), [0, 1, 2, 4]);
        assert!(!is_cap_triples(&sp, &line));
    }

    #[test]
    fn four_caps_in_dim_two_form_one_orbit() {
        let sp = Space::new(2);
        let caps = all_caps_of_size(&sp, 4);
        assert_eq!(caps.len(), 54);
        let first = PointSet::from_points(sp.size(), caps[0].iter().copied());
        let reference = min_image(&sp, &first);
        for pts in &caps {
            let set = PointSet::from_points(sp.size(), pts.iter().copied());
            assert_eq!(min_image(&sp, &set), reference);
        }
        // orbit-stabilizer: 432 = orbit size * |Aut|
        assert_eq!(automorphism_count(&sp, &first) * caps.len(), 432);
    }

    #[test]
    fn translates_share_a_least_image() {
        let sp = Space::new(3);
        let mut rng = StdRng::seed_from_u64(5);
        let cap = crate::testutil::random_cap(&sp, &mut rng, 6);
        let moved = crate::testutil::random_map(&sp, &mut rng).apply_set(&sp, cap.points());
        assert_eq!(min_image(&sp, cap.points()), min_image(&sp, &moved));
        assert!(equivalent_by_exhaustion(&sp, cap.points(), &moved).is_some());
    }
}
