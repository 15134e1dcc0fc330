//! Projection of direction fibers onto standard coordinates.
//!
//! A direction of codimension c partitions the space into 3^c parallel
//! flats. Dropping the echelon pivot coordinates maps each flat onto
//! AG(n-c, 3) affinely, with the pivot digits recoverable from the fiber
//! values, so all fibers of one direction project into *shared* coordinates
//! and within-fiber difference vectors project consistently.

use crate::cap::CapSet;
use crate::directions::DirectionSpec;
use crate::pointset::PointSet;
use crate::space::{Point, Space, MAX_DIM, POW3};

#[derive(Clone, Copy, Debug)]
pub struct Fibration {
    spec: DirectionSpec,
    sub_n: usize,
    /// coordinates kept by the projection, ascending
    keep: [usize; MAX_DIM],
}

impl Fibration {
    pub fn new(spec: DirectionSpec) -> Self {
        let n = spec.n();
        let (j1, j2) = spec.pivots();
        let mut keep = [0usize; MAX_DIM];
        let mut m = 0;
        for k in 0..n {
            if k != j1 && Some(k) != j2 {
                keep[m] = k;
                m += 1;
            }
        }
        Fibration { spec, sub_n: m, keep }
    }

    #[inline]
    pub fn spec(&self) -> &DirectionSpec {
        &self.spec
    }

    #[inline]
    pub fn sub_dim(&self) -> usize {
        self.sub_n
    }

    /// Fiber values of p, packed: v1 for codim 1, v1*3+v2 for codim 2.
    pub fn packed_value(&self, space: &Space, p: Point) -> u8 {
        match self.spec.codim() {
            1 => self.spec.value(space, p),
            _ => {
                let (v1, v2) = self.spec.values(space, p);
                v1 * 3 + v2
            }
        }
    }

    /// Coordinates of p within its fiber: non-pivot digits, reassembled
    /// most significant first.
    pub fn project_point(&self, space: &Space, p: Point) -> Point {
        let d = space.digits(p);
        let mut acc = 0usize;
        for i in 0..self.sub_n {
            acc = acc * 3 + d[self.keep[i]] as usize;
        }
        acc
    }

    /// Inverse of project_point on the fiber with the given values
    /// (one value per basis functional).
    pub fn embed_point(&self, q: Point, vals: &[u8]) -> Point {
        debug_assert_eq!(vals.len(), self.spec.codim());
        let n = self.spec.n();
        let mut d = [0u8; MAX_DIM];
        let mut rest = q;
        for i in (0..self.sub_n).rev() {
            d[self.keep[i]] = (rest % 3) as u8;
            rest /= 3;
        }
        debug_assert_eq!(rest, 0);
        let (j1, j2) = self.spec.pivots();
        // echelon rows vanish on each other's pivots, so the pivot digits
        // solve independently
        for (i, j) in [(0, Some(j1)), (1, j2)] {
            let Some(j) = j else { continue };
            if i >= self.spec.codim() {
                continue;
            }
            let row = self.spec.row(i);
            let mut acc = 0u32;
            for k in 0..n {
                if k != j {
                    acc += (row[k] * d[k]) as u32;
                }
            }
            d[j] = ((3 + vals[i] as u32 - (acc % 3) as u32) % 3) as u8;
        }
        let mut idx = 0usize;
        for k in 0..n {
            idx = idx * 3 + d[k] as usize;
        }
        idx
    }

    /// Projection of a difference vector lying in the flats' direction space.
    pub fn project_vector(&self, space: &Space, v: Point) -> Point {
        debug_assert!(self.spec.kernel_contains(space, v));
        self.project_point(space, v)
    }

    /// Members of the set in the fiber with the given values, projected.
    pub fn fiber_set(&self, space: &Space, set: &PointSet, vals: &[u8]) -> PointSet {
        debug_assert_eq!(vals.len(), self.spec.codim());
        let mut out = PointSet::empty(POW3[self.sub_n]);
        for p in set.iter() {
            let matches = match self.spec.codim() {
                1 => self.spec.value(space, p) == vals[0],
                _ => self.spec.values(space, p) == (vals[0], vals[1]),
            };
            if matches {
                out.insert(self.project_point(space, p));
            }
        }
        out
    }

    /// A fiber of a cap, projected; again a cap because the projection is
    /// affine on the fiber.
    pub fn fiber_cap(&self, space: &Space, cap: &CapSet, vals: &[u8]) -> CapSet {
        CapSet::from_validated(self.sub_n, self.fiber_set(space, cap.points(), vals))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::is_cap;

    fn specs_for_tests() -> alloc::vec::Vec<DirectionSpec> {
        alloc::vec![
            DirectionSpec::codim1(4, &[1, 0, 2, 1]).unwrap(),
            DirectionSpec::codim1(4, &[0, 0, 1, 2]).unwrap(),
            DirectionSpec::codim2(4, &[1, 2, 0, 1], &[0, 1, 1, 1]).unwrap(),
            DirectionSpec::codim2(4, &[0, 1, 0, 2], &[0, 0, 1, 1]).unwrap(),
        ]
    }

    #[test]
    fn embed_inverts_project_on_every_fiber() {
        let space = Space::new(4);
        for spec in specs_for_tests() {
            let f = Fibration::new(spec);
            assert_eq!(f.sub_dim(), 4 - spec.codim());
            for p in 0..space.size() {
                let q = f.project_point(&space, p);
                let vals = match spec.codim() {
                    1 => alloc::vec![spec.value(&space, p)],
                    _ => {
                        let (a, b) = spec.values(&space, p);
                        alloc::vec![a, b]
                    }
                };
                assert_eq!(f.embed_point(q, &vals), p);
            }
        }
    }

    #[test]
    fn fibers_partition_the_space() {
        let space = Space::new(4);
        for spec in specs_for_tests() {
            let f = Fibration::new(spec);
            let all = PointSet::full(space.size());
            let mut seen = 0;
            let combos: alloc::vec::Vec<alloc::vec::Vec<u8>> = if spec.codim() == 1 {
                (0..3).map(|v| alloc::vec![v]).collect()
            } else {
                (0..9).map(|c| alloc::vec![c / 3, c % 3]).collect()
            };
            for vals in combos {
                let fiber = f.fiber_set(&space, &all, &vals);
                assert_eq!(fiber.len(), POW3[f.sub_dim()]);
                seen += fiber.len();
            }
            assert_eq!(seen, space.size());
        }
    }

    #[test]
    fn cap_fibers_project_to_caps() {
        let space = Space::new(3);
        let cube = CapSet::from_points(
            &space,
            (0..space.size()).filter(|&p| space.digits(p).iter().all(|&d| d != 0)),
        )
        .unwrap();
        let spec = DirectionSpec::codim1(3, &[1, 1, 2]).unwrap();
        let f = Fibration::new(spec);
        let sub = Space::new(2);
        let mut total = 0;
        for v in 0..3u8 {
            let fiber = f.fiber_cap(&space, &cube, &[v]);
            assert!(is_cap(&sub, fiber.points()));
            total += fiber.len();
        }
        assert_eq!(total, 8);
    }

    #[test]
    fn coordinate_one_fibration_matches_embed_at_level() {
        let sub = Space::new(3);
        let cap = CapSet::from_points(&sub, [0, 1, 3, 9]).unwrap();
        let spec = DirectionSpec::codim1(4, &[1, 0, 0, 0]).unwrap();
        let f = Fibration::new(spec);
        for v in 0..3u8 {
            let embedded = cap.embed_at_level(v);
            let direct = PointSet::from_points(
                POW3[4],
                cap.iter().map(|q| f.embed_point(q, &[v])),
            );
            assert_eq!(embedded.points(), &direct);
        }
    }

    #[test]
    fn within_fiber_differences_project_consistently() {
        let space = Space::new(4);
        let spec = DirectionSpec::codim2(4, &[1, 0, 1, 1], &[0, 1, 2, 0]).unwrap();
        let f = Fibration::new(spec);
        let sub = Space::new(2);
        for p in (0..space.size()).step_by(5) {
            for q in (0..space.size()).step_by(7) {
                if spec.values(&space, p) == spec.values(&space, q) {
                    let diff = space.sub(p, q);
                    let proj_diff = f.project_vector(&space, diff);
                    let expect = sub.sub(f.project_point(&space, p), f.project_point(&space, q));
                    assert_eq!(proj_diff, expect);
                }
            }
        }
    }
}
