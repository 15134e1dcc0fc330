//! Validated caps: point sets with no three collinear members.

use alloc::vec::Vec;
use core::fmt;

use crate::pointset::PointSet;
use crate::space::{Point, Space, POW3};

/// Largest cap size per dimension, where known (dimensions 1 to 6).
/// Used by searches to prune fiber capacities.
pub const MAX_CAP: [usize; 7] = [1, 2, 4, 9, 20, 45, 112];

#[derive(Clone, PartialEq, Eq)]
pub enum CapError {
    /// Three members of the set lie on the line (p, q, r).
    Collinear([Point; 3]),
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Debug for CapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapError::Collinear([p, q, r]) => write!(f, "collinear points {p}, {q}, {r}"),
            CapError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl fmt::Display for CapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Returns a violating line if the set contains three collinear points.
pub fn cap_violation(space: &Space, set: &PointSet) -> Option<[Point; 3]> {
    let points: Vec<Point> = set.to_vec();
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            let r = space.third(p, q);
            if r > q && set.contains(r) {
                return Some([p, q, r]);
            }
        }
    }
    None
}

/// True when the set is a cap.
pub fn is_cap(space: &Space, set: &PointSet) -> bool {
    cap_violation(space, set).is_none()
}

/// A cap in AG(n,3). The no-three-collinear invariant is checked at
/// construction and preserved by every provided operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CapSet {
    n: usize,
    points: PointSet,
}

impl CapSet {
    pub fn new(space: &Space, points: PointSet) -> Result<Self, CapError> {
        if points.universe() != space.size() {
            return Err(CapError::DimensionMismatch { expected: space.size(), got: points.universe() });
        }
        match cap_violation(space, &points) {
            Some(line) => Err(CapError::Collinear(line)),
            None => Ok(CapSet { n: space.n(), points }),
        }
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(space: &Space, iter: I) -> Result<Self, CapError> {
        Self::new(space, PointSet::from_points(space.size(), iter))
    }

    pub fn empty(space: &Space) -> Self {
        CapSet { n: space.n(), points: PointSet::empty(space.size()) }
    }

    /// Wraps a set the caller has already proven to be a cap.
    pub(crate) fn from_validated(n: usize, points: PointSet) -> Self {
        debug_assert_eq!(points.universe(), POW3[n]);
        CapSet { n, points }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.points.contains(p)
    }

    #[inline]
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter()
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.points.to_vec()
    }

    /// Points whose addition keeps the set a cap: not in the cap and not the
    /// third point of any line through two members.
    pub fn addable_points(&self, space: &Space) -> PointSet {
        let mut addable = self.points.complement();
        let pts = self.to_vec();
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i + 1..] {
                addable.remove(space.third(p, q));
            }
        }
        addable
    }

    /// A cap is complete when no point can be added.
    pub fn is_complete(&self, space: &Space) -> bool {
        self.addable_points(space).is_empty()
    }

    /// Adds a point, failing if it completes a line.
    pub fn insert_checked(&mut self, space: &Space, p: Point) -> Result<(), CapError> {
        if self.points.contains(p) {
            return Ok(());
        }
        for q in self.points.iter() {
            let r = space.third(p, q);
            if r != p && self.points.contains(r) {
                return Err(CapError::Collinear([p.min(q).min(r), {
                    let mut v = [p, q, r];
                    v.sort_unstable();
                    v[1]
                }, p.max(q).max(r)]));
            }
        }
        self.points.insert(p);
        Ok(())
    }

    pub fn remove(&mut self, p: Point) {
        self.points.remove(p);
    }

    /// Embeds this cap into dimension n+1 as the fiber where coordinate 1
    /// takes the given value. Coordinate 1 is most significant, so the
    /// embedded index is value * 3^n + index.
    pub fn embed_at_level(&self, value: u8) -> CapSet {
        debug_assert!(value < 3);
        let offset = (value as usize) * POW3[self.n];
        let points = PointSet::from_points(POW3[self.n + 1], self.iter().map(|p| p + offset));
        CapSet { n: self.n + 1, points }
    }

    /// Image under an invertible affine map; always again a cap.
    pub fn apply(&self, space: &Space, map: &crate::affine::AffineMap) -> CapSet {
        CapSet { n: self.n, points: map.apply_set(space, &self.points) }
    }

    /// Translate by v.
    pub fn translate(&self, space: &Space, v: Point) -> CapSet {
        let points = PointSet::from_points(space.size(), self.iter().map(|p| space.add(p, v)));
        CapSet { n: self.n, points }
    }

    /// An origin together with a maximal linearly independent set of
    /// differences; the basis length is the affine hull dimension.
    pub fn affine_hull(&self, space: &Space) -> Option<(Point, Vec<Point>)> {
        let mut iter = self.points.iter();
        let origin = iter.next()?;
        let mut basis: Vec<Point> = Vec::new();
        let mut span: Vec<Point> = alloc::vec![0];
        for p in iter {
            let v = space.sub(p, origin);
            if !span.contains(&v) {
                let mut next = span.clone();
                for &s in &span {
                    let s1 = space.add(s, v);
                    next.push(s1);
                    next.push(space.add(s1, v));
                }
                span = next;
                basis.push(v);
            }
        }
        Some((origin, basis))
    }

    /// True when the affine hull is the whole space.
    pub fn spans(&self, space: &Space) -> bool {
        match self.affine_hull(space) {
            Some((_, basis)) => basis.len() == space.n(),
            None => false,
        }
    }
}

impl fmt::Debug for CapSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CapSet(dim {}, {} points) ", self.n, self.len())?;
        fmt::Debug::fmt(&self.points, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The 8 points of {1,2}^3 form a cap: any line through two of them
    /// exits the cube because some coordinate of the third point is 0.
    fn cube(space: &Space) -> CapSet {
        CapSet::from_points(
            space,
            (0..space.size()).filter(|&p| space.digits(p).iter().all(|&d| d != 0)),
        )
        .unwrap()
    }

    #[test]
    fn cube_is_a_cap() {
        let sp = Space::new(3);
        let c = cube(&sp);
        assert_eq!(c.len(), 8);
    }

    #[test]
    fn full_line_rejected() {
        let sp = Space::new(2);
        // points 0, 1, 2 differ only in the last coordinate: a line
        let err = CapSet::from_points(&sp, [0, 1, 2]).unwrap_err();
        assert_eq!(err, CapError::Collinear([0, 1, 2]));
    }

    #[test]
    fn insert_checked_blocks_lines() {
        let sp = Space::new(2);
        let mut c = CapSet::from_points(&sp, [0, 1]).unwrap();
        assert!(c.insert_checked(&sp, 2).is_err());
        assert!(c.insert_checked(&sp, 3).is_ok());
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn empty_cap_has_everything_addable() {
        let sp = Space::new(2);
        let c = CapSet::empty(&sp);
        assert_eq!(c.addable_points(&sp).len(), 9);
    }

    #[test]
    fn addable_excludes_third_points() {
        let sp = Space::new(2);
        let c = CapSet::from_points(&sp, [0, 1]).unwrap();
        let add = c.addable_points(&sp);
        assert!(!add.contains(0));
        assert!(!add.contains(1));
        assert!(!add.contains(2)); // completes the line
        assert_eq!(add.len(), 6);
    }

    #[test]
    fn embed_at_level_offsets_indices() {
        let sp2 = Space::new(2);
        let c = CapSet::from_points(&sp2, [0, 1]).unwrap();
        let e = c.embed_at_level(2);
        assert_eq!(e.dim(), 3);
        assert_eq!(e.to_vec(), alloc::vec![18, 19]);
        let sp3 = Space::new(3);
        assert!(e.iter().all(|p| sp3.digit(p, 1) == 2));
    }

    #[test]
    fn affine_hull_dimensions() {
        let sp = Space::new(3);
        let c = cube(&sp);
        assert!(c.spans(&sp));
        // two points span a line, hull dimension 1
        let two = CapSet::from_points(&sp, [0, 1]).unwrap();
        let (_, basis) = two.affine_hull(&sp).unwrap();
        assert_eq!(basis.len(), 1);
    }

    #[test]
    fn translate_preserves_size_and_capness() {
        let sp = Space::new(3);
        let c = cube(&sp);
        let t = c.translate(&sp, 5);
        assert_eq!(t.len(), 8);
        assert!(is_cap(&sp, t.points()));
    }
}
