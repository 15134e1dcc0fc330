//! Dense bitset over the point enumeration of one dimension.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::space::Point;

/// A set of points of AG(n,3), stored as a dense bitmask indexed by the
/// fixed point order. Two sets are comparable only within one dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    n_points: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(n_points: usize) -> Self {
        PointSet { n_points, words: vec![0; n_points.div_ceil(64)] }
    }

    pub fn full(n_points: usize) -> Self {
        let mut s = Self::empty(n_points);
        for w in &mut s.words {
            *w = !0;
        }
        s.clear_tail();
        s
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(n_points: usize, points: I) -> Self {
        let mut s = Self::empty(n_points);
        for p in points {
            s.insert(p);
        }
        s
    }

    fn clear_tail(&mut self) {
        let used = self.n_points % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    /// Capacity of the ambient enumeration (3^n), not the cardinality.
    #[inline]
    pub fn universe(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        debug_assert!(p < self.n_points);
        self.words[p >> 6] & (1u64 << (p & 63)) != 0
    }

    #[inline]
    pub fn insert(&mut self, p: Point) {
        debug_assert!(p < self.n_points);
        self.words[p >> 6] |= 1u64 << (p & 63);
    }

    #[inline]
    pub fn remove(&mut self, p: Point) {
        debug_assert!(p < self.n_points);
        self.words[p >> 6] &= !(1u64 << (p & 63));
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of members with index >= from.
    pub fn len_from(&self, from: Point) -> usize {
        if from >= self.n_points {
            return 0;
        }
        let wi = from >> 6;
        let mut total = (self.words[wi] & !((1u64 << (from & 63)) - 1)).count_ones() as usize;
        for w in &self.words[wi + 1..] {
            total += w.count_ones() as usize;
        }
        total
    }

    pub fn union_with(&mut self, other: &PointSet) {
        debug_assert_eq!(self.n_points, other.n_points);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        debug_assert_eq!(self.n_points, other.n_points);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn subtract(&mut self, other: &PointSet) {
        debug_assert_eq!(self.n_points, other.n_points);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn complement(&self) -> PointSet {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> SetIter<'_> {
        SetIter { words: &self.words, word_index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.iter().collect()
    }

    /// Smallest member with index >= from, if any.
    pub fn next_at_or_after(&self, from: Point) -> Option<Point> {
        if from >= self.n_points {
            return None;
        }
        let mut wi = from >> 6;
        let mut w = self.words[wi] & !((1u64 << (from & 63)) - 1);
        loop {
            if w != 0 {
                return Some((wi << 6) + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    /// Orders sets by their sorted member lists: the set owning the smallest
    /// index in the symmetric difference is the smaller one. On this order,
    /// the minimum over a class of equal-size sets is the one whose members
    /// sit earliest in the point enumeration.
    pub fn cmp_members(&self, other: &PointSet) -> Ordering {
        debug_assert_eq!(self.n_points, other.n_points);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff & diff.wrapping_neg();
                return if a & bit != 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }

    /// Lowercase hex encoding of the mask, least significant word first.
    pub fn to_hex(&self) -> String {
        use core::fmt::Write;
        let mut s = String::with_capacity(self.words.len() * 16);
        for w in &self.words {
            let _ = write!(s, "{w:016x}");
        }
        s
    }

    pub fn from_hex(n_points: usize, hex: &str) -> Option<Self> {
        let n_words = n_points.div_ceil(64);
        if hex.len() != n_words * 16 {
            return None;
        }
        let mut words = Vec::with_capacity(n_words);
        for chunk in hex.as_bytes().chunks(16) {
            let s = core::str::from_utf8(chunk).ok()?;
            words.push(u64::from_str_radix(s, 16).ok()?);
        }
        let mut out = PointSet { n_points, words };
        let tail = out.clone();
        out.clear_tail();
        if out != tail {
            return None;
        }
        Some(out)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct SetIter<'a> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
}

impl Iterator for SetIter<'_> {
    type Item = Point;

    #[inline]
    fn next(&mut self) -> Option<Point> {
        while self.current == 0 {
            self.word_index += 1;
            if self.word_index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_index];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some((self.word_index << 6) + bit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_iterate_roundtrip() {
        let points = [0usize, 3, 63, 64, 65, 127, 200, 242];
        let s = PointSet::from_points(243, points.iter().copied());
        assert_eq!(s.to_vec(), points);
        assert_eq!(s.len(), points.len());
        assert!(s.contains(64));
        assert!(!s.contains(66));
    }

    #[test]
    fn len_from_counts_suffix() {
        let s = PointSet::from_points(243, [0usize, 60, 70, 200]);
        assert_eq!(s.len_from(0), 4);
        assert_eq!(s.len_from(61), 2);
        assert_eq!(s.len_from(201), 0);
    }

    #[test]
    fn member_order_prefers_early_points() {
        let a = PointSet::from_points(81, [0usize, 5]);
        let b = PointSet::from_points(81, [0usize, 6]);
        assert_eq!(a.cmp_members(&b), Ordering::Less);
        assert_eq!(b.cmp_members(&a), Ordering::Greater);
        assert_eq!(a.cmp_members(&a), Ordering::Equal);
        // the set holding the smallest differing index wins even if shorter
        let c = PointSet::from_points(81, [2usize]);
        let d = PointSet::from_points(81, [3usize, 4]);
        assert_eq!(c.cmp_members(&d), Ordering::Less);
    }

    #[test]
    fn hex_roundtrip() {
        let s = PointSet::from_points(729, (0..729).filter(|p| p % 7 == 3));
        let h = s.to_hex();
        assert_eq!(PointSet::from_hex(729, &h).unwrap(), s);
        assert!(PointSet::from_hex(729, "zz").is_none());
    }

    #[test]
    fn complement_and_tail_bits() {
        let s = PointSet::from_points(27, [0usize, 26]);
        let c = s.complement();
        assert_eq!(c.len(), 25);
        assert!(!c.contains(26));
        assert!(c.contains(1));
        let mut u = s.clone();
        u.union_with(&c);
        assert_eq!(u, PointSet::full(27));
    }

    #[test]
    fn next_at_or_after_scans() {
        let s = PointSet::from_points(243, [5usize, 64, 128]);
        assert_eq!(s.next_at_or_after(0), Some(5));
        assert_eq!(s.next_at_or_after(6), Some(64));
        assert_eq!(s.next_at_or_after(64), Some(64));
        assert_eq!(s.next_at_or_after(129), None);
    }
}
