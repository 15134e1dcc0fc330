//! The point enumeration of AG(n,3) and its arithmetic.
//!
//! A point of AG(n,3) is a vector (c_1, ..., c_n) with c_i in {0,1,2}.
//! Points are enumerated by the base-3 integer c_1*3^(n-1) + ... + c_n,
//! so coordinate 1 is the most significant digit. Every iteration order,
//! tie-break and canonical choice in this crate derives from this order.

use alloc::vec;
use alloc::vec::Vec;

/// Largest supported dimension. Dense masks stay small (3^8 = 6561 bits).
pub const MAX_DIM: usize = 8;

/// Powers of three up to 3^MAX_DIM.
pub const POW3: [usize; MAX_DIM + 1] = [1, 3, 9, 27, 81, 243, 729, 2187, 6561];

/// A point, identified by its index in the fixed enumeration.
pub type Point = usize;

/// Bit field width used by the spread representation (3 bits per coordinate).
const ONES: u32 = 0o11_111_111;

/// Reduces each 3-bit field of `x` mod 3. Fields must not exceed 5.
#[inline]
const fn mod3_fields(x: u32) -> u32 {
    let flags = ((x + ONES) >> 2) & ONES;
    x - (flags << 1) - flags
}

/// Sum of two points in spread form.
#[inline]
pub const fn spread_add(a: u32, b: u32) -> u32 {
    mod3_fields(a + b)
}

/// Negation of a point in spread form.
#[inline]
pub const fn spread_neg(a: u32) -> u32 {
    mod3_fields(a << 1)
}

/// Scales a point in spread form by a scalar in {0,1,2}.
#[inline]
pub const fn spread_scale(a: u32, s: u8) -> u32 {
    match s {
        0 => 0,
        1 => a,
        _ => spread_neg(a),
    }
}

/// Precomputed context for one dimension: digit tables, the spread form of
/// every point, negation, and (for n <= 5) the full third-point table.
///
/// The third point of the line through distinct p and q is -(p+q); the same
/// formula applied to (p, p) yields p, which is occasionally convenient and
/// never treated as a line.
#[derive(Debug)]
pub struct Space {
    n: usize,
    size: usize,
    digits: Vec<u8>,
    spread: Vec<u32>,
    neg: Vec<u16>,
    third: Option<Vec<u16>>,
}

/// Dimensions up to this bound carry a dense 3^n x 3^n third-point table.
const THIRD_TABLE_MAX_DIM: usize = 5;

impl Space {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension out of range");
        let size = POW3[n];
        let mut digits = vec![0u8; size * n];
        let mut spread = vec![0u32; size];
        let mut neg = vec![0u16; size];
        for p in 0..size {
            let mut rest = p;
            let mut s = 0u32;
            for k in (0..n).rev() {
                let d = (rest % 3) as u8;
                rest /= 3;
                // coordinate k+1 is digit k; digit 0 is most significant
                digits[p * n + k] = d;
                s |= (d as u32) << (3 * k);
            }
            spread[p] = s;
        }
        for p in 0..size {
            let mut acc = 0usize;
            for k in 0..n {
                let d = digits[p * n + k];
                acc = acc * 3 + ((3 - d) % 3) as usize;
            }
            neg[p] = acc as u16;
        }
        let third = if n <= THIRD_TABLE_MAX_DIM {
            let mut t = vec![0u16; size * size];
            for p in 0..size {
                let sp = spread[p];
                for q in 0..size {
                    let s = spread_neg(spread_add(sp, spread[q]));
                    t[p * size + q] = Self::index_of_spread_raw(s, n) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        Space { n, size, digits, spread, neg, third }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points, 3^n.
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// The digits (c_1, ..., c_n) of a point.
    #[inline]
    pub fn digits(&self, p: Point) -> &[u8] {
        &self.digits[p * self.n..(p + 1) * self.n]
    }

    /// Digit of coordinate `coord` (1-based).
    #[inline]
    pub fn digit(&self, p: Point, coord: usize) -> u8 {
        self.digits[p * self.n + (coord - 1)]
    }

    #[inline]
    pub fn spread(&self, p: Point) -> u32 {
        self.spread[p]
    }

    pub fn index_from_digits(&self, ds: &[u8]) -> Point {
        debug_assert_eq!(ds.len(), self.n);
        let mut acc = 0usize;
        for &d in ds {
            debug_assert!(d < 3);
            acc = acc * 3 + d as usize;
        }
        acc
    }

    #[inline]
    fn index_of_spread_raw(s: u32, n: usize) -> usize {
        // field k holds coordinate k+1 and coordinate 1 is most significant
        let mut acc = 0usize;
        for k in 0..n {
            acc = acc * 3 + ((s >> (3 * k)) & 7) as usize;
        }
        acc
    }

    #[inline]
    pub fn index_of_spread(&self, s: u32) -> Point {
        Self::index_of_spread_raw(s, self.n)
    }

    /// Index of p + q.
    #[inline]
    pub fn add(&self, p: Point, q: Point) -> Point {
        self.index_of_spread(spread_add(self.spread[p], self.spread[q]))
    }

    /// Index of -p.
    #[inline]
    pub fn neg(&self, p: Point) -> Point {
        self.neg[p] as Point
    }

    /// Index of s*p for s in {0,1,2}.
    #[inline]
    pub fn scale(&self, p: Point, s: u8) -> Point {
        match s {
            0 => 0,
            1 => p,
            _ => self.neg(p),
        }
    }

    /// Index of p - q.
    #[inline]
    pub fn sub(&self, p: Point, q: Point) -> Point {
        self.add(p, self.neg(q))
    }

    /// The third point on the line through p and q: -(p+q).
    #[inline]
    pub fn third(&self, p: Point, q: Point) -> Point {
        match &self.third {
            Some(t) => t[p * self.size + q] as Point,
            None => {
                let s = spread_neg(spread_add(self.spread[p], self.spread[q]));
                self.index_of_spread(s)
            }
        }
    }

    /// Borrow of the dense third-point table, if this dimension carries one.
    #[inline]
    pub fn third_table(&self) -> Option<&[u16]> {
        self.third.as_deref()
    }

    /// Iterates every line once, as a sorted triple (p, q, r) with p < q < r.
    pub fn lines(&self) -> impl Iterator<Item = [Point; 3]> + '_ {
        (0..self.size).flat_map(move |p| {
            (p + 1..self.size).filter_map(move |q| {
                let r = self.third(p, q);
                if r > q {
                    Some([p, q, r])
                } else {
                    None
                }
            })
        })
    }

    /// Number of lines in AG(n,3): 3^n (3^n - 1) / 6.
    pub fn line_count(&self) -> usize {
        self.size * (self.size - 1) / 6
    }

    /// The nonzero vectors up to sign, i.e. one representative per line
    /// direction. The representative is the smaller index of {v, -v}.
    pub fn line_directions(&self) -> Vec<Point> {
        (1..self.size).filter(|&v| v < self.neg(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_roundtrip() {
        let sp = Space::new(4);
        for p in 0..sp.size() {
            let ds: Vec<u8> = sp.digits(p).to_vec();
            assert_eq!(sp.index_from_digits(&ds), p);
            assert_eq!(sp.index_of_spread(sp.spread(p)), p);
        }
    }

    #[test]
    fn coordinate_one_is_most_significant() {
        let sp = Space::new(3);
        // index 9 = 1*9 + 0*3 + 0 has digits (1,0,0)
        assert_eq!(sp.digits(9), &[1, 0, 0]);
        assert_eq!(sp.digit(9, 1), 1);
        assert_eq!(sp.digit(9, 3), 0);
    }

    #[test]
    fn third_point_agrees_with_digit_arithmetic() {
        for n in 1..=6 {
            let sp = Space::new(n);
            let step = if n >= 5 { 17 } else { 1 };
            for p in (0..sp.size()).step_by(step) {
                for q in (0..sp.size()).step_by(step) {
                    let expected: Vec<u8> = sp
                        .digits(p)
                        .iter()
                        .zip(sp.digits(q))
                        .map(|(&a, &b)| ((6 - a - b) % 3) as u8)
                        .collect();
                    assert_eq!(sp.third(p, q), sp.index_from_digits(&expected));
                }
            }
        }
    }

    #[test]
    fn third_is_symmetric_and_closes_lines() {
        let sp = Space::new(3);
        for p in 0..sp.size() {
            for q in 0..sp.size() {
                let r = sp.third(p, q);
                assert_eq!(sp.third(q, p), r);
                assert_eq!(sp.third(p, r), q);
                if p == q {
                    assert_eq!(r, p);
                } else {
                    assert_ne!(r, p);
                    assert_ne!(r, q);
                }
            }
        }
    }

    #[test]
    fn line_census() {
        for n in 1..=4 {
            let sp = Space::new(n);
            assert_eq!(sp.lines().count(), sp.line_count());
            assert_eq!(sp.line_directions().len(), (sp.size() - 1) / 2);
        }
    }

    #[test]
    fn add_neg_consistency() {
        let sp = Space::new(4);
        for p in (0..sp.size()).step_by(5) {
            assert_eq!(sp.add(p, sp.neg(p)), 0);
            for q in (0..sp.size()).step_by(7) {
                assert_eq!(sp.add(p, q), sp.add(q, p));
                assert_eq!(sp.sub(sp.add(p, q), q), p);
            }
        }
    }
}
