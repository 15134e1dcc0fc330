//! Invertible affine maps x -> Ax + t over GF(3).

use alloc::vec::Vec;
use core::fmt;

use crate::pointset::PointSet;
use crate::space::{spread_add, spread_scale, Point, Space, MAX_DIM};

/// Square matrix over GF(3), dimension at most MAX_DIM.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    /// rows[r][c] is the entry in row r, column c.
    rows: [[u8; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix { n, rows: [[0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i][i] = 1;
        }
        m
    }

    pub fn from_rows(n: usize, rows: &[&[u8]]) -> Self {
        assert_eq!(rows.len(), n);
        let mut m = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, &v) in row.iter().enumerate() {
                assert!(v < 3);
                m.rows[i][j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.rows[r][c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(v < 3);
        self.rows[r][c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.rows[r][..self.n]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let mut out = Matrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = 0u32;
                for k in 0..self.n {
                    acc += (self.rows[i][k] * other.rows[k][j]) as u32;
                }
                out.rows[i][j] = (acc % 3) as u8;
            }
        }
        out
    }

    /// Matrix-vector product over GF(3), in digit form.
    pub fn mul_vec(&self, x: &[u8]) -> [u8; MAX_DIM] {
        let mut out = [0u8; MAX_DIM];
        for i in 0..self.n {
            let mut acc = 0u32;
            for k in 0..self.n {
                acc += (self.rows[i][k] * x[k]) as u32;
            }
            out[i] = (acc % 3) as u8;
        }
        out
    }

    /// Gaussian elimination mod 3. Returns None for singular matrices.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut a = *self;
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.rows[r][col] != 0)?;
            if pivot != col {
                a.rows.swap(pivot, col);
                inv.rows.swap(pivot, col);
            }
            if a.rows[col][col] == 2 {
                for j in 0..n {
                    a.rows[col][j] = (a.rows[col][j] * 2) % 3;
                    inv.rows[col][j] = (inv.rows[col][j] * 2) % 3;
                }
            }
            for r in 0..n {
                if r != col && a.rows[r][col] != 0 {
                    let f = a.rows[r][col];
                    for j in 0..n {
                        a.rows[r][j] = (a.rows[r][j] + (3 - f) * a.rows[col][j]) % 3;
                        inv.rows[r][j] = (inv.rows[r][j] + (3 - f) * inv.rows[col][j]) % 3;
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_some()
    }

    /// Rank over GF(3).
    pub fn rank_of(n_cols: usize, rows: &[[u8; MAX_DIM]]) -> usize {
        let mut work: Vec<[u8; MAX_DIM]> = rows.to_vec();
        let mut rank = 0;
        for col in 0..n_cols {
            let Some(pivot) = (rank..work.len()).find(|&r| work[r][col] != 0) else {
                continue;
            };
            work.swap(pivot, rank);
            if work[rank][col] == 2 {
                for v in work[rank].iter_mut() {
                    *v = (*v * 2) % 3;
                }
            }
            for r in 0..work.len() {
                if r != rank && work[r][col] != 0 {
                    let f = work[r][col];
                    for j in 0..n_cols {
                        work[r][j] = (work[r][j] + (3 - f) * work[rank][j]) % 3;
                    }
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_list();
        for r in 0..self.n {
            d.entry(&self.row(r));
        }
        d.finish()
    }
}

/// An invertible affine map x -> Ax + t. Singular linear parts are rejected
/// at construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineMap {
    mat: Matrix,
    t: [u8; MAX_DIM],
}

impl AffineMap {
    pub fn new(mat: Matrix, t: [u8; MAX_DIM]) -> Option<Self> {
        if !mat.is_invertible() {
            return None;
        }
        Some(AffineMap { mat, t })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap { mat: Matrix::identity(n), t: [0; MAX_DIM] }
    }

    pub fn translation(space: &Space, v: Point) -> Self {
        let mut t = [0u8; MAX_DIM];
        t[..space.n()].copy_from_slice(space.digits(v));
        AffineMap { mat: Matrix::identity(space.n()), t }
    }

    /// The point reflection x -> 2c - x.
    pub fn point_reflection(space: &Space, c: Point) -> Self {
        let n = space.n();
        let mut mat = Matrix::zero(n);
        for i in 0..n {
            mat.rows[i][i] = 2;
        }
        let mut t = [0u8; MAX_DIM];
        for (i, &d) in space.digits(c).iter().enumerate() {
            t[i] = (2 * d) % 3;
        }
        AffineMap { mat, t }
    }

    /// The map sending the standard frame to (origin; basis): e_k -> basis[k],
    /// 0 -> origin. Returns None if the basis is linearly dependent.
    pub fn from_frame(space: &Space, origin: Point, basis: &[Point]) -> Option<Self> {
        let n = space.n();
        debug_assert_eq!(basis.len(), n);
        let mut mat = Matrix::zero(n);
        for (k, &b) in basis.iter().enumerate() {
            for (i, &d) in space.digits(b).iter().enumerate() {
                mat.rows[i][k] = d;
            }
        }
        let mut t = [0u8; MAX_DIM];
        t[..n].copy_from_slice(space.digits(origin));
        Self::new(mat, t)
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    #[inline]
    pub fn translation_part(&self) -> &[u8] {
        &self.t[..self.mat.n]
    }

    pub fn n(&self) -> usize {
        self.mat.n
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n())
    }

    /// True when the linear part is the identity.
    pub fn is_translation(&self) -> bool {
        self.mat == Matrix::identity(self.n())
    }

    pub fn apply(&self, space: &Space, p: Point) -> Point {
        let y = self.mat.mul_vec(space.digits(p));
        let mut acc = 0usize;
        for i in 0..self.n() {
            acc = acc * 3 + ((y[i] + self.t[i]) % 3) as usize;
        }
        acc
    }

    pub fn apply_set(&self, space: &Space, set: &PointSet) -> PointSet {
        let n = self.n();
        // spread forms of the columns and the translation, so each point
        // costs a handful of field additions
        let mut cols = [0u32; MAX_DIM];
        for k in 0..n {
            let mut s = 0u32;
            for i in 0..n {
                s |= (self.mat.rows[i][k] as u32) << (3 * i);
            }
            cols[k] = s;
        }
        let mut tsp = 0u32;
        for i in 0..n {
            tsp |= (self.t[i] as u32) << (3 * i);
        }
        let mut out = PointSet::empty(set.universe());
        for p in set.iter() {
            let ds = space.digits(p);
            let mut acc = tsp;
            for k in 0..n {
                acc = spread_add(acc, spread_scale(cols[k], ds[k]));
            }
            // spread fields here hold coordinates 1..n from low to high, so
            // reassemble the index most significant digit first
            let mut idx = 0usize;
            for i in 0..n {
                idx = idx * 3 + ((acc >> (3 * i)) & 7) as usize;
            }
            out.insert(idx);
        }
        out
    }

    /// The full point permutation induced on one dimension.
    pub fn point_map(&self, space: &Space) -> Vec<u16> {
        let mut out = Vec::with_capacity(space.size());
        for p in 0..space.size() {
            out.push(self.apply(space, p) as u16);
        }
        out
    }

    /// self then other: x -> other(self(x)).
    pub fn then(&self, other: &AffineMap) -> AffineMap {
        let mat = other.mat.mul(&self.mat);
        let mid = other.mat.mul_vec(&self.t);
        let mut t = [0u8; MAX_DIM];
        for i in 0..self.n() {
            t[i] = (mid[i] + other.t[i]) % 3;
        }
        AffineMap { mat, t }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.mat.inverse().expect("construction guarantees invertibility");
        let mit = inv.mul_vec(&self.t);
        let mut t = [0u8; MAX_DIM];
        for i in 0..self.n() {
            t[i] = (3 - mit[i]) % 3;
        }
        AffineMap { mat: inv, t }
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffineMap")
            .field("matrix", &self.mat)
            .field("t", &self.translation_part())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_map(space: &Space) -> AffineMap {
        let n = space.n();
        let mut mat = Matrix::identity(n);
        mat.set(0, n - 1, 2);
        mat.set(n - 1, 0, 1);
        // this particular pattern is invertible for n >= 2: adjust if not
        if !mat.is_invertible() {
            mat = Matrix::identity(n);
            mat.set(0, 1, 1);
        }
        let mut t = [0u8; MAX_DIM];
        t[0] = 1;
        t[n - 1] = 2;
        AffineMap::new(mat, t).unwrap()
    }

    #[test]
    fn inverse_composes_to_identity() {
        for n in 2..=5 {
            let sp = Space::new(n);
            let m = sample_map(&sp);
            let inv = m.inverse();
            assert!(m.then(&inv).is_identity());
            assert!(inv.then(&m).is_identity());
            for p in (0..sp.size()).step_by(7) {
                assert_eq!(inv.apply(&sp, m.apply(&sp, p)), p);
            }
        }
    }

    #[test]
    fn apply_set_matches_pointwise_apply() {
        let sp = Space::new(4);
        let m = sample_map(&sp);
        let set = PointSet::from_points(sp.size(), (0..sp.size()).filter(|p| p % 5 == 2));
        let image = m.apply_set(&sp, &set);
        let expect = PointSet::from_points(sp.size(), set.iter().map(|p| m.apply(&sp, p)));
        assert_eq!(image, expect);
        assert_eq!(image.len(), set.len());
    }

    #[test]
    fn composition_acts_in_order() {
        let sp = Space::new(3);
        let a = sample_map(&sp);
        let b = AffineMap::translation(&sp, 14);
        let c = a.then(&b);
        for p in 0..sp.size() {
            assert_eq!(c.apply(&sp, p), b.apply(&sp, a.apply(&sp, p)));
        }
    }

    #[test]
    fn translation_by_unit_shifts_cube() {
        let sp = Space::new(3);
        // (1,0,0) has index 9
        let m = AffineMap::translation(&sp, 9);
        let cube = PointSet::from_points(
            sp.size(),
            (0..sp.size()).filter(|&p| sp.digits(p).iter().all(|&d| d != 0)),
        );
        let shifted = m.apply_set(&sp, &cube);
        let expect = PointSet::from_points(
            sp.size(),
            cube.iter().map(|p| {
                let mut ds: Vec<u8> = sp.digits(p).to_vec();
                ds[0] = (ds[0] + 1) % 3;
                sp.index_from_digits(&ds)
            }),
        );
        assert_eq!(shifted, expect);
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut mat = Matrix::identity(3);
        mat.set(2, 2, 0);
        assert!(AffineMap::new(mat, [0; MAX_DIM]).is_none());
    }

    #[test]
    fn point_reflection_is_involution() {
        let sp = Space::new(4);
        let m = AffineMap::point_reflection(&sp, 33);
        assert_eq!(m.apply(&sp, 33), 33);
        assert!(m.then(&m).is_identity());
    }

    #[test]
    fn frame_map_sends_standard_basis() {
        let sp = Space::new(3);
        let origin = 5;
        let basis = [9, 3, 1]; // e1, e2, e3 as indices
        let m = AffineMap::from_frame(&sp, origin, &basis).unwrap();
        assert_eq!(m.apply(&sp, 0), origin);
        // e3 has index 1; image must be origin + basis[2]
        assert_eq!(m.apply(&sp, 1), sp.add(origin, basis[2]));
        assert_eq!(m.apply(&sp, 9), sp.add(origin, basis[0]));
    }
}
