//! Flat directions (codimension 1 and 2), fiber point counts, and censuses.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::pointset::PointSet;
use crate::space::{Point, Space, MAX_DIM};

/// A parallel class of flats of codimension 1 or 2, encoded as the reduced
/// echelon basis of the dual subspace that vanishes on the flats through 0.
/// Equal specs span the same dual subspace.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectionSpec {
    n: usize,
    codim: usize,
    rows: [[u8; MAX_DIM]; 2],
}

impl core::fmt::Debug for DirectionSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "dir[")?;
        for i in 0..self.codim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for k in 0..self.n {
                write!(f, "{}", self.rows[i][k])?;
            }
        }
        write!(f, "]")
    }
}

fn normalize_functional(n: usize, w: &[u8]) -> Option<[u8; MAX_DIM]> {
    let mut row = [0u8; MAX_DIM];
    for k in 0..n {
        row[k] = w[k] % 3;
    }
    let lead = (0..n).find(|&k| row[k] != 0)?;
    if row[lead] == 2 {
        for x in row.iter_mut() {
            *x = (*x * 2) % 3;
        }
    }
    Some(row)
}

/// Row-reduces two functionals; None when they are dependent.
fn rref_pair(n: usize, a: &[u8], b: &[u8]) -> Option<([[u8; MAX_DIM]; 2], (usize, usize))> {
    let mut r0 = [0u8; MAX_DIM];
    let mut r1 = [0u8; MAX_DIM];
    for k in 0..n {
        r0[k] = a[k] % 3;
        r1[k] = b[k] % 3;
    }
    let j1 = (0..n).find(|&k| r0[k] != 0 || r1[k] != 0)?;
    if r0[j1] == 0 {
        core::mem::swap(&mut r0, &mut r1);
    }
    if r0[j1] == 2 {
        for x in r0.iter_mut() {
            *x = (*x * 2) % 3;
        }
    }
    if r1[j1] != 0 {
        let m = 3 - r1[j1];
        for k in 0..n {
            r1[k] = (r1[k] + m * r0[k]) % 3;
        }
    }
    let j2 = (j1 + 1..n).find(|&k| r1[k] != 0)?;
    if r1[j2] == 2 {
        for x in r1.iter_mut() {
            *x = (*x * 2) % 3;
        }
    }
    if r0[j2] != 0 {
        let m = 3 - r0[j2];
        for k in 0..n {
            r0[k] = (r0[k] + m * r1[k]) % 3;
        }
    }
    Some(([r0, r1], (j1, j2)))
}

impl DirectionSpec {
    pub fn codim1(n: usize, w: &[u8]) -> Option<Self> {
        let row = normalize_functional(n, w)?;
        Some(DirectionSpec { n, codim: 1, rows: [row, [0; MAX_DIM]] })
    }

    pub fn codim2(n: usize, w1: &[u8], w2: &[u8]) -> Option<Self> {
        let (rows, _) = rref_pair(n, w1, w2)?;
        Some(DirectionSpec { n, codim: 2, rows })
    }

    /// The codim-1 direction whose functional digits are the base-3 digits
    /// of the index v.
    pub fn codim1_from_index(space: &Space, v: Point) -> Option<Self> {
        Self::codim1(space.n(), space.digits(v))
    }

    /// Common refinement of two distinct hyperplane directions.
    pub fn span(&self, other: &DirectionSpec) -> Option<DirectionSpec> {
        debug_assert!(self.codim == 1 && other.codim == 1 && self.n == other.n);
        let (rows, _) = rref_pair(self.n, &self.rows[0], &other.rows[0])?;
        Some(DirectionSpec { n: self.n, codim: 2, rows })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn codim(&self) -> usize {
        self.codim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        debug_assert!(i < self.codim);
        &self.rows[i][..self.n]
    }

    /// Echelon pivot coordinates (0-based) of the dual basis rows.
    pub fn pivots(&self) -> (usize, Option<usize>) {
        let j1 = (0..self.n).find(|&k| self.rows[0][k] != 0).unwrap();
        if self.codim == 1 {
            (j1, None)
        } else {
            let j2 = (0..self.n).find(|&k| self.rows[1][k] != 0).unwrap();
            (j1, Some(j2))
        }
    }

    /// The functional of row i read as a point index (digits = coefficients).
    pub fn row_as_point(&self, i: usize) -> Point {
        let mut acc = 0usize;
        for k in 0..self.n {
            acc = acc * 3 + self.rows[i][k] as usize;
        }
        acc
    }

    #[inline]
    pub fn eval_row(&self, space: &Space, i: usize, p: Point) -> u8 {
        let d = space.digits(p);
        let mut acc = 0u32;
        for k in 0..self.n {
            acc += (self.rows[i][k] * d[k]) as u32;
        }
        (acc % 3) as u8
    }

    /// Value of the functional at p (codim 1).
    #[inline]
    pub fn value(&self, space: &Space, p: Point) -> u8 {
        debug_assert_eq!(self.codim, 1);
        self.eval_row(space, 0, p)
    }

    /// Value pair at p (codim 2).
    #[inline]
    pub fn values(&self, space: &Space, p: Point) -> (u8, u8) {
        debug_assert_eq!(self.codim, 2);
        (self.eval_row(space, 0, p), self.eval_row(space, 1, p))
    }

    /// True when the vector v lies in the direction space of the flats, i.e.
    /// every basis functional vanishes on it.
    pub fn kernel_contains(&self, space: &Space, v: Point) -> bool {
        (0..self.codim).all(|i| self.eval_row(space, i, v) == 0)
    }

    /// Image direction under an affine map of the space: a functional f
    /// becomes f composed with the inverse linear part (translations only
    /// shift fiber values).
    pub fn apply_map(&self, map: &crate::affine::AffineMap) -> DirectionSpec {
        let ainv = map.matrix().inverse().expect("affine maps are invertible");
        let n = self.n;
        let mut out = [[0u8; MAX_DIM]; 2];
        for i in 0..self.codim {
            for k in 0..n {
                let mut acc = 0u32;
                for j in 0..n {
                    acc += (self.rows[i][j] * ainv.get(j, k)) as u32;
                }
                out[i][k] = (acc % 3) as u8;
            }
        }
        match self.codim {
            1 => Self::codim1(n, &out[0]).expect("image of a nonzero functional is nonzero"),
            _ => Self::codim2(n, &out[0], &out[1]).expect("invertible images stay independent"),
        }
    }

    /// All directions of the given codimension, in lexicographic order of
    /// the echelon basis.
    pub fn enumerate(n: usize, codim: usize) -> Vec<DirectionSpec> {
        assert!(codim >= 1 && codim <= 2 && codim <= n, "codim out of range");
        let mut out = Vec::new();
        if codim == 1 {
            let space = Space::new(n);
            for v in 1..space.size() {
                if let Some(d) = Self::codim1(n, space.digits(v)) {
                    if d.row_as_point(0) == v {
                        out.push(d);
                    }
                }
            }
            return out;
        }
        for j1 in 0..n {
            for j2 in j1 + 1..n {
                let free0: Vec<usize> = (j1 + 1..n).filter(|&k| k != j2).collect();
                let free1: Vec<usize> = (j2 + 1..n).collect();
                let nfree = free0.len() + free1.len();
                let total = 3usize.pow(nfree as u32);
                for mut code in 0..total {
                    let mut rows = [[0u8; MAX_DIM]; 2];
                    rows[0][j1] = 1;
                    rows[1][j2] = 1;
                    for &k in free1.iter().rev() {
                        rows[1][k] = (code % 3) as u8;
                        code /= 3;
                    }
                    for &k in free0.iter().rev() {
                        rows[0][k] = (code % 3) as u8;
                        code /= 3;
                    }
                    out.push(DirectionSpec { n, codim: 2, rows });
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Number of directions of the given codimension.
    pub fn count(n: usize, codim: usize) -> usize {
        let pw = |e: usize| 3usize.pow(e as u32);
        match codim {
            1 => (pw(n) - 1) / 2,
            2 => (pw(n) - 1) * (pw(n - 1) - 1) / 16,
            _ => panic!("codim out of range"),
        }
    }
}

/// Fiber sizes of a cap along one direction. Stored in functional-value
/// order; canonical keys factor out relabelings of the values.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PointCountMatrix {
    codim: usize,
    raw: [[u32; 3]; 3],
}

impl PointCountMatrix {
    pub fn codim(&self) -> usize {
        self.codim
    }

    /// Fiber sizes by functional value (codim 1).
    pub fn triple(&self) -> [u32; 3] {
        debug_assert_eq!(self.codim, 1);
        self.raw[0]
    }

    /// Fiber sizes by value pair, entry [v1][v2] (codim 2).
    pub fn matrix(&self) -> [[u32; 3]; 3] {
        debug_assert_eq!(self.codim, 2);
        self.raw
    }

    pub fn total(&self) -> u32 {
        let mut s = 0;
        for r in 0..if self.codim == 1 { 1 } else { 3 } {
            s += self.raw[r].iter().sum::<u32>();
        }
        s
    }

    pub fn key(&self) -> CountKey {
        match self.codim {
            1 => CountKey::Triple(canon_triple(self.raw[0])),
            _ => CountKey::Matrix(canon_matrix(&self.raw)),
        }
    }
}

/// Canonical census key: fiber sizes up to relabeling of functional values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CountKey {
    Triple([u32; 3]),
    Matrix([u32; 9]),
}

impl CountKey {
    pub fn as_slice(&self) -> &[u32] {
        match self {
            CountKey::Triple(t) => t,
            CountKey::Matrix(m) => m,
        }
    }
}

/// Sorts descending: matches the set notation {a,b,c} with a >= b >= c.
pub fn canon_triple(mut t: [u32; 3]) -> [u32; 3] {
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// Least row-major readout over all invertible affine relabelings of the
/// value pair (48 linear maps times 9 translations). Value relabelings of
/// this full group, not just negation and swap, arise when the echelon
/// basis of an equivalent direction differs, so the census key must factor
/// all of them out.
pub fn canon_matrix(raw: &[[u32; 3]; 3]) -> [u32; 9] {
    let mut best = [u32::MAX; 9];
    for m in 0..81u32 {
        let a = m % 3;
        let b = (m / 3) % 3;
        let c = (m / 9) % 3;
        let d = (m / 27) % 3;
        if (a * d + 2 * b * c) % 3 == 0 {
            continue;
        }
        for t1 in 0..3u32 {
            for t2 in 0..3u32 {
                let mut cand = [0u32; 9];
                for v1 in 0..3u32 {
                    for v2 in 0..3u32 {
                        let w1 = (a * v1 + b * v2 + t1) % 3;
                        let w2 = (c * v1 + d * v2 + t2) % 3;
                        cand[(w1 * 3 + w2) as usize] = raw[v1 as usize][v2 as usize];
                    }
                }
                if cand < best {
                    best = cand;
                }
            }
        }
    }
    best
}

/// Fiber sizes of a point set along direction d. Works for any set, not
/// only caps: dual-vector designs are censused with the same machinery.
pub fn direction_point_count(space: &Space, set: &PointSet, d: &DirectionSpec) -> PointCountMatrix {
    debug_assert_eq!(space.n(), d.n());
    let mut raw = [[0u32; 3]; 3];
    match d.codim() {
        1 => {
            for p in set.iter() {
                raw[0][d.value(space, p) as usize] += 1;
            }
        }
        _ => {
            for p in set.iter() {
                let (v1, v2) = d.values(space, p);
                raw[v1 as usize][v2 as usize] += 1;
            }
        }
    }
    PointCountMatrix { codim: d.codim(), raw }
}

/// Census of canonical fiber-size keys over every direction of one
/// codimension. Rows are sorted by key, largest first, so reports print in
/// a stable order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spectrum {
    pub dim: usize,
    pub codim: usize,
    pub census: Vec<(CountKey, u32)>,
}

impl Spectrum {
    pub fn total(&self) -> u32 {
        self.census.iter().map(|&(_, m)| m).sum()
    }

    pub fn multiplicity(&self, key: &CountKey) -> u32 {
        self.census
            .iter()
            .find(|(k, _)| k == key)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }

    /// Multiplicities in report order.
    pub fn multiplicities(&self) -> Vec<u32> {
        self.census.iter().map(|&(_, m)| m).collect()
    }
}

/// Full census of a point set over all directions of codimension c.
pub fn spectrum(space: &Space, set: &PointSet, c: usize) -> Spectrum {
    let mut tally: BTreeMap<CountKey, u32> = BTreeMap::new();
    for d in DirectionSpec::enumerate(space.n(), c) {
        let key = direction_point_count(space, set, &d).key();
        *tally.entry(key).or_insert(0) += 1;
    }
    let mut census: Vec<(CountKey, u32)> = tally.into_iter().collect();
    census.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    Spectrum { dim: space.n(), codim: c, census }
}

/// Double-counting identities every codim-1 spectrum of an s-point set in
/// dimension n satisfies: fiber sizes per direction sum to s, and each
/// point pair is coplanar with (3^(n-1)-1)/2 hyperplane directions.
pub fn moment_identities(report: &Spectrum, s: usize, n: usize) -> Result<(), String> {
    assert_eq!(report.codim, 1);
    let dirs = DirectionSpec::count(n, 1) as u64;
    let s = s as u64;
    let mut sum1 = 0u64;
    let mut sum2 = 0u64;
    let mut total = 0u64;
    for (key, mult) in &report.census {
        let m = *mult as u64;
        total += m;
        for &f in key.as_slice() {
            let f = f as u64;
            sum1 += m * f;
            if f >= 2 {
                sum2 += m * f * (f - 1) / 2;
            }
        }
    }
    if total != dirs {
        return Err(alloc::format!(
            "direction total: census covers {total} directions, expected {dirs}"
        ));
    }
    let rhs1 = s * dirs;
    if sum1 != rhs1 {
        return Err(alloc::format!("first moment: sum {sum1}, expected {rhs1}"));
    }
    let per_pair = (3u64.pow(n as u32 - 1) - 1) / 2;
    let rhs2 = s * s.saturating_sub(1) / 2 * per_pair;
    if sum2 != rhs2 {
        return Err(alloc::format!("second moment: sum {sum2}, expected {rhs2}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::CapSet;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn direction_counts_match_formulas() {
        for n in 1..=6 {
            let dirs = DirectionSpec::enumerate(n, 1);
            assert_eq!(dirs.len(), DirectionSpec::count(n, 1));
            if n >= 2 {
                let dirs2 = DirectionSpec::enumerate(n, 2);
                assert_eq!(dirs2.len(), DirectionSpec::count(n, 2));
            }
        }
        assert_eq!(DirectionSpec::count(5, 1), 121);
        assert_eq!(DirectionSpec::count(6, 1), 364);
        assert_eq!(DirectionSpec::count(4, 2), 130);
        assert_eq!(DirectionSpec::count(5, 2), 1210);
        assert_eq!(DirectionSpec::count(6, 2), 11011);
    }

    #[test]
    fn enumeration_is_sorted_and_duplicate_free() {
        for (n, c) in [(4, 1), (4, 2), (5, 2)] {
            let dirs = DirectionSpec::enumerate(n, c);
            for w in dirs.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn same_span_gives_equal_spec() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let mut w1 = [0u8; MAX_DIM];
            let mut w2 = [0u8; MAX_DIM];
            loop {
                for k in 0..n {
                    w1[k] = rng.gen_range(0..3);
                    w2[k] = rng.gen_range(0..3);
                }
                if DirectionSpec::codim2(n, &w1, &w2).is_some() {
                    break;
                }
            }
            let d = DirectionSpec::codim2(n, &w1, &w2).unwrap();
            // replace the basis by an invertible combination
            let (a, b, c, e) = loop {
                let a = rng.gen_range(0..3u8);
                let b = rng.gen_range(0..3u8);
                let c = rng.gen_range(0..3u8);
                let e = rng.gen_range(0..3u8);
                if (a * e + 2 * b * c) % 3 != 0 {
                    break (a, b, c, e);
                }
            };
            let mut u1 = [0u8; MAX_DIM];
            let mut u2 = [0u8; MAX_DIM];
            for k in 0..n {
                u1[k] = (a * w1[k] + b * w2[k]) % 3;
                u2[k] = (c * w1[k] + e * w2[k]) % 3;
            }
            assert_eq!(DirectionSpec::codim2(n, &u1, &u2).unwrap(), d);
        }
    }

    #[test]
    fn span_of_two_hyperplanes_contains_both_rows() {
        let d1 = DirectionSpec::codim1(3, &[1, 0, 2]).unwrap();
        let d2 = DirectionSpec::codim1(3, &[0, 1, 1]).unwrap();
        let s = d1.span(&d2).unwrap();
        assert_eq!(s.codim(), 2);
        // both kernels contain the span's kernel
        let space = Space::new(3);
        for v in 0..space.size() {
            if s.kernel_contains(&space, v) {
                assert_eq!(d1.value(&space, v), 0);
                assert_eq!(d2.value(&space, v), 0);
            }
        }
        assert!(d1.span(&d1).is_none());
    }

    #[test]
    fn canon_matrix_is_relabeling_invariant() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..100 {
            let mut raw = [[0u32; 3]; 3];
            for r in raw.iter_mut() {
                for x in r.iter_mut() {
                    *x = rng.gen_range(0..20);
                }
            }
            let key = canon_matrix(&raw);
            // apply a random member of the relabeling group
            let (a, b, c, d) = loop {
                let a = rng.gen_range(0..3u32);
                let b = rng.gen_range(0..3u32);
                let c = rng.gen_range(0..3u32);
                let d = rng.gen_range(0..3u32);
                if (a * d + 2 * b * c) % 3 != 0 {
                    break (a, b, c, d);
                }
            };
            let t1 = rng.gen_range(0..3u32);
            let t2 = rng.gen_range(0..3u32);
            let mut moved = [[0u32; 3]; 3];
            for v1 in 0..3u32 {
                for v2 in 0..3u32 {
                    let w1 = (a * v1 + b * v2 + t1) % 3;
                    let w2 = (c * v1 + d * v2 + t2) % 3;
                    moved[w1 as usize][w2 as usize] = raw[v1 as usize][v2 as usize];
                }
            }
            assert_eq!(canon_matrix(&moved), key);
        }
    }

    fn four_cap(space: &Space) -> CapSet {
        CapSet::from_points(space, [0, 1, 3, 4]).unwrap()
    }

    #[test]
    fn four_cap_spectrum_in_dim_two() {
        let space = Space::new(2);
        let cap = four_cap(&space);
        let report = spectrum(&space, cap.points(), 1);
        assert_eq!(report.total(), 4);
        assert_eq!(report.multiplicity(&CountKey::Triple([2, 2, 0])), 2);
        assert_eq!(report.multiplicity(&CountKey::Triple([2, 1, 1])), 2);
    }

    #[test]
    fn moment_identities_hold_and_detect_corruption() {
        let space = Space::new(2);
        let cap = four_cap(&space);
        let mut report = spectrum(&space, cap.points(), 1);
        assert!(moment_identities(&report, 4, 2).is_ok());
        report.census[0].1 += 1;
        assert!(moment_identities(&report, 4, 2).is_err());
    }

    #[test]
    fn point_counts_sum_to_cap_size() {
        let space = Space::new(3);
        let cap = CapSet::from_points(
            &space,
            (0..space.size()).filter(|&p| space.digits(p).iter().all(|&d| d != 0)),
        )
        .unwrap();
        for d in DirectionSpec::enumerate(3, 2) {
            let pc = direction_point_count(&space, cap.points(), &d);
            assert_eq!(pc.total(), 8);
        }
    }

    #[test]
    fn spectrum_is_affine_invariant() {
        let space = Space::new(3);
        let cap = CapSet::from_points(
            &space,
            (0..space.size()).filter(|&p| space.digits(p).iter().all(|&d| d != 0)),
        )
        .unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let base1 = spectrum(&space, cap.points(), 1);
        let base2 = spectrum(&space, cap.points(), 2);
        for _ in 0..20 {
            let map = crate::testutil::random_map(&space, &mut rng);
            let moved = cap.apply(&space, &map);
            assert_eq!(spectrum(&space, moved.points(), 1), base1);
            assert_eq!(spectrum(&space, moved.points(), 2), base2);
        }
    }

    #[test]
    fn kernel_membership_matches_values() {
        let space = Space::new(4);
        let d = DirectionSpec::codim2(4, &[1, 0, 1, 2], &[0, 1, 2, 0]).unwrap();
        let mut kernel = 0;
        for v in 0..space.size() {
            if d.kernel_contains(&space, v) {
                kernel += 1;
            }
        }
        assert_eq!(kernel, 9);
    }
}
