//! Seeded random generators shared by the in-crate tests.

use rand::Rng;

use crate::affine::{AffineMap, Matrix};
use crate::cap::CapSet;
use crate::space::{Space, MAX_DIM};

pub fn random_map<R: Rng>(space: &Space, rng: &mut R) -> AffineMap {
    let n = space.n();
    loop {
        let mut mat = Matrix::zero(n);
        for r in 0..n {
            for c in 0..n {
                mat.set(r, c, rng.gen_range(0..3));
            }
        }
        let mut t = [0u8; MAX_DIM];
        for x in t.iter_mut().take(n) {
            *x = rng.gen_range(0..3);
        }
        if let Some(m) = AffineMap::new(mat, t) {
            return m;
        }
    }
}

/// Grows a cap by uniformly random addable points, stopping at the size
/// limit or at completeness.
pub fn random_cap<R: Rng>(space: &Space, rng: &mut R, limit: usize) -> CapSet {
    let mut cap = CapSet::empty(space);
    while cap.len() < limit {
        let addable = cap.addable_points(space);
        if addable.is_empty() {
            break;
        }
        let k = rng.gen_range(0..addable.len());
        let p = addable.iter().nth(k).unwrap();
        cap.insert_checked(space, p).unwrap();
    }
    cap
}
