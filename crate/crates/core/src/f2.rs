//! Dense linear algebra over GF(2).
//!
//! Dimensions in this crate are small (a few dozen coordinates), so vectors
//! are plain word arrays and elimination is schoolbook Gauss-Jordan.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vec {
    len: usize,
    words: Vec<u64>,
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        F2Vec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &F2Vec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &F2Vec) -> F2Vec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn dot(&self, other: &F2Vec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn concat(parts: &[F2Vec]) -> F2Vec {
        F2Vec::from_bits(parts.iter().flat_map(|p| (0..p.len).map(move |i| p.get(i))))
    }

    pub fn slice(&self, start: usize, len: usize) -> F2Vec {
        F2Vec::from_bits((start..start + len).map(|i| self.get(i)))
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Row {
    vec: F2Vec,
    pivot: usize,
    combo: F2Vec,
}

/// A subspace of GF(2)^n kept in reduced echelon form. Each row remembers
/// which inserted generators it is a combination of.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Row>,
    generators: usize,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            generators: 0,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of independent generators accepted so far; generator `k` is the
    /// `k`-th call to `insert` that returned `true`.
    pub fn generators(&self) -> usize {
        self.generators
    }

    fn widen(combo: &F2Vec, len: usize) -> F2Vec {
        let mut out = F2Vec::zeros(len);
        for i in combo.ones() {
            out.set(i, true);
        }
        out
    }

    /// Reduce `v` against the basis: returns the remainder and the generator
    /// combination that was subtracted.
    pub fn reduce(&self, v: &F2Vec) -> (F2Vec, F2Vec) {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut rem = v.clone();
        let mut combo = F2Vec::zeros(self.generators);
        for row in &self.rows {
            if rem.get(row.pivot) {
                rem.xor_assign(&row.vec);
                combo.xor_assign(&Self::widen(&row.combo, self.generators));
            }
        }
        (rem, combo)
    }

    pub fn contains(&self, v: &F2Vec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Express `v` as a sum of inserted generators, if it lies in the span.
    pub fn express(&self, v: &F2Vec) -> Option<F2Vec> {
        let (rem, combo) = self.reduce(v);
        rem.is_zero().then_some(combo)
    }

    /// Insert a vector; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: &F2Vec) -> bool {
        let (rem, combo) = self.reduce(v);
        let Some(pivot) = rem.first_one() else {
            return false;
        };
        let index = self.generators;
        self.generators += 1;
        let mut combo = Self::widen(&combo, self.generators);
        combo.set(index, true);
        for row in &mut self.rows {
            if row.vec.get(pivot) {
                row.vec.xor_assign(&rem);
                let widened = Self::widen(&row.combo, self.generators);
                row.combo = widened.xor(&combo);
            }
        }
        self.rows.push(Row {
            vec: rem,
            pivot,
            combo,
        });
        self.rows.sort_by_key(|r| r.pivot);
        true
    }

    /// Canonical basis: fully reduced rows ordered by pivot.
    pub fn reduced_basis(&self) -> Vec<F2Vec> {
        self.rows.iter().map(|r| r.vec.clone()).collect()
    }

    pub fn same_span(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.reduced_basis() == other.reduced_basis()
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a F2Vec>>(ambient: usize, vs: I) -> Self {
        let mut s = Subspace::new(ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }
}

/// Kernel of the linear map sending the `k`-th standard basis vector of
/// GF(2)^n to `images[k]`.
pub fn kernel_of_images(images: &[F2Vec]) -> Vec<F2Vec> {
    let n = images.len();
    let Some(target_len) = images.first().map(F2Vec::len) else {
        return Vec::new();
    };
    // Track combinations over the domain basis explicitly.
    let mut rows: Vec<(F2Vec, usize, F2Vec)> = Vec::new();
    let mut kernel = Vec::new();
    for (k, image) in images.iter().enumerate() {
        let mut rem = image.clone();
        let mut combo = F2Vec::unit(n, k);
        for (vec, pivot, c) in &rows {
            if rem.get(*pivot) {
                rem.xor_assign(vec);
                combo.xor_assign(c);
            }
        }
        match rem.first_one() {
            None => kernel.push(combo),
            Some(pivot) => {
                debug_assert!(pivot < target_len);
                for (vec, _, c) in rows.iter_mut() {
                    if vec.get(pivot) {
                        vec.xor_assign(&rem);
                        c.xor_assign(&combo);
                    }
                }
                rows.push((rem, pivot, combo));
            }
        }
    }
    let reduced = Subspace::from_vectors(n, kernel.iter());
    reduced.reduced_basis()
}

/// Left radical `{a : aᵀ M = 0}` of a square matrix given by rows.
pub fn left_radical(matrix: &[Vec<u8>]) -> Vec<F2Vec> {
    let images: Vec<F2Vec> = matrix
        .iter()
        .map(|row| F2Vec::from_bits(row.iter().map(|b| b & 1 == 1)))
        .collect();
    kernel_of_images(&images)
}

/// Right radical `{b : M b = 0}`.
pub fn right_radical(matrix: &[Vec<u8>]) -> Vec<F2Vec> {
    let n = matrix.len();
    let columns: Vec<F2Vec> = (0..n)
        .map(|j| F2Vec::from_bits(matrix.iter().map(|row| row[j] & 1 == 1)))
        .collect();
    kernel_of_images(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vec_of(bits: &[u8]) -> F2Vec {
        F2Vec::from_bits(bits.iter().map(|b| *b == 1))
    }

    #[test]
    fn express_recovers_generator_combination() {
        let gens = [vec_of(&[1, 1, 0, 0]), vec_of(&[0, 1, 1, 0]), vec_of(&[0, 0, 1, 1])];
        let mut s = Subspace::new(4);
        for g in &gens {
            assert!(s.insert(g));
        }
        assert!(!s.insert(&vec_of(&[1, 0, 1, 0])));
        let target = vec_of(&[1, 0, 0, 1]);
        let combo = s.express(&target).unwrap();
        let mut acc = F2Vec::zeros(4);
        for i in combo.ones() {
            acc.xor_assign(&gens[i]);
        }
        assert_eq!(acc, target);
        assert!(s.express(&vec_of(&[1, 0, 0, 0])).is_none());
    }

    #[test]
    fn radical_of_hyperbolic_plane_plus_zero() {
        let m = vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]];
        assert_eq!(left_radical(&m), vec![vec_of(&[0, 0, 1])]);
        assert_eq!(right_radical(&m), vec![vec_of(&[0, 0, 1])]);
    }

    proptest! {
        #[test]
        fn kernel_vectors_map_to_zero(rows in prop::collection::vec(prop::collection::vec(0u8..2, 5), 1..8)) {
            let images: Vec<F2Vec> = rows.iter().map(|r| vec_of(r)).collect();
            let kernel = kernel_of_images(&images);
            let rank = Subspace::from_vectors(5, images.iter()).dim();
            prop_assert_eq!(kernel.len() + rank, images.len());
            for k in &kernel {
                let mut acc = F2Vec::zeros(5);
                for i in k.ones() {
                    acc.xor_assign(&images[i]);
                }
                prop_assert!(acc.is_zero());
            }
        }

        #[test]
        fn reduced_basis_is_generator_independent(rows in prop::collection::vec(prop::collection::vec(0u8..2, 6), 1..6)) {
            let vs: Vec<F2Vec> = rows.iter().map(|r| vec_of(r)).collect();
            let a = Subspace::from_vectors(6, vs.iter());
            let mut shuffled = vs.clone();
            shuffled.reverse();
            // add redundant sums
            if vs.len() > 1 {
                shuffled.push(vs[0].xor(&vs[1]));
            }
            let b = Subspace::from_vectors(6, shuffled.iter());
            prop_assert!(a.same_span(&b));
        }
    }
}
