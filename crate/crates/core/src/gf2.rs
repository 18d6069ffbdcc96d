//! GF(2) linear algebra on check matrices in `[X | Z]` block form.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// An `r × 2n` binary matrix whose rows are signed Pauli strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckMatrix {
    n: usize,
    rows: Vec<PauliString>,
}

impl CheckMatrix {
    pub fn new(n: usize, rows: Vec<PauliString>) -> Result<Self> {
        for row in &rows {
            if row.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.n(),
                });
            }
        }
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<PauliString> {
        self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Entry at symplectic column `col` (`col < n` is X part, else Z part).
    pub fn entry(&self, row: usize, col: usize) -> bool {
        let r = &self.rows[row];
        if col < self.n {
            r.x_bits().get(col)
        } else {
            r.z_bits().get(col - self.n)
        }
    }

    pub fn rank(&self) -> usize {
        rref_gf2(self).rank
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: CheckMatrix,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
}

/// Reduced row echelon form over GF(2), scanning columns `x_0..x_{n-1}, z_0..z_{n-1}`.
///
/// Row additions multiply the Paulis, so signs follow the group product. For
/// commuting rows the signs are exact; rows that anticommute keep the sign of
/// the real part of their product.
pub fn rref_gf2(m: &CheckMatrix) -> Rref {
    let n = m.n;
    let mut rows = m.rows.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..2 * n {
        if r == rows.len() {
            break;
        }
        let bit = |p: &PauliString| {
            if col < n {
                p.x_bits().get(col)
            } else {
                p.z_bits().get(col - n)
            }
        };
        let Some(pivot) = (r..rows.len()).find(|&i| bit(&rows[i])) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && bit(row) {
                row.mul_assign_fold(&pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    let rank = r;
    // rows below the rank are zero
    rows.truncate(rank);
    let reduced = CheckMatrix { n, rows };
    Rref {
        reduced,
        rank,
        pivot_columns: pivots,
    }
}

/// Rank of a set of binary vectors.
pub fn rank_of(vectors: &[Bits]) -> usize {
    let mut basis = XorBasis::new();
    for v in vectors {
        basis.insert(v.clone());
    }
    basis.len()
}

/// Incremental basis for membership tests in the span of binary vectors.
#[derive(Debug, Clone, Default)]
pub struct XorBasis {
    // (pivot index, row) with each pivot absent from all other rows
    rows: Vec<(usize, Bits)>,
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis in place.
    pub fn reduce(&self, v: &mut Bits) {
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &Bits) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }

    /// Inserts `v`; returns false when it was already in the span.
    pub fn insert(&mut self, mut v: Bits) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for (_, row) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Bits> {
        self.rows.iter().map(|(_, r)| r)
    }
}

/// Solves `H v = s` over GF(2) for the rows of `h`. Returns a particular solution
/// and a basis of the kernel, or `None` when inconsistent.
pub fn solve_affine(h: &[Bits], s: &[bool], len: usize) -> Option<(Bits, Vec<Bits>)> {
    // augmented rows: [h_i | s_i]
    let mut rows: Vec<(Bits, bool)> = h.iter().cloned().zip(s.iter().copied()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..len {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0.get(col)) else {
            continue;
        };
        rows.swap(r, p);
        let (pr, ps) = rows[r].clone();
        for (i, (row, rs)) in rows.iter_mut().enumerate() {
            if i != r && row.get(col) {
                row.xor_assign(&pr);
                *rs ^= ps;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|(_, rs)| *rs) {
        return None;
    }
    let mut particular = Bits::zeros(len);
    for (i, &pc) in pivots.iter().enumerate() {
        if rows[i].1 {
            particular.set(pc, true);
        }
    }
    let mut is_pivot = vec![false; len];
    for &pc in &pivots {
        is_pivot[pc] = true;
    }
    let mut kernel = Vec::new();
    for free in (0..len).filter(|&c| !is_pivot[c]) {
        let mut v = Bits::zeros(len);
        v.set(free, true);
        for (i, &pc) in pivots.iter().enumerate() {
            if rows[i].0.get(free) {
                v.set(pc, true);
            }
        }
        kernel.push(v);
    }
    Some((particular, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: &[&str]) -> CheckMatrix {
        let rows: Vec<PauliString> = rows.iter().map(|s| s.parse().unwrap()).collect();
        CheckMatrix::new(rows[0].n(), rows).unwrap()
    }

    #[test]
    fn identity_block_is_fixed_point() {
        let m = cm(&["+X__", "+_X_", "+__X"]);
        let r = rref_gf2(&m);
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, m);
        assert_eq!(r.pivot_columns, vec![0, 1, 2]);
    }

    #[test]
    fn duplicate_rows_collapse() {
        let m = cm(&["+ZZ_", "+ZZ_"]);
        let r = rref_gf2(&m);
        assert_eq!(r.rank, 1);
        assert_eq!(r.reduced.num_rows(), 1);
    }

    #[test]
    fn empty_matrix_has_rank_zero() {
        let m = CheckMatrix::new(3, vec![]).unwrap();
        assert_eq!(rref_gf2(&m).rank, 0);
    }

    #[test]
    fn row_addition_tracks_sign() {
        let m = cm(&["-ZZ", "+_Z"]);
        let r = rref_gf2(&m);
        // -ZZ · +_Z = -Z_
        assert_eq!(r.reduced.rows()[0].to_string(), "-Z_");
    }

    #[test]
    fn affine_solve_finds_coset() {
        let h = vec![Bits::parse_binary("110").unwrap(), Bits::parse_binary("011").unwrap()];
        let (p, k) = solve_affine(&h, &[true, false], 3).unwrap();
        assert!(h[0].dot(&p));
        assert!(!h[1].dot(&p));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].to_string(), "111");
        assert!(solve_affine(&[h[0].clone(), h[0].clone()], &[true, false], 3).is_none());
    }
}
