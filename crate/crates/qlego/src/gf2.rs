//! Word-packed GF(2) linear algebra: reduced row echelon form, rank, solving
//! linear systems, and kernel bases. Rows are [`BitVec`]s; the column
//! elimination order is caller-supplied so tableau canonicalization can use
//! its deterministic X-before-Z ordering.

use crate::pauli::BitVec;

/// A GF(2) matrix as a list of equal-length rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    pub rows: Vec<BitVec>,
    pub cols: usize,
}

impl Gf2Matrix {
    pub fn new(cols: usize) -> Self {
        Gf2Matrix { rows: Vec::new(), cols }
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Gf2Matrix { rows, cols }
    }

    pub fn push_row(&mut self, r: BitVec) {
        debug_assert_eq!(r.len(), self.cols);
        self.rows.push(r);
    }

    /// In-place RREF with the default column order `0..cols`.
    /// Returns the pivot column of each (nonzero) row.
    pub fn rref(&mut self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_order(&order)
    }

    /// In-place RREF eliminating columns in the given order. Rows end up
    /// sorted by pivot position (in `order`), zero rows removed.
    /// Returns the pivot column (original index) of each row.
    pub fn rref_with_order(&mut self, order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for &col in order {
            if row >= self.rows.len() {
                break;
            }
            let Some(pr) = (row..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(row, pr);
            let pivot_row = self.rows[row].clone();
            for (r, other) in self.rows.iter_mut().enumerate() {
                if r != row && other.get(col) {
                    other.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            row += 1;
        }
        self.rows.truncate(row);
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref();
        m.rows.len()
    }

    /// Solve `xᵀ·M = b` for a combination of rows equal to `b`.
    /// Returns the row-combination indicator if one exists.
    pub fn solve_row_combination(&self, b: &BitVec) -> Option<BitVec> {
        debug_assert_eq!(b.len(), self.cols);
        // Augment each row with an indicator, reduce, then reduce b.
        let k = self.rows.len();
        let aug_cols = self.cols + k;
        let mut aug = Gf2Matrix::new(aug_cols);
        for (i, r) in self.rows.iter().enumerate() {
            let mut row = BitVec::zeros(aug_cols);
            for j in r.iter_ones() {
                row.set(j, true);
            }
            row.set(self.cols + i, true);
            aug.push_row(row);
        }
        let order: Vec<usize> = (0..self.cols).collect();
        aug.rref_with_order(&order);
        let mut target = BitVec::zeros(aug_cols);
        for j in b.iter_ones() {
            target.set(j, true);
        }
        for row in &aug.rows {
            let pivot = (0..self.cols).find(|&c| row.get(c));
            if let Some(pc) = pivot {
                if target.get(pc) {
                    target.xor_assign(row);
                }
            }
        }
        if (0..self.cols).any(|c| target.get(c)) {
            return None;
        }
        let mut combo = BitVec::zeros(k);
        for i in 0..k {
            if target.get(self.cols + i) {
                combo.set(i, true);
            }
        }
        Some(combo)
    }

    /// A basis for the right kernel `{v : M·v = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (row, &pc) in m.rows.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `M·v = b` for a column vector `v` (one bit per matrix column).
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        debug_assert_eq!(b.len(), self.rows.len());
        // Reduce the augmented matrix [M | b].
        let mut aug = Gf2Matrix::new(self.cols + 1);
        for (i, r) in self.rows.iter().enumerate() {
            let mut row = BitVec::zeros(self.cols + 1);
            for j in r.iter_ones() {
                row.set(j, true);
            }
            row.set(self.cols, b.get(i));
            aug.push_row(row);
        }
        let order: Vec<usize> = (0..self.cols).collect();
        let pivots = aug.rref_with_order(&order);
        let mut v = BitVec::zeros(self.cols);
        for (row, &pc) in aug.rows.iter().zip(&pivots) {
            if row.get(self.cols) {
                v.set(pc, true);
            }
        }
        // Consistency: any row with zero M-part must have zero b-part.
        for row in aug.rows.iter().skip(pivots.len()) {
            if row.get(self.cols) {
                return None;
            }
        }
        // pivots.len() < rows possible only via truncation; re-check residual.
        let mut residual = b.clone();
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(&v) {
                residual.set(i, !residual.get(i));
            }
        }
        if residual.is_zero() {
            Some(v)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BitVec {
        let mut b = BitVec::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            b.set(i, v == 1);
        }
        b
    }

    #[test]
    fn rref_rank() {
        let mut m = Gf2Matrix::from_rows(
            vec![bv(&[1, 1, 0]), bv(&[0, 1, 1]), bv(&[1, 0, 1])],
            3,
        );
        assert_eq!(m.rank(), 2);
        m.rref();
        assert_eq!(m.rows.len(), 2);
    }

    #[test]
    fn rref_idempotent() {
        let mut m = Gf2Matrix::from_rows(
            vec![bv(&[1, 1, 0, 1]), bv(&[0, 1, 1, 0]), bv(&[1, 0, 1, 1])],
            4,
        );
        m.rref();
        let once = m.clone();
        m.rref();
        assert_eq!(once, m);
    }

    #[test]
    fn solve_row_combination_works() {
        let m = Gf2Matrix::from_rows(vec![bv(&[1, 1, 0]), bv(&[0, 1, 1])], 3);
        let combo = m.solve_row_combination(&bv(&[1, 0, 1])).unwrap();
        assert!(combo.get(0) && combo.get(1));
        assert!(m.solve_row_combination(&bv(&[1, 0, 0])).is_none());
    }

    #[test]
    fn kernel_annihilates() {
        let m = Gf2Matrix::from_rows(vec![bv(&[1, 1, 1, 0]), bv(&[0, 1, 1, 1])], 4);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for row in &m.rows {
                assert!(!row.dot(v));
            }
        }
    }

    #[test]
    fn solve_column_vector() {
        let m = Gf2Matrix::from_rows(vec![bv(&[1, 0, 1]), bv(&[1, 1, 0]), bv(&[0, 1, 1])], 3);
        let b = bv(&[1, 1, 0]);
        let v = m.solve(&b).unwrap();
        for (i, row) in m.rows.iter().enumerate() {
            assert_eq!(row.dot(&v), b.get(i));
        }
        // Inconsistent system: rows sum to 0 but b entries sum to 1.
        let m2 = Gf2Matrix::from_rows(vec![bv(&[1, 1, 0]), bv(&[1, 1, 0])], 3);
        assert!(m2.solve(&bv(&[1, 0])).is_none());
    }
}
