//! Linear algebra over `Z_{2^m}` (m ≤ 4): Howell-style row reduction with
//! annihilator tracking, giving exact kernels and solvability of linear
//! systems — the engine behind diagonal-symmetry group computation and
//! cleanability certificates.

/// A dense matrix over `Z_N` with `N` a power of two.
#[derive(Clone, Debug)]
pub struct ZmodMatrix {
    pub modulus: u32,
    pub cols: usize,
    pub rows: Vec<Vec<u32>>,
}

fn valuation(x: u32, m: u32) -> u32 {
    if x == 0 {
        m
    } else {
        x.trailing_zeros().min(m)
    }
}

/// Inverse of an odd residue mod `N` (N ≤ 2^31, brute force is fine for the
/// tiny moduli used here).
fn inv_odd(u: u32, n: u32) -> u32 {
    debug_assert!(u % 2 == 1);
    (1..n).find(|&t| (t * u) % n == 1).expect("odd residues are units")
}

impl ZmodMatrix {
    pub fn new(modulus: u32, cols: usize) -> Self {
        assert!(modulus.is_power_of_two() && modulus >= 2);
        ZmodMatrix { modulus, cols, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<u32>) {
        debug_assert_eq!(row.len(), self.cols);
        debug_assert!(row.iter().all(|&x| x < self.modulus));
        self.rows.push(row);
    }

    /// Howell reduction of the row space, with per-row combination tracking.
    ///
    /// Returns `(reduced_rows, combos, kernel_combos)` where each reduced row
    /// equals `combos[i] · original_rows` and each kernel combo is a
    /// coefficient vector `c` with `c · original_rows = 0`.
    fn howell_tracked(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let n = self.modulus;
        let m = n.trailing_zeros();
        let k = self.rows.len();
        // Work rows: (constraint part, combination part).
        let mut work: Vec<(Vec<u32>, Vec<u32>)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut combo = vec![0u32; k];
                combo[i] = 1;
                (r.clone(), combo)
            })
            .collect();
        let scale = |row: &(Vec<u32>, Vec<u32>), f: u32| -> (Vec<u32>, Vec<u32>) {
            (
                row.0.iter().map(|&x| (x * f) % n).collect(),
                row.1.iter().map(|&x| (x * f) % n).collect(),
            )
        };
        let sub_scaled = |dst: &mut (Vec<u32>, Vec<u32>), src: &(Vec<u32>, Vec<u32>), f: u32| {
            for (d, s) in dst.0.iter_mut().zip(&src.0) {
                *d = (*d + (n - (s * f) % n) % n) % n;
            }
            for (d, s) in dst.1.iter_mut().zip(&src.1) {
                *d = (*d + (n - (s * f) % n) % n) % n;
            }
        };
        let mut finished: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
        for col in 0..self.cols {
            // Candidate rows: not yet finished, zero before col (guaranteed by
            // elimination), nonzero at col.
            let Some(best) = work
                .iter()
                .enumerate()
                .filter(|(_, r)| r.0[col] != 0)
                .min_by_key(|(_, r)| valuation(r.0[col], m))
                .map(|(i, _)| i)
            else {
                continue;
            };
            let mut pivot = work.swap_remove(best);
            let v = valuation(pivot.0[col], m);
            let odd = pivot.0[col] >> v;
            pivot = scale(&pivot, inv_odd(odd, n));
            debug_assert_eq!(pivot.0[col], 1 << v);
            // Annihilator: 2^{m-v}·pivot zeroes the pivot entry but may carry
            // information in later columns.
            if v > 0 {
                let ann = scale(&pivot, 1 << (m - v));
                work.push(ann);
            }
            // Eliminate col from every other row. Work rows reduce to zero
            // exactly (the pivot has minimal valuation among them); finished
            // rows reduce modulo the pivot value 2^v.
            for r in work.iter_mut() {
                let e = r.0[col];
                if e != 0 {
                    debug_assert!(valuation(e, m) >= v);
                    sub_scaled(r, &pivot, e >> v);
                    debug_assert_eq!(r.0[col], 0);
                }
            }
            for r in finished.iter_mut() {
                let e = r.0[col];
                if e != 0 {
                    sub_scaled(r, &pivot, e >> v);
                }
            }
            finished.push(pivot);
        }
        let mut kernel = Vec::new();
        for r in work {
            debug_assert!(r.0.iter().all(|&x| x == 0));
            if r.1.iter().any(|&x| x != 0) {
                kernel.push(r.1);
            }
        }
        let reduced = finished.iter().map(|r| r.0.clone()).collect();
        let combos = finished.iter().map(|r| r.1.clone()).collect();
        (reduced, combos, kernel)
    }

    /// Generators of the left kernel `{c : c · M = 0 mod N}`.
    pub fn left_kernel(&self) -> Vec<Vec<u32>> {
        let (_, _, kernel) = self.howell_tracked();
        kernel
    }

    /// Solve `c · M = b` for a row-combination vector `c`.
    pub fn solve_row_combination(&self, b: &[u32]) -> Option<Vec<u32>> {
        let n = self.modulus;
        let m = n.trailing_zeros();
        debug_assert_eq!(b.len(), self.cols);
        let (reduced, combos, _) = self.howell_tracked();
        let mut residual: Vec<u32> = b.to_vec();
        let k = self.rows.len();
        let mut combo = vec![0u32; k];
        for (row, rc) in reduced.iter().zip(&combos) {
            let Some(col) = row.iter().position(|&x| x != 0) else {
                continue;
            };
            let p = row[col];
            debug_assert_eq!(p, 1 << valuation(p, m));
            let e = residual[col];
            if e == 0 {
                continue;
            }
            if valuation(e, m) < valuation(p, m) {
                return None;
            }
            let f = e >> valuation(p, m);
            for (d, s) in residual.iter_mut().zip(row) {
                *d = (*d + (n - (s * f) % n) % n) % n;
            }
            for (d, s) in combo.iter_mut().zip(rc) {
                *d = (*d + (s * f) % n) % n;
            }
        }
        if residual.iter().all(|&x| x == 0) {
            Some(combo)
        } else {
            None
        }
    }
}
