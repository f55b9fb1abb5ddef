//! Dense statevector and matrix oracles for cross-checking the symbolic
//! machinery on small systems. Everything here is deliberately simple and
//! independent of the symbolic code paths it validates.

use num_complex::Complex64;

use crate::clifford::CliffordGate;
use crate::pauli::PauliOperator;
use crate::tableau::StabilizerTableau;

pub const TOL: f64 = 1e-10;

/// `i^k` as an exact complex unit.
pub fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Apply a Pauli operator to a dense state over `2^n` amplitudes.
///
/// Basis convention: qubit 0 is the most significant bit of the index.
pub fn apply_pauli(p: &PauliOperator, state: &[Complex64]) -> Vec<Complex64> {
    let n = p.n;
    assert_eq!(state.len(), 1 << n);
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        if p.x.get(q) {
            x_mask |= bit;
        }
        if p.z.get(q) {
            z_mask |= bit;
        }
    }
    let phase = i_pow(p.phase);
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (b, &amp) in state.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        // (i^p X^x Z^z)|b> = i^p (-1)^{z·b} |b ^ x>.
        let sign = if (b & z_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ x_mask] += amp * phase * sign;
    }
    out
}

/// The dense statevector stabilized by a pure tableau, computed by applying
/// the projector `Π (1+g)/2` to basis states until a nonzero result appears.
pub fn statevector(t: &StabilizerTableau) -> Vec<Complex64> {
    assert!(t.is_pure(), "statevector needs a pure (full-rank) tableau");
    let dim = 1usize << t.n;
    for seed in 0..dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[seed] = Complex64::new(1.0, 0.0);
        for g in &t.generators {
            let gv = apply_pauli(g, &v);
            for (a, b) in v.iter_mut().zip(gv) {
                *a = (*a + b) * 0.5;
            }
        }
        let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if norm2 > TOL {
            let norm = norm2.sqrt();
            for a in &mut v {
                *a /= norm;
            }
            return v;
        }
    }
    unreachable!("a valid stabilizer tableau has a nonzero projector");
}

/// Apply a diagonal gate `|x⟩ ↦ exp(2πi f(x)/N)|x⟩` given a per-basis-state
/// evaluator of `f` over `Z_N`.
pub fn apply_diagonal<F: Fn(usize) -> u32>(
    n: usize,
    modulus: u32,
    f: F,
    state: &[Complex64],
) -> Vec<Complex64> {
    assert_eq!(state.len(), 1 << n);
    state
        .iter()
        .enumerate()
        .map(|(b, &amp)| {
            let angle = 2.0 * std::f64::consts::PI * f(b) as f64 / modulus as f64;
            amp * Complex64::from_polar(1.0, angle)
        })
        .collect()
}

/// Inner product `⟨a|b⟩`.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// True iff `a` and `b` are equal up to a global phase (both assumed
/// normalized).
pub fn equal_up_to_phase(a: &[Complex64], b: &[Complex64]) -> bool {
    (overlap(a, b).norm() - 1.0).abs() < 1e-8
}

/// A dense unitary as a row-major matrix.
pub type DenseMatrix = Vec<Vec<Complex64>>;

pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_dagger(a: &DenseMatrix) -> DenseMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

/// Dense matrix of a Pauli operator.
pub fn pauli_matrix(p: &PauliOperator) -> DenseMatrix {
    let dim = 1usize << p.n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for b in 0..dim {
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        col[b] = Complex64::new(1.0, 0.0);
        let out = apply_pauli(p, &col);
        for (r, v) in out.into_iter().enumerate() {
            m[r][b] = v;
        }
    }
    m
}

/// Recover the symplectic tableau of a dense Clifford unitary by conjugating
/// every basis Pauli and pattern-matching the result to a phased Pauli.
/// Panics if the matrix is not Clifford.
pub fn matrix_to_clifford(u: &DenseMatrix, m: usize) -> CliffordGate {
    let dim = 1usize << m;
    assert_eq!(u.len(), dim);
    let udg = mat_dagger(u);
    let image = |p: &PauliOperator| -> PauliOperator {
        let conj = mat_mul(u, &mat_mul(&pauli_matrix(p), &udg));
        // Identify x-mask from the nonzero row in column 0.
        let x_row = (0..dim)
            .find(|&r| conj[r][0].norm() > 1e-8)
            .expect("unitary conjugate is nonzero");
        let alpha = conj[x_row][0];
        let mut out = PauliOperator::identity(m);
        for q in 0..m {
            let bit = 1usize << (m - 1 - q);
            if x_row & bit != 0 {
                out.x.set(q, true);
            }
        }
        // z-mask from sign flips of entries (x_row ^ b, b) for b = e_q.
        for q in 0..m {
            let b = 1usize << (m - 1 - q);
            let entry = conj[x_row ^ b][b];
            let ratio = entry / alpha;
            if (ratio.re + 1.0).abs() < 1e-8 {
                out.z.set(q, true);
            } else {
                assert!((ratio.re - 1.0).abs() < 1e-8, "not a Pauli conjugate");
            }
        }
        // Phase from alpha = i^phase · 1 (column 0 has z-sign +1).
        let phase = (0..4)
            .find(|&k| (alpha - i_pow(k)).norm() < 1e-8)
            .expect("Pauli phase must be a power of i");
        out.phase = phase;
        // Verify the full matrix matches.
        let check = pauli_matrix(&out);
        for r in 0..dim {
            for c in 0..dim {
                assert!(
                    (check[r][c] - conj[r][c]).norm() < 1e-8,
                    "conjugate is not the identified Pauli"
                );
            }
        }
        out
    };
    let x_images = (0..m).map(|q| image(&PauliOperator::single_x(m, q))).collect();
    let z_images = (0..m).map(|q| image(&PauliOperator::single_z(m, q))).collect();
    CliffordGate::from_images(x_images, z_images).expect("matrix is Clifford")
}

/// The 3-qubit Clifford gate `K₃` (a non-bitwise transversal gate of the
/// five-qubit code), as a dense matrix with entries in `{0, ±1/2, ±i/2}`.
pub fn k3_matrix() -> DenseMatrix {
    let o = Complex64::new(0.0, 0.0);
    let p = Complex64::new(0.5, 0.0);
    let n = Complex64::new(-0.5, 0.0);
    let i = Complex64::new(0.0, 0.5);
    let ni = Complex64::new(0.0, -0.5);
    vec![
        vec![p, o, i, o, i, o, p, o],
        vec![o, n, o, i, o, i, o, n],
        vec![o, i, o, p, o, n, o, ni],
        vec![i, o, n, o, p, o, ni, o],
        vec![o, i, o, n, o, p, o, ni],
        vec![i, o, p, o, n, o, ni, o],
        vec![n, o, i, o, i, o, n, o],
        vec![o, p, o, i, o, i, o, p],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::ghz_state_generators;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn pauli_application_matches_matrices() {
        // X·Z = -iY on dense matrices.
        let x = pauli_matrix(&p("X"));
        let z = pauli_matrix(&p("Z"));
        let prod = mat_mul(&x, &z);
        let expect = pauli_matrix(&p("-iY"));
        for r in 0..2 {
            for c in 0..2 {
                assert!((prod[r][c] - expect[r][c]).norm() < TOL);
            }
        }
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let a = p("+XZ");
        let b = p("+ZX");
        let symbolic = a.multiply(&b).unwrap();
        let dense = mat_mul(&pauli_matrix(&a), &pauli_matrix(&b));
        let expect = pauli_matrix(&symbolic);
        for r in 0..4 {
            for c in 0..4 {
                assert!((dense[r][c] - expect[r][c]).norm() < TOL);
            }
        }
    }

    #[test]
    fn ghz_statevector() {
        let t = StabilizerTableau::new(3, ghz_state_generators(3)).unwrap();
        let v = statevector(&t);
        let s = 1.0 / 2.0f64.sqrt();
        assert!((v[0].norm() - s).abs() < TOL);
        assert!((v[7].norm() - s).abs() < TOL);
        for b in 1..7 {
            assert!(v[b].norm() < TOL);
        }
        assert!((v[0] / v[7] - Complex64::new(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn statevector_respects_stabilizers() {
        let t = StabilizerTableau::new(
            2,
            vec![p("XX"), p("-YY")],
        )
        .unwrap();
        let v = statevector(&t);
        for g in &t.generators {
            let gv = apply_pauli(g, &v);
            for (a, b) in v.iter().zip(gv) {
                assert!((a - b).norm() < TOL);
            }
        }
    }

    #[test]
    fn k3_is_unitary_and_clifford() {
        let k3 = k3_matrix();
        let prod = mat_mul(&k3, &mat_dagger(&k3));
        for r in 0..8 {
            for c in 0..8 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((prod[r][c] - Complex64::new(expect, 0.0)).norm() < TOL, "not unitary");
            }
        }
        let gate = matrix_to_clifford(&k3, 3);
        assert!(gate.is_symplectic());
    }

    #[test]
    fn k3_conjugation_matches_dense_oracle() {
        let gate = matrix_to_clifford(&k3_matrix(), 3);
        // Symbolic conjugation of XII must equal the dense-derived image.
        let img = gate.conjugate(&p("XII")).unwrap();
        assert_eq!(img, gate.x_images[0]);
        // And conjugation distributes over products as in the dense world.
        let a = p("XZI");
        let dense_img = {
            let k3 = k3_matrix();
            let conj = mat_mul(&k3, &mat_mul(&pauli_matrix(&a), &mat_dagger(&k3)));
            conj
        };
        let sym_img = pauli_matrix(&gate.conjugate(&a).unwrap());
        for r in 0..8 {
            for c in 0..8 {
                assert!((dense_img[r][c] - sym_img[r][c]).norm() < TOL);
            }
        }
    }

    #[test]
    fn k3_entrywise_conjugate_is_yyy_conjugation() {
        // (Y⊗Y⊗Y) K₃ (Y⊗Y⊗Y) == K₃* as dense matrices.
        let k3 = k3_matrix();
        let yyy = pauli_matrix(&p("YYY"));
        let lhs = mat_mul(&yyy, &mat_mul(&k3, &yyy));
        let rhs: DenseMatrix = k3
            .iter()
            .map(|row| row.iter().map(|e| e.conj()).collect())
            .collect();
        for r in 0..8 {
            for c in 0..8 {
                assert!((lhs[r][c] - rhs[r][c]).norm() < TOL, "K3* mismatch at {r},{c}");
            }
        }
        // And the same identity at tableau level.
        let gate = matrix_to_clifford(&k3, 3);
        let conj_gate = matrix_to_clifford(&rhs, 3);
        assert_eq!(gate.entrywise_conjugate(), conj_gate);
    }

    #[test]
    fn matrix_to_clifford_on_named_gates() {
        // Dense CZ reconstruction agrees with the named tableau.
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let cz = vec![
            vec![one, o, o, o],
            vec![o, one, o, o],
            vec![o, o, one, o],
            vec![o, o, o, -one],
        ];
        assert_eq!(matrix_to_clifford(&cz, 2), CliffordGate::named("CZ").unwrap());
    }
}
