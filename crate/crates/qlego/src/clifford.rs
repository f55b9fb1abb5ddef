//! Clifford unitaries as symplectic tableaux: the images of the X and Z
//! basis Paulis under conjugation, with exact i-power phase tracking.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::Gf2Matrix;
use crate::pauli::{BitVec, PauliOperator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffordError {
    #[error("qubit count mismatch: gate on {0}, operand on {1}")]
    LengthMismatch(usize, usize),
    #[error("images do not satisfy the symplectic condition")]
    NotSymplectic,
    #[error("unknown gate name {0:?}")]
    UnknownGate(String),
}

/// An m-qubit Clifford unitary, stored as the conjugation images
/// `x_images[i] = C X_i C†` and `z_images[i] = C Z_i C†`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordGate {
    pub m: usize,
    pub x_images: Vec<PauliOperator>,
    pub z_images: Vec<PauliOperator>,
}

impl CliffordGate {
    pub fn identity(m: usize) -> Self {
        CliffordGate {
            m,
            x_images: (0..m).map(|q| PauliOperator::single_x(m, q)).collect(),
            z_images: (0..m).map(|q| PauliOperator::single_z(m, q)).collect(),
        }
    }

    /// Build from explicit images, checking the symplectic condition.
    pub fn from_images(
        x_images: Vec<PauliOperator>,
        z_images: Vec<PauliOperator>,
    ) -> Result<Self, CliffordError> {
        let m = x_images.len();
        if z_images.len() != m || x_images.iter().chain(&z_images).any(|p| p.n != m) {
            return Err(CliffordError::LengthMismatch(m, z_images.len()));
        }
        let g = CliffordGate { m, x_images, z_images };
        if !g.is_symplectic() {
            return Err(CliffordError::NotSymplectic);
        }
        Ok(g)
    }

    /// Check that the images preserve all commutation relations and are
    /// Hermitian (so conjugation is well defined and invertible).
    pub fn is_symplectic(&self) -> bool {
        let imgs: Vec<&PauliOperator> = self.x_images.iter().chain(&self.z_images).collect();
        if imgs.iter().any(|p| !p.is_hermitian()) {
            return false;
        }
        // X_i vs X_j and Z_i vs Z_j must commute; X_i vs Z_j must
        // anticommute iff i == j.
        for i in 0..self.m {
            for j in 0..self.m {
                if !self.x_images[i].commutes_with(&self.x_images[j]) {
                    return false;
                }
                if !self.z_images[i].commutes_with(&self.z_images[j]) {
                    return false;
                }
                let anti = !self.x_images[i].commutes_with(&self.z_images[j]);
                if anti != (i == j) {
                    return false;
                }
            }
        }
        // Full rank follows from the commutation relations (the symplectic
        // form is nondegenerate), no separate check needed.
        true
    }

    /// Conjugate a Pauli: returns `C p C†`.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator, CliffordError> {
        if p.n != self.m {
            return Err(CliffordError::LengthMismatch(self.m, p.n));
        }
        // p = i^phase · (Π_i X_i^{x_i}) (Π_i Z_i^{z_i}); conjugate factorwise.
        let mut out = PauliOperator::identity(self.m);
        out.phase = p.phase;
        for i in 0..self.m {
            if p.x.get(i) {
                out.mul_assign(&self.x_images[i]);
            }
        }
        for i in 0..self.m {
            if p.z.get(i) {
                out.mul_assign(&self.z_images[i]);
            }
        }
        Ok(out)
    }

    /// Composition `self ∘ other` (apply `other` first, then `self`).
    pub fn compose(&self, other: &CliffordGate) -> Result<CliffordGate, CliffordError> {
        if self.m != other.m {
            return Err(CliffordError::LengthMismatch(self.m, other.m));
        }
        let x_images = other
            .x_images
            .iter()
            .map(|p| self.conjugate(p))
            .collect::<Result<Vec<_>, _>>()?;
        let z_images = other
            .z_images
            .iter()
            .map(|p| self.conjugate(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CliffordGate { m: self.m, x_images, z_images })
    }

    /// The inverse gate `C†` (as a conjugation action).
    pub fn inverse(&self) -> CliffordGate {
        // Solve for each basis Pauli's preimage over GF(2), then fix signs.
        let m = self.m;
        let mut rows = Vec::with_capacity(2 * m);
        for img in self.x_images.iter().chain(&self.z_images) {
            let mut row = BitVec::zeros(2 * m);
            for q in 0..m {
                if img.x.get(q) {
                    row.set(q, true);
                }
                if img.z.get(q) {
                    row.set(m + q, true);
                }
            }
            rows.push(row);
        }
        let mat = Gf2Matrix::from_rows(rows, 2 * m);
        let preimage = |target: &PauliOperator| -> PauliOperator {
            let mut b = BitVec::zeros(2 * m);
            for q in 0..m {
                if target.x.get(q) {
                    b.set(q, true);
                }
                if target.z.get(q) {
                    b.set(m + q, true);
                }
            }
            let combo = mat
                .solve_row_combination(&b)
                .expect("symplectic tableau is invertible");
            let mut q0 = PauliOperator::identity(m);
            for i in combo.iter_ones() {
                if i < m {
                    q0.x.set(i, true);
                } else {
                    q0.z.set(i - m, true);
                }
            }
            // Seed a Hermitian phase (Y = iXZ), then fix the sign so that
            // conjugate(q0) == target exactly.
            q0.phase = (q0.y_count() % 4) as u8;
            let image = self.conjugate(&q0).unwrap();
            debug_assert_eq!(image.x, target.x);
            debug_assert_eq!(image.z, target.z);
            let delta = (target.phase as usize + 4 - image.phase as usize) % 4;
            debug_assert!(delta % 2 == 0, "phase mismatch must be ±1");
            q0.phase = ((q0.phase as usize + delta) % 4) as u8;
            q0
        };
        let x_images = (0..m).map(|q| preimage(&PauliOperator::single_x(m, q))).collect();
        let z_images = (0..m).map(|q| preimage(&PauliOperator::single_z(m, q))).collect();
        CliffordGate { m, x_images, z_images }
    }

    /// Entrywise complex conjugate `C*`: for the real basis Paulis X and Z
    /// the image phases conjugate, so every image's i-power negates.
    pub fn entrywise_conjugate(&self) -> CliffordGate {
        let flip = |p: &PauliOperator| p.conjugate_entrywise();
        CliffordGate {
            m: self.m,
            x_images: self.x_images.iter().map(flip).collect(),
            z_images: self.z_images.iter().map(flip).collect(),
        }
    }

    /// Tensor product with another gate (self on low-index qubits).
    pub fn tensor(&self, other: &CliffordGate) -> CliffordGate {
        let m = self.m + other.m;
        let id_hi = PauliOperator::identity(other.m);
        let id_lo = PauliOperator::identity(self.m);
        let mut x_images: Vec<PauliOperator> =
            self.x_images.iter().map(|p| p.tensor(&id_hi)).collect();
        x_images.extend(other.x_images.iter().map(|p| id_lo.tensor(p)));
        let mut z_images: Vec<PauliOperator> =
            self.z_images.iter().map(|p| p.tensor(&id_hi)).collect();
        z_images.extend(other.z_images.iter().map(|p| id_lo.tensor(p)));
        CliffordGate { m, x_images, z_images }
    }

    /// Embed this gate into a larger register at the given qubit positions.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> CliffordGate {
        assert_eq!(self.m, qubits.len());
        let mut out = CliffordGate::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            out.x_images[q] = self.x_images[i].embed(n, qubits);
            out.z_images[q] = self.z_images[i].embed(n, qubits);
        }
        out
    }

    /// Named single- and two-qubit gates used as edge deformations.
    pub fn named(name: &str) -> Result<CliffordGate, CliffordError> {
        let p = |s: &str| s.parse::<PauliOperator>().unwrap();
        let from = |xi: &[&str], zi: &[&str]| {
            CliffordGate::from_images(
                xi.iter().map(|s| p(s)).collect(),
                zi.iter().map(|s| p(s)).collect(),
            )
            .expect("valid named gate")
        };
        Ok(match name {
            "I" => CliffordGate::identity(1),
            "X" => from(&["+X"], &["-Z"]),
            "Y" => from(&["-X"], &["-Z"]),
            "Z" => from(&["-X"], &["+Z"]),
            "H" => from(&["+Z"], &["+X"]),
            "S" => from(&["+Y"], &["+Z"]),
            "SD" | "Sdg" => from(&["-Y"], &["+Z"]),
            // SH means "apply H, then S".
            "SH" => from(&["+Z"], &["+Y"]),
            // HS: apply S, then H.
            "HS" => from(&["-Y"], &["+X"]),
            "CX" | "CNOT" => from(&["+XX", "+IX"], &["+ZI", "+ZZ"]),
            "CZ" => from(&["+XZ", "+ZX"], &["+ZI", "+IZ"]),
            "SWAP" => from(&["+IX", "+XI"], &["+IZ", "+ZI"]),
            other => return Err(CliffordError::UnknownGate(other.to_string())),
        })
    }
}

impl fmt::Debug for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Clifford on {} qubits:", self.m)?;
        for q in 0..self.m {
            writeln!(f, "  X{q} -> {}", self.x_images[q])?;
            writeln!(f, "  Z{q} -> {}", self.z_images[q])?;
        }
        Ok(())
    }
}
