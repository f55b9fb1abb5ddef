//! Phase-tracked n-qubit Pauli operators in symplectic (X|Z) representation.
//!
//! An operator is stored as `i^phase · Π_q X_q^{x_q} Z_q^{z_q}` with
//! `phase ∈ Z_4`. The convention `Y = i·XZ` makes the group closed under
//! multiplication and Clifford conjugation without leaving integer arithmetic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of 64-bit words needed for `n` bits.
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A dense bit vector used for the X and Z parts of a Pauli operator and for
/// GF(2) linear algebra rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVec {
    pub(crate) words: Vec<u64>,
    pub(crate) len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; words_for(len)], len }
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

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the AND of two bit vectors (the GF(2) inner product).
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// Popcount of the AND of two bit vectors.
    pub fn and_count(&self, other: &BitVec) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut b = BitVec::zeros(len);
        for &i in idx {
            b.set(i, true);
        }
        b
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cannot parse Pauli string {0:?}: {1}")]
    Parse(String, String),
}

/// An n-qubit Pauli operator `i^phase · Π_q X_q^{x_q} Z_q^{z_q}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    pub n: usize,
    pub x: BitVec,
    pub z: BitVec,
    /// Exponent of the global phase `i^phase`, reduced mod 4.
    pub phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { n, x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    /// Single X on qubit `q` of an n-qubit identity.
    pub fn single_x(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.x.set(q, true);
        p
    }

    /// Single Z on qubit `q` of an n-qubit identity.
    pub fn single_z(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.z.set(q, true);
        p
    }

    /// Single Y (= iXZ) on qubit `q` of an n-qubit identity.
    pub fn single_y(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.x.set(q, true);
        p.z.set(q, true);
        p.phase = 1;
        p
    }

    /// Number of qubits with a non-identity factor.
    pub fn weight(&self) -> usize {
        let mut acc = 0usize;
        for (a, b) in self.x.words.iter().zip(&self.z.words) {
            acc += (a | b).count_ones() as usize;
        }
        acc
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.is_identity_up_to_phase() && self.phase == 0
    }

    /// True iff the two operators commute (symplectic product is 0).
    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        debug_assert_eq!(self.n, other.n);
        !(self.x.dot(&other.z) ^ self.z.dot(&other.x))
    }

    /// Exact product with i-power phase tracking.
    ///
    /// `(i^p X^a Z^b)(i^q X^c Z^d) = i^{p+q} (−1)^{b·c} X^{a⊕c} Z^{b⊕d}`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator, PauliError> {
        if self.n != other.n {
            return Err(PauliError::LengthMismatch(self.n, other.n));
        }
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        let swaps = self.z.and_count(&other.x);
        let phase = (self.phase as usize + other.phase as usize + 2 * swaps) % 4;
        Ok(PauliOperator { n: self.n, x, z, phase: phase as u8 })
    }

    /// In-place right multiplication, panicking on length mismatch.
    pub fn mul_assign(&mut self, other: &PauliOperator) {
        *self = self.multiply(other).expect("length mismatch");
    }

    /// The Hermitian adjoint (inverse, for Pauli operators up to phase).
    pub fn adjoint(&self) -> PauliOperator {
        // (i^p X^a Z^b)† = i^{-p} Z^b X^a = i^{-p} (−1)^{a·b} X^a Z^b.
        let swaps = self.x.and_count(&self.z);
        let phase = ((4 - self.phase as usize) + 2 * swaps) % 4;
        PauliOperator { n: self.n, x: self.x.clone(), z: self.z.clone(), phase: phase as u8 }
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conjugate_entrywise(&self) -> PauliOperator {
        // X and Z have real matrices; only the i^phase prefactor conjugates.
        let mut p = self.clone();
        p.phase = (4 - p.phase) % 4;
        p
    }

    /// Multiply the stored phase by `(−1)`.
    pub fn negated(&self) -> PauliOperator {
        let mut p = self.clone();
        p.phase = (p.phase + 2) % 4;
        p
    }

    /// True iff the operator is Hermitian (eigenvalues ±1).
    pub fn is_hermitian(&self) -> bool {
        let y_count = self.x.and_count(&self.z);
        (self.phase as usize + 3 * y_count) % 2 == 0
    }

    /// Number of qubits carrying a Y factor (x and z both set).
    pub fn y_count(&self) -> usize {
        self.x.and_count(&self.z)
    }

    /// The displayed sign exponent: the operator equals `i^k · (letterwise
    /// tensor product with Y as a letter)` with `k` returned here.
    pub fn sign_exponent(&self) -> u8 {
        (((self.phase as usize) + 4 - self.y_count() % 4) % 4) as u8
    }

    /// Tensor product `self ⊗ other` (self on the low-index qubits).
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        let n = self.n + other.n;
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for i in 0..self.n {
            x.set(i, self.x.get(i));
            z.set(i, self.z.get(i));
        }
        for i in 0..other.n {
            x.set(self.n + i, other.x.get(i));
            z.set(self.n + i, other.z.get(i));
        }
        PauliOperator { n, x, z, phase: (self.phase + other.phase) % 4 }
    }

    /// Restrict to the given qubits (in the given order).
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        let n = qubits.len();
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (i, &q) in qubits.iter().enumerate() {
            x.set(i, self.x.get(q));
            z.set(i, self.z.get(q));
        }
        PauliOperator { n, x, z, phase: 0 }
    }

    /// Embed into a larger register at the given qubit positions.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> PauliOperator {
        assert_eq!(self.n, qubits.len());
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (i, &q) in qubits.iter().enumerate() {
            x.set(q, self.x.get(i));
            z.set(q, self.z.get(i));
        }
        PauliOperator { n, x, z, phase: self.phase }
    }

    /// The support (qubits with non-identity factor).
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x.get(q) || self.z.get(q)).collect()
    }

    /// Letter at qubit `q`: 'I', 'X', 'Y' or 'Z'.
    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign_exponent() {
            0 => write!(f, "+")?,
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i")?,
            _ => unreachable!(),
        }
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Parse the textual format: optional sign prefix (`+`, `-`, `+i`, `-i`)
    /// followed by one `{I,X,Y,Z}` letter per qubit.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let orig = s;
        let s = s.trim();
        let (sign_exp, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3u8, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0u8, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2u8, r)
        } else {
            (0u8, s)
        };
        let n = rest.chars().count();
        if n == 0 {
            return Err(PauliError::Parse(orig.to_string(), "empty letter string".into()));
        }
        let mut p = PauliOperator::identity(n);
        let mut y_count = 0usize;
        for (i, c) in rest.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.x.set(i, true),
                'Z' => p.z.set(i, true),
                'Y' => {
                    p.x.set(i, true);
                    p.z.set(i, true);
                    y_count += 1;
                }
                other => {
                    return Err(PauliError::Parse(
                        orig.to_string(),
                        format!("invalid letter {other:?} at position {i}"),
                    ))
                }
            }
        }
        p.phase = ((sign_exp as usize + y_count) % 4) as u8;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn identity_multiplication() {
        for s in ["+X", "+Y", "+Z", "-iY", "+I"] {
            let a = p(s);
            let id = PauliOperator::identity(1);
            assert_eq!(id.multiply(&a).unwrap(), a);
            assert_eq!(a.multiply(&id).unwrap(), a);
        }
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let prod = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(prod.to_string(), "-iY");
        assert_eq!(prod.sign_exponent(), 3);
        assert_eq!(prod, p("-iY"));
    }

    #[test]
    fn single_qubit_table() {
        // Full 1-qubit multiplication table against the standard relations.
        let cases = [
            ("X", "Y", "+iZ"),
            ("Y", "X", "-iZ"),
            ("Y", "Z", "+iX"),
            ("Z", "Y", "-iX"),
            ("Z", "X", "+iY"),
            ("X", "Z", "-iY"),
            ("X", "X", "+I"),
            ("Y", "Y", "+I"),
            ("Z", "Z", "+I"),
        ];
        for (a, b, c) in cases {
            assert_eq!(p(a).multiply(&p(b)).unwrap(), p(c), "{a}·{b}");
        }
    }

    #[test]
    fn associativity_exhaustive_two_qubits() {
        let letters = ["I", "X", "Y", "Z"];
        let mut ops = Vec::new();
        for a in letters {
            for b in letters {
                ops.push(p(&format!("{a}{b}")));
            }
        }
        for a in &ops {
            for b in &ops {
                let ab = a.multiply(b).unwrap();
                let ba = b.multiply(a).unwrap();
                let sign = if a.commutes_with(b) { 0 } else { 2 };
                let mut ba_adj = ba.clone();
                ba_adj.phase = (ba_adj.phase + sign) % 4;
                assert_eq!(ab, ba_adj, "commutation relation {a} {b}");
                for c in &ops {
                    let left = ab.multiply(c).unwrap();
                    let right = a.multiply(&b.multiply(c).unwrap()).unwrap();
                    assert_eq!(left, right, "associativity {a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn adjoint_is_inverse() {
        for s in ["+X", "-iY", "+iZ", "-XYZI", "+iYYXZ"] {
            let a = p(s);
            let prod = a.multiply(&a.adjoint()).unwrap();
            assert!(prod.is_identity(), "{s}: {prod}");
        }
    }

    #[test]
    fn display_parse_round_trip() {
        for s in ["+XYZ", "-IZZX", "+iYIIX", "-iZZZZZ", "+IIIII"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn hermitian_detection() {
        assert!(p("+X").is_hermitian());
        assert!(p("-Y").is_hermitian());
        assert!(p("+YY").is_hermitian());
        assert!(!p("+iX").is_hermitian());
        // i·XZ stored directly: this is +Y, Hermitian.
        assert!(PauliOperator::single_y(1, 0).is_hermitian());
    }

    #[test]
    fn weight_and_support() {
        let a = p("+XIYZI");
        assert_eq!(a.weight(), 3);
        assert_eq!(a.support(), vec![0, 2, 3]);
    }

    #[test]
    fn tensor_and_restrict() {
        let a = p("+XY");
        let b = p("-Z");
        let t = a.tensor(&b);
        assert_eq!(t.to_string(), "-XYZ");
        let r = t.restrict(&[0, 2]);
        assert_eq!(r.letter(0), 'X');
        assert_eq!(r.letter(1), 'Z');
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<PauliOperator>().is_err());
        assert!("+".parse::<PauliOperator>().is_err());
        assert!("XQZ".parse::<PauliOperator>().is_err());
    }
}
