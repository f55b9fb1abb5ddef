//! Stabilizer tableaux: commuting, independent Pauli generator lists with a
//! deterministic canonical form, group membership with exact sign reporting,
//! symbolic measurement with post-selection, and projection of leg subsets
//! onto stabilizer edge states (the primitive behind all tensor traces).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::CliffordGate;
use crate::gf2::Gf2Matrix;
use crate::pauli::{BitVec, PauliOperator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("generators {0} and {1} anticommute")]
    Anticommuting(usize, usize),
    #[error("generator {0} is dependent on earlier generators")]
    Dependent(usize),
    #[error("generator {0} is -identity (or ±i·identity)")]
    MinusIdentity(usize),
    #[error("generator {0} is not Hermitian")]
    NotHermitian(usize),
    #[error("projection onto an orthogonal state: measured operator's negation is a stabilizer")]
    NormZero,
    #[error("cannot clean projected legs: residual support after edge-state reduction")]
    ResidualSupport,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Result of [`StabilizerTableau::group_member`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// The operator is a group element with exactly matching phase.
    SignConsistent,
    /// The operator times −1 is a group element.
    SignFlipped,
    /// Not proportional to any group element.
    No,
}

/// A stabilizer tableau: `rank` commuting independent Hermitian Pauli
/// generators on `n` qubits.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerTableau {
    pub n: usize,
    pub generators: Vec<PauliOperator>,
}

impl std::fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "StabilizerTableau on {} qubits:", self.n)?;
        for g in &self.generators {
            writeln!(f, "  {g}")?;
        }
        Ok(())
    }
}

impl StabilizerTableau {
    /// Build and validate a tableau.
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self, TableauError> {
        for (i, g) in generators.iter().enumerate() {
            if g.n != n {
                return Err(TableauError::LengthMismatch(n, g.n));
            }
            if !g.is_hermitian() {
                return Err(TableauError::NotHermitian(i));
            }
            if g.is_identity_up_to_phase() && !g.is_identity() {
                return Err(TableauError::MinusIdentity(i));
            }
            for (j, h) in generators.iter().enumerate().take(i) {
                if !g.commutes_with(h) {
                    return Err(TableauError::Anticommuting(j, i));
                }
            }
        }
        let t = StabilizerTableau { n, generators };
        // Independence: symplectic rank must equal generator count.
        let mat = t.symplectic_matrix();
        if mat.rank() != t.generators.len() {
            // Identify one offending index for the error message.
            for i in 0..t.generators.len() {
                let sub = Gf2Matrix::from_rows(
                    t.generators[..=i].iter().map(|g| t.row_of(g)).collect(),
                    2 * n,
                );
                if sub.rank() != i + 1 {
                    return Err(TableauError::Dependent(i));
                }
            }
        }
        Ok(t)
    }

    /// Parse a tableau file: one Pauli per line, `#` comments, blank lines ok.
    pub fn parse(n_hint: Option<usize>, text: &str) -> Result<Self, TableauError> {
        let mut gens = Vec::new();
        let mut n = n_hint;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let p: PauliOperator = line.parse().map_err(|e| TableauError::Parse {
                line: lineno + 1,
                msg: format!("{e}"),
            })?;
            if let Some(expect) = n {
                if p.n != expect {
                    return Err(TableauError::Parse {
                        line: lineno + 1,
                        msg: format!("expected {expect} qubits, got {}", p.n),
                    });
                }
            } else {
                n = Some(p.n);
            }
            gens.push(p);
        }
        let n = n.ok_or(TableauError::Parse { line: 0, msg: "no generators".into() })?;
        Self::new(n, gens)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// True iff the tableau describes a pure state (rank == n).
    pub fn is_pure(&self) -> bool {
        self.rank() == self.n
    }

    fn row_of(&self, g: &PauliOperator) -> BitVec {
        // Column order: X-part of qubit q at column q, Z-part at column n+q.
        let mut row = BitVec::zeros(2 * self.n);
        for q in 0..self.n {
            if g.x.get(q) {
                row.set(q, true);
            }
            if g.z.get(q) {
                row.set(self.n + q, true);
            }
        }
        row
    }

    fn symplectic_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_rows(self.generators.iter().map(|g| self.row_of(g)).collect(), 2 * self.n)
    }

    /// Deterministic canonical form: RREF over GF(2), eliminating all X
    /// columns (qubit-ascending) before all Z columns, with phases carried by
    /// exact Pauli multiplication. The generated group is unchanged.
    pub fn canonicalize(&self) -> StabilizerTableau {
        let mut gens = self.generators.clone();
        let n = self.n;
        let col_bit = |g: &PauliOperator, col: usize| -> bool {
            if col < n {
                g.x.get(col)
            } else {
                g.z.get(col - n)
            }
        };
        let mut row = 0usize;
        for col in 0..2 * n {
            if row >= gens.len() {
                break;
            }
            let Some(pr) = (row..gens.len()).find(|&r| col_bit(&gens[r], col)) else {
                continue;
            };
            gens.swap(row, pr);
            let pivot = gens[row].clone();
            for (r, g) in gens.iter_mut().enumerate() {
                if r != row && col_bit(g, col) {
                    g.mul_assign(&pivot);
                }
            }
            row += 1;
        }
        StabilizerTableau { n, generators: gens }
    }

    /// The number of canonical rows with a nonzero X part (the log2 of the
    /// computational-basis support size for a pure state).
    pub fn x_rank(&self) -> usize {
        self.canonicalize()
            .generators
            .iter()
            .filter(|g| !g.x.is_zero())
            .count()
    }

    /// Decide membership of `p` in the generated group, with sign report.
    pub fn group_member(&self, p: &PauliOperator) -> Membership {
        debug_assert_eq!(p.n, self.n);
        let canon = self.canonicalize();
        let mut acc = PauliOperator::identity(self.n);
        let n = self.n;
        let col_bit = |g: &PauliOperator, col: usize| -> bool {
            if col < n {
                g.x.get(col)
            } else {
                g.z.get(col - n)
            }
        };
        // Canonical rows are in pivot order; reduce p top-down.
        let mut residual_x = p.x.clone();
        let mut residual_z = p.z.clone();
        for g in &canon.generators {
            // Pivot column of g: first set bit in X-then-Z order.
            let pivot = (0..2 * n).find(|&c| col_bit(g, c)).expect("no zero rows");
            let res_bit = if pivot < n { residual_x.get(pivot) } else { residual_z.get(pivot - n) };
            if res_bit {
                residual_x.xor_assign(&g.x);
                residual_z.xor_assign(&g.z);
                acc.mul_assign(g);
            }
        }
        if !residual_x.is_zero() || !residual_z.is_zero() {
            return Membership::No;
        }
        match (p.phase as usize + 4 - acc.phase as usize) % 4 {
            0 => Membership::SignConsistent,
            2 => Membership::SignFlipped,
            // Odd phase difference: p is ±i times a group element; for
            // Hermitian p and Hermitian group elements this cannot happen.
            _ => Membership::No,
        }
    }

    /// Tensor product with another tableau (self on low-index qubits).
    pub fn tensor(&self, other: &StabilizerTableau) -> StabilizerTableau {
        let n = self.n + other.n;
        let id_hi = PauliOperator::identity(other.n);
        let id_lo = PauliOperator::identity(self.n);
        let mut gens: Vec<PauliOperator> =
            self.generators.iter().map(|g| g.tensor(&id_hi)).collect();
        gens.extend(other.generators.iter().map(|g| id_lo.tensor(g)));
        StabilizerTableau { n, generators: gens }
    }

    /// Conjugate every generator by a Clifford gate acting on the listed
    /// qubits.
    pub fn apply_clifford(&self, gate: &CliffordGate, qubits: &[usize]) -> StabilizerTableau {
        let embedded = gate.embed(self.n, qubits);
        StabilizerTableau {
            n: self.n,
            generators: self
                .generators
                .iter()
                .map(|g| embedded.conjugate(g).expect("size match"))
                .collect(),
        }
    }

    /// Symbolically measure the Hermitian Pauli `m` and post-select on +1.
    ///
    /// Returns the index of the generator row that now equals `m`.
    /// Errors with [`TableauError::NormZero`] when −m is a stabilizer.
    pub fn measure_postselect(&mut self, m: &PauliOperator) -> Result<usize, TableauError> {
        self.measure_postselect_avoiding(m, &[])
    }

    /// As [`Self::measure_postselect`], but when `m` is already a group
    /// member, the generator row rewritten to `m` is chosen outside
    /// `forbidden` (needed when several commuting operators are measured in
    /// sequence and each must own a distinct row).
    pub fn measure_postselect_avoiding(
        &mut self,
        m: &PauliOperator,
        forbidden: &[usize],
    ) -> Result<usize, TableauError> {
        assert_eq!(m.n, self.n);
        assert!(m.is_hermitian());
        if let Some(first) = self.generators.iter().position(|g| !g.commutes_with(m)) {
            let anti = self.generators[first].clone();
            for (i, g) in self.generators.iter_mut().enumerate() {
                if i != first && !g.commutes_with(m) {
                    g.mul_assign(&anti);
                }
            }
            self.generators[first] = m.clone();
            Ok(first)
        } else {
            match self.group_member(m) {
                Membership::SignConsistent => {
                    // Already stabilized; rewrite one generator row that
                    // participates in m's decomposition to m itself, so the
                    // generating set is unchanged as a group.
                    let idx = self.replace_with(m, forbidden);
                    Ok(idx)
                }
                Membership::SignFlipped => Err(TableauError::NormZero),
                Membership::No => {
                    // Mixed-state tableau: the measurement adds a generator.
                    self.generators.push(m.clone());
                    Ok(self.generators.len() - 1)
                }
            }
        }
    }

    /// Replace one generator participating in the decomposition of group
    /// element `m` with `m` itself; returns its index.
    fn replace_with(&mut self, m: &PauliOperator, forbidden: &[usize]) -> usize {
        let mat = self.symplectic_matrix();
        let combo = mat
            .solve_row_combination(&self.row_of(m))
            .expect("member has a decomposition");
        let idx = combo
            .iter_ones()
            .find(|i| !forbidden.contains(i))
            .expect("m is independent of the forbidden rows");
        self.generators[idx] = m.clone();
        idx
    }

    /// Project the listed legs onto the stabilizer edge state generated by
    /// `edge_gens` (given on the leg subspace, `legs.len()` qubits, and
    /// forming a maximal stabilizer group there), then remove those legs.
    ///
    /// This is the engine for Bell fusion, Clifford-deformed fusion, and GHZ
    /// hyperedge traces.
    pub fn project_onto(
        &self,
        legs: &[usize],
        edge_gens: &[PauliOperator],
    ) -> Result<StabilizerTableau, TableauError> {
        let r = legs.len();
        assert!(edge_gens.iter().all(|g| g.n == r));
        assert_eq!(edge_gens.len(), r, "edge state must be pure on the legs");
        let mut t = self.clone();
        let mut measured_rows = Vec::with_capacity(r);
        for eg in edge_gens {
            let m = eg.embed(self.n, legs);
            let idx = t.measure_postselect_avoiding(&m, &measured_rows)?;
            measured_rows.push(idx);
        }
        debug_assert_eq!(
            measured_rows.iter().collect::<std::collections::HashSet<_>>().len(),
            r,
            "measured rows must be distinct"
        );
        // Clean every other generator's support on the traced legs using the
        // measured rows: restrictions of commuting operators lie in the span
        // of the edge generators' restrictions (a maximal isotropic set).
        let restrict_row = |g: &PauliOperator| -> BitVec {
            let mut row = BitVec::zeros(2 * r);
            for (i, &q) in legs.iter().enumerate() {
                if g.x.get(q) {
                    row.set(i, true);
                }
                if g.z.get(q) {
                    row.set(r + i, true);
                }
            }
            row
        };
        let measured_set: std::collections::HashSet<usize> = measured_rows.iter().copied().collect();
        let edge_mat = Gf2Matrix::from_rows(
            measured_rows.iter().map(|&i| restrict_row(&t.generators[i])).collect(),
            2 * r,
        );
        let mut kept = Vec::new();
        for (i, g) in t.generators.iter().enumerate() {
            if measured_set.contains(&i) {
                continue;
            }
            let mut g = g.clone();
            let res = restrict_row(&g);
            if !res.is_zero() {
                let combo = edge_mat
                    .solve_row_combination(&res)
                    .ok_or(TableauError::ResidualSupport)?;
                for j in combo.iter_ones() {
                    g.mul_assign(&t.generators[measured_rows[j]]);
                }
            }
            if !restrict_row(&g).is_zero() {
                return Err(TableauError::ResidualSupport);
            }
            kept.push(g);
        }
        // Drop the traced legs.
        let leg_set: std::collections::HashSet<usize> = legs.iter().copied().collect();
        let keep_qubits: Vec<usize> = (0..self.n).filter(|q| !leg_set.contains(q)).collect();
        let gens = kept
            .iter()
            .map(|g| {
                let mut p = g.restrict(&keep_qubits);
                p.phase = g.phase;
                p
            })
            .collect();
        Ok(StabilizerTableau { n: keep_qubits.len(), generators: gens })
    }
}

/// Stabilizers of the r-qubit GHZ state `(|0…0⟩+|1…1⟩)/√2`:
/// `X^{⊗r}` and the consecutive `Z_i Z_{i+1}`.
pub fn ghz_state_generators(r: usize) -> Vec<PauliOperator> {
    assert!(r >= 2);
    let mut gens = Vec::with_capacity(r);
    let mut all_x = PauliOperator::identity(r);
    for q in 0..r {
        all_x.x.set(q, true);
    }
    gens.push(all_x);
    for q in 0..r - 1 {
        let mut zz = PauliOperator::identity(r);
        zz.z.set(q, true);
        zz.z.set(q + 1, true);
        gens.push(zz);
    }
    gens
}

/// Stabilizers of the deformed Bell state `(I ⊗ C)|Φ⁺⟩`:
/// `X ⊗ CXC†` and `Z ⊗ CZC†`.
pub fn deformed_bell_generators(c: &CliffordGate) -> Vec<PauliOperator> {
    assert_eq!(c.m, 1);
    let x = "X".parse::<PauliOperator>().unwrap();
    let z = "Z".parse::<PauliOperator>().unwrap();
    vec![
        x.tensor(&c.conjugate(&x).unwrap()),
        z.tensor(&c.conjugate(&z).unwrap()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn t(n: usize, gens: &[&str]) -> StabilizerTableau {
        StabilizerTableau::new(n, gens.iter().map(|s| p(s)).collect()).unwrap()
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(matches!(
            StabilizerTableau::new(1, vec![p("X"), p("Z")]),
            Err(TableauError::Anticommuting(0, 1))
        ));
        assert!(matches!(
            StabilizerTableau::new(2, vec![p("XX"), p("ZZ"), p("-YY")]),
            Err(TableauError::Dependent(2))
        ));
        assert!(matches!(
            StabilizerTableau::new(1, vec![p("-I")]),
            Err(TableauError::MinusIdentity(0))
        ));
    }

    #[test]
    fn canonicalize_idempotent_and_group_preserving() {
        let a = t(2, &["XX", "ZZ"]);
        let b = t(2, &["XX", "-YY"]);
        // Same group: XX·ZZ = (XZ)(XZ)... = -YY; canonical forms must agree.
        assert_eq!(a.canonicalize().generators, b.canonicalize().generators);
        let c = a.canonicalize();
        assert_eq!(c.canonicalize().generators, c.generators);
    }

    #[test]
    fn group_member_signs() {
        let bell = t(2, &["XX", "ZZ"]);
        assert_eq!(bell.group_member(&p("XX")), Membership::SignConsistent);
        assert_eq!(bell.group_member(&p("-XX")), Membership::SignFlipped);
        assert_eq!(bell.group_member(&p("-YY")), Membership::SignConsistent);
        assert_eq!(bell.group_member(&p("YY")), Membership::SignFlipped);
        assert_eq!(bell.group_member(&p("XZ")), Membership::No);
        assert_eq!(bell.group_member(&p("II")), Membership::SignConsistent);
    }

    #[test]
    fn steane_logical_x_not_member() {
        let steane = steane_tableau();
        let xbar = p("XXXXXXX");
        // X^{⊗7} commutes with everything but is not in the 6-generator group.
        for g in &steane.generators {
            assert!(xbar.commutes_with(g));
        }
        assert_eq!(steane.group_member(&xbar), Membership::No);
    }

    fn steane_tableau() -> StabilizerTableau {
        t(
            7,
            &[
                "XXXXIII",
                "XXIIXXI",
                "XIXIXIX",
                "ZZZZIII",
                "ZZIIZZI",
                "ZIZIZIZ",
            ],
        )
    }

    #[test]
    fn measurement_anticommuting_case() {
        // Measure Z on |+⟩: X -> Z.
        let mut plus = t(1, &["X"]);
        plus.measure_postselect(&p("Z")).unwrap();
        assert_eq!(plus.generators, vec![p("Z")]);
    }

    #[test]
    fn measurement_norm_zero() {
        let mut zero = t(1, &["Z"]);
        assert!(matches!(
            zero.measure_postselect(&p("-Z")),
            Err(TableauError::NormZero)
        ));
    }

    #[test]
    fn ghz_self_trace_gives_bell() {
        // 4-qubit GHZ, trace legs 2,3 against a Bell edge -> Bell on legs 0,1.
        let ghz4 = StabilizerTableau::new(4, ghz_state_generators(4)).unwrap();
        let bell_edge = deformed_bell_generators(&CliffordGate::identity(1));
        let out = ghz4.project_onto(&[2, 3], &bell_edge).unwrap();
        assert_eq!(out.n, 2);
        let bell = t(2, &["XX", "ZZ"]);
        assert_eq!(
            out.canonicalize().generators,
            bell.canonicalize().generators
        );
    }

    #[test]
    fn parse_round_trip() {
        let text = "# Steane code X checks\nXXXXIII\nXXIIXXI # comment\n\nXIXIXIX\n";
        let parsed = StabilizerTableau::parse(None, text).unwrap();
        assert_eq!(parsed.rank(), 3);
        assert!(StabilizerTableau::parse(None, "XQX\n").is_err());
        assert!(StabilizerTableau::parse(Some(4), "XXX\n").is_err());
    }

    #[test]
    fn x_rank_examples() {
        assert_eq!(t(3, &["XXX", "ZZI", "IZZ"]).x_rank(), 1);
        assert_eq!(t(2, &["ZI", "IZ"]).x_rank(), 0);
        assert_eq!(t(2, &["XI", "IX"]).x_rank(), 2);
    }
}
