//! Lego blocks: Choi-state stabilizer tableaux with per-leg role metadata.
//!
//! The Choi state of an [[n,k]] encoding isometry lives on k+n legs with the
//! logical legs first; a logical operator L implemented by the physical
//! operator R appears as the stabilizer L*⊗R. Blocks can be dualized (legs
//! re-declared logical or physical), stacked into tensor powers with
//! thickened-leg groupings, and concatenated with a bit-flip repetition code
//! to form branch codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::Gf2Matrix;
use crate::pauli::{BitVec, PauliOperator};
use crate::tableau::{StabilizerTableau, TableauError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error("tableau error: {0}")]
    Tableau(#[from] TableauError),
    #[error("role count {0} does not match tableau qubit count {1}")]
    RoleCount(usize, usize),
    #[error("branch code seed must encode exactly one logical qubit, got k={0}")]
    SeedNotKOne(usize),
    #[error("logical operator count mismatch: need {0} X and Z representatives")]
    LogicalCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegKind {
    Logical,
    Physical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegRole {
    pub kind: LegKind,
    /// Thickened-leg grouping: legs sharing a group id form one multi-qubit
    /// leg for product-symmetry verification.
    pub group_id: Option<usize>,
}

impl LegRole {
    pub fn logical() -> Self {
        LegRole { kind: LegKind::Logical, group_id: None }
    }
    pub fn physical() -> Self {
        LegRole { kind: LegKind::Physical, group_id: None }
    }
}

/// A registered symmetry claim carried with a block and proven at catalog
/// load time. Clifford factors name gates (a trailing `*` means entrywise
/// conjugate); diagonal records carry serialized phase polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryRecord {
    /// Product of Clifford gates; with `copies > 1` each factor acts on the
    /// thickened group of the listed legs across a `copies`-fold stack.
    Clifford { copies: usize, factors: Vec<(String, Vec<usize>)> },
    /// Physical diagonal gate and the logical diagonal gate it implements,
    /// both in `diag N=...` serialization; with `copies > 1` the physical
    /// polynomial lives on the stacked block's physical legs (copy-major).
    Diagonal { copies: usize, physical: String, logical: String },
}

/// A lego block: a stabilizer tableau over its legs plus role metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegoBlock {
    pub name: String,
    pub tableau: StabilizerTableau,
    pub roles: Vec<LegRole>,
    /// Declared (n, k, d) carried as a claim; validation happens in the
    /// catalog loader and analysis module.
    pub declared_params: Option<(usize, usize, usize)>,
    /// Symmetry claims proven at catalog load time.
    #[serde(default)]
    pub registered_symmetries: Vec<SymmetryRecord>,
}

impl LegoBlock {
    pub fn new(
        name: impl Into<String>,
        tableau: StabilizerTableau,
        roles: Vec<LegRole>,
    ) -> Result<Self, BlockError> {
        if roles.len() != tableau.n {
            return Err(BlockError::RoleCount(roles.len(), tableau.n));
        }
        Ok(LegoBlock { name: name.into(), tableau, roles, declared_params: None, registered_symmetries: Vec::new() })
    }

    /// Build the Choi-state block of an [[n,k]] code from its stabilizers and
    /// logical representatives. Logical legs come first.
    pub fn from_code(
        name: impl Into<String>,
        n: usize,
        stabilizers: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self, BlockError> {
        let k = logical_x.len();
        if logical_z.len() != k {
            return Err(BlockError::LogicalCount(k));
        }
        let total = k + n;
        let mut gens = Vec::with_capacity(total);
        let id_log = PauliOperator::identity(k);
        for s in &stabilizers {
            gens.push(id_log.tensor(s));
        }
        // Logical L with representative R: the Choi stabilizer is L*⊗R.
        // X* = X and Z* = Z are real, so no conjugation is needed here.
        for (j, r) in logical_x.iter().enumerate() {
            gens.push(PauliOperator::single_x(k, j).tensor(r));
        }
        for (j, r) in logical_z.iter().enumerate() {
            gens.push(PauliOperator::single_z(k, j).tensor(r));
        }
        let tableau = StabilizerTableau::new(total, gens)?;
        let mut roles = vec![LegRole::logical(); k];
        roles.extend(std::iter::repeat(LegRole::physical()).take(n));
        Ok(LegoBlock { name: name.into(), tableau, roles, declared_params: None, registered_symmetries: Vec::new() })
    }

    pub fn n_legs(&self) -> usize {
        self.tableau.n
    }

    pub fn logical_legs(&self) -> Vec<usize> {
        (0..self.n_legs())
            .filter(|&i| self.roles[i].kind == LegKind::Logical)
            .collect()
    }

    pub fn physical_legs(&self) -> Vec<usize> {
        (0..self.n_legs())
            .filter(|&i| self.roles[i].kind == LegKind::Physical)
            .collect()
    }

    /// Derived code parameters (n, k) = (#physical legs, #logical legs).
    pub fn params_nk(&self) -> (usize, usize) {
        let k = self.logical_legs().len();
        (self.n_legs() - k, k)
    }

    /// Dimension of the "kernel": the space of stabilizer-group elements
    /// supported entirely on the logical legs. Nonzero kernel means the block
    /// is not an encoding isometry.
    pub fn kernel_dimension(&self) -> usize {
        let phys = self.physical_legs();
        let rows: Vec<BitVec> = self
            .tableau
            .generators
            .iter()
            .map(|g| {
                let mut row = BitVec::zeros(2 * phys.len());
                for (i, &q) in phys.iter().enumerate() {
                    if g.x.get(q) {
                        row.set(i, true);
                    }
                    if g.z.get(q) {
                        row.set(phys.len() + i, true);
                    }
                }
                row
            })
            .collect();
        let restricted_rank = Gf2Matrix::from_rows(rows, 2 * phys.len()).rank();
        self.tableau.rank() - restricted_rank
    }

    /// True iff no stabilizer is supported entirely on the logical legs.
    pub fn is_isometric(&self) -> bool {
        self.kernel_dimension() == 0
    }

    /// Reassign roles for the given legs; parameters re-derive automatically.
    pub fn dualize_legs(&self, legs: &[usize], new_kind: LegKind) -> LegoBlock {
        let mut out = self.clone();
        for &l in legs {
            out.roles[l].kind = new_kind;
        }
        out.declared_params = None;
        out
    }

    /// Tensor power with thickened-leg groupings: leg i of every copy shares
    /// group id i.
    pub fn stack(&self, copies: usize) -> LegoBlock {
        assert!(copies >= 1);
        let mut tableau = self.tableau.clone();
        for _ in 1..copies {
            tableau = tableau.tensor(&self.tableau);
        }
        let mut roles = Vec::with_capacity(self.n_legs() * copies);
        for _ in 0..copies {
            for (i, r) in self.roles.iter().enumerate() {
                roles.push(LegRole { kind: r.kind, group_id: Some(i) });
            }
        }
        LegoBlock {
            name: format!("{}^{copies}", self.name),
            tableau,
            roles,
            declared_params: None,
            registered_symmetries: Vec::new(),
        }
    }

    /// The physical representative of a logical Pauli: the stabilizer with the
    /// requested Pauli on the given logical leg and identity on other logical
    /// legs, restricted to the physical legs. Found by GF(2) solve over the
    /// generator combinations.
    pub fn logical_representative(&self, leg: usize, letter: char) -> Option<PauliOperator> {
        assert_eq!(self.roles[leg].kind, LegKind::Logical);
        let log = self.logical_legs();
        let total = self.n_legs();
        // Solve for a group element with prescribed X/Z bits on logical legs.
        // Unknown: generator combination; constraints: bits on logical legs.
        let rows: Vec<BitVec> = self
            .tableau
            .generators
            .iter()
            .map(|g| {
                let mut row = BitVec::zeros(2 * log.len());
                for (i, &q) in log.iter().enumerate() {
                    if g.x.get(q) {
                        row.set(i, true);
                    }
                    if g.z.get(q) {
                        row.set(log.len() + i, true);
                    }
                }
                row
            })
            .collect();
        let mat = Gf2Matrix::from_rows(rows, 2 * log.len());
        let mut target = BitVec::zeros(2 * log.len());
        let pos = log.iter().position(|&q| q == leg).unwrap();
        match letter {
            'X' => target.set(pos, true),
            'Z' => target.set(log.len() + pos, true),
            'Y' => {
                target.set(pos, true);
                target.set(log.len() + pos, true);
            }
            _ => panic!("letter must be X, Y or Z"),
        }
        let combo = mat.solve_row_combination(&target)?;
        let mut acc = PauliOperator::identity(total);
        for i in combo.iter_ones() {
            acc.mul_assign(&self.tableau.generators[i]);
        }
        Some(acc.restrict_with_phase(&self.physical_legs()))
    }

    /// The stabilizer of the Choi state whose physical restriction equals `p`
    /// (given on the physical legs), or `None` when `p` is not in the code
    /// normalizer. On an isometric block the extension is unique, and its
    /// logical-leg part is the logical Pauli implemented by `p`.
    pub fn choi_extension(&self, p: &PauliOperator) -> Option<PauliOperator> {
        let physical = self.physical_legs();
        // Solve for a combination of Choi rows whose X and Z parts match `p` on
        // the physical legs (phases follow from exact Pauli multiplication).
        let rows = &self.tableau.generators;
        let mut m = Gf2Matrix::new(2 * physical.len());
        for row in rows {
            let mut v = BitVec::zeros(2 * physical.len());
            for (i, &q) in physical.iter().enumerate() {
                v.set(i, row.x.get(q));
                v.set(physical.len() + i, row.z.get(q));
            }
            m.push_row(v);
        }
        let mut target = BitVec::zeros(2 * physical.len());
        for (i, _) in physical.iter().enumerate() {
            target.set(i, p.x.get(i));
            target.set(physical.len() + i, p.z.get(i));
        }
        let combo = m.solve_row_combination(&target)?;
        let mut acc = PauliOperator::identity(self.n_legs());
        for i in combo.iter_ones() {
            acc.mul_assign(&rows[i]);
        }
        Some(acc)
    }
}

impl PauliOperator {
    /// Restrict to the given qubits keeping the stored phase (valid when the
    /// dropped qubits carry no support).
    pub fn restrict_with_phase(&self, qubits: &[usize]) -> PauliOperator {
        let mut p = self.restrict(qubits);
        p.phase = self.phase;
        p
    }
}

/// Concatenate a length-`b` bit-flip repetition code (stabilizers
/// `Z_i Z_{i+1}`, so X-distance b and Z-distance 1) with a k=1 seed block:
/// the seed's code is placed on every branch and the repetition stabilizers
/// and logicals are encoded through it.
pub fn build_branch_code(b: usize, seed: &LegoBlock) -> Result<LegoBlock, BlockError> {
    assert!(b >= 2);
    let (n0, k0) = seed.params_nk();
    if k0 != 1 {
        return Err(BlockError::SeedNotKOne(k0));
    }
    let leg = seed.logical_legs()[0];
    let xbar = seed
        .logical_representative(leg, 'X')
        .expect("isometric seed has logical representatives");
    let zbar = seed.logical_representative(leg, 'Z').expect("logical Z exists");
    // Seed stabilizers on the physical legs alone: generators with identity
    // on the logical leg, i.e. the code stabilizer group.
    let phys = seed.physical_legs();
    let code_stabs = code_stabilizers(seed);
    let total = b * n0;
    let embed_branch = |p: &PauliOperator, branch: usize| -> PauliOperator {
        let positions: Vec<usize> = (0..n0).map(|i| branch * n0 + i).collect();
        p.embed(total, &positions)
    };
    let mut stabilizers = Vec::new();
    for branch in 0..b {
        for s in &code_stabs {
            stabilizers.push(embed_branch(s, branch));
        }
    }
    for branch in 0..b - 1 {
        // Encoded Z_i Z_{i+1} of the outer repetition code.
        let mut zz = embed_branch(&zbar, branch);
        zz.mul_assign(&embed_branch(&zbar, branch + 1));
        stabilizers.push(zz);
    }
    // Encoded outer logicals: X̄ = seed X̄ on every branch, Z̄ = seed Z̄ on
    // branch 0.
    let mut big_x = PauliOperator::identity(total);
    for branch in 0..b {
        big_x.mul_assign(&embed_branch(&xbar, branch));
    }
    let big_z = embed_branch(&zbar, 0);
    let mut block = LegoBlock::from_code(
        format!("branch({b},{})", seed.name),
        total,
        stabilizers,
        vec![big_x],
        vec![big_z],
    )?;
    // Record branch coloring: physical legs of branch j get group id j; the
    // logical leg gets none.
    for branch in 0..b {
        for i in 0..n0 {
            block.roles[1 + branch * n0 + i].group_id = Some(branch);
        }
    }
    let _ = phys;
    Ok(block)
}

/// The stabilizers of the code itself (group elements of the Choi tableau
/// with identity on all logical legs), as operators on the physical legs.
pub fn code_stabilizers(block: &LegoBlock) -> Vec<PauliOperator> {
    let log = block.logical_legs();
    let phys = block.physical_legs();
    // Canonicalize with logical columns first: rows without logical support
    // form the code stabilizer group.
    let n = block.n_legs();
    let mut order = Vec::new();
    for &q in &log {
        order.push(q);
        order.push(n + q);
    }
    for &q in &phys {
        order.push(q);
        order.push(n + q);
    }
    // Reuse tableau canonicalization machinery by hand: eliminate in the
    // custom column order with Pauli row operations.
    let mut gens = block.tableau.generators.clone();
    let col_bit = |g: &PauliOperator, col: usize| -> bool {
        if col < n {
            g.x.get(col)
        } else {
            g.z.get(col - n)
        }
    };
    let mut row = 0usize;
    for &col in &order {
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
    gens.iter()
        .filter(|g| log.iter().all(|&q| !g.x.get(q) && !g.z.get(q)))
        .map(|g| g.restrict_with_phase(&phys))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn steane() -> LegoBlock {
        LegoBlock::from_code(
            "steane",
            7,
            vec![
                p("XXXXIII"),
                p("XXIIXXI"),
                p("XIXIXIX"),
                p("ZZZZIII"),
                p("ZZIIZZI"),
                p("ZIZIZIZ"),
            ],
            vec![p("XXXXXXX")],
            vec![p("ZZZZZZZ")],
        )
        .unwrap()
    }

    #[test]
    fn steane_choi_is_isometric() {
        let b = steane();
        assert_eq!(b.params_nk(), (7, 1));
        assert!(b.tableau.is_pure());
        assert!(b.is_isometric());
        assert_eq!(b.kernel_dimension(), 0);
    }

    #[test]
    fn constructed_kernel_detected() {
        // A "block" whose stabilizer includes a logical-leg-only operator.
        let t = StabilizerTableau::new(2, vec![p("ZI"), p("IZ")]).unwrap();
        let b = LegoBlock::new(
            "bad",
            t,
            vec![LegRole::logical(), LegRole::physical()],
        )
        .unwrap();
        assert!(!b.is_isometric());
        assert_eq!(b.kernel_dimension(), 1);
    }

    #[test]
    fn dualize_round_trip_and_params() {
        let b = steane();
        // Make physical leg 1 (first physical) logical: [[6,2]].
        let d = b.dualize_legs(&[1], LegKind::Logical);
        assert_eq!(d.params_nk(), (6, 2));
        assert!(d.is_isometric());
        let back = d.dualize_legs(&[1], LegKind::Physical);
        assert_eq!(back.params_nk(), b.params_nk());
        assert_eq!(back.tableau, b.tableau);
        // Dualizing zero legs is the identity.
        let same = b.dualize_legs(&[], LegKind::Logical);
        assert_eq!(same.roles, b.roles);
    }

    #[test]
    fn stack_groups() {
        let bell = LegoBlock::new(
            "bell",
            StabilizerTableau::new(2, vec![p("XX"), p("ZZ")]).unwrap(),
            vec![LegRole::physical(), LegRole::physical()],
        )
        .unwrap();
        let s = bell.stack(2);
        assert_eq!(s.n_legs(), 4);
        assert_eq!(s.roles[0].group_id, Some(0));
        assert_eq!(s.roles[1].group_id, Some(1));
        assert_eq!(s.roles[2].group_id, Some(0));
        assert_eq!(s.roles[3].group_id, Some(1));
    }

    #[test]
    fn logical_representatives() {
        let b = steane();
        let x = b.logical_representative(0, 'X').unwrap();
        let z = b.logical_representative(0, 'Z').unwrap();
        // Representatives anticommute and commute with all code stabilizers.
        assert!(!x.commutes_with(&z));
        for s in code_stabilizers(&b) {
            assert!(x.commutes_with(&s));
            assert!(z.commutes_with(&s));
        }
    }

    #[test]
    fn code_stabilizers_of_steane() {
        let b = steane();
        let stabs = code_stabilizers(&b);
        assert_eq!(stabs.len(), 6);
        let code = StabilizerTableau::new(7, stabs).unwrap();
        let orig = StabilizerTableau::parse(
            None,
            "XXXXIII\nXXIIXXI\nXIXIXIX\nZZZZIII\nZZIIZZI\nZIZIZIZ",
        )
        .unwrap();
        assert_eq!(
            code.canonicalize().generators,
            orig.canonicalize().generators
        );
    }

    #[test]
    fn branch_code_parameters() {
        let b = build_branch_code(3, &steane()).unwrap();
        assert_eq!(b.params_nk(), (21, 1));
        assert!(b.is_isometric());
        assert!(b.tableau.is_pure());
        // Branch coloring partitions the 21 physical legs into 3 groups of 7.
        for g in 0..3 {
            let count = b
                .roles
                .iter()
                .filter(|r| r.kind == LegKind::Physical && r.group_id == Some(g))
                .count();
            assert_eq!(count, 7);
        }
    }
}
