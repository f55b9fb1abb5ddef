//! Localized-CZ certification for CSS codes, local-Clifford reduction of
//! stabilizer states to marked graph states, the small-graph enumerator
//! table, and discrete-angle diagonal symmetry families.
//!
//! The CZ certificate uses a purely combinatorial criterion: a product of
//! physical `CZ` gates pairing two blocks of the same CSS code preserves the
//! joint stabilizer group if and only if, for every X-type stabilizer of one
//! block, the Z-pattern it picks up on the partner block (the mod-2 sum of
//! the paired partners of its support) is itself a Z-type stabilizer.  This
//! is cross-validated against direct Clifford conjugation of the two-block
//! tableau.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::weight_enumerator;
use crate::block::{code_stabilizers, LegoBlock};
use crate::clifford::{CliffordError, CliffordGate};
use crate::gf2::Gf2Matrix;
use crate::pauli::{BitVec, PauliOperator};
use crate::phasepoly::{PhaseError, PhasePolynomial};
use crate::tableau::{Membership, StabilizerTableau, TableauError};
use crate::zmod::ZmodMatrix;

#[derive(Debug, Error)]
pub enum GraphStateError {
    #[error("block is not CSS: canonical stabilizer {0} mixes X and Z parts")]
    NotCss(String),
    #[error("tableau is not a pure state (rank {rank} < {n} qubits)")]
    Mixed { rank: usize, n: usize },
    #[error("pair ({0}, {1}) out of range for {2} physical qubits")]
    PairOutOfRange(usize, usize, usize),
    #[error("expected {expected} per-node axes, got {got}")]
    AxisCount { expected: usize, got: usize },
    #[error("tableau error: {0}")]
    Tableau(#[from] TableauError),
    #[error("Clifford error: {0}")]
    Clifford(#[from] CliffordError),
    #[error("phase error: {0}")]
    Phase(#[from] PhaseError),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

// ---------------------------------------------------------------------------
// Localized CZ checks on CSS codes
// ---------------------------------------------------------------------------

/// Split the canonical stabilizer generators of a code into X-type and Z-type
/// support rows, or report a non-CSS witness.
fn css_split(block: &LegoBlock) -> Result<(usize, Vec<BitVec>, Vec<BitVec>), GraphStateError> {
    let stabs = code_stabilizers(block);
    let n = block.physical_legs().len();
    let t = StabilizerTableau::new(n, stabs)?.canonicalize();
    let mut x_rows = Vec::new();
    let mut z_rows = Vec::new();
    for g in &t.generators {
        match (g.z.is_zero(), g.x.is_zero()) {
            (true, _) => x_rows.push(g.x.clone()),
            (_, true) => z_rows.push(g.z.clone()),
            _ => return Err(GraphStateError::NotCss(g.to_string())),
        }
    }
    Ok((n, x_rows, z_rows))
}

/// Decide whether the product of physical `CZ` gates over `pairs` — each pair
/// `(a, b)` coupling qubit `a` of one block of the CSS code to qubit `b` of a
/// second identical block — preserves the joint stabilizer group (and hence
/// acts as a logical operator, possibly the identity).
///
/// Criterion, checked in both directions: for every X-type stabilizer with
/// support `S`, the mod-2 sum of partners of `S` under the pairing must lie
/// in the Z-type stabilizer group of the other block.  Conjugating an X-type
/// stabilizer of one block by the CZ product appends exactly that Z pattern
/// on the partner block with no sign, and Z-type stabilizers commute with
/// every CZ, so the combinatorial criterion is exact.
pub fn localized_cz_check(
    block: &LegoBlock,
    pairs: &[(usize, usize)],
) -> Result<bool, GraphStateError> {
    let (n, x_rows, z_rows) = css_split(block)?;
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(GraphStateError::PairOutOfRange(a, b, n));
        }
    }
    let z_matrix = Gf2Matrix::from_rows(z_rows, n);
    for swap in [false, true] {
        for s in &x_rows {
            let mut picked = BitVec::zeros(n);
            for &(a, b) in pairs {
                let (src, dst) = if swap { (b, a) } else { (a, b) };
                if s.get(src) {
                    picked.set(dst, !picked.get(dst));
                }
            }
            if z_matrix.solve_row_combination(&picked).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Ground truth for [`localized_cz_check`]: conjugate every generator of the
/// explicit two-block stabilizer group by the CZ product and test membership
/// with consistent signs.
pub fn interblock_cz_is_logical(
    block: &LegoBlock,
    pairs: &[(usize, usize)],
) -> Result<bool, GraphStateError> {
    let stabs = code_stabilizers(block);
    let n = block.physical_legs().len();
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(GraphStateError::PairOutOfRange(a, b, n));
        }
    }
    let copy0: Vec<usize> = (0..n).collect();
    let copy1: Vec<usize> = (n..2 * n).collect();
    let mut gens = Vec::with_capacity(2 * stabs.len());
    for s in &stabs {
        gens.push(s.embed(2 * n, &copy0));
        gens.push(s.embed(2 * n, &copy1));
    }
    let joint = StabilizerTableau::new(2 * n, gens.clone())?;
    let cz = CliffordGate::named("CZ")?;
    let mut u = CliffordGate::identity(2 * n);
    for &(a, b) in pairs {
        u = cz.embed(2 * n, &[a, n + b]).compose(&u)?;
    }
    for g in &gens {
        if joint.group_member(&u.conjugate(g)?) != Membership::SignConsistent {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Graph states and marked graph states
// ---------------------------------------------------------------------------

/// Stabilizer tableau of the graph state on `n` nodes: one generator
/// `X_v · Π_{w ~ v} Z_w` per node.
pub fn graph_state_tableau(n: usize, edges: &[(usize, usize)]) -> StabilizerTableau {
    let mut gens = Vec::with_capacity(n);
    for v in 0..n {
        let mut g = PauliOperator::single_x(n, v);
        for &(a, b) in edges {
            if a == v {
                g.z.set(b, !g.z.get(b));
            } else if b == v {
                g.z.set(a, !g.z.get(a));
            }
        }
        gens.push(g);
    }
    StabilizerTableau { n, generators: gens }
}

/// A stabilizer state presented as a graph state decorated with a one-qubit
/// Clifford gate ("marking") per node: applying the markings to the graph
/// state reproduces the source state exactly, group and signs.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedGraphState {
    pub n: usize,
    /// Undirected edges, each stored with the smaller node first, sorted.
    pub edges: Vec<(usize, usize)>,
    /// One-qubit Clifford per node, applied to the graph state.
    pub markings: Vec<CliffordGate>,
    /// Original leg identity per node.
    pub labels: Vec<String>,
}

impl MarkedGraphState {
    /// The bare (unmarked) graph-state tableau.
    pub fn graph_tableau(&self) -> StabilizerTableau {
        graph_state_tableau(self.n, &self.edges)
    }

    /// The represented state: markings applied to the graph state.
    pub fn tableau(&self) -> StabilizerTableau {
        let mut t = self.graph_tableau();
        for (v, m) in self.markings.iter().enumerate() {
            t = t.apply_clifford(m, &[v]);
        }
        t
    }

    /// Render the `nodes` / `edges` / `mark` sections.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("nodes\n");
        for (v, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{v} {label}");
        }
        out.push_str("edges\n");
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        for (v, m) in self.markings.iter().enumerate() {
            if *m == CliffordGate::identity(1) {
                continue;
            }
            let _ = writeln!(out, "mark {v} {} {}", m.x_images[0], m.z_images[0]);
        }
        out
    }

    /// Parse the format produced by [`MarkedGraphState::serialize`].
    pub fn parse(text: &str) -> Result<MarkedGraphState, GraphStateError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Nodes,
            Edges,
        }
        let err = |line: usize, msg: &str| GraphStateError::Parse { line, msg: msg.into() };
        let mut section = Section::None;
        let mut labels: Vec<String> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut marks: Vec<(usize, CliffordGate)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            if s == "nodes" {
                section = Section::Nodes;
                continue;
            }
            if s == "edges" {
                section = Section::Edges;
                continue;
            }
            if let Some(rest) = s.strip_prefix("mark ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err(line, "expected `mark <node> <Ximage> <Zimage>`"));
                }
                let v: usize =
                    parts[0].parse().map_err(|_| err(line, "bad node index"))?;
                let xi = PauliOperator::from_str(parts[1])
                    .map_err(|e| err(line, &e.to_string()))?;
                let zi = PauliOperator::from_str(parts[2])
                    .map_err(|e| err(line, &e.to_string()))?;
                let g = CliffordGate::from_images(vec![xi], vec![zi])
                    .map_err(|e| err(line, &e.to_string()))?;
                marks.push((v, g));
                continue;
            }
            match section {
                Section::Nodes => {
                    let mut it = s.splitn(2, char::is_whitespace);
                    let v: usize = it
                        .next()
                        .unwrap()
                        .parse()
                        .map_err(|_| err(line, "bad node index"))?;
                    if v != labels.len() {
                        return Err(err(line, "node indices must be consecutive from 0"));
                    }
                    labels.push(it.next().unwrap_or("").trim().to_string());
                }
                Section::Edges => {
                    let parts: Vec<&str> = s.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(err(line, "expected `<a> <b>`"));
                    }
                    let a: usize = parts[0].parse().map_err(|_| err(line, "bad node"))?;
                    let b: usize = parts[1].parse().map_err(|_| err(line, "bad node"))?;
                    edges.push((a.min(b), a.max(b)));
                }
                Section::None => return Err(err(line, "content before any section header")),
            }
        }
        let n = labels.len();
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return Err(err(0, "edge endpoint out of range or self-loop"));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut markings = vec![CliffordGate::identity(1); n];
        for (v, g) in marks {
            if v >= n {
                return Err(err(0, "mark node out of range"));
            }
            markings[v] = g;
        }
        Ok(MarkedGraphState { n, edges, markings, labels })
    }
}

/// Reduce a pure stabilizer state to a marked graph state.
///
/// Deterministic procedure, lowest-index first throughout: bring the X part
/// to echelon form by row operations, apply `H` markings on every qubit
/// without an X pivot (always sufficient for a pure state — no local
/// complementation needed), re-reduce the X part to the identity, clear the
/// Z diagonal with `S` markings, and fix residual signs with `Z` markings.
/// The recorded markings are the inverses of the gates applied, so applying
/// them to the graph state reproduces the input exactly.
pub fn to_marked_graph_state(
    t: &StabilizerTableau,
) -> Result<MarkedGraphState, GraphStateError> {
    let n = t.n;
    if !t.is_pure() {
        return Err(GraphStateError::Mixed { rank: t.rank(), n });
    }
    let mut cur = t.canonicalize();
    // Composition of gates applied so far, per qubit (later ∘ earlier).
    let mut applied = vec![CliffordGate::identity(1); n];
    let mut apply = |cur: &StabilizerTableau,
                     applied: &mut Vec<CliffordGate>,
                     v: usize,
                     name: &str|
     -> Result<StabilizerTableau, GraphStateError> {
        let g = CliffordGate::named(name)?;
        applied[v] = g.compose(&applied[v])?;
        Ok(cur.apply_clifford(&g, &[v]))
    };

    // Row-reduce the X part; returns pivot column per row.
    let echelon = |gens: &mut Vec<PauliOperator>| -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(i) = (r..gens.len()).find(|&i| gens[i].x.get(col)) else {
                continue;
            };
            gens.swap(r, i);
            for j in 0..gens.len() {
                if j != r && gens[j].x.get(col) {
                    let row = gens[r].clone();
                    gens[j].mul_assign(&row);
                }
            }
            pivots.push(col);
            r += 1;
        }
        pivots
    };

    let mut gens = cur.generators.clone();
    let pivots: BTreeSet<usize> = echelon(&mut gens).into_iter().collect();
    cur = StabilizerTableau { n, generators: gens };
    for v in 0..n {
        if !pivots.contains(&v) {
            cur = apply(&cur, &mut applied, v, "H")?;
        }
    }
    let mut gens = cur.generators.clone();
    let pivots = echelon(&mut gens);
    debug_assert_eq!(pivots, (0..n).collect::<Vec<_>>(), "X part must reach full rank");
    cur = StabilizerTableau { n, generators: gens };
    // Generator v is now X_v · (Z pattern); clear Z on the diagonal.
    for v in 0..n {
        if cur.generators[v].z.get(v) {
            cur = apply(&cur, &mut applied, v, "S")?;
        }
    }
    for v in 0..n {
        debug_assert!(matches!(cur.generators[v].sign_exponent(), 0 | 2));
        if cur.generators[v].sign_exponent() == 2 {
            cur = apply(&cur, &mut applied, v, "Z")?;
        }
    }
    let mut edges = Vec::new();
    for v in 0..n {
        let g = &cur.generators[v];
        debug_assert_eq!(g.sign_exponent(), 0);
        for w in (v + 1)..n {
            debug_assert_eq!(g.z.get(w), cur.generators[w].z.get(v), "adjacency symmetric");
            if g.z.get(w) {
                edges.push((v, w));
            }
        }
    }
    let markings = applied.iter().map(|g| g.inverse()).collect();
    let labels = (0..n).map(|v| format!("q{v}")).collect();
    Ok(MarkedGraphState { n, edges, markings, labels })
}

// ---------------------------------------------------------------------------
// Small-graph enumerator table
// ---------------------------------------------------------------------------

/// The representative graphs of the connected-graph local-Clifford classes on
/// 2 to 5 nodes, with their stabilizer weight enumerators.
pub const LC_TABLE: &[(usize, usize, &[(usize, usize)], &[u128])] = &[
    (1, 2, &[(0, 1)], &[1, 0, 3]),
    (2, 3, &[(0, 1), (0, 2)], &[1, 0, 3, 4]),
    (3, 4, &[(0, 1), (0, 2), (0, 3)], &[1, 0, 6, 0, 9]),
    (4, 4, &[(0, 1), (1, 2), (2, 3)], &[1, 0, 2, 8, 5]),
    (5, 5, &[(0, 1), (0, 2), (0, 3), (0, 4)], &[1, 0, 10, 0, 5, 16]),
    (6, 5, &[(0, 1), (1, 2), (0, 3), (0, 4)], &[1, 0, 4, 6, 11, 10]),
    (7, 5, &[(0, 1), (1, 2), (0, 3), (3, 4)], &[1, 0, 2, 8, 13, 8]),
    (8, 5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)], &[1, 0, 0, 10, 15, 6]),
];

#[derive(Debug, Clone)]
pub struct LcRow {
    pub index: usize,
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub expected: Vec<u128>,
    pub computed: Vec<u128>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct LcTableReport {
    pub rows: Vec<LcRow>,
}

impl LcTableReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Recompute the weight enumerator of every representative graph state and
/// compare against the stored polynomials exactly.
pub fn lc_class_table_check() -> LcTableReport {
    let rows = LC_TABLE
        .iter()
        .map(|&(index, nodes, edges, expected)| {
            let computed = weight_enumerator(&graph_state_tableau(nodes, edges));
            LcRow {
                index,
                nodes,
                edges: edges.to_vec(),
                expected: expected.to_vec(),
                computed: computed.clone(),
                pass: computed == expected,
            }
        })
        .collect();
    LcTableReport { rows }
}

// ---------------------------------------------------------------------------
// Discrete-angle phase-symmetry families
// ---------------------------------------------------------------------------

/// Per-node axis for a discrete phase family: the node carries either a
/// diagonal phase gate (`Z`) or its Hadamard conjugate (`X`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseAxis {
    Z,
    X,
}

/// A family of per-node phase-gate tuples that leave the state invariant.
///
/// Numerator convention: node `v` applies, in its axis frame, the relative
/// phase `diag(1, ω^{k_v})` with `ω = exp(2πi/N)` — equivalently the
/// half-angle rotation `R_axis(2π k_v / N)` up to global phase.  The
/// symmetric tuples form a subgroup of `(Z_N)^n`, recorded both by
/// generators and by the dual set of Z_N-linear constraints (the subgroup
/// is exactly the solution set of the constraints).
#[derive(Debug, Clone)]
pub struct PhaseFamily {
    pub modulus: u32,
    pub n: usize,
    /// Numerator tuples generating the symmetric subgroup.
    pub generators: Vec<Vec<u32>>,
    /// Relations: `Σ_v c_v k_v ≡ 0 (mod N)` for every symmetric tuple `k`.
    pub constraints: Vec<Vec<u32>>,
}

impl PhaseFamily {
    /// Does the numerator tuple satisfy every constraint?
    pub fn satisfies(&self, k: &[u32]) -> bool {
        self.constraints.iter().all(|c| {
            c.iter().zip(k).map(|(&cv, &kv)| (cv as u64 * kv as u64) % self.modulus as u64)
                .sum::<u64>()
                % self.modulus as u64
                == 0
        })
    }

    /// Constraints for full-angle rotations `R_axis(θ) = exp(−iθA)` with
    /// `θ = 2πk/N`: the relative phase doubles (`2θ`), so each relation
    /// applies to `2k` — equivalently its coefficients double mod N.
    pub fn rotation_constraints(&self) -> Vec<Vec<u32>> {
        self.constraints
            .iter()
            .map(|c| c.iter().map(|&x| (2 * x) % self.modulus).collect())
            .collect()
    }

    /// Does the tuple of full-angle rotation numerators satisfy the family?
    pub fn satisfies_rotation(&self, k: &[u32]) -> bool {
        let doubled: Vec<u32> = k.iter().map(|&x| (2 * x) % self.modulus).collect();
        self.satisfies(&doubled)
    }
}

/// The per-node phase polynomial `Σ_v k_v x_v` implemented by the tuple `k`
/// in the rotated frame.
pub fn family_polynomial(modulus: u32, k: &[u32]) -> PhasePolynomial {
    let mut f = PhasePolynomial::zero(modulus, k.len());
    for (v, &kv) in k.iter().enumerate() {
        f.add_term(&[v as u16], kv);
    }
    f
}

/// The state conjugated into the frame in which every node's phase gate is
/// diagonal: `H` on each X-axis node, identity on Z-axis nodes.
pub fn rotated_frame_tableau(
    g: &MarkedGraphState,
    axes: &[PhaseAxis],
) -> Result<StabilizerTableau, GraphStateError> {
    if axes.len() != g.n {
        return Err(GraphStateError::AxisCount { expected: g.n, got: axes.len() });
    }
    let mut t = g.tableau();
    let h = CliffordGate::named("H")?;
    for (v, axis) in axes.iter().enumerate() {
        if *axis == PhaseAxis::X {
            t = t.apply_clifford(&h, &[v]);
        }
    }
    Ok(t)
}

/// Compute the group of symmetric per-node phase-gate tuples of the state,
/// one axis per node, as Z_N-linear constraints on the angle numerators.
///
/// The degree-≤1 diagonal symmetry group of the rotated-frame state is
/// computed exactly; its linear parts generate the symmetric subgroup of
/// `(Z_N)^n`, and the returned constraints are that subgroup's annihilator
/// (exact by duality of subgroups of finite abelian groups, so a tuple is
/// symmetric if and only if it satisfies every constraint).
pub fn discrete_phase_family(
    g: &MarkedGraphState,
    axes: &[PhaseAxis],
    modulus: u32,
) -> Result<PhaseFamily, GraphStateError> {
    let t = rotated_frame_tableau(g, axes)?;
    let n = g.n;
    let polys =
        crate::phasepoly::diagonal_symmetry_group(&t, modulus, 1, None, 1 << 16)?;
    let mut generators: Vec<Vec<u32>> = Vec::new();
    for p in &polys {
        let mut k = vec![0u32; n];
        let mut nonzero = false;
        for (mono, &c) in &p.monomials {
            if let [v] = mono[..] {
                k[v as usize] = c % modulus;
                nonzero |= c % modulus != 0;
            }
        }
        if nonzero {
            generators.push(k);
        }
    }
    // Annihilator: right kernel of the generator matrix = left kernel of its
    // transpose.
    let mut transpose = ZmodMatrix::new(modulus, generators.len().max(1));
    for v in 0..n {
        let row: Vec<u32> = if generators.is_empty() {
            vec![0]
        } else {
            generators.iter().map(|g| g[v]).collect()
        };
        transpose.push_row(row);
    }
    let constraints = transpose.left_kernel();
    Ok(PhaseFamily { modulus, n, generators, constraints })
}
