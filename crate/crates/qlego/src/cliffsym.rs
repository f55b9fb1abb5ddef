//! Clifford product symmetries and Pauli-operator bookkeeping: verifying
//! tensor-factor Clifford symmetries of stabilizer tableaux, cleaning logical
//! Pauli representatives off forbidden legs, and (building on the trace
//! engine) propagating matched symmetries and pushing operators through
//! networks.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::block::{code_stabilizers, LegoBlock};
use crate::clifford::{CliffordError, CliffordGate};
use crate::gf2::Gf2Matrix;
use crate::network::{ContractionReport, NetworkError, TraceNetwork};
use crate::pauli::{BitVec, PauliOperator};
use crate::phasepoly::{
    affine_support, extract_logical_diagonal, restrict_phase_poly, verify_diagonal_symmetry,
    DiagonalSymmetry, PhaseError, PhasePolynomial,
};
use crate::tableau::{
    deformed_bell_generators, ghz_state_generators, Membership, StabilizerTableau,
};
use crate::zmod::ZmodMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffsymError {
    #[error("clifford error: {0}")]
    Clifford(#[from] CliffordError),
    #[error("factor {0} acts on {1} legs but its gate has arity {2}")]
    FactorArity(usize, usize, usize),
    #[error("leg {0} is covered by more than one factor")]
    OverlappingFactors(usize),
    #[error("operator is neither a stabilizer nor a logical representative")]
    NotNormalizer,
    #[error("parse error: {0}")]
    Parse(String),
}

/// A product of Clifford gates acting on disjoint leg groups,
/// `U = ⊗_I U_I`. Legs not covered by any factor carry the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordProductSymmetry {
    pub factors: Vec<(Vec<usize>, CliffordGate)>,
}

impl CliffordProductSymmetry {
    pub fn new(factors: Vec<(Vec<usize>, CliffordGate)>) -> Result<Self, CliffsymError> {
        let mut seen = std::collections::HashSet::new();
        for (i, (legs, gate)) in factors.iter().enumerate() {
            if legs.len() != gate.m {
                return Err(CliffsymError::FactorArity(i, legs.len(), gate.m));
            }
            for &l in legs {
                if !seen.insert(l) {
                    return Err(CliffsymError::OverlappingFactors(l));
                }
            }
        }
        Ok(CliffordProductSymmetry { factors })
    }

    /// The same-site single-qubit gate on every listed leg.
    pub fn bitwise(gate: &CliffordGate, legs: &[usize]) -> Result<Self, CliffsymError> {
        Self::new(legs.iter().map(|&l| (vec![l], gate.clone())).collect())
    }

    /// The full `n`-qubit Clifford gate (identity off the factors).
    pub fn full_gate(&self, n: usize) -> CliffordGate {
        let mut out = CliffordGate::identity(n);
        for (legs, gate) in &self.factors {
            out = out.compose(&gate.embed(n, legs)).expect("matching arity");
        }
        out
    }

    pub fn support(&self) -> Vec<usize> {
        let mut legs: Vec<usize> = self.factors.iter().flat_map(|(l, _)| l.iter().copied()).collect();
        legs.sort_unstable();
        legs
    }
}

/// Outcome of a Clifford symmetry check: either every conjugated generator is
/// a sign-consistent group member, or the first violation is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliffordSymmetryReport {
    Symmetry,
    Violation { generator: usize, membership: Membership },
}

impl CliffordSymmetryReport {
    pub fn is_symmetry(&self) -> bool {
        matches!(self, CliffordSymmetryReport::Symmetry)
    }
}

/// Decide whether `u` is a unitary symmetry of the stabilizer state: the
/// conjugate of every generator must be in the group with consistent sign.
pub fn verify_clifford_symmetry(
    t: &StabilizerTableau,
    u: &CliffordProductSymmetry,
) -> Result<CliffordSymmetryReport, CliffsymError> {
    let full = u.full_gate(t.n);
    for (i, g) in t.generators.iter().enumerate() {
        let conj = full.conjugate(g)?;
        match t.group_member(&conj) {
            Membership::SignConsistent => {}
            other => {
                return Ok(CliffordSymmetryReport::Violation { generator: i, membership: other })
            }
        }
    }
    Ok(CliffordSymmetryReport::Symmetry)
}

/// Clean `p` (a stabilizer or logical representative, on the physical legs)
/// off the forbidden legs: return an equivalent representative `p·S` with no
/// support there, or `None` when no stabilizer completes the support.
pub fn pauli_clean(
    b: &LegoBlock,
    p: &PauliOperator,
    forbidden: &[usize],
) -> Result<Option<PauliOperator>, CliffsymError> {
    if b.choi_extension(p).is_none() {
        return Err(CliffsymError::NotNormalizer);
    }
    let stabs = code_stabilizers(b);
    // GF(2) system: a combination of stabilizers matching p's X and Z bits on
    // every forbidden leg.
    let cols = 2 * forbidden.len();
    let mut m = Gf2Matrix::new(cols);
    for s in &stabs {
        let mut row = BitVec::zeros(cols);
        for (i, &q) in forbidden.iter().enumerate() {
            row.set(i, s.x.get(q));
            row.set(forbidden.len() + i, s.z.get(q));
        }
        m.push_row(row);
    }
    let mut target = BitVec::zeros(cols);
    for (i, &q) in forbidden.iter().enumerate() {
        target.set(i, p.x.get(q));
        target.set(forbidden.len() + i, p.z.get(q));
    }
    let Some(combo) = m.solve_row_combination(&target) else {
        return Ok(None);
    };
    let mut out = p.clone();
    for i in combo.iter_ones() {
        out.mul_assign(&stabs[i]);
    }
    for &q in forbidden {
        debug_assert!(!out.x.get(q) && !out.z.get(q));
    }
    Ok(Some(out))
}

/// Errors from the network-level symmetry operations (matching, pushing).
#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Cliffsym(#[from] CliffsymError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("node {0} assignment is not a symmetry of its block")]
    UnverifiedNode(usize),
    #[error("unsupported symmetry shape: {0}")]
    Unsupported(String),
}

/// A symmetry of one network node: either a product of Clifford factors or a
/// diagonal phase polynomial over all of the node's legs.
#[derive(Debug, Clone)]
pub enum NodeSymmetry {
    Clifford(CliffordProductSymmetry),
    Diagonal(PhasePolynomial),
}

/// Outcome of propagating per-node symmetries through a network: either the
/// induced symmetry of the contracted block, or the first edge at which the
/// incident factors fail to stabilize the edge state.
#[derive(Debug, Clone)]
pub enum MatchOutcome {
    Matched(NodeSymmetry),
    EdgeMismatch { edge: String },
}

impl MatchOutcome {
    pub fn is_matched(&self) -> bool {
        matches!(self, MatchOutcome::Matched(_))
    }
}

/// Single-qubit factor a node symmetry places on one of the node's legs.
enum LegFactor {
    Gate(CliffordGate),
    Phase(u32), // diagonal diag(1, e^{2πi c / N})
}

fn clifford_leg_factor(
    u: &CliffordProductSymmetry,
    leg: usize,
) -> Result<CliffordGate, FlowError> {
    for (legs, gate) in &u.factors {
        if legs.contains(&leg) {
            if legs.len() != 1 {
                return Err(FlowError::Unsupported(format!(
                    "multi-qubit factor covers traced leg {leg}"
                )));
            }
            return Ok(gate.clone());
        }
    }
    Ok(CliffordGate::identity(1))
}

fn diagonal_leg_factor(f: &PhasePolynomial, leg: usize) -> Result<u32, FlowError> {
    let mut c = 0;
    for (mono, &v) in &f.monomials {
        if mono.contains(&(leg as u16)) {
            if mono.len() != 1 {
                return Err(FlowError::Unsupported(format!(
                    "traced leg {leg} appears in a degree-{} monomial",
                    mono.len()
                )));
            }
            c = v;
        }
    }
    Ok(c)
}

/// Check that the per-leg factors stabilize the given edge state.
fn edge_factors_match(
    edge_state: &StabilizerTableau,
    factors: &[LegFactor],
) -> Result<bool, FlowError> {
    let all_gates = factors.iter().all(|f| matches!(f, LegFactor::Gate(_)));
    if all_gates {
        let fs: Vec<(Vec<usize>, CliffordGate)> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| match f {
                LegFactor::Gate(g) => (vec![i], g.clone()),
                LegFactor::Phase(_) => unreachable!(),
            })
            .collect();
        let u = CliffordProductSymmetry::new(fs)?;
        return Ok(verify_clifford_symmetry(edge_state, &u)?.is_symmetry());
    }
    // The all-diagonal case is handled by the caller, which knows the modulus.
    Err(FlowError::Unsupported(
        "mixed Clifford/diagonal factors on one edge".into(),
    ))
}

/// Propagate a per-node symmetry assignment through the network: verify each
/// node symmetry, check the matching condition across every (deformed) edge
/// and hyperedge, and return the induced symmetry on the contracted block,
/// itself re-verified against the contracted tableau.
pub fn propagate_matched_symmetry(
    net: &TraceNetwork,
    assignment: &[NodeSymmetry],
) -> Result<MatchOutcome, FlowError> {
    net.validate()?;
    assert_eq!(assignment.len(), net.nodes.len(), "one symmetry per node");
    // Step 1: each node symmetry must hold on its own block.
    for (i, ((_, block), sym)) in net.nodes.iter().zip(assignment).enumerate() {
        let ok = match sym {
            NodeSymmetry::Clifford(u) => {
                verify_clifford_symmetry(&block.tableau, u)?.is_symmetry()
            }
            NodeSymmetry::Diagonal(f) => {
                assert_eq!(f.n_vars, block.n_legs(), "polynomial over all node legs");
                matches!(
                    verify_diagonal_symmetry(&block.tableau, f)?,
                    DiagonalSymmetry::Symmetry { .. }
                )
            }
        };
        if !ok {
            return Err(FlowError::UnverifiedNode(i));
        }
    }
    let diag_modulus = assignment.iter().find_map(|s| match s {
        NodeSymmetry::Diagonal(f) => Some(f.modulus),
        _ => None,
    });
    if let Some(n) = diag_modulus {
        for s in assignment {
            if let NodeSymmetry::Diagonal(f) = s {
                if f.modulus != n {
                    return Err(FlowError::Unsupported(
                        "diagonal node symmetries with mixed moduli".into(),
                    ));
                }
            }
        }
    }
    let factor_at = |r: &crate::network::LegRef| -> Result<LegFactor, FlowError> {
        match &assignment[r.node] {
            NodeSymmetry::Clifford(u) => Ok(LegFactor::Gate(clifford_leg_factor(u, r.leg)?)),
            NodeSymmetry::Diagonal(f) => Ok(LegFactor::Phase(diagonal_leg_factor(f, r.leg)?)),
        }
    };
    let label_of = |r: &crate::network::LegRef| format!("{}.{}", net.nodes[r.node].0, r.leg);
    // Step 2: the incident factors must stabilize every edge state.
    let mut check_edge = |state: StabilizerTableau,
                          factors: Vec<LegFactor>,
                          label: String|
     -> Result<Option<String>, FlowError> {
        let all_phases = factors.iter().all(|f| matches!(f, LegFactor::Phase(_)));
        let ok = if all_phases {
            let n = diag_modulus.expect("diagonal assignment present");
            let mut f = PhasePolynomial::zero(n, factors.len());
            for (i, fac) in factors.iter().enumerate() {
                if let LegFactor::Phase(c) = fac {
                    f.add_term(&[i as u16], *c);
                }
            }
            matches!(
                verify_diagonal_symmetry(&state, &f)?,
                DiagonalSymmetry::Symmetry { .. }
            )
        } else {
            edge_factors_match(&state, &factors)?
        };
        Ok(if ok { None } else { Some(label) })
    };
    for (a, b, c) in &net.edges {
        let state = StabilizerTableau::new(2, deformed_bell_generators(c))
            .expect("deformed Bell state is a valid tableau");
        let factors = vec![factor_at(a)?, factor_at(b)?];
        let label = format!("{}-{}", label_of(a), label_of(b));
        if let Some(edge) = check_edge(state, factors, label)? {
            return Ok(MatchOutcome::EdgeMismatch { edge });
        }
    }
    for (legs, r) in &net.hyperedges {
        let state = StabilizerTableau::new(*r, ghz_state_generators(*r))
            .expect("GHZ state is a valid tableau");
        let factors: Result<Vec<_>, _> = legs.iter().map(&factor_at).collect();
        let labels: Vec<String> = legs.iter().map(&label_of).collect();
        if let Some(edge) = check_edge(state, factors?, labels.join("-"))? {
            return Ok(MatchOutcome::EdgeMismatch { edge });
        }
    }
    // Step 3: assemble the induced symmetry on the dangling legs and
    // re-verify it against the contracted tableau.
    let rep = crate::network::contract_network(net)?;
    let mut contracted_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, &origin) in rep.leg_origin.iter().enumerate() {
        contracted_index.insert(origin, i);
    }
    let out = if diag_modulus.is_some()
        && assignment.iter().all(|s| matches!(s, NodeSymmetry::Diagonal(_)))
    {
        let n = diag_modulus.unwrap();
        let mut f = PhasePolynomial::zero(n, rep.result.n_legs());
        for (node, sym) in assignment.iter().enumerate() {
            let NodeSymmetry::Diagonal(p) = sym else { unreachable!() };
            for (mono, &c) in &p.monomials {
                if mono.is_empty() {
                    continue;
                }
                let mapped: Option<Vec<u16>> = mono
                    .iter()
                    .map(|&l| contracted_index.get(&(node, l as usize)).map(|&i| i as u16))
                    .collect();
                match mapped {
                    Some(mut vars) => {
                        vars.sort_unstable();
                        f.add_term(&vars, c);
                    }
                    None => {
                        if mono.len() > 1 {
                            return Err(FlowError::Unsupported(format!(
                                "monomial {mono:?} of node {node} mixes traced and dangling legs"
                            )));
                        }
                        // Fully traced linear term: consumed by the edge check.
                    }
                }
            }
        }
        match verify_diagonal_symmetry(&rep.result.tableau, &f)? {
            DiagonalSymmetry::Symmetry { .. } => NodeSymmetry::Diagonal(f),
            DiagonalSymmetry::NotSymmetry { .. } => {
                return Err(FlowError::Unsupported(
                    "propagated diagonal symmetry failed global verification".into(),
                ))
            }
        }
    } else if assignment.iter().all(|s| matches!(s, NodeSymmetry::Clifford(_))) {
        let mut factors = Vec::new();
        for (node, sym) in assignment.iter().enumerate() {
            let NodeSymmetry::Clifford(u) = sym else { unreachable!() };
            for (legs, gate) in &u.factors {
                let mapped: Option<Vec<usize>> = legs
                    .iter()
                    .map(|&l| contracted_index.get(&(node, l)).copied())
                    .collect();
                match mapped {
                    Some(vars) => factors.push((vars, gate.clone())),
                    None => {
                        if legs.iter().any(|&l| contracted_index.contains_key(&(node, l))) {
                            return Err(FlowError::Unsupported(format!(
                                "factor of node {node} mixes traced and dangling legs"
                            )));
                        }
                        // Fully traced factor: consumed by the edge check.
                    }
                }
            }
        }
        let u = CliffordProductSymmetry::new(factors)?;
        if !verify_clifford_symmetry(&rep.result.tableau, &u)?.is_symmetry() {
            return Err(FlowError::Unsupported(
                "propagated Clifford symmetry failed global verification".into(),
            ));
        }
        NodeSymmetry::Clifford(u)
    } else {
        return Err(FlowError::Unsupported(
            "mixed Clifford/diagonal node assignments".into(),
        ));
    };
    Ok(MatchOutcome::Matched(out))
}

/// Search limits for [`push_operator`].
#[derive(Debug, Clone)]
pub struct PushOptions {
    /// Maximum number of nodes the flow may touch.
    pub node_budget: usize,
    /// Maximum monomial degree of the physical implementation.
    pub max_degree: usize,
    /// Cap on the candidate-monomial pool per solve.
    pub candidate_cap: usize,
}

impl Default for PushOptions {
    fn default() -> Self {
        PushOptions { node_budget: 64, max_degree: 2, candidate_cap: 20_000 }
    }
}

/// A routed operator flow: the target logical diagonal gate, its physical
/// implementation on the dangling legs, per-leg provenance, and the traced
/// edges the flow crosses.
#[derive(Debug, Clone)]
pub struct OperatorFlow {
    /// Target gate; variables index the contracted block's logical legs.
    pub logical: PhasePolynomial,
    /// Implementation; variables index the contracted block's physical legs.
    pub physical: PhasePolynomial,
    /// (node, local leg) provenance of each physical variable.
    pub physical_origin: Vec<(usize, usize)>,
    /// Node display names, for reports.
    pub node_names: Vec<String>,
    /// Traced edges crossed by the flow, with the gate labels carried across.
    pub edge_crossings: Vec<(String, Vec<String>)>,
}

fn gate_label(degree: usize, c: u32, n: u32) -> String {
    let controls = "C".repeat(degree.saturating_sub(1));
    if c == n / 2 {
        format!("{controls}Z")
    } else {
        format!("{controls}P({c}/{n})")
    }
}

impl OperatorFlow {
    /// Physical legs touched by the implementation.
    pub fn support(&self) -> Vec<usize> {
        self.physical.support_vars().iter().map(|&v| v as usize).collect()
    }

    /// Maximum number of entangling/phase factors acting on any single leg.
    pub fn depth(&self) -> usize {
        let mut per_leg: BTreeMap<u16, usize> = BTreeMap::new();
        for mono in self.physical.monomials.keys() {
            for &v in mono {
                *per_leg.entry(v).or_insert(0) += 1;
            }
        }
        per_leg.values().copied().max().unwrap_or(0)
    }

    /// Nodes whose legs carry part of the implementation.
    pub fn touched_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self
            .support()
            .iter()
            .map(|&v| self.physical_origin[v].0)
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    /// Human-readable flow report: one line per crossed edge, then the
    /// physical implementation leg by leg.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (edge, labels) in &self.edge_crossings {
            let mut tally: BTreeMap<&String, usize> = BTreeMap::new();
            for l in labels {
                *tally.entry(l).or_insert(0) += 1;
            }
            let desc: Vec<String> = tally
                .iter()
                .map(|(l, c)| if *c == 1 { (*l).clone() } else { format!("{l} x{c}") })
                .collect();
            out.push_str(&format!("edge {edge}: {}\n", desc.join(" ")));
        }
        let n = self.physical.modulus;
        let mut parts = Vec::new();
        for (mono, &c) in &self.physical.monomials {
            if mono.is_empty() {
                continue;
            }
            let legs: Vec<String> = mono.iter().map(|v| v.to_string()).collect();
            parts.push(format!("{}:{}", legs.join(","), gate_label(mono.len(), c, n)));
        }
        out.push_str(&format!("physical: {}\n", parts.join(" ")));
        out
    }
}

/// Node adjacency induced by the network's edges and hyperedges, with edge
/// labels for reporting.
fn node_graph(net: &TraceNetwork) -> Vec<Vec<(usize, String)>> {
    let mut adj = vec![Vec::new(); net.nodes.len()];
    let label_of = |r: &crate::network::LegRef| format!("{}.{}", net.nodes[r.node].0, r.leg);
    for (a, b, _) in &net.edges {
        let label = format!("{}-{}", label_of(a), label_of(b));
        adj[a.node].push((b.node, label.clone()));
        adj[b.node].push((a.node, label));
    }
    for (legs, _) in &net.hyperedges {
        for i in 0..legs.len() {
            for j in (i + 1)..legs.len() {
                let label = format!("{}-{}", label_of(&legs[i]), label_of(&legs[j]));
                adj[legs[i].node].push((legs[j].node, label.clone()));
                adj[legs[j].node].push((legs[i].node, label));
            }
        }
    }
    adj
}

/// Candidate monomials over the physical variables whose origin lies in the
/// active node set. The first stage offers singles, same-node tuples, and
/// index-aligned cross-node tuples (the shapes bitwise pushing produces); the
/// second stage opens up to arbitrary tuples.
fn candidate_monomials(
    active_vars: &[u16],
    origin: &[(usize, usize)],
    max_degree: usize,
    broad: bool,
    cap: usize,
) -> Vec<Vec<u16>> {
    let mut out: BTreeSet<Vec<u16>> = BTreeSet::new();
    for &v in active_vars {
        out.insert(vec![v]);
    }
    if max_degree >= 2 {
        for (i, &u) in active_vars.iter().enumerate() {
            for &v in &active_vars[i + 1..] {
                let (nu, lu) = origin[u as usize];
                let (nv, lv) = origin[v as usize];
                if broad || nu == nv || lu == lv {
                    out.insert(vec![u, v]);
                }
                if out.len() > cap {
                    return out.into_iter().collect();
                }
            }
        }
    }
    if max_degree >= 3 {
        for (i, &u) in active_vars.iter().enumerate() {
            for (j, &v) in active_vars.iter().enumerate().skip(i + 1) {
                for &w in &active_vars[j + 1..] {
                    let (nu, lu) = origin[u as usize];
                    let (nv, lv) = origin[v as usize];
                    let (nw, lw) = origin[w as usize];
                    let same_node = nu == nv && nv == nw;
                    let aligned = nu != nv && nv != nw && nu != nw && lu == lv && lv == lw;
                    if broad || same_node || aligned {
                        out.insert(vec![u, v, w]);
                    }
                    if out.len() > cap {
                        return out.into_iter().collect();
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Push a logical diagonal gate through a contracted network: find a physical
/// diagonal implementation on the dangling legs, preferring flows that stay
/// near the insertion nodes and growing the active region one node at a time
/// until the node budget is exhausted. Returns `Ok(None)` when no flow is
/// found under the budget (which does not certify nonexistence).
pub fn push_operator(
    net: &TraceNetwork,
    rep: &ContractionReport,
    target: &PhasePolynomial,
    opts: &PushOptions,
) -> Result<Option<OperatorFlow>, FlowError> {
    let block = &rep.result;
    if block.kernel_dimension() > 0 {
        return Err(FlowError::Phase(PhaseError::NotIsometric(block.kernel_dimension())));
    }
    let logical = block.logical_legs();
    let physical = block.physical_legs();
    assert_eq!(target.n_vars, logical.len(), "target is over the logical legs");
    let n = target.modulus;
    let node_names: Vec<String> = net.nodes.iter().map(|(id, _)| id.clone()).collect();
    let physical_origin: Vec<(usize, usize)> =
        physical.iter().map(|&p| rep.leg_origin[p]).collect();
    if target.without_constant().is_zero() {
        return Ok(Some(OperatorFlow {
            logical: target.clone(),
            physical: PhasePolynomial::zero(n, physical.len()),
            physical_origin,
            node_names,
            edge_crossings: Vec::new(),
        }));
    }
    // Required restriction on the Choi support, expressed in its free
    // variables: the lift of the negated target through the logical pivots.
    let a = affine_support(&block.tableau);
    let mut var_of_leg: BTreeMap<usize, u16> = BTreeMap::new();
    for (i, &p) in a.pivots.iter().enumerate() {
        if logical.contains(&p) {
            var_of_leg.insert(p, i as u16);
        }
    }
    if var_of_leg.len() != logical.len() {
        return Err(FlowError::Unsupported(
            "some logical leg is not a free coordinate of the Choi support".into(),
        ));
    }
    let mut req = PhasePolynomial::zero(n, a.dim());
    for (mono, &c) in &target.negated().monomials {
        let mut term = PhasePolynomial::constant(n, a.dim(), c);
        for &j in mono {
            let leg = logical[j as usize];
            let lift = PhasePolynomial::parity_lift(
                n,
                a.dim(),
                a.basepoint.get(leg),
                &[var_of_leg[&leg]],
                1,
            )?;
            term = term.mul(&lift);
        }
        req = req.add(&term);
    }
    let req = req.without_constant();
    // Insertion nodes: owners of the targeted logical legs.
    let mut active: BTreeSet<usize> = target
        .support_vars()
        .iter()
        .map(|&j| rep.leg_origin[logical[j as usize]].0)
        .collect();
    let adj = node_graph(net);
    let phys_var_leg: Vec<u16> = physical.iter().map(|&p| p as u16).collect();
    let max_degree = opts.max_degree.max(target.max_degree());
    loop {
        let active_vars: Vec<u16> = (0..physical.len() as u16)
            .filter(|&v| active.contains(&physical_origin[v as usize].0))
            .collect();
        for broad in [false, true] {
            let cands = candidate_monomials(
                &active_vars,
                &physical_origin,
                max_degree,
                broad,
                opts.candidate_cap,
            );
            if cands.len() > opts.candidate_cap {
                continue;
            }
            if let Some(f_phys) =
                solve_flow(block, &a, &req, &cands, &phys_var_leg, n, physical.len())?
            {
                debug_assert_eq!(
                    extract_logical_diagonal(block, &f_phys)?,
                    target.without_constant()
                );
                let edge_crossings = trace_crossings(&f_phys, &physical_origin, &adj, &active, n);
                return Ok(Some(OperatorFlow {
                    logical: target.clone(),
                    physical: f_phys,
                    physical_origin,
                    node_names,
                    edge_crossings,
                }));
            }
        }
        if active.len() >= opts.node_budget {
            return Ok(None);
        }
        // Grow the active region: lowest-index node adjacent to it, falling
        // back to the lowest-index untouched node of the network.
        let next = (0..net.nodes.len())
            .filter(|i| !active.contains(i))
            .find(|&i| adj[i].iter().any(|(j, _)| active.contains(j)))
            .or_else(|| (0..net.nodes.len()).find(|i| !active.contains(i)));
        match next {
            Some(i) => {
                active.insert(i);
            }
            None => return Ok(None),
        }
    }
}

/// Solve for coefficients of the candidate monomials whose restriction to the
/// Choi support matches `req` up to a constant, then greedily minimize the
/// solution's (depth, support, size) with the solver's kernel.
fn solve_flow(
    block: &LegoBlock,
    a: &crate::phasepoly::AffineSupport,
    req: &PhasePolynomial,
    cands: &[Vec<u16>],
    phys_var_leg: &[u16],
    n: u32,
    n_phys: usize,
) -> Result<Option<PhasePolynomial>, FlowError> {
    if cands.is_empty() {
        return Ok(None);
    }
    let n_legs = block.n_legs();
    // Restrict each candidate to the support's free variables.
    let mut restricted: Vec<PhasePolynomial> = Vec::with_capacity(cands.len());
    for mono in cands {
        let legs: Vec<u16> = mono.iter().map(|&v| phys_var_leg[v as usize]).collect();
        let f = PhasePolynomial::monomial(n, n_legs, &legs, 1);
        restricted.push(restrict_phase_poly(&f, a)?.without_constant());
    }
    // Column layout: every free-variable monomial seen in a row or in req.
    let mut columns: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
    for f in restricted.iter().chain(std::iter::once(req)) {
        for mono in f.monomials.keys() {
            let next = columns.len();
            columns.entry(mono.clone()).or_insert(next);
        }
    }
    let n_cols = columns.len();
    let to_row = |f: &PhasePolynomial| {
        let mut row = vec![0u32; n_cols];
        for (mono, &c) in &f.monomials {
            row[columns[mono]] = c;
        }
        row
    };
    let mut m = ZmodMatrix::new(n, n_cols);
    for f in &restricted {
        m.push_row(to_row(f));
    }
    let Some(combo) = m.solve_row_combination(&to_row(req)) else {
        return Ok(None);
    };
    let build = |combo: &[u32]| {
        let mut f = PhasePolynomial::zero(n, n_phys);
        for (c, mono) in combo.iter().zip(cands) {
            if *c % n != 0 {
                f.add_term(mono, *c % n);
            }
        }
        f
    };
    let objective = |f: &PhasePolynomial| {
        let depth = {
            let mut per: BTreeMap<u16, usize> = BTreeMap::new();
            for mono in f.monomials.keys() {
                for &v in mono {
                    *per.entry(v).or_insert(0) += 1;
                }
            }
            per.values().copied().max().unwrap_or(0)
        };
        (depth, f.support_vars().len(), f.monomials.len())
    };
    let kernel = m.left_kernel();
    let mut best = combo;
    let mut best_obj = objective(&build(&best));
    for _ in 0..8 {
        let mut improved = false;
        for k in &kernel {
            let trial: Vec<u32> = best.iter().zip(k).map(|(&a, &b)| (a + b) % n).collect();
            let obj = objective(&build(&trial));
            if obj < best_obj {
                best = trial;
                best_obj = obj;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(Some(build(&best)))
}

/// For each traced edge, collect the gate labels of the flow monomials whose
/// route from the insertion region crosses it (shortest paths in the node
/// graph).
fn trace_crossings(
    f_phys: &PhasePolynomial,
    origin: &[(usize, usize)],
    adj: &[Vec<(usize, String)>],
    sources: &BTreeSet<usize>,
    n: u32,
) -> Vec<(String, Vec<String>)> {
    // BFS parents from the source set.
    let mut parent: Vec<Option<(usize, String)>> = vec![None; adj.len()];
    let mut seen: Vec<bool> = vec![false; adj.len()];
    let mut queue: std::collections::VecDeque<usize> = sources.iter().copied().collect();
    for &s in sources {
        seen[s] = true;
    }
    while let Some(u) = queue.pop_front() {
        let mut next: Vec<(usize, String)> = adj[u].clone();
        next.sort();
        for (v, label) in next {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, label));
                queue.push_back(v);
            }
        }
    }
    let mut crossings: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (mono, &c) in &f_phys.monomials {
        if mono.is_empty() {
            continue;
        }
        let label = gate_label(mono.len(), c, n);
        let mut edges: BTreeSet<String> = BTreeSet::new();
        for &v in mono {
            let mut node = origin[v as usize].0;
            while let Some((p, e)) = &parent[node] {
                edges.insert(e.clone());
                node = *p;
            }
        }
        for e in edges {
            crossings.entry(e).or_default().push(label.clone());
        }
    }
    crossings.into_iter().collect()
}

/// Whether a set of flows can run in parallel: their physical supports are
/// disjoint, or every overlap is between diagonal implementations (which
/// commute and merge by coefficient addition).
#[derive(Debug, Clone)]
pub struct DisjointnessReport {
    pub disjoint: bool,
    pub overlap_legs: Vec<usize>,
    /// The combined implementation (coefficient sum of all flows).
    pub merged: PhasePolynomial,
}

pub fn flow_disjointness(flows: &[OperatorFlow]) -> DisjointnessReport {
    assert!(!flows.is_empty());
    let n = flows[0].physical.modulus;
    let vars = flows[0].physical.n_vars;
    let mut merged = PhasePolynomial::zero(n, vars);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for f in flows {
        assert_eq!(f.physical.modulus, n);
        assert_eq!(f.physical.n_vars, vars);
        merged = merged.add(&f.physical);
        for leg in f.support() {
            *counts.entry(leg).or_insert(0) += 1;
        }
    }
    let overlap_legs: Vec<usize> =
        counts.iter().filter(|(_, &c)| c > 1).map(|(&l, _)| l).collect();
    DisjointnessReport { disjoint: overlap_legs.is_empty(), overlap_legs, merged }
}

/// Declared error-handling capability of one network node: a distance-`d`
/// block corrects ⌊(d−1)/2⌋ arbitrary errors and detects up to `d−1`; a node
/// with a `handoff` forwards detected (hence located) errors to the named
/// node, which corrects up to `d−1` located errors.
#[derive(Debug, Clone)]
pub struct NodeFtModel {
    pub distance: usize,
    pub handoff: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct FtReport {
    pub ft: bool,
    pub failures: Vec<String>,
}

/// Propagate every single-leg error through the flow's entangling factors and
/// check that each resulting pattern stays within the per-node correction
/// capacities, allowing detection-then-located-correction chains.
pub fn error_propagation_check(flow: &OperatorFlow, models: &[NodeFtModel]) -> FtReport {
    let mut failures = Vec::new();
    for &leg in &flow.support() {
        // One fault on `leg`; entangling factors spread it to their partners.
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        *counts.entry(flow.physical_origin[leg].0).or_insert(0) += 1;
        for mono in flow.physical.monomials.keys() {
            if mono.len() >= 2 && mono.contains(&(leg as u16)) {
                for &v in mono {
                    if v as usize != leg {
                        *counts.entry(flow.physical_origin[v as usize].0).or_insert(0) += 1;
                    }
                }
            }
        }
        let mut located: BTreeMap<usize, usize> = BTreeMap::new();
        let mut ok = true;
        for (&node, &e) in &counts {
            let model = &models[node];
            let d = model.distance;
            if e <= (d.saturating_sub(1)) / 2 {
                continue;
            }
            if e <= d.saturating_sub(1) {
                if let Some(w) = model.handoff {
                    *located.entry(w).or_insert(0) += e;
                    continue;
                }
            }
            failures.push(format!(
                "error on leg {leg}: node {node} receives {e} errors beyond its capacity"
            ));
            ok = false;
        }
        if !ok {
            continue;
        }
        for (&w, &l) in &located {
            let own = counts.get(&w).copied().unwrap_or(0);
            let d = models[w].distance;
            if 2 * own + l > d.saturating_sub(1) {
                failures.push(format!(
                    "error on leg {leg}: node {w} must fix {l} located and {own} own errors \
                     but has distance {d}"
                ));
            }
        }
    }
    FtReport { ft: failures.is_empty(), failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;

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

    fn code_513() -> LegoBlock {
        LegoBlock::from_code(
            "code_513",
            5,
            vec![p("XZZXI"), p("IXZZX"), p("XIXZZ"), p("ZXIXZ")],
            vec![p("XXXXX")],
            vec![p("ZZZZZ")],
        )
        .unwrap()
    }

    #[test]
    fn steane_choi_transversal_h() {
        let b = steane();
        let h = CliffordGate::named("H").unwrap();
        let legs: Vec<usize> = (0..b.n_legs()).collect();
        let u = CliffordProductSymmetry::bitwise(&h, &legs).unwrap();
        assert!(verify_clifford_symmetry(&b.tableau, &u).unwrap().is_symmetry());
    }

    #[test]
    fn code_513_sh_registered_form() {
        // (SH)* on the logical leg together with SH on the five physical legs.
        let b = code_513();
        let sh = CliffordGate::named("SH").unwrap();
        let mut factors = vec![(vec![0usize], sh.entrywise_conjugate())];
        for l in 1..=5 {
            factors.push((vec![l], sh.clone()));
        }
        let u = CliffordProductSymmetry::new(factors).unwrap();
        assert!(verify_clifford_symmetry(&b.tableau, &u).unwrap().is_symmetry());
        // Plain SH on all legs (without conjugating the logical side) fails.
        let legs: Vec<usize> = (0..6).collect();
        let plain = CliffordProductSymmetry::bitwise(&sh, &legs).unwrap();
        assert!(!verify_clifford_symmetry(&b.tableau, &plain).unwrap().is_symmetry());
    }

    #[test]
    fn bell_swap_two_leg_factor() {
        let t = StabilizerTableau::parse(None, "+XX\n+ZZ").unwrap();
        let swap = CliffordGate::named("SWAP").unwrap();
        let u = CliffordProductSymmetry::new(vec![(vec![0, 1], swap)]).unwrap();
        assert!(verify_clifford_symmetry(&t, &u).unwrap().is_symmetry());
    }

    #[test]
    fn k3_on_stacked_513() {
        // The three-copy interblock gate: K₃ on every thickened physical group
        // and K₃* on the logical group is a symmetry of stack(code_513, 3).
        let b = code_513().stack(3);
        let k3 = dense::matrix_to_clifford(&dense::k3_matrix(), 3);
        let mut factors = Vec::new();
        for leg in 0..6usize {
            let group = vec![leg, 6 + leg, 12 + leg];
            let gate = if leg == 0 { k3.entrywise_conjugate() } else { k3.clone() };
            factors.push((group, gate));
        }
        let u = CliffordProductSymmetry::new(factors).unwrap();
        assert!(verify_clifford_symmetry(&b.tableau, &u).unwrap().is_symmetry());
    }

    #[test]
    fn overlapping_factors_rejected() {
        let h = CliffordGate::named("H").unwrap();
        let err = CliffordProductSymmetry::new(vec![
            (vec![0], h.clone()),
            (vec![0], h),
        ]);
        assert_eq!(err, Err(CliffsymError::OverlappingFactors(0)));
    }

    #[test]
    fn clean_steane_logical_off_any_single_leg() {
        let b = steane();
        let xbar = p("XXXXXXX");
        for q in 0..7 {
            let cleaned = pauli_clean(&b, &xbar, &[q]).unwrap().unwrap();
            assert!(!cleaned.x.get(q) && !cleaned.z.get(q));
            // Still the same logical: differs from xbar by a stabilizer.
            let mut diff = cleaned.clone();
            diff.mul_assign(&xbar);
            let code = StabilizerTableau {
                n: 7,
                generators: code_stabilizers(&b),
            };
            assert!(matches!(
                code.group_member(&diff),
                Membership::SignConsistent | Membership::SignFlipped
            ));
        }
    }

    #[test]
    fn localized_422_logical_already_clean() {
        let b = LegoBlock::from_code(
            "c422",
            4,
            vec![p("XXXX"), p("ZZZZ")],
            vec![p("XIXI"), p("XXII")],
            vec![p("ZZII"), p("ZIZI")],
        )
        .unwrap();
        let z1 = p("ZZII");
        let cleaned = pauli_clean(&b, &z1, &[2, 3]).unwrap().unwrap();
        assert_eq!(cleaned, z1);
    }

    #[test]
    fn cleaning_off_everything_fails() {
        let b = steane();
        let xbar = p("XXXXXXX");
        assert_eq!(pauli_clean(&b, &xbar, &[0, 1, 2, 3, 4, 5, 6]).unwrap(), None);
        // Non-normalizer input is an error, not a None.
        assert!(pauli_clean(&b, &p("XIIIIII"), &[0]).is_err());
    }

    use crate::catalog::Catalog;
    use crate::network::{contract_network, LegRef, TraceNetwork};

    fn sh_node_symmetry(b: &LegoBlock) -> NodeSymmetry {
        let sh = CliffordGate::named("SH").unwrap();
        let mut factors = vec![(vec![0usize], sh.entrywise_conjugate())];
        for l in 1..b.n_legs() {
            factors.push((vec![l], sh.clone()));
        }
        NodeSymmetry::Clifford(CliffordProductSymmetry::new(factors).unwrap())
    }

    fn two_513_net(deform: Option<&str>) -> TraceNetwork {
        let c = Catalog::load().unwrap();
        let b = c.get("code_513").unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", b.clone());
        net.add_node("b", b);
        let gate = match deform {
            None => CliffordGate::identity(1),
            Some(g) => CliffordGate::named(g).unwrap(),
        };
        net.add_edge(LegRef { node: 0, leg: 5 }, LegRef { node: 1, leg: 5 }, gate);
        net
    }

    #[test]
    fn sh_matches_across_y_deformed_edge() {
        let net = two_513_net(Some("Y"));
        let syms: Vec<NodeSymmetry> =
            net.nodes.iter().map(|(_, b)| sh_node_symmetry(b)).collect();
        let out = propagate_matched_symmetry(&net, &syms).unwrap();
        let MatchOutcome::Matched(NodeSymmetry::Clifford(u)) = out else {
            panic!("expected a matched Clifford symmetry, got {out:?}");
        };
        // The induced symmetry covers all ten dangling legs of the [[8,2,3]].
        assert_eq!(u.support(), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn sh_mismatches_across_undeformed_edge() {
        let net = two_513_net(None);
        let syms: Vec<NodeSymmetry> =
            net.nodes.iter().map(|(_, b)| sh_node_symmetry(b)).collect();
        let out = propagate_matched_symmetry(&net, &syms).unwrap();
        assert!(matches!(out, MatchOutcome::EdgeMismatch { .. }));
    }

    fn two_ghz8_net(deform: Option<&str>) -> TraceNetwork {
        let c = Catalog::load().unwrap();
        let b = c.get("ghz(8)").unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", b.clone());
        net.add_node("b", b);
        let gate = match deform {
            None => CliffordGate::identity(1),
            Some(g) => CliffordGate::named(g).unwrap(),
        };
        net.add_edge(LegRef { node: 0, leg: 7 }, LegRef { node: 1, leg: 7 }, gate);
        net
    }

    #[test]
    fn t_fragments_match_across_x_deformed_edge() {
        use crate::phasepoly::PhasePolynomial;
        let net = two_ghz8_net(Some("X"));
        let t8 = NodeSymmetry::Diagonal(PhasePolynomial::linear_sum(8, 8, 1));
        let syms = vec![t8.clone(), t8.clone()];
        let out = propagate_matched_symmetry(&net, &syms).unwrap();
        let MatchOutcome::Matched(NodeSymmetry::Diagonal(f)) = out else {
            panic!("expected a matched diagonal symmetry, got {out:?}");
        };
        // T on each of the 14 surviving legs.
        assert_eq!(f, PhasePolynomial::linear_sum(8, 14, 1));
        // The same fragments fail across an undeformed edge.
        let net = two_ghz8_net(None);
        let out = propagate_matched_symmetry(&net, &syms).unwrap();
        assert!(matches!(out, MatchOutcome::EdgeMismatch { .. }));
    }

    #[test]
    fn push_cz_through_twin_steane() {
        use crate::phasepoly::{extract_logical_diagonal, PhasePolynomial};
        let c = Catalog::load().unwrap();
        let b = c.get("steane_713").unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", b.clone());
        net.add_node("b", b);
        net.add_edge(
            LegRef { node: 0, leg: 7 },
            LegRef { node: 1, leg: 7 },
            CliffordGate::identity(1),
        );
        let rep = contract_network(&net).unwrap();
        let target = PhasePolynomial::monomial(2, 2, &[0, 1], 1);
        let flow = push_operator(&net, &rep, &target, &PushOptions::default())
            .unwrap()
            .expect("a CZ flow exists through the traced pair");
        assert_eq!(
            extract_logical_diagonal(&rep.result, &flow.physical).unwrap(),
            target
        );
        // The implementation stays on the twelve dangling physical legs with
        // bounded depth, and touches both blocks.
        assert!(flow.support().len() <= 12);
        assert!(flow.depth() <= 2);
        assert_eq!(flow.touched_nodes(), vec![0, 1]);
        assert!(flow.report().contains("physical:"));
    }

    #[test]
    fn push_reports_no_flow_under_budget() {
        use crate::phasepoly::PhasePolynomial;
        let c = Catalog::load().unwrap();
        let b = c.get("steane_713").unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", b);
        let rep = contract_network(&net).unwrap();
        // Single-qubit phase gates alone cannot implement a logical T-type
        // gate on this block: with the degree capped at 1 the search exhausts
        // the network and reports no flow (not nonexistence in general).
        let target = PhasePolynomial::monomial(8, 1, &[0], 1);
        let opts = PushOptions { max_degree: 1, ..PushOptions::default() };
        let out = push_operator(&net, &rep, &target, &opts).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn degree_two_t_flow_on_steane_verified_densely() {
        use crate::phasepoly::PhasePolynomial;
        let c = Catalog::load().unwrap();
        let b = c.get("steane_713").unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", b);
        let rep = contract_network(&net).unwrap();
        // Allowing controlled-phase pairs opens up a genuine implementation;
        // cross-check the exact solver against dense numerics.
        let target = PhasePolynomial::monomial(8, 1, &[0], 1);
        let out = push_operator(&net, &rep, &target, &PushOptions::default()).unwrap();
        {
            let f = out.as_ref().expect("a degree-2 flow exists");
            // Cross-check the exact solver against dense numerics: the
            // physical diagonal composed with the conjugate logical diagonal
            // must preserve the Choi state up to a global phase.
            let psi = dense::statevector(&rep.result.tableau);
            let n_legs = rep.result.n_legs();
            let phys = rep.result.physical_legs();
            let mut full = f
                .physical
                .reindexed(&phys.iter().map(|&p| p as u16).collect::<Vec<_>>(), n_legs);
            full = full.add(&target.reindexed(&[0], n_legs));
            let mut phased = psi.clone();
            for (idx, amp) in phased.iter_mut().enumerate() {
                let mut point = crate::pauli::BitVec::zeros(n_legs);
                for q in 0..n_legs {
                    // dense convention: qubit 0 is the most significant bit.
                    point.set(q, (idx >> (n_legs - 1 - q)) & 1 == 1);
                }
                let c = full.evaluate(&point);
                let angle = 2.0 * std::f64::consts::PI * (c as f64) / 8.0;
                *amp *= num_complex::Complex64::new(angle.cos(), angle.sin());
            }
            assert!(
                dense::equal_up_to_phase(&psi, &phased),
                "solver produced an invalid flow: {}",
                f.physical.serialize()
            );
        }
    }

    fn manual_flow(
        physical: crate::phasepoly::PhasePolynomial,
        physical_origin: Vec<(usize, usize)>,
    ) -> OperatorFlow {
        OperatorFlow {
            logical: crate::phasepoly::PhasePolynomial::monomial(physical.modulus, 2, &[0, 1], 1),
            physical,
            physical_origin,
            node_names: vec!["a".into(), "b".into(), "c".into()],
            edge_crossings: Vec::new(),
        }
    }

    #[test]
    fn disjoint_flows_and_diagonal_merging() {
        use crate::phasepoly::PhasePolynomial;
        let origins = vec![(0, 0), (1, 0), (0, 1), (1, 1)];
        let f1 = manual_flow(PhasePolynomial::monomial(2, 4, &[0, 1], 1), origins.clone());
        let f2 = manual_flow(PhasePolynomial::monomial(2, 4, &[2, 3], 1), origins.clone());
        let rep = flow_disjointness(&[f1.clone(), f2]);
        assert!(rep.disjoint);
        assert_eq!(rep.merged.monomials.len(), 2);
        let f3 = manual_flow(PhasePolynomial::monomial(2, 4, &[0, 1], 1), origins);
        let rep = flow_disjointness(&[f1, f3]);
        assert!(!rep.disjoint);
        assert_eq!(rep.overlap_legs, vec![0, 1]);
        // Coefficients add mod N: two CZs on the same pair cancel.
        assert!(rep.merged.is_zero());
    }

    #[test]
    fn error_propagation_capacities() {
        use crate::phasepoly::PhasePolynomial;
        let origins = vec![(0, 0), (1, 0), (0, 1), (1, 1)];
        let flow = manual_flow(PhasePolynomial::monomial(2, 4, &[0, 1], 1), origins);
        // Distance-3 blocks absorb the propagated single error each.
        let d3 = NodeFtModel { distance: 3, handoff: None };
        let rep = error_propagation_check(&flow, &[d3.clone(), d3.clone(), d3.clone()]);
        assert!(rep.ft, "{:?}", rep.failures);
        // Distance-2 blocks only detect; with nowhere to hand off, not FT.
        let d2 = NodeFtModel { distance: 2, handoff: None };
        let rep = error_propagation_check(&flow, &[d2.clone(), d2.clone(), d3.clone()]);
        assert!(!rep.ft);
        // Detection followed by located correction at a distance-3 neighbor.
        let d2h = NodeFtModel { distance: 2, handoff: Some(2) };
        let rep = error_propagation_check(&flow, &[d2h.clone(), d2h, d3]);
        assert!(rep.ft, "{:?}", rep.failures);
    }
}
