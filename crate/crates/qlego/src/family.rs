//! Code-family builders.
//!
//! Every family is emitted as a [`TraceNetwork`] plus closed-form expected
//! parameters and a list of gate claims, so the same verification pipeline
//! (contraction, distance search, symmetry engines) applies to all of them:
//!
//! * line and planar lattices of deformed single traces (`sh_*`, `t_*`),
//! * line and tree detection-code families (`ccz_*`, `c832_*`, `w1222_*`),
//! * edge-inflated holographic codes (QRM, heterogeneous Steane-QRM, branch
//!   seeds, and their black-hole variants), and
//! * iterated fractal codes (GHZ fusion followed by concatenation).

use std::collections::BTreeMap;
use std::sync::Mutex;

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::analysis::{CodeParams, DistanceReport};
use crate::block::{build_branch_code, code_stabilizers, BlockError, LegoBlock};
use crate::catalog::{Catalog, CatalogError, BUILTIN_CATALOG};
use crate::clifford::{CliffordError, CliffordGate};
use crate::cliffsym::{
    verify_clifford_symmetry, CliffordProductSymmetry, CliffsymError, NodeFtModel, OperatorFlow,
};
use crate::network::{
    contract_network, ContractionReport, LegRef, NetworkError, TraceNetwork,
};
use crate::pauli::{BitVec, PauliOperator};
use crate::phasepoly::{
    affine_support, check_cleanable, extract_logical_diagonal, AffineSupport, PhaseError,
    PhasePolynomial, Powers,
};
use crate::tableau::{StabilizerTableau, TableauError};
use crate::{LegKind, LegRole};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("catalog error: {0}")]
    Catalog(#[from] CatalogError),
    #[error("network error: {0}")]
    Network(#[from] NetworkError),
    #[error("tableau error: {0}")]
    Tableau(#[from] TableauError),
    #[error("block error: {0}")]
    Block(#[from] BlockError),
    #[error("phase engine error: {0}")]
    Phase(#[from] PhaseError),
    #[error("clifford engine error: {0}")]
    Cliffsym(#[from] CliffsymError),
    #[error("clifford gate error: {0}")]
    Clifford(#[from] CliffordError),
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),
    #[error("seed '{seed}' fails the {gate} cleanability precondition")]
    SeedNotCleanable { seed: String, gate: String },
    #[error("constructed operator flow failed exact verification: {0}")]
    FlowInvalid(String),
}

/// The built-in atlas of atomic blocks, loaded (and fully re-validated) once.
static ATLAS: Lazy<Catalog> =
    Lazy::new(|| Catalog::from_text(BUILTIN_CATALOG).expect("built-in catalog validates"));

fn atom(name: &str) -> Result<LegoBlock, FamilyError> {
    Ok(ATLAS.get(name)?)
}

/// Memo of cleanability precondition checks, keyed by a description string.
static CLEAN_MEMO: Lazy<Mutex<BTreeMap<String, bool>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

// ---------------------------------------------------------------------------
// Family specification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    /// Chain of `l` [[5,1,3]] blocks over Y-deformed edges: [[3L+2, L, 3]].
    ShLine { l: usize },
    /// `l`×`l` grid of [[5,1,3]] blocks over Y-deformed edges: [[L²+4L, L², 3]].
    ShPlanar { l: usize },
    /// Chain of `l` [[15,1,3]] blocks over X-deformed edges: [[13L+2, L, 3]].
    TLine { l: usize },
    /// `l`×`l` grid of [[15,1,3]] blocks over X-deformed edges: [[11L²+4L, L², 3]].
    TPlanar { l: usize },
    /// Chain of `l` [[12,1,2]] blocks, undeformed edges: [[10L+2, L, 2]].
    CczLine { l: usize },
    /// Star of 13 [[12,1,2]] blocks (center fully saturated): [[132, 13, 2]].
    CczTree,
    /// Chain of `l`+1 [[8,3,2]] blocks, undeformed: [[6(L+1)+2, 3(L+1), 2]].
    C832Line { l: usize },
    /// `l` growth levels of [[8,3,2]] attached to every free physical leg:
    /// [[8·7^L, 4·7^L − 1, 2]].
    C832Tree { l: usize },
    /// Chain of `l`+1 [[12,2,2]] blocks, undeformed: [[10(L+1)+2, 2(L+1), 2]].
    W1222Line { l: usize },
    /// `l` growth levels of [[12,2,2]] attached to every free physical leg of
    /// the seed code state: [[12·11^L, (12/5)(11^L − 1), 2]].
    W1222Tree { l: usize },
    /// Finite-rate holographic QRM code: central encoding tensor plus `layers`
    /// inflation rings, every T1 keeping its own bulk leg.
    HoloQrm { layers: usize },
    /// As `HoloQrm` but T2 tensors carry no bulk qubit (rate-reduced).
    HoloQrmReduced { layers: usize },
    /// Black-hole QRM code: the central tensor is excised, all bulk legs sit
    /// on the horizon ring; `layers` counts rings including the horizon.
    HoloQrmBlackhole { layers: usize },
    /// Heterogeneous zero-rate code: central QRM tensor counted as layer 1,
    /// then alternating Steane (T1-only) and QRM (T1 and T2) rings.
    HoloSteaneQrm { layers: usize },
    /// Black-hole variant: horizon ring of Steane tensors, then alternating
    /// QRM / Steane rings.
    HoloSteaneQrmBlackhole { layers: usize },
    /// Finite-rate holographic code from (b, U)-branch seeds.
    HoloBranch { b: usize, layers: usize },
    /// Black-hole variant of the branch-seed holographic code.
    HoloBranchBlackhole { b: usize, layers: usize },
    /// Iterated fractal code: GHZ-fuse `f` copies of `base`, then concatenate
    /// every physical leg with `inner`, `iterations` times.
    Fractal { base: String, f: usize, inner: String, iterations: usize },
}

impl FamilySpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilySpec::ShLine { .. } => "sh_line",
            FamilySpec::ShPlanar { .. } => "sh_planar",
            FamilySpec::TLine { .. } => "t_line",
            FamilySpec::TPlanar { .. } => "t_planar",
            FamilySpec::CczLine { .. } => "ccz_line",
            FamilySpec::CczTree => "ccz_tree",
            FamilySpec::C832Line { .. } => "c832_line",
            FamilySpec::C832Tree { .. } => "c832_tree",
            FamilySpec::W1222Line { .. } => "w1222_line",
            FamilySpec::W1222Tree { .. } => "w1222_tree",
            FamilySpec::HoloQrm { .. } => "holo_qrm",
            FamilySpec::HoloQrmReduced { .. } => "holo_qrm_reduced",
            FamilySpec::HoloQrmBlackhole { .. } => "holo_qrm_blackhole",
            FamilySpec::HoloSteaneQrm { .. } => "holo_steane_qrm",
            FamilySpec::HoloSteaneQrmBlackhole { .. } => "holo_steane_qrm_blackhole",
            FamilySpec::HoloBranch { .. } => "holo_branch",
            FamilySpec::HoloBranchBlackhole { .. } => "holo_branch_blackhole",
            FamilySpec::Fractal { .. } => "fractal",
        }
    }

    /// Build a spec from CLI-style arguments: `--family name --L k
    /// [--layers r --seed s --branch b]`. For `fractal`, `--seed` names both
    /// the base and inner code, `--branch` is the fusion factor and
    /// `--layers` the iteration count.
    pub fn from_cli(
        family: &str,
        l: Option<usize>,
        layers: Option<usize>,
        seed: Option<&str>,
        branch: Option<usize>,
    ) -> Result<FamilySpec, FamilyError> {
        let need_l = || {
            l.ok_or_else(|| FamilyError::InvalidParameter(format!("{family} requires --L")))
        };
        let need_layers = |d: usize| layers.unwrap_or(d);
        Ok(match family {
            "sh_line" => FamilySpec::ShLine { l: need_l()? },
            "sh_planar" => FamilySpec::ShPlanar { l: need_l()? },
            "t_line" => FamilySpec::TLine { l: need_l()? },
            "t_planar" => FamilySpec::TPlanar { l: need_l()? },
            "ccz_line" => FamilySpec::CczLine { l: need_l()? },
            "ccz_tree" => FamilySpec::CczTree,
            "c832_line" => FamilySpec::C832Line { l: need_l()? },
            "c832_tree" => FamilySpec::C832Tree { l: need_l()? },
            "w1222_line" => FamilySpec::W1222Line { l: need_l()? },
            "w1222_tree" => FamilySpec::W1222Tree { l: need_l()? },
            "holo_qrm" => FamilySpec::HoloQrm { layers: need_layers(1) },
            "holo_qrm_reduced" => FamilySpec::HoloQrmReduced { layers: need_layers(1) },
            "holo_qrm_blackhole" => FamilySpec::HoloQrmBlackhole { layers: need_layers(1) },
            "holo_steane_qrm" => FamilySpec::HoloSteaneQrm { layers: need_layers(3) },
            "holo_steane_qrm_blackhole" => {
                FamilySpec::HoloSteaneQrmBlackhole { layers: need_layers(1) }
            }
            "holo_branch" => FamilySpec::HoloBranch {
                b: branch.unwrap_or(3),
                layers: need_layers(1),
            },
            "holo_branch_blackhole" => FamilySpec::HoloBranchBlackhole {
                b: branch.unwrap_or(3),
                layers: need_layers(1),
            },
            "fractal" => {
                let s = seed.unwrap_or("qrm_15").to_string();
                FamilySpec::Fractal {
                    base: s.clone(),
                    f: branch.unwrap_or(3),
                    inner: s,
                    iterations: need_layers(0),
                }
            }
            other => {
                return Err(FamilyError::InvalidParameter(format!("unknown family '{other}'")))
            }
        })
    }
}

/// A transversal / addressable gate supported by a family, as a claim for the
/// verification pipeline.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GateClaim {
    pub gate: String,
    pub scope: String,
    pub detail: String,
}

fn claim(gate: &str, scope: &str, detail: &str) -> GateClaim {
    GateClaim { gate: gate.into(), scope: scope.into(), detail: detail.into() }
}

// ---------------------------------------------------------------------------
// Elementary network shapes
// ---------------------------------------------------------------------------

fn chain(block: &LegoBlock, count: usize, out_leg: usize, in_leg: usize, deform: &CliffordGate) -> TraceNetwork {
    let mut net = TraceNetwork::new();
    for i in 0..count {
        net.add_node(format!("b{i}"), block.clone());
    }
    for i in 0..count.saturating_sub(1) {
        net.add_edge(
            LegRef { node: i, leg: out_leg },
            LegRef { node: i + 1, leg: in_leg },
            deform.clone(),
        );
    }
    net
}

/// `l`×`l` grid; nodes emitted column-major so that the contraction order
/// follows the boundary-first isometric sequence. Physical legs 1..=4 serve
/// as the west/east/north/south couplers.
fn grid(block: &LegoBlock, l: usize, deform: &CliffordGate) -> TraceNetwork {
    const W: usize = 1;
    const E: usize = 2;
    const N: usize = 3;
    const S: usize = 4;
    let mut net = TraceNetwork::new();
    let idx = |c: usize, r: usize| c * l + r;
    for c in 0..l {
        for r in 0..l {
            net.add_node(format!("g{c}_{r}"), block.clone());
        }
    }
    for c in 0..l {
        for r in 0..l {
            if c + 1 < l {
                net.add_edge(
                    LegRef { node: idx(c, r), leg: E },
                    LegRef { node: idx(c + 1, r), leg: W },
                    deform.clone(),
                );
            }
            if r + 1 < l {
                net.add_edge(
                    LegRef { node: idx(c, r), leg: S },
                    LegRef { node: idx(c, r + 1), leg: N },
                    deform.clone(),
                );
            }
        }
    }
    net
}

/// Tree growth: starting from `base`, run `levels` rounds in which one copy
/// of `leaf` is attached (via `leaf_in`) to every free physical leg.
fn tree(base: &LegoBlock, leaf: &LegoBlock, leaf_in: usize, levels: usize) -> TraceNetwork {
    let ident = CliffordGate::identity(1);
    let mut net = TraceNetwork::new();
    net.add_node("root", base.clone());
    let mut frontier: Vec<LegRef> = base
        .physical_legs()
        .into_iter()
        .map(|leg| LegRef { node: 0, leg })
        .collect();
    for level in 1..=levels {
        let mut next = Vec::new();
        for (i, parent) in frontier.iter().enumerate() {
            let node = net.add_node(format!("l{level}_{i}"), leaf.clone());
            net.add_edge(*parent, LegRef { node, leg: leaf_in }, ident.clone());
            for leg in leaf.physical_legs() {
                if leg != leaf_in {
                    next.push(LegRef { node, leg });
                }
            }
        }
        frontier = next;
    }
    net
}

/// The code state of a block: its stabilizers together with one logical-Z
/// representative per encoded qubit, as a 0-logical block on the physical
/// qubits alone.
fn code_state(b: &LegoBlock) -> Result<LegoBlock, FamilyError> {
    let phys = b.physical_legs();
    let n = phys.len();
    let mut gens = code_stabilizers(b);
    for &l in &b.logical_legs() {
        let mut rep = b
            .logical_representative(l, 'Z')
            .ok_or_else(|| FamilyError::InvalidParameter("block has no logical Z".into()))?;
        rep.phase = 0;
        gens.push(rep);
    }
    Ok(LegoBlock {
        name: format!("{}_state", b.name),
        tableau: StabilizerTableau::new(n, gens)?,
        roles: vec![LegRole { kind: LegKind::Physical, group_id: None }; n],
        declared_params: None,
        registered_symmetries: Vec::new(),
    })
}

/// Dangling (physical, logical) leg counts of a network before contraction.
pub fn structural_params(net: &TraceNetwork) -> (usize, usize) {
    let mut used: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for (a, b, _) in &net.edges {
        used.insert((a.node, a.leg));
        used.insert((b.node, b.leg));
    }
    for (legs, _) in &net.hyperedges {
        for l in legs {
            used.insert((l.node, l.leg));
        }
    }
    let overrides: BTreeMap<(usize, usize), LegKind> = net
        .role_overrides
        .iter()
        .map(|(l, k)| ((l.node, l.leg), *k))
        .collect();
    let mut n = 0;
    let mut k = 0;
    for (ni, (_, block)) in net.nodes.iter().enumerate() {
        for (li, role) in block.roles.iter().enumerate() {
            if used.contains(&(ni, li)) {
                continue;
            }
            let kind = overrides.get(&(ni, li)).copied().unwrap_or(role.kind);
            match kind {
                LegKind::Physical => n += 1,
                LegKind::Logical => k += 1,
            }
        }
    }
    (n, k)
}

fn params(n: usize, k: usize, d: DistanceReport) -> CodeParams {
    CodeParams { n, k, d }
}

// ---------------------------------------------------------------------------
// Cleanability preconditions
// ---------------------------------------------------------------------------

/// Require that the gate given by `coeff`·x₁···x_arity (modulus `modulus`) on
/// the logical legs of `arity` stacked copies of `block` has a physical
/// representative, i.e. is cleanable off the logical legs.
fn ensure_stacked_diagonal_cleanable(
    block: &LegoBlock,
    arity: usize,
    modulus: u32,
    coeff: u32,
    gate_name: &str,
) -> Result<(), FamilyError> {
    let key = format!("{}:{}x{}:{}/{}", block.name, gate_name, arity, coeff, modulus);
    if let Some(&ok) = CLEAN_MEMO.lock().unwrap().get(&key) {
        return if ok {
            Ok(())
        } else {
            Err(FamilyError::SeedNotCleanable { seed: block.name.clone(), gate: gate_name.into() })
        };
    }
    let stacked = if arity == 1 { block.clone() } else { block.stack(arity) };
    let legs: Vec<usize> = stacked.logical_legs();
    let vars: Vec<u16> = legs.iter().map(|&l| l as u16).collect();
    let template = PhasePolynomial::monomial(modulus, stacked.n_legs(), &vars, coeff);
    let report = check_cleanable(&stacked, &legs, &template, Powers::All, arity.max(1), 100_000)?;
    CLEAN_MEMO.lock().unwrap().insert(key, report.cleanable);
    if report.cleanable {
        Ok(())
    } else {
        Err(FamilyError::SeedNotCleanable { seed: block.name.clone(), gate: gate_name.into() })
    }
}

fn ensure_cz_pair_cleanable(block: &LegoBlock) -> Result<(), FamilyError> {
    ensure_stacked_diagonal_cleanable(block, 2, 2, 1, "CZ")
}

// ---------------------------------------------------------------------------
// build_family
// ---------------------------------------------------------------------------

pub fn build_family(
    spec: &FamilySpec,
) -> Result<(TraceNetwork, CodeParams, Vec<GateClaim>), FamilyError> {
    let ident = CliffordGate::identity(1);
    match spec {
        FamilySpec::ShLine { l } => {
            let l = positive(*l, "L")?;
            let b = atom("code_513")?;
            let net = chain(&b, l, 5, 1, &CliffordGate::named("Y")?);
            let expected = params(3 * l + 2, l, DistanceReport::Computed(3));
            Ok((net, expected, vec![
                claim("SH", "global-bitwise", "bitwise SH on all physical legs acts as an SH-type logical on every encoded qubit"),
                claim("K3", "interblock", "the three-copy K3 gate applied bitwise maps three code copies to themselves"),
            ]))
        }
        FamilySpec::ShPlanar { l } => {
            let l = positive(*l, "L")?;
            let b = atom("code_513")?;
            let net = grid(&b, l, &CliffordGate::named("Y")?);
            let expected = params(l * l + 4 * l, l * l, DistanceReport::Computed(3));
            Ok((net, expected, vec![
                claim("SH", "global-bitwise", "bitwise SH on all physical legs acts as an SH-type logical on every encoded qubit"),
                claim("K3", "interblock", "the three-copy K3 gate applied bitwise maps three code copies to themselves"),
            ]))
        }
        FamilySpec::TLine { l } => {
            let l = positive(*l, "L")?;
            let b = atom("qrm_15")?;
            let net = chain(&b, l, 15, 1, &CliffordGate::named("X")?);
            let expected = params(13 * l + 2, l, DistanceReport::Computed(3));
            Ok((net, expected, vec![claim(
                "T",
                "global-bitwise",
                "bitwise T on all physical legs acts as a T-type logical on every encoded qubit",
            )]))
        }
        FamilySpec::TPlanar { l } => {
            let l = positive(*l, "L")?;
            let b = atom("qrm_15")?;
            let net = grid(&b, l, &CliffordGate::named("X")?);
            let expected = params(11 * l * l + 4 * l, l * l, DistanceReport::Computed(3));
            Ok((net, expected, vec![claim(
                "T",
                "global-bitwise",
                "bitwise T on all physical legs acts as a T-type logical on every encoded qubit",
            )]))
        }
        FamilySpec::CczLine { l } => {
            let l = positive(*l, "L")?;
            let b = atom("vasmer_12_1_2")?;
            let net = chain(&b, l, 12, 1, &ident);
            let expected = params(10 * l + 2, l, DistanceReport::Computed(2));
            Ok((net, expected, vec![claim(
                "CCZ",
                "interblock",
                "bitwise CCZ across three code copies acts as CCZ on each aligned logical triple",
            )]))
        }
        FamilySpec::CczTree => {
            let b = atom("vasmer_12_1_2")?;
            let mut net = TraceNetwork::new();
            net.add_node("center", b.clone());
            for j in 1..=12 {
                let node = net.add_node(format!("leaf{j}"), b.clone());
                net.add_edge(
                    LegRef { node: 0, leg: j },
                    LegRef { node, leg: 1 },
                    ident.clone(),
                );
            }
            let expected = params(132, 13, DistanceReport::Computed(2));
            Ok((net, expected, vec![claim(
                "CCZ",
                "interblock",
                "bitwise CCZ across three code copies acts as CCZ on each aligned logical triple",
            )]))
        }
        FamilySpec::C832Line { l } => {
            let l = positive(*l, "L")?;
            let b = atom("code_832")?;
            let blocks = l + 1;
            let net = chain(&b, blocks, 10, 3, &ident);
            let expected = params(6 * blocks + 2, 3 * blocks, DistanceReport::Computed(2));
            Ok((net, expected, vec![claim(
                "CCZ",
                "intrablock",
                "a T-power pattern implements CCZ on each block's own logical triple",
            )]))
        }
        FamilySpec::C832Tree { l } => {
            let b = atom("code_832")?;
            let net = tree(&b, &b, 3, *l);
            let pow = 7usize.pow(*l as u32);
            let expected = params(8 * pow, 4 * pow - 1, DistanceReport::Computed(2));
            Ok((net, expected, vec![claim(
                "CCZ",
                "intrablock",
                "a T-power pattern implements CCZ on each block's own logical triple",
            )]))
        }
        FamilySpec::W1222Line { l } => {
            let l = positive(*l, "L")?;
            let b = atom("webster_12_2_2")?;
            let blocks = l + 1;
            let net = chain(&b, blocks, 13, 2, &ident);
            let expected = params(10 * blocks + 2, 2 * blocks, DistanceReport::Computed(2));
            Ok((net, expected, vec![claim(
                "CS",
                "intrablock",
                "a T-power pattern implements CS on each block's own logical pair",
            )]))
        }
        FamilySpec::W1222Tree { l } => {
            let b = atom("webster_12_2_2")?;
            let base = code_state(&b)?;
            let net = tree(&base, &b, 2, *l);
            let pow = 11usize.pow(*l as u32);
            let expected = params(12 * pow, 12 * (pow - 1) / 5, DistanceReport::Computed(2));
            Ok((net, expected, vec![claim(
                "CS",
                "intrablock",
                "a T-power pattern implements CS on each block's own logical pair",
            )]))
        }
        FamilySpec::Fractal { base, f, inner, iterations } => {
            let base_block = atom(base)?;
            let inner_block = atom(inner)?;
            let (net, expected) = build_fractal(&base_block, *f, &inner_block, *iterations)?;
            Ok((net, expected, vec![claim(
                "CZ",
                "intrablock-addressable",
                "for every pair of fused logical qubits a CZ supported on exactly two branches exists",
            )]))
        }
        _ => {
            let (net, layout) = build_holographic(spec)?;
            let (n, k) = structural_params(&net);
            let d = match spec {
                FamilySpec::HoloQrmBlackhole { layers: 1 } => DistanceReport::Computed(3),
                FamilySpec::HoloSteaneQrmBlackhole { layers: 1 } => DistanceReport::Computed(3),
                _ => DistanceReport::Bounded { lo: 1, hi: n },
            };
            let claims = match spec {
                FamilySpec::HoloSteaneQrm { .. } => vec![claim(
                    "CZ",
                    "interblock",
                    "the logical CZ between two code copies flows to a boundary-supported CZ pattern",
                )],
                FamilySpec::HoloBranch { .. } | FamilySpec::HoloBranchBlackhole { .. } => {
                    vec![claim(
                        "T",
                        "addressable",
                        "each bulk qubit admits an addressable T flow to the boundary",
                    )]
                }
                _ => vec![claim(
                    "CZ",
                    "intrablock",
                    "CZ between any two bulk qubits flows to a boundary-supported CZ pattern",
                )],
            };
            drop(layout);
            Ok((net, params(n, k, d), claims))
        }
    }
}

fn positive(v: usize, name: &str) -> Result<usize, FamilyError> {
    if v == 0 {
        Err(FamilyError::InvalidParameter(format!("{name} must be positive")))
    } else {
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Holographic builders
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoloRole {
    /// Central tensor (zero-rate families).
    Center,
    /// Horizon tensor of a black-hole code (bulk leg dangles at the horizon).
    Horizon,
    /// Inflation tensor with one inward leg.
    T1,
    /// Inflation tensor with two inward legs (from distinct neighbours).
    T2,
}

#[derive(Debug, Clone)]
pub struct HoloNode {
    pub role: HoloRole,
    pub layer: usize,
    pub inward: Vec<usize>,
    pub outward: Vec<usize>,
    pub bulk: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct HoloLayout {
    pub nodes: Vec<HoloNode>,
}

impl HoloLayout {
    pub fn layers(&self) -> usize {
        self.nodes.iter().map(|n| n.layer).max().unwrap_or(0)
    }

    /// All dangling bulk legs, in node order.
    pub fn bulk_legs(&self) -> Vec<LegRef> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for &leg in &n.bulk {
                out.push(LegRef { node: i, leg });
            }
        }
        out
    }
}

/// Ring recipe for one inflation step.
struct RingSpec {
    t1: LegoBlock,
    t1_in: usize,
    t1_bulk: Option<usize>,
    /// (block, first inward leg, second inward leg, bulk legs)
    t2: Option<(LegoBlock, usize, usize, Vec<usize>)>,
}

fn outward_legs(block: &LegoBlock, exclude: &[usize]) -> Vec<usize> {
    (0..block.n_legs()).filter(|l| !exclude.contains(l)).collect()
}

/// Contract one ring onto the frontier. `groups` holds the previous ring's
/// outward legs grouped per node in cyclic order; returns the new frontier.
fn inflate_ring(
    net: &mut TraceNetwork,
    layout: &mut HoloLayout,
    groups: Vec<Vec<LegRef>>,
    ring: &RingSpec,
    layer: usize,
) -> Vec<Vec<LegRef>> {
    let ident = CliffordGate::identity(1);
    let p = groups.len();
    // Mark the junction legs consumed by T2 tensors.
    let mut junction: Vec<Option<(LegRef, LegRef)>> = vec![None; p];
    let use_t2 = ring.t2.is_some() && p >= 2 && groups.iter().all(|g| g.len() >= 2);
    if use_t2 {
        for j in 0..p {
            let a = *groups[j].last().unwrap();
            let b = *groups[(j + 1) % p].first().unwrap();
            junction[j] = Some((a, b));
        }
    }
    let mut next = Vec::new();
    for j in 0..p {
        let skip_first = use_t2; // consumed by junction j-1
        let skip_last = use_t2; // consumed by junction j
        let legs = &groups[j];
        let lo = usize::from(skip_first);
        let hi = legs.len() - usize::from(skip_last);
        for (i, parent) in legs[lo..hi].iter().enumerate() {
            let mut exclude = vec![ring.t1_in];
            if let Some(b) = ring.t1_bulk {
                exclude.push(b);
            }
            let node = net.add_node(format!("t1_{layer}_{j}_{i}"), ring.t1.clone());
            net.add_edge(*parent, LegRef { node, leg: ring.t1_in }, ident.clone());
            let outward = outward_legs(&ring.t1, &exclude);
            layout.nodes.push(HoloNode {
                role: HoloRole::T1,
                layer,
                inward: vec![ring.t1_in],
                outward: outward.clone(),
                bulk: ring.t1_bulk.into_iter().collect(),
            });
            next.push(outward.into_iter().map(|leg| LegRef { node, leg }).collect());
        }
        if let Some((a, b)) = junction[j] {
            let (block, in_a, in_b, bulk) = ring.t2.as_ref().unwrap();
            let node = net.add_node(format!("t2_{layer}_{j}"), block.clone());
            net.add_edge(a, LegRef { node, leg: *in_a }, ident.clone());
            net.add_edge(b, LegRef { node, leg: *in_b }, ident.clone());
            let mut exclude = vec![*in_a, *in_b];
            exclude.extend_from_slice(bulk);
            let outward = outward_legs(block, &exclude);
            layout.nodes.push(HoloNode {
                role: HoloRole::T2,
                layer,
                inward: vec![*in_a, *in_b],
                outward: outward.clone(),
                bulk: bulk.clone(),
            });
            next.push(outward.into_iter().map(|leg| LegRef { node, leg }).collect());
        }
    }
    next
}

pub fn build_holographic(
    spec: &FamilySpec,
) -> Result<(TraceNetwork, HoloLayout), FamilyError> {
    match spec {
        FamilySpec::HoloQrm { layers } | FamilySpec::HoloQrmReduced { layers } => {
            let layers = positive(*layers, "layers")?;
            let qrm = atom("qrm_15")?;
            ensure_cz_pair_cleanable(&qrm)?;
            let reduced = matches!(spec, FamilySpec::HoloQrmReduced { .. });
            let mut net = TraceNetwork::new();
            let mut layout = HoloLayout { nodes: Vec::new() };
            net.add_node("center", qrm.clone());
            layout.nodes.push(HoloNode {
                role: HoloRole::Center,
                layer: 0,
                inward: vec![],
                outward: (1..=15).collect(),
                bulk: vec![0],
            });
            let mut groups =
                vec![(1..=15).map(|leg| LegRef { node: 0, leg }).collect::<Vec<_>>()];
            for layer in 1..=layers {
                let t2 = if layer >= 2 {
                    if reduced {
                        let state = qrm.dualize_legs(&[0], LegKind::Physical);
                        Some((named(state, "qrm_16_state"), 0, 15, vec![]))
                    } else {
                        Some((qrm.clone(), 15, 14, vec![0]))
                    }
                } else {
                    None
                };
                let ring = RingSpec { t1: qrm.clone(), t1_in: 15, t1_bulk: Some(0), t2 };
                groups = inflate_ring(&mut net, &mut layout, groups, &ring, layer);
            }
            Ok((net, layout))
        }
        FamilySpec::HoloQrmBlackhole { layers } => {
            let layers = positive(*layers, "layers")?;
            let qrm = atom("qrm_15")?;
            ensure_cz_pair_cleanable(&qrm)?;
            let (net, layout) = blackhole(&qrm, 15, |_| {
                let state = qrm.dualize_legs(&[0], LegKind::Physical);
                RingSpec {
                    t1: qrm.clone(),
                    t1_in: 15,
                    t1_bulk: None,
                    t2: Some((named(state, "qrm_16_state"), 0, 15, vec![])),
                }
            }, layers)?;
            Ok((net, layout))
        }
        FamilySpec::HoloSteaneQrm { layers } => {
            let layers = positive(*layers, "layers")?;
            let qrm = atom("qrm_15")?;
            let steane = atom("steane_713")?;
            ensure_cz_pair_cleanable(&qrm)?;
            ensure_cz_pair_cleanable(&steane)?;
            let mut net = TraceNetwork::new();
            let mut layout = HoloLayout { nodes: Vec::new() };
            net.add_node("center", qrm.clone());
            layout.nodes.push(HoloNode {
                role: HoloRole::Center,
                layer: 1,
                inward: vec![],
                outward: (1..=15).collect(),
                bulk: vec![0],
            });
            let mut groups =
                vec![(1..=15).map(|leg| LegRef { node: 0, leg }).collect::<Vec<_>>()];
            for layer in 2..=layers {
                let ring = steane_qrm_ring(&qrm, &steane, layer);
                groups = inflate_ring(&mut net, &mut layout, groups, &ring, layer);
            }
            Ok((net, layout))
        }
        FamilySpec::HoloSteaneQrmBlackhole { layers } => {
            let layers = positive(*layers, "layers")?;
            let qrm = atom("qrm_15")?;
            let steane = atom("steane_713")?;
            ensure_cz_pair_cleanable(&qrm)?;
            ensure_cz_pair_cleanable(&steane)?;
            let (net, layout) = blackhole(&steane, 15, |layer| {
                // Horizon is the Steane ring (layer 1); further rings
                // alternate QRM (with T2) and Steane.
                steane_qrm_ring(&qrm, &steane, layer + 1)
            }, layers)?;
            Ok((net, layout))
        }
        FamilySpec::HoloBranch { b, layers } | FamilySpec::HoloBranchBlackhole { b, layers } => {
            let layers = positive(*layers, "layers")?;
            let b = *b;
            if b < 3 {
                return Err(FamilyError::InvalidParameter(
                    "branch factor must be at least 3".into(),
                ));
            }
            let qrm = atom("qrm_15")?;
            let branch = build_branch_code(b, &qrm)?;
            ensure_stacked_diagonal_cleanable(&branch, 1, 8, 1, "T")?;
            let nb = branch.n_legs() - 1;
            let t2_state = branch.dualize_legs(&[0], LegKind::Physical);
            let ring = |_: usize| RingSpec {
                t1: branch.clone(),
                t1_in: nb,
                t1_bulk: None,
                t2: Some((named(t2_state.clone(), "branch_state"), 0, nb, vec![])),
            };
            if matches!(spec, FamilySpec::HoloBranchBlackhole { .. }) {
                return blackhole(&branch, nb, ring, layers);
            }
            let mut net = TraceNetwork::new();
            let mut layout = HoloLayout { nodes: Vec::new() };
            net.add_node("center", branch.clone());
            layout.nodes.push(HoloNode {
                role: HoloRole::Center,
                layer: 0,
                inward: vec![],
                outward: (1..=nb).collect(),
                bulk: vec![0],
            });
            let mut groups =
                vec![(1..=nb).map(|leg| LegRef { node: 0, leg }).collect::<Vec<_>>()];
            for layer in 1..=layers {
                let r = RingSpec {
                    t1: branch.clone(),
                    t1_in: nb,
                    t1_bulk: Some(0),
                    t2: if layer >= 2 { ring(layer).t2 } else { None },
                };
                groups = inflate_ring(&mut net, &mut layout, groups, &r, layer);
            }
            Ok((net, layout))
        }
        other => Err(FamilyError::InvalidParameter(format!(
            "{} is not a holographic family",
            other.family_name()
        ))),
    }
}

fn named(mut block: LegoBlock, name: &str) -> LegoBlock {
    block.name = name.to_string();
    block
}

fn steane_qrm_ring(qrm: &LegoBlock, steane: &LegoBlock, layer: usize) -> RingSpec {
    if layer % 2 == 0 {
        // Steane ring: concatenation orientation, T1 only.
        RingSpec { t1: steane.clone(), t1_in: 0, t1_bulk: None, t2: None }
    } else {
        // QRM ring: concatenation-oriented T1 plus stitching T2 tensors.
        let state = qrm.dualize_legs(&[0], LegKind::Physical);
        RingSpec {
            t1: qrm.clone(),
            t1_in: 0,
            t1_bulk: None,
            t2: Some((named(state, "qrm_16_state"), 0, 15, vec![])),
        }
    }
}

/// Black-hole scaffold: `m` horizon copies of `seed` with the bulk leg 0
/// dangling at the horizon, then `layers - 1` inflation rings.
fn blackhole(
    seed: &LegoBlock,
    m: usize,
    ring: impl Fn(usize) -> RingSpec,
    layers: usize,
) -> Result<(TraceNetwork, HoloLayout), FamilyError> {
    let mut net = TraceNetwork::new();
    let mut layout = HoloLayout { nodes: Vec::new() };
    let outward: Vec<usize> = (1..seed.n_legs()).collect();
    let mut groups = Vec::new();
    for j in 0..m {
        let node = net.add_node(format!("h{j}"), seed.clone());
        layout.nodes.push(HoloNode {
            role: HoloRole::Horizon,
            layer: 1,
            inward: vec![],
            outward: outward.clone(),
            bulk: vec![0],
        });
        groups.push(outward.iter().map(|&leg| LegRef { node, leg }).collect::<Vec<_>>());
    }
    for layer in 2..=layers {
        let r = ring(layer);
        groups = inflate_ring(&mut net, &mut layout, groups, &r, layer);
    }
    Ok((net, layout))
}

// ---------------------------------------------------------------------------
// Fractal builder
// ---------------------------------------------------------------------------

/// GHZ-fuse `f` copies of `base` on their last physical legs, then
/// concatenate every free physical leg with `inner`, `iterations` times.
pub fn build_fractal(
    base: &LegoBlock,
    f: usize,
    inner: &LegoBlock,
    iterations: usize,
) -> Result<(TraceNetwork, CodeParams), FamilyError> {
    if f < 2 {
        return Err(FamilyError::InvalidParameter("fusion factor must be at least 2".into()));
    }
    let (a, k0) = base.params_nk();
    if k0 == 0 {
        return Err(FamilyError::InvalidParameter("fractal base must encode qubits".into()));
    }
    ensure_stacked_diagonal_cleanable(base, 2, 2, 1, "CZ")?;
    let (m, ki) = inner.params_nk();
    if iterations > 0 {
        if ki != 1 {
            return Err(FamilyError::InvalidParameter(
                "fractal inner code must encode exactly one qubit".into(),
            ));
        }
        ensure_stacked_diagonal_cleanable(inner, 2, 2, 1, "CZ")?;
    }
    let ident = CliffordGate::identity(1);
    let mut net = TraceNetwork::new();
    let fused_leg = base.n_legs() - 1;
    let mut frontier: Vec<LegRef> = Vec::new();
    let mut fuse = Vec::new();
    for c in 0..f {
        let node = net.add_node(format!("base{c}"), base.clone());
        fuse.push(LegRef { node, leg: fused_leg });
        for leg in base.physical_legs() {
            if leg != fused_leg {
                frontier.push(LegRef { node, leg });
            }
        }
    }
    net.add_hyperedge(fuse, f);
    for level in 1..=iterations {
        let mut next = Vec::new();
        for (i, parent) in frontier.iter().enumerate() {
            let node = net.add_node(format!("c{level}_{i}"), inner.clone());
            net.add_edge(*parent, LegRef { node, leg: 0 }, ident.clone());
            for leg in inner.physical_legs() {
                next.push(LegRef { node, leg });
            }
        }
        frontier = next;
    }
    let d0 = base.declared_params.map(|(_, _, d)| d).unwrap_or(1);
    let dp = inner.declared_params.map(|(_, _, d)| d).unwrap_or(1);
    let n = f * (a - 1) * m.pow(iterations as u32);
    let k = f * k0;
    let d = d0 * dp.pow(iterations as u32);
    Ok((net, params(n, k, DistanceReport::Computed(d))))
}

/// Asymptotic rate/distance exponents of the iterated fractal family:
/// `[[N, K = O(N^α), D = O(N^β)]]` with an erasure exponent ε.
pub fn expected_exponents(f: usize, m: usize, d_prime: usize) -> (f64, f64, f64) {
    assert!(f >= 2 && m >= 2);
    let lf = (f as f64).ln();
    let lm = (m as f64).ln();
    let ld = (d_prime as f64).ln();
    let denom = lf + lm;
    (lf / denom, ld / denom, (lm - ld) / denom)
}

// ---------------------------------------------------------------------------
// Gate-claim verification helpers
// ---------------------------------------------------------------------------

/// All 24 single-qubit Clifford gates (up to phase), generated from H and S.
pub fn single_qubit_cliffords() -> Vec<CliffordGate> {
    let h = CliffordGate::named("H").unwrap();
    let s = CliffordGate::named("S").unwrap();
    let x = PauliOperator::single_x(1, 0);
    let z = PauliOperator::single_z(1, 0);
    let key = |g: &CliffordGate| {
        format!("{:?}|{:?}", g.conjugate(&x).unwrap(), g.conjugate(&z).unwrap())
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = vec![CliffordGate::identity(1)];
    seen.insert(key(&out[0]));
    let mut i = 0;
    while i < out.len() {
        for gen in [&h, &s] {
            let g = out[i].compose(gen).unwrap();
            if seen.insert(key(&g)) {
                out.push(g);
            }
        }
        i += 1;
    }
    out
}

/// Check whether `gate` applied bitwise to every physical leg of `block` is a
/// symmetry once a uniform single-qubit logical action is applied to the
/// logical legs; returns that logical action if one exists.
pub fn verify_bitwise_clifford(block: &LegoBlock, gate: &CliffordGate) -> Option<CliffordGate> {
    let phys = block.physical_legs();
    let logical = block.logical_legs();
    for cand in single_qubit_cliffords() {
        let mut factors: Vec<(Vec<usize>, CliffordGate)> =
            phys.iter().map(|&l| (vec![l], gate.clone())).collect();
        factors.extend(logical.iter().map(|&l| (vec![l], cand.clone())));
        let sym = CliffordProductSymmetry::new(factors).unwrap();
        if let Ok(report) = verify_clifford_symmetry(&block.tableau, &sym) {
            if report.is_symmetry() {
                return Some(cand);
            }
        }
    }
    None
}

/// Extract the logical action of uniform bitwise phase gates `coeff`·x on all
/// physical legs.
pub fn verify_bitwise_diagonal(
    block: &LegoBlock,
    modulus: u32,
    coeff: u32,
) -> Result<PhasePolynomial, FamilyError> {
    let phys = block.physical_legs();
    let mut f = PhasePolynomial::zero(modulus, phys.len());
    for i in 0..phys.len() {
        f.add_term(&[i as u16], coeff);
    }
    Ok(extract_logical_diagonal(block, &f)?)
}

// ---------------------------------------------------------------------------
// Holographic CZ operator flows
// ---------------------------------------------------------------------------

/// Interblock CZ flow summary: the pattern of physical CZ gates between two
/// code copies, with per-layer crossing counts.
#[derive(Debug, Clone)]
pub struct CzFlow {
    /// Physical CZ monomials as per-copy leg positions: `(p, q)` means a CZ
    /// between copy A's leg `p` and copy B's leg `q`.
    pub pairs: Vec<(LegRef, LegRef)>,
    /// Number of monomials emitted by the tensors of each layer.
    pub crossings_per_layer: BTreeMap<usize, usize>,
}

impl CzFlow {
    /// Distinct legs touched per copy.
    pub fn legs_touched(&self) -> usize {
        let mut set = std::collections::HashSet::new();
        for (a, b) in &self.pairs {
            set.insert((0usize, a.node, a.leg));
            set.insert((1usize, b.node, b.leg));
        }
        let per_a = set.iter().filter(|(c, _, _)| *c == 0).count();
        per_a.max(set.len() - per_a)
    }
}

fn edge_map(net: &TraceNetwork) -> Result<BTreeMap<(usize, usize), (usize, usize)>, FamilyError> {
    let mut map = BTreeMap::new();
    let x = PauliOperator::single_x(1, 0);
    let z = PauliOperator::single_z(1, 0);
    for (a, b, g) in &net.edges {
        let gx = g.conjugate(&x)?;
        let gz = g.conjugate(&z)?;
        if format!("{gx:?}") != format!("{x:?}") || format!("{gz:?}") != format!("{z:?}") {
            return Err(FamilyError::FlowInvalid(
                "flow construction requires undeformed edges".into(),
            ));
        }
        map.insert((a.node, a.leg), (b.node, b.leg));
        map.insert((b.node, b.leg), (a.node, a.leg));
    }
    Ok(map)
}

/// Local push rule: a mirrored CZ line enters `block` at `entry` (or at both
/// `entry` legs for a two-input tensor); returns the output legs carrying
/// aligned lines, or `None` if the block/entry combination is unsupported.
fn aligned_push_rule(name: &str, entry: usize) -> Option<Vec<usize>> {
    match (name, entry) {
        // QRM encoding tensor, logical entry: one tetrahedron face.
        ("qrm_15", 0) => Some((1..=7).collect()),
        // Steane encoding tensor, logical entry: CZ is completely transversal.
        ("steane_713", 0) => Some((1..=7).collect()),
        _ => None,
    }
}

/// Cross rule for a single line through a two-input [[16,0,4]] tensor: the
/// entry leg's Z-representative is supported on a halfspace avoiding the
/// other input, so the pair of mirrored lines becomes the full cross product
/// of that halfspace's output legs.
fn cross_push_rule(name: &str, entry: usize) -> Option<Vec<usize>> {
    match (name, entry) {
        ("qrm_16_state", 0) => Some(vec![2, 4, 6, 8, 10, 12, 14]),
        ("qrm_16_state", 15) => Some(vec![1, 3, 5, 7, 9, 11, 13]),
        _ => None,
    }
}

/// Propagate a mirrored logical CZ from `source` (a dangling logical leg) to
/// the boundary of `net`, layer by layer.
fn propagate_cz(
    net: &TraceNetwork,
    layout: &HoloLayout,
    source: LegRef,
) -> Result<CzFlow, FamilyError> {
    let edges = edge_map(net)?;
    let node_layer = |n: usize| layout.nodes[n].layer;
    let mut crossings: BTreeMap<usize, usize> = BTreeMap::new();
    // Seed: decompose the logical CZ on the source node itself.
    let src_block = &net.nodes[source.node].1;
    let outs = aligned_push_rule(&src_block.name, source.leg).ok_or_else(|| {
        FamilyError::FlowInvalid(format!(
            "no push rule for bulk leg {} of block {}",
            source.leg, src_block.name
        ))
    })?;
    *crossings.entry(node_layer(source.node)).or_insert(0) += outs.len();
    // Aligned lines waiting on a traced leg, keyed by consuming (node, leg).
    let mut done: Vec<(LegRef, LegRef)> = Vec::new();
    let mut pending: Vec<LegRef> = Vec::new();
    for leg in outs {
        pending.push(LegRef { node: source.node, leg });
    }
    while !pending.is_empty() {
        // Split into terminated lines and lines entering a next tensor.
        let mut by_node: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut still = Vec::new();
        for p in pending.drain(..) {
            match edges.get(&(p.node, p.leg)) {
                None => done.push((p, p)),
                Some(&(node, leg)) => by_node.entry(node).or_default().push(leg),
            }
        }
        for (node, mut entries) in by_node {
            entries.sort_unstable();
            entries.dedup();
            let block = &net.nodes[node].1;
            let layer = node_layer(node);
            if entries.len() == 2 && block.name == "qrm_16_state" {
                // Both inputs carry lines: bitwise CZ on all outputs.
                let outs: Vec<usize> =
                    (0..block.n_legs()).filter(|l| !entries.contains(l)).collect();
                *crossings.entry(layer).or_insert(0) += outs.len();
                for leg in outs {
                    still.push(LegRef { node, leg });
                }
            } else if entries.len() == 1 {
                let e = entries[0];
                if let Some(outs) = aligned_push_rule(&block.name, e) {
                    *crossings.entry(layer).or_insert(0) += outs.len();
                    for leg in outs {
                        still.push(LegRef { node, leg });
                    }
                } else if let Some(outs) = cross_push_rule(&block.name, e) {
                    *crossings.entry(layer).or_insert(0) += outs.len() * outs.len();
                    // Cross products terminate here: check the legs dangle.
                    for &u in &outs {
                        for &w in &outs {
                            let a = LegRef { node, leg: u };
                            let b = LegRef { node, leg: w };
                            if edges.contains_key(&(node, u)) || edges.contains_key(&(node, w)) {
                                return Err(FamilyError::FlowInvalid(
                                    "cross-product lines may not cross further edges".into(),
                                ));
                            }
                            done.push((a, b));
                        }
                    }
                } else {
                    return Err(FamilyError::FlowInvalid(format!(
                        "no push rule for entry leg {e} of block {}",
                        block.name
                    )));
                }
            } else {
                return Err(FamilyError::FlowInvalid(format!(
                    "unsupported entry pattern {entries:?} on block {}",
                    block.name
                )));
            }
        }
        pending = still;
    }
    Ok(CzFlow { pairs: done, crossings_per_layer: crossings })
}

/// Exact check that a degree-≤2 modulus-2 polynomial restricts to a constant
/// on the affine support: GF(2) quadratic-form accumulation over the free
/// variables (fast path for large contractions).
fn gf2_poly_is_constant_on(a: &AffineSupport, monomials: &[Vec<usize>]) -> bool {
    let r = a.dim();
    let col = |q: usize| -> BitVec {
        let mut v = BitVec::zeros(r);
        for (t, b) in a.basis.iter().enumerate() {
            if b.get(q) {
                v.set(t, true);
            }
        }
        v
    };
    let mut cache: BTreeMap<usize, (bool, BitVec)> = BTreeMap::new();
    let mut coord = |q: usize, cache: &mut BTreeMap<usize, (bool, BitVec)>| {
        cache.entry(q).or_insert_with(|| (a.basepoint.get(q), col(q))).clone()
    };
    let mut rows: Vec<BitVec> = vec![BitVec::zeros(r); r];
    let mut linear = BitVec::zeros(r);
    for mono in monomials {
        match mono.len() {
            0 => {}
            1 => {
                let (_, l) = coord(mono[0], &mut cache);
                linear.xor_assign(&l);
            }
            2 => {
                let (au, lu) = coord(mono[0], &mut cache);
                let (aw, lw) = coord(mono[1], &mut cache);
                if au {
                    linear.xor_assign(&lw);
                }
                if aw {
                    linear.xor_assign(&lu);
                }
                for i in 0..r {
                    if lu.get(i) {
                        rows[i].xor_assign(&lw);
                    }
                }
            }
            _ => panic!("gf2 fast path handles degree <= 2 only"),
        }
    }
    // x_i^2 = x_i over GF(2): fold the diagonal into the linear part; the
    // off-diagonal part must vanish symmetrically.
    for i in 0..r {
        if rows[i].get(i) {
            let cur = linear.get(i);
            linear.set(i, !cur);
        }
        for j in (i + 1)..r {
            if rows[i].get(j) != rows[j].get(i) {
                return false;
            }
        }
    }
    linear.is_zero()
}

/// Build the two-copy network for an interblock check, contract it, construct
/// the mirrored CZ flow from the first center/horizon bulk leg, and verify it
/// exactly on the contraction.
pub fn interblock_cz_flow(
    net: &TraceNetwork,
    layout: &HoloLayout,
    source: LegRef,
) -> Result<(ContractionReport, CzFlow), FamilyError> {
    let flow = propagate_cz(net, layout, source)?;
    let two = net.replicate(2);
    let rep = contract_network(&two)?;
    let stride = net.nodes.len();
    let mut pos: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (g, &(node, leg)) in rep.leg_origin.iter().enumerate() {
        pos.insert((node, leg), g);
    }
    let glob = |copy: usize, l: &LegRef| -> Result<usize, FamilyError> {
        pos.get(&(l.node + copy * stride, l.leg)).copied().ok_or_else(|| {
            FamilyError::FlowInvalid(format!("flow leg {l:?} did not survive contraction"))
        })
    };
    let mut monomials: Vec<Vec<usize>> = Vec::new();
    for (pa, pb) in &flow.pairs {
        monomials.push(vec![glob(0, pa)?, glob(1, pb)?]);
    }
    // The logical CZ itself, on the two copies' source legs.
    monomials.push(vec![glob(0, &source)?, glob(1, &source)?]);
    let a = affine_support(&rep.result.tableau);
    if !gf2_poly_is_constant_on(&a, &monomials) {
        return Err(FamilyError::FlowInvalid(
            "interblock CZ flow is not a symmetry of the two-copy contraction".into(),
        ));
    }
    // Sanity: the physical part alone must not already be a symmetry.
    monomials.pop();
    if gf2_poly_is_constant_on(&a, &monomials) {
        return Err(FamilyError::FlowInvalid(
            "physical CZ pattern is trivial on the two-copy contraction".into(),
        ));
    }
    Ok((rep, flow))
}

/// Construct and exactly verify the intrablock CZ flow between two bulk legs
/// of a contracted holographic network, returned as an [`OperatorFlow`] for
/// fault-tolerance analysis.
pub fn intrablock_cz_flow(
    net: &TraceNetwork,
    rep: &ContractionReport,
    a_leg: LegRef,
    b_leg: LegRef,
) -> Result<OperatorFlow, FamilyError> {
    let block_a = &net.nodes[a_leg.node].1;
    let block_b = &net.nodes[b_leg.node].1;
    let outs_a = aligned_push_rule(&block_a.name, a_leg.leg).ok_or_else(|| {
        FamilyError::FlowInvalid(format!("no push rule for block {}", block_a.name))
    })?;
    let outs_b = aligned_push_rule(&block_b.name, b_leg.leg).ok_or_else(|| {
        FamilyError::FlowInvalid(format!("no push rule for block {}", block_b.name))
    })?;
    if outs_a.len() != outs_b.len() {
        return Err(FamilyError::FlowInvalid("mismatched flow shapes".into()));
    }
    let mut pos: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (g, &(node, leg)) in rep.leg_origin.iter().enumerate() {
        pos.insert((node, leg), g);
    }
    let glob = |node: usize, leg: usize| -> Result<usize, FamilyError> {
        pos.get(&(node, leg)).copied().ok_or_else(|| {
            FamilyError::FlowInvalid(format!(
                "leg {leg} of node {node} did not survive contraction"
            ))
        })
    };
    let mut monomials: Vec<Vec<usize>> = Vec::new();
    for (&u, &w) in outs_a.iter().zip(&outs_b) {
        monomials.push(vec![glob(a_leg.node, u)?, glob(b_leg.node, w)?]);
    }
    monomials.push(vec![glob(a_leg.node, a_leg.leg)?, glob(b_leg.node, b_leg.leg)?]);
    let supp = affine_support(&rep.result.tableau);
    if !gf2_poly_is_constant_on(&supp, &monomials) {
        return Err(FamilyError::FlowInvalid(
            "intrablock CZ flow is not a symmetry of the contraction".into(),
        ));
    }
    monomials.pop();
    if gf2_poly_is_constant_on(&supp, &monomials) {
        return Err(FamilyError::FlowInvalid("physical CZ pattern is trivial".into()));
    }
    // Package as an OperatorFlow over physical/logical leg positions.
    let roles = &rep.result.roles;
    let phys_legs: Vec<usize> =
        (0..roles.len()).filter(|&l| roles[l].kind == LegKind::Physical).collect();
    let log_legs: Vec<usize> =
        (0..roles.len()).filter(|&l| roles[l].kind == LegKind::Logical).collect();
    let phys_pos: BTreeMap<usize, usize> =
        phys_legs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let log_pos: BTreeMap<usize, usize> =
        log_legs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut physical = PhasePolynomial::zero(2, phys_legs.len());
    for m in &monomials {
        let vars: Vec<u16> = m.iter().map(|g| phys_pos[g] as u16).collect();
        physical.add_term(&vars, 1);
    }
    let la = log_pos[&glob(a_leg.node, a_leg.leg)?] as u16;
    let lb = log_pos[&glob(b_leg.node, b_leg.leg)?] as u16;
    let logical = PhasePolynomial::monomial(2, log_legs.len(), &[la, lb], 1);
    let physical_origin: Vec<(usize, usize)> =
        phys_legs.iter().map(|&l| rep.leg_origin[l]).collect();
    let node_names: Vec<String> = net.nodes.iter().map(|(id, _)| id.clone()).collect();
    Ok(OperatorFlow {
        logical,
        physical,
        physical_origin,
        node_names,
        edge_crossings: Vec::new(),
    })
}

/// Per-node error-handling models for a holographic layout: each node's
/// capacity is the brute-force distance of its block with the inward legs
/// treated as extra encoded legs; T2 tensors hand detected errors to their
/// first inward neighbour.
pub fn holo_ft_models(
    net: &TraceNetwork,
    layout: &HoloLayout,
    cap: usize,
) -> Vec<crate::cliffsym::NodeFtModel> {
    use crate::analysis::distance_bruteforce;
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    for (a, b, _) in &net.edges {
        // Edges run parent -> child in the builders.
        parent.insert(b.node, a.node);
    }
    let mut dist_memo: BTreeMap<String, usize> = BTreeMap::new();
    layout
        .nodes
        .iter()
        .enumerate()
        .map(|(i, info)| {
            let block = &net.nodes[i].1;
            let key = format!("{}:{:?}", block.name, info.inward);
            let distance = *dist_memo.entry(key).or_insert_with(|| {
                let dual = block.dualize_legs(&info.inward, LegKind::Logical);
                let report = distance_bruteforce(&dual, cap);
                report.d.value().unwrap_or_else(|| report.d.lower_bound())
            });
            let handoff = if info.role == HoloRole::T2 { parent.get(&i).copied() } else { None };
            NodeFtModel { distance, handoff }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Claim verification (used by the CLI `verify` pipeline)
// ---------------------------------------------------------------------------

/// Check that bitwise `K3` on every aligned physical triple of three code
/// copies is a symmetry once some power of `K3` acts on the aligned logical
/// triples; returns true when such a logical action exists.
pub fn verify_interblock_k3(block: &LegoBlock) -> Result<bool, FamilyError> {
    let k3 = crate::catalog::resolve_gate("K3")?;
    let n = block.n_legs();
    let t3 = block.tableau.tensor(&block.tableau).tensor(&block.tableau);
    let phys = block.physical_legs();
    let logical = block.logical_legs();
    let logical_candidates = [
        k3.clone(),
        k3.entrywise_conjugate(),
        k3.compose(&k3)?,
        k3.inverse(),
        CliffordGate::identity(3),
    ];
    for cand in &logical_candidates {
        let mut factors: Vec<(Vec<usize>, CliffordGate)> = phys
            .iter()
            .map(|&l| (vec![l, l + n, l + 2 * n], k3.clone()))
            .collect();
        factors.extend(logical.iter().map(|&l| (vec![l, l + n, l + 2 * n], cand.clone())));
        let sym = CliffordProductSymmetry::new(factors)?;
        if let Ok(report) = verify_clifford_symmetry(&t3, &sym) {
            if report.is_symmetry() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Outcome of checking one claim: verdict plus a human-readable observation.
#[derive(Debug, Clone)]
pub struct ClaimOutcome {
    pub pass: bool,
    pub observed: String,
}

fn outcome(pass: bool, observed: impl Into<String>) -> ClaimOutcome {
    ClaimOutcome { pass, observed: observed.into() }
}

/// Run the verification procedure matching a family's gate claim against the
/// contracted network. Holographic claims rebuild the layered layout from the
/// family spec; all checks are exact.
pub fn verify_gate_claim(
    spec: &FamilySpec,
    net: &TraceNetwork,
    rep: &ContractionReport,
    claim: &GateClaim,
) -> Result<ClaimOutcome, FamilyError> {
    use crate::cliffsym::{push_operator, PushOptions};
    let (_, k) = rep.result.params_nk();
    match (claim.gate.as_str(), claim.scope.as_str()) {
        (gate, "global-bitwise") if gate != "T" => {
            let g = crate::catalog::resolve_gate(gate)?;
            match verify_bitwise_clifford(&rep.result, &g) {
                Some(logical) => Ok(outcome(
                    true,
                    format!("bitwise {gate} verified; logical factor {logical:?}"),
                )),
                None => Ok(outcome(false, format!("bitwise {gate} is not a symmetry"))),
            }
        }
        ("T", "global-bitwise") => {
            let logical = verify_bitwise_diagonal(&rep.result, 8, 1)?;
            let ok = logical.support_vars().len() == k
                && logical
                    .monomials
                    .iter()
                    .all(|(m, c)| m.len() == 1 && c % 2 == 1);
            Ok(outcome(
                ok,
                format!("bitwise T induces logical {}", logical.serialize()),
            ))
        }
        ("K3", "interblock") => {
            let ok = verify_interblock_k3(&rep.result)?;
            Ok(outcome(ok, if ok {
                "bitwise K3 on three copies verified".to_string()
            } else {
                "bitwise K3 on three copies is not a symmetry".to_string()
            }))
        }
        ("CCZ", "interblock") => {
            let three = net.replicate(3);
            let rep3 = contract_network(&three)?;
            let target =
                PhasePolynomial::monomial(2, 3 * k, &[0, k as u16, 2 * k as u16], 1);
            let opts = PushOptions { max_degree: 3, ..PushOptions::default() };
            match push_operator(&three, &rep3, &target, &opts)? {
                Some(flow) => Ok(outcome(
                    true,
                    format!(
                        "interblock CCZ flow found, depth {} support {}",
                        flow.depth(),
                        flow.support().len()
                    ),
                )),
                None => Ok(outcome(false, "no interblock CCZ flow".to_string())),
            }
        }
        ("CCZ", "intrablock") => {
            let opts = PushOptions { max_degree: 1, ..PushOptions::default() };
            for triple in [[0u16, 1, 2], [k as u16 - 3, k as u16 - 2, k as u16 - 1]] {
                let target = PhasePolynomial::monomial(8, k, &triple, 4);
                if push_operator(net, rep, &target, &opts)?.is_none() {
                    return Ok(outcome(
                        false,
                        format!("no intrablock CCZ flow for triple {triple:?}"),
                    ));
                }
            }
            Ok(outcome(true, "intrablock CCZ flows on first and last triples".to_string()))
        }
        ("CS", "intrablock") => {
            let opts = PushOptions { max_degree: 1, ..PushOptions::default() };
            for pair in [[0u16, 1], [k as u16 - 2, k as u16 - 1]] {
                let target = PhasePolynomial::monomial(8, k, &pair, 2);
                if push_operator(net, rep, &target, &opts)?.is_none() {
                    return Ok(outcome(
                        false,
                        format!("no intrablock CS flow for pair {pair:?}"),
                    ));
                }
            }
            Ok(outcome(true, "intrablock CS flows on first and last pairs".to_string()))
        }
        ("CZ", "intrablock-addressable") => {
            let FamilySpec::Fractal { base, f, iterations, .. } = spec else {
                return Err(FamilyError::FlowInvalid(
                    "addressable-CZ claim outside a fractal family".into(),
                ));
            };
            let (check_net, check_rep);
            let note;
            if *iterations == 0 {
                check_net = net.clone();
                check_rep = ContractionReport {
                    result: rep.result.clone(),
                    kernel_dimension: rep.kernel_dimension,
                    isometric: rep.isometric,
                    steps: rep.steps.clone(),
                    leg_origin: rep.leg_origin.clone(),
                };
                note = String::new();
            } else {
                // The addressable pattern is certified on the un-concatenated
                // fusion; concatenation preserves it branch by branch.
                let base_block = ATLAS.get(base)?;
                let (n0, _) = build_fractal(&base_block, *f, &base_block, 0)?;
                check_rep = contract_network(&n0)?;
                check_net = n0;
                note = " (certified on the iteration-0 fusion)".to_string();
            }
            let face = aligned_push_rule(&check_net.nodes[0].1.name, 0).ok_or_else(|| {
                FamilyError::FlowInvalid(format!(
                    "no face rule for base block {}",
                    check_net.nodes[0].1.name
                ))
            })?;
            let mut pos: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for (g, &(node, leg)) in check_rep.leg_origin.iter().enumerate() {
                pos.insert((node, leg), g);
            }
            let phys = check_rep.result.physical_legs();
            let phys_pos: BTreeMap<usize, usize> =
                phys.iter().enumerate().map(|(i, &l)| (l, i)).collect();
            for a in 0..*f {
                for b in (a + 1)..*f {
                    let mut poly = PhasePolynomial::zero(2, phys.len());
                    for &leg in &face {
                        let ga = phys_pos[&pos[&(a, leg)]] as u16;
                        let gb = phys_pos[&pos[&(b, leg)]] as u16;
                        poly.add_term(&[ga, gb], 1);
                    }
                    let logical = extract_logical_diagonal(&check_rep.result, &poly)?;
                    let expected = PhasePolynomial::monomial(2, *f, &[a as u16, b as u16], 1);
                    if logical != expected {
                        return Ok(outcome(
                            false,
                            format!("pair ({a},{b}) implements {}", logical.serialize()),
                        ));
                    }
                }
            }
            Ok(outcome(
                true,
                format!("addressable CZ verified on every logical pair{note}"),
            ))
        }
        ("CZ", "intrablock") => {
            let (hnet, layout) = build_holographic(spec)?;
            let hrep = contract_network(&hnet)?;
            let bulks: Vec<LegRef> = layout
                .bulk_legs()
                .into_iter()
                .filter(|l| layout.nodes[l.node].role != HoloRole::Center)
                .collect();
            if bulks.len() < 2 {
                return Err(FamilyError::FlowInvalid("fewer than two bulk legs".into()));
            }
            let flow = intrablock_cz_flow(&hnet, &hrep, bulks[0], bulks[1])?;
            Ok(outcome(
                flow.depth() == 1,
                format!(
                    "intrablock CZ flow depth {} support {}",
                    flow.depth(),
                    flow.support().len()
                ),
            ))
        }
        ("CZ", "interblock") => {
            let (hnet, layout) = build_holographic(spec)?;
            let (_, flow) = interblock_cz_flow(&hnet, &layout, LegRef { node: 0, leg: 0 })?;
            Ok(outcome(
                true,
                format!("interblock CZ flow with {} physical CZ pairs", flow.pairs.len()),
            ))
        }
        ("T", "addressable") => {
            // The branch-code builders refuse to construct the family unless
            // the seed's single-branch T cleanability certificates exist, so
            // a successful build is itself the certificate.
            build_holographic(spec)?;
            Ok(outcome(
                true,
                "seed cleanability certificates re-derived during build".to_string(),
            ))
        }
        (gate, scope) => Err(FamilyError::FlowInvalid(format!(
            "no verification rule for gate '{gate}' with scope '{scope}'"
        ))),
    }
}

/// The number of physical CZ pairs in the boundary implementation of the
/// interblock logical CZ of a holographic family.
pub fn interblock_cz_support(spec: &FamilySpec) -> Result<usize, FamilyError> {
    let (net, layout) = build_holographic(spec)?;
    let (_, flow) = interblock_cz_flow(&net, &layout, LegRef { node: 0, leg: 0 })?;
    Ok(flow.pairs.len())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::distance_bruteforce;
    use crate::cliffsym::{error_propagation_check, push_operator, PushOptions};

    fn build(spec: FamilySpec) -> (TraceNetwork, CodeParams, Vec<GateClaim>) {
        build_family(&spec).unwrap()
    }

    fn contract(net: &TraceNetwork) -> ContractionReport {
        contract_network(net).unwrap()
    }

    /// The report must pin the distance to exactly `d` (possibly through a
    /// weight-capped search that found a weight-`d` logical and nothing
    /// lighter).
    fn assert_distance(block: &LegoBlock, cap: usize, d: usize) {
        let report = distance_bruteforce(block, cap);
        match &report.d {
            DistanceReport::Computed(v) => assert_eq!(*v, d),
            DistanceReport::ComputedCss { dx, dz } => assert_eq!((*dx).min(*dz), d),
            DistanceReport::Bounded { lo, hi } => {
                assert!(*lo <= d && d <= *hi, "claimed {d} outside [{lo},{hi}]")
            }
            DistanceReport::NoLogicals => panic!("code has no logicals"),
        }
        assert!(report.d.lower_bound() >= d, "found a logical lighter than {d}");
    }

    #[test]
    fn sh_line_parameters_and_bitwise_sh() {
        for l in 1..=4 {
            let (net, expected, _) = build(FamilySpec::ShLine { l });
            let rep = contract(&net);
            assert!(rep.isometric, "sh_line L={l} not isometric");
            assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
            assert_eq!(expected.n, 3 * l + 2);
            assert_distance(&rep.result, 3, 3);
            let logical = verify_bitwise_clifford(&rep.result, &CliffordGate::named("SH").unwrap());
            assert!(logical.is_some(), "bitwise SH fails on sh_line L={l}");
        }
    }

    #[test]
    fn sh_line_prefixes_are_isometric() {
        // Boundary-first contraction order: every prefix of the chain is an
        // isometry.
        let (net, _, _) = build(FamilySpec::ShLine { l: 4 });
        for take in 1..=4 {
            let mut prefix = TraceNetwork::new();
            for (id, b) in net.nodes.iter().take(take) {
                prefix.add_node(id.clone(), b.clone());
            }
            for (a, b, g) in &net.edges {
                if a.node < take && b.node < take {
                    prefix.add_edge(*a, *b, g.clone());
                }
            }
            assert!(contract(&prefix).isometric, "prefix of {take} blocks not isometric");
        }
    }

    #[test]
    fn sh_planar_l2() {
        let (net, expected, _) = build(FamilySpec::ShPlanar { l: 2 });
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
        assert_eq!((expected.n, expected.k), (12, 4));
        assert_distance(&rep.result, 3, 3);
        assert!(
            verify_bitwise_clifford(&rep.result, &CliffordGate::named("SH").unwrap()).is_some()
        );
    }

    #[test]
    fn t_line_parameters_and_bitwise_t() {
        for l in 1..=2 {
            let (net, expected, _) = build(FamilySpec::TLine { l });
            let rep = contract(&net);
            assert!(rep.isometric);
            assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
            assert_eq!(expected.n, 13 * l + 2);
            assert_distance(&rep.result, 3, 3);
            let logical = verify_bitwise_diagonal(&rep.result, 8, 1).unwrap();
            // T-type logical on every encoded qubit: odd single-variable
            // coefficients, nothing else.
            assert_eq!(logical.support_vars().len(), l);
            for (mono, c) in &logical.monomials {
                assert_eq!(mono.len(), 1, "non-single logical term {mono:?}");
                assert_eq!(c % 2, 1, "non-unit T power {c}");
            }
        }
    }

    #[test]
    fn t_planar_l2_structure() {
        let (net, expected, _) = build(FamilySpec::TPlanar { l: 2 });
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
        assert_eq!((expected.n, expected.k), (52, 4));
    }

    #[test]
    fn ccz_line_parameters_and_interblock_ccz() {
        for l in 1..=2 {
            let (net, expected, _) = build(FamilySpec::CczLine { l });
            let rep = contract(&net);
            assert!(rep.isometric);
            assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
            assert_eq!(expected.n, 10 * l + 2);
            assert_distance(&rep.result, 2, 2);
            // Interblock CCZ: three copies, aligned logical triple 0.
            let three = net.replicate(3);
            let rep3 = contract(&three);
            let k = expected.k;
            let target = PhasePolynomial::monomial(2, 3 * k, &[0, k as u16, 2 * k as u16], 1);
            let opts = PushOptions { max_degree: 3, ..PushOptions::default() };
            let flow = push_operator(&three, &rep3, &target, &opts).unwrap();
            assert!(flow.is_some(), "no interblock CCZ flow for ccz_line L={l}");
        }
    }

    #[test]
    fn ccz_tree_parameters() {
        let (net, expected, _) = build(FamilySpec::CczTree);
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (132, 13));
        assert_eq!((expected.n, expected.k), (132, 13));
        assert_distance(&rep.result, 2, 2);
    }

    #[test]
    fn c832_line_parameters_and_intrablock_ccz() {
        for l in 1..=2 {
            let (net, expected, _) = build(FamilySpec::C832Line { l });
            let rep = contract(&net);
            assert!(rep.isometric);
            assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
            assert_distance(&rep.result, 2, 2);
        }
        // Intrablock CCZ on the first and on the last block's logical triple
        // (addressability): T-power flows found by the push engine.
        let (net, expected, _) = build(FamilySpec::C832Line { l: 1 });
        let rep = contract(&net);
        let k = expected.k as u16;
        for triple in [[0u16, 1, 2], [k - 3, k - 2, k - 1]] {
            let target = PhasePolynomial::monomial(8, k as usize, &triple, 4);
            let opts = PushOptions { max_degree: 1, ..PushOptions::default() };
            let flow = push_operator(&net, &rep, &target, &opts).unwrap();
            assert!(flow.is_some(), "no intrablock CCZ flow for triple {triple:?}");
        }
    }

    #[test]
    fn c832_tree_level_one() {
        let (net, expected, _) = build(FamilySpec::C832Tree { l: 1 });
        assert_eq!((expected.n, expected.k), (56, 27));
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (56, 27));
    }

    #[test]
    fn w1222_line_parameters_and_intrablock_cs() {
        let (net, expected, _) = build(FamilySpec::W1222Line { l: 1 });
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (expected.n, expected.k));
        assert_eq!((expected.n, expected.k), (22, 4));
        assert_distance(&rep.result, 2, 2);
        let target = PhasePolynomial::monomial(8, 4, &[0, 1], 2);
        let opts = PushOptions { max_degree: 1, ..PushOptions::default() };
        let flow = push_operator(&net, &rep, &target, &opts).unwrap();
        assert!(flow.is_some(), "no intrablock CS flow");
    }

    #[test]
    fn w1222_tree_level_one() {
        let (net, expected, _) = build(FamilySpec::W1222Tree { l: 1 });
        assert_eq!((expected.n, expected.k), (132, 24));
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (132, 24));
    }

    #[test]
    fn holo_qrm_one_layer_flow_not_ft() {
        let spec = FamilySpec::HoloQrmReduced { layers: 1 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let (n, k) = structural_params(&net);
        assert_eq!((n, k), (210, 16));
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (210, 16));
        // Intrablock CZ between the bulk qubits of two layer-1 tensors.
        let bulks = layout.bulk_legs();
        let t1_bulks: Vec<LegRef> = bulks
            .iter()
            .copied()
            .filter(|l| layout.nodes[l.node].role == HoloRole::T1)
            .collect();
        assert_eq!(t1_bulks.len(), 15);
        let flow = intrablock_cz_flow(&net, &rep, t1_bulks[0], t1_bulks[7]).unwrap();
        assert_eq!(flow.depth(), 1);
        assert_eq!(flow.support().len(), 14);
        // Each layer-1 tensor still routes its inward leg, so it only has
        // distance 2 with respect to its own bulk qubit: not fault tolerant.
        let models = holo_ft_models(&net, &layout, 4);
        assert_eq!(models[t1_bulks[0].node].distance, 2);
        let report = error_propagation_check(&flow, &models);
        assert!(!report.ft, "single-layer finite-rate CZ should not be fault tolerant");
    }

    #[test]
    fn holo_qrm_blackhole_flow_ft() {
        let spec = FamilySpec::HoloQrmBlackhole { layers: 1 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let (n, k) = structural_params(&net);
        assert_eq!((n, k), (225, 15));
        let rep = contract(&net);
        assert!(rep.isometric);
        let bulks = layout.bulk_legs();
        let flow = intrablock_cz_flow(&net, &rep, bulks[2], bulks[11]).unwrap();
        assert_eq!(flow.depth(), 1);
        let models = holo_ft_models(&net, &layout, 4);
        assert_eq!(models[bulks[2].node].distance, 3);
        let report = error_propagation_check(&flow, &models);
        assert!(report.ft, "{:?}", report.failures);
    }

    #[test]
    fn holo_qrm_blackhole_push_operator_finds_pair_flow() {
        let spec = FamilySpec::HoloQrmBlackhole { layers: 1 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let rep = contract(&net);
        let bulks = layout.bulk_legs();
        // Logical positions: bulk legs in node order are the logical legs.
        let target = PhasePolynomial::monomial(2, bulks.len(), &[0, 5], 1);
        let flow = push_operator(&net, &rep, &target, &PushOptions::default())
            .unwrap()
            .expect("flow");
        assert_eq!(flow.depth(), 1);
        assert_eq!(flow.support().len(), 14);
    }

    #[test]
    fn holo_steane_qrm_two_rings_crossings() {
        let spec = FamilySpec::HoloSteaneQrm { layers: 2 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let (n, k) = structural_params(&net);
        assert_eq!((n, k), (105, 1));
        let rep = contract(&net);
        assert!(rep.isometric);
        let (_, flow) =
            interblock_cz_flow(&net, &layout, LegRef { node: 0, leg: 0 }).unwrap();
        assert_eq!(flow.crossings_per_layer.get(&1), Some(&7));
        assert_eq!(flow.crossings_per_layer.get(&2), Some(&49));
        assert_eq!(flow.pairs.len(), 49);
    }

    #[test]
    fn holo_steane_qrm_three_layers_structure() {
        let spec = FamilySpec::HoloSteaneQrm { layers: 3 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let (n, k) = structural_params(&net);
        assert_eq!((n, k), (1335, 1));
        let t1 = layout.nodes.iter().filter(|n| n.role == HoloRole::T1).count();
        let t2 = layout.nodes.iter().filter(|n| n.role == HoloRole::T2).count();
        assert_eq!((t1, t2), (15 + 75, 15));
    }

    #[test]
    fn holo_steane_qrm_blackhole_one_layer() {
        let spec = FamilySpec::HoloSteaneQrmBlackhole { layers: 1 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let (n, k) = structural_params(&net);
        assert_eq!((n, k), (105, 15));
        let rep = contract(&net);
        assert!(rep.isometric);
        let bulks = layout.bulk_legs();
        let flow = intrablock_cz_flow(&net, &rep, bulks[0], bulks[1]).unwrap();
        let models = holo_ft_models(&net, &layout, 4);
        assert!(error_propagation_check(&flow, &models).ft);
    }

    #[test]
    fn holo_branch_one_layer_isometric() {
        let spec = FamilySpec::HoloBranch { b: 3, layers: 1 };
        let (net, layout) = build_holographic(&spec).unwrap();
        let (n, k) = structural_params(&net);
        assert_eq!((n, k), (45 * 44, 46));
        assert_eq!(layout.nodes.len(), 46);
        let rep = contract(&net);
        assert!(rep.isometric);
    }

    #[test]
    fn fractal_r0_parameters_and_cz_pairs() {
        let qrm = atom("qrm_15").unwrap();
        let (net, expected) = build_fractal(&qrm, 3, &qrm, 0).unwrap();
        assert_eq!((expected.n, expected.k), (42, 3));
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (42, 3));
        assert_distance(&rep.result, 3, 3);
        // Addressable CZ on every logical pair, supported on two branches.
        let mut pos: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (g, &(node, leg)) in rep.leg_origin.iter().enumerate() {
            pos.insert((node, leg), g);
        }
        let phys = rep.result.physical_legs();
        let phys_pos: BTreeMap<usize, usize> =
            phys.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let mut f = PhasePolynomial::zero(2, phys.len());
            for leg in 1..=7 {
                let ga = phys_pos[&pos[&(a, leg)]] as u16;
                let gb = phys_pos[&pos[&(b, leg)]] as u16;
                f.add_term(&[ga, gb], 1);
            }
            let logical = extract_logical_diagonal(&rep.result, &f).unwrap();
            let expected_cz = PhasePolynomial::monomial(2, 3, &[a as u16, b as u16], 1);
            assert_eq!(logical, expected_cz, "pair ({a},{b})");
        }
    }

    #[test]
    fn fractal_r1_parameters() {
        let qrm = atom("qrm_15").unwrap();
        let (net, expected) = build_fractal(&qrm, 3, &qrm, 1).unwrap();
        assert_eq!((expected.n, expected.k), (630, 3));
        assert_eq!(expected.d, DistanceReport::Computed(9));
        let rep = contract(&net);
        assert!(rep.isometric);
        assert_eq!(rep.result.params_nk(), (630, 3));
    }

    #[test]
    fn fractal_steane_and_vasmer_fusions() {
        let steane = atom("steane_713").unwrap();
        let (net, expected) = build_fractal(&steane, 3, &steane, 0).unwrap();
        assert_eq!((expected.n, expected.k), (18, 3));
        let rep = contract(&net);
        assert_eq!(rep.result.params_nk(), (18, 3));
        assert_distance(&rep.result, 3, 3);

        let vasmer = atom("vasmer_12_1_2").unwrap();
        let (net, expected) = build_fractal(&vasmer, 3, &vasmer, 0).unwrap();
        assert_eq!((expected.n, expected.k), (33, 3));
        let rep = contract(&net);
        assert_eq!(rep.result.params_nk(), (33, 3));
        assert_distance(&rep.result, 2, 2);
    }

    #[test]
    fn exponent_closed_forms() {
        let (a, b, _) = expected_exponents(3, 15, 3);
        assert!((a - 0.2886).abs() < 5e-4, "alpha {a}");
        assert!((b - 0.2886).abs() < 5e-4, "beta {b}");
        let (a, b, _) = expected_exponents(3, 45, 3);
        assert!((a - 0.2240).abs() < 5e-4, "alpha {a}");
        assert!((b - a).abs() < 1e-12 || b < a, "beta {b}");
        let (a, _, _) = expected_exponents(7, 7, 3);
        assert!((a - 0.5).abs() < 1e-12);
    }

    #[test]
    fn from_cli_round_trip() {
        let spec = FamilySpec::from_cli("sh_line", Some(3), None, None, None).unwrap();
        assert_eq!(spec, FamilySpec::ShLine { l: 3 });
        let spec = FamilySpec::from_cli("holo_steane_qrm", None, Some(3), None, None).unwrap();
        assert_eq!(spec, FamilySpec::HoloSteaneQrm { layers: 3 });
        let spec =
            FamilySpec::from_cli("fractal", None, Some(1), Some("qrm_15"), Some(3)).unwrap();
        assert_eq!(
            spec,
            FamilySpec::Fractal {
                base: "qrm_15".into(),
                f: 3,
                inner: "qrm_15".into(),
                iterations: 1
            }
        );
        assert!(FamilySpec::from_cli("nope", None, None, None, None).is_err());
    }
}
