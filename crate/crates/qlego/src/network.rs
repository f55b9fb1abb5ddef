//! Trace networks: Bell fusion (conjoining), Clifford-deformed traces, GHZ
//! hyperedge traces, self-traces, and whole-network contraction with isometry
//! tracking and a per-step (n, k) log.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::block::{LegKind, LegRole, LegoBlock};
use crate::catalog::{resolve_gate, Catalog, CatalogError};
use crate::clifford::CliffordGate;
use crate::tableau::{
    deformed_bell_generators, ghz_state_generators, StabilizerTableau, TableauError,
};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("tableau error: {0}")]
    Tableau(#[from] TableauError),
    #[error("catalog error: {0}")]
    Catalog(#[from] CatalogError),
    #[error("unknown node id '{0}'")]
    UnknownNode(String),
    #[error("node {node} has {n_legs} legs, leg {leg} out of range")]
    LegOutOfRange { node: String, leg: usize, n_legs: usize },
    #[error("leg {node}.{leg} appears in more than one edge or hyperedge")]
    LegReused { node: String, leg: usize },
    #[error("hyperedge declares ghz{r} but lists {got} legs")]
    HyperArity { r: usize, got: usize },
    #[error("deformation gate must act on 1 qubit, got arity {0}")]
    DeformationArity(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A leg of a network node, addressed by node index and local leg index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegRef {
    pub node: usize,
    pub leg: usize,
}

/// A tensor network of lego blocks: binary edges carry an optional
/// single-qubit Clifford deformation (the edge state is `(I⊗C)|Φ⁺⟩`);
/// hyperedges carry a GHZ edge state of matching arity. Legs not covered by
/// any edge stay dangling and form the legs of the contracted block.
#[derive(Debug, Clone)]
pub struct TraceNetwork {
    pub nodes: Vec<(String, LegoBlock)>,
    pub edges: Vec<(LegRef, LegRef, CliffordGate)>,
    pub hyperedges: Vec<(Vec<LegRef>, usize)>,
    pub role_overrides: Vec<(LegRef, LegKind)>,
}

impl TraceNetwork {
    pub fn new() -> Self {
        TraceNetwork {
            nodes: Vec::new(),
            edges: Vec::new(),
            hyperedges: Vec::new(),
            role_overrides: Vec::new(),
        }
    }

    /// Add a node; returns its index.
    pub fn add_node(&mut self, id: impl Into<String>, block: LegoBlock) -> usize {
        self.nodes.push((id.into(), block));
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, a: LegRef, b: LegRef, deformation: CliffordGate) {
        self.edges.push((a, b, deformation));
    }

    pub fn add_hyperedge(&mut self, legs: Vec<LegRef>, r: usize) {
        self.hyperedges.push((legs, r));
    }

    pub fn set_role(&mut self, leg: LegRef, kind: LegKind) {
        self.role_overrides.push((leg, kind));
    }

    /// `copies` disjoint copies of this network side by side: copy `c`'s node
    /// indices are shifted by `c * nodes.len()` and its node ids suffixed with
    /// `~c`. Useful for interblock (multi-copy) gate checks.
    pub fn replicate(&self, copies: usize) -> TraceNetwork {
        assert!(copies >= 1);
        let stride = self.nodes.len();
        let shift = |r: &LegRef, c: usize| LegRef { node: r.node + c * stride, leg: r.leg };
        let mut out = TraceNetwork::new();
        for c in 0..copies {
            for (id, b) in &self.nodes {
                out.add_node(format!("{id}~{c}"), b.clone());
            }
        }
        for c in 0..copies {
            for (a, b, g) in &self.edges {
                out.add_edge(shift(a, c), shift(b, c), g.clone());
            }
            for (legs, r) in &self.hyperedges {
                out.add_hyperedge(legs.iter().map(|l| shift(l, c)).collect(), *r);
            }
            for (l, kind) in &self.role_overrides {
                out.set_role(shift(l, c), *kind);
            }
        }
        out
    }

    fn check_ref(&self, r: &LegRef) -> Result<(), NetworkError> {
        let (id, block) = self
            .nodes
            .get(r.node)
            .ok_or_else(|| NetworkError::UnknownNode(format!("#{}", r.node)))?;
        if r.leg >= block.n_legs() {
            return Err(NetworkError::LegOutOfRange {
                node: id.clone(),
                leg: r.leg,
                n_legs: block.n_legs(),
            });
        }
        Ok(())
    }

    /// Validate the network invariants: leg references in range, each leg in
    /// at most one edge or hyperedge, hyperedge arity matching its GHZ state,
    /// single-qubit deformations.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let mut used: HashSet<(usize, usize)> = HashSet::new();
        let mut claim = |r: &LegRef, nodes: &[(String, LegoBlock)]| -> Result<(), NetworkError> {
            if !used.insert((r.node, r.leg)) {
                return Err(NetworkError::LegReused {
                    node: nodes[r.node].0.clone(),
                    leg: r.leg,
                });
            }
            Ok(())
        };
        for (a, b, c) in &self.edges {
            self.check_ref(a)?;
            self.check_ref(b)?;
            if c.m != 1 {
                return Err(NetworkError::DeformationArity(c.m));
            }
            claim(a, &self.nodes)?;
            claim(b, &self.nodes)?;
        }
        for (legs, r) in &self.hyperedges {
            if legs.len() != *r || *r < 2 {
                return Err(NetworkError::HyperArity { r: *r, got: legs.len() });
            }
            for l in legs {
                self.check_ref(l)?;
                claim(l, &self.nodes)?;
            }
        }
        for (l, _) in &self.role_overrides {
            self.check_ref(l)?;
        }
        Ok(())
    }

    /// Parse a network file. Format, one directive per line (`#` comments):
    ///
    /// ```text
    /// node <id> <catalog-name>
    /// edge <id.leg> <id.leg> [deform=<gate>]
    /// hyper ghz<r> <id.leg> <id.leg> ...
    /// role <id.leg> <logical|physical>
    /// ```
    pub fn parse(text: &str, catalog: &Catalog) -> Result<TraceNetwork, NetworkError> {
        let mut net = TraceNetwork::new();
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut defined: BTreeMap<String, LegoBlock> = BTreeMap::new();
        // In-progress `defblock`: (name, n_legs, roles, generators).
        let mut defblock: Option<(String, usize, Option<Vec<LegRole>>, Vec<String>)> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let perr = |msg: String| NetworkError::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if let Some((name, n_legs, roles, gens)) = defblock.as_mut() {
                match toks[0] {
                    "roles" => {
                        if toks.len() != 2 || toks[1].chars().count() != *n_legs {
                            return Err(perr(format!(
                                "expected: roles <{n_legs} letters L/P>"
                            )));
                        }
                        let parsed: Result<Vec<LegRole>, NetworkError> = toks[1]
                            .chars()
                            .map(|c| match c {
                                'L' => Ok(LegRole { kind: LegKind::Logical, group_id: None }),
                                'P' => Ok(LegRole { kind: LegKind::Physical, group_id: None }),
                                other => Err(perr(format!("unknown role letter '{other}'"))),
                            })
                            .collect();
                        *roles = Some(parsed?);
                    }
                    "gen" => {
                        if toks.len() != 2 {
                            return Err(perr("expected: gen <pauli string>".into()));
                        }
                        gens.push(toks[1].to_string());
                    }
                    "endblock" => {
                        let tableau =
                            StabilizerTableau::parse(Some(*n_legs), &gens.join("\n"))?;
                        let roles = roles.clone().unwrap_or_else(|| {
                            vec![
                                LegRole { kind: LegKind::Physical, group_id: None };
                                *n_legs
                            ]
                        });
                        let block = LegoBlock::new(name.clone(), tableau, roles)
                            .map_err(|e| perr(format!("bad defblock: {e}")))?;
                        defined.insert(name.clone(), block);
                        defblock = None;
                    }
                    other => {
                        return Err(perr(format!(
                            "unknown directive '{other}' inside defblock"
                        )))
                    }
                }
                continue;
            }
            if toks[0] == "defblock" {
                if toks.len() != 3 {
                    return Err(perr("expected: defblock <name> <n_legs>".into()));
                }
                let n_legs: usize = toks[2]
                    .parse()
                    .map_err(|_| perr(format!("bad leg count '{}'", toks[2])))?;
                if defined.contains_key(toks[1]) {
                    return Err(perr(format!("duplicate defblock '{}'", toks[1])));
                }
                defblock = Some((toks[1].to_string(), n_legs, None, Vec::new()));
                continue;
            }
            let leg_ref = |tok: &str| -> Result<LegRef, NetworkError> {
                let (id, leg) = tok
                    .split_once('.')
                    .ok_or_else(|| perr(format!("expected <id>.<leg>, found '{tok}'")))?;
                let node = *ids
                    .get(id)
                    .ok_or_else(|| NetworkError::UnknownNode(id.to_string()))?;
                let leg: usize = leg
                    .parse()
                    .map_err(|_| perr(format!("bad leg index in '{tok}'")))?;
                Ok(LegRef { node, leg })
            };
            match toks[0] {
                "node" => {
                    if toks.len() != 3 {
                        return Err(perr("expected: node <id> <catalog-name>".into()));
                    }
                    let block = match defined.get(toks[2]) {
                        Some(b) => b.clone(),
                        None => catalog.get(toks[2])?,
                    };
                    if ids.contains_key(toks[1]) {
                        return Err(perr(format!("duplicate node id '{}'", toks[1])));
                    }
                    let idx = net.add_node(toks[1], block);
                    ids.insert(toks[1].to_string(), idx);
                }
                "edge" => {
                    if toks.len() < 3 || toks.len() > 4 {
                        return Err(perr(
                            "expected: edge <id.leg> <id.leg> [deform=<gate>]".into(),
                        ));
                    }
                    let a = leg_ref(toks[1])?;
                    let b = leg_ref(toks[2])?;
                    let gate = match toks.get(3) {
                        None => CliffordGate::identity(1),
                        Some(tok) => {
                            let name = tok
                                .strip_prefix("deform=")
                                .ok_or_else(|| perr(format!("expected deform=<gate>, found '{tok}'")))?;
                            if let Some(images) = name
                                .strip_prefix("images(")
                                .and_then(|s| s.strip_suffix(')'))
                            {
                                let (xi, zi) = images.split_once(',').ok_or_else(|| {
                                    perr(format!("expected images(<X>,<Z>), found '{name}'"))
                                })?;
                                let parse_img = |s: &str| {
                                    s.parse::<crate::pauli::PauliOperator>()
                                        .map_err(|e| perr(format!("bad image '{s}': {e}")))
                                };
                                CliffordGate::from_images(
                                    vec![parse_img(xi)?],
                                    vec![parse_img(zi)?],
                                )
                                .map_err(|e| perr(format!("bad images '{name}': {e}")))?
                            } else {
                                resolve_gate(name)
                                    .map_err(|e| perr(format!("bad deformation '{name}': {e}")))?
                            }
                        }
                    };
                    net.add_edge(a, b, gate);
                }
                "hyper" => {
                    if toks.len() < 2 {
                        return Err(perr("expected: hyper ghz<r> <id.leg> ...".into()));
                    }
                    let r: usize = toks[1]
                        .strip_prefix("ghz")
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| perr(format!("expected ghz<r>, found '{}'", toks[1])))?;
                    let legs: Result<Vec<LegRef>, _> =
                        toks[2..].iter().map(|t| leg_ref(t)).collect();
                    net.add_hyperedge(legs?, r);
                }
                "role" => {
                    if toks.len() != 3 {
                        return Err(perr("expected: role <id.leg> <logical|physical>".into()));
                    }
                    let l = leg_ref(toks[1])?;
                    let kind = match toks[2] {
                        "logical" => LegKind::Logical,
                        "physical" => LegKind::Physical,
                        other => return Err(perr(format!("unknown role '{other}'"))),
                    };
                    net.set_role(l, kind);
                }
                other => return Err(perr(format!("unknown directive '{other}'"))),
            }
        }
        if let Some((name, ..)) = defblock {
            return Err(NetworkError::Parse {
                line: text.lines().count(),
                msg: format!("unterminated defblock '{name}'"),
            });
        }
        Ok(net)
    }

    /// Render the network in the format accepted by [`TraceNetwork::parse`].
    ///
    /// Node blocks whose name resolves to an identical block in `catalog` are
    /// referenced by name; all other blocks are emitted as inline `defblock`
    /// sections (stabilizer generators plus leg roles — leg groupings,
    /// declared parameters and registered symmetries are not carried by the
    /// file format).
    pub fn serialize(&self, catalog: &Catalog) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        // Inline definitions for blocks the catalog cannot reproduce.
        let mut emitted: BTreeMap<String, StabilizerTableau> = BTreeMap::new();
        let mut node_names: Vec<String> = Vec::new();
        for (_, block) in &self.nodes {
            let canonical = block.tableau.canonicalize();
            let mut name = block.name.clone();
            let catalog_match = catalog
                .get(&name)
                .map(|b| b.tableau.canonicalize() == canonical && b.roles == block.roles)
                .unwrap_or(false);
            if !catalog_match {
                // Distinct blocks sharing a name get numeric suffixes.
                let mut suffix = 0usize;
                while let Some(prev) = emitted.get(&name) {
                    if *prev == canonical {
                        break;
                    }
                    suffix += 1;
                    name = format!("{}@{suffix}", block.name);
                }
                if !emitted.contains_key(&name) {
                    let _ = writeln!(out, "defblock {name} {}", block.n_legs());
                    let roles: String = block
                        .roles
                        .iter()
                        .map(|r| if r.kind == LegKind::Logical { 'L' } else { 'P' })
                        .collect();
                    let _ = writeln!(out, "roles {roles}");
                    for g in &block.tableau.generators {
                        let _ = writeln!(out, "gen {g}");
                    }
                    out.push_str("endblock\n");
                    emitted.insert(name.clone(), canonical);
                }
            }
            node_names.push(name);
        }
        for ((id, _), name) in self.nodes.iter().zip(&node_names) {
            let _ = writeln!(out, "node {id} {name}");
        }
        let leg = |r: &LegRef| format!("{}.{}", self.nodes[r.node].0, r.leg);
        for (a, b, gate) in &self.edges {
            let deform = deformation_token(gate);
            match deform {
                None => {
                    let _ = writeln!(out, "edge {} {}", leg(a), leg(b));
                }
                Some(tok) => {
                    let _ = writeln!(out, "edge {} {} deform={tok}", leg(a), leg(b));
                }
            }
        }
        for (legs, r) in &self.hyperedges {
            let refs: Vec<String> = legs.iter().map(|l| leg(l)).collect();
            let _ = writeln!(out, "hyper ghz{r} {}", refs.join(" "));
        }
        for (l, kind) in &self.role_overrides {
            let kind = if *kind == LegKind::Logical { "logical" } else { "physical" };
            let _ = writeln!(out, "role {} {kind}", leg(l));
        }
        out
    }
}

/// Name for a single-qubit deformation gate, `None` for the identity, or the
/// explicit `images(<X>,<Z>)` form when it has no registered name.
fn deformation_token(gate: &CliffordGate) -> Option<String> {
    if *gate == CliffordGate::identity(1) {
        return None;
    }
    for name in ["X", "Y", "Z", "H", "S", "SD", "SH", "HS"] {
        if let Ok(g) = resolve_gate(name) {
            if g == *gate {
                return Some(name.to_string());
            }
        }
    }
    Some(format!("images({},{})", gate.x_images[0], gate.z_images[0]))
}

impl Default for TraceNetwork {
    fn default() -> Self {
        Self::new()
    }
}

/// One contraction step's label and the (n, k) of the partially contracted
/// state after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionStep {
    pub label: String,
    pub n: usize,
    pub k: usize,
}

/// Result of contracting a whole network.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub result: LegoBlock,
    pub kernel_dimension: usize,
    pub isometric: bool,
    pub steps: Vec<ContractionStep>,
    /// Provenance of each surviving leg: (node index, local leg index),
    /// aligned with the result block's leg order.
    pub leg_origin: Vec<(usize, usize)>,
}

/// Trace legs `leg_j` and `leg_m` of one tableau against the deformed Bell
/// state `(I⊗C)|Φ⁺⟩` (leg_m carries the deformation) and remove both legs.
pub fn conjoin(
    t: &StabilizerTableau,
    leg_j: usize,
    leg_m: usize,
    deformation: &CliffordGate,
) -> Result<StabilizerTableau, TableauError> {
    assert_ne!(leg_j, leg_m, "conjoin needs two distinct legs");
    assert_eq!(deformation.m, 1, "deformation acts on one qubit");
    t.project_onto(&[leg_j, leg_m], &deformed_bell_generators(deformation))
}

/// Trace the listed legs of one tableau against the r-qubit GHZ state and
/// remove them. `r = 2` coincides with an undeformed [`conjoin`].
pub fn ghz_trace(
    t: &StabilizerTableau,
    legs: &[usize],
    r: usize,
) -> Result<StabilizerTableau, TableauError> {
    assert_eq!(legs.len(), r, "GHZ trace needs exactly r legs");
    assert!(r >= 2, "GHZ trace needs r >= 2");
    t.project_onto(legs, &ghz_state_generators(r))
}

/// Trace one leg of block `a` against one leg of block `b` (with a deformed
/// Bell edge) and return the fused block. Roles of the remaining legs are
/// inherited.
pub fn conjoin_blocks(
    a: &LegoBlock,
    leg_a: usize,
    b: &LegoBlock,
    leg_b: usize,
    deformation: &CliffordGate,
) -> Result<LegoBlock, TableauError> {
    let t = a.tableau.tensor(&b.tableau);
    let out = conjoin(&t, leg_a, a.n_legs() + leg_b, deformation)?;
    let mut roles = Vec::with_capacity(out.n);
    for (i, r) in a.roles.iter().enumerate() {
        if i != leg_a {
            roles.push(r.clone());
        }
    }
    for (i, r) in b.roles.iter().enumerate() {
        if i != leg_b {
            roles.push(r.clone());
        }
    }
    Ok(LegoBlock {
        name: format!("{}~{}", a.name, b.name),
        tableau: out,
        roles,
        declared_params: None,
        registered_symmetries: Vec::new(),
    })
}

/// True iff the block's encoding map is an isometry: no stabilizer-group
/// element is supported entirely on the logical legs (GF(2) rank argument,
/// no enumeration).
pub fn check_isometry(b: &LegoBlock) -> bool {
    b.is_isometric()
}

/// Contract every edge (in declaration order) and then every hyperedge of a
/// network, logging the (n, k) evolution, and report the resulting block with
/// its kernel dimension and isometry status.
pub fn contract_network(net: &TraceNetwork) -> Result<ContractionReport, NetworkError> {
    net.validate()?;
    // Global leg layout: nodes in order, legs contiguous.
    let mut offsets = Vec::with_capacity(net.nodes.len());
    let mut total = 0usize;
    for (_, b) in &net.nodes {
        offsets.push(total);
        total += b.n_legs();
    }
    let global = |r: &LegRef| offsets[r.node] + r.leg;
    let mut tableau: Option<StabilizerTableau> = None;
    let mut roles: Vec<LegRole> = Vec::with_capacity(total);
    for (_, b) in &net.nodes {
        tableau = Some(match tableau {
            None => b.tableau.clone(),
            Some(t) => t.tensor(&b.tableau),
        });
        roles.extend(b.roles.iter().cloned());
    }
    let mut tableau = tableau.expect("network has at least one node");
    for (l, kind) in &net.role_overrides {
        roles[global(l)].kind = *kind;
    }
    // Legs traced by some edge are interior: they never count toward (n, k).
    let mut traced = vec![false; total];
    for (a, b, _) in &net.edges {
        traced[global(a)] = true;
        traced[global(b)] = true;
    }
    for (legs, _) in &net.hyperedges {
        for l in legs {
            traced[global(l)] = true;
        }
    }
    let count_nk = |roles: &[LegRole], traced: &[bool]| -> (usize, usize) {
        let mut n = 0;
        let mut k = 0;
        for (r, &t) in roles.iter().zip(traced) {
            if !t {
                match r.kind {
                    LegKind::Physical => n += 1,
                    LegKind::Logical => k += 1,
                }
            }
        }
        (n, k)
    };
    // Current tableau position of each original global leg (None = removed).
    let mut pos: Vec<Option<usize>> = (0..total).map(Some).collect();
    let mut remove = |pos: &mut Vec<Option<usize>>, removed: &[usize]| {
        for p in pos.iter_mut() {
            if let Some(q) = *p {
                if removed.contains(&q) {
                    *p = None;
                } else {
                    *p = Some(q - removed.iter().filter(|&&r| r < q).count());
                }
            }
        }
    };
    let mut steps = Vec::new();
    let (n0, k0) = count_nk(&roles, &traced);
    steps.push(ContractionStep { label: "start".into(), n: n0, k: k0 });
    let label_of = |r: &LegRef| format!("{}.{}", net.nodes[r.node].0, r.leg);
    for (a, b, c) in &net.edges {
        let pa = pos[global(a)].expect("leg used once");
        let pb = pos[global(b)].expect("leg used once");
        tableau = conjoin(&tableau, pa, pb, c)?;
        remove(&mut pos, &[pa, pb]);
        let (n, k) = count_nk(&roles, &traced);
        steps.push(ContractionStep {
            label: format!("edge {}-{}", label_of(a), label_of(b)),
            n,
            k,
        });
    }
    for (legs, r) in &net.hyperedges {
        let ps: Vec<usize> = legs.iter().map(|l| pos[global(l)].expect("leg used once")).collect();
        tableau = ghz_trace(&tableau, &ps, *r)?;
        remove(&mut pos, &ps);
        let (n, k) = count_nk(&roles, &traced);
        let labels: Vec<String> = legs.iter().map(label_of).collect();
        steps.push(ContractionStep {
            label: format!("hyper ghz{r} {}", labels.join(" ")),
            n,
            k,
        });
    }
    // Remaining legs, in ascending global order (matches the tableau order).
    let mut final_roles = Vec::new();
    let mut leg_origin = Vec::new();
    for (g, p) in pos.iter().enumerate() {
        if p.is_some() {
            final_roles.push(roles[g].clone());
            let node = offsets.partition_point(|&o| o <= g) - 1;
            leg_origin.push((node, g - offsets[node]));
        }
    }
    let result = LegoBlock {
        name: "contracted".into(),
        tableau,
        roles: final_roles,
        declared_params: None,
        registered_symmetries: Vec::new(),
    };
    let kernel_dimension = result.kernel_dimension();
    Ok(ContractionReport {
        isometric: kernel_dimension == 0,
        kernel_dimension,
        result,
        steps,
        leg_origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{distance_bruteforce, is_css, DistanceReport};
    use crate::pauli::PauliOperator;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cat() -> Catalog {
        Catalog::load().unwrap()
    }

    #[test]
    fn two_513_y_deformed_trace_gives_823() {
        let c = cat();
        let b = c.get("code_513").unwrap();
        let y = CliffordGate::named("Y").unwrap();
        let fused = conjoin_blocks(&b, 5, &b, 5, &y).unwrap();
        assert_eq!(fused.params_nk(), (8, 2));
        assert!(fused.is_isometric());
        let params = distance_bruteforce(&fused, 8);
        assert_eq!(params.d.value(), Some(3));
    }

    #[test]
    fn two_steane_identity_trace_gives_12_2_3() {
        let c = cat();
        let b = c.get("steane_713").unwrap();
        let id = CliffordGate::identity(1);
        let fused = conjoin_blocks(&b, 7, &b, 7, &id).unwrap();
        assert_eq!(fused.params_nk(), (12, 2));
        assert!(is_css(&crate::tableau::StabilizerTableau {
            n: 12,
            generators: crate::block::code_stabilizers(&fused),
        }));
        let params = distance_bruteforce(&fused, 12);
        assert_eq!(params.d.value(), Some(3));
    }

    #[test]
    fn ghz4_self_trace_is_bell() {
        let ghz4 = StabilizerTableau::new(4, ghz_state_generators(4)).unwrap();
        let out = conjoin(&ghz4, 2, 3, &CliffordGate::identity(1)).unwrap();
        let bell = StabilizerTableau::parse(None, "XX\nZZ").unwrap();
        assert_eq!(out.canonicalize().generators, bell.canonicalize().generators);
    }

    #[test]
    fn ghz_trace_r2_matches_conjoin() {
        let c = cat();
        let b = c.get("steane_713").unwrap();
        let t = b.tableau.tensor(&b.tableau);
        let via_conjoin = conjoin(&t, 3, 8 + 5, &CliffordGate::identity(1)).unwrap();
        let via_ghz = ghz_trace(&t, &[3, 8 + 5], 2).unwrap();
        assert_eq!(
            via_conjoin.canonicalize().generators,
            via_ghz.canonicalize().generators
        );
    }

    #[test]
    fn three_steane_ghz3_gives_18_3_3() {
        let c = cat();
        let b = c.get("steane_713").unwrap();
        let mut net = TraceNetwork::new();
        for id in ["a", "b", "c"] {
            net.add_node(id, b.clone());
        }
        net.add_hyperedge(
            vec![
                LegRef { node: 0, leg: 1 },
                LegRef { node: 1, leg: 1 },
                LegRef { node: 2, leg: 1 },
            ],
            3,
        );
        let rep = contract_network(&net).unwrap();
        assert_eq!(rep.result.params_nk(), (18, 3));
        assert!(rep.isometric);
        let params = distance_bruteforce(&rep.result, 3);
        assert_eq!(params.d.value(), Some(3));
    }

    #[test]
    fn three_vasmer_ghz3_gives_33_3_2() {
        let c = cat();
        let b = c.get("vasmer_12_1_2").unwrap();
        let mut net = TraceNetwork::new();
        for id in ["a", "b", "c"] {
            net.add_node(id, b.clone());
        }
        // Trace Choi leg 2 of each block (code qubit 1, outside the weight-2
        // logical Z support {0, 4}).
        net.add_hyperedge(
            vec![
                LegRef { node: 0, leg: 2 },
                LegRef { node: 1, leg: 2 },
                LegRef { node: 2, leg: 2 },
            ],
            3,
        );
        let rep = contract_network(&net).unwrap();
        assert_eq!(rep.result.params_nk(), (33, 3));
        assert!(rep.isometric);
        // d = 2: a weight-2 logical exists, no weight-1 one does.
        let stabs = crate::block::code_stabilizers(&rep.result);
        let code = StabilizerTableau { n: 33, generators: stabs };
        let weight2 = {
            // Z̄ of each branch keeps weight 2 after the trace.
            let mut p = PauliOperator::identity(33);
            p.z.set(0, true);
            p.z.set(3, true);
            p
        };
        assert!(code.generators.iter().all(|s| weight2.commutes_with(s)));
        assert_eq!(code.group_member(&weight2), crate::tableau::Membership::No);
        let params = distance_bruteforce(&rep.result, 1);
        assert!(matches!(params.d, DistanceReport::Bounded { lo: 2, .. }));
    }

    #[test]
    fn network_file_single_edge_matches_conjoin() {
        let c = cat();
        let text = "\
# partial concatenation: one steane leg traced into another
node a steane_713
node b steane_713
edge a.7 b.7
";
        let net = TraceNetwork::parse(text, &c).unwrap();
        let rep = contract_network(&net).unwrap();
        let b = c.get("steane_713").unwrap();
        let direct = conjoin_blocks(&b, 7, &b, 7, &CliffordGate::identity(1)).unwrap();
        assert_eq!(
            rep.result.tableau.canonicalize().generators,
            direct.tableau.canonicalize().generators
        );
        assert_eq!(rep.result.params_nk(), (12, 2));
        assert_eq!(rep.steps.last().unwrap().n, 12);
        assert_eq!(rep.steps.last().unwrap().k, 2);
    }

    #[test]
    fn deformed_edge_in_network_file() {
        let c = cat();
        let text = "node a code_513\nnode b code_513\nedge a.5 b.5 deform=Y\n";
        let net = TraceNetwork::parse(text, &c).unwrap();
        let rep = contract_network(&net).unwrap();
        assert_eq!(rep.result.params_nk(), (8, 2));
        assert_eq!(distance_bruteforce(&rep.result, 8).d.value(), Some(3));
    }

    #[test]
    fn bell_pair_self_fusion_flagged_non_isometric() {
        // Two identity Chois (Bell pairs with one logical, one physical leg)
        // fused on their physical legs leave a stabilizer supported entirely
        // on logical legs: kernel > 0.
        let id_choi = LegoBlock::from_code(
            "wire",
            1,
            vec![],
            vec!["X".parse().unwrap()],
            vec!["Z".parse().unwrap()],
        )
        .unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", id_choi.clone());
        net.add_node("b", id_choi);
        net.add_edge(
            LegRef { node: 0, leg: 1 },
            LegRef { node: 1, leg: 1 },
            CliffordGate::identity(1),
        );
        let rep = contract_network(&net).unwrap();
        assert!(!rep.isometric);
        assert_eq!(rep.kernel_dimension, 2);
    }

    #[test]
    fn check_isometry_examples() {
        let c = cat();
        let steane = c.get("steane_713").unwrap();
        assert!(check_isometry(&steane));
        // qrm_15 with one physical leg re-declared logical: [[14,2,2]].
        let qrm = c.get("qrm_15").unwrap();
        let dual = qrm.dualize_legs(&[1], LegKind::Logical);
        assert_eq!(dual.params_nk(), (14, 2));
        assert!(check_isometry(&dual));
        assert_eq!(distance_bruteforce(&dual, 7).d.value(), Some(2));
        // A constructed block with a logical-leg stabilizer fails.
        let t = StabilizerTableau::parse(None, "ZI\nIZ").unwrap();
        let bad = LegoBlock::new(
            "bad",
            t,
            vec![LegRole::logical(), LegRole::physical()],
        )
        .unwrap();
        assert!(!check_isometry(&bad));
    }

    #[test]
    fn edge_order_does_not_change_result() {
        let c = cat();
        let b = c.get("steane_713").unwrap();
        let base = {
            let mut net = TraceNetwork::new();
            for id in ["a", "b", "c"] {
                net.add_node(id, b.clone());
            }
            net
        };
        let edges = vec![
            (LegRef { node: 0, leg: 3 }, LegRef { node: 1, leg: 5 }),
            (LegRef { node: 1, leg: 2 }, LegRef { node: 2, leg: 4 }),
            (LegRef { node: 0, leg: 6 }, LegRef { node: 2, leg: 1 }),
        ];
        let mut reference: Option<Vec<PauliOperator>> = None;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..6 {
            let mut order = edges.clone();
            order.shuffle(&mut rng);
            let mut net = base.clone();
            for (a, bb) in &order {
                net.add_edge(*a, *bb, CliffordGate::identity(1));
            }
            let rep = contract_network(&net).unwrap();
            let canon = rep.result.tableau.canonicalize().generators;
            match &reference {
                None => reference = Some(canon),
                Some(r) => assert_eq!(&canon, r),
            }
        }
    }

    #[test]
    fn random_single_traces_respect_fusion_arithmetic() {
        // (n, k) add as (n1+n2-2, k1+k2) and distance stays >= min(d1, d2)
        // for any single undeformed trace of two distance >= 2 blocks.
        let c = cat();
        let names = ["code_422", "code_513", "steane_713"];
        let dist = |name: &str| match name {
            "code_422" => 2,
            "code_513" => 3,
            "steane_713" => 3,
            _ => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let na = *names.choose(&mut rng).unwrap();
            let nb = *names.choose(&mut rng).unwrap();
            let a = c.get(na).unwrap();
            let b = c.get(nb).unwrap();
            let (n1, k1) = a.params_nk();
            let (n2, k2) = b.params_nk();
            let la = *a.physical_legs().choose(&mut rng).unwrap();
            let lb = *b.physical_legs().choose(&mut rng).unwrap();
            let fused = conjoin_blocks(&a, la, &b, lb, &CliffordGate::identity(1)).unwrap();
            assert_eq!(fused.params_nk(), (n1 + n2 - 2, k1 + k2));
            let dmin = dist(na).min(dist(nb));
            let params = distance_bruteforce(&fused, n1 + n2 - 2);
            assert!(params.d.lower_bound() >= dmin, "{na}~{nb}: {:?}", params.d);
        }
    }

    #[test]
    fn conjoining_css_blocks_stays_css() {
        let c = cat();
        let a = c.get("steane_713").unwrap();
        let b = c.get("code_422").unwrap();
        let fused = conjoin_blocks(&a, 4, &b, 3, &CliffordGate::identity(1)).unwrap();
        let stabs = crate::block::code_stabilizers(&fused);
        assert!(is_css(&StabilizerTableau { n: fused.params_nk().0, generators: stabs }));
    }

    #[test]
    fn parser_rejects_bad_input() {
        let c = cat();
        assert!(matches!(
            TraceNetwork::parse("edge a.0 b.0\n", &c),
            Err(NetworkError::UnknownNode(_))
        ));
        let reused = "node a bell\nnode b bell\nnode c bell\nedge a.0 b.0\nedge a.0 c.0\n";
        let net = TraceNetwork::parse(reused, &c).unwrap();
        assert!(matches!(
            contract_network(&net),
            Err(NetworkError::LegReused { .. })
        ));
        let arity = "node a bell\nnode b bell\nnode c bell\nhyper ghz3 a.0 b.0\n";
        let net = TraceNetwork::parse(arity, &c).unwrap();
        assert!(matches!(
            contract_network(&net),
            Err(NetworkError::HyperArity { r: 3, got: 2 })
        ));
        assert!(TraceNetwork::parse("node a no_such_block\n", &c).is_err());
        assert!(matches!(
            TraceNetwork::parse("node a bell\nrole a.0 magic\n", &c),
            Err(NetworkError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn serialize_parse_round_trip_with_defblock() {
        // A network mixing catalog blocks, a derived (non-catalog) block, a
        // deformed edge, a hyperedge and a role override.
        let c = cat();
        let qrm = c.get("qrm_15").unwrap();
        let state = qrm.dualize_legs(&[0], LegKind::Physical); // not in catalog
        let steane = c.get("steane_713").unwrap();
        let mut net = TraceNetwork::new();
        net.add_node("a", steane.clone());
        net.add_node("b", steane.clone());
        net.add_node("s", state);
        net.add_edge(
            LegRef { node: 0, leg: 1 },
            LegRef { node: 1, leg: 1 },
            CliffordGate::named("Y").unwrap(),
        );
        net.add_hyperedge(
            vec![
                LegRef { node: 0, leg: 2 },
                LegRef { node: 1, leg: 2 },
                LegRef { node: 2, leg: 0 },
            ],
            3,
        );
        net.set_role(LegRef { node: 2, leg: 5 }, LegKind::Logical);
        let text = net.serialize(&c);
        let parsed = TraceNetwork::parse(&text, &c).unwrap();
        assert_eq!(parsed.serialize(&c), text, "serialization not stable");
        let a = contract_network(&net).unwrap();
        let b = contract_network(&parsed).unwrap();
        assert_eq!(
            a.result.tableau.canonicalize(),
            b.result.tableau.canonicalize()
        );
        assert_eq!(a.result.params_nk(), b.result.params_nk());
    }

    #[test]
    fn norm_zero_projection_reported() {
        // Project the two legs of |00> onto the Bell state after an X-basis
        // mismatch: measure ZZ fine, but -XX stabilized fails. Build a state
        // stabilized by ZI, -IZ: Bell projection needs ZZ = -1... norm zero.
        let t = StabilizerTableau::parse(None, "ZI\n-IZ").unwrap();
        let err = conjoin(&t, 0, 1, &CliffordGate::identity(1));
        assert!(matches!(err, Err(TableauError::NormZero)));
    }
}
