//! Magic-state-distillation fixed-point analysis by dense statevector
//! simulation at small qubit counts.
//!
//! A block is usable as a Bravyi-Kitaev-like distillation protocol when the
//! code projector `Π = 2^{-s} Σ_S S` annihilates every magic-basis product
//! state of Hamming weight 1 or n−1 while keeping the all-0 and all-1
//! products: then a single faulty input is always rejected by syndrome
//! post-selection and the output error is quadratically suppressed.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use thiserror::Error;

use crate::block::{code_stabilizers, LegoBlock};
use crate::clifford::CliffordGate;
use crate::dense::{apply_pauli, equal_up_to_phase, overlap, statevector, TOL};
use crate::pauli::PauliOperator;
use crate::tableau::{deformed_bell_generators, StabilizerTableau};

/// Largest qubit count accepted by the dense projector simulations.
pub const MAX_DENSE_QUBITS: usize = 20;
/// Largest qubit count accepted by one-round distillation analysis.
pub const MAX_DISTILL_QUBITS: usize = 14;

#[derive(Debug, Error)]
pub enum MsdError {
    #[error("dense simulation limited to {max} qubits, code has {n}")]
    TooLarge { n: usize, max: usize },
}

/// A selection of noisy magic inputs: `x[a]` picks `|T₁⟩` on qubit `a`
/// (`|T₀⟩` otherwise) and `epsilon` is the per-qubit error rate of the
/// one-round maps.
#[derive(Debug, Clone, PartialEq)]
pub struct MagicInput {
    pub n: usize,
    pub x: Vec<bool>,
    pub epsilon: f64,
}

/// Single-qubit magic state `|T_b⟩`, the ±1 eigenvector of `(X+Y+Z)/√3`:
/// `|T₀⟩⟨T₀| = ½(I + (X+Y+Z)/√3)` and `|T₁⟩⟨T₁| = ½(I − (X+Y+Z)/√3)`.
pub fn magic_qubit(b: bool) -> [Complex64; 2] {
    let theta = (1.0 / 3f64.sqrt()).acos();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let omega = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    if b {
        [Complex64::new(s, 0.0), -omega * c]
    } else {
        [Complex64::new(c, 0.0), omega * s]
    }
}

/// Product state `⊗_a |T_{x_a}⟩` (qubit 0 = most significant bit).
pub fn magic_product(x: &[bool]) -> Vec<Complex64> {
    let mut state = vec![Complex64::new(1.0, 0.0)];
    for &b in x {
        let q = magic_qubit(b);
        let mut next = vec![Complex64::new(0.0, 0.0); state.len() * 2];
        for (i, &amp) in state.iter().enumerate() {
            next[2 * i] = amp * q[0];
            next[2 * i + 1] = amp * q[1];
        }
        state = next;
    }
    state
}

/// Numerical guard on phase conventions, checked once per process: the
/// Y-deformed Bell edge equals `−i(|T₀⟩|T₁⟩ − |T₁⟩|T₀⟩)/√2` up to the
/// contraction's global phase.
static CONVENTION_OK: Lazy<bool> = Lazy::new(|| {
    let gate = CliffordGate::named("Y").expect("Y gate");
    let gens = deformed_bell_generators(&gate);
    let t = match StabilizerTableau::new(2, gens) {
        Ok(t) => t,
        Err(_) => return false,
    };
    let bell = statevector(&t);
    let t0 = magic_qubit(false);
    let t1 = magic_qubit(true);
    let mut singlet = vec![Complex64::new(0.0, 0.0); 4];
    let minus_i = Complex64::new(0.0, -1.0);
    for i in 0..2 {
        for j in 0..2 {
            singlet[2 * i + j] = minus_i * (t0[i] * t1[j] - t1[i] * t0[j])
                / Complex64::new(2f64.sqrt(), 0.0);
        }
    }
    (overlap(&singlet, &singlet).re - 1.0).abs() < TOL && equal_up_to_phase(&bell, &singlet)
});

fn guard_conventions() {
    assert!(*CONVENTION_OK, "magic-state phase conventions failed the Bell-edge identity check");
}

/// Apply the code projector `Π = 2^{-s} Σ_S S` to a dense state by Gray-code
/// enumeration of the full stabilizer group.
fn apply_projector(stabs: &[PauliOperator], state: &[Complex64]) -> Vec<Complex64> {
    let s = stabs.len();
    assert!(s <= 24, "projector limited to 24 generators");
    let n = if s > 0 { stabs[0].n } else { 0 };
    let mut sum = state.to_vec();
    let mut current = PauliOperator::identity(if n > 0 { n } else { 1 });
    if n > 0 {
        current = PauliOperator::identity(n);
    }
    for i in 1u64..(1u64 << s) {
        let flip = i.trailing_zeros() as usize;
        current.mul_assign(&stabs[flip]);
        let term = apply_pauli(&current, state);
        for (a, b) in sum.iter_mut().zip(&term) {
            *a += b;
        }
    }
    let scale = 1.0 / (1u64 << s) as f64;
    for a in &mut sum {
        *a *= scale;
    }
    sum
}

fn projector_inputs(b: &LegoBlock, max: usize) -> Result<(usize, Vec<PauliOperator>), MsdError> {
    let (n, _) = b.params_nk();
    if n > max {
        return Err(MsdError::TooLarge { n, max });
    }
    Ok((n, code_stabilizers(b)))
}

/// Squared norm of `Π |T_x⟩`: the probability (times `2^{-s}` normalization)
/// that the magic product `x` passes trivial-syndrome post-selection.
pub fn project_magic(b: &LegoBlock, x: &[bool]) -> Result<f64, MsdError> {
    guard_conventions();
    let (n, stabs) = projector_inputs(b, MAX_DENSE_QUBITS)?;
    assert_eq!(x.len(), n, "bitstring length must match physical qubit count");
    let psi = apply_projector(&stabs, &magic_product(x));
    Ok(overlap(&psi, &psi).re)
}

/// Fixed-point diagnosis of a block as a one-round distillation protocol.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    /// `Π|T₀⟩^⊗n ≠ 0`, `Π|T₁⟩^⊗n ≠ 0`, and every `|x| ∈ {1, n−1}` input is
    /// annihilated.
    pub bk_compatible: bool,
    /// Bitstrings violating the condition.
    pub witnesses: Vec<Vec<bool>>,
    /// Squared norms of the projected all-0 and all-1 inputs.
    pub base_projections: (f64, f64),
}

fn weight_strings(n: usize, w: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut x = vec![false; n];
    fn rec(x: &mut Vec<bool>, start: usize, left: usize, out: &mut Vec<Vec<bool>>) {
        if left == 0 {
            out.push(x.clone());
            return;
        }
        for i in start..=(x.len() - left) {
            x[i] = true;
            rec(x, i + 1, left - 1, out);
            x[i] = false;
        }
    }
    rec(&mut x, 0, w, &mut out);
    out
}

/// Per-qubit magic-basis orientation for a traced network: each undeformed or
/// Y-deformed edge maps `|T₀⟩ ↔ |T₁⟩` through its singlet form, so blocks are
/// 2-colored over the trace graph and odd-colored blocks read their magic
/// basis flipped. Returns `None` when the trace graph has an odd cycle (no
/// consistent orientation exists). `leg_origin` must come from the network's
/// contraction report.
pub fn magic_orientation(
    net: &crate::network::TraceNetwork,
    leg_origin: &[(usize, usize)],
) -> Option<Vec<bool>> {
    let n_nodes = net.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (a, b, _) in &net.edges {
        adj[a.node].push(b.node);
        adj[b.node].push(a.node);
    }
    let mut color = vec![None; n_nodes];
    for start in 0..n_nodes {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let c = color[v].unwrap();
            for &w in &adj[v] {
                match color[w] {
                    None => {
                        color[w] = Some(!c);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => return None,
                    _ => {}
                }
            }
        }
    }
    Some(leg_origin.iter().map(|&(node, _)| color[node].unwrap()).collect())
}

/// Fixed-point diagnosis in the default (all-`|T₀⟩`-aligned) orientation.
pub fn fixed_point_report(b: &LegoBlock) -> Result<FixedPointReport, MsdError> {
    let (n, _) = b.params_nk();
    fixed_point_report_oriented(b, &vec![false; n])
}

/// Fixed-point diagnosis with a per-qubit basis orientation: input bit `x_a`
/// selects `|T_{x_a ⊕ mask_a}⟩` on qubit `a`. Witnesses are reported in the
/// visible (pre-mask) coordinates.
pub fn fixed_point_report_oriented(
    b: &LegoBlock,
    mask: &[bool],
) -> Result<FixedPointReport, MsdError> {
    guard_conventions();
    let (n, stabs) = projector_inputs(b, MAX_DENSE_QUBITS)?;
    assert_eq!(mask.len(), n);
    let norm = |x: &[bool]| {
        let actual: Vec<bool> = x.iter().zip(mask).map(|(&a, &m)| a ^ m).collect();
        let psi = apply_projector(&stabs, &magic_product(&actual));
        overlap(&psi, &psi).re
    };
    let p0 = norm(&vec![false; n]);
    let p1 = norm(&vec![true; n]);
    let mut witnesses = Vec::new();
    if p0 <= TOL {
        witnesses.push(vec![false; n]);
    }
    if p1 <= TOL {
        witnesses.push(vec![true; n]);
    }
    let mut probes = weight_strings(n, 1);
    if n >= 2 {
        probes.extend(weight_strings(n, n - 1));
    }
    let mut bad: Vec<Vec<bool>> = probes
        .into_par_iter()
        .filter(|x| norm(x) > TOL)
        .collect();
    witnesses.append(&mut bad);
    Ok(FixedPointReport {
        bk_compatible: witnesses.is_empty(),
        witnesses,
        base_projections: (p0, p1),
    })
}

/// Apply a single-qubit operator `m` (row-major 2×2) to qubit `q` of a dense
/// state (qubit 0 = most significant bit).
fn apply_one_qubit(n: usize, q: usize, m: &[[Complex64; 2]; 2], state: &mut [Complex64]) {
    let bit = 1usize << (n - 1 - q);
    for idx in 0..state.len() {
        if idx & bit == 0 {
            let a = state[idx];
            let b = state[idx | bit];
            state[idx] = m[0][0] * a + m[0][1] * b;
            state[idx | bit] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// `tr(Π ⊗_a ρ_a)` for `ρ_a = (1−ε)|T_{m_a}⟩⟨T_{m_a}| + ε|T_{1−m_a}⟩⟨T_{1−m_a}|`,
/// via the product form of per-qubit Pauli traces:
/// `tr(P ρ_a) = ±(1−2ε)/√3` for P ∈ {X, Y, Z}.
fn projected_trace(stabs: &[PauliOperator], n: usize, epsilon: f64, mask: &[bool]) -> f64 {
    let s = stabs.len();
    let mut total = Complex64::new(0.0, 0.0);
    let mut current = PauliOperator::identity(n);
    let term = |p: &PauliOperator| -> Complex64 {
        let mut f = crate::dense::i_pow(p.phase);
        for q in 0..n {
            let tau = if mask[q] { -1.0 } else { 1.0 } * (1.0 - 2.0 * epsilon) / 3f64.sqrt();
            f *= match (p.x.get(q), p.z.get(q)) {
                (false, false) => Complex64::new(1.0, 0.0),
                (true, false) | (false, true) => Complex64::new(tau, 0.0),
                // XZ = −iY, so tr(XZ ρ) = −i τ.
                (true, true) => Complex64::new(0.0, -tau),
            };
        }
        f
    };
    total += term(&current);
    for i in 1u64..(1u64 << s) {
        let flip = i.trailing_zeros() as usize;
        current.mul_assign(&stabs[flip]);
        total += term(&current);
    }
    let total = total / (1u64 << s) as f64;
    assert!(total.im.abs() < TOL, "group trace must be real");
    total.re
}

/// One round of distillation in the default orientation: project `ρ^⊗n` onto
/// the trivial syndrome, decode, and return the logical infidelity against
/// the noiseless output.
pub fn distill_once(b: &LegoBlock, epsilon: f64) -> Result<f64, MsdError> {
    let (n, _) = b.params_nk();
    distill_once_oriented(b, epsilon, &vec![false; n])
}

/// One round of distillation with a per-qubit basis orientation: qubit `a`'s
/// noiseless input is `|T_{mask_a}⟩` and an error flips it with rate ε.
pub fn distill_once_oriented(
    b: &LegoBlock,
    epsilon: f64,
    mask: &[bool],
) -> Result<f64, MsdError> {
    guard_conventions();
    let (n, stabs) = projector_inputs(b, MAX_DISTILL_QUBITS)?;
    assert_eq!(mask.len(), n);
    // Noiseless output |ψ*⟩ ∝ Π ⊗_a |T_{m_a}⟩.
    let mut ideal = apply_projector(&stabs, &magic_product(mask));
    let nrm = overlap(&ideal, &ideal).re.sqrt();
    assert!(nrm > TOL, "code does not accept the noiseless input");
    for a in &mut ideal {
        *a /= nrm;
    }
    // Fidelity numerator ⟨ψ*| ⊗ρ_a |ψ*⟩ (Π|ψ*⟩ = |ψ*⟩ absorbs the projector),
    // with ρ_a = ½(I ± τ(X+Y+Z)) written out as a matrix.
    let mut mapped = ideal.clone();
    for q in 0..n {
        let tau = if mask[q] { -1.0 } else { 1.0 } * (1.0 - 2.0 * epsilon) / 3f64.sqrt();
        let rho = [
            [
                Complex64::new(0.5 + tau / 2.0, 0.0),
                Complex64::new(tau / 2.0, -tau / 2.0),
            ],
            [
                Complex64::new(tau / 2.0, tau / 2.0),
                Complex64::new(0.5 - tau / 2.0, 0.0),
            ],
        ];
        apply_one_qubit(n, q, &rho, &mut mapped);
    }
    let numerator = overlap(&ideal, &mapped).re;
    let denominator = projected_trace(&stabs, n, epsilon, mask);
    assert!(denominator > TOL, "post-selection never succeeds");
    Ok((1.0 - numerator / denominator).max(0.0))
}

/// Log-log slope of the one-round output error over the given input error
/// rates, with the sampled (ε, error) pairs.
pub fn distillation_slope(
    b: &LegoBlock,
    epsilons: &[f64],
) -> Result<(f64, Vec<(f64, f64)>), MsdError> {
    let mut pts = Vec::new();
    for &e in epsilons {
        pts.push((e, distill_once(b, e)?));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(e, y)| (e.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Ok((slope, pts))
}

/// The default slope probe: ε ∈ {10⁻¹, 10⁻², 10⁻³}.
pub const SLOPE_EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_family, FamilySpec};
    use crate::network::contract_network;
    use crate::{LegKind, LegRole};

    fn family_block(spec: FamilySpec) -> LegoBlock {
        let (net, _, _) = build_family(&spec).unwrap();
        contract_network(&net).unwrap().result
    }

    fn family_block_oriented(spec: FamilySpec) -> (LegoBlock, Vec<bool>) {
        let (net, _, _) = build_family(&spec).unwrap();
        let rep = contract_network(&net).unwrap();
        let phys = rep.result.physical_legs();
        let origin: Vec<(usize, usize)> =
            phys.iter().map(|&l| rep.leg_origin[l]).collect();
        let mask = magic_orientation(&net, &origin).expect("trace graph is bipartite");
        (rep.result, mask)
    }

    fn trivial_qubit() -> LegoBlock {
        LegoBlock {
            name: "trivial".into(),
            tableau: StabilizerTableau::new(1, vec![]).unwrap(),
            roles: vec![LegRole { kind: LegKind::Physical, group_id: None }],
            declared_params: None,
            registered_symmetries: Vec::new(),
        }
    }

    #[test]
    fn magic_states_are_orthonormal_bloch_eigenvectors() {
        let t0 = magic_qubit(false);
        let t1 = magic_qubit(true);
        let n0: f64 = t0.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = t1.iter().map(|a| a.norm_sqr()).sum();
        assert!((n0 - 1.0).abs() < TOL && (n1 - 1.0).abs() < TOL);
        let cross = t0[0].conj() * t1[0] + t0[1].conj() * t1[1];
        assert!(cross.norm() < TOL);
        // (X+Y+Z)/√3 |T_b⟩ = ±|T_b⟩.
        let s3 = 3f64.sqrt();
        let h = [
            [Complex64::new(1.0 / s3, 0.0), Complex64::new(1.0 / s3, -1.0 / s3)],
            [Complex64::new(1.0 / s3, 1.0 / s3), Complex64::new(-1.0 / s3, 0.0)],
        ];
        for (state, sign) in [(t0, 1.0), (t1, -1.0)] {
            for r in 0..2 {
                let got = h[r][0] * state[0] + h[r][1] * state[1];
                assert!((got - sign * state[r]).norm() < TOL);
            }
        }
    }

    #[test]
    fn bell_edge_identity_guard_passes() {
        assert!(*CONVENTION_OK);
    }

    #[test]
    fn line_code_projections_by_weight() {
        let b = family_block(FamilySpec::ShLine { l: 1 });
        let n = 5;
        for w in 0..=n {
            for x in weight_strings(n, w) {
                let p = project_magic(&b, &x).unwrap();
                if w == 1 || w == n - 1 {
                    assert!(p < TOL, "weight {w} input not annihilated: {p}");
                } else if w == 0 || w == n {
                    assert!(p > TOL, "weight {w} input killed: {p}");
                }
            }
        }
    }

    #[test]
    fn line_code_is_bk_compatible() {
        for l in 1..=2 {
            let (b, mask) = family_block_oriented(FamilySpec::ShLine { l });
            let report = fixed_point_report_oriented(&b, &mask).unwrap();
            assert!(report.bk_compatible, "L={l}: witnesses {:?}", report.witnesses);
            assert!(report.base_projections.0 > TOL && report.base_projections.1 > TOL);
        }
    }

    #[test]
    fn line_orientation_alternates_per_block() {
        let (_, mask) = family_block_oriented(FamilySpec::ShLine { l: 2 });
        assert_eq!(mask, vec![false, false, false, false, true, true, true, true]);
        let (_, mask1) = family_block_oriented(FamilySpec::ShLine { l: 1 });
        assert_eq!(mask1, vec![false; 5]);
    }

    #[test]
    fn unoriented_two_block_line_rejects_aligned_inputs() {
        // The singlet edge maps |T₀⟩ ↔ |T₁⟩, so without the alternating
        // orientation the all-|T₀⟩ input is post-selected away.
        let b = family_block(FamilySpec::ShLine { l: 2 });
        let report = fixed_point_report(&b).unwrap();
        assert!(!report.bk_compatible);
        assert!(report.base_projections.0 < TOL);
    }

    #[test]
    fn planar_code_fails_with_witness() {
        // The 2d grid fails the fixed-point condition even in its natural
        // checkerboard orientation (and in the aligned one).
        let (b, mask) = family_block_oriented(FamilySpec::ShPlanar { l: 2 });
        for m in [mask, vec![false; 12]] {
            let report = fixed_point_report_oriented(&b, &m).unwrap();
            assert!(!report.bk_compatible);
            assert!(!report.witnesses.is_empty(), "expected a witness bitstring");
        }
    }

    #[test]
    fn trivial_code_is_not_bk_compatible() {
        let report = fixed_point_report(&trivial_qubit()).unwrap();
        assert!(!report.bk_compatible);
    }

    #[test]
    fn distill_is_exact_at_zero_error() {
        let b = family_block(FamilySpec::ShLine { l: 1 });
        let err = distill_once(&b, 0.0).unwrap();
        assert!(err < TOL, "ε=0 output error {err}");
    }

    #[test]
    fn line_code_slope_is_quadratic() {
        let b = family_block(FamilySpec::ShLine { l: 1 });
        let (slope, pts) = distillation_slope(&b, &SLOPE_EPSILONS).unwrap();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}, points {pts:?}");
    }

    #[test]
    fn planar_code_slope_shows_no_suppression() {
        let b = family_block(FamilySpec::ShPlanar { l: 2 });
        let (slope, pts) = distillation_slope(&b, &SLOPE_EPSILONS).unwrap();
        assert!((slope - 1.0).abs() < 0.3, "slope {slope}, points {pts:?}");
    }

    #[test]
    fn projection_depends_only_on_weight_for_symmetric_instance() {
        // The single [[5,1,3]] block has a weight-transitive behavior:
        // |x| alone fixes the projection. Longer lines only keep the
        // automorphisms of their construction (checked below).
        let b = family_block(FamilySpec::ShLine { l: 1 });
        for w in 0..=5 {
            let vals: Vec<f64> = weight_strings(5, w)
                .par_iter()
                .map(|x| project_magic(&b, x).unwrap())
                .collect();
            for v in &vals {
                assert!((v - vals[0]).abs() < 1e-9, "weight {w} values differ");
            }
        }
    }

    #[test]
    fn projection_covariant_under_block_swap() {
        // Swapping the two mirror-symmetric blocks of the L=2 line is a code
        // automorphism of the construction: projections agree.
        let b = family_block(FamilySpec::ShLine { l: 2 });
        for w in 0..=8 {
            for x in weight_strings(8, w) {
                let swapped: Vec<bool> = x.iter().rev().copied().collect();
                let p = project_magic(&b, &x).unwrap();
                let q = project_magic(&b, &swapped).unwrap();
                assert!((p - q).abs() < 1e-9, "x {x:?}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn per_input_sum_matches_group_trace() {
        let b = family_block(FamilySpec::ShLine { l: 1 });
        let stabs = code_stabilizers(&b);
        let eps: f64 = 0.3;
        let mut total = 0.0;
        for w in 0..=5 {
            for x in weight_strings(5, w) {
                let p = project_magic(&b, &x).unwrap();
                total += eps.powi(w as i32) * (1.0 - eps).powi((5 - w) as i32) * p;
            }
        }
        let direct = projected_trace(&stabs, 5, eps, &[false; 5]);
        assert!((total - direct).abs() < 1e-9, "{total} vs {direct}");
    }

    #[test]
    fn size_limits_are_enforced() {
        let b = family_block(FamilySpec::ShLine { l: 1 });
        let big = b.stack(5); // 25 physical qubits
        let phys = big.physical_legs().len();
        assert!(phys > MAX_DENSE_QUBITS);
        assert!(matches!(
            project_magic(&big, &vec![false; phys]),
            Err(MsdError::TooLarge { .. })
        ));
        assert!(matches!(distill_once(&big, 0.1), Err(MsdError::TooLarge { .. })));
    }
}
