//! Ground-truth oracles and predictors: brute-force code distance, stabilizer
//! weight enumerators, CSS detection, and the fusion-parameter bounds for
//! single traces and general leg-set fusions.

use serde::{Deserialize, Serialize};

use crate::block::{code_stabilizers, LegoBlock};
use crate::pauli::PauliOperator;
use crate::tableau::{Membership, StabilizerTableau};

/// Provenance-tagged code parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: DistanceReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceReport {
    /// Exact distance found by exhaustive search.
    Computed(usize),
    /// Exact per-type distances of a CSS code.
    ComputedCss { dx: usize, dz: usize },
    /// Search exhausted the weight cap without finding a logical operator.
    Bounded { lo: usize, hi: usize },
    /// k = 0: no logical operators, distance undefined.
    NoLogicals,
}

impl DistanceReport {
    /// The overall distance when exactly computed.
    pub fn value(&self) -> Option<usize> {
        match self {
            DistanceReport::Computed(d) => Some(*d),
            DistanceReport::ComputedCss { dx, dz } => Some(*dx.min(dz)),
            _ => None,
        }
    }

    /// A certified lower bound on the distance.
    pub fn lower_bound(&self) -> usize {
        match self {
            DistanceReport::Computed(d) => *d,
            DistanceReport::ComputedCss { dx, dz } => *dx.min(dz),
            DistanceReport::Bounded { lo, .. } => *lo,
            DistanceReport::NoLogicals => usize::MAX,
        }
    }
}

/// True iff the tableau group splits into pure-X-type and pure-Z-type
/// generators (inspected on the canonical form).
pub fn is_css(t: &StabilizerTableau) -> bool {
    t.canonicalize()
        .generators
        .iter()
        .all(|g| g.x.is_zero() || g.z.is_zero())
}

/// Iterate over all Pauli operators of the given weight on `n` qubits,
/// weight-ascending lexicographic, with per-qubit letters from `letters`.
fn for_each_pauli_of_weight<F: FnMut(&PauliOperator) -> bool>(
    n: usize,
    weight: usize,
    letters: &[char],
    f: &mut F,
) -> bool {
    // Iterative enumeration of supports (combinations) and letter choices.
    let mut support: Vec<usize> = (0..weight).collect();
    if weight > n {
        return false;
    }
    loop {
        // Letters: counted in base letters.len().
        let mut digits = vec![0usize; weight];
        loop {
            let mut p = PauliOperator::identity(n);
            let mut y_count = 0usize;
            for (slot, &q) in support.iter().enumerate() {
                match letters[digits[slot]] {
                    'X' => p.x.set(q, true),
                    'Z' => p.z.set(q, true),
                    'Y' => {
                        p.x.set(q, true);
                        p.z.set(q, true);
                        y_count += 1;
                    }
                    _ => unreachable!(),
                }
            }
            p.phase = (y_count % 4) as u8;
            if f(&p) {
                return true;
            }
            // Increment digits.
            let mut carry = true;
            for d in digits.iter_mut() {
                if carry {
                    *d += 1;
                    if *d == letters.len() {
                        *d = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        // Next combination.
        let mut i = weight;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if support[i] != i + n - weight {
                support[i] += 1;
                for j in i + 1..weight {
                    support[j] = support[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Minimal weight of an element of the given letter class that commutes with
/// all `stabs` but is not (up to sign) in their group. Searches weights
/// `1..=cap`; `None` if exhausted.
fn min_logical_weight(
    n: usize,
    stabs: &StabilizerTableau,
    letters: &[char],
    cap: usize,
) -> Option<usize> {
    for w in 1..=cap.min(n) {
        let mut found = false;
        for_each_pauli_of_weight(n, w, letters, &mut |p| {
            if stabs.generators.iter().all(|s| p.commutes_with(s))
                && stabs.group_member(p) == Membership::No
            {
                found = true;
                true
            } else {
                false
            }
        });
        if found {
            return Some(w);
        }
    }
    None
}

/// Brute-force distance of a block's code, weight-ascending with early exit.
/// CSS codes report per-type distances. `cap` limits the searched weight.
pub fn distance_bruteforce(block: &LegoBlock, cap: usize) -> CodeParams {
    let (n, k) = block.params_nk();
    let stabs = code_stabilizers(block);
    let code = StabilizerTableau { n, generators: stabs };
    if k == 0 {
        return CodeParams { n, k, d: DistanceReport::NoLogicals };
    }
    let d = if is_css(&code) {
        let dx = min_logical_weight(n, &code, &['X'], cap);
        let dz = min_logical_weight(n, &code, &['Z'], cap);
        match (dx, dz) {
            (Some(dx), Some(dz)) => DistanceReport::ComputedCss { dx, dz },
            // One sector within the cap, the other not: the distance is
            // exactly the found sector's weight (the other exceeds the cap).
            (Some(d), None) | (None, Some(d)) => DistanceReport::Computed(d),
            (None, None) => DistanceReport::Bounded { lo: cap + 1, hi: n },
        }
    } else {
        match min_logical_weight(n, &code, &['X', 'Y', 'Z'], cap) {
            Some(d) => DistanceReport::Computed(d),
            None => DistanceReport::Bounded { lo: cap + 1, hi: n },
        }
    };
    CodeParams { n, k, d }
}

/// A minimum-weight logical operator found within the weight cap, if any:
/// commutes with every stabilizer but lies outside the stabilizer group.
/// Useful as an explicit counterexample when a claimed distance is too high.
pub fn distance_witness(block: &LegoBlock, cap: usize) -> Option<PauliOperator> {
    let (n, k) = block.params_nk();
    if k == 0 {
        return None;
    }
    let stabs = code_stabilizers(block);
    let code = StabilizerTableau { n, generators: stabs };
    for w in 1..=cap.min(n) {
        let mut witness = None;
        for_each_pauli_of_weight(n, w, &['X', 'Y', 'Z'], &mut |p| {
            if code.generators.iter().all(|s| p.commutes_with(s))
                && code.group_member(p) == Membership::No
            {
                witness = Some(p.clone());
                true
            } else {
                false
            }
        });
        if witness.is_some() {
            return witness;
        }
    }
    None
}

/// The stabilizer weight enumerator `A(z) = Σ_S z^{wt(S)}` over the full
/// group, by Gray-code enumeration of the 2^rank products.
pub fn weight_enumerator(t: &StabilizerTableau) -> Vec<u128> {
    let r = t.rank();
    assert!(r <= 24, "enumerator limited to rank ≤ 24");
    let mut coeffs = vec![0u128; t.n + 1];
    let mut current = PauliOperator::identity(t.n);
    coeffs[0] += 1;
    for i in 1u64..(1 << r) {
        let flip = i.trailing_zeros() as usize;
        current.mul_assign(&t.generators[flip]);
        coeffs[current.weight()] += 1;
    }
    coeffs
}

/// Render an enumerator as `A(z) = c0 + c1 z + c2 z^2 + ...`, skipping zero
/// coefficients.
pub fn enumerator_to_string(coeffs: &[u128]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let term = match i {
            0 => format!("{c}"),
            1 => {
                if c == 1 {
                    "z".to_string()
                } else {
                    format!("{c} z")
                }
            }
            _ => {
                if c == 1 {
                    format!("z^{i}")
                } else {
                    format!("{c} z^{i}")
                }
            }
        };
        parts.push(term);
    }
    format!("A(z) = {}", parts.join(" + "))
}

/// Distance window predicted by the single-trace fusion lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionBound {
    pub n: usize,
    pub k: usize,
    /// Overall distance lower bound.
    pub d_lo: usize,
    /// Per-class lower bounds: logicals on the first block only, the second
    /// block only, and split across both.
    pub d_first_lo: usize,
    pub d_second_lo: usize,
    pub d_split_lo: usize,
}

/// Parameter prediction for a single undeformed/deformed Bell trace of two
/// codes with d₁, d₂ ≥ 2.
pub fn predict_single_trace(
    (n1, k1, d1): (usize, usize, usize),
    (n2, k2, d2): (usize, usize, usize),
) -> FusionBound {
    assert!(d1 >= 2 && d2 >= 2, "single-trace bound needs d ≥ 2 on both sides");
    FusionBound {
        n: n1 + n2 - 2,
        k: k1 + k2,
        d_lo: d1.min(d2),
        d_first_lo: d1,
        d_second_lo: d2,
        d_split_lo: d1 + d2 - 2,
    }
}

/// Maximal overlap on `legs_a` / `legs_b` between nontrivial logical
/// normalizer elements of two blocks, enumerated over elements of weight
/// ≤ `weight_cap` with the given letter class. The bijection pairs
/// `legs_a[i]` with `legs_b[i]`.
pub fn max_normalizer_overlap(
    block_a: &LegoBlock,
    block_b: &LegoBlock,
    legs_a: &[usize],
    legs_b: &[usize],
    letters: &[char],
    weight_cap: usize,
) -> usize {
    assert_eq!(legs_a.len(), legs_b.len());
    let collect = |block: &LegoBlock, legs: &[usize]| -> Vec<Vec<bool>> {
        let (n, _k) = block.params_nk();
        let code = StabilizerTableau { n, generators: code_stabilizers(block) };
        let mut patterns = Vec::new();
        for w in 1..=weight_cap.min(n) {
            for_each_pauli_of_weight(n, w, letters, &mut |p| {
                if code.generators.iter().all(|s| p.commutes_with(s))
                    && code.group_member(p) == Membership::No
                {
                    patterns.push(legs.iter().map(|&q| p.x.get(q) || p.z.get(q)).collect());
                }
                false
            });
        }
        patterns
    };
    let pats_a = collect(block_a, legs_a);
    let pats_b = collect(block_b, legs_b);
    let mut best = 0usize;
    for a in &pats_a {
        for b in &pats_b {
            let overlap = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
            best = best.max(overlap);
        }
    }
    best
}

/// CSS-code distance window for a general leg-set fusion with overlap
/// parameters m_X, m_Z.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssFusionBound {
    pub n: usize,
    pub k: usize,
    pub dx_lo: usize,
    pub dz_lo: usize,
    pub dx_split_lo: usize,
    pub dz_split_lo: usize,
}

pub fn predict_general_fusion_css(
    (n1, k1, dx1, dz1): (usize, usize, usize, usize),
    (n2, k2, dx2, dz2): (usize, usize, usize, usize),
    traced: usize,
    m_x: usize,
    m_z: usize,
) -> CssFusionBound {
    CssFusionBound {
        n: n1 + n2 - 2 * traced,
        k: k1 + k2,
        dx_lo: dx1.min(dx2).saturating_sub(m_x),
        dz_lo: dz1.min(dz2).saturating_sub(m_z),
        dx_split_lo: (dx1 + dx2).saturating_sub(2 * m_x),
        dz_split_lo: (dz1 + dz2).saturating_sub(2 * m_z),
    }
}

/// True iff every Pauli error on the listed legs is detectable (no
/// nontrivial normalizer element supported inside the leg set) — the
/// hypothesis under which fusion adds logical counts exactly.
pub fn all_errors_detectable(block: &LegoBlock, legs: &[usize]) -> bool {
    let (n, _) = block.params_nk();
    let code = StabilizerTableau { n, generators: code_stabilizers(block) };
    // Enumerate nontrivial Paulis supported inside legs (3^|legs| of them).
    let mut ok = true;
    for_each_support_pauli(n, legs, &mut |p| {
        if p.is_identity_up_to_phase() {
            return false;
        }
        if code.generators.iter().all(|s| p.commutes_with(s)) {
            ok = false;
            return true;
        }
        false
    });
    ok
}

/// True iff the listed legs are a correctable erasure: no *logical*
/// (normalizer, non-stabilizer) element is supported inside the leg set.
pub fn is_correctable_erasure(block: &LegoBlock, legs: &[usize]) -> bool {
    let (n, _) = block.params_nk();
    let code = StabilizerTableau { n, generators: code_stabilizers(block) };
    let mut ok = true;
    for_each_support_pauli(n, legs, &mut |p| {
        if p.is_identity_up_to_phase() {
            return false;
        }
        if code.generators.iter().all(|s| p.commutes_with(s))
            && code.group_member(p) == Membership::No
        {
            ok = false;
            return true;
        }
        false
    });
    ok
}

/// Enumerate every Pauli (all 4^|legs| letter choices) supported inside
/// `legs`; `f` returns true to stop early.
fn for_each_support_pauli<F: FnMut(&PauliOperator) -> bool>(n: usize, legs: &[usize], f: &mut F) {
    let r = legs.len();
    assert!(r <= 16, "support enumeration limited to 16 legs");
    for code in 0..(1usize << (2 * r)) {
        let mut p = PauliOperator::identity(n);
        let mut y_count = 0usize;
        for (i, &q) in legs.iter().enumerate() {
            let bits = (code >> (2 * i)) & 3;
            match bits {
                1 => p.x.set(q, true),
                2 => p.z.set(q, true),
                3 => {
                    p.x.set(q, true);
                    p.z.set(q, true);
                    y_count += 1;
                }
                _ => {}
            }
        }
        p.phase = (y_count % 4) as u8;
        if f(&p) {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::LegoBlock;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
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
    fn distance_of_small_codes() {
        let d513 = distance_bruteforce(&code_513(), 5);
        assert_eq!(d513.d, DistanceReport::Computed(3));
        let dsteane = distance_bruteforce(&steane(), 7);
        assert_eq!(dsteane.d, DistanceReport::ComputedCss { dx: 3, dz: 3 });
        assert_eq!(dsteane.d.value(), Some(3));
    }

    #[test]
    fn trivial_identity_block_distance_one() {
        // [[1,1,1]]: a bare Bell pair as Choi state of the identity map.
        let b = LegoBlock::from_code(
            "wire",
            1,
            vec![],
            vec![p("X")],
            vec![p("Z")],
        )
        .unwrap();
        let d = distance_bruteforce(&b, 1);
        assert_eq!(d.d.value(), Some(1));
    }

    #[test]
    fn css_detection() {
        assert!(is_css(&steane().tableau));
        assert!(!is_css(&code_513().tableau));
        // CSS-ness is detected through the canonical form even when the
        // given generators are mixed products.
        let mut gens = steane().tableau.generators.clone();
        let g0 = gens[0].clone();
        gens[3].mul_assign(&g0);
        let mixed = StabilizerTableau::new(8, gens).unwrap();
        assert!(is_css(&mixed));
    }

    #[test]
    fn bell_enumerator() {
        let bell = StabilizerTableau::new(2, vec![p("XX"), p("ZZ")]).unwrap();
        let coeffs = weight_enumerator(&bell);
        assert_eq!(coeffs, vec![1, 0, 3]);
        assert_eq!(enumerator_to_string(&coeffs), "A(z) = 1 + 3 z^2");
    }

    #[test]
    fn enumerator_totals() {
        let t = steane().tableau;
        let coeffs = weight_enumerator(&t);
        let total: u128 = coeffs.iter().sum();
        assert_eq!(total, 1 << t.rank());
        assert_eq!(coeffs[0], 1);
    }

    #[test]
    fn single_trace_prediction() {
        let b = predict_single_trace((7, 1, 3), (7, 1, 3));
        assert_eq!((b.n, b.k), (12, 2));
        assert_eq!(b.d_lo, 3);
        assert_eq!(b.d_split_lo, 4);
        // Symmetric inputs give a symmetric prediction.
        let c = predict_single_trace((5, 1, 3), (7, 1, 3));
        let c_rev = predict_single_trace((7, 1, 3), (5, 1, 3));
        assert_eq!(c.n, c_rev.n);
        assert_eq!(c.d_lo, c_rev.d_lo);
    }

    #[test]
    fn detectability_and_erasure() {
        let b = steane();
        // Any single qubit of a d=3 code is a detectable erasure.
        assert!(all_errors_detectable(&b, &[6]));
        assert!(is_correctable_erasure(&b, &[1, 2]));
        // The whole register is certainly not.
        assert!(!is_correctable_erasure(&b, &[0, 1, 2, 3, 4, 5, 6]));
    }
}
