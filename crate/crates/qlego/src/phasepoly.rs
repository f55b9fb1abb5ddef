//! Diagonal Clifford-hierarchy gates as phase polynomials over `Z_N`
//! (N a power of two), restricted exactly to the affine computational-basis
//! support of stabilizer states.
//!
//! A diagonal gate acts as `|x⟩ ↦ exp(2πi f(x)/N)|x⟩` where `f` is a
//! multilinear polynomial in Boolean variables. Substituting the affine
//! parametrization of a stabilizer-state support into `f` (via the exact XOR
//! lift `u⊕w = u + w − 2uw`, truncated mod N) decides symmetry, extracts
//! logical actions, and computes whole symmetry groups by modular linear
//! algebra.

use std::collections::BTreeMap;
use std::fmt;

use crate::block::LegoBlock;
use crate::gf2::Gf2Matrix;
use crate::pauli::{BitVec, PauliOperator};
use crate::tableau::StabilizerTableau;
use crate::zmod::ZmodMatrix;

/// Errors from phase-polynomial operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhaseError {
    #[error("monomial degree {degree} exceeds the cap {cap} (monomial {monomial:?})")]
    DegreeOverflow { degree: usize, cap: usize, monomial: Vec<u16> },
    #[error("variable index {0} out of range for {1} variables")]
    VarOutOfRange(u16, usize),
    #[error("modulus {0} is not a power of two in 2..=16")]
    BadModulus(u32),
    #[error("block is not an isometry (kernel dimension {0} > 0)")]
    NotIsometric(usize),
    #[error("physical gate does not induce a logical diagonal: restriction depends on gauge variable {0}")]
    NotLogical(usize),
    #[error("operator is not a logical representative of the block")]
    NotLogicalOperator,
    #[error("input symmetry failed verification")]
    NotASymmetry,
    #[error("monomial space too large: {0} candidate monomials exceed cap {1}")]
    MonomialSpaceTooLarge(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A multilinear phase polynomial `f: F_2^n → Z_N`, stored as a map from
/// sorted variable-index subsets to nonzero coefficients. The empty subset is
/// the constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePolynomial {
    pub modulus: u32,
    pub n_vars: usize,
    pub monomials: BTreeMap<Vec<u16>, u32>,
}

fn check_modulus(n: u32) -> Result<(), PhaseError> {
    if n.is_power_of_two() && (2..=16).contains(&n) {
        Ok(())
    } else {
        Err(PhaseError::BadModulus(n))
    }
}

impl PhasePolynomial {
    pub fn zero(modulus: u32, n_vars: usize) -> Self {
        check_modulus(modulus).expect("modulus must be a power of two in 2..=16");
        PhasePolynomial { modulus, n_vars, monomials: BTreeMap::new() }
    }

    pub fn constant(modulus: u32, n_vars: usize, c: u32) -> Self {
        let mut p = Self::zero(modulus, n_vars);
        p.add_term(&[], c);
        p
    }

    /// A single monomial `c · Π_{i∈vars} x_i`.
    pub fn monomial(modulus: u32, n_vars: usize, vars: &[u16], c: u32) -> Self {
        let mut p = Self::zero(modulus, n_vars);
        let mut v = vars.to_vec();
        v.sort_unstable();
        v.dedup();
        for &i in &v {
            assert!((i as usize) < n_vars, "variable out of range");
        }
        p.add_term(&v, c);
        p
    }

    /// The all-qubits sum `c·Σ x_i` (e.g. T^{⊗n} for N=8, c=1).
    pub fn linear_sum(modulus: u32, n_vars: usize, c: u32) -> Self {
        let mut p = Self::zero(modulus, n_vars);
        for i in 0..n_vars {
            p.add_term(&[i as u16], c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn constant_term(&self) -> u32 {
        self.monomials.get(&Vec::new()).copied().unwrap_or(0)
    }

    /// True when every monomial is the constant one.
    pub fn is_constant(&self) -> bool {
        self.monomials.keys().all(|k| k.is_empty())
    }

    pub fn max_degree(&self) -> usize {
        self.monomials.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    /// Add `c` to the coefficient of `vars` (must be sorted, deduplicated).
    pub fn add_term(&mut self, vars: &[u16], c: u32) {
        let c = c % self.modulus;
        if c == 0 {
            return;
        }
        let entry = self.monomials.entry(vars.to_vec()).or_insert(0);
        *entry = (*entry + c) % self.modulus;
        if *entry == 0 {
            self.monomials.remove(vars);
        }
    }

    pub fn add(&self, other: &PhasePolynomial) -> PhasePolynomial {
        assert_eq!(self.modulus, other.modulus);
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (k, &v) in &other.monomials {
            out.add_term(k, v);
        }
        out
    }

    pub fn sub(&self, other: &PhasePolynomial) -> PhasePolynomial {
        self.add(&other.negated())
    }

    /// Entrywise negation mod N (the complex conjugate of the diagonal gate).
    pub fn negated(&self) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero(self.modulus, self.n_vars);
        for (k, &v) in &self.monomials {
            out.add_term(k, (self.modulus - v) % self.modulus);
        }
        out
    }

    pub fn scaled(&self, s: u32) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero(self.modulus, self.n_vars);
        for (k, &v) in &self.monomials {
            out.add_term(k, (v * s) % self.modulus);
        }
        out
    }

    /// Drop the constant term (global phase).
    pub fn without_constant(&self) -> PhasePolynomial {
        let mut out = self.clone();
        out.monomials.remove(&Vec::new());
        out
    }

    /// Product of two polynomials over Boolean variables (`x_i² = x_i`, so
    /// monomial supports union).
    pub fn mul(&self, other: &PhasePolynomial) -> PhasePolynomial {
        assert_eq!(self.modulus, other.modulus);
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = PhasePolynomial::zero(self.modulus, self.n_vars);
        for (ka, &va) in &self.monomials {
            for (kb, &vb) in &other.monomials {
                let mut k: Vec<u16> = ka.iter().chain(kb.iter()).copied().collect();
                k.sort_unstable();
                k.dedup();
                out.add_term(&k, (va * vb) % self.modulus);
            }
        }
        out
    }

    /// Evaluate at a Boolean point.
    pub fn evaluate(&self, point: &BitVec) -> u32 {
        let mut acc = 0u32;
        for (k, &v) in &self.monomials {
            if k.iter().all(|&i| point.get(i as usize)) {
                acc = (acc + v) % self.modulus;
            }
        }
        acc
    }

    /// Exact lift of `c · (b ⊕ x_{i₁} ⊕ … ⊕ x_{iₜ})` into a multilinear
    /// polynomial mod N, via the fold `L(u, w) = u + w − 2uw`. For modulus
    /// `2^m` every term whose coefficient gains 2-valuation ≥ m is truncated,
    /// so the result has degree ≤ m − v₂(c).
    pub fn parity_lift(
        modulus: u32,
        n_vars: usize,
        constant_bit: bool,
        vars: &[u16],
        c: u32,
    ) -> Result<PhasePolynomial, PhaseError> {
        check_modulus(modulus)?;
        for &i in vars {
            if i as usize >= n_vars {
                return Err(PhaseError::VarOutOfRange(i, n_vars));
            }
        }
        // lift := 0/1-valued polynomial equal to the running XOR; computed
        // with coefficient arithmetic mod N (exact because the fold is exact
        // over the integers and truncation only removes multiples of N).
        let mut lift = PhasePolynomial::constant(modulus, n_vars, constant_bit as u32);
        for &i in vars {
            let x = PhasePolynomial::monomial(modulus, n_vars, &[i], 1);
            // L(lift, x) = lift + x − 2·lift·x
            let cross = lift.mul(&x).scaled(2).negated();
            lift = lift.add(&x).add(&cross);
        }
        Ok(lift.scaled(c))
    }

    /// Re-index variables through `map[i] = new index` into an `n_new`-variable
    /// polynomial.
    pub fn reindexed(&self, map: &[u16], n_new: usize) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero(self.modulus, n_new);
        for (k, &v) in &self.monomials {
            let mut nk: Vec<u16> = k.iter().map(|&i| map[i as usize]).collect();
            nk.sort_unstable();
            nk.dedup();
            assert_eq!(nk.len(), k.len(), "variable map must be injective on the support");
            out.add_term(&nk, v);
        }
        out
    }

    /// The sub-polynomial of monomials entirely supported on `vars`.
    pub fn projected_onto(&self, vars: &[u16]) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero(self.modulus, self.n_vars);
        for (k, &v) in &self.monomials {
            if k.iter().all(|i| vars.contains(i)) {
                out.add_term(k, v);
            }
        }
        out
    }

    pub fn support_vars(&self) -> Vec<u16> {
        let mut vars: Vec<u16> = self.monomials.keys().flatten().copied().collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Serialize as `diag N=<N> <monomial>:<coeff> ...` with comma-separated
    /// 0-based leg indices per monomial and `c` for the constant term.
    pub fn serialize(&self) -> String {
        let mut s = format!("diag N={}", self.modulus);
        for (k, &v) in &self.monomials {
            if k.is_empty() {
                s.push_str(&format!(" c:{v}"));
            } else {
                let labels: Vec<String> = k.iter().map(|i| i.to_string()).collect();
                s.push_str(&format!(" {}:{v}", labels.join(",")));
            }
        }
        s
    }

    pub fn parse(line: &str, n_vars: usize) -> Result<PhasePolynomial, PhaseError> {
        let mut parts = line.split_whitespace();
        let head = parts.next().ok_or_else(|| PhaseError::Parse("empty line".into()))?;
        if head != "diag" {
            return Err(PhaseError::Parse(format!("expected 'diag', found '{head}'")));
        }
        let modpart = parts
            .next()
            .ok_or_else(|| PhaseError::Parse("missing N=<modulus>".into()))?;
        let modulus: u32 = modpart
            .strip_prefix("N=")
            .ok_or_else(|| PhaseError::Parse(format!("expected N=<modulus>, found '{modpart}'")))?
            .parse()
            .map_err(|_| PhaseError::Parse(format!("bad modulus in '{modpart}'")))?;
        check_modulus(modulus)?;
        let mut p = PhasePolynomial::zero(modulus, n_vars);
        for tok in parts {
            let (mono, coeff) = tok
                .split_once(':')
                .ok_or_else(|| PhaseError::Parse(format!("expected <monomial>:<coeff>, found '{tok}'")))?;
            let c: u32 = coeff
                .parse()
                .map_err(|_| PhaseError::Parse(format!("bad coefficient in '{tok}'")))?;
            if mono == "c" {
                p.add_term(&[], c);
                continue;
            }
            let mut vars: Vec<u16> = Vec::new();
            for lab in mono.split(',') {
                let i: u16 = lab
                    .parse()
                    .map_err(|_| PhaseError::Parse(format!("bad leg index '{lab}' in '{tok}'")))?;
                if i as usize >= n_vars {
                    return Err(PhaseError::VarOutOfRange(i, n_vars));
                }
                vars.push(i);
            }
            vars.sort_unstable();
            vars.dedup();
            p.add_term(&vars, c);
        }
        Ok(p)
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// The computational-basis support of a stabilizer state: an affine subspace
/// `basepoint ⊕ span(basis)` of `F_2^n`.
#[derive(Clone, Debug)]
pub struct AffineSupport {
    pub basepoint: BitVec,
    pub basis: Vec<BitVec>,
    /// Pivot column of each basis vector in the canonical X-RREF; the basis
    /// vector is the only one with a 1 there, so free variable `i` equals the
    /// support point's bit at `pivots[i]` xor the basepoint bit.
    pub pivots: Vec<usize>,
}

impl AffineSupport {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The support point at free-variable assignment `y`.
    pub fn point(&self, y: &BitVec) -> BitVec {
        let mut v = self.basepoint.clone();
        for (i, b) in self.basis.iter().enumerate() {
            if y.get(i) {
                v.xor_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        // Read off the free variables from the pivot columns and compare.
        let mut y = BitVec::zeros(self.basis.len());
        for (i, &p) in self.pivots.iter().enumerate() {
            y.set(i, v.get(p) ^ self.basepoint.get(p));
        }
        self.point(&y) == *v
    }
}

/// Compute the affine support of a full-rank stabilizer tableau.
pub fn affine_support(t: &StabilizerTableau) -> AffineSupport {
    assert_eq!(t.generators.len(), t.n, "affine_support needs a pure state");
    let canon = t.canonicalize();
    let n = t.n;
    // X-pivot rows give the direction space; their X parts are in RREF with
    // one pivot column each.
    let mut basis = Vec::new();
    let mut pivots = Vec::new();
    let mut pure_z_rows = Vec::new();
    for row in &canon.generators {
        if row.x.is_zero() {
            pure_z_rows.push(row.clone());
        } else {
            let pivot = row.x.iter_ones().next().unwrap();
            basis.push(row.x.clone());
            pivots.push(pivot);
        }
    }
    // Basepoint solves the pure-Z sign constraints: a Hermitian pure-Z row has
    // phase 0 (sign +1, parity 0) or 2 (sign −1, parity 1).
    let mut m = Gf2Matrix::new(n);
    let mut rhs = BitVec::zeros(pure_z_rows.len());
    for (i, row) in pure_z_rows.iter().enumerate() {
        m.push_row(row.z.clone());
        debug_assert!(row.phase % 2 == 0, "pure-Z stabilizer must be Hermitian");
        rhs.set(i, row.phase == 2);
    }
    let basepoint = m
        .solve(&rhs)
        .expect("valid tableau always has a consistent support");
    AffineSupport { basepoint, basis, pivots }
}

/// Substitute the affine support parametrization into `f`, producing an exact
/// polynomial in the `r` free variables.
pub fn restrict_phase_poly(
    f: &PhasePolynomial,
    a: &AffineSupport,
) -> Result<PhasePolynomial, PhaseError> {
    let r = a.dim();
    let m = f.modulus.trailing_zeros() as usize;
    let cap = f.max_degree().max(1) * m.max(1);
    // Per-coordinate affine forms, lifted once.
    let n = a.basepoint.len();
    let mut coord_lift: Vec<Option<PhasePolynomial>> = vec![None; n];
    let mut used: Vec<u16> = f.support_vars();
    used.sort_unstable();
    for &j in &used {
        let j = j as usize;
        if j >= n {
            return Err(PhaseError::VarOutOfRange(j as u16, n));
        }
        let vars: Vec<u16> = a
            .basis
            .iter()
            .enumerate()
            .filter(|(_, b)| b.get(j))
            .map(|(i, _)| i as u16)
            .collect();
        coord_lift[j] =
            Some(PhasePolynomial::parity_lift(f.modulus, r, a.basepoint.get(j), &vars, 1)?);
    }
    let mut out = PhasePolynomial::zero(f.modulus, r);
    for (k, &c) in &f.monomials {
        let mut term = PhasePolynomial::constant(f.modulus, r, c);
        for &j in k {
            term = term.mul(coord_lift[j as usize].as_ref().unwrap());
        }
        for mono in term.monomials.keys() {
            if mono.len() > cap {
                return Err(PhaseError::DegreeOverflow {
                    degree: mono.len(),
                    cap,
                    monomial: mono.clone(),
                });
            }
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// Outcome of a diagonal-symmetry check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagonalSymmetry {
    /// The gate preserves the state up to the reported global phase `2πc/N`.
    Symmetry { global_phase: u32 },
    /// Two support points on which the phase function differs.
    NotSymmetry { witness: (BitVec, BitVec) },
}

/// Decide whether the diagonal gate `f` is a symmetry of the stabilizer state.
pub fn verify_diagonal_symmetry(
    t: &StabilizerTableau,
    f: &PhasePolynomial,
) -> Result<DiagonalSymmetry, PhaseError> {
    let a = affine_support(t);
    let restricted = restrict_phase_poly(f, &a)?;
    if restricted.is_constant() {
        return Ok(DiagonalSymmetry::Symmetry { global_phase: restricted.constant_term() });
    }
    // Minimal-degree nonzero non-constant monomial: evaluating at its indicator
    // differs from the evaluation at 0 (no lower-degree monomials exist).
    let mono = restricted
        .monomials
        .keys()
        .filter(|k| !k.is_empty())
        .min_by_key(|k| (k.len(), (*k).clone()))
        .unwrap()
        .clone();
    let zero = BitVec::zeros(a.dim());
    let mut ind = BitVec::zeros(a.dim());
    for &i in &mono {
        ind.set(i as usize, true);
    }
    debug_assert_ne!(restricted.evaluate(&zero), restricted.evaluate(&ind));
    Ok(DiagonalSymmetry::NotSymmetry { witness: (a.point(&zero), a.point(&ind)) })
}

/// Extract the logical diagonal gate implemented by a physical diagonal gate
/// on an isometric block: restrict to the Choi support, demand independence of
/// gauge variables, and return the entrywise conjugate on the logical legs.
pub fn extract_logical_diagonal(
    b: &LegoBlock,
    f_phys: &PhasePolynomial,
) -> Result<PhasePolynomial, PhaseError> {
    let kd = b.kernel_dimension();
    if kd > 0 {
        return Err(PhaseError::NotIsometric(kd));
    }
    let logical: Vec<usize> = b.logical_legs();
    let k = logical.len();
    let n_legs = b.n_legs();
    // Embed f_phys (variables = physical legs, in block leg order) into the
    // full leg space.
    let physical: Vec<usize> = b.physical_legs();
    assert_eq!(f_phys.n_vars, physical.len(), "f_phys must be on the physical legs");
    let map: Vec<u16> = physical.iter().map(|&p| p as u16).collect();
    let f_full = f_phys.reindexed(&map, n_legs);
    let a = affine_support(&b.tableau);
    let restricted = restrict_phase_poly(&f_full, &a)?;
    // Identify which free variables read out logical legs (pivot at a logical
    // column). On an isometric Choi state every logical leg is a pivot.
    let mut log_var_of_leg: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &p) in a.pivots.iter().enumerate() {
        if logical.contains(&p) {
            log_var_of_leg.insert(p, i);
        }
    }
    if log_var_of_leg.len() != k {
        return Err(PhaseError::NotLogicalOperator);
    }
    let logical_vars: Vec<u16> = log_var_of_leg.values().map(|&v| v as u16).collect();
    for mono in restricted.monomials.keys() {
        if let Some(&bad) = mono.iter().find(|v| !logical_vars.contains(v)) {
            return Err(PhaseError::NotLogical(bad as usize));
        }
    }
    // Free variable y_i equals (logical value) ⊕ basepoint bit; substitute
    // a_j = y_i ⊕ t to express the polynomial in logical values.
    let mut f_log = PhasePolynomial::zero(f_phys.modulus, k);
    for (mono, &c) in &restricted.monomials {
        let mut term = PhasePolynomial::constant(f_phys.modulus, k, c);
        for &v in mono {
            // leg for this var
            let (&leg, _) = log_var_of_leg.iter().find(|(_, &i)| i == v as usize).unwrap();
            let log_index = logical.iter().position(|&l| l == leg).unwrap() as u16;
            let lift = PhasePolynomial::parity_lift(
                f_phys.modulus,
                k,
                a.basepoint.get(leg),
                &[log_index],
                1,
            )?;
            term = term.mul(&lift);
        }
        f_log = f_log.add(&term);
    }
    // Q* convention: the stabilizing symmetry pairs the physical gate with the
    // conjugate logical gate, so the implemented logical gate is the conjugate
    // of the restriction; global phase dropped.
    Ok(f_log.negated().without_constant())
}

/// Generators of the group of diagonal symmetries with monomials of degree
/// 1..=`d_max` supported on `leg_subset` (all legs when `None`).
pub fn diagonal_symmetry_group(
    t: &StabilizerTableau,
    modulus: u32,
    d_max: usize,
    leg_subset: Option<&[usize]>,
    monomial_cap: usize,
) -> Result<Vec<PhasePolynomial>, PhaseError> {
    check_modulus(modulus)?;
    let legs: Vec<u16> = match leg_subset {
        Some(s) => s.iter().map(|&l| l as u16).collect(),
        None => (0..t.n as u16).collect(),
    };
    let candidates = monomial_subsets(&legs, d_max);
    if candidates.len() > monomial_cap {
        return Err(PhaseError::MonomialSpaceTooLarge(candidates.len(), monomial_cap));
    }
    let a = affine_support(t);
    // Restrict each candidate monomial once; the symmetry condition is a
    // Z_N-linear system on the coefficient vector.
    let mut restricted: Vec<PhasePolynomial> = Vec::with_capacity(candidates.len());
    for mono in &candidates {
        let f = PhasePolynomial::monomial(modulus, t.n, mono, 1);
        restricted.push(restrict_phase_poly(&f, &a)?.without_constant());
    }
    // Column space: all non-constant restricted monomials that appear.
    let mut cols: Vec<Vec<u16>> = Vec::new();
    for r in &restricted {
        for k in r.monomials.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols.sort();
    let mut m = ZmodMatrix::new(modulus, cols.len().max(1));
    for r in &restricted {
        let mut row = vec![0u32; cols.len().max(1)];
        for (k, &v) in &r.monomials {
            let j = cols.binary_search(k).unwrap();
            row[j] = v;
        }
        m.push_row(row);
    }
    let kernel = m.left_kernel();
    let mut out = Vec::new();
    for combo in kernel {
        let mut f = PhasePolynomial::zero(modulus, t.n);
        for (c, mono) in combo.iter().zip(&candidates) {
            f.add_term(mono, *c);
        }
        if !f.is_zero() {
            out.push(f);
        }
    }
    Ok(out)
}

fn monomial_subsets(legs: &[u16], d_max: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<u16>)> = vec![(0, Vec::new())];
    while let Some((start, cur)) = stack.pop() {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == d_max {
            continue;
        }
        for i in start..legs.len() {
            let mut next = cur.clone();
            next.push(legs[i]);
            stack.push((i + 1, next));
        }
    }
    out.sort();
    out
}

/// Result of a cleanability check: for each requested power of the template,
/// whether a symmetry exists whose projection onto the legs equals the
/// pattern, with the cleaning symmetry as certificate.
#[derive(Clone, Debug)]
pub struct CleanabilityReport {
    pub cleanable: bool,
    /// (power, certificate) for each verified power.
    pub certificates: Vec<(u32, PhasePolynomial)>,
    /// first power with no cleaning symmetry, if any
    pub failing_power: Option<u32>,
}

/// Which powers of the template to require.
#[derive(Clone, Copy, Debug)]
pub enum Powers {
    All,
    Specific(u32),
}

/// Decide whether the diagonal template applied on `legs_a` extends to a
/// symmetry of the block's Choi state (i.e. the gate on A is "cleanable" off
/// A onto the remaining legs).
pub fn check_cleanable(
    b: &LegoBlock,
    legs_a: &[usize],
    template: &PhasePolynomial,
    powers: Powers,
    d_max: usize,
    monomial_cap: usize,
) -> Result<CleanabilityReport, PhaseError> {
    let modulus = template.modulus;
    let n = b.n_legs();
    // Candidate monomials over all legs; the linear system asks for a
    // coefficient vector that (1) restricts to a constant on the support and
    // (2) projects onto exactly the pattern on A.
    let legs: Vec<u16> = (0..n as u16).collect();
    let candidates = monomial_subsets(&legs, d_max);
    if candidates.len() > monomial_cap {
        return Err(PhaseError::MonomialSpaceTooLarge(candidates.len(), monomial_cap));
    }
    let a_support = affine_support(&b.tableau);
    let a_legs: Vec<u16> = legs_a.iter().map(|&l| l as u16).collect();
    let mut restricted: Vec<PhasePolynomial> = Vec::with_capacity(candidates.len());
    for mono in &candidates {
        let f = PhasePolynomial::monomial(modulus, n, mono, 1);
        restricted.push(restrict_phase_poly(&f, &a_support)?.without_constant());
    }
    let mut sym_cols: Vec<Vec<u16>> = Vec::new();
    for r in &restricted {
        for k in r.monomials.keys() {
            if !sym_cols.contains(k) {
                sym_cols.push(k.clone());
            }
        }
    }
    sym_cols.sort();
    // Projection columns: monomials supported on A (among candidates).
    let proj_cols: Vec<Vec<u16>> = candidates
        .iter()
        .filter(|m| m.iter().all(|v| a_legs.contains(v)))
        .cloned()
        .collect();
    let width = sym_cols.len() + proj_cols.len();
    let mut m = ZmodMatrix::new(modulus, width.max(1));
    for (mono, r) in candidates.iter().zip(&restricted) {
        let mut row = vec![0u32; width.max(1)];
        for (k, &v) in &r.monomials {
            let j = sym_cols.binary_search(k).unwrap();
            row[j] = v;
        }
        if mono.iter().all(|v| a_legs.contains(v)) {
            let j = proj_cols.iter().position(|c| c == mono).unwrap();
            row[sym_cols.len() + j] = 1;
        }
        m.push_row(row);
    }
    let power_list: Vec<u32> = match powers {
        Powers::All => (1..modulus).collect(),
        Powers::Specific(p) => vec![p % modulus],
    };
    let mut certificates = Vec::new();
    for p in power_list {
        let pattern = template.scaled(p);
        // Check the pattern's monomials are all within the candidate A-set.
        let mut rhs = vec![0u32; width.max(1)];
        let mut representable = true;
        for (k, &v) in &pattern.monomials {
            if k.is_empty() {
                continue;
            }
            match proj_cols.iter().position(|c| c == k) {
                Some(j) => rhs[sym_cols.len() + j] = v,
                None => {
                    representable = false;
                    break;
                }
            }
        }
        let solution = if representable { m.solve_row_combination(&rhs) } else { None };
        match solution {
            Some(combo) => {
                let mut f = PhasePolynomial::zero(modulus, n);
                for (c, mono) in combo.iter().zip(&candidates) {
                    f.add_term(mono, *c);
                }
                certificates.push((p, f));
            }
            None => {
                return Ok(CleanabilityReport {
                    cleanable: false,
                    certificates,
                    failing_power: Some(p),
                })
            }
        }
    }
    Ok(CleanabilityReport { cleanable: true, certificates, failing_power: None })
}

/// From a verified global diagonal symmetry of the block's Choi state and a
/// verified logical X representative (given on the physical legs), derive the
/// addressable phase symmetry `X̄ f X̄ − f`, supported within the support of
/// the full Choi extension of X̄, and verify it before returning.
pub fn derive_addressable_from_global(
    b: &LegoBlock,
    global_f: &PhasePolynomial,
    logical_x_rep: &PauliOperator,
) -> Result<PhasePolynomial, PhaseError> {
    // Verify inputs.
    match verify_diagonal_symmetry(&b.tableau, global_f)? {
        DiagonalSymmetry::Symmetry { .. } => {}
        DiagonalSymmetry::NotSymmetry { .. } => return Err(PhaseError::NotASymmetry),
    }
    // The full stabilizer of the Choi state restricting to X̄ on the physical
    // legs (unique on an isometric block); its logical part is the implemented
    // logical Pauli.
    let full = b.choi_extension(logical_x_rep).ok_or(PhaseError::NotLogicalOperator)?;
    // Conjugating a diagonal f(x) by an X-type Pauli with support S gives
    // f(x ⊕ 1_S); the commutator symmetry is the difference.
    let flipped = substitute_flips(global_f, &full.x)?;
    let derived = flipped.sub(global_f).without_constant();
    // Support containment and re-verification.
    for mono in derived.monomials.keys() {
        for &v in mono {
            if !full.x.get(v as usize) {
                return Err(PhaseError::NotASymmetry);
            }
        }
    }
    match verify_diagonal_symmetry(&b.tableau, &derived)? {
        DiagonalSymmetry::Symmetry { .. } => Ok(derived),
        DiagonalSymmetry::NotSymmetry { .. } => Err(PhaseError::NotASymmetry),
    }
}

/// Substitute `x_q ↦ 1 ⊕ x_q` for every q in `flips`.
pub fn substitute_flips(
    f: &PhasePolynomial,
    flips: &BitVec,
) -> Result<PhasePolynomial, PhaseError> {
    let mut out = PhasePolynomial::zero(f.modulus, f.n_vars);
    for (k, &c) in &f.monomials {
        let mut term = PhasePolynomial::constant(f.modulus, f.n_vars, c);
        for &v in k {
            let lift = if flips.get(v as usize) {
                PhasePolynomial::parity_lift(f.modulus, f.n_vars, true, &[v], 1)?
            } else {
                PhasePolynomial::monomial(f.modulus, f.n_vars, &[v], 1)
            };
            term = term.mul(&lift);
        }
        out = out.add(&term);
    }
    Ok(out)
}
