//! A workbench for constructing quantum error-correcting codes out of small
//! stabilizer "lego" blocks and verifying, with exact arithmetic, which
//! transversal and addressable logical gates the constructions support.
//!
//! The crate is organized bottom-up:
//!
//! - [`pauli`], [`gf2`], [`zmod`]: exact arithmetic substrate — phase-tracked
//!   Pauli operators, word-packed GF(2) linear algebra, and a Howell-form
//!   solver over `Z_{2^m}`.
//! - [`clifford`], [`tableau`]: Clifford tableaux (conjugation, entrywise
//!   complex conjugate) and stabilizer tableaux (canonical form, membership,
//!   symbolic measurement / projection).
//! - [`dense`]: small dense statevector and matrix oracles used to cross-check
//!   the symbolic machinery.
//! - [`block`], [`catalog`]: lego blocks (Choi-state tableaux with leg roles)
//!   and the validated catalog of standard blocks.
//! - [`network`]: trace networks — Bell fusion, Clifford-deformed edges, GHZ
//!   hyperedges, whole-network contraction with isometry tracking.
//! - [`phasepoly`]: diagonal Clifford-hierarchy symmetries as phase
//!   polynomials over `Z_N` restricted to affine stabilizer supports.
//! - [`cliffsym`]: Clifford product symmetries, Pauli cleaning, matched-symmetry
//!   propagation, operator flows, and fault-tolerance bookkeeping.
//! - [`analysis`]: brute-force distance, weight enumerators, fusion-parameter
//!   predictors.
//! - [`family`]: parameterized builders for the code families (line/planar
//!   phase-gate codes, CCZ/CS families, holographic and fractal codes).
//! - [`msd`]: magic-state-distillation fixed-point analysis by dense
//!   simulation.
//! - [`graphstate`]: marked graph states, LC-class enumerator table, localized
//!   CZ checks, discrete-angle symmetry families.
//! - [`manifest`]: run manifests for the thin CLI.
//!
//! Most capabilities have a runnable demonstration under `examples/`.

pub mod analysis;
pub mod block;
pub mod catalog;
pub mod clifford;
pub mod cliffsym;
pub mod dense;
pub mod family;
pub mod gf2;
pub mod graphstate;
pub mod manifest;
pub mod msd;
pub mod network;
pub mod pauli;
pub mod phasepoly;
pub mod tableau;
pub mod zmod;

pub use block::{LegKind, LegRole, LegoBlock};
pub use clifford::CliffordGate;
pub use pauli::PauliOperator;
pub use tableau::StabilizerTableau;
