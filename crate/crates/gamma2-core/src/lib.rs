//! Exact symbolic computation for traces of words in the level-2 principal
//! congruence subgroup of the modular group.
//!
//! The group is freely generated by `A = (1 2; 0 1)` and `B = (1 0; -2 1)`.
//! The trace of `A^{m_1} B^{n_1} ... A^{m_k} B^{n_k}` is a multilinear
//! polynomial `p_k` in the 2k exponents; this crate computes `p_k` (and the
//! full matrix `F_k` of entry polynomials) by exact symbolic products,
//! exhaustively verifies that every sign substitution
//! `v -> sigma(v) * (1 + v)` leaves the coefficients single-signed with sign
//! `(-1)^(k + #negatives)`, and machine-checks the finite matrix identities,
//! the trace recursion, and the certificate-word properties that the
//! inductive argument for that fact rests on.
//!
//! All arithmetic is exact: 128-bit integers with checked operations.
//! Overflow is reported as an error, never wrapped. All values are immutable
//! and all operations pure, so the verification sweeps parallelize without
//! coordination and reports are deterministic for every worker count.

pub mod certificate;
pub mod error;
pub mod matrix;
pub mod poly;
pub mod sigma;
pub mod verify;

pub use error::{CoreError, Result};
pub use matrix::{
    compute_f, compute_f_sigma, constants, is_decreasing, m_table, trace_comb, word_to_matrix,
    Constants, GenWord, Generator, IntMatrix2, PolyMatrix2, PowerKind,
};
pub use poly::{Coeff, Monomial, MultilinearPoly, SignPattern, VarIndex};
pub use sigma::SignSequence;
pub use verify::{
    goodness, numeric_oracle, oracle_trials, predicted_sign, verify_comb_good, verify_theorem,
    GoodnessFailure, GoodnessReport,
};
