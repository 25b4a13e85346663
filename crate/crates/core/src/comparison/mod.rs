//! Comparison maps between the Eagon–Northcott type complexes of the rank-2
//! bundles on the scroll, and the extra syzygies they produce.
//!
//! The map `ψ_j` is assembled block by block: block `(q, i)` goes from
//! `Λ^j F ⊗ S_{b_i-j} G` to `Λ^{j+1} F ⊗ D_{j-a_q-1} G*` and is only a scalar
//! map when `b_i ≥ j ≥ a_q + 1`.

mod blocks;
mod cone;
mod kernel;
mod reduce;

use thiserror::Error;

use crate::gonal5::GonalError;
use crate::linalg::LinalgError;
use crate::scroll::Bidegree;

pub use blocks::{
    assemble_block, assemble_blocks, assemble_psi, block_is_scalar, entry_action, entry_columns, monomial_form,
    scalar_window, source_dim, source_offset, target_dim, ComparisonBlock,
};
pub use cone::{
    betti_delta, betti_delta_two_primes, comparison_rank, linear_term, mapping_cone_betti, nonminimal_inventory,
    psi_rank, quadratic_term, scalar_map, BettiDelta, BettiTable, NonminimalPosition, TwoPrimeDelta,
    REDUCTION_MIN_COLS,
};
pub use kernel::{
    certify, distinguished_column, forced_factor_count, kernel_element, kernel_family_g13, normalized_psi_g13,
    span_dim, theorem_threshold, Certificate, KernelElement, MembershipCheck, MAX_EXPANDED_SUBSETS,
};
pub use reduce::{generic_labeled_psi, labeled_psi, reduced_rank, LabeledMatrix, ReducedRank, ReductionRound};

#[derive(Debug, Error)]
pub enum ComparisonError {
    #[error("entry of bidegree {entry} cannot act on a form of degree {form_degree}")]
    BidegreeMismatch { entry: Bidegree, form_degree: i64 },
    #[error("block ({q}, {i}) is not scalar at j = {j}")]
    NotScalar { q: usize, i: usize, j: usize },
    #[error("scalar window violated at j = {j}: need min b_i ≥ j ≥ max a_i + 1, but min b_i = {min_b} and max a_i + 1 = {}", .max_a + 1)]
    WindowViolated { j: usize, min_b: i64, max_a: i64 },
    #[error(transparent)]
    Gonal(#[from] GonalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("genus {genus}, c = {shift}: the construction needs {needed} forced factors but j = {available}")]
    Threshold {
        genus: u32,
        shift: usize,
        needed: usize,
        available: usize,
    },
    #[error("degenerate instance (seed {seed}): {reason}; try another seed")]
    Degenerate { seed: u64, reason: String },
    #[error("the kernel family is only defined in genus 13, not {0}")]
    WrongGenus(u32),
    #[error("(λ, μ) = (0, 0) does not define a point")]
    ZeroParameter,
}

#[cfg(test)]
mod tests;
