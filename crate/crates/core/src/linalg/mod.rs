//! Exact linear algebra over prime fields.
//!
//! Dense Gaussian elimination handles everything up to a few thousand rows and
//! columns; [`sparse_rank_streaming`] takes over for the Koszul-sized matrices.
//! All routines are deterministic: pivots are chosen by a fixed rule, never at
//! random.

mod blocked;
mod dense;
mod field;
mod sparse;

pub use blocked::{blocked_rank, BLOCKED_MAX_PRIME};
pub use dense::{DenseMatrix, Rref};
pub use field::{is_prime, next_prime, PrimeField, DEFAULT_PRIME};
pub use sparse::{sparse_rank_streaming, SparseMatrix, DEFAULT_MEMORY_BUDGET, DENSE_DIM_LIMIT, DENSE_ENTRY_LIMIT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("memory budget of {budget} bytes exceeded (needed {needed}, rank so far {rank_so_far})")]
    BudgetExceeded {
        budget: usize,
        needed: usize,
        rank_so_far: usize,
    },
}

/// Rank of a dense matrix over GF(p).
pub fn rank(m: &DenseMatrix, field: &PrimeField) -> usize {
    m.rank(field)
}

/// Right-kernel basis of a dense matrix over GF(p).
pub fn kernel_basis(m: &DenseMatrix, field: &PrimeField) -> Vec<Vec<u32>> {
    m.kernel_basis(field)
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn matrix() -> impl Strategy<Value = (usize, usize, Vec<u32>)> {
        (0usize..9, 0usize..9).prop_flat_map(|(r, c)| {
            // small alphabet makes rank drops common
            (
                Just(r),
                Just(c),
                proptest::collection::vec(prop_oneof![Just(0u32), 1u32..4, Just(10006u32)], r * c),
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity((r, c, data) in matrix()) {
            let f = PrimeField::default();
            let m = DenseMatrix::from_vec(r, c, data).unwrap();
            let rank = m.rank(&f);
            let ker = m.kernel_basis(&f);
            prop_assert_eq!(rank + ker.len(), c);
            prop_assert_eq!(rank, m.transpose().rank(&f));
            for v in &ker {
                prop_assert!(m.mul_vec(&f, v).iter().all(|&x| x == 0));
            }
            let sparse = SparseMatrix::from_dense(&m);
            prop_assert_eq!(sparse_rank_streaming(&sparse, &f, 1 << 20).unwrap(), rank);
            prop_assert_eq!(m.rank(&f), rank);
        }
    }
}
