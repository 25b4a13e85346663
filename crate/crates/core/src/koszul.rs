//! Linear-strand Betti numbers straight from the quadrics, by Koszul cohomology.
//!
//! With `V = (S_C)_1` and `(S_C)_2 = Sym_2 V / I_2`, the Betti number
//! `β_{p,p+1}` is the homology of
//! `Λ^{p+1} V → Λ^p V ⊗ V → Λ^{p-1} V ⊗ (S_C)_2` in the middle. The first map
//! is injective, so `β_{p,p+1} = nullity(d_p) - C(g, p+1)`. Nothing here uses
//! the scroll; the oracle only sees the quadrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comparison::{reduced_rank, LabeledMatrix};
use crate::exterior::{binom_usize, rank_subset, remove_at, subsets, unrank_subset};
use crate::gonal5::CurveBundle;
use crate::linalg::{DenseMatrix, LinalgError, PrimeField, SparseMatrix};
use crate::poly::{sym2_index, Quadric};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KoszulError {
    #[error("the {count} quadrics span only {rank} dimensions")]
    DependentQuadrics { count: usize, rank: usize },
    #[error("p = {p} is outside 1..={max} for {g} variables")]
    OutOfRange { p: usize, g: usize, max: usize },
    #[error("quotient has dimension {got}, expected {want}")]
    QuotientDimension { got: usize, want: usize },
    #[error("{0} variables exceed the 63 supported by the oracle")]
    TooManyVariables(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which degree-2 monomials become pivots when the quadrics are row reduced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonomialOrder {
    /// Lexicographically first monomials are pivots.
    #[default]
    Lex,
    /// Lexicographically last monomials are pivots.
    Reversed,
}

/// `Sym_2 V` modulo the span of the quadrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientDegree2 {
    g: usize,
    /// Degree-2 monomials (as [`sym2_index`]) forming the quotient basis.
    basis: Vec<usize>,
    /// For each degree-2 monomial, its class as `(basis position, coefficient)`.
    reduction: Vec<Vec<(u32, u32)>>,
}

impl QuotientDegree2 {
    pub fn variables(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Class of `x_i x_j`.
    pub fn reduce(&self, i: usize, j: usize) -> &[(u32, u32)] {
        &self.reduction[sym2_index(self.g, i, j)]
    }
}

/// Row reduces the quadrics; the non-pivot monomials span the quotient.
pub fn build_quotient(
    field: &PrimeField,
    quadrics: &[Quadric],
    g: usize,
    order: MonomialOrder,
) -> Result<QuotientDegree2, KoszulError> {
    let n = g * (g + 1) / 2;
    // position of monomial m in the elimination order
    let pos = |m: usize| match order {
        MonomialOrder::Lex => m,
        MonomialOrder::Reversed => n - 1 - m,
    };
    let mut data = vec![0u32; quadrics.len() * n];
    for (r, q) in quadrics.iter().enumerate() {
        for (m, &c) in q.to_sym2_vector(g).iter().enumerate() {
            data[r * n + pos(m)] = c;
        }
    }
    let rref = DenseMatrix::from_vec(quadrics.len(), n, data)?.rref(field);
    if rref.pivots.len() < quadrics.len() {
        return Err(KoszulError::DependentQuadrics {
            count: quadrics.len(),
            rank: rref.pivots.len(),
        });
    }
    let mut pivot_row = vec![None; n];
    for (r, &c) in rref.pivots.iter().enumerate() {
        pivot_row[c] = Some(r);
    }
    let free: Vec<usize> = (0..n).filter(|&c| pivot_row[c].is_none()).collect();
    let mut slot = vec![u32::MAX; n];
    for (k, &c) in free.iter().enumerate() {
        slot[c] = k as u32;
    }
    let reduction = (0..n)
        .map(|m| {
            let c = pos(m);
            match pivot_row[c] {
                None => vec![(slot[c], 1)],
                // x_m = -Σ (row entries at free columns)
                Some(r) => free
                    .iter()
                    .filter_map(|&fc| {
                        let v = rref.matrix.get(r, fc);
                        (v != 0).then(|| (slot[fc], field.neg(v)))
                    })
                    .collect(),
            }
        })
        .collect();
    let basis = free.iter().map(|&c| pos(c)).collect();
    Ok(QuotientDegree2 { g, basis, reduction })
}

/// The quotient for a curve bundle; its dimension must be `3g - 3`.
pub fn curve_quotient(bundle: &CurveBundle, order: MonomialOrder) -> Result<QuotientDegree2, KoszulError> {
    let g = bundle.genus() as usize;
    let q = build_quotient(&bundle.field(), &bundle.quadrics, g, order)?;
    if q.dim() != 3 * g - 3 {
        return Err(KoszulError::QuotientDimension {
            got: q.dim(),
            want: 3 * g - 3,
        });
    }
    Ok(q)
}

/// `d_p : Λ^p V ⊗ V → Λ^{p-1} V ⊗ (S_C)_2`,
/// `ω ⊗ x_v ↦ Σ_k (-1)^k (ω ∖ ω_k) ⊗ [x_{ω_k} x_v]`.
/// Column `rank(ω)·g + v`, row `rank(ω')·dim + c`.
pub fn koszul_matrix(field: &PrimeField, q: &QuotientDegree2, p: usize) -> SparseMatrix {
    let (g, dim) = (q.g, q.dim());
    let rows = binom_usize(g, p - 1) * dim;
    let mut columns = Vec::with_capacity(binom_usize(g, p) * g);
    for omega in subsets(g, p) {
        for v in 0..g {
            let mut col = Vec::new();
            for (k, &w) in omega.iter().enumerate() {
                let base = rank_subset(&remove_at(&omega, k)) * dim;
                for &(c, x) in q.reduce(w, v) {
                    col.push(((base + c as usize) as u32, if k % 2 == 1 { field.neg(x) } else { x }));
                }
            }
            columns.push(col);
        }
    }
    SparseMatrix::from_columns(field, rows, columns)
}

/// `β_{p,p+1}` from the quotient. The rank is computed by block elimination
/// along the exterior algebra, within `memory_budget` bytes.
pub fn koszul_betti(
    field: &PrimeField,
    q: &QuotientDegree2,
    p: usize,
    memory_budget: usize,
) -> Result<usize, KoszulError> {
    let g = q.g;
    if g > 63 {
        return Err(KoszulError::TooManyVariables(g));
    }
    let max = g.saturating_sub(3).max(1);
    if p < 1 || p > max {
        return Err(KoszulError::OutOfRange { p, g, max });
    }
    let m = koszul_matrix(field, q, p);
    let cols = m.cols();
    let rank = reduced_rank(field, labeled_koszul(q, p, m), g, memory_budget)?.rank;
    Ok(cols - rank - binom_usize(g, p + 1))
}

/// [`koszul_matrix`] labeled by the complements of its wedge monomials, so
/// that column labels are contained in the labels of the rows they reach.
pub fn labeled_koszul(q: &QuotientDegree2, p: usize, m: SparseMatrix) -> LabeledMatrix {
    let g = q.g;
    let full: u64 = (1 << g) - 1;
    let label = |r: usize, size: usize| full & !unrank_subset(r, size).iter().fold(0u64, |a, &c| a | 1 << c);
    LabeledMatrix {
        row_labels: (0..m.rows()).map(|r| label(r / q.dim(), p - 1)).collect(),
        col_labels: (0..m.cols()).map(|c| label(c / g, p)).collect(),
        columns: m.columns().to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gonal5::generate_curve;
    use crate::linalg::DEFAULT_MEMORY_BUDGET;

    fn field() -> PrimeField {
        PrimeField::new(10007).unwrap()
    }

    #[test]
    fn quotient_dimensions() {
        let f = field();
        for (g, quadrics, dim) in [(13, 55, 36), (11, 36, 30)] {
            let b = generate_curve(g, &f, 3).unwrap();
            assert_eq!(b.quadrics.len(), quadrics);
            for order in [MonomialOrder::Lex, MonomialOrder::Reversed] {
                assert_eq!(curve_quotient(&b, order).unwrap().dim(), dim);
            }
        }
        let empty = build_quotient(&f, &[], 13, MonomialOrder::Lex).unwrap();
        assert_eq!(empty.dim(), 91);
        assert_eq!(empty.reduce(2, 5), &[(sym2_index(13, 2, 5) as u32, 1)]);
    }

    #[test]
    fn quadrics_reduce_to_zero() {
        let f = field();
        let b = generate_curve(11, &f, 1).unwrap();
        let q = curve_quotient(&b, MonomialOrder::Lex).unwrap();
        for quad in &b.quadrics {
            let mut acc = vec![0u32; q.dim()];
            for (&(i, j), &c) in quad.terms() {
                for &(k, x) in q.reduce(i as usize, j as usize) {
                    acc[k as usize] = f.add(acc[k as usize], f.mul(c, x));
                }
            }
            assert!(acc.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn dependent_quadrics_rejected() {
        let f = field();
        let b = generate_curve(11, &f, 1).unwrap();
        let mut quadrics = b.quadrics.clone();
        quadrics.push(quadrics[0].clone());
        assert!(matches!(
            build_quotient(&f, &quadrics, 11, MonomialOrder::Lex),
            Err(KoszulError::DependentQuadrics { count: 37, rank: 36 })
        ));
    }

    #[test]
    fn first_betti_is_quadric_count() {
        let f = field();
        for g in [9, 11, 13] {
            let b = generate_curve(g, &f, 2).unwrap();
            let q = curve_quotient(&b, MonomialOrder::Lex).unwrap();
            assert_eq!(
                koszul_betti(&f, &q, 1, DEFAULT_MEMORY_BUDGET).unwrap(),
                b.quadrics.len()
            );
        }
        let empty = build_quotient(&f, &[], 6, MonomialOrder::Lex).unwrap();
        assert_eq!(koszul_betti(&f, &empty, 1, DEFAULT_MEMORY_BUDGET).unwrap(), 0);
        assert_eq!(koszul_betti(&f, &empty, 3, DEFAULT_MEMORY_BUDGET).unwrap(), 0);
    }

    #[test]
    fn polynomial_ring_has_no_linear_syzygies() {
        // with no quadrics the Koszul complex of Sym V is exact in positive degree:
        // nullity(d_p) = C(g, p+1) exactly
        let f = field();
        let q = build_quotient(&f, &[], 7, MonomialOrder::Lex).unwrap();
        for p in 1..=4 {
            let m = koszul_matrix(&f, &q, p);
            assert_eq!(m.cols() - m.rank(&f), binom_usize(7, p + 1), "p={p}");
        }
    }

    #[test]
    fn out_of_range() {
        let f = field();
        let q = build_quotient(&f, &[], 9, MonomialOrder::Lex).unwrap();
        assert!(matches!(
            koszul_betti(&f, &q, 0, 1 << 30),
            Err(KoszulError::OutOfRange { .. })
        ));
        assert!(matches!(
            koszul_betti(&f, &q, 7, 1 << 30),
            Err(KoszulError::OutOfRange { .. })
        ));
    }

    #[test]
    fn pivot_order_does_not_matter() {
        let f = field();
        let b = generate_curve(11, &f, 4).unwrap();
        for p in 1..=3 {
            let lex = koszul_betti(&f, &curve_quotient(&b, MonomialOrder::Lex).unwrap(), p, 1 << 30).unwrap();
            let rev = koszul_betti(&f, &curve_quotient(&b, MonomialOrder::Reversed).unwrap(), p, 1 << 30).unwrap();
            assert_eq!(lex, rev, "p={p}");
        }
    }

    #[test]
    fn oracle_matches_mapping_cone_genus_13() {
        let f = field();
        for seed in [1, 2] {
            let b = generate_curve(13, &f, seed).unwrap();
            let table = crate::comparison::mapping_cone_betti(&b.psi, 2000).unwrap();
            let q = curve_quotient(&b, MonomialOrder::Lex).unwrap();
            assert_eq!(koszul_betti(&f, &q, 1, DEFAULT_MEMORY_BUDGET).unwrap(), 55);
            assert_eq!(koszul_betti(&f, &q, 2, DEFAULT_MEMORY_BUDGET).ok(), table.linear[2]);
            assert_eq!(table.linear[2], Some(320));
        }
    }

    #[test]
    #[ignore = "slow: about a minute and 1.5 GB"]
    fn oracle_genus_13_position_6() {
        let f = field();
        let b = generate_curve(13, &f, 1).unwrap();
        let q = curve_quotient(&b, MonomialOrder::Lex).unwrap();
        assert_eq!(koszul_betti(&f, &q, 6, DEFAULT_MEMORY_BUDGET).unwrap(), 222);
    }
}
