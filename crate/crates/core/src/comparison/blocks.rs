use crate::exterior::{binom_usize, rank_subset, subsets, wedge_insert};
use crate::gonal5::SkewPsi;
use crate::linalg::{PrimeField, SparseMatrix};
use crate::scroll::{Bidegree, ScrollSection};

use super::ComparisonError;

/// `entry · m` expanded in the basis `s^l t^{e_i-1-l} φ_i` of `F = H^0(O(H-R))`,
/// for an entry of bidegree `(1, a-b)` and a binary form `m` of degree `b-a-1`.
pub fn entry_action(field: &PrimeField, entry: &ScrollSection, form: &[u32]) -> Result<Vec<u32>, ComparisonError> {
    let deg = entry.bidegree();
    let want = Bidegree::new(1, -1);
    let got = Bidegree::new(deg.a, deg.b + form.len() as i64 - 1);
    if form.is_empty() || got != want {
        return Err(ComparisonError::BidegreeMismatch {
            entry: deg,
            form_degree: form.len() as i64 - 1,
        });
    }
    Ok(entry.mul_form(field, form).to_coords())
}

/// The monomial `s^{d-k} t^k` as a dense binary form.
pub fn monomial_form(d: usize, k: usize) -> Vec<u32> {
    let mut v = vec![0; d + 1];
    v[k] = 1;
    v
}

/// Source term `Λ^j F ⊗ S_{b_i-j} G` of column `i` at index `j`.
pub fn source_dim(psi: &SkewPsi, i: usize, j: usize) -> usize {
    let f = psi.config.f as usize;
    let b = psi.config.b[i];
    if (j as i64) > b {
        0
    } else {
        binom_usize(f, j) * (b - j as i64 + 1) as usize
    }
}

/// Target term `Λ^{j+1} F ⊗ D_{j-a_q-1} G*` of row `q` at index `j`.
pub fn target_dim(psi: &SkewPsi, q: usize, j: usize) -> usize {
    let f = psi.config.f as usize;
    let a = psi.config.a[q];
    if (j as i64) < a + 1 {
        0
    } else {
        binom_usize(f, j + 1) * (j as i64 - a) as usize
    }
}

/// Whether block `(q, i)` is scalar at index `j`: `b_i ≥ j ≥ a_q + 1`.
pub fn block_is_scalar(psi: &SkewPsi, q: usize, i: usize, j: usize) -> bool {
    let j = j as i64;
    psi.config.b[i] >= j && j >= psi.config.a[q] + 1
}

/// The window `min b ≥ j ≥ max a + 1` in which every block is scalar.
pub fn scalar_window(psi: &SkewPsi, j: usize) -> bool {
    (0..5).all(|q| (0..5).all(|i| block_is_scalar(psi, q, i, j)))
}

/// A block of a comparison map, as a sparse scalar matrix from
/// `Λ^j F ⊗ S_{b_i-j} G` to `Λ^{j+1} F ⊗ D_{j-a_q-1} G*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonBlock {
    pub source: usize,
    pub target: usize,
    pub j: usize,
    pub matrix: SparseMatrix,
}

/// Column entries of block `(q, i)` for every source basis element, with rows
/// relative to the block.
fn block_columns(psi: &SkewPsi, q: usize, i: usize, j: usize) -> Result<Vec<Vec<(u32, u32)>>, ComparisonError> {
    if !block_is_scalar(psi, q, i, j) {
        return Err(ComparisonError::NotScalar { q, i, j });
    }
    entry_columns(
        &psi.field,
        psi.config.f as usize,
        &psi.entry(q, i),
        psi.config.a[q],
        psi.config.b[i],
        j,
    )
}

/// Columns of the scalar comparison map `C^b_j → C^a_j` induced by a section of
/// bidegree `(1, a-b)`, for `b ≥ j ≥ a + 1`.
pub fn entry_columns(
    field: &PrimeField,
    f: usize,
    entry: &ScrollSection,
    a: i64,
    b: i64,
    j: usize,
) -> Result<Vec<Vec<(u32, u32)>>, ComparisonError> {
    let ji = j as i64;
    if b < ji || ji < a + 1 || a < 0 {
        return Err(ComparisonError::NotScalar { q: 0, i: 0, j });
    }
    let (a, b) = (a as usize, b as usize);
    let src_mult = b - j + 1;
    let tgt_mult = j - a;
    let prod_deg = b - a - 1;
    let actions: Vec<Vec<u32>> = (0..=prod_deg)
        .map(|h| entry_action(field, entry, &monomial_form(prod_deg, h)))
        .collect::<Result<_, _>>()?;
    let mut cols = vec![Vec::new(); binom_usize(f, j) * src_mult];
    if entry.is_zero() {
        return Ok(cols);
    }
    for (r, omega) in subsets(f, j).into_iter().enumerate() {
        for k in 0..src_mult {
            let col = &mut cols[r * src_mult + k];
            for kp in 0..tgt_mult {
                for (c, &v) in actions[k + kp].iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    if let Some((neg, wedge)) = wedge_insert(&omega, c) {
                        let row = rank_subset(&wedge) * tgt_mult + kp;
                        col.push((row as u32, if neg { field.neg(v) } else { v }));
                    }
                }
            }
        }
    }
    Ok(cols)
}

/// Block `(q, i)` at index `j`: column `(ω, g)` maps to
/// `Σ_{m'} (ω ∧ entry_action(Ψ_{qi}, g·g'_{m'})) ⊗ g'*_{m'}`.
pub fn assemble_block(psi: &SkewPsi, i: usize, q: usize, j: usize) -> Result<ComparisonBlock, ComparisonError> {
    let cols = block_columns(psi, q, i, j)?;
    Ok(ComparisonBlock {
        source: i,
        target: q,
        j,
        matrix: SparseMatrix::from_columns(&psi.field, target_dim(psi, q, j), cols),
    })
}

/// Block matrix with row blocks `rows` (targets `q`) and column blocks `cols`
/// (sources `i`), containing block `(q, i)` whenever it is scalar at `j` and
/// `q ≠ i` (diagonal entries of Ψ vanish).
pub fn assemble_blocks(
    psi: &SkewPsi,
    j: usize,
    rows: &[usize],
    cols: &[usize],
) -> Result<SparseMatrix, ComparisonError> {
    let mut row_off = Vec::with_capacity(rows.len());
    let mut nrows = 0;
    for &q in rows {
        row_off.push(nrows);
        nrows += target_dim(psi, q, j);
    }
    let mut columns: Vec<Vec<(u32, u32)>> = Vec::new();
    for &i in cols {
        let mut block_cols = vec![Vec::new(); source_dim(psi, i, j)];
        for (&q, &off) in rows.iter().zip(&row_off) {
            if q == i || !block_is_scalar(psi, q, i, j) {
                continue;
            }
            for (dst, src) in block_cols.iter_mut().zip(block_columns(psi, q, i, j)?) {
                dst.extend(src.into_iter().map(|(r, v)| (r + off as u32, v)));
            }
        }
        columns.extend(block_cols);
    }
    Ok(SparseMatrix::from_columns(&psi.field, nrows, columns))
}

/// The full comparison map `ψ_j : ⊕_i C^{b_i}_j → ⊕_q C^{a_q}_j`, defined when
/// `j` lies in the scalar window.
pub fn assemble_psi(psi: &SkewPsi, j: usize) -> Result<SparseMatrix, ComparisonError> {
    if !scalar_window(psi, j) {
        return Err(ComparisonError::WindowViolated {
            j,
            min_b: *psi.config.b.iter().min().unwrap(),
            max_a: *psi.config.a.iter().max().unwrap(),
        });
    }
    let all = [0, 1, 2, 3, 4];
    assemble_blocks(psi, j, &all, &all)
}

/// Offset of column block `i` in the source of [`assemble_psi`].
pub fn source_offset(psi: &SkewPsi, i: usize, j: usize) -> usize {
    (0..i).map(|k| source_dim(psi, k, j)).sum()
}
