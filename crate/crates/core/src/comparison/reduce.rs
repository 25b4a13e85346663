//! Rank of `ψ_j` by block elimination along the exterior algebra.
//!
//! `ψ_j` commutes with left multiplication by `Λ F`: every row and column
//! carries a subset label (its wedge monomial), and an entry from column `ℓ` to
//! row `ℓ'` vanishes unless `ℓ ⊆ ℓ'`. Removing a set `U` of basis vectors
//! from the labels, the entries from columns `ℓ` (with `ℓ ∩ U = ∅`) to rows
//! `ℓ ∪ U` form a block diagonal matrix, one block per `ℓ`, given by the
//! `e_U`-coefficients. Pivoting on invertible sub-blocks gives
//! `rank ψ = rank B + rank(C − A B^{-1} D)`, and the Schur complement again
//! satisfies `ℓ ⊆ ℓ'` for the labels with `U` removed, so the step repeats
//! until no vectors are left; the remainder is ranked directly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exterior::{binom_usize, rank_subset, subsets, unrank_subset, wedge_insert};
use crate::gonal5::SkewPsi;
use crate::linalg::{DenseMatrix, LinalgError, PrimeField, SparseMatrix};

use super::blocks::{entry_action, monomial_form, scalar_window, source_dim, target_dim};
use super::ComparisonError;

/// A sparse matrix whose rows and columns carry subset labels (bitmasks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledMatrix {
    pub row_labels: Vec<u64>,
    pub col_labels: Vec<u64>,
    /// Columns as `(row, value)` lists.
    pub columns: Vec<Vec<(u32, u32)>>,
}

/// One round of block elimination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRound {
    pub removed: Vec<usize>,
    pub pivots: usize,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedRank {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub rounds: Vec<ReductionRound>,
}

fn mask(subset: &[usize]) -> u64 {
    subset.iter().fold(0, |m, &c| m | (1 << c))
}

/// `ψ_j` from [`super::assemble_psi`] with its wedge-monomial labels.
pub fn labeled_psi(psi: &SkewPsi, m: &SparseMatrix, j: usize) -> LabeledMatrix {
    let cfg = &psi.config;
    let mut col_labels = Vec::with_capacity(m.cols());
    for i in 0..5 {
        let mult = (cfg.b[i] - j as i64 + 1).max(0) as usize;
        for idx in 0..source_dim(psi, i, j) {
            col_labels.push(mask(&unrank_subset(idx / mult, j)));
        }
    }
    let mut row_labels = Vec::with_capacity(m.rows());
    for q in 0..5 {
        let mult = (j as i64 - cfg.a[q]).max(0) as usize;
        for idx in 0..target_dim(psi, q, j) {
            row_labels.push(mask(&unrank_subset(idx / mult, j + 1)));
        }
    }
    LabeledMatrix {
        row_labels,
        col_labels,
        columns: m.columns().to_vec(),
    }
}

/// `ψ_j` written in a random basis of `F`, with its labels. Its rank equals
/// that of [`super::assemble_psi`]; a generic basis makes every basis vector
/// a generic pivot direction.
pub fn generic_labeled_psi(psi: &SkewPsi, j: usize, seed: u64) -> Result<LabeledMatrix, ComparisonError> {
    let cfg = &psi.config;
    let field = &psi.field;
    if !scalar_window(psi, j) {
        return Err(ComparisonError::WindowViolated {
            j,
            min_b: *cfg.b.iter().min().unwrap(),
            max_a: *cfg.a.iter().max().unwrap(),
        });
    }
    let f = cfg.f as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = loop {
        let h: Vec<Vec<u32>> = (0..f)
            .map(|_| (0..f).map(|_| field.random(&mut rng)).collect())
            .collect();
        let m = DenseMatrix::from_columns(f, &h);
        if m.rank(field) == f {
            break m;
        }
    };
    let omegas = subsets(f, j);
    let src_mult: Vec<usize> = (0..5).map(|i| (cfg.b[i] - j as i64 + 1) as usize).collect();
    let tgt_mult: Vec<usize> = (0..5).map(|q| (j as i64 - cfg.a[q]) as usize).collect();
    let tgt_block = binom_usize(f, j + 1);
    let mut row_off = vec![0; 6];
    for q in 0..5 {
        row_off[q + 1] = row_off[q] + tgt_block * tgt_mult[q];
    }
    let mut row_labels = vec![0u64; row_off[5]];
    for (r, wedge) in subsets(f, j + 1).iter().enumerate() {
        for q in 0..5 {
            for kp in 0..tgt_mult[q] {
                row_labels[row_off[q] + r * tgt_mult[q] + kp] = mask(wedge);
            }
        }
    }
    let mut col_labels = Vec::new();
    let mut columns = Vec::new();
    for i in 0..5 {
        let first = columns.len();
        for omega in &omegas {
            for _ in 0..src_mult[i] {
                col_labels.push(mask(omega));
                columns.push(Vec::new());
            }
        }
        for q in (0..5).filter(|&q| q != i) {
            let entry = psi.entry(q, i);
            if entry.is_zero() {
                continue;
            }
            let d = (cfg.b[i] - cfg.a[q] - 1) as usize;
            let actions: Vec<Vec<u32>> = (0..=d)
                .map(|h| Ok(basis.mul_vec(field, &entry_action(field, &entry, &monomial_form(d, h))?)))
                .collect::<Result<_, ComparisonError>>()?;
            for (r, omega) in omegas.iter().enumerate() {
                for k in 0..src_mult[i] {
                    let col = &mut columns[first + r * src_mult[i] + k];
                    for kp in 0..tgt_mult[q] {
                        for (c, &v) in actions[k + kp].iter().enumerate() {
                            if v == 0 {
                                continue;
                            }
                            if let Some((neg, wedge)) = wedge_insert(omega, c) {
                                let row = row_off[q] + rank_subset(&wedge) * tgt_mult[q] + kp;
                                col.push((row as u32, if neg { field.neg(v) } else { v }));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(LabeledMatrix {
        row_labels,
        col_labels,
        columns,
    })
}

/// Pivot rows and columns (block-local indices) of a maximal invertible
/// sub-block, with the inverse of that sub-block.
fn invertible_part(field: &PrimeField, block: &DenseMatrix) -> (Vec<usize>, Vec<usize>, DenseMatrix) {
    let col_piv = block.rref(field).pivots;
    let row_piv = block.transpose().rref(field).pivots;
    let k = col_piv.len();
    let mut aug = DenseMatrix::zeros(k, 2 * k);
    for (a, &r) in row_piv.iter().enumerate() {
        for (b, &c) in col_piv.iter().enumerate() {
            aug.set(a, b, block.get(r, c));
        }
        aug.set(a, k + a, 1);
    }
    let red = aug.rref(field).matrix;
    let mut inv = DenseMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            inv.set(a, b, red.get(a, k + b));
        }
    }
    (row_piv, col_piv, inv)
}

struct Plan {
    u: u64,
    size: u32,
}

/// Rows and columns of the pivot block for label `key`.
fn block_of(m: &LabeledMatrix, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    let local: HashMap<usize, usize> = rows.iter().enumerate().map(|(a, &r)| (r, a)).collect();
    let mut b = DenseMatrix::zeros(rows.len(), cols.len());
    for (bc, &c) in cols.iter().enumerate() {
        for &(r, v) in &m.columns[c] {
            if let Some(&a) = local.get(&(r as usize)) {
                b.set(a, bc, v);
            }
        }
    }
    b
}

type Groups = (HashMap<u64, Vec<usize>>, HashMap<u64, Vec<usize>>);

fn group(m: &LabeledMatrix, u: u64, size: Option<u32>) -> Groups {
    let mut cols: HashMap<u64, Vec<usize>> = HashMap::new();
    for (c, &l) in m.col_labels.iter().enumerate() {
        if l & u == 0 && size.map_or(true, |s| l.count_ones() == s) {
            cols.entry(l).or_default().push(c);
        }
    }
    let mut rows: HashMap<u64, Vec<usize>> = HashMap::new();
    for (r, &l) in m.row_labels.iter().enumerate() {
        if l & u == u && cols.contains_key(&(l ^ u)) {
            rows.entry(l ^ u).or_default().push(r);
        }
    }
    cols.retain(|k, _| rows.contains_key(k));
    (rows, cols)
}

/// Picks `U` (the first one to three available vectors) and a label size,
/// estimating the pivot count from the ranks of a few sample blocks.
fn choose_round(field: &PrimeField, m: &LabeledMatrix, avail: u64) -> Option<(Plan, usize)> {
    const SAMPLES: usize = 4;
    let vectors: Vec<usize> = (0..64).filter(|&c| avail >> c & 1 == 1).collect();
    let mut best: Option<(usize, Plan)> = None;
    for u_len in 1..=vectors.len().min(3) {
        let u = mask(&vectors[..u_len]);
        let (rows, cols) = group(m, u, None);
        let mut by_size: HashMap<u32, Vec<u64>> = HashMap::new();
        for &k in cols.keys() {
            by_size.entry(k.count_ones()).or_default().push(k);
        }
        let mut sizes: Vec<(u32, Vec<u64>)> = by_size.into_iter().collect();
        sizes.sort_unstable_by_key(|e| e.0);
        for (size, mut keys) in sizes {
            keys.sort_unstable();
            let step = (keys.len() / SAMPLES).max(1);
            let sample: Vec<u64> = keys.iter().step_by(step).take(SAMPLES).copied().collect();
            let ranks: usize = sample.iter().map(|k| block_of(m, &rows[k], &cols[k]).rank(field)).sum();
            let gain = ranks * keys.len() / sample.len();
            if best.as_ref().map_or(true, |b| gain > b.0) {
                best = Some((gain, Plan { u, size }));
            }
        }
    }
    best.filter(|b| b.0 > 0).map(|(g, p)| (p, g))
}

/// One elimination round; returns the Schur complement and the rank of the
/// pivot blocks.
fn eliminate(field: &PrimeField, m: &LabeledMatrix, plan: &Plan) -> (LabeledMatrix, usize) {
    let u = plan.u;
    let p = field.p() as u64;
    let (block_rows, block_cols) = group(m, u, Some(plan.size));
    let nrows = m.row_labels.len();
    let mut row_slot: Vec<Option<(u32, u32)>> = vec![None; nrows];
    let mut blocks: Vec<(Vec<usize>, DenseMatrix)> = Vec::new();
    let mut is_pivot_col = vec![false; m.col_labels.len()];
    let mut rank = 0;
    let mut keys: Vec<u64> = block_rows.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let rows = &block_rows[&key];
        let cols = &block_cols[&key];
        let b = block_of(m, rows, cols);
        let (rp, cp, inv) = invertible_part(field, &b);
        if rp.is_empty() {
            continue;
        }
        let id = blocks.len() as u32;
        for (a, &r) in rp.iter().enumerate() {
            row_slot[rows[r]] = Some((id, a as u32));
        }
        let pcol: Vec<usize> = cp.iter().map(|&a| cols[a]).collect();
        for &c in &pcol {
            is_pivot_col[c] = true;
        }
        rank += pcol.len();
        blocks.push((pcol, inv));
    }

    let mut new_row = vec![u32::MAX; nrows];
    let mut row_labels = Vec::new();
    for r in 0..nrows {
        if row_slot[r].is_none() {
            new_row[r] = row_labels.len() as u32;
            row_labels.push(m.row_labels[r] & !u);
        }
    }
    // accumulators hold `x + p` (never 0) once touched
    let mut acc = vec![0u64; row_labels.len()];
    let mut touched: Vec<u32> = Vec::new();
    let mut col_labels = Vec::new();
    let mut columns = Vec::new();
    let mut d: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    for (c, col) in m.columns.iter().enumerate() {
        if is_pivot_col[c] {
            continue;
        }
        d.clear();
        for &(r, v) in col {
            match row_slot[r as usize] {
                Some((id, a)) => d.entry(id).or_default().push((a, v)),
                None => {
                    let nr = new_row[r as usize] as usize;
                    if acc[nr] == 0 {
                        touched.push(nr as u32);
                    }
                    acc[nr] = (acc[nr] + v as u64) % p + p;
                }
            }
        }
        // C − A B^{-1} D
        for (&id, entries) in &d {
            let (pcol, inv) = &blocks[id as usize];
            for (b, &pc) in pcol.iter().enumerate() {
                let w = entries
                    .iter()
                    .map(|&(a, v)| inv.get(b, a as usize) as u64 * v as u64)
                    .sum::<u64>()
                    % p;
                if w == 0 {
                    continue;
                }
                let neg = p - w;
                for &(r, v) in &m.columns[pc] {
                    let nr = new_row[r as usize];
                    if nr == u32::MAX {
                        continue;
                    }
                    let nr = nr as usize;
                    if acc[nr] == 0 {
                        touched.push(nr as u32);
                    }
                    acc[nr] = (acc[nr] + neg * v as u64) % p + p;
                }
            }
        }
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(touched.len());
        for &r in &touched {
            let v = (acc[r as usize] % p) as u32;
            acc[r as usize] = 0;
            if v != 0 {
                out.push((r, v));
            }
        }
        touched.clear();
        out.sort_unstable_by_key(|e| e.0);
        col_labels.push(m.col_labels[c] & !u);
        columns.push(out);
    }
    (
        LabeledMatrix {
            row_labels,
            col_labels,
            columns,
        },
        rank,
    )
}

/// Density above which the remainder is handed to dense elimination.
const DENSE_SWITCH: f64 = 0.05;
/// Smallest worthwhile round, as a fraction of the smaller dimension.
const MIN_GAIN: f64 = 0.05;

/// Rank of a labeled matrix by repeated block elimination, then direct
/// elimination of what is left. `f` is the number of label bits. Labels must
/// satisfy: an entry from column `ℓ` to row `ℓ'` is nonzero only if `ℓ ⊆ ℓ'`.
pub fn reduced_rank(
    field: &PrimeField,
    m: LabeledMatrix,
    f: usize,
    memory_budget: usize,
) -> Result<ReducedRank, LinalgError> {
    let (rows, cols) = (m.row_labels.len(), m.col_labels.len());
    let mut avail: u64 = if f >= 64 { u64::MAX } else { (1 << f) - 1 };
    let mut cur = m;
    let mut rank = 0;
    let mut rounds = Vec::new();
    while avail != 0 && !cur.columns.is_empty() && !cur.row_labels.is_empty() {
        let (rows_now, cols_now) = (cur.row_labels.len(), cur.col_labels.len());
        let nnz: usize = cur.columns.iter().map(Vec::len).sum();
        if nnz as f64 > DENSE_SWITCH * rows_now as f64 * cols_now as f64 {
            break;
        }
        let Some((plan, gain)) = choose_round(field, &cur, avail) else {
            break;
        };
        if (gain as f64) < MIN_GAIN * rows_now.min(cols_now) as f64 {
            break;
        }
        let (next, r) = eliminate(field, &cur, &plan);
        let stored: usize = next.columns.iter().map(Vec::len).sum::<usize>() * std::mem::size_of::<(u32, u32)>();
        if stored > memory_budget {
            return Err(LinalgError::BudgetExceeded {
                budget: memory_budget,
                needed: stored,
                rank_so_far: rank + r,
            });
        }
        rank += r;
        avail &= !plan.u;
        cur = next;
        rounds.push(ReductionRound {
            removed: (0..64).filter(|&c| plan.u >> c & 1 == 1).collect(),
            pivots: r,
            rows: cur.row_labels.len(),
            cols: cur.col_labels.len(),
            nnz: cur.columns.iter().map(Vec::len).sum(),
        });
    }
    let rest = SparseMatrix::from_columns(field, cur.row_labels.len(), cur.columns);
    rank += rest.rank_within(field, memory_budget)?;
    Ok(ReducedRank {
        rows,
        cols,
        rank,
        rounds,
    })
}
