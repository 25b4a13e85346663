use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{blocked_rank, DenseMatrix, LinalgError, PrimeField, BLOCKED_MAX_PRIME};

/// Above either bound [`SparseMatrix::rank`] switches from dense to sparse elimination.
pub const DENSE_DIM_LIMIT: usize = 60_000;
pub const DENSE_ENTRY_LIMIT: usize = 700_000_000;

/// Default memory budget for the sparse elimination path.
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

/// A column-compressed sparse matrix over GF(p).
///
/// Each column stores `(row, value)` pairs with strictly increasing rows and
/// no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(u32, u32)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![(i as u32, 1)]).collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(field: &PrimeField, rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        let mut columns: Vec<Vec<(u32, u32)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            columns[c].push((r as u32, v % field.p()));
        }
        for col in columns.iter_mut() {
            normalize_column(field, col);
        }
        SparseMatrix { rows, cols, columns }
    }

    /// Builds a matrix from per-column entry lists, normalizing each column.
    pub fn from_columns(field: &PrimeField, rows: usize, columns: Vec<Vec<(u32, u32)>>) -> Self {
        let cols = columns.len();
        let mut columns = columns;
        for col in columns.iter_mut() {
            for e in col.iter_mut() {
                assert!((e.0 as usize) < rows);
                e.1 %= field.p();
            }
            normalize_column(field, col);
        }
        SparseMatrix { rows, cols, columns }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut columns = vec![Vec::new(); m.cols()];
        for r in 0..m.rows() {
            for (c, &v) in m.row(r).iter().enumerate() {
                if v != 0 {
                    columns[c].push((r as u32, v));
                }
            }
        }
        SparseMatrix {
            rows: m.rows(),
            cols: m.cols(),
            columns,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[(u32, u32)] {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[Vec<(u32, u32)>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                m.set(r as usize, c, v);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut columns = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                columns[r as usize].push((c as u32, v));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns,
        }
    }

    pub fn mul_vec(&self, field: &PrimeField, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = field.p() as u64;
        let mut out = vec![0u64; self.rows];
        for (col, &x) in self.columns.iter().zip(v) {
            if x == 0 {
                continue;
            }
            for &(r, a) in col {
                let o = &mut out[r as usize];
                *o = (*o + a as u64 * x as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    /// Rank over GF(p): dense elimination for moderate sizes, sparse elimination beyond.
    pub fn rank(&self, field: &PrimeField) -> usize {
        if self.rows.min(self.cols) == 0 {
            return 0;
        }
        if self.rows.max(self.cols) <= DENSE_DIM_LIMIT && self.rows.saturating_mul(self.cols) <= DENSE_ENTRY_LIMIT {
            if field.p() < BLOCKED_MAX_PRIME {
                let mut data = vec![0f32; self.rows * self.cols];
                for (c, col) in self.columns.iter().enumerate() {
                    for &(r, v) in col {
                        data[r as usize * self.cols + c] = v as f32;
                    }
                }
                blocked_rank(field, self.rows, self.cols, data)
            } else {
                self.to_dense().rank(field)
            }
        } else {
            sparse_rank_streaming(self, field, DEFAULT_MEMORY_BUDGET)
                .expect("sparse elimination exceeded the default memory budget")
        }
    }

    /// Rank within a memory budget (bytes): dense elimination when the dense
    /// matrix fits, sparse elimination otherwise.
    pub fn rank_within(&self, field: &PrimeField, memory_budget: usize) -> Result<usize, LinalgError> {
        let entries = self.rows.saturating_mul(self.cols);
        if entries <= DENSE_ENTRY_LIMIT && entries.saturating_mul(4) <= memory_budget {
            Ok(self.rank(field))
        } else {
            sparse_rank_streaming(self, field, memory_budget)
        }
    }

    pub fn kernel_basis(&self, field: &PrimeField) -> Vec<Vec<u32>> {
        self.to_dense().kernel_basis(field)
    }
}

fn normalize_column(field: &PrimeField, col: &mut Vec<(u32, u32)>) {
    col.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(col.len());
    for &(r, v) in col.iter() {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 = field.add(last.1, v),
            _ => out.push((r, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    *col = out;
}

/// Rank by sparse left-looking elimination under a memory budget (bytes).
///
/// Columns are inserted sparsest first. Each column is reduced against the
/// pivots created so far, in creation order; a surviving column becomes a new
/// pivot whose lead is the surviving row of smallest static weight, which keeps
/// later reductions (and fill) small. Pivot `k` vanishes at the leads of all
/// pivots created before it, so one pass in creation order fully reduces a
/// vector.
pub fn sparse_rank_streaming(m: &SparseMatrix, field: &PrimeField, memory_budget: usize) -> Result<usize, LinalgError> {
    const NONE: u32 = u32::MAX;
    const ENTRY_BYTES: usize = std::mem::size_of::<(u32, u32)>();

    let rows = m.rows;
    let p = field.p() as u64;
    let mut row_weight = vec![0u32; rows];
    for col in &m.columns {
        for &(r, _) in col {
            row_weight[r as usize] += 1;
        }
    }
    let mut order: Vec<usize> = (0..m.cols).collect();
    order.sort_by_key(|&c| (m.columns[c].len(), c));

    let mut lead_pivot = vec![NONE; rows];
    let mut leads: Vec<u32> = Vec::new();
    let mut pivots: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut used = rows * 4 + rows * 9;

    let mut acc = vec![0u64; rows];
    let mut touched = vec![false; rows];
    let mut touched_list: Vec<u32> = Vec::new();
    let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();

    for c in order {
        let col = &m.columns[c];
        if col.is_empty() {
            continue;
        }
        for &(r, v) in col {
            acc[r as usize] = v as u64;
            touched[r as usize] = true;
            touched_list.push(r);
            if lead_pivot[r as usize] != NONE {
                heap.push(Reverse(lead_pivot[r as usize]));
            }
        }
        let mut last = NONE;
        while let Some(Reverse(k)) = heap.pop() {
            if k == last {
                continue;
            }
            last = k;
            let lead = leads[k as usize] as usize;
            let v = acc[lead] % p;
            if v == 0 {
                continue;
            }
            let factor = p - v;
            for &(r, a) in &pivots[k as usize] {
                let ri = r as usize;
                if !touched[ri] {
                    touched[ri] = true;
                    touched_list.push(r);
                    let kp = lead_pivot[ri];
                    if kp != NONE && kp != k {
                        heap.push(Reverse(kp));
                    }
                }
                acc[ri] = (acc[ri] + factor * a as u64) % p;
            }
        }

        let mut best: Option<(u32, u32)> = None;
        for &r in &touched_list {
            let ri = r as usize;
            if acc[ri] % p != 0 && lead_pivot[ri] == NONE {
                let key = (row_weight[ri], r);
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        if let Some((_, lead)) = best {
            let inv = field.inv((acc[lead as usize] % p) as u32) as u64;
            let mut entries: Vec<(u32, u32)> = touched_list
                .iter()
                .filter_map(|&r| {
                    let x = acc[r as usize] % p;
                    (x != 0).then(|| (r, (x * inv % p) as u32))
                })
                .collect();
            entries.sort_unstable_by_key(|e| e.0);
            used += entries.len() * ENTRY_BYTES + 32;
            if used > memory_budget {
                return Err(LinalgError::BudgetExceeded {
                    budget: memory_budget,
                    needed: used,
                    rank_so_far: pivots.len(),
                });
            }
            lead_pivot[lead as usize] = pivots.len() as u32;
            leads.push(lead);
            pivots.push(entries);
        }
        for &r in &touched_list {
            acc[r as usize] = 0;
            touched[r as usize] = false;
        }
        touched_list.clear();
    }
    Ok(pivots.len())
}
