use super::{blocked_rank, LinalgError, PrimeField, BLOCKED_MAX_PRIME};

/// Smallest dimension at which [`DenseMatrix::rank`] uses the blocked elimination.
const BLOCKED_MIN_DIM: usize = 256;

/// A dense row-major matrix over GF(p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: DenseMatrix,
    pub pivots: Vec<usize>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix from rows, reducing entries into the field.
    pub fn from_rows(field: &PrimeField, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Shape("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| field.reduce_i64(x)));
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul_vec(&self, field: &PrimeField, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = field.p() as u64;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for (a, b) in self.row(r).iter().zip(v) {
                    acc = (acc + *a as u64 * *b as u64) % p;
                }
                acc as u32
            })
            .collect()
    }

    pub fn mul(&self, field: &PrimeField, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let p = field.p() as u64;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u64; other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (j, o) in other.row(k).iter().enumerate() {
                    acc[j] = (acc[j] + a * *o as u64) % p;
                }
            }
            for (j, x) in acc.into_iter().enumerate() {
                out.set(i, j, x as u32);
            }
        }
        out
    }

    /// Rank over GF(p).
    pub fn rank(&self, field: &PrimeField) -> usize {
        if self.rows.min(self.cols) >= BLOCKED_MIN_DIM && field.p() < BLOCKED_MAX_PRIME {
            let data = self.data.iter().map(|&x| x as f32).collect();
            return blocked_rank(field, self.rows, self.cols, data);
        }
        Eliminator::new(self, field).forward(false).len()
    }

    /// Reduced row echelon form; pivots are the leftmost possible columns.
    pub fn rref(&self, field: &PrimeField) -> Rref {
        let mut e = Eliminator::new(self, field);
        let pivots = e.forward(true);
        Rref {
            matrix: e.finish(),
            pivots,
        }
    }

    /// A basis of the right kernel, one vector per non-pivot column.
    pub fn kernel_basis(&self, field: &PrimeField) -> Vec<Vec<u32>> {
        let Rref { matrix, pivots } = self.rref(field);
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        (0..self.cols)
            .filter(|&c| is_pivot[c].is_none())
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = field.neg(matrix.get(r, free));
                }
                v
            })
            .collect()
    }
}

/// Gaussian elimination with delayed modular reduction.
///
/// Rows live in `u64` so that row updates are plain multiply-adds; an entry is
/// only reduced when it is inspected as a pivot candidate or when its row is
/// promoted to a pivot row. Each row receives at most `min(rows, cols)` updates,
/// which bounds the accumulated magnitude.
struct Eliminator {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    p: u64,
    field: PrimeField,
    lazy: bool,
}

impl Eliminator {
    fn new(m: &DenseMatrix, field: &PrimeField) -> Self {
        let p = field.p() as u64;
        let updates = m.rows.min(m.cols) as u128 + 1;
        let lazy = updates * (p as u128 - 1) * (p as u128 - 1) + p as u128 <= u64::MAX as u128;
        Eliminator {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&x| x as u64).collect(),
            p,
            field: *field,
            lazy,
        }
    }

    /// Runs elimination and returns the pivot columns. With `full`, entries
    /// above each pivot are cleared too (Gauss-Jordan).
    fn forward(&mut self, full: bool) -> Vec<usize> {
        let (rows, cols, p) = (self.rows, self.cols, self.p);
        let mut pivots = Vec::new();
        let mut piv = vec![0u32; cols];
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            // first nonzero at or below the current rank row
            let mut found = None;
            for r in rank..rows {
                let x = &mut self.data[r * cols + col];
                *x %= p;
                if *x != 0 {
                    found = Some(r);
                    break;
                }
            }
            let Some(r) = found else { continue };
            if r != rank {
                let (a, b) = self.data.split_at_mut(r * cols);
                a[rank * cols..(rank + 1) * cols].swap_with_slice(&mut b[..cols]);
            }
            let inv = self.field.inv((self.data[rank * cols + col] % p) as u32) as u64;
            {
                let prow = &mut self.data[rank * cols..(rank + 1) * cols];
                for (k, x) in prow.iter_mut().enumerate().skip(col) {
                    *x = (*x % p) * inv % p;
                    piv[k] = *x as u32;
                }
            }
            let others = if full { 0..rows } else { rank + 1..rows };
            for r2 in others {
                if r2 == rank {
                    continue;
                }
                let row = &mut self.data[r2 * cols..(r2 + 1) * cols];
                let v = row[col] % p;
                if v == 0 {
                    row[col] = 0;
                    continue;
                }
                let c = p - v;
                row[col] = 0;
                if self.lazy {
                    for (x, &y) in row[col + 1..].iter_mut().zip(&piv[col + 1..]) {
                        *x += c * y as u64;
                    }
                } else {
                    for (x, &y) in row[col + 1..].iter_mut().zip(&piv[col + 1..]) {
                        *x = (*x % p + c * y as u64 % p) % p;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    fn finish(self) -> DenseMatrix {
        let p = self.p;
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().map(|x| (x % p) as u32).collect(),
        }
    }
}
