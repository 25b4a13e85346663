//! Blocked rank computation over GF(p) for `p < 2^24`.
//!
//! Entries are stored as `f32` (exact below `2^24`). The elimination is a
//! recursive LU with row pivoting: column ranges are halved, the left half is
//! factored, the right half is updated by a triangular solve and a matrix
//! product, and the right half is factored. Products run in `f64`, which is
//! exact as long as `k·(p-1)^2 + p < 2^53`; partial sums are reduced between
//! chunks of at most that length.

use std::ops::Range;

use super::PrimeField;

const BASE: usize = 8;
const TRSM_BASE: usize = 32;
const ROW_TILE: usize = 256;
const COL_TILE: usize = 1024;
const MAX_CHUNK: usize = 2048;

/// Largest prime for which [`blocked_rank`] applies.
pub const BLOCKED_MAX_PRIME: u32 = 1 << 24;

struct Blocked {
    a: Vec<f32>,
    rows: usize,
    cols: usize,
    field: PrimeField,
    p: f64,
    pinv: f64,
    chunk: usize,
}

impl Blocked {
    #[inline]
    fn reduce(&self, x: f64) -> f64 {
        let q = (x * self.pinv).floor();
        let mut r = x - q * self.p;
        if r < 0.0 {
            r += self.p;
        } else if r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> u32 {
        self.a[r * self.cols + c] as u32
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let (x, y) = self.a.split_at_mut(hi * self.cols);
        x[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut y[..self.cols]);
    }

    /// Unblocked elimination of columns `c0..c1` on rows `top..`.
    fn base(&mut self, top: usize, c0: usize, c1: usize, piv: &mut Vec<usize>) -> usize {
        let p = self.field.p() as u64;
        let n = self.cols;
        let mut k = 0;
        for col in c0..c1 {
            let r0 = top + k;
            if r0 == self.rows {
                break;
            }
            let Some(r) = (r0..self.rows).find(|&r| self.a[r * n + col] != 0.0) else {
                continue;
            };
            self.swap_rows(r, r0);
            let inv = self.field.inv(self.at(r0, col)) as u64;
            let prow: Vec<u64> = (col + 1..c1).map(|c| self.at(r0, c) as u64).collect();
            for r in r0 + 1..self.rows {
                let x = self.at(r, col) as u64;
                if x == 0 {
                    continue;
                }
                let l = x * inv % p;
                self.a[r * n + col] = l as f32;
                let neg = p - l;
                let row = &mut self.a[r * n + col + 1..r * n + c1];
                for (y, &u) in row.iter_mut().zip(&prow) {
                    *y = ((*y as u64 + neg * u) % p) as f32;
                }
            }
            piv.push(col);
            k += 1;
        }
        k
    }

    /// `A[rows, cols] -= A[rows, lcols] · A[urows, cols]`.
    fn gemm_update(&mut self, rows: Range<usize>, cols: Range<usize>, lcols: &[usize], urows: Range<usize>) {
        let k = lcols.len();
        if k == 0 || rows.is_empty() || cols.is_empty() {
            return;
        }
        let n = self.cols;
        let mut c0 = cols.start;
        while c0 < cols.end {
            let w = COL_TILE.min(cols.end - c0);
            let mut ubuf = vec![0f64; k * w];
            for h in 0..k {
                let src = &self.a[(urows.start + h) * n + c0..(urows.start + h) * n + c0 + w];
                for (d, &s) in ubuf[h * w..(h + 1) * w].iter_mut().zip(src) {
                    *d = s as f64;
                }
            }
            let mut r0 = rows.start;
            while r0 < rows.end {
                let hr = ROW_TILE.min(rows.end - r0);
                let mut dst = vec![0f64; hr * w];
                for i in 0..hr {
                    let src = &self.a[(r0 + i) * n + c0..(r0 + i) * n + c0 + w];
                    for (d, &s) in dst[i * w..(i + 1) * w].iter_mut().zip(src) {
                        *d = s as f64;
                    }
                }
                let mut k0 = 0;
                while k0 < k {
                    let kc = self.chunk.min(k - k0);
                    let mut lbuf = vec![0f64; hr * kc];
                    for i in 0..hr {
                        let row = (r0 + i) * n;
                        for (h, &lc) in lcols[k0..k0 + kc].iter().enumerate() {
                            lbuf[i * kc + h] = self.a[row + lc] as f64;
                        }
                    }
                    // SAFETY: the buffers are distinct, contiguous and sized for the shapes passed.
                    unsafe {
                        gemm::gemm(
                            hr,
                            w,
                            kc,
                            dst.as_mut_ptr(),
                            1,
                            w as isize,
                            true,
                            lbuf.as_ptr(),
                            1,
                            kc as isize,
                            ubuf[k0 * w..].as_ptr(),
                            1,
                            w as isize,
                            1.0,
                            -1.0,
                            false,
                            false,
                            false,
                            gemm::Parallelism::None,
                        );
                    }
                    k0 += kc;
                    if k0 < k {
                        for x in dst.iter_mut() {
                            *x = self.reduce(*x);
                        }
                    }
                }
                for i in 0..hr {
                    for x in 0..w {
                        self.a[(r0 + i) * n + c0 + x] = self.reduce(dst[i * w + x]) as f32;
                    }
                }
                r0 += hr;
            }
            c0 += w;
        }
    }

    /// Applies `L^{-1}` (unit lower, multipliers of the pivot rows `t0..` at
    /// columns `lp`) to the pivot rows restricted to `cols`.
    fn trsm(&mut self, t0: usize, lp: &[usize], cols: Range<usize>) {
        let k = lp.len();
        if k <= TRSM_BASE {
            let p = self.field.p() as u64;
            let n = self.cols;
            for i in 1..k {
                let mut acc: Vec<u64> = (cols.clone()).map(|c| self.at(t0 + i, c) as u64).collect();
                for h in 0..i {
                    let l = self.at(t0 + i, lp[h]) as u64;
                    if l == 0 {
                        continue;
                    }
                    let neg = p - l;
                    for (x, c) in acc.iter_mut().zip(cols.clone()) {
                        *x = (*x + neg * self.a[(t0 + h) * n + c] as u64) % p;
                    }
                }
                for (x, c) in acc.into_iter().zip(cols.clone()) {
                    self.a[(t0 + i) * n + c] = x as f32;
                }
            }
            return;
        }
        let h = k / 2;
        self.trsm(t0, &lp[..h], cols.clone());
        self.gemm_update(t0 + h..t0 + k, cols.clone(), &lp[..h], t0..t0 + h);
        self.trsm(t0 + h, &lp[h..], cols);
    }

    fn factor(&mut self, top: usize, c0: usize, c1: usize, piv: &mut Vec<usize>) -> usize {
        if top == self.rows || c0 == c1 {
            return 0;
        }
        if c1 - c0 <= BASE {
            return self.base(top, c0, c1, piv);
        }
        let mid = c0 + (c1 - c0) / 2;
        let start = piv.len();
        let k1 = self.factor(top, c0, mid, piv);
        if k1 > 0 {
            let lp = piv[start..start + k1].to_vec();
            self.trsm(top, &lp, mid..c1);
            self.gemm_update(top + k1..self.rows, mid..c1, &lp, top..top + k1);
        }
        let k2 = self.factor(top + k1, mid, c1, piv);
        k1 + k2
    }
}

/// Rank of a row-major `rows × cols` matrix with entries in `[0, p)`.
pub fn blocked_rank(field: &PrimeField, rows: usize, cols: usize, data: Vec<f32>) -> usize {
    assert!(field.p() < BLOCKED_MAX_PRIME);
    assert_eq!(data.len(), rows * cols);
    let p = field.p() as f64;
    let bound = ((1u64 << 53) as f64 - p) / ((p - 1.0).max(1.0) * (p - 1.0).max(1.0));
    let chunk = (bound as usize).clamp(1, MAX_CHUNK);
    let mut b = Blocked {
        a: data,
        rows,
        cols,
        field: *field,
        p,
        pinv: 1.0 / p,
        chunk,
    };
    let mut piv = Vec::new();
    b.factor(0, 0, cols, &mut piv)
}
