//! Bases of exterior powers: subsets of `{0, ..., n-1}` ranked colexicographically.
//!
//! `rank({c_0 < c_1 < ... < c_{j-1}}) = Σ_k C(c_k, k+1)`, so the subsets of
//! size `j` of `{0..n}` occupy ranks `0..C(n, j)` for every `n`.

use std::sync::OnceLock;

const MAX_N: usize = 68;

fn table() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![vec![0u64; MAX_N + 1]; MAX_N + 1];
        for n in 0..=MAX_N {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            }
        }
        t
    })
}

/// `C(n, k)` for `n ≤ 68` (saturating beyond `u64`).
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        0
    } else {
        table()[n][k]
    }
}

pub fn binom_usize(n: usize, k: usize) -> usize {
    binom(n, k) as usize
}

/// Colex rank of a strictly increasing subset.
pub fn rank_subset(subset: &[usize]) -> usize {
    debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
    subset.iter().enumerate().map(|(k, &c)| binom_usize(c, k + 1)).sum()
}

/// Inverse of [`rank_subset`] for subsets of size `j`.
pub fn unrank_subset(mut r: usize, j: usize) -> Vec<usize> {
    let mut out = vec![0; j];
    for k in (0..j).rev() {
        let mut c = k;
        while binom_usize(c + 1, k + 1) <= r {
            c += 1;
        }
        out[k] = c;
        r -= binom_usize(c, k + 1);
    }
    out
}

/// All `j`-subsets of `{0..n}` in rank order.
pub fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    (0..binom_usize(n, j)).map(|r| unrank_subset(r, j)).collect()
}

/// `ω ∧ e_c` as `(sign, sorted subset)`, or `None` if `c ∈ ω`. The sign is
/// `(-1)^{#{c' ∈ ω : c' > c}}`.
pub fn wedge_insert(subset: &[usize], c: usize) -> Option<(bool, Vec<usize>)> {
    let pos = subset.partition_point(|&x| x < c);
    if subset.get(pos) == Some(&c) {
        return None;
    }
    let mut out = Vec::with_capacity(subset.len() + 1);
    out.extend_from_slice(&subset[..pos]);
    out.push(c);
    out.extend_from_slice(&subset[pos..]);
    Some(((subset.len() - pos) % 2 == 1, out))
}

/// `ω` with its `k`-th element removed.
pub fn remove_at(subset: &[usize], k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(subset.len() - 1);
    out.extend_from_slice(&subset[..k]);
    out.extend_from_slice(&subset[k + 1..]);
    out
}
