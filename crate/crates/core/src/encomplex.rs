//! Eagon-Northcott type complexes `C^b` resolving `O(bR)` over the ambient
//! polynomial ring of a scroll.
//!
//! With `F = H^0(O(H-R))` and `G = H^0(O(R)) = <s, t>`,
//!
//! ```text
//! C^b_j = Λ^j F ⊗ S_{b-j} G        (j ≤ b)      generators in degree j
//! C^b_j = Λ^{j+1} F ⊗ D_{j-b-1} G*  (j ≥ b+1)    generators in degree j+1
//! ```
//!
//! A basis element of a term is `(ω, k)` where `ω` is a colex-ranked subset and
//! `k` indexes the monomial `s^{D-k} t^k` (or its dual) of the `G`-factor.
//! Its position is `rank(ω)·mult + k`.
//!
//! Differentials use `G* ≅ G` through the determinant: writing `Φ_s(f) = x(s·f)`
//! and `Φ_t(f) = x(t·f)`,
//!
//! ```text
//! first regime:   ω ⊗ m  ↦ ι_{Φ_t}ω ⊗ s·m − ι_{Φ_s}ω ⊗ t·m
//! middle (b+1):   ω      ↦ ι_{Φ_s} ι_{Φ_t} ω
//! second regime:  ω ⊗ φ  ↦ ι_{Φ_t}ω ⊗ (s⌟φ) − ι_{Φ_s}ω ⊗ (t⌟φ)
//! ```
//!
//! where `ι_φ(f_{c_1}∧…∧f_{c_j}) = Σ_k (−1)^{k+1} φ(f_{c_k}) f_{c_1}∧…∧\hat{f_{c_k}}∧…∧f_{c_j}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{binom_usize, rank_subset, remove_at, subsets};
use crate::linalg::PrimeField;
use crate::poly::{Poly, PolyMatrix};
use crate::scroll::{phi_matrix, ScrollType};

/// Differentials are only materialized up to this scroll degree.
pub const MAX_MATERIALIZED_F: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ENError {
    #[error("differentials are only built for f ≤ {MAX_MATERIALIZED_F} (got f = {0})")]
    TooLarge(usize),
    #[error("no differential leaves C_{0}")]
    NoDifferential(usize),
    #[error("twist b = {0} is below -1")]
    BadTwist(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ENTerm {
    pub f: usize,
    pub b: i64,
    pub j: usize,
    pub regime: Regime,
    pub rank: usize,
}

impl ENTerm {
    pub fn new(f: usize, b: i64, j: usize) -> Self {
        let regime = regime(b, j);
        ENTerm {
            f,
            b,
            j,
            regime,
            rank: term_rank(f, b, j),
        }
    }

    /// Rank of the `G`-factor.
    pub fn multiplicity(&self) -> usize {
        multiplicity(self.b, self.j)
    }

    /// Size of the exterior power.
    pub fn wedge_degree(&self) -> usize {
        match self.regime {
            Regime::First => self.j,
            Regime::Second => self.j + 1,
        }
    }

    /// Degree of the generators when resolving `O(aH + bR)`: `j - a` or `j + 1 - a`.
    pub fn generator_degree(&self, a: i64) -> i64 {
        self.wedge_degree() as i64 - a
    }
}

pub fn regime(b: i64, j: usize) -> Regime {
    if (j as i64) <= b {
        Regime::First
    } else {
        Regime::Second
    }
}

fn multiplicity(b: i64, j: usize) -> usize {
    let j = j as i64;
    if j <= b {
        (b - j + 1) as usize
    } else {
        (j - b) as usize
    }
}

/// Rank of `C^b_j`: `C(f,j)·(b-j+1)` for `j ≤ b`, else `C(f,j+1)·(j-b)`.
pub fn term_rank(f: usize, b: i64, j: usize) -> usize {
    match regime(b, j) {
        Regime::First => binom_usize(f, j) * multiplicity(b, j),
        Regime::Second => binom_usize(f, j + 1) * multiplicity(b, j),
    }
}

/// `β_{p,p+1}` of the scroll: `p·C(f, p+1)`.
pub fn betti_scroll(f: usize, p: usize) -> usize {
    p * binom_usize(f, p + 1)
}

/// Largest `j` with a nonzero term.
pub fn length(f: usize, b: i64) -> usize {
    if b >= f as i64 {
        f
    } else {
        f - 1
    }
}

/// Basis of `C^b_j` as `(subset, G-monomial index)` pairs in position order.
pub fn term_basis(f: usize, b: i64, j: usize) -> Vec<(Vec<usize>, usize)> {
    let t = ENTerm::new(f, b, j);
    let mult = t.multiplicity();
    let mut out = Vec::with_capacity(t.rank);
    for s in subsets(f, t.wedge_degree()) {
        for k in 0..mult {
            out.push((s.clone(), k));
        }
    }
    out
}

/// Position of `(ω, k)` in the basis of `C^b_j`.
pub fn term_index(b: i64, j: usize, subset: &[usize], k: usize) -> usize {
    rank_subset(subset) * multiplicity(b, j) + k
}

/// The differential `C^b_j → C^b_{j-1}` on a scroll, with entries in the
/// ambient coordinates (quadrics at `j = b+1`, linear forms otherwise).
pub fn differential(field: &PrimeField, scroll: &ScrollType, b: i64, j: usize) -> Result<PolyMatrix, ENError> {
    let f = scroll.f() as usize;
    if f > MAX_MATERIALIZED_F {
        return Err(ENError::TooLarge(f));
    }
    if b < -1 {
        return Err(ENError::BadTwist(b));
    }
    if j == 0 || j > length(f, b) {
        return Err(ENError::NoDifferential(j));
    }
    let phi = phi_matrix(scroll);
    let xs = |c: usize| Poly::var(phi.top[c] as u32);
    let xt = |c: usize| Poly::var(phi.bottom[c] as u32);
    let minus = field.neg(1);
    let src = ENTerm::new(f, b, j);
    let tgt = ENTerm::new(f, b, j - 1);
    let mut m = PolyMatrix::zeros(tgt.rank, src.rank);
    let ji = j as i64;

    for (col, (omega, k)) in term_basis(f, b, j).into_iter().enumerate() {
        if ji <= b {
            // first regime: m = s^{D-k} t^k, s·m keeps index k, t·m has index k+1
            for pos in 0..omega.len() {
                let c = omega[pos];
                let rest = remove_at(&omega, pos);
                let sign = if pos % 2 == 0 { 1 } else { minus };
                m.add_to(field, term_index(b, j - 1, &rest, k), col, &xt(c), sign);
                m.add_to(field, term_index(b, j - 1, &rest, k + 1), col, &xs(c), field.neg(sign));
            }
        } else if ji == b + 1 {
            for p1 in 0..omega.len() {
                let c1 = omega[p1];
                let rest1 = remove_at(&omega, p1);
                for p2 in 0..rest1.len() {
                    let c2 = rest1[p2];
                    let rest2 = remove_at(&rest1, p2);
                    let sign = if (p1 + p2) % 2 == 0 { 1 } else { minus };
                    let q = xt(c1).mul(field, &xs(c2));
                    m.add_to(field, term_index(b, j - 1, &rest2, 0), col, &q, sign);
                }
            }
        } else {
            // second regime: φ = (s^{D-k} t^k)^*, D = j-b-1
            let d = (ji - b - 1) as usize;
            for pos in 0..omega.len() {
                let c = omega[pos];
                let rest = remove_at(&omega, pos);
                let sign = if pos % 2 == 0 { 1 } else { minus };
                if d - k >= 1 {
                    m.add_to(field, term_index(b, j - 1, &rest, k), col, &xt(c), sign);
                }
                if k >= 1 {
                    m.add_to(field, term_index(b, j - 1, &rest, k - 1), col, &xs(c), field.neg(sign));
                }
            }
        }
    }
    Ok(m)
}

/// Whether `d_{j-1} d_j = 0` for every `j` of `C^b` on the scroll.
pub fn differentials_compose_to_zero(field: &PrimeField, scroll: &ScrollType, b: i64) -> Result<bool, ENError> {
    let f = scroll.f() as usize;
    for j in 2..=length(f, b) {
        let d1 = differential(field, scroll, b, j - 1)?;
        let d2 = differential(field, scroll, b, j)?;
        if !d1.mul(field, &d2).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ_j (-1)^j dim (C^b_j)_m`, to be compared with `h^0(O(mH + bR))`.
pub fn euler_characteristic(scroll: &ScrollType, b: i64, m: i64) -> i64 {
    let f = scroll.f() as usize;
    let nvars = scroll.ambient_dim();
    let sym = |d: i64| {
        if d < 0 {
            0
        } else {
            binom_usize(d as usize + nvars - 1, nvars - 1) as i64
        }
    };
    (0..=length(f, b))
        .map(|j| {
            let t = ENTerm::new(f, b, j);
            let dim = t.rank as i64 * sym(m - t.generator_degree(0));
            if j % 2 == 0 {
                dim
            } else {
                -dim
            }
        })
        .sum()
}
