use serde::{Deserialize, Serialize};

use crate::encomplex::betti_scroll;
use crate::exterior::binom;
use crate::gonal5::{config_for_genus, random_psi, GonalConfig, SkewPsi};
use crate::linalg::{PrimeField, SparseMatrix, DEFAULT_MEMORY_BUDGET};

use super::blocks::{assemble_blocks, assemble_psi, block_is_scalar, source_dim};
use super::reduce::{generic_labeled_psi, reduced_rank};
use super::ComparisonError;

/// `rank` of a comparison matrix, through the crate-wide rank policy.
pub fn comparison_rank(m: &SparseMatrix, field: &PrimeField) -> usize {
    m.rank(field)
}

/// Above this many columns [`psi_rank`] eliminates along the exterior algebra
/// before going dense.
pub const REDUCTION_MIN_COLS: usize = 2000;

/// `(rows, cols, rank)` of `ψ_j`. Large matrices are first reduced by
/// [`reduced_rank`] in a random basis of `F` drawn from the seed of Ψ; the
/// rank does not depend on that basis.
pub fn psi_rank(psi: &SkewPsi, j: usize) -> Result<(usize, usize, usize), ComparisonError> {
    let cols: usize = (0..5).map(|i| source_dim(psi, i, j)).sum();
    if cols <= REDUCTION_MIN_COLS {
        let m = assemble_psi(psi, j)?;
        return Ok((m.rows(), m.cols(), comparison_rank(&m, &psi.field)));
    }
    let m = generic_labeled_psi(psi, j, psi.seed)?;
    let r = reduced_rank(&psi.field, m, psi.config.f as usize, DEFAULT_MEMORY_BUDGET)?;
    Ok((r.rows, r.cols, r.rank))
}

/// Result of the extra-syzygy computation at `j = n - 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiDelta {
    pub genus: u32,
    pub prime: u32,
    pub seed: u64,
    pub j: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub dim_ker: usize,
    pub betti_x: usize,
    pub betti_c: usize,
}

/// `dim ker ψ_{n-2}` together with `β_{n,n+1}` of the scroll and of the curve.
pub fn betti_delta(psi: &SkewPsi) -> Result<BettiDelta, ComparisonError> {
    let cfg = &psi.config;
    let j = cfg.n as usize - 2;
    let (rows, cols, rank) = psi_rank(psi, j)?;
    let dim_ker = cols - rank;
    let betti_x = betti_scroll(cfg.f as usize, cfg.n as usize);
    Ok(BettiDelta {
        genus: cfg.g,
        prime: psi.field.p(),
        seed: psi.seed,
        j,
        rows,
        cols,
        rank,
        dim_ker,
        betti_x,
        betti_c: betti_x + dim_ker,
    })
}

/// [`betti_delta`] for the same genus and seed at two primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPrimeDelta {
    pub first: BettiDelta,
    pub second: BettiDelta,
    pub agree: bool,
}

impl TwoPrimeDelta {
    pub fn warning(&self) -> Option<String> {
        (!self.agree).then(|| {
            format!(
                "bad-prime warning: dim ker is {} mod {} but {} mod {}",
                self.first.dim_ker, self.first.prime, self.second.dim_ker, self.second.prime
            )
        })
    }
}

pub fn betti_delta_two_primes(
    g: u32,
    seed: u64,
    first: &PrimeField,
    second: &PrimeField,
) -> Result<TwoPrimeDelta, ComparisonError> {
    let cfg = config_for_genus(g)?;
    let a = betti_delta(&random_psi(&cfg, first, seed))?;
    let b = betti_delta(&random_psi(&cfg, second, seed))?;
    let agree = a.dim_ker == b.dim_ker;
    Ok(TwoPrimeDelta {
        first: a,
        second: b,
        agree,
    })
}

/// A position of the mapping cone where a scalar (same-twist) comparison map
/// sits: sources `C^{b_i}_j` at homological position `j + 2`, targets
/// `C^{a_q}_j` at position `j + 1`, all generated in degree `j + 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonminimalPosition {
    pub j: usize,
    /// Blocks `(q, i)`, `q ≠ i`, with `b_i ≥ j ≥ a_q + 1`.
    pub blocks: Vec<(usize, usize)>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub source_position: usize,
    pub target_position: usize,
    pub degree: usize,
}

pub fn nonminimal_inventory(config: &GonalConfig) -> Vec<NonminimalPosition> {
    let mut out = Vec::new();
    for j in 0..=config.f as usize {
        let ji = j as i64;
        let mut blocks = Vec::new();
        for q in 0..5 {
            for i in 0..5 {
                if q != i && config.b[i] >= ji && ji >= config.a[q] + 1 {
                    blocks.push((q, i));
                }
            }
        }
        if blocks.is_empty() {
            continue;
        }
        let mut rows: Vec<usize> = blocks.iter().map(|b| b.0).collect();
        let mut cols: Vec<usize> = blocks.iter().map(|b| b.1).collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        out.push(NonminimalPosition {
            j,
            blocks,
            rows,
            cols,
            source_position: j + 2,
            target_position: j + 1,
            degree: j + 3,
        });
    }
    out
}

/// The scalar map of the mapping cone at an inventory position.
pub fn scalar_map(psi: &SkewPsi, pos: &NonminimalPosition) -> Result<SparseMatrix, ComparisonError> {
    debug_assert!(pos.blocks.iter().all(|&(q, i)| block_is_scalar(psi, q, i, pos.j)));
    assemble_blocks(psi, pos.j, &pos.rows, &pos.cols)
}

/// Linear and quadratic strands of the Betti table of the curve. `None` marks
/// entries left undetermined because a scalar map was too large to rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub genus: u32,
    /// `β_{p,p+1}` for `p = 0..=g-2`.
    pub linear: Vec<Option<usize>>,
    /// `β_{p,p+2}` for `p = 0..=g-2`.
    pub quadratic: Vec<Option<usize>>,
    /// `(j, rank)` of each scalar map of the mapping cone.
    pub ranks: Vec<(usize, Option<usize>)>,
}

impl BettiTable {
    /// `β_{p,p+1} = β_{g-2-p, g-p}`, checked wherever both sides are known.
    pub fn is_self_dual(&self) -> bool {
        let top = self.genus as usize - 2;
        (0..=top).all(|p| match (self.linear[p], self.quadratic[top - p]) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.linear.iter().chain(&self.quadratic).all(Option::is_some)
    }

    /// Aligned text rendering (rows: strands 0..3, columns: p).
    pub fn render(&self) -> String {
        let g = self.genus as usize;
        let cell = |v: Option<usize>| v.map_or("?".to_string(), |x| if x == 0 { "-".into() } else { x.to_string() });
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut zero = vec!["-".to_string(); g - 1];
        zero[0] = "1".into();
        rows.push(zero);
        rows.push(self.linear.iter().map(|&v| cell(v)).collect());
        rows.push(self.quadratic.iter().map(|&v| cell(v)).collect());
        let mut cubic = vec!["-".to_string(); g - 1];
        cubic[g - 2] = "1".into();
        rows.push(cubic);
        let width = rows
            .iter()
            .flatten()
            .map(String::len)
            .max()
            .unwrap_or(1)
            .max(g.to_string().len());
        let mut out = String::new();
        out.push_str(&format!("{:>3} ", ""));
        for p in 0..g - 1 {
            out.push_str(&format!(" {:>width$}", p));
        }
        out.push('\n');
        for (k, row) in rows.iter().enumerate() {
            out.push_str(&format!("{:>3}:", k));
            for v in row {
                out.push_str(&format!(" {:>width$}", v));
            }
            out.push('\n');
        }
        out
    }
}

fn c(f: i64, k: i64) -> i64 {
    if k < 0 || f < 0 {
        0
    } else {
        binom(f as usize, k as usize) as i64
    }
}

/// Rank of the linear-strand part of the mapping cone at position `p` (degree
/// `p + 1`), before cancellation.
pub fn linear_term(config: &GonalConfig, p: usize) -> usize {
    let (f, p) = (config.f as i64, p as i64);
    let mut t = p * c(f, p + 1);
    for &a in &config.a {
        if p - 1 >= 0 && p - 1 <= a {
            t += c(f, p - 1) * (a - p + 2);
        }
    }
    for &b in &config.b {
        if p - 2 >= 0 && p - 2 <= b {
            t += c(f, p - 2) * (b - p + 3);
        }
    }
    t as usize
}

/// Rank of the quadratic-strand part of the mapping cone at position `p`
/// (degree `p + 2`), before cancellation.
pub fn quadratic_term(config: &GonalConfig, p: usize) -> usize {
    let (f, p) = (config.f as i64, p as i64);
    let mut t = 0;
    for &a in &config.a {
        if p - 1 >= a + 1 {
            t += c(f, p) * (p - 1 - a);
        }
    }
    for &b in &config.b {
        if p - 2 >= b + 1 {
            t += c(f, p - 1) * (p - 2 - b);
        }
    }
    if p - 3 >= 0 && p - 3 <= f - 2 {
        t += c(f, p - 3) * (f - p + 2);
    }
    t as usize
}

/// Linear and quadratic strands of the curve from the mapping cone, minimized
/// by the ranks of its scalar maps: `β_{p,p+1} = T_p − rank S_{p-2}` and
/// `β_{p,p+2} = Q_p − rank S_{p-1}`. Scalar maps with more than `max_dim`
/// rows or columns are not ranked.
pub fn mapping_cone_betti(psi: &SkewPsi, max_dim: usize) -> Result<BettiTable, ComparisonError> {
    let cfg = &psi.config;
    let g = cfg.g as usize;
    let inventory = nonminimal_inventory(cfg);
    let mut ranks = Vec::new();
    for pos in &inventory {
        let m = scalar_map(psi, pos)?;
        let r = (m.rows().max(m.cols()) <= max_dim).then(|| comparison_rank(&m, &psi.field));
        ranks.push((pos.j, r));
    }
    let rank_at = |j: i64| -> Option<usize> {
        if j < 0 {
            return Some(0);
        }
        ranks.iter().find(|(k, _)| *k as i64 == j).map_or(Some(0), |&(_, r)| r)
    };
    let mut linear = Vec::with_capacity(g - 1);
    let mut quadratic = Vec::with_capacity(g - 1);
    for p in 0..=g - 2 {
        linear.push(rank_at(p as i64 - 2).map(|r| linear_term(cfg, p) - r));
        quadratic.push(rank_at(p as i64 - 1).map(|r| quadratic_term(cfg, p) - r));
    }
    Ok(BettiTable {
        genus: cfg.g,
        linear,
        quadratic,
        ranks,
    })
}
